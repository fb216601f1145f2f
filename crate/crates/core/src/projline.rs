//! Points of the projective line, the chordal metric, and Möbius changes of
//! coordinates.
//!
//! A point `(z:w)` is identified with the ratio `z/w` in the extended complex
//! plane. Every [`ProjPoint`] is kept in canonical form: `|z|² + |w|² = 1` and
//! the coordinate of largest modulus (the first one on ties) is real and
//! positive. Two representatives of the same point then agree up to rounding,
//! and the chordal distance is simply `|z₁w₂ − z₂w₁|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[C64; 2]", into = "[C64; 2]")]
pub struct ProjPoint {
    z: C64,
    w: C64,
}

impl ProjPoint {
    pub const INFINITY: ProjPoint = ProjPoint {
        z: C64::new(1.0, 0.0),
        w: C64::new(0.0, 0.0),
    };
    pub const ZERO: ProjPoint = ProjPoint {
        z: C64::new(0.0, 0.0),
        w: C64::new(1.0, 0.0),
    };

    pub fn new(z: C64, w: C64) -> Result<Self> {
        canonicalize(z, w)
    }

    /// The point `(c:1)`.
    pub fn finite(c: C64) -> Self {
        canonicalize(c, C64::new(1.0, 0.0)).expect("(c:1) is never (0:0)")
    }

    pub fn z(&self) -> C64 {
        self.z
    }

    pub fn w(&self) -> C64 {
        self.w
    }

    pub fn coords(&self) -> (C64, C64) {
        (self.z, self.w)
    }

    /// The affine coordinate `z/w`, or `None` at infinity.
    pub fn affine(&self) -> Option<C64> {
        if self.w.norm() == 0.0 {
            None
        } else {
            Some(self.z / self.w)
        }
    }

    pub fn is_infinity(&self, eps: f64) -> bool {
        chordal_distance(self, &Self::INFINITY) < eps
    }

    pub fn approx_eq(&self, other: &ProjPoint, eps: f64) -> bool {
        chordal_distance(self, other) < eps
    }

    /// Image on the unit sphere in R³ under the Hopf map. Euclidean distance
    /// there is twice the chordal distance.
    pub fn to_sphere(&self) -> [f64; 3] {
        let zw = self.z * self.w.conj();
        [
            2.0 * zw.re,
            2.0 * zw.im,
            self.z.norm_sqr() - self.w.norm_sqr(),
        ]
    }

    /// Inverse of [`ProjPoint::to_sphere`]. The input is projected radially
    /// onto the sphere first; the zero vector is rejected.
    pub fn from_sphere(v: [f64; 3]) -> Result<Self> {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NotProjectivePoint);
        }
        let (x, y, h) = (v[0] / r, v[1] / r, v[2] / r);
        if h >= 0.0 {
            let z = ((1.0 + h) / 2.0).sqrt();
            let w = C64::new(x, -y) / (2.0 * z);
            canonicalize(C64::new(z, 0.0), w)
        } else {
            let w = ((1.0 - h) / 2.0).sqrt();
            let z = C64::new(x, y) / (2.0 * w);
            canonicalize(z, C64::new(w, 0.0))
        }
    }
}

impl TryFrom<[C64; 2]> for ProjPoint {
    type Error = Error;

    fn try_from(v: [C64; 2]) -> Result<Self> {
        canonicalize(v[0], v[1])
    }
}

impl From<ProjPoint> for [C64; 2] {
    fn from(p: ProjPoint) -> Self {
        [p.z, p.w]
    }
}

impl std::fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.affine() {
            Some(c) if c.norm() < 1e12 => write!(f, "{}{:+}i", c.re, c.im),
            _ => write!(f, "inf"),
        }
    }
}

/// Canonical representative of `(z:w)`.
pub fn canonicalize(z: C64, w: C64) -> Result<ProjPoint> {
    let (az, aw) = (z.norm(), w.norm());
    if !(az.is_finite() && aw.is_finite()) || (az == 0.0 && aw == 0.0) {
        return Err(Error::NotProjectivePoint);
    }
    // Scale by the larger modulus first so the 2-norm cannot overflow.
    let big = az.max(aw);
    let (z, w) = (z / big, w / big);
    let n = (z.norm_sqr() + w.norm_sqr()).sqrt();
    let lead = if az >= aw { z } else { w };
    let phase = lead.conj() / lead.norm();
    let (mut z, mut w) = (z * phase / n, w * phase / n);
    if az >= aw {
        z = C64::new(z.re, 0.0);
    } else {
        w = C64::new(w.re, 0.0);
    }
    Ok(ProjPoint { z, w })
}

/// Chordal distance `|z_p w_q − z_q w_p|`, in `[0, 1]`.
pub fn chordal_distance(p: &ProjPoint, q: &ProjPoint) -> f64 {
    (p.z * q.w - q.z * p.w).norm().min(1.0)
}

/// An invertible 2×2 complex matrix acting by `(z:w) ↦ (az + bw : cz + dw)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mobius {
    a: C64,
    b: C64,
    c: C64,
    d: C64,
}

impl Mobius {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Result<Self> {
        let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
        let det = a * d - b * c;
        if !(scale > 0.0) || det.norm() <= 1e-14 * scale * scale {
            return Err(Error::SingularMobius);
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `(z:w) ↦ (w:z)`, i.e. `z ↦ 1/z`.
    pub fn swap() -> Self {
        let (one, zero) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
        Self {
            a: zero,
            b: one,
            c: one,
            d: zero,
        }
    }

    pub fn entries(&self) -> [C64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Mobius) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let (z, w) = p.coords();
        canonicalize(self.a * z + self.b * w, self.c * z + self.d * w)
            .expect("invertible matrix maps nonzero vectors to nonzero vectors")
    }
}

/// Apply a Möbius transformation, rejecting singular matrices.
pub fn mobius_apply(m: &Mobius, p: &ProjPoint) -> Result<ProjPoint> {
    let scale = m.entries().iter().map(|e| e.norm()).fold(0.0, f64::max);
    if m.det().norm() <= 1e-14 * scale * scale {
        return Err(Error::SingularMobius);
    }
    Ok(m.apply(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn canonical_examples() {
        let p = canonicalize(c(2.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(p.coords(), (c(1.0, 0.0), c(0.0, 0.0)));

        let p = canonicalize(c(0.0, 0.0), c(0.0, -3.0)).unwrap();
        assert!((p.z() - c(0.0, 0.0)).norm() < 1e-15);
        assert!((p.w() - c(1.0, 0.0)).norm() < 1e-15);

        let p = canonicalize(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((p.z() - c(s, 0.0)).norm() < 1e-15);
        assert!((p.w() - c(s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_is_not_a_point() {
        assert_eq!(
            canonicalize(c(0.0, 0.0), c(0.0, 0.0)),
            Err(Error::NotProjectivePoint)
        );
    }

    #[test]
    fn chordal_examples() {
        assert_eq!(chordal_distance(&ProjPoint::ZERO, &ProjPoint::INFINITY), 1.0);
        let p = ProjPoint::finite(c(0.3, -2.0));
        assert_eq!(chordal_distance(&p, &p), 0.0);
        let one = ProjPoint::finite(c(1.0, 0.0));
        let d = chordal_distance(&one, &ProjPoint::INFINITY);
        assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn mobius_examples() {
        let p = ProjPoint::finite(c(0.7, 0.1));
        assert!(Mobius::identity().apply(&p).approx_eq(&p, 1e-15));
        assert!(Mobius::swap()
            .apply(&ProjPoint::INFINITY)
            .approx_eq(&ProjPoint::ZERO, 1e-15));
        let shift = Mobius::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let img = shift.apply(&ProjPoint::finite(c(1.0, 0.0)));
        assert!(img.approx_eq(&ProjPoint::finite(c(2.0, 0.0)), 1e-15));
    }

    #[test]
    fn singular_matrix_rejected() {
        let one = c(1.0, 0.0);
        assert_eq!(Mobius::new(one, one, one, one), Err(Error::SingularMobius));
        let m = Mobius {
            a: one,
            b: one,
            c: one,
            d: one,
        };
        assert_eq!(mobius_apply(&m, &ProjPoint::ZERO), Err(Error::SingularMobius));
    }

    #[test]
    fn sphere_round_trip() {
        for p in [
            ProjPoint::ZERO,
            ProjPoint::INFINITY,
            ProjPoint::finite(c(1.0, 0.0)),
            ProjPoint::finite(c(-0.2, 5.0)),
        ] {
            let q = ProjPoint::from_sphere(p.to_sphere()).unwrap();
            assert!(p.approx_eq(&q, 1e-14), "{p} vs {q}");
        }
    }

    #[test]
    fn serde_shape() {
        let p = ProjPoint::INFINITY;
        assert_eq!(serde_json::to_string(&p).unwrap(), "[[1.0,0.0],[0.0,0.0]]");
        let q: ProjPoint = serde_json::from_str("[[0.0,0.0],[0.0,-3.0]]").unwrap();
        assert!(q.approx_eq(&ProjPoint::ZERO, 1e-15));
        assert!(serde_json::from_str::<ProjPoint>("[[0.0,0.0],[0.0,0.0]]").is_err());
    }

    fn point() -> impl Strategy<Value = ProjPoint> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_filter("nonzero", |(a, b, c, d)| a.abs() + b.abs() + c.abs() + d.abs() > 1e-3)
            .prop_map(|(a, b, cc, d)| canonicalize(c(a, b), c(cc, d)).unwrap())
    }

    fn mobius() -> impl Strategy<Value = Mobius> {
        proptest::collection::vec(-2.0..2.0f64, 8)
            .prop_filter_map("invertible", |v| {
                let m = Mobius::new(c(v[0], v[1]), c(v[2], v[3]), c(v[4], v[5]), c(v[6], v[7]))
                    .ok()?;
                (m.det().norm() > 0.1).then_some(m)
            })
    }

    proptest! {
        #[test]
        fn triangle_inequality(p in point(), q in point(), r in point()) {
            let lhs = chordal_distance(&p, &r);
            let rhs = chordal_distance(&p, &q) + chordal_distance(&q, &r);
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn mobius_inverse_round_trip(m in mobius(), p in point()) {
            let back = m.inverse().apply(&m.apply(&p));
            prop_assert!(chordal_distance(&back, &p) < 1e-12);
        }

        #[test]
        fn canonicalize_scale_invariant(p in point(), lr in 0.01..100.0f64, th in 0.0..6.28f64) {
            let lam = C64::from_polar(lr, th);
            let q = canonicalize(lam * p.z(), lam * p.w()).unwrap();
            prop_assert!(chordal_distance(&p, &q) < 1e-14);
            prop_assert!((q.z() - p.z()).norm() < 1e-12 || (p.z().norm() - p.w().norm()).abs() < 1e-9);
        }

        #[test]
        fn canonicalize_idempotent(p in point()) {
            let q = canonicalize(p.z(), p.w()).unwrap();
            prop_assert!((q.z() - p.z()).norm() < 1e-15 && (q.w() - p.w()).norm() < 1e-15);
        }
    }
}
