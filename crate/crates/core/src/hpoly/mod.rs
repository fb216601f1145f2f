//! Homogeneous polynomials in two variables.
//!
//! An [`HPoly`] of degree `d` stores `d + 1` coefficients with `coeffs[i]`
//! multiplying `z^i w^(d−i)`. The all-zero coefficient vector is a legal
//! value (the zero polynomial of that degree); boundary maps like `(wP : 0)`
//! need it.

mod gcd;
mod roots;

pub use gcd::{numeric_gcd, numeric_gcd_with_holes, GcdResult};
pub use roots::{aberth_roots, roots, RootEntry, RootList};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projline::ProjPoint;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoly", into = "RawPoly")]
pub struct HPoly {
    coeffs: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    degree: usize,
    coeffs: Vec<C64>,
}

impl TryFrom<RawPoly> for HPoly {
    type Error = Error;

    fn try_from(raw: RawPoly) -> Result<Self> {
        if raw.coeffs.len() != raw.degree + 1 {
            return Err(Error::Validation(format!(
                "polynomial of degree {} needs {} coefficients, got {}",
                raw.degree,
                raw.degree + 1,
                raw.coeffs.len()
            )));
        }
        if raw.coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Validation("non-finite coefficient".into()));
        }
        Ok(HPoly { coeffs: raw.coeffs })
    }
}

impl From<HPoly> for RawPoly {
    fn from(p: HPoly) -> Self {
        RawPoly {
            degree: p.degree(),
            coeffs: p.coeffs,
        }
    }
}

impl HPoly {
    /// Build from coefficients, `coeffs[i]` ↔ `z^i w^(d−i)`.
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "a polynomial has at least one coefficient");
        HPoly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero(degree: usize) -> Self {
        HPoly {
            coeffs: vec![ZERO; degree + 1],
        }
    }

    pub fn constant(c: C64) -> Self {
        HPoly { coeffs: vec![c] }
    }

    /// The monomial `c · z^i w^(d−i)`.
    pub fn monomial(degree: usize, i: usize, c: C64) -> Self {
        assert!(i <= degree);
        let mut p = Self::zero(degree);
        p.coeffs[i] = c;
        p
    }

    pub fn z() -> Self {
        Self::monomial(1, 1, ONE)
    }

    pub fn w() -> Self {
        Self::monomial(1, 0, ONE)
    }

    /// The linear form vanishing at `p`: `w_p·z − z_p·w`.
    pub fn linear_factor(p: &ProjPoint) -> Self {
        HPoly {
            coeffs: vec![-p.z(), p.w()],
        }
    }

    /// `∏ (w_r z − z_r w)^mult` over the given roots.
    pub fn from_roots<'a>(roots: impl IntoIterator<Item = (&'a ProjPoint, usize)>) -> Self {
        let mut acc = Self::constant(ONE);
        for (p, m) in roots {
            let f = Self::linear_factor(p);
            for _ in 0..m {
                acc = acc.multiply(&f);
            }
        }
        acc
    }

    /// `∏ (z − r w)` over affine roots.
    pub fn from_affine_roots(roots: &[C64]) -> Self {
        roots.iter().fold(Self::constant(ONE), |acc, &r| {
            acc.multiply(&HPoly::new(vec![-r, ONE]))
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> C64 {
        self.coeffs[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// Largest coefficient modulus.
    pub fn max_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: C64) -> Self {
        HPoly {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Rescaled so the largest coefficient modulus is 1. The zero polynomial
    /// is returned unchanged.
    pub fn normalized(&self) -> Self {
        let m = self.max_norm();
        if m == 0.0 {
            self.clone()
        } else {
            self.scale(C64::new(1.0 / m, 0.0))
        }
    }

    /// Homogeneous evaluation `Σ coeffs[i] z^i w^(d−i)`.
    pub fn evaluate(&self, z: C64, w: C64) -> C64 {
        let d = self.degree();
        let mut acc = self.coeffs[d];
        let mut wp = ONE;
        for k in 1..=d {
            wp *= w;
            acc = acc * z + self.coeffs[d - k] * wp;
        }
        acc
    }

    pub fn evaluate_at(&self, p: &ProjPoint) -> C64 {
        self.evaluate(p.z(), p.w())
    }

    pub fn add(&self, other: &HPoly) -> Result<HPoly> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(format!(
                "cannot add degree {} and degree {}",
                self.degree(),
                other.degree()
            )));
        }
        Ok(HPoly {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Product; degrees add.
    pub fn multiply(&self, other: &HPoly) -> HPoly {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        HPoly { coeffs: out }
    }

    /// `self^n` by repeated squaring, renormalizing every product when
    /// `renormalize` is set (the projective class is then the result).
    pub fn pow(&self, n: usize, renormalize: bool) -> HPoly {
        let norm = |p: HPoly| if renormalize { p.normalized() } else { p };
        let mut result = HPoly::constant(ONE);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = norm(result.multiply(&base));
            }
            e >>= 1;
            if e > 0 {
                base = norm(base.multiply(&base));
            }
        }
        result
    }

    /// `self(p, q)`: substitute homogeneous polynomials of a common degree
    /// `e` for `z` and `w`. The result has degree `deg(self)·e`.
    pub fn substitute(&self, p: &HPoly, q: &HPoly) -> HPoly {
        assert_eq!(p.degree(), q.degree(), "substituted pair must share a degree");
        let d = self.degree();
        let e = p.degree();
        let mut ppow = vec![HPoly::constant(ONE)];
        let mut qpow = vec![HPoly::constant(ONE)];
        for k in 1..=d {
            ppow.push(ppow[k - 1].multiply(p));
            qpow.push(qpow[k - 1].multiply(q));
        }
        let mut out = HPoly::zero(d * e);
        for (i, c) in self.coeffs.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            let term = ppow[i].multiply(&qpow[d - i]);
            for (o, t) in out.coeffs.iter_mut().zip(term.coeffs) {
                *o += c * t;
            }
        }
        out
    }

    /// Partial derivative in `z`.
    pub fn d_dz(&self) -> HPoly {
        if self.degree() == 0 {
            return HPoly::zero(0);
        }
        HPoly {
            coeffs: (1..self.coeffs.len())
                .map(|i| self.coeffs[i] * i as f64)
                .collect(),
        }
    }

    /// Partial derivative in `w`.
    pub fn d_dw(&self) -> HPoly {
        let d = self.degree();
        if d == 0 {
            return HPoly::zero(0);
        }
        HPoly {
            coeffs: (0..d).map(|i| self.coeffs[i] * (d - i) as f64).collect(),
        }
    }

    /// Affine coefficients in the chart around `x` together with the local
    /// coordinate of `x`: the chart `u = z/w` when `|w| ≥ |z|`, otherwise
    /// `v = w/z`. Coefficients are in ascending powers of the local variable.
    pub fn local_chart(&self, x: &ProjPoint) -> (Vec<C64>, C64) {
        if x.w().norm() >= x.z().norm() {
            (self.coeffs.clone(), x.z() / x.w())
        } else {
            let mut rev = self.coeffs.clone();
            rev.reverse();
            (rev, x.w() / x.z())
        }
    }

    /// Order of vanishing at `x`: the index of the first Taylor coefficient in
    /// the local chart whose modulus exceeds `rel_tol` times the largest.
    pub fn vanishing_order(&self, x: &ProjPoint, rel_tol: f64) -> usize {
        let (coeffs, u0) = self.local_chart(x);
        let t = taylor_coefficients(&coeffs, u0);
        let scale = t.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return self.degree();
        }
        t.iter()
            .position(|c| c.norm() > rel_tol * scale)
            .unwrap_or(self.degree())
    }
}

/// Coefficients of `p(u0 + s)` in ascending powers of `s`, by repeated
/// synthetic division.
pub fn taylor_coefficients(coeffs: &[C64], u0: C64) -> Vec<C64> {
    let mut a = coeffs.to_vec();
    let n = a.len();
    for k in 0..n {
        for j in (k..n - 1).rev() {
            let next = a[j + 1];
            a[j] += u0 * next;
        }
    }
    a
}

/// `(P(p,q), Q(p,q))`: the coefficients of `F ∘ G` for `F = (P,Q)` of degree
/// `d` and `G = (p,q)` of degree `e`.
pub fn compose_pair(f: (&HPoly, &HPoly), g: (&HPoly, &HPoly)) -> Result<(HPoly, HPoly)> {
    if f.0.degree() != f.1.degree() || g.0.degree() != g.1.degree() {
        return Err(Error::DegreeMismatch(
            "pair components must share a degree".into(),
        ));
    }
    Ok((f.0.substitute(g.0, g.1), f.1.substitute(g.0, g.1)))
}

/// `H(p, q)`, the pullback of `H` by the map `(p:q)`.
pub fn pullback_poly(phi: (&HPoly, &HPoly), h: &HPoly) -> HPoly {
    h.substitute(phi.0, phi.1)
}

/// Sylvester resultant of homogeneous `P` (degree m) and `Q` (degree n).
/// Vanishes exactly when the pair shares a root on P¹, including a common
/// root at infinity (both leading coefficients zero).
pub fn resultant(p: &HPoly, q: &HPoly) -> C64 {
    let (m, n) = (p.degree(), q.degree());
    let size = m + n;
    if size == 0 {
        return ONE;
    }
    // Descending powers of z.
    let pd: Vec<C64> = p.coeffs.iter().rev().copied().collect();
    let qd: Vec<C64> = q.coeffs.iter().rev().copied().collect();
    let mut mat = vec![vec![ZERO; size]; size];
    for r in 0..n {
        for (j, c) in pd.iter().enumerate() {
            mat[r][r + j] = *c;
        }
    }
    for r in 0..m {
        for (j, c) in qd.iter().enumerate() {
            mat[n + r][r + j] = *c;
        }
    }
    determinant(mat)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(mut a: Vec<Vec<C64>>) -> C64 {
    let n = a.len();
    let mut det = ONE;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        if a[piv][col] == ZERO {
            return ZERO;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        let pivot = a[col][col];
        det *= pivot;
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor == ZERO {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
        }
    }
    det
}

/// `min_λ ‖A − λB‖ / ‖A‖` over the concatenated coefficient vectors, i.e. how
/// far `A` is from being a scalar multiple of `B`.
pub fn projective_residual(a: &[&HPoly], b: &[&HPoly]) -> f64 {
    assert_eq!(a.len(), b.len());
    let av: Vec<C64> = a.iter().flat_map(|p| p.coeffs.iter().copied()).collect();
    let bv: Vec<C64> = b.iter().flat_map(|p| p.coeffs.iter().copied()).collect();
    projective_residual_vec(&av, &bv)
}

pub(crate) fn projective_residual_vec(av: &[C64], bv: &[C64]) -> f64 {
    if av.len() != bv.len() {
        return f64::INFINITY;
    }
    let na: f64 = av.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nb2: f64 = bv.iter().map(|c| c.norm_sqr()).sum();
    if na == 0.0 {
        return if nb2 == 0.0 { 0.0 } else { 1.0 };
    }
    if nb2 == 0.0 {
        return 1.0;
    }
    let inner: C64 = bv.iter().zip(av).map(|(b, a)| b.conj() * a).sum();
    let lam = inner / nb2;
    let r: f64 = av
        .iter()
        .zip(bv)
        .map(|(a, b)| (a - lam * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    r / na
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real(coeffs: &[f64]) -> HPoly {
        HPoly::from_real(coeffs)
    }

    #[test]
    fn evaluate_examples() {
        // z²
        assert_eq!(real(&[0.0, 0.0, 1.0]).evaluate(c(2.0, 0.0), c(5.0, 0.0)), c(4.0, 0.0));
        // zw
        assert_eq!(real(&[0.0, 1.0, 0.0]).evaluate(c(1.0, 0.0), c(1.0, 0.0)), c(1.0, 0.0));
        // z³ + 2w³ at (1,2): 1 + 16
        assert_eq!(
            real(&[2.0, 0.0, 0.0, 1.0]).evaluate(c(1.0, 0.0), c(2.0, 0.0)),
            c(17.0, 0.0)
        );
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(HPoly::z().multiply(&HPoly::w()), real(&[0.0, 1.0, 0.0]));
        let zpw = real(&[1.0, 1.0]);
        assert_eq!(zpw.multiply(&zpw), real(&[1.0, 2.0, 1.0]));
        let a = real(&[-1.0, 0.0, 1.0]);
        let b = real(&[1.0, 0.0, 1.0]);
        assert_eq!(a.multiply(&b), real(&[-1.0, 0.0, 0.0, 0.0, 1.0]));
    }

    #[test]
    fn compose_examples() {
        let z2 = real(&[0.0, 0.0, 1.0]);
        let w2 = real(&[1.0, 0.0, 0.0]);
        let (p, q) = compose_pair((&z2, &w2), (&HPoly::z(), &HPoly::w())).unwrap();
        assert_eq!((p, q), (z2.clone(), w2.clone()));

        let gp = real(&[1.0, -2.0, 0.5]);
        let gq = real(&[0.0, 3.0, 1.0]);
        let (p, q) = compose_pair((&HPoly::z(), &HPoly::w()), (&gp, &gq)).unwrap();
        assert_eq!((p, q), (gp, gq));

        let zw = real(&[0.0, 1.0, 0.0]);
        let (p, q) = compose_pair((&z2, &w2), (&zw, &w2)).unwrap();
        assert_eq!(p, real(&[0.0, 0.0, 1.0, 0.0, 0.0]));
        assert_eq!(q, real(&[1.0, 0.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn resultant_examples() {
        for d in 1..5 {
            let zd = HPoly::monomial(d, d, ONE);
            let wd = HPoly::monomial(d, 0, ONE);
            let r = resultant(&zd, &wd);
            assert!((r.norm() - 1.0).abs() < 1e-14 && r.im == 0.0);
        }
        assert_eq!(resultant(&real(&[0.0, 1.0, 0.0]), &real(&[1.0, 0.0, 0.0])), ZERO);
        let r = resultant(&real(&[-1.0, 0.0, 1.0]), &real(&[1.0, 0.0, 1.0]));
        assert!((r - c(4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn resultant_detects_common_root_at_infinity() {
        // w(z - w) and w(z + w): common root at (1:0).
        let p = HPoly::w().multiply(&real(&[-1.0, 1.0]));
        let q = HPoly::w().multiply(&real(&[1.0, 1.0]));
        assert_eq!(resultant(&p, &q).norm(), 0.0);
    }

    #[test]
    fn pullback_examples() {
        let h = real(&[0.3, -1.0, 2.0]);
        assert_eq!(pullback_poly((&HPoly::z(), &HPoly::w()), &h), h);
        assert_eq!(pullback_poly((&HPoly::w(), &HPoly::z()), &HPoly::z()), HPoly::w());
        let z2 = real(&[0.0, 0.0, 1.0]);
        let w2 = real(&[1.0, 0.0, 0.0]);
        let zmw = real(&[-1.0, 1.0]);
        assert_eq!(pullback_poly((&z2, &w2), &zmw), real(&[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn derivatives_and_taylor() {
        // z²w + 3w³
        let p = real(&[3.0, 0.0, 1.0, 0.0]);
        assert_eq!(p.d_dz(), real(&[0.0, 2.0, 0.0]));
        assert_eq!(p.d_dw(), real(&[9.0, 0.0, 1.0]));
        // (u − 1)² at u0 = 1 → s²
        let t = taylor_coefficients(&[c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)], c(1.0, 0.0));
        assert_eq!(t, vec![ZERO, ZERO, ONE]);
        let cube = real(&[-1.0, 1.0]).pow(3, false).multiply(&HPoly::w());
        assert_eq!(cube.vanishing_order(&ProjPoint::finite(ONE), 1e-9), 3);
        assert_eq!(cube.vanishing_order(&ProjPoint::INFINITY, 1e-9), 1);
        assert_eq!(cube.vanishing_order(&ProjPoint::ZERO, 1e-9), 0);
    }

    #[test]
    fn serde_shape() {
        let p = real(&[1.0, 0.0, 2.0]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"degree":2,"coeffs":[[1.0,0.0],[0.0,0.0],[2.0,0.0]]}"#);
        let back: HPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<HPoly>(r#"{"degree":3,"coeffs":[[1.0,0.0]]}"#).is_err());
    }

    fn poly(deg: usize) -> impl Strategy<Value = HPoly> {
        proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), deg + 1)
            .prop_map(|v| HPoly::new(v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    proptest! {
        #[test]
        fn evaluation_is_homogeneous(p in poly(4), z in (-2.0..2.0f64, -2.0..2.0f64), w in (-2.0..2.0f64, -2.0..2.0f64), lam in (-2.0..2.0f64, -2.0..2.0f64)) {
            let (z, w, lam) = (c(z.0, z.1), c(w.0, w.1), c(lam.0, lam.1));
            let lhs = p.evaluate(lam * z, lam * w);
            let rhs = lam.powu(4) * p.evaluate(z, w);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn composition_associative(f in (poly(2), poly(2)), g in (poly(2), poly(2)), k in (poly(2), poly(2))) {
            let gk = compose_pair((&g.0, &g.1), (&k.0, &k.1)).unwrap();
            let lhs = compose_pair((&f.0, &f.1), (&gk.0, &gk.1)).unwrap();
            let fg = compose_pair((&f.0, &f.1), (&g.0, &g.1)).unwrap();
            let rhs = compose_pair((&fg.0, &fg.1), (&k.0, &k.1)).unwrap();
            let scale = lhs.0.l2_norm() + lhs.1.l2_norm();
            prop_assume!(scale > 1e-6);
            prop_assert!(projective_residual(&[&lhs.0, &lhs.1], &[&rhs.0, &rhs.1]) < 1e-9);
        }
    }
}
