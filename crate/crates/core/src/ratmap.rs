//! Points of the compactified space of degree-`d` rational maps.
//!
//! A [`BoundaryMap`] is a projective pair `(P:Q)` of degree-`d` homogeneous
//! polynomials, not necessarily coprime. Writing `P = H·p`, `Q = H·q` with
//! `H = gcd(P, Q)` gives the [`Decomposition`] `f = H·φ`: the roots of `H` are
//! the holes of `f` (with their multiplicities as depths) and `φ = (p:q)` is a
//! rational map of degree `e = d − deg H`.
//!
//! Iterates of a degenerate `f ∉ I(d)` are built from the product formula
//! `fⁿ = (∏_{k<n} (φ^k)^*H ^ d^{n−k−1}) · φⁿ` rather than by composing the pair
//! with itself, which would collapse numerically near the boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hpoly::{
    compose_pair, numeric_gcd_with_holes, projective_residual, resultant, HPoly, RootList, C64,
};
use crate::projline::{canonicalize, chordal_distance, ProjPoint};
use crate::tolerance::{EPS_HOLE, TOL_LOCAL_DEGREE};

/// A pair of homogeneous polynomials of a common degree taken literally (not
/// up to scale), e.g. a lift `F: C² → C²` of a map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lift {
    #[serde(rename = "P")]
    pub p: HPoly,
    #[serde(rename = "Q")]
    pub q: HPoly,
}

impl Lift {
    pub fn new(p: HPoly, q: HPoly) -> Result<Self> {
        if p.degree() != q.degree() {
            return Err(Error::DegreeMismatch(format!(
                "P has degree {}, Q has degree {}",
                p.degree(),
                q.degree()
            )));
        }
        Ok(Self { p, q })
    }

    pub fn degree(&self) -> usize {
        self.p.degree()
    }

    pub fn apply(&self, z: C64, w: C64) -> (C64, C64) {
        (self.p.evaluate(z, w), self.q.evaluate(z, w))
    }

    pub fn max_norm(&self) -> f64 {
        self.p.max_norm().max(self.q.max_norm())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            p: self.p.scale(s),
            q: self.q.scale(s),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Lift) -> Lift {
        let (p, q) = compose_pair((&self.p, &self.q), (&other.p, &other.q))
            .expect("lift components share a degree");
        Lift { p, q }
    }
}

/// A point of the compactified space: a nonzero pair `(P:Q)` of degree-`d`
/// polynomials up to scale, stored with largest coefficient modulus 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMap", into = "RawMap")]
pub struct BoundaryMap {
    lift: Lift,
}

#[derive(Serialize, Deserialize)]
struct RawMap {
    d: usize,
    #[serde(rename = "P")]
    p: HPoly,
    #[serde(rename = "Q")]
    q: HPoly,
}

impl TryFrom<RawMap> for BoundaryMap {
    type Error = Error;

    fn try_from(raw: RawMap) -> Result<Self> {
        if raw.p.degree() != raw.d {
            return Err(Error::Validation(format!(
                "declared degree {} but P has degree {}",
                raw.d,
                raw.p.degree()
            )));
        }
        BoundaryMap::new(raw.p, raw.q)
    }
}

impl From<BoundaryMap> for RawMap {
    fn from(f: BoundaryMap) -> Self {
        RawMap {
            d: f.degree(),
            p: f.lift.p,
            q: f.lift.q,
        }
    }
}

impl BoundaryMap {
    pub fn new(p: HPoly, q: HPoly) -> Result<Self> {
        let lift = Lift::new(p, q)?;
        let m = lift.max_norm();
        if m == 0.0 {
            return Err(Error::Validation("both polynomials are zero".into()));
        }
        if !m.is_finite() {
            return Err(Error::Validation("non-finite coefficients".into()));
        }
        Ok(Self {
            lift: lift.scale(C64::new(1.0 / m, 0.0)),
        })
    }

    pub fn from_lift(lift: Lift) -> Result<Self> {
        Self::new(lift.p, lift.q)
    }

    pub fn identity() -> Self {
        Self::new(HPoly::z(), HPoly::w()).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.lift.degree()
    }

    pub fn p(&self) -> &HPoly {
        &self.lift.p
    }

    pub fn q(&self) -> &HPoly {
        &self.lift.q
    }

    /// The normalized pair as a lift to C².
    pub fn lift(&self) -> &Lift {
        &self.lift
    }

    /// Evaluate at a point; `None` at a hole (both components vanish).
    pub fn apply(&self, x: &ProjPoint) -> Option<ProjPoint> {
        let (a, b) = self.lift.apply(x.z(), x.w());
        canonicalize(a, b).ok()
    }

    /// Sylvester resultant of the normalized pair.
    pub fn resultant(&self) -> C64 {
        resultant(self.p(), self.q())
    }

    /// Projective distance between two maps of the same degree.
    pub fn projective_residual(&self, other: &BoundaryMap) -> f64 {
        if self.degree() != other.degree() {
            return f64::INFINITY;
        }
        projective_residual(&[self.p(), self.q()], &[other.p(), other.q()])
    }
}

/// `f = H·φ` together with the hole bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    pub d: usize,
    pub e: usize,
    #[serde(rename = "H")]
    pub h: HPoly,
    pub phi: Lift,
    pub holes: RootList,
    pub constant_value: Option<ProjPoint>,
    pub gcd_residual: f64,
}

impl Decomposition {
    pub fn is_degenerate(&self) -> bool {
        !self.holes.is_empty()
    }

    /// Depth of `x` as a hole (0 if it is not one).
    pub fn depth_at(&self, x: &ProjPoint, eps: f64) -> usize {
        self.holes.multiplicity_at(x, eps)
    }

    /// `|H(c)|` for the constant value `c` in canonical form and `H` scaled
    /// to unit max coefficient; `None` when `φ` is not constant.
    pub fn constant_hole_value(&self) -> Option<f64> {
        let c = self.constant_value?;
        Some(self.h.normalized().evaluate_at(&c).norm())
    }

    /// Membership in the indeterminacy locus `I(d)` at threshold `tol`.
    pub fn is_indeterminate(&self, tol: f64) -> bool {
        self.constant_hole_value().is_some_and(|v| v < tol)
    }

    /// `φ(x)`, defined everywhere when `e ≥ 1`.
    pub fn phi_apply(&self, x: &ProjPoint) -> ProjPoint {
        let (a, b) = self.phi.apply(x.z(), x.w());
        canonicalize(a, b).unwrap_or(*x)
    }

    /// `|Res(p, q)|` of the normalized cofactors.
    pub fn phi_resultant(&self) -> f64 {
        let s = self.phi.max_norm();
        resultant(&self.phi.p.scale(C64::new(1.0 / s, 0.0)), &self.phi.q.scale(C64::new(1.0 / s, 0.0))).norm()
    }
}

/// Split `f = H·φ` by approximate gcd.
pub fn decompose(f: &BoundaryMap, tol: f64) -> Result<Decomposition> {
    let g = numeric_gcd_with_holes(f.p(), f.q(), tol)?;
    let e = g.p.degree();
    let constant_value = if e == 0 {
        Some(canonicalize(g.p.coeff(0), g.q.coeff(0))?)
    } else {
        None
    };
    Ok(Decomposition {
        d: f.degree(),
        e,
        h: g.h,
        phi: Lift { p: g.p, q: g.q },
        holes: g.shared,
        constant_value,
        gcd_residual: g.residual,
    })
}

/// Whether `f` lies in the indeterminacy locus: `φ` constant with its value a
/// hole, tested as `|H(c)| < tol_i`.
pub fn is_indeterminate(f: &BoundaryMap, tol: f64, tol_i: f64) -> Result<bool> {
    Ok(decompose(f, tol)?.is_indeterminate(tol_i))
}

/// The pieces of `fⁿ = H_n · φⁿ`.
#[derive(Debug, Clone)]
pub struct Iterate {
    pub map: BoundaryMap,
    pub h_n: HPoly,
    pub phi_n: Lift,
}

/// `fⁿ` by the product formula. Fails on the indeterminacy locus, detected as
/// a factor `(φ^k)^*H` that vanishes identically (relative to `tol_i`).
pub fn iterate_formula(f: &BoundaryMap, n: usize, tol: f64, tol_i: f64) -> Result<Iterate> {
    let dec = decompose(f, tol)?;
    iterate_decomposition(&dec, n, tol_i)
}

pub fn iterate_decomposition(dec: &Decomposition, n: usize, tol_i: f64) -> Result<Iterate> {
    if n == 0 {
        return Err(Error::Validation("iterate count must be at least 1".into()));
    }
    let d = dec.d;
    let h_scale = dec.h.max_norm();
    let mut phi_k = Lift {
        p: HPoly::z(),
        q: HPoly::w(),
    };
    let mut h_n = HPoly::constant(C64::new(1.0, 0.0));
    for k in 0..n {
        let factor = dec.h.substitute(&phi_k.p, &phi_k.q);
        let phi_norm = phi_k
            .p
            .coeffs()
            .iter()
            .chain(phi_k.q.coeffs())
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let rel = factor.max_norm() / (h_scale * phi_norm.powi(dec.h.degree() as i32));
        if !(rel >= tol_i) {
            return Err(Error::Indeterminate);
        }
        let exp = d.pow((n - k - 1) as u32);
        h_n = h_n.multiply(&factor.normalized().pow(exp, true)).normalized();
        phi_k = normalize_lift(dec.phi.compose(&phi_k));
    }
    let map = BoundaryMap::new(h_n.multiply(&phi_k.p), h_n.multiply(&phi_k.q))?;
    Ok(Iterate {
        map,
        h_n,
        phi_n: phi_k,
    })
}

fn normalize_lift(l: Lift) -> Lift {
    let m = l.max_norm();
    if m == 0.0 {
        l
    } else {
        l.scale(C64::new(1.0 / m, 0.0))
    }
}

/// `fⁿ` by plain composition `F ∘ Fⁿ⁻¹`, renormalized each step. Meant for
/// nondegenerate maps; a degenerate pair may collapse to zero.
pub fn iterate_direct(f: &BoundaryMap, n: usize) -> Result<BoundaryMap> {
    if n == 0 {
        return Err(Error::Validation("iterate count must be at least 1".into()));
    }
    let mut acc = f.lift().clone();
    for _ in 1..n {
        acc = f.lift().compose(&acc);
        if acc.max_norm() < 1e-12 {
            return Err(Error::CompositionVanished);
        }
        acc = normalize_lift(acc);
    }
    BoundaryMap::from_lift(acc)
}

/// Unnormalized `Fⁿ` of a lift. Its coefficients are homogeneous of degree
/// `(dⁿ − 1)/(d − 1)` in those of `F`.
pub fn iterate_lift(f: &Lift, n: usize) -> Lift {
    let mut acc = f.clone();
    for _ in 1..n {
        acc = f.compose(&acc);
    }
    acc
}

/// Local degree of `φ` at `x`: the order of vanishing of `β·p − α·q` at `x`
/// where `(α:β) = φ(x)`.
pub fn local_degree(phi: &Lift, x: &ProjPoint, rel_tol: f64) -> usize {
    let e = phi.degree();
    if e == 0 {
        return 1;
    }
    let (a, b) = phi.apply(x.z(), x.w());
    let Ok(img) = canonicalize(a, b) else {
        return 1;
    };
    let fibre = phi
        .p
        .scale(img.w())
        .add(&phi.q.scale(-img.z()))
        .expect("same degree");
    fibre.vanishing_order(x, rel_tol).clamp(1, e)
}

/// One step of a forward orbit under `φ`: the running multiplicity of the
/// start point as a solution of `φᵏ(z) = φᵏ(a)` and the hole depth at `φᵏ(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitStep {
    pub point: ProjPoint,
    pub multiplicity: u64,
    pub depth: usize,
}

/// Walks `a, φ(a), φ²(a), …`, snapping to a hole whenever the orbit comes
/// within `eps_hole` of one.
pub struct HoleOrbit<'a> {
    dec: &'a Decomposition,
    current: ProjPoint,
    multiplicity: u64,
    eps_hole: f64,
    step: usize,
}

impl<'a> HoleOrbit<'a> {
    pub fn new(dec: &'a Decomposition, start: ProjPoint, eps_hole: f64) -> Self {
        Self {
            dec,
            current: start,
            multiplicity: 1,
            eps_hole,
            step: 0,
        }
    }

    fn match_hole(&self, x: &ProjPoint) -> Result<Option<(ProjPoint, usize)>> {
        let mut hits = self
            .dec
            .holes
            .iter()
            .filter(|h| chordal_distance(&h.point, x) < self.eps_hole);
        match (hits.next(), hits.next()) {
            (None, _) => Ok(None),
            (Some(h), None) => Ok(Some((h.point, h.multiplicity))),
            (Some(_), Some(_)) => Err(Error::AmbiguousHoleMatch),
        }
    }
}

impl Iterator for HoleOrbit<'_> {
    type Item = Result<OrbitStep>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.step > 0 {
            if self.dec.e == 0 {
                // A constant φ: every later orbit point is the constant value,
                // which is not a hole off the indeterminacy locus.
                let c = self.dec.constant_value.expect("e = 0 has a constant value");
                self.step += 1;
                return Some(Ok(OrbitStep {
                    point: c,
                    multiplicity: self.multiplicity,
                    depth: 0,
                }));
            }
            let ld = local_degree(&self.dec.phi, &self.current, TOL_LOCAL_DEGREE) as u64;
            self.multiplicity = self.multiplicity.saturating_mul(ld);
            self.current = self.dec.phi_apply(&self.current);
        }
        self.step += 1;
        let matched = match self.match_hole(&self.current) {
            Ok(m) => m,
            Err(e) => return Some(Err(e)),
        };
        let depth = match matched {
            Some((p, depth)) => {
                self.current = p;
                depth
            }
            None => 0,
        };
        Some(Ok(OrbitStep {
            point: self.current,
            multiplicity: self.multiplicity,
            depth,
        }))
    }
}

/// One term `d_z(fⁿ)/dⁿ` of the hole-depth sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HoleDepth {
    pub n: usize,
    pub depth: u128,
    pub ratio: f64,
}

/// `d_z(fⁿ)/dⁿ` for `n = 1..=big_n`, accumulated along the forward orbit of
/// `z` instead of expanding the degree-`dⁿ` iterates.
pub fn hole_depth_sequence(
    dec: &Decomposition,
    z: &ProjPoint,
    big_n: usize,
    tol_i: f64,
) -> Result<Vec<HoleDepth>> {
    if dec.is_indeterminate(tol_i) {
        return Err(Error::Indeterminate);
    }
    let d = dec.d as u128;
    let mut out = Vec::with_capacity(big_n);
    let mut depth: u128 = 0;
    let mut dn: u128 = 1;
    for (k, step) in HoleOrbit::new(dec, *z, EPS_HOLE).take(big_n).enumerate() {
        let step = step?;
        // d_z(f^{n}) = d·d_z(f^{n−1}) + m_{n−1}·depth(φ^{n−1} z)
        depth = depth
            .checked_mul(d)
            .and_then(|v| v.checked_add(step.multiplicity as u128 * step.depth as u128))
            .ok_or_else(|| Error::Numerical("hole depth overflow".into()))?;
        dn = dn
            .checked_mul(d)
            .ok_or_else(|| Error::Numerical("degree overflow".into()))?;
        out.push(HoleDepth {
            n: k + 1,
            depth,
            ratio: depth as f64 / dn as f64,
        });
    }
    Ok(out)
}

/// Depth of `z` as a hole of the fully expanded `fⁿ`, read from the order of
/// vanishing of both components. Only sensible for small `dⁿ`.
pub fn hole_depth_expanded(
    f: &BoundaryMap,
    z: &ProjPoint,
    n: usize,
    tol: f64,
    tol_i: f64,
    rel_tol: f64,
) -> Result<usize> {
    let it = iterate_formula(f, n, tol, tol_i)?;
    Ok(it
        .map
        .p()
        .vanishing_order(z, rel_tol)
        .min(it.map.q().vanishing_order(z, rel_tol)))
}
