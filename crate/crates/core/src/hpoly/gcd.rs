//! Approximate gcd of two homogeneous polynomials by matching root clusters.

use super::roots::{roots, RootEntry, RootList};
use super::{HPoly, C64};
use crate::error::{Error, Result};
use crate::projline::{chordal_distance, ProjPoint};
use crate::tolerance::{EPS_CLUSTER_FLOOR, GCD_RESIDUAL_FLOOR};

/// `P = H·p`, `Q = H·q` with `H` the product of the shared root factors.
#[derive(Debug, Clone, PartialEq)]
pub struct GcdResult {
    pub h: HPoly,
    pub p: HPoly,
    pub q: HPoly,
    /// Roots of `H` with multiplicity.
    pub shared: RootList,
    /// Largest relative reconstruction residual `‖P − H·p‖/‖P‖`.
    pub residual: f64,
}

/// Approximate `gcd(P, Q)` and cofactors.
///
/// `H` is the product of canonical linear factors `(w_r z − z_r w)` over root
/// clusters of `P` and `Q` that lie within `max(tol, 1e−7)` of each other,
/// each taken with the smaller of the two multiplicities. If one input is the
/// zero polynomial, `H` is the other one up to scale and its cofactor is a
/// nonzero constant while the other cofactor is `0`.
pub fn numeric_gcd(p: &HPoly, q: &HPoly, tol: f64) -> Result<(HPoly, HPoly, HPoly)> {
    let g = numeric_gcd_with_holes(p, q, tol)?;
    Ok((g.h, g.p, g.q))
}

pub fn numeric_gcd_with_holes(p: &HPoly, q: &HPoly, tol: f64) -> Result<GcdResult> {
    match (p.is_zero(), q.is_zero()) {
        (true, true) => Err(Error::GcdOfZeros),
        (false, true) => one_sided(p, tol, false),
        (true, false) => one_sided(q, tol, true),
        (false, false) => two_sided(p, q, tol),
    }
}

fn one_sided(nonzero: &HPoly, tol: f64, swapped: bool) -> Result<GcdResult> {
    let shared = roots(nonzero, tol)?;
    let h = shared.to_poly();
    let lam = best_scale(nonzero, &h);
    let cof = HPoly::constant(lam);
    let residual = relative_residual(nonzero, &h, &cof);
    check_residual(residual, tol)?;
    let zero = HPoly::zero(0);
    let (p, q) = if swapped { (zero, cof) } else { (cof, zero) };
    Ok(GcdResult {
        h,
        p,
        q,
        shared,
        residual,
    })
}

fn two_sided(p: &HPoly, q: &HPoly, tol: f64) -> Result<GcdResult> {
    let radius = tol.max(EPS_CLUSTER_FLOOR);
    let rp = roots(p, tol)?;
    let rq = roots(q, tol)?;
    let mut left_p: Vec<RootEntry> = rp.entries.clone();
    let mut left_q: Vec<RootEntry> = rq.entries.clone();
    let mut shared = Vec::new();
    for ep in left_p.iter_mut() {
        let best = left_q
            .iter()
            .enumerate()
            .filter(|(_, eq)| eq.multiplicity > 0)
            .map(|(j, eq)| (j, chordal_distance(&ep.point, &eq.point)))
            .filter(|(_, dist)| *dist < radius)
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((j, _)) = best {
            let eq = &mut left_q[j];
            let m = ep.multiplicity.min(eq.multiplicity);
            shared.push(RootEntry {
                point: midpoint(&ep.point, &eq.point),
                multiplicity: m,
            });
            ep.multiplicity -= m;
            eq.multiplicity -= m;
        }
    }
    let shared = RootList { entries: shared };
    let h = shared.to_poly();
    let cof = |rest: &[RootEntry], target: &HPoly| {
        let base = HPoly::from_roots(
            rest.iter()
                .filter(|e| e.multiplicity > 0)
                .map(|e| (&e.point, e.multiplicity)),
        );
        let lam = best_scale(target, &h.multiply(&base));
        base.scale(lam)
    };
    let pc = cof(&left_p, p);
    let qc = cof(&left_q, q);
    let residual = relative_residual(p, &h, &pc).max(relative_residual(q, &h, &qc));
    check_residual(residual, tol)?;
    Ok(GcdResult {
        h,
        p: pc,
        q: qc,
        shared,
        residual,
    })
}

fn midpoint(a: &ProjPoint, b: &ProjPoint) -> ProjPoint {
    let (x, y) = (a.to_sphere(), b.to_sphere());
    ProjPoint::from_sphere([x[0] + y[0], x[1] + y[1], x[2] + y[2]]).unwrap_or(*a)
}

/// `argmin_λ ‖target − λ·basis‖`.
fn best_scale(target: &HPoly, basis: &HPoly) -> C64 {
    let num: C64 = basis
        .coeffs()
        .iter()
        .zip(target.coeffs())
        .map(|(b, t)| b.conj() * t)
        .sum();
    let den: f64 = basis.coeffs().iter().map(|b| b.norm_sqr()).sum();
    num / den
}

fn relative_residual(target: &HPoly, h: &HPoly, cof: &HPoly) -> f64 {
    let prod = h.multiply(cof);
    let diff: f64 = target
        .coeffs()
        .iter()
        .zip(prod.coeffs())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    diff / target.l2_norm()
}

fn check_residual(residual: f64, tol: f64) -> Result<()> {
    let limit = tol.max(GCD_RESIDUAL_FLOOR);
    if residual.is_finite() && residual < limit {
        Ok(())
    } else {
        Err(Error::Numerical(format!(
            "gcd reconstruction residual {residual:.3e} exceeds {limit:.1e}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hpoly::{projective_residual, resultant};

    fn real(c: &[f64]) -> HPoly {
        HPoly::from_real(c)
    }

    fn assert_proj_eq(a: &HPoly, b: &HPoly, tol: f64) {
        let r = projective_residual(&[a], &[b]);
        assert!(r < tol, "{a:?} vs {b:?}: residual {r}");
    }

    #[test]
    fn monomial_gcd() {
        // z²w, zw²
        let (h, p, q) = numeric_gcd(&real(&[0.0, 0.0, 1.0, 0.0]), &real(&[0.0, 1.0, 0.0, 0.0]), 1e-9).unwrap();
        assert_proj_eq(&h, &real(&[0.0, 1.0, 0.0]), 1e-12);
        assert_proj_eq(&p, &HPoly::z(), 1e-12);
        assert_proj_eq(&q, &HPoly::w(), 1e-12);
    }

    #[test]
    fn coprime_gcd_is_constant() {
        let a = real(&[1.0, -3.0, 0.5, 2.0]);
        let b = real(&[-2.0, 0.0, 1.0, 1.0]);
        assert!(resultant(&a, &b).norm() > 1e-3);
        let g = numeric_gcd_with_holes(&a, &b, 1e-9).unwrap();
        assert_eq!(g.h.degree(), 0);
        assert!(g.shared.is_empty());
    }

    #[test]
    fn shared_linear_factor() {
        let zmw = real(&[-1.0, 1.0]);
        let zpw = real(&[1.0, 1.0]);
        let p = zmw.multiply(&zpw);
        let q = zmw.multiply(&HPoly::w());
        let (h, pc, qc) = numeric_gcd(&p, &q, 1e-9).unwrap();
        assert_proj_eq(&h, &zmw, 1e-12);
        assert_proj_eq(&pc, &zpw, 1e-12);
        assert_proj_eq(&qc, &HPoly::w(), 1e-12);
    }

    #[test]
    fn gcd_with_zero_polynomial() {
        // (3 z² w : 0) → H = z² w, cofactors (3, 0)
        let p = real(&[0.0, 0.0, 1.0, 0.0]).scale(C64::new(3.0, 0.0));
        let g = numeric_gcd_with_holes(&p, &HPoly::zero(3), 1e-9).unwrap();
        assert_eq!(g.h.degree(), 3);
        assert_eq!(g.p.degree(), 0);
        assert!(g.q.is_zero() && !g.p.is_zero());
        assert_proj_eq(&g.h.multiply(&g.p), &p, 1e-12);
        assert_eq!(g.shared.multiplicity_at(&ProjPoint::INFINITY, 1e-9), 1);
        assert_eq!(g.shared.multiplicity_at(&ProjPoint::ZERO, 1e-9), 2);
    }

    #[test]
    fn both_zero_rejected() {
        assert_eq!(
            numeric_gcd(&HPoly::zero(2), &HPoly::zero(2), 1e-9),
            Err(Error::GcdOfZeros)
        );
    }

    #[test]
    fn round_trip_reconstructs_inputs() {
        let common = HPoly::from_affine_roots(&[C64::new(0.5, 0.5), C64::new(-2.0, 0.0)]);
        let p = common.multiply(&real(&[1.0, 2.0, 3.0]));
        let qq = common
            .multiply(&real(&[0.0, -1.0, 1.0]))
            .scale(C64::new(0.0, 2.0));
        let g = numeric_gcd_with_holes(&p, &qq, 1e-9).unwrap();
        assert_eq!(g.shared.total_multiplicity(), 2);
        assert_proj_eq(&g.h.multiply(&g.p), &p, 1e-10);
        assert_proj_eq(&g.h.multiply(&g.q), &qq, 1e-10);
    }
}
