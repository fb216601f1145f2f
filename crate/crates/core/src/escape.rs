//! Escape-rate potentials `G_F(x) = lim d^{-n} log‖Fⁿ(x)‖` on `C² − 0` with
//! the sup-norm, and the cone-angle reading of atomic measures.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hpoly::C64;
use crate::measure::AtomicMeasure;
use crate::projline::ProjPoint;
use crate::ratmap::{decompose, BoundaryMap, Decomposition, Lift};
use crate::tolerance::{TOL_GCD, TOL_INDETERMINATE};

/// A potential value. `NegInfinity` marks points whose orbit lands on a hole
/// line; it never takes part in arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Potential {
    Finite(f64),
    NegInfinity,
}

impl Potential {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Potential::Finite(v) => Some(*v),
            Potential::NegInfinity => None,
        }
    }

    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, Potential::NegInfinity)
    }
}

impl std::fmt::Display for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Potential::Finite(v) => write!(f, "{v:.17e}"),
            Potential::NegInfinity => write!(f, "-inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeValue {
    pub value: Potential,
    pub n_used: usize,
    /// Magnitude of the last series increment.
    pub residual: f64,
}

/// `max(|z|, |w|)`.
pub fn sup_norm(z: C64, w: C64) -> f64 {
    z.norm().max(w.norm())
}

fn nonzero_point(x: (C64, C64)) -> Result<f64> {
    let n = sup_norm(x.0, x.1);
    if n > 0.0 && n.is_finite() {
        Ok(n)
    } else {
        Err(Error::Validation("escape rate needs a nonzero finite point".into()))
    }
}

/// `|value|` is below the rounding error of evaluating a polynomial with
/// coefficients `c` on the unit polydisc.
fn vanishes(value: f64, c: &[C64]) -> bool {
    value <= 8.0 * f64::EPSILON * c.iter().map(|c| c.norm()).sum::<f64>()
}

/// `G_F(x)` for the lift `F` of `f`.
///
/// Nondegenerate maps are iterated directly with renormalization:
/// `G_n = log‖x‖ + Σ_{k<n} d^{-(k+1)} log‖F(u_k)‖` with `u_k` the unit-norm
/// orbit. Degenerate maps `F = H·Φ` off the indeterminacy locus use the
/// series `Σ_k d^{-(k+1)} log|H(Φᵏx)| + d^{-n} log‖Φⁿx‖`. Iteration stops
/// when an increment falls below `tol` or after `n_max` steps.
pub fn escape_rate(f: &BoundaryMap, x: (C64, C64), n_max: usize, tol: f64) -> Result<EscapeValue> {
    nonzero_point(x)?;
    let dec = decompose(f, TOL_GCD)?;
    if dec.is_degenerate() {
        escape_rate_series(&dec, x, n_max, tol).map(|s| s.escape)
    } else {
        escape_rate_direct(f.lift(), x, n_max, tol)
    }
}

/// Renormalized iteration of the lift itself, with no decomposition.
pub fn escape_rate_direct(lift: &Lift, x: (C64, C64), n_max: usize, tol: f64) -> Result<EscapeValue> {
    let norm = nonzero_point(x)?;
    let d = lift.degree() as f64;
    let coeffs: Vec<C64> = lift.p.coeffs().iter().chain(lift.q.coeffs()).copied().collect();
    let mut g = norm.ln();
    let mut u = (x.0 / norm, x.1 / norm);
    let mut scale = 1.0 / d;
    let mut residual = f64::INFINITY;
    let mut n_used = 0;
    for _ in 0..n_max {
        let (a, b) = lift.apply(u.0, u.1);
        let m = sup_norm(a, b);
        n_used += 1;
        if vanishes(m, &coeffs) {
            return Ok(EscapeValue {
                value: Potential::NegInfinity,
                n_used,
                residual: 0.0,
            });
        }
        let inc = scale * m.ln();
        g += inc;
        residual = inc.abs();
        u = (a / m, b / m);
        scale /= d;
        if residual < tol {
            break;
        }
    }
    Ok(EscapeValue {
        value: Potential::Finite(g),
        n_used,
        residual,
    })
}

/// The degenerate series split into its two parts:
/// `G_n = g_n + d^{-n} log‖Φⁿ(x)‖` with `g_n` the H-term partial sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerms {
    pub escape: EscapeValue,
    /// `g_n = Σ_{k<n} d^{-(k+1)} log|H(Φᵏx)|`.
    pub h_sum: Potential,
    /// `d^{-n} log‖Φⁿ(x)‖`.
    pub phi_term: f64,
}

pub fn escape_rate_series(dec: &Decomposition, x: (C64, C64), n_max: usize, tol: f64) -> Result<SeriesTerms> {
    if dec.is_indeterminate(TOL_INDETERMINATE) {
        return Err(Error::Indeterminate);
    }
    let norm = nonzero_point(x)?;
    let d = dec.d as f64;
    let hdeg = dec.h.degree() as f64;
    let hc = dec.h.coeffs();
    // Φᵏ(x) = exp(s)·u with ‖u‖ = 1.
    let mut s = norm.ln();
    let mut u = (x.0 / norm, x.1 / norm);
    let mut h_sum = 0.0;
    let mut scale = 1.0 / d;
    let mut residual = f64::INFINITY;
    let mut n_used = 0;
    let neg_inf = |n_used| SeriesTerms {
        escape: EscapeValue {
            value: Potential::NegInfinity,
            n_used,
            residual: 0.0,
        },
        h_sum: Potential::NegInfinity,
        phi_term: 0.0,
    };
    for _ in 0..n_max {
        let hv = dec.h.evaluate(u.0, u.1).norm();
        n_used += 1;
        if vanishes(hv, hc) {
            return Ok(neg_inf(n_used));
        }
        let inc = scale * (hdeg * s + hv.ln());
        h_sum += inc;
        let (a, b) = dec.phi.apply(u.0, u.1);
        let m = sup_norm(a, b);
        s = dec.e as f64 * s + m.ln();
        u = (a / m, b / m);
        residual = inc.abs();
        scale /= d;
        if residual < tol {
            break;
        }
    }
    let phi_term = d * scale * s;
    Ok(SeriesTerms {
        escape: EscapeValue {
            value: Potential::Finite(h_sum + phi_term),
            n_used,
            residual,
        },
        h_sum: Potential::Finite(h_sum),
        phi_term,
    })
}

/// The closed form for constant `φ = (a:b)` with `F = (aH, bH)`:
///
/// ```text
/// G_F(x) = (1/d) log|H(x)| + 1/(d(d−1)) log|H(a, b)|
/// ```
///
/// The value does not depend on how the scalar is split between `H` and
/// `(a, b)`.
pub fn escape_rate_constant_case(dec: &Decomposition, x: (C64, C64)) -> Result<Potential> {
    if dec.e != 0 {
        return Err(Error::Validation("closed form needs constant phi".into()));
    }
    if dec.is_indeterminate(TOL_INDETERMINATE) {
        return Err(Error::Indeterminate);
    }
    if dec.d < 2 {
        return Err(Error::Validation("closed form needs degree at least 2".into()));
    }
    let norm = nonzero_point(x)?;
    let d = dec.d as f64;
    let hx = dec.h.evaluate(x.0 / norm, x.1 / norm).norm();
    if vanishes(hx, dec.h.coeffs()) {
        return Ok(Potential::NegInfinity);
    }
    let (a, b) = (dec.phi.p.coeff(0), dec.phi.q.coeff(0));
    let hab = dec.h.evaluate(a, b).norm();
    Ok(Potential::Finite(
        (hx.ln() + d * norm.ln()) / d + hab.ln() / (d * (d - 1.0)),
    ))
}

/// `|G_F(F(x)) − d·G_F(x)|`, zero for the exact potential.
pub fn functional_equation_residual(f: &BoundaryMap, x: (C64, C64), n_max: usize) -> Result<f64> {
    let lift = f.lift();
    let g = escape_rate_direct(lift, x, n_max, 0.0)?;
    let fx = lift.apply(x.0, x.1);
    let gf = escape_rate_direct(lift, fx, n_max, 0.0)?;
    match (g.value, gf.value) {
        (Potential::Finite(a), Potential::Finite(b)) => Ok((b - f.degree() as f64 * a).abs()),
        (Potential::NegInfinity, Potential::NegInfinity) => Ok(0.0),
        _ => Ok(f64::INFINITY),
    }
}

/// One row of the escape-rate grid: `G_F(z, 1)` at `z = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub re: f64,
    pub im: f64,
    pub value: Potential,
}

/// `G_F(z, 1)` on an `nx × ny` lattice over `[re0, re1] × [im0, im1]`, in
/// row-major order (imaginary part outer).
pub fn escape_grid(
    f: &BoundaryMap,
    re: (f64, f64),
    im: (f64, f64),
    nx: usize,
    ny: usize,
    n_max: usize,
    tol: f64,
) -> Result<Vec<GridPoint>> {
    if nx < 2 || ny < 2 {
        return Err(Error::Validation("grid needs at least 2 points per axis".into()));
    }
    let dec = decompose(f, TOL_GCD)?;
    let step = |lo: f64, hi: f64, n: usize, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    (0..nx * ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            let (x, y) = (step(re.0, re.1, nx, i), step(im.0, im.1, ny, j));
            let p = (C64::new(x, y), C64::new(1.0, 0.0));
            let v = if dec.is_degenerate() {
                escape_rate_series(&dec, p, n_max, tol)?.escape
            } else {
                escape_rate_direct(f.lift(), p, n_max, tol)?
            };
            Ok(GridPoint {
                re: x,
                im: y,
                value: v.value,
            })
        })
        .collect()
}

/// `sup{G_F(x) : ‖x‖ = 1}` estimated over `n` Fibonacci-lattice directions.
/// Subtracting it normalizes the potential to have supremum 0 on the unit
/// sphere.
pub fn normalization_constant(f: &BoundaryMap, n: usize, n_max: usize, tol: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Validation("need at least one direction".into()));
    }
    let dec = decompose(f, TOL_GCD)?;
    let golden = PI * (3.0 - 5f64.sqrt());
    let values: Vec<Option<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let h = 1.0 - (2 * i + 1) as f64 / n as f64;
            let r = (1.0 - h * h).sqrt();
            let t = i as f64 * golden;
            let p = ProjPoint::from_sphere([r * t.cos(), r * t.sin(), h])?;
            let x = (p.z(), p.w());
            let v = if dec.is_degenerate() {
                escape_rate_series(&dec, x, n_max, tol)?.escape
            } else {
                escape_rate_direct(f.lift(), x, n_max, tol)?
            };
            // Unit sup-norm representative: G(x/‖x‖) = G(x) − log‖x‖.
            Ok(v.value.finite().map(|g| g - sup_norm(x.0, x.1).ln()))
        })
        .collect::<Result<_>>()?;
    values
        .into_iter()
        .flatten()
        .reduce(f64::max)
        .ok_or_else(|| Error::Numerical("potential is -inf in every sampled direction".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeAngle {
    pub point: ProjPoint,
    pub mass: f64,
    /// `2π − 4π·mass`.
    pub angle: f64,
    /// `mass ≥ 1/2`: the point sits at infinite distance.
    pub infinite_end: bool,
}

/// Cone angle `2π − 4π·m` at every atom of mass `m`.
pub fn cone_angle_report(mu: &AtomicMeasure) -> Result<Vec<ConeAngle>> {
    const SLACK: f64 = 1e-12;
    let rows: Vec<ConeAngle> = mu
        .atoms
        .iter()
        .map(|a| {
            if !(a.mass >= 0.0) || a.mass > 1.0 + SLACK {
                return Err(Error::Validation(format!("atom mass {} outside [0, 1]", a.mass)));
            }
            Ok(ConeAngle {
                point: a.point,
                mass: a.mass,
                angle: 2.0 * PI - 4.0 * PI * a.mass,
                infinite_end: a.mass >= 0.5,
            })
        })
        .collect::<Result<_>>()?;
    let ends = rows.iter().filter(|r| r.infinite_end).count();
    if ends > 2 {
        return Err(Error::Data(format!(
            "{ends} infinite ends; a probability measure allows at most two"
        )));
    }
    Ok(rows)
}
