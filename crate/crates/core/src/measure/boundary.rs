//! The atomic measure `μ_f` of a degenerate map and the operations built on
//! it.
//!
//! For `f = H·φ` with `e = deg φ ≥ 1`,
//!
//! ```text
//! μ_f = Σ_{n≥0} d^{-(n+1)} Σ_holes Σ_{φⁿ(z) = h} δ_z
//! ```
//!
//! with holes counted by depth and preimages by multiplicity. Level `n`
//! carries total mass `(1 − e/d)(e/d)ⁿ`, so truncating after `N` levels
//! leaves exactly `(e/d)^N` unaccounted for. When `φ` is constant the measure
//! is `(1/d) Σ depth·δ_h`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{merge_atoms, Atom, AtomicMeasure};
use crate::error::{Error, Result};
use crate::hpoly::{roots, RootList};
use crate::projline::{chordal_distance, ProjPoint};
use crate::ratmap::{Decomposition, HoleOrbit, Lift};
use crate::tolerance::{ATOM_BUDGET, EPS_HOLE, EPS_PT, TOL_FIBRE, TOL_INDETERMINATE};

/// Solutions of `φ(z) = a` with multiplicity: the roots of `β·p − α·q` for
/// `a = (α:β)`.
pub fn preimages(phi: &Lift, a: &ProjPoint) -> Result<RootList> {
    if phi.degree() == 0 {
        return Err(Error::Validation("preimages need a nonconstant map".into()));
    }
    let fibre = phi.p.scale(a.w()).add(&phi.q.scale(-a.z()))?;
    if fibre.max_norm() <= f64::EPSILON * phi.max_norm() {
        return Err(Error::Numerical(format!("fibre over {a} is degenerate")));
    }
    roots(&fibre, TOL_FIBRE)
}

/// `μ_f` truncated at the first level `N` with `(e/d)^N < tol`, or earlier if
/// a level would exceed [`ATOM_BUDGET`] atoms. `tail_bound` is `(e/d)^N` for
/// the level actually reached.
pub fn boundary_measure(dec: &Decomposition, tol: f64) -> Result<AtomicMeasure> {
    boundary_measure_with_budget(dec, tol, ATOM_BUDGET)
}

pub fn boundary_measure_with_budget(
    dec: &Decomposition,
    tol: f64,
    budget: usize,
) -> Result<AtomicMeasure> {
    if !dec.is_degenerate() {
        return Err(Error::Validation(
            "boundary measure needs a degenerate map".into(),
        ));
    }
    let d = dec.d as f64;
    if dec.e == 0 {
        let atoms = dec
            .holes
            .iter()
            .map(|h| Atom {
                point: h.point,
                mass: h.multiplicity as f64 / d,
            })
            .collect();
        return Ok(AtomicMeasure {
            atoms: merge_atoms(atoms, EPS_PT),
            tail_bound: 0.0,
            formal: dec.is_indeterminate(TOL_INDETERMINATE),
        });
    }
    let ratio = dec.e as f64 / d;
    // Weighted frontier: points of φ^{-n}(holes) with weight depth·multiplicity.
    let mut frontier: Vec<Atom> = dec
        .holes
        .iter()
        .map(|h| Atom {
            point: h.point,
            mass: h.multiplicity as f64,
        })
        .collect();
    let mut atoms = Vec::new();
    let mut level = 0usize;
    let tail = loop {
        let scale = d.powi(-(level as i32 + 1));
        atoms.extend(frontier.iter().map(|a| Atom {
            point: a.point,
            mass: a.mass * scale,
        }));
        level += 1;
        let tail = ratio.powi(level as i32);
        if tail < tol || frontier.len() * dec.e > budget {
            break tail;
        }
        let next: Vec<Vec<Atom>> = frontier
            .par_iter()
            .map(|a| {
                preimages(&dec.phi, &a.point).map(|pre| {
                    pre.iter()
                        .map(|r| Atom {
                            point: r.point,
                            mass: a.mass * r.multiplicity as f64,
                        })
                        .collect()
                })
            })
            .collect::<Result<_>>()?;
        frontier = merge_atoms(next.into_iter().flatten().collect(), EPS_PT);
    };
    Ok(AtomicMeasure {
        atoms: merge_atoms(atoms, EPS_PT),
        tail_bound: tail,
        formal: false,
    })
}

/// Point mass with its truncation bound and orbit diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub mass: f64,
    /// Bound on the part of the series not summed.
    pub error_bound: f64,
    /// Orbit steps taken.
    pub steps: usize,
}

/// `μ_f({a})` by following the forward orbit of `a`:
///
/// ```text
/// μ_f({a}) = (1/d) Σ_n m(φⁿ(a))·depth(φⁿ(a)) / dⁿ
/// ```
///
/// where `m` is the product of local degrees along the orbit. After step `n`
/// the remaining terms are at most `m_n·e/d^{n+1}`; summation stops once that
/// is below `tol`.
pub fn point_mass(dec: &Decomposition, a: &ProjPoint, tol: f64) -> Result<PointMass> {
    let d = dec.d as f64;
    if dec.e == 0 {
        return Ok(PointMass {
            mass: dec.depth_at(a, EPS_HOLE) as f64 / d,
            error_bound: 0.0,
            steps: 1,
        });
    }
    let e = dec.e as f64;
    let mut mass = 0.0;
    let mut scale = 1.0 / d;
    let mut bound = f64::INFINITY;
    let mut steps = 0;
    const MAX_STEPS: usize = 10_000;
    for step in HoleOrbit::new(dec, *a, EPS_HOLE).take(MAX_STEPS) {
        let step = step?;
        let m = step.multiplicity as f64;
        mass += m * step.depth as f64 * scale;
        bound = m * e * scale;
        steps += 1;
        scale /= d;
        if bound < tol {
            break;
        }
    }
    Ok(PointMass {
        mass,
        error_bound: bound,
        steps,
    })
}

/// `f^*μ`: preimages of every atom under `φ` (with multiplicity) plus a unit
/// atom per hole depth. With `normalize` the result is divided by `d`.
pub fn pullback(dec: &Decomposition, mu: &AtomicMeasure, normalize: bool) -> Result<AtomicMeasure> {
    if dec.is_indeterminate(TOL_INDETERMINATE) {
        return Err(Error::Indeterminate);
    }
    let mut atoms: Vec<Atom> = dec
        .holes
        .iter()
        .map(|h| Atom {
            point: h.point,
            mass: h.multiplicity as f64,
        })
        .collect();
    let mut tail = 0.0;
    if dec.e >= 1 {
        let pre: Vec<Vec<Atom>> = mu
            .atoms
            .par_iter()
            .map(|a| {
                preimages(&dec.phi, &a.point).map(|pre| {
                    pre.iter()
                        .map(|r| Atom {
                            point: r.point,
                            mass: a.mass * r.multiplicity as f64,
                        })
                        .collect()
                })
            })
            .collect::<Result<_>>()?;
        atoms.extend(pre.into_iter().flatten());
        tail = mu.tail_bound * dec.e as f64;
    }
    let out = AtomicMeasure {
        atoms: merge_atoms(atoms, EPS_PT),
        tail_bound: tail,
        formal: false,
    };
    Ok(if normalize {
        out.scaled(1.0 / dec.d as f64)
    } else {
        out
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportBranch {
    /// Some hole has an infinite backward orbit under φ: the support of μ_f is
    /// the Julia set of f.
    NonExceptionalHole,
    /// Every hole is exceptional for φ: the support lies in φ's exceptional
    /// set.
    AllHolesExceptional,
    /// φ is constant, its Julia set is empty and μ_f sits on the holes.
    ConstantPhi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoleStatus {
    pub hole: ProjPoint,
    pub depth: usize,
    pub exceptional: bool,
    /// Size of the backward orbit found before the search stopped.
    pub orbit_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub branch: SupportBranch,
    pub holes: Vec<HoleStatus>,
    pub claim: String,
    pub atoms: usize,
}

const SUPPORT_SEARCH_DEPTH: usize = 20;

/// Which support statement applies to `μ_f`. A hole counts as exceptional when
/// its backward orbit under φ closes up (no new points) within 20 steps,
/// holding at most two points when `e ≥ 2`.
pub fn support_report(dec: &Decomposition, mu: &AtomicMeasure) -> Result<SupportReport> {
    if dec.is_indeterminate(TOL_INDETERMINATE) {
        return Err(Error::Indeterminate);
    }
    if dec.e == 0 {
        return Ok(SupportReport {
            branch: SupportBranch::ConstantPhi,
            holes: dec
                .holes
                .iter()
                .map(|h| HoleStatus {
                    hole: h.point,
                    depth: h.multiplicity,
                    exceptional: false,
                    orbit_points: 1,
                })
                .collect(),
            claim: "J(phi) is empty; mu_f is carried by the holes".into(),
            atoms: mu.atoms.len(),
        });
    }
    let mut holes = Vec::new();
    for h in dec.holes.iter() {
        let (exceptional, orbit_points) = backward_orbit_closes(dec, &h.point)?;
        holes.push(HoleStatus {
            hole: h.point,
            depth: h.multiplicity,
            exceptional,
            orbit_points,
        });
    }
    let (branch, claim) = if holes.iter().any(|h| !h.exceptional) {
        (
            SupportBranch::NonExceptionalHole,
            "a hole is non-exceptional for phi: supp mu_f = J(f)".to_string(),
        )
    } else {
        (
            SupportBranch::AllHolesExceptional,
            "all holes exceptional for phi: supp mu_f lies in the exceptional set of phi"
                .to_string(),
        )
    };
    Ok(SupportReport {
        branch,
        holes,
        claim,
        atoms: mu.atoms.len(),
    })
}

fn backward_orbit_closes(dec: &Decomposition, h: &ProjPoint) -> Result<(bool, usize)> {
    let mut seen = vec![*h];
    let mut frontier = vec![*h];
    for _ in 0..SUPPORT_SEARCH_DEPTH {
        let mut fresh = Vec::new();
        for x in &frontier {
            for r in preimages(&dec.phi, x)?.iter() {
                let known = seen
                    .iter()
                    .chain(fresh.iter())
                    .any(|s| chordal_distance(s, &r.point) < EPS_HOLE);
                if !known {
                    fresh.push(r.point);
                }
            }
        }
        if fresh.is_empty() {
            return Ok((true, seen.len()));
        }
        seen.extend(fresh.iter().copied());
        if dec.e >= 2 && seen.len() > 2 {
            return Ok((false, seen.len()));
        }
        frontier = fresh;
    }
    Ok((false, seen.len()))
}
