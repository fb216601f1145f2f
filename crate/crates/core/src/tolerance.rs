//! Default tolerances, collected in one place so that every report can echo
//! the values it was produced with.

use serde::{Deserialize, Serialize};

/// Point equality radius (chordal).
pub const EPS_PT: f64 = 1e-9;

/// Smallest radius used when clustering numeric roots into multiple roots.
pub const EPS_CLUSTER_FLOOR: f64 = 1e-7;

/// Matching radius for forward orbits landing on holes. Orbits accumulate
/// round-off, so this is looser than [`EPS_PT`].
pub const EPS_HOLE: f64 = 1e-6;

/// Threshold on `|H(c)|` for membership in the indeterminacy locus.
pub const TOL_INDETERMINATE: f64 = 1e-8;

/// Relative threshold for a Taylor coefficient to count as vanishing when
/// computing local degrees.
pub const TOL_LOCAL_DEGREE: f64 = 1e-6;

/// Default gcd / decomposition tolerance.
pub const TOL_GCD: f64 = 1e-6;

/// Root tolerance for solving fibres `φ(z) = a` when sampling or building
/// measures. Leading coefficients below this (relative) are treated as zero.
pub const TOL_FIBRE: f64 = 1e-14;

/// Maximum number of atoms a single level of a boundary measure may hold.
pub const ATOM_BUDGET: usize = 1 << 17;

/// Residual floor for accepting a gcd reconstruction `P ≈ H·p`.
pub const GCD_RESIDUAL_FLOOR: f64 = 1e-9;

/// The full tolerance block, serialized into every CLI output header.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub eps_pt: f64,
    pub eps_hole: f64,
    pub tol_indeterminate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tol: TOL_GCD,
            eps_pt: EPS_PT,
            eps_hole: EPS_HOLE,
            tol_indeterminate: TOL_INDETERMINATE,
        }
    }
}
