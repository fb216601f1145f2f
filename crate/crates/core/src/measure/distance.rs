//! A weak-topology distance between probability measures on P¹.
//!
//! Test family, version 1: the 1-Lipschitz functions `x ↦ chordal(x, c_j)`
//! for 32 fixed centres `c_j`. The centres are `(1:0)`, `(0:1)` and 30
//! Fibonacci-lattice points on the sphere, with heights
//! `h_i = 1 − (2i + 1)/30` and longitudes `i·π(3 − √5)`, `i = 0..30`.

use super::Measure;
use crate::error::{Error, Result};
use crate::projline::{chordal_distance, ProjPoint};

pub const DESIGN_VERSION: u32 = 1;

const DESIGN_SIZE: usize = 32;

/// The 32 centres of the test family.
pub fn design_points() -> Vec<ProjPoint> {
    let mut pts = vec![ProjPoint::INFINITY, ProjPoint::ZERO];
    let n = DESIGN_SIZE - 2;
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    for i in 0..n {
        let h = 1.0 - (2 * i + 1) as f64 / n as f64;
        let r = (1.0 - h * h).sqrt();
        let theta = i as f64 * golden;
        let v = [r * theta.cos(), r * theta.sin(), h];
        pts.push(ProjPoint::from_sphere(v).expect("unit vector"));
    }
    pts
}

/// `max_j |∫ chordal(·, c_j) dμ − ∫ chordal(·, c_j) dν|` over the design.
///
/// Both total masses must lie in `[0.9, 1.1]`.
pub fn weak_distance(mu: &dyn Measure, nu: &dyn Measure) -> Result<f64> {
    for (name, m) in [("first", mu), ("second", nu)] {
        let mass = m.total_mass();
        if !(0.9..=1.1).contains(&mass) {
            return Err(Error::Validation(format!(
                "{name} measure has total mass {mass}, outside [0.9, 1.1]"
            )));
        }
    }
    let centres = design_points();
    let a = integrals(mu, &centres);
    let b = integrals(nu, &centres);
    Ok(a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

fn integrals(mu: &dyn Measure, centres: &[ProjPoint]) -> Vec<f64> {
    let mut acc = vec![0.0; centres.len()];
    for (p, m) in mu.weighted_points() {
        for (s, c) in acc.iter_mut().zip(centres) {
            *s += m * chordal_distance(&p, c);
        }
    }
    acc
}

/// Weight of the measure within chordal distance `radius` of `center`
/// (boundary included).
pub fn mass_in_disk(mu: &dyn Measure, center: &ProjPoint, radius: f64) -> f64 {
    mu.weighted_points()
        .filter(|(p, _)| chordal_distance(p, center) <= radius)
        .map(|(_, m)| m)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{AtomicMeasure, EmpiricalMeasure};
    use num_complex::Complex64 as C64;

    #[test]
    fn design_is_on_the_sphere_and_distinct() {
        let pts = design_points();
        assert_eq!(pts.len(), 32);
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                assert!(chordal_distance(p, q) > 0.1);
            }
        }
    }

    #[test]
    fn distance_examples() {
        let zero = AtomicMeasure::dirac(ProjPoint::ZERO);
        let inf = AtomicMeasure::dirac(ProjPoint::INFINITY);
        assert_eq!(weak_distance(&zero, &zero).unwrap(), 0.0);
        assert!((weak_distance(&zero, &inf).unwrap() - 1.0).abs() < 1e-15);
        assert!((weak_distance(&inf, &zero).unwrap() - 1.0).abs() < 1e-15);

        let light = AtomicMeasure {
            atoms: vec![],
            tail_bound: 1.0,
            formal: false,
        };
        assert!(matches!(weak_distance(&light, &zero), Err(Error::Validation(_))));
    }

    #[test]
    fn disk_masses() {
        let inf = AtomicMeasure::dirac(ProjPoint::INFINITY);
        assert_eq!(mass_in_disk(&inf, &ProjPoint::INFINITY, 0.1), 1.0);
        assert_eq!(mass_in_disk(&inf, &ProjPoint::ZERO, 0.5), 0.0);
        let e = EmpiricalMeasure {
            samples: vec![ProjPoint::finite(C64::new(1.0, 0.0)), ProjPoint::INFINITY],
            seed: 0,
            depth: 0,
            count: 2,
            source: "test".into(),
            map: None,
        };
        assert_eq!(mass_in_disk(&e, &ProjPoint::INFINITY, 0.1), 0.5);
    }
}
