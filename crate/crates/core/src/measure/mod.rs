//! Probability measures on P¹: atomic limit measures of degenerate maps,
//! empirical measures from inverse iteration, and a weak-topology distance.

mod boundary;
mod distance;
mod sample;

pub use boundary::{
    boundary_measure, boundary_measure_with_budget, point_mass, preimages, pullback,
    support_report, HoleStatus, PointMass, SupportBranch, SupportReport,
};
pub use distance::{design_points, mass_in_disk, weak_distance, DESIGN_VERSION};
pub use sample::{backward_tree, sample_max_entropy, SamplerConfig};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::projline::{chordal_distance, ProjPoint};
use crate::ratmap::BoundaryMap;

/// Anything that can be integrated against a function on P¹.
pub trait Measure {
    fn weighted_points(&self) -> Box<dyn Iterator<Item = (ProjPoint, f64)> + '_>;

    fn integrate(&self, f: &dyn Fn(&ProjPoint) -> f64) -> f64 {
        self.weighted_points().map(|(p, m)| m * f(&p)).sum()
    }

    fn total_mass(&self) -> f64 {
        self.weighted_points().map(|(_, m)| m).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: ProjPoint,
    pub mass: f64,
}

/// A finite atom list. The masses sum to at least `1 − tail_bound`; the
/// missing mass is what a truncated series did not reach.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicMeasure {
    pub atoms: Vec<Atom>,
    pub tail_bound: f64,
    /// Set for maps on the indeterminacy locus, where the formula is still
    /// evaluated but the measure map is not continuous.
    #[serde(default)]
    pub formal: bool,
}

impl AtomicMeasure {
    pub fn dirac(p: ProjPoint) -> Self {
        Self {
            atoms: vec![Atom { point: p, mass: 1.0 }],
            tail_bound: 0.0,
            formal: false,
        }
    }

    /// Equal weights on the given points (repetitions add up).
    pub fn uniform(points: &[ProjPoint], eps: f64) -> Self {
        let m = 1.0 / points.len() as f64;
        let atoms = points.iter().map(|&point| Atom { point, mass: m }).collect();
        Self {
            atoms: merge_atoms(atoms, eps),
            tail_bound: 0.0,
            formal: false,
        }
    }

    /// Total atom mass, summed with compensation: measures can hold 10⁵ atoms.
    pub fn mass(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.mass))
    }

    /// Mass of the atom within `eps` of `p`.
    pub fn mass_at(&self, p: &ProjPoint, eps: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| chordal_distance(&a.point, p) < eps)
            .map(|a| a.mass)
            .sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            atoms: self
                .atoms
                .iter()
                .map(|a| Atom {
                    point: a.point,
                    mass: a.mass * s,
                })
                .collect(),
            tail_bound: self.tail_bound * s,
            formal: self.formal,
        }
    }
}

impl Measure for AtomicMeasure {
    fn weighted_points(&self) -> Box<dyn Iterator<Item = (ProjPoint, f64)> + '_> {
        Box::new(self.atoms.iter().map(|a| (a.point, a.mass)))
    }

    fn total_mass(&self) -> f64 {
        self.mass()
    }
}

/// Neumaier summation.
pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

/// Uniformly weighted samples, with enough provenance to regenerate them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub samples: Vec<ProjPoint>,
    pub seed: u64,
    pub depth: usize,
    pub count: usize,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<BoundaryMap>,
}

impl Measure for EmpiricalMeasure {
    fn weighted_points(&self) -> Box<dyn Iterator<Item = (ProjPoint, f64)> + '_> {
        let w = 1.0 / self.samples.len() as f64;
        Box::new(self.samples.iter().map(move |&p| (p, w)))
    }

    fn total_mass(&self) -> f64 {
        if self.samples.is_empty() {
            0.0
        } else {
            1.0
        }
    }
}

/// Merge atoms closer than `eps` (chordal): masses add, the location becomes
/// the mass-weighted mean on the sphere. Uses a spatial hash on the sphere's
/// embedding in R³, where Euclidean distance is twice the chordal distance.
pub fn merge_atoms(atoms: Vec<Atom>, eps: f64) -> Vec<Atom> {
    if atoms.len() < 2 || eps <= 0.0 {
        return atoms;
    }
    let cell = 2.0 * eps;
    let key = |v: &[f64; 3]| -> [i64; 3] {
        [
            (v[0] / cell).floor() as i64,
            (v[1] / cell).floor() as i64,
            (v[2] / cell).floor() as i64,
        ]
    };
    struct Cluster {
        rep: ProjPoint,
        sum: [f64; 3],
        mass: f64,
    }
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut grid: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for a in atoms {
        let v = a.point.to_sphere();
        let k = key(&v);
        let mut found = None;
        'search: for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = grid.get(&[k[0] + dx, k[1] + dy, k[2] + dz]) {
                        for &i in ids {
                            if chordal_distance(&clusters[i].rep, &a.point) < eps {
                                found = Some(i);
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        match found {
            Some(i) => {
                let c = &mut clusters[i];
                for (s, x) in c.sum.iter_mut().zip(v) {
                    *s += a.mass * x;
                }
                c.mass += a.mass;
            }
            None => {
                grid.entry(k).or_default().push(clusters.len());
                clusters.push(Cluster {
                    rep: a.point,
                    sum: v.map(|x| a.mass * x),
                    mass: a.mass,
                });
            }
        }
    }
    clusters
        .into_iter()
        .map(|c| Atom {
            point: ProjPoint::from_sphere(c.sum).unwrap_or(c.rep),
            mass: c.mass,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    #[test]
    fn merge_adds_masses() {
        let p = ProjPoint::finite(C64::new(1.0, 0.0));
        let q = ProjPoint::finite(C64::new(1.0 + 1e-12, 0.0));
        let r = ProjPoint::INFINITY;
        let merged = merge_atoms(
            vec![
                Atom { point: p, mass: 0.25 },
                Atom { point: r, mass: 0.5 },
                Atom { point: q, mass: 0.25 },
            ],
            1e-9,
        );
        assert_eq!(merged.len(), 2);
        let m = AtomicMeasure {
            atoms: merged,
            tail_bound: 0.0,
            formal: false,
        };
        assert!((m.mass_at(&p, 1e-9) - 0.5).abs() < 1e-15);
        assert!((m.mass() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empirical_total_mass() {
        let e = EmpiricalMeasure {
            samples: vec![ProjPoint::ZERO; 4],
            seed: 0,
            depth: 0,
            count: 4,
            source: "test".into(),
            map: None,
        };
        assert!((Measure::total_mass(&e) - 1.0).abs() < 1e-15);
        assert!((e.integrate(&|_| 2.0) - 2.0).abs() < 1e-15);
    }
}
