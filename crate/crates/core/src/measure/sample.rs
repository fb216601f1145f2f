//! Inverse-iteration sampling of the measure of maximal entropy.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{merge_atoms, preimages, Atom, AtomicMeasure, EmpiricalMeasure};
use crate::error::{Error, Result};
use crate::projline::ProjPoint;
use crate::ratmap::{decompose, BoundaryMap};
use crate::tolerance::EPS_PT;

/// Gcd tolerance used to certify that a map handed to the sampler has no
/// holes. Much tighter than the default so nearly degenerate family members
/// still count as rational maps.
const NONDEGENERATE_TOL: f64 = 1e-12;

const EXCEPTIONAL_TREE_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub depth: usize,
    pub count: usize,
    pub seed: u64,
    /// Size of the thread pool; `0` uses rayon's global pool.
    pub workers: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            depth: 20,
            count: 10_000,
            seed: 0,
            workers: 0,
        }
    }
}

/// `count` independent backward orbits of length `depth` from `a`, each step
/// choosing a preimage with probability proportional to its multiplicity.
///
/// Sample `i` draws from ChaCha8 stream `i` of `seed`, so the output does not
/// depend on the number of workers.
pub fn sample_max_entropy(f: &BoundaryMap, a: &ProjPoint, cfg: &SamplerConfig) -> Result<EmpiricalMeasure> {
    if cfg.count == 0 {
        return Err(Error::Validation("sample count must be positive".into()));
    }
    let dec = decompose(f, NONDEGENERATE_TOL)?;
    if dec.is_degenerate() {
        return Err(Error::Validation(
            "sampling needs a nondegenerate map".into(),
        ));
    }
    let tree = backward_tree(f, a, EXCEPTIONAL_TREE_DEPTH)?;
    if tree.atoms.len() == 1 {
        return Err(Error::ExceptionalPoint);
    }
    let walk = |i: usize| -> Result<ProjPoint> {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let mut x = *a;
        for _ in 0..cfg.depth {
            let pre = preimages(f.lift(), &x)?;
            let mut pick = rng.gen_range(0..pre.total_multiplicity());
            for r in pre.iter() {
                if pick < r.multiplicity {
                    x = r.point;
                    break;
                }
                pick -= r.multiplicity;
            }
        }
        Ok(x)
    };
    let run = || (0..cfg.count).into_par_iter().map(walk).collect::<Result<Vec<_>>>();
    let samples = if cfg.workers == 0 {
        run()?
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build()
            .map_err(|e| Error::Validation(format!("thread pool: {e}")))?
            .install(run)?
    };
    Ok(EmpiricalMeasure {
        samples,
        seed: cfg.seed,
        depth: cfg.depth,
        count: cfg.count,
        source: format!("inverse iteration from {a}, ChaCha8 stream per sample"),
        map: Some(f.clone()),
    })
}

/// The exact measure `d^{-depth} Σ_{fⁿ(z) = a} δ_z` by full enumeration.
pub fn backward_tree(f: &BoundaryMap, a: &ProjPoint, depth: usize) -> Result<AtomicMeasure> {
    let d = f.degree() as f64;
    let mut level = vec![Atom {
        point: *a,
        mass: 1.0,
    }];
    for _ in 0..depth {
        let next: Vec<Vec<Atom>> = level
            .par_iter()
            .map(|x| {
                preimages(f.lift(), &x.point).map(|pre| {
                    pre.iter()
                        .map(|r| Atom {
                            point: r.point,
                            mass: x.mass * r.multiplicity as f64 / d,
                        })
                        .collect()
                })
            })
            .collect::<Result<_>>()?;
        level = merge_atoms(next.into_iter().flatten().collect(), EPS_PT);
    }
    Ok(AtomicMeasure {
        atoms: level,
        tail_bound: 0.0,
        formal: false,
    })
}
