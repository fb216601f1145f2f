//! Measures of the built-in families against closed-form values.

use ratbound::escape::functional_equation_residual;
use ratbound::families::{
    aux_poly, cubic_eps_limit, default_roots, example1_fa, example2_companion_limit, make_cubic_eps,
    make_polylimit, polylimit_limit, FamilyName, FamilySpec, Param,
};
use ratbound::hpoly::{HPoly, C64};
use ratbound::measure::{
    boundary_measure, point_mass, pullback, sample_max_entropy, support_report, weak_distance, AtomicMeasure,
    Measure, SamplerConfig, SupportBranch,
};
use ratbound::projline::ProjPoint;
use ratbound::ratmap::{decompose, BoundaryMap};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn example1_point_masses_for_several_degrees() {
    // From d = 5 on the fourfold and fivefold roots of P and Q spread too
    // far in double precision to be clustered reliably.
    for d in 2..=4usize {
        // Multiple roots spread by roughly eps^(1/m), so the clustering
        // radius grows with d.
        let tol = if d <= 3 { 1e-4 } else { 2e-2 };
        let p = aux_poly(&default_roots(d - 1)).unwrap();
        let fa = example1_fa(d, &p, c(0.3, -0.4)).unwrap();
        let dec = decompose(&fa, tol).unwrap();
        let at_inf = point_mass(&dec, &ProjPoint::INFINITY, 1e-15).unwrap().mass;
        assert!((at_inf - 1.0 / (d + 1) as f64).abs() < 1e-9, "d={d}: {at_inf}");

        // a = 1 is a simple root of P, so φ_1(0) = 1 and 0 is charged through it.
        let f1 = example1_fa(d, &p, c(1.0, 0.0)).unwrap();
        let dec = decompose(&f1, tol).unwrap();
        let at_zero = point_mass(&dec, &ProjPoint::ZERO, 1e-15).unwrap().mass;
        assert!((at_zero - 1.0 / (d * (d + 1)) as f64).abs() < 1e-9, "d={d}: {at_zero}");
    }
}

#[test]
fn example1_measure_has_the_julia_set_as_support() {
    let p = aux_poly(&default_roots(1)).unwrap();
    let fa = example1_fa(2, &p, c(0.5, 0.0)).unwrap();
    let dec = decompose(&fa, 1e-9).unwrap();
    let mu = boundary_measure(&dec, 1e-6).unwrap();
    assert_eq!(support_report(&dec, &mu).unwrap().branch, SupportBranch::NonExceptionalHole);
}

#[test]
fn polynomial_lift_with_hole_at_infinity() {
    // f = (z²w − zw² : w³) lifts the polynomial z² − z; its only hole is ∞.
    let f = BoundaryMap::new(HPoly::from_real(&[0.0, -1.0, 1.0, 0.0]), HPoly::from_real(&[1.0, 0.0, 0.0, 0.0])).unwrap();
    let dec = decompose(&f, 1e-9).unwrap();
    let mu = boundary_measure(&dec, 1e-10).unwrap();
    assert!((mu.mass_at(&ProjPoint::INFINITY, 1e-9) + mu.tail_bound - 1.0).abs() < 1e-12);
    assert_eq!(support_report(&dec, &mu).unwrap().branch, SupportBranch::AllHolesExceptional);
}

#[test]
fn companion_limit_measure_does_not_depend_on_a() {
    let (d, k) = (4, 2);
    let p = aux_poly(&default_roots(d - k)).unwrap();
    let measure = |a: C64| {
        let h = example2_companion_limit(d, k, &p, a).unwrap();
        boundary_measure(&decompose(&h, 1e-3).unwrap(), 1e-12).unwrap()
    };
    let m1 = measure(c(0.5, 0.0));
    let m2 = measure(c(-3.0, 2.0));
    assert!(weak_distance(&m1, &m2).unwrap() < 1e-9);
    // The coefficient limit (w^k P : 0) has the same measure.
    let g = FamilySpec::new(FamilyName::Example2Companion)
        .with_d(d)
        .with("k", Param::Scalar(c(k as f64, 0.0)))
        .with("a", Param::Scalar(c(0.5, 0.0)))
        .with("t", Param::Scalar(c(0.1, 0.0)))
        .limit()
        .unwrap();
    let mg = boundary_measure(&decompose(&g, 1e-9).unwrap(), 1e-12).unwrap();
    assert!(weak_distance(&m1, &mg).unwrap() < 1e-9);
    assert!((mg.mass_at(&ProjPoint::INFINITY, 1e-9) - k as f64 / d as f64).abs() < 1e-12);
}

#[test]
fn polylimit_measure_is_uniform_on_roots() {
    let roots = [c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0)];
    let mu = boundary_measure(&decompose(&polylimit_limit(&roots).unwrap(), 1e-9).unwrap(), 1e-12).unwrap();
    for r in roots {
        assert!((mu.mass_at(&ProjPoint::finite(r), 1e-9) - 1.0 / 3.0).abs() < 1e-12);
    }
    assert!(make_polylimit(&roots, 1.0).unwrap().resultant().norm() > 1e-3);
}

#[test]
fn cubic_limit_measure_is_dirac_at_infinity() {
    let mu = boundary_measure(&decompose(&cubic_eps_limit(), 1e-9).unwrap(), 1e-12).unwrap();
    assert!((mu.mass_at(&ProjPoint::INFINITY, 1e-9) + mu.tail_bound - 1.0).abs() < 1e-12);
}

#[test]
fn cubic_eps_leaves_the_unit_circle() {
    let f = make_cubic_eps(c(1e-6, 0.0)).unwrap();
    let cfg = SamplerConfig {
        depth: 20,
        count: 10_000,
        seed: 11,
        workers: 0,
    };
    let e = sample_max_entropy(&f, &ProjPoint::finite(c(0.37, 0.21)), &cfg).unwrap();
    let on_circle = e
        .samples
        .iter()
        .filter(|p| p.affine().is_some_and(|z| (z.norm() - 1.0).abs() < 0.05))
        .count();
    assert!((on_circle as f64) < 0.05 * e.samples.len() as f64, "{on_circle}");
}

#[test]
fn pullback_iteration_converges_to_boundary_measure() {
    let p = aux_poly(&default_roots(1)).unwrap();
    let fa = example1_fa(2, &p, c(0.5, 0.0)).unwrap();
    let dec = decompose(&fa, 1e-9).unwrap();
    let target = boundary_measure(&dec, 1e-10).unwrap();
    let mut mu = AtomicMeasure::dirac(ProjPoint::finite(c(0.37, 0.21)));
    let mut last = f64::INFINITY;
    for _ in 0..8 {
        mu = pullback(&dec, &mu, true).unwrap();
        mu.atoms = ratbound::measure::merge_atoms(mu.atoms, 1e-9);
        let dist = weak_distance(&mu, &target).unwrap();
        assert!(dist <= last + 1e-12);
        last = dist;
    }
    assert!(last < 0.02, "{last}");
    assert!((mu.total_mass() - 1.0).abs() < 1e-12);
}

#[test]
fn empirical_resample_distance_is_small() {
    let sq = BoundaryMap::new(HPoly::from_real(&[0.0, 0.0, 1.0]), HPoly::from_real(&[1.0, 0.0, 0.0])).unwrap();
    let cfg = |seed| SamplerConfig {
        depth: 16,
        count: 10_000,
        seed,
        workers: 0,
    };
    let a = ProjPoint::finite(c(0.6, 0.8));
    let x = sample_max_entropy(&sq, &a, &cfg(1)).unwrap();
    let y = sample_max_entropy(&sq, &a, &cfg(2)).unwrap();
    assert!(weak_distance(&x, &y).unwrap() < 0.02);
}

#[test]
fn square_map_functional_equation_is_exact() {
    let sq = BoundaryMap::new(HPoly::from_real(&[0.0, 0.0, 1.0]), HPoly::from_real(&[1.0, 0.0, 0.0])).unwrap();
    for x in [(c(2.0, 0.0), c(1.0, 0.0)), (c(0.3, -0.2), c(0.1, 0.9)), (c(1.0, 1.0), c(1.0, -1.0))] {
        assert!(functional_equation_residual(&sq, x, 40).unwrap() < 1e-10);
    }
}
