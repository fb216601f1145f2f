use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{Command, Resolved};
use super::output::{complex_cells, point_cells, point_columns, Cell, Report, Table};
use crate::error::{Error, Result};
use crate::escape::{cone_angle_report, escape_grid, Potential};
use crate::families::Param;
use crate::hpoly::C64;
use crate::measure::{
    boundary_measure, mass_in_disk, point_mass, sample_max_entropy, support_report, weak_distance,
    AtomicMeasure, SamplerConfig,
};
use crate::projline::ProjPoint;
use crate::ratmap::{decompose, hole_depth_sequence, iterate_decomposition, iterate_direct, Decomposition};

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

pub fn execute(cfg: &Resolved) -> Result<Report> {
    let (result, table, notes) = match cfg.command {
        Command::Decompose => decompose_cmd(cfg)?,
        Command::Indeterminate => indeterminate_cmd(cfg)?,
        Command::Iterate => iterate_cmd(cfg)?,
        Command::Measure => measure_cmd(cfg)?,
        Command::Pointmass => pointmass_cmd(cfg)?,
        Command::Sample => sample_cmd(cfg)?,
        Command::Converge => converge_cmd(cfg)?,
        Command::Properness => properness_cmd(cfg)?,
        Command::Escape => escape_cmd(cfg)?,
    };
    Ok(Report {
        command: cfg.command.name().to_string(),
        tolerances: cfg.tolerances,
        config: to_value(&cfg.echo),
        result,
        table,
        notes,
    })
}

type Output = (Value, Table, Vec<String>);

fn verdict(dec: &Decomposition, tol_i: f64) -> &'static str {
    if dec.is_indeterminate(tol_i) {
        "indeterminate"
    } else if dec.is_degenerate() {
        "degenerate"
    } else {
        "nondegenerate"
    }
}

fn holes_table(dec: &Decomposition) -> Table {
    let mut t = Table::new(point_columns("").into_iter().chain(["depth".to_string()]));
    for h in dec.holes.iter() {
        let mut row: Vec<Cell> = point_cells(&h.point).into();
        row.push(h.multiplicity.into());
        t.push(row);
    }
    t
}

fn decompose_cmd(cfg: &Resolved) -> Result<Output> {
    let f = cfg.the_map()?;
    let dec = decompose(&f, cfg.tolerances.tol)?;
    let v = verdict(&dec, cfg.tolerances.tol_indeterminate);
    let result = json!({
        "verdict": v,
        "d": dec.d,
        "e": dec.e,
        "holes": dec.holes.iter().map(|h| json!({"point": h.point, "display": h.point.to_string(), "depth": h.multiplicity})).collect::<Vec<_>>(),
        "constant_value": dec.constant_value,
        "constant_hole_value": dec.constant_hole_value(),
        "gcd_residual": dec.gcd_residual,
        "H": dec.h,
        "phi": dec.phi,
    });
    Ok((result, holes_table(&dec), vec![format!("verdict: {v}")]))
}

fn indeterminate_cmd(cfg: &Resolved) -> Result<Output> {
    let f = cfg.the_map()?;
    let dec = decompose(&f, cfg.tolerances.tol)?;
    let ind = dec.is_indeterminate(cfg.tolerances.tol_indeterminate);
    let h_at_c = dec.constant_hole_value();
    let result = json!({
        "indeterminate": ind,
        "d": dec.d,
        "e": dec.e,
        "constant_value": dec.constant_value,
        "constant_hole_value": h_at_c,
    });
    let mut t = Table::new(["indeterminate", "d", "e", "constant_hole_value"]);
    t.push(vec![
        ind.into(),
        dec.d.into(),
        dec.e.into(),
        h_at_c.map_or(Cell::Text(String::new()), Cell::Num),
    ]);
    Ok((result, t, vec![]))
}

fn iterate_cmd(cfg: &Resolved) -> Result<Output> {
    let f = cfg.the_map()?;
    let dec = decompose(&f, cfg.tolerances.tol)?;
    let it = iterate_decomposition(&dec, cfg.n, cfg.tolerances.tol_indeterminate)?;
    let mut t = Table::new(
        ["hole".to_string()]
            .into_iter()
            .chain(point_columns(""))
            .chain(["n", "depth", "ratio"].map(String::from)),
    );
    let mut tables = Vec::new();
    for (i, h) in dec.holes.iter().enumerate() {
        let seq = hole_depth_sequence(&dec, &h.point, cfg.n, cfg.tolerances.tol_indeterminate)?;
        for s in &seq {
            let mut row: Vec<Cell> = vec![i.into()];
            row.extend(point_cells(&h.point));
            row.extend([s.n.into(), s.depth.into(), s.ratio.into()]);
            t.push(row);
        }
        tables.push(json!({"hole": h.point, "display": h.point.to_string(), "sequence": seq}));
    }
    let result = json!({
        "n": cfg.n,
        "map": it.map,
        "H_n": it.h_n,
        "phi_n": it.phi_n,
        "hole_depths": tables,
    });
    Ok((result, t, vec![format!("iterate n={}", cfg.n)]))
}

fn measure_cmd(cfg: &Resolved) -> Result<Output> {
    let f = cfg.the_map()?;
    let dec = decompose(&f, cfg.tolerances.tol)?;
    let mu = boundary_measure(&dec, cfg.tail)?;
    let cones = cone_angle_report(&mu)?;
    let support = if mu.formal {
        None
    } else if dec.is_degenerate() {
        Some(support_report(&dec, &mu)?)
    } else {
        None
    };
    let mut t = Table::new(
        point_columns("")
            .into_iter()
            .chain(["mass", "cone_angle", "infinite_end"].map(String::from)),
    );
    for c in &cones {
        let mut row: Vec<Cell> = point_cells(&c.point).into();
        row.extend([c.mass.into(), c.angle.into(), c.infinite_end.into()]);
        t.push(row);
    }
    let mut notes = vec![
        format!("atoms: {}", mu.atoms.len()),
        format!("tail_bound: {}", super::output::fmt_f64(mu.tail_bound)),
    ];
    if mu.formal {
        notes.push("formal: map is in the indeterminacy locus; the measure map is not continuous here".into());
    }
    let result = json!({
        "measure": mu,
        "cone_angles": cones,
        "support": support,
    });
    Ok((result, t, notes))
}

fn pointmass_cmd(cfg: &Resolved) -> Result<Output> {
    let f = cfg.the_map()?;
    let dec = decompose(&f, cfg.tolerances.tol)?;
    let a = cfg.point.expect("validated");
    let pm = point_mass(&dec, &a, cfg.tail)?;
    let mut t = Table::new(
        point_columns("")
            .into_iter()
            .chain(["mass", "error_bound", "steps"].map(String::from)),
    );
    let mut row: Vec<Cell> = point_cells(&a).into();
    row.extend([pm.mass.into(), pm.error_bound.into(), pm.steps.into()]);
    t.push(row);
    Ok((json!({"point": a, "display": a.to_string(), "point_mass": pm}), t, vec![]))
}

fn sampler(cfg: &Resolved) -> SamplerConfig {
    SamplerConfig {
        depth: cfg.depth,
        count: cfg.count,
        seed: cfg.seed,
        workers: cfg.workers,
    }
}

/// Default start for inverse iteration: a point with no special role for
/// any of the built-in families.
fn start_point(cfg: &Resolved) -> ProjPoint {
    cfg.point.unwrap_or(ProjPoint::finite(C64::new(0.37, 0.21)))
}

fn sample_cmd(cfg: &Resolved) -> Result<Output> {
    let f = cfg.the_map()?;
    let e = sample_max_entropy(&f, &start_point(cfg), &sampler(cfg))?;
    let mut t = Table::new(point_columns(""));
    for p in &e.samples {
        t.push(point_cells(p).into());
    }
    let notes = vec![format!("source: {}", e.source), format!("seed: {}", e.seed)];
    Ok((to_value(&e), t, notes))
}

fn sweep_parameter(cfg: &Resolved) -> Result<String> {
    let family = cfg.the_family()?;
    cfg.sweep_parameter
        .clone()
        .or_else(|| family.name.sweep_parameter().map(String::from))
        .ok_or_else(|| Error::Validation(format!("{:?} has no default sweep parameter; pass --sweep-param", family.name)))
}

/// Whether each entry is at most the previous one.
fn nonincreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] <= w[0])
}

fn converge_cmd(cfg: &Resolved) -> Result<Output> {
    let family = cfg.the_family()?;
    let param = sweep_parameter(cfg)?;
    let target_map = family.target()?;
    let target_dec = decompose(&target_map, cfg.tolerances.tol)?;
    let target = if target_dec.is_indeterminate(cfg.tolerances.tol_indeterminate) {
        let p = cfg.point.ok_or_else(|| {
            Error::Validation("the target is in the indeterminacy locus; give the designated point with --point".into())
        })?;
        AtomicMeasure::dirac(p)
    } else {
        boundary_measure(&target_dec, cfg.tail)?
    };
    let centers: Vec<ProjPoint> = if cfg.centers.is_empty() {
        target_dec.holes.iter().map(|h| h.point).collect()
    } else {
        cfg.centers.clone()
    };
    let start = start_point(cfg);
    let sc = sampler(cfg);

    struct Row {
        value: C64,
        distance: Option<f64>,
        masses: Vec<f64>,
        status: String,
    }
    let rows: Vec<Row> = cfg
        .sweep_values
        .par_iter()
        .map(|&v| {
            let run = || -> Result<(f64, Vec<f64>)> {
                let g = family.clone().with(&param, Param::Scalar(v)).build()?;
                let e = sample_max_entropy(&g, &start, &sc)?;
                let dist = weak_distance(&e, &target)?;
                let masses = centers.iter().map(|c| mass_in_disk(&e, c, cfg.radius)).collect();
                Ok((dist, masses))
            };
            match run() {
                Ok((d, m)) => Row {
                    value: v,
                    distance: Some(d),
                    masses: m,
                    status: "ok".into(),
                },
                Err(e) => Row {
                    value: v,
                    distance: None,
                    masses: vec![f64::NAN; centers.len()],
                    status: format!("error(exit {}): {e}", e.exit_code()),
                },
            }
        })
        .collect();

    let mut t = Table::new(
        [format!("{param}_re"), format!("{param}_im"), "weak_distance".into()]
            .into_iter()
            .chain((0..centers.len()).map(|i| format!("mass_center{i}")))
            .chain(["status".to_string()]),
    );
    for r in &rows {
        let mut row: Vec<Cell> = complex_cells(r.value).into();
        row.push(r.distance.unwrap_or(f64::NAN).into());
        row.extend(r.masses.iter().map(|&m| Cell::Num(m)));
        row.push(r.status.clone().into());
        t.push(row);
    }
    let distances: Vec<f64> = rows.iter().filter_map(|r| r.distance).collect();
    let mono = nonincreasing(&distances);
    let improved = distances.len() >= 2 && distances[distances.len() - 1] < distances[0];
    let mut notes: Vec<String> = centers
        .iter()
        .enumerate()
        .map(|(i, c)| format!("center{i}: {c} (radius {})", cfg.radius))
        .collect();
    notes.push(format!("distances nonincreasing: {mono}"));
    notes.push(format!("last distance below first: {improved}"));
    let result = json!({
        "parameter": param,
        "centers": centers,
        "radius": cfg.radius,
        "target": {"atoms": target.atoms.len(), "tail_bound": target.tail_bound, "formal": target.formal},
        "rows": rows.iter().map(|r| json!({
            "value": r.value,
            "weak_distance": r.distance,
            "disk_masses": r.masses.iter().map(|m| if m.is_finite() { json!(m) } else { Value::Null }).collect::<Vec<_>>(),
            "status": r.status,
        })).collect::<Vec<_>>(),
        "summary": {"nonincreasing": mono, "last_below_first": improved},
    });
    Ok((result, t, notes))
}

fn properness_cmd(cfg: &Resolved) -> Result<Output> {
    let family = cfg.the_family()?;
    let param = sweep_parameter(cfg)?;
    let rows: Vec<(C64, Result<f64>)> = cfg
        .sweep_values
        .par_iter()
        .map(|&v| {
            let res = family
                .clone()
                .with(&param, Param::Scalar(v))
                .build()
                .and_then(|g| iterate_direct(&g, cfg.n))
                .map(|g| g.resultant().norm());
            (v, res)
        })
        .collect();
    let mut t = Table::new([format!("{param}_re"), format!("{param}_im"), "abs_resultant".into(), "status".into()]);
    for (v, r) in &rows {
        let mut row: Vec<Cell> = complex_cells(*v).into();
        match r {
            Ok(x) => row.extend([Cell::Num(*x), "ok".into()]),
            Err(e) => row.extend([Cell::Num(f64::NAN), format!("error(exit {}): {e}", e.exit_code()).into()]),
        }
        t.push(row);
    }
    let ok: Vec<f64> = rows.iter().filter_map(|(_, r)| r.as_ref().ok().copied()).collect();
    let notes = vec![format!("iterate n={}", cfg.n)];
    let result = json!({
        "parameter": param,
        "n": cfg.n,
        "rows": rows.iter().map(|(v, r)| json!({
            "value": v,
            "abs_resultant": r.as_ref().ok(),
            "status": r.as_ref().map_or_else(|e| e.to_string(), |_| "ok".into()),
        })).collect::<Vec<_>>(),
        "summary": {
            "first": ok.first(),
            "last": ok.last(),
            "nonincreasing": nonincreasing(&ok),
        },
    });
    Ok((result, t, notes))
}

fn escape_cmd(cfg: &Resolved) -> Result<Output> {
    let f = cfg.the_map()?;
    let n_max = if cfg.echo.n.is_some() { cfg.n } else { 60 };
    let grid = escape_grid(
        &f,
        (cfg.re[0], cfg.re[1]),
        (cfg.im[0], cfg.im[1]),
        cfg.nx,
        cfg.ny,
        n_max,
        1e-15,
    )?;
    let mut t = Table::new(["re", "im", "potential"]);
    for g in &grid {
        let v = match g.value {
            Potential::Finite(x) => Cell::Num(x),
            Potential::NegInfinity => Cell::Text("-inf".into()),
        };
        t.push(vec![g.re.into(), g.im.into(), v]);
    }
    let notes = vec![format!("grid {}x{}, n_max {n_max}, chart w = 1", cfg.nx, cfg.ny)];
    Ok((to_value(&grid), t, notes))
}
