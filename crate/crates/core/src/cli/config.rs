//! Experiment configuration: a JSON file merged with command-line flags.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::output::Format;
use super::Args;
use crate::error::{Error, Result};
use crate::families::{parse_complex, FamilyName, FamilySpec, Param};
use crate::hpoly::C64;
use crate::projline::ProjPoint;
use crate::ratmap::BoundaryMap;
use crate::tolerance::{Tolerances, EPS_HOLE, EPS_PT, TOL_GCD, TOL_INDETERMINATE};

pub const SEED_ENV: &str = "RATBOUND_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Decompose,
    Indeterminate,
    Iterate,
    Measure,
    Pointmass,
    Sample,
    Converge,
    Properness,
    Escape,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Indeterminate => "indeterminate",
            Command::Iterate => "iterate",
            Command::Measure => "measure",
            Command::Pointmass => "pointmass",
            Command::Sample => "sample",
            Command::Converge => "converge",
            Command::Properness => "properness",
            Command::Escape => "escape",
        }
    }

    fn needs_family(&self) -> bool {
        matches!(self, Command::Converge | Command::Properness)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<String>,
    pub values: Vec<Param>,
}

/// The on-disk form. Every field is optional; flags override file values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<BoundaryMap>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_pt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_indeterminate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub centers: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// Accepted shapes of `--input`: a full config, a bare map or a bare family.
#[derive(Deserialize)]
#[serde(untagged)]
enum InputFile {
    Config(ExperimentConfig),
    Map(BoundaryMap),
    Family(FamilySpec),
}

pub fn load(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    let parsed: InputFile = serde_json::from_str(&text).map_err(|e| {
        Error::Validation(format!(
            "{} is not a config, map or family spec: {e}",
            path.display()
        ))
    })?;
    Ok(match parsed {
        InputFile::Config(c) => c,
        InputFile::Map(m) => ExperimentConfig {
            map: Some(m),
            ..Default::default()
        },
        InputFile::Family(f) => ExperimentConfig {
            family: Some(f),
            ..Default::default()
        },
    })
}

pub fn parse_point(s: &str) -> Result<ProjPoint> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t == "∞" {
        Ok(ProjPoint::INFINITY)
    } else {
        Ok(ProjPoint::finite(parse_complex(t)?))
    }
}

fn parse_range(s: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || Error::Validation(format!("expected 'lo,hi', got '{s}'"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(bad());
    }
    Ok([lo, hi])
}

fn positive(name: &str, x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Validation(format!("{name} must be positive, got {x}")))
    }
}

/// A fully resolved configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub command: Command,
    pub map: Option<BoundaryMap>,
    pub family: Option<FamilySpec>,
    pub tolerances: Tolerances,
    pub tail: f64,
    pub seed: u64,
    pub depth: usize,
    pub count: usize,
    pub workers: usize,
    pub sweep_parameter: Option<String>,
    pub sweep_values: Vec<C64>,
    pub n: usize,
    pub point: Option<ProjPoint>,
    pub centers: Vec<ProjPoint>,
    pub radius: f64,
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub nx: usize,
    pub ny: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    /// The merged config, echoed into outputs.
    pub echo: ExperimentConfig,
}

impl Resolved {
    /// The map to work on, from `map` or by building the family member.
    pub fn the_map(&self) -> Result<BoundaryMap> {
        match (&self.map, &self.family) {
            (Some(m), _) => Ok(m.clone()),
            (None, Some(f)) => f.build(),
            (None, None) => Err(Error::Validation(format!(
                "{} needs a map (--input) or a family (--family)",
                self.command.name()
            ))),
        }
    }

    pub fn the_family(&self) -> Result<&FamilySpec> {
        self.family.as_ref().ok_or_else(|| {
            Error::Validation(format!("{} needs a family (--family or input file)", self.command.name()))
        })
    }
}

/// Merges `args` over the input file and checks the command's requirements.
pub fn resolve(args: &Args) -> Result<Resolved> {
    let mut cfg = match &args.input {
        Some(p) => load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = args.command {
        cfg.command = Some(c);
    }
    let command = cfg
        .command
        .ok_or_else(|| Error::Validation("no command given".into()))?;

    if let Some(name) = &args.family {
        let name: FamilyName = name.parse()?;
        match &mut cfg.family {
            Some(f) if f.name == name => {}
            _ => cfg.family = Some(FamilySpec::new(name)),
        }
    }
    if !args.param.is_empty() {
        let family = cfg
            .family
            .as_mut()
            .ok_or_else(|| Error::Validation("--param needs a family".into()))?;
        for kv in &args.param {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Validation(format!("--param expects k=v, got '{kv}'")))?;
            let k = k.trim();
            if k == "d" {
                let d: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Validation(format!("d must be a positive integer, got '{v}'")))?;
                family.d = Some(d);
            } else {
                family.params.insert(k.to_string(), v.parse()?);
            }
        }
    }
    if cfg.map.is_some() && cfg.family.is_some() {
        return Err(Error::Validation("give either a map or a family, not both".into()));
    }

    macro_rules! take {
        ($field:ident) => {
            if let Some(v) = args.$field.clone() {
                cfg.$field = Some(v);
            }
        };
    }
    take!(tol);
    take!(eps_pt);
    take!(tol_indeterminate);
    take!(tail);
    take!(seed);
    take!(depth);
    take!(count);
    take!(workers);
    take!(n);
    take!(point);
    take!(radius);
    take!(nx);
    take!(ny);
    take!(out);
    take!(format);
    if !args.center.is_empty() {
        cfg.centers = Some(args.center.clone());
    }
    if let Some(r) = &args.re {
        cfg.re = Some(parse_range(r)?);
    }
    if let Some(r) = &args.im {
        cfg.im = Some(parse_range(r)?);
    }
    if let Some(s) = &args.sweep {
        let values = s
            .split(',')
            .map(|v| parse_complex(v).map(Param::Scalar))
            .collect::<Result<Vec<_>>>()?;
        let parameter = cfg.sweep.take().and_then(|s| s.parameter);
        cfg.sweep = Some(Sweep { parameter, values });
    }
    if let Some(p) = &args.sweep_param {
        cfg.sweep.get_or_insert_with(Sweep::default).parameter = Some(p.clone());
    }
    if cfg.seed.is_none() {
        if let Ok(s) = std::env::var(SEED_ENV) {
            let seed = s
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("{SEED_ENV} must be an unsigned integer, got '{s}'")))?;
            cfg.seed = Some(seed);
        }
    }

    let tolerances = Tolerances {
        tol: positive("tol", cfg.tol.unwrap_or(TOL_GCD))?,
        eps_pt: positive("eps_pt", cfg.eps_pt.unwrap_or(EPS_PT))?,
        eps_hole: EPS_HOLE,
        tol_indeterminate: positive("tol_indeterminate", cfg.tol_indeterminate.unwrap_or(TOL_INDETERMINATE))?,
    };
    let point = cfg.point.as_deref().map(parse_point).transpose()?;
    let centers = cfg
        .centers
        .iter()
        .flatten()
        .map(|s| parse_point(s))
        .collect::<Result<Vec<_>>>()?;
    let (sweep_parameter, sweep_values) = match &cfg.sweep {
        Some(s) => (
            s.parameter.clone(),
            s.values.iter().map(Param::scalar).collect::<Result<Vec<_>>>()?,
        ),
        None => (None, Vec::new()),
    };

    let r = Resolved {
        command,
        map: cfg.map.clone(),
        family: cfg.family.clone(),
        tolerances,
        tail: positive("tail", cfg.tail.unwrap_or(1e-10))?,
        seed: cfg.seed.unwrap_or(0),
        depth: cfg.depth.unwrap_or(20),
        count: cfg.count.unwrap_or(10_000),
        workers: cfg.workers.unwrap_or(0),
        sweep_parameter,
        sweep_values,
        n: cfg.n.unwrap_or(2),
        point,
        centers,
        radius: positive("radius", cfg.radius.unwrap_or(0.1))?,
        re: cfg.re.unwrap_or([-2.0, 2.0]),
        im: cfg.im.unwrap_or([-2.0, 2.0]),
        nx: cfg.nx.unwrap_or(41),
        ny: cfg.ny.unwrap_or(41),
        out: cfg.out.clone(),
        format: cfg.format.unwrap_or(match command {
            Command::Converge | Command::Properness | Command::Escape => Format::Csv,
            _ => Format::Json,
        }),
        echo: cfg,
    };
    validate(&r)?;
    Ok(r)
}

fn validate(r: &Resolved) -> Result<()> {
    let fail = |msg: &str| Err(Error::Validation(format!("{}: {msg}", r.command.name())));
    if r.command.needs_family() {
        if r.family.is_none() {
            return fail("needs a family (--family)");
        }
        if r.sweep_values.is_empty() {
            return fail("needs sweep values (--sweep v1,v2,...)");
        }
    } else if r.map.is_none() && r.family.is_none() {
        return fail("needs a map (--input) or a family (--family)");
    }
    match r.command {
        Command::Pointmass if r.point.is_none() => fail("needs --point"),
        Command::Iterate | Command::Properness if r.n == 0 => fail("n must be at least 1"),
        Command::Sample | Command::Converge if r.count == 0 => fail("count must be positive"),
        Command::Escape if r.nx < 2 || r.ny < 2 => fail("grid needs nx, ny >= 2"),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("inf").unwrap(), ProjPoint::INFINITY);
        assert_eq!(parse_point("0").unwrap(), ProjPoint::ZERO);
        assert_eq!(parse_point("1+2i").unwrap().affine().unwrap(), C64::new(1.0, 2.0));
    }

    #[test]
    fn ranges_parse() {
        assert_eq!(parse_range("-1.5, 2").unwrap(), [-1.5, 2.0]);
        assert!(parse_range("2,1").is_err());
        assert!(parse_range("1").is_err());
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"command":"decompose","bogus":1}"#);
        assert!(err.is_err());
    }

    #[test]
    fn config_round_trips() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"command":"converge","family":{"name":"example1","d":2,"params":{"a":0.5,"t":0.1}},
                "sweep":{"values":[0.1,0.01]},"seed":3}"#,
        )
        .unwrap();
        assert_eq!(cfg.command, Some(Command::Converge));
        assert_eq!(cfg.sweep.as_ref().unwrap().values.len(), 2);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(back, cfg);
    }
}
