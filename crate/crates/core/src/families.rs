//! Parametric families of maps and their degenerate limits.
//!
//! Polynomials are written in affine notation in the docs, so `P(z)` means
//! `P(z, 1)`. Unless given explicitly, the auxiliary polynomial `P` of
//! Examples 1 and 2 is `∏ (z − r w)` with roots `r = 1, 2, …`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hpoly::{HPoly, C64, roots, RootList};
use crate::projline::ProjPoint;
use crate::ratmap::{BoundaryMap, Lift};

const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

fn z_pow(n: usize) -> HPoly {
    HPoly::monomial(n, n, ONE)
}

fn w_pow(n: usize) -> HPoly {
    HPoly::monomial(n, 0, ONE)
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Validation(msg.into()))
    }
}

/// `∏ (z − r w)`, checked to be nonzero at `0` and `∞`.
pub fn aux_poly(roots: &[C64]) -> Result<HPoly> {
    require(roots.iter().all(|r| r.norm() > 0.0), "P must not vanish at 0")?;
    require(roots.iter().all(|r| r.re.is_finite() && r.im.is_finite()), "roots must be finite")?;
    Ok(HPoly::from_affine_roots(roots))
}

pub fn default_roots(n: usize) -> Vec<C64> {
    (1..=n).map(|i| C64::new(i as f64, 0.0)).collect()
}

fn check_aux(p: &HPoly, expected: usize) -> Result<()> {
    if p.degree() != expected {
        return Err(Error::DegreeMismatch(format!(
            "P has degree {}, expected {expected}",
            p.degree()
        )));
    }
    require(p.coeff(0).norm() > 0.0, "P(0, 1) must be nonzero")?;
    require((p.coeff(expected) - ONE).norm() < 1e-12, "P must be monic in z")
}

/// Example 1: `g_{a,t} = (a t z^d + w P : t z^d)` with `deg P = d − 1`.
pub fn make_example1(d: usize, p: &HPoly, a: C64, t: C64) -> Result<BoundaryMap> {
    require(d >= 2, "example 1 needs d >= 2")?;
    check_aux(p, d - 1)?;
    require(t.norm() > 0.0, "t must be nonzero")?;
    let zd = z_pow(d);
    BoundaryMap::new(zd.scale(a * t).add(&HPoly::w().multiply(p))?, zd.scale(t))
}

/// The `t → 0` limit `(w P : 0)`.
pub fn example1_limit(d: usize, p: &HPoly) -> Result<BoundaryMap> {
    check_aux(p, d - 1)?;
    BoundaryMap::new(HPoly::w().multiply(p), HPoly::zero(d))
}

/// Limit of second iterates: `f_a = (w^{d−1}P^{d−1}(a w P + z^d) : w^d P^d)`.
pub fn example1_fa(d: usize, p: &HPoly, a: C64) -> Result<BoundaryMap> {
    check_aux(p, d - 1)?;
    let wp = HPoly::w().multiply(p);
    let h = wp.pow(d - 1, false);
    BoundaryMap::new(h.multiply(&wp.scale(a).add(&z_pow(d))?), h.multiply(&wp))
}

/// `φ_a = (a P + z^d) / P` as the lift `(a w P + z^d, w P)`.
pub fn example1_phi(d: usize, p: &HPoly, a: C64) -> Result<Lift> {
    check_aux(p, d - 1)?;
    let wp = HPoly::w().multiply(p);
    Lift::new(wp.scale(a).add(&z_pow(d))?, wp)
}

/// Example 2: `g_{a,t} = (a t^k z^d + w^k P : t z^{d−k+1} w^{k−1})` with
/// `deg P = d − k` and `k ≥ 2`.
pub fn make_example2(d: usize, k: usize, p: &HPoly, a: C64, t: C64) -> Result<BoundaryMap> {
    check_example2(d, k, p, a)?;
    require(t.norm() > 0.0, "t must be nonzero")?;
    let first = z_pow(d).scale(a * t.powu(k as u32)).add(&w_pow(k).multiply(p))?;
    let second = z_pow(d - k + 1).multiply(&w_pow(k - 1)).scale(t);
    BoundaryMap::new(first, second)
}

fn check_example2(d: usize, k: usize, p: &HPoly, a: C64) -> Result<()> {
    require(k >= 2 && k <= d, "example 2 needs 2 <= k <= d")?;
    check_aux(p, d - k)?;
    require(a.norm() > 0.0, "a must be nonzero")
}

/// Limit of second iterates:
/// `f_a = (w^{k(d−1)} P^{d−k} (a w^k P^k + z^{k(d−k+1)}) : w^{k(d−1)+1} P^{d−k+1} z^{(d−k+1)(k−1)})`.
pub fn example2_fa(d: usize, k: usize, p: &HPoly, a: C64) -> Result<BoundaryMap> {
    check_example2(d, k, p, a)?;
    let m = d - k + 1;
    let base = w_pow(k * (d - 1)).multiply(&p.pow(d - k, false));
    let first = base.multiply(&w_pow(k).multiply(&p.pow(k, false)).scale(a).add(&z_pow(k * m))?);
    let second = base.multiply(&HPoly::w()).multiply(p).multiply(&z_pow(m * (k - 1)));
    BoundaryMap::new(first, second)
}

/// `φ_a = (z^{k(d−k+1)} + a P^k) / (z^{(k−1)(d−k+1)} P)` as a lift.
pub fn example2_phi(d: usize, k: usize, p: &HPoly, a: C64) -> Result<Lift> {
    check_example2(d, k, p, a)?;
    let m = d - k + 1;
    let first = z_pow(k * m).add(&w_pow(k).multiply(&p.pow(k, false)).scale(a))?;
    let second = z_pow(m * (k - 1)).multiply(&HPoly::w()).multiply(p);
    Lift::new(first, second)
}

/// Companion family `h_{a,t} = (a t z^d + w^k P : t z^d)`.
pub fn example2_companion(d: usize, k: usize, p: &HPoly, a: C64, t: C64) -> Result<BoundaryMap> {
    require(k >= 2 && k <= d, "companion family needs 2 <= k <= d")?;
    check_aux(p, d - k)?;
    require(t.norm() > 0.0, "t must be nonzero")?;
    let zd = z_pow(d);
    BoundaryMap::new(zd.scale(a * t).add(&w_pow(k).multiply(p))?, zd.scale(t))
}

/// Its second-iterate limit `h_a = (a w^{kd} P^d : w^{kd} P^d)`, with
/// constant `φ ≡ a`.
pub fn example2_companion_limit(d: usize, k: usize, p: &HPoly, a: C64) -> Result<BoundaryMap> {
    require(k >= 2 && k <= d, "companion family needs 2 <= k <= d")?;
    check_aux(p, d - k)?;
    let h = w_pow(k * d).multiply(&p.pow(d, false));
    BoundaryMap::new(h.scale(a), h)
}

/// `F_T = (z w (z² + T z w + w²) : z² w²)`, a degree-4 boundary point.
pub fn make_epstein_ft(t: C64) -> Result<BoundaryMap> {
    let zw = HPoly::z().multiply(&HPoly::w());
    let quad = HPoly::new(vec![ONE, t, ONE]);
    BoundaryMap::new(zw.multiply(&quad), zw.multiply(&zw))
}

/// `p_ε(z) = ε z³ + z²` as `(ε z³ + z² w : w³)`.
pub fn make_cubic_eps(eps: C64) -> Result<BoundaryMap> {
    require(eps.norm() > 0.0, "eps must be nonzero")?;
    BoundaryMap::new(HPoly::new(vec![ZERO, ZERO, ONE, eps]), w_pow(3))
}

/// The `ε → 0` coefficient limit `(z² w : w³)`.
pub fn cubic_eps_limit() -> BoundaryMap {
    BoundaryMap::new(HPoly::new(vec![ZERO, ZERO, ONE, ZERO]), w_pow(3)).expect("nonzero")
}

/// `p_k = (P : w^d / k)` with `P = ∏ (z − r w)` over the given roots.
pub fn make_polylimit(roots: &[C64], k: f64) -> Result<BoundaryMap> {
    require(!roots.is_empty(), "polylimit needs at least one root")?;
    require(k > 0.0 && k.is_finite(), "k must be positive")?;
    let d = roots.len();
    BoundaryMap::new(HPoly::from_affine_roots(roots), w_pow(d).scale(C64::new(1.0 / k, 0.0)))
}

/// The `k → ∞` limit `(P : 0)`.
pub fn polylimit_limit(roots: &[C64]) -> Result<BoundaryMap> {
    require(!roots.is_empty(), "polylimit needs at least one root")?;
    BoundaryMap::new(HPoly::from_affine_roots(roots), HPoly::zero(roots.len()))
}

/// `f_k = (k w : z)`, i.e. `z ↦ k/z`. Its second iterate is the identity for
/// every `k`.
pub fn make_inversion(k: C64) -> Result<BoundaryMap> {
    require(k.norm() > 0.0, "k must be nonzero")?;
    BoundaryMap::new(HPoly::w().scale(k), HPoly::z())
}

/// The Jacobian determinant `P_z Q_w − P_w Q_z`, of degree `2d − 2`. Its
/// roots are the critical points.
pub fn jacobian(f: &BoundaryMap) -> HPoly {
    let (p, q) = (f.p(), f.q());
    p.d_dz()
        .multiply(&q.d_dw())
        .add(&p.d_dw().multiply(&q.d_dz()).scale(-ONE))
        .expect("equal degrees")
}

pub fn critical_points(f: &BoundaryMap, tol: f64) -> Result<RootList> {
    roots(&jacobian(f), tol)
}

/// Multiplier of `φ` at a fixed point `x`, computed in the affine chart that
/// contains `x`.
pub fn fixed_point_multiplier(phi: &Lift, x: &ProjPoint) -> Result<C64> {
    let (p, q) = (&phi.p, &phi.q);
    let (num, den) = if x.z().norm() <= x.w().norm() {
        // u = z/w, g(u) = P(u,1)/Q(u,1)
        let u = x.z() / x.w();
        let (pv, qv) = (p.evaluate(u, ONE), q.evaluate(u, ONE));
        (p.d_dz().evaluate(u, ONE) * qv - pv * q.d_dz().evaluate(u, ONE), qv * qv)
    } else {
        // v = w/z, g(v) = Q(1,v)/P(1,v)
        let v = x.w() / x.z();
        let (pv, qv) = (p.evaluate(ONE, v), q.evaluate(ONE, v));
        (q.d_dw().evaluate(ONE, v) * pv - qv * p.d_dw().evaluate(ONE, v), pv * pv)
    };
    if den.norm() == 0.0 {
        return Err(Error::Numerical(format!("{x} is not fixed in its chart")));
    }
    Ok(num / den)
}

/// A parameter value: a complex scalar or a list of them.
///
/// Text forms: `0.5`, `-2e-3`, `1+2i`, `0.3-0.1i`, `i`, and comma-separated
/// lists such as `1,-1,2`. In JSON a plain number is also accepted.
#[derive(Debug, Clone, PartialEq)]
pub enum Param {
    Scalar(C64),
    List(Vec<C64>),
}

impl Param {
    pub fn scalar(&self) -> Result<C64> {
        match self {
            Param::Scalar(c) => Ok(*c),
            Param::List(v) if v.len() == 1 => Ok(v[0]),
            Param::List(_) => Err(Error::Validation("expected a scalar, got a list".into())),
        }
    }

    pub fn list(&self) -> Vec<C64> {
        match self {
            Param::Scalar(c) => vec![*c],
            Param::List(v) => v.clone(),
        }
    }
}

pub fn parse_complex(s: &str) -> Result<C64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Validation(format!("cannot parse complex number '{s}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|x| C64::new(x, 0.0)).map_err(|_| bad());
    };
    // Split before the last sign that is not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

fn format_complex(c: &C64) -> String {
    if c.im == 0.0 {
        format!("{:e}", c.re)
    } else {
        format!("{:e}{:+e}i", c.re, c.im)
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.contains(',') {
            s.split(',').map(parse_complex).collect::<Result<_>>().map(Param::List)
        } else {
            parse_complex(s).map(Param::Scalar)
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Scalar(c) => f.write_str(&format_complex(c)),
            Param::List(v) => {
                let parts: Vec<String> = v.iter().map(format_complex).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Param::Scalar(c) if c.im == 0.0 => s.serialize_f64(c.re),
            _ => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Num(x) => Ok(Param::Scalar(C64::new(x, 0.0))),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyName {
    #[serde(rename = "example1")]
    Example1,
    #[serde(rename = "example2")]
    Example2,
    #[serde(rename = "example2_companion")]
    Example2Companion,
    #[serde(rename = "epstein_FT")]
    EpsteinFT,
    #[serde(rename = "cubic_eps")]
    CubicEps,
    #[serde(rename = "polylimit")]
    Polylimit,
    #[serde(rename = "inversion")]
    Inversion,
    #[serde(rename = "custom")]
    Custom,
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Validation(format!("unknown family '{s}'")))
    }
}

impl FamilyName {
    /// The parameter a degenerating sweep varies, with the direction of the
    /// limit.
    pub fn sweep_parameter(&self) -> Option<&'static str> {
        match self {
            FamilyName::Example1 | FamilyName::Example2 | FamilyName::Example2Companion => Some("t"),
            FamilyName::CubicEps => Some("eps"),
            FamilyName::Polylimit | FamilyName::Inversion => Some("k"),
            FamilyName::EpsteinFT | FamilyName::Custom => None,
        }
    }
}

/// Input schema for the command-line tool.
///
/// | name | parameters |
/// |---|---|
/// | `example1` | `d`, `a`, `t`, optional `roots` (d − 1 of them) |
/// | `example2`, `example2_companion` | `d`, `k`, `a`, `t`, optional `roots` (d − k) |
/// | `epstein_FT` | `T` |
/// | `cubic_eps` | `eps` |
/// | `polylimit` | `roots`, `k` |
/// | `inversion` | `k` |
/// | `custom` | `P`, `Q` coefficient lists, `z^0 w^d` first |
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: FamilyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default)]
    pub params: BTreeMap<String, Param>,
}

impl FamilySpec {
    pub fn new(name: FamilyName) -> Self {
        Self {
            name,
            d: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_d(mut self, d: usize) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with(mut self, key: &str, value: Param) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_scalar(self, key: &str, value: C64) -> Self {
        self.with(key, Param::Scalar(value))
    }

    pub fn param(&self, key: &str) -> Result<&Param> {
        self.params
            .get(key)
            .ok_or_else(|| Error::Validation(format!("{:?} needs parameter '{key}'", self.name)))
    }

    fn scalar(&self, key: &str) -> Result<C64> {
        self.param(key)?.scalar()
    }

    fn real(&self, key: &str) -> Result<f64> {
        let c = self.scalar(key)?;
        require(c.im == 0.0, &format!("parameter '{key}' must be real"))?;
        Ok(c.re)
    }

    fn count(&self, key: &str) -> Result<usize> {
        let x = self.real(key)?;
        require(x >= 0.0 && x.fract() == 0.0, &format!("parameter '{key}' must be a non-negative integer"))?;
        Ok(x as usize)
    }

    fn degree(&self) -> Result<usize> {
        match self.d {
            Some(d) => Ok(d),
            None => self.count("d"),
        }
    }

    fn k(&self) -> Result<usize> {
        self.count("k")
    }

    /// `P` from the `roots` parameter, or the default roots `1, 2, …, n`.
    fn aux(&self, n: usize) -> Result<HPoly> {
        let roots = match self.params.get("roots") {
            Some(p) => p.list(),
            None => default_roots(n),
        };
        if roots.len() != n {
            return Err(Error::Validation(format!("expected {n} roots, got {}", roots.len())));
        }
        aux_poly(&roots)
    }

    /// The family member at the given parameters.
    pub fn build(&self) -> Result<BoundaryMap> {
        match self.name {
            FamilyName::Example1 => {
                let d = self.degree()?;
                require(d >= 2, "example 1 needs d >= 2")?;
                make_example1(d, &self.aux(d - 1)?, self.scalar("a")?, self.scalar("t")?)
            }
            FamilyName::Example2 => {
                let (d, k) = (self.degree()?, self.k()?);
                require(k >= 2 && k <= d, "example 2 needs 2 <= k <= d")?;
                make_example2(d, k, &self.aux(d - k)?, self.scalar("a")?, self.scalar("t")?)
            }
            FamilyName::Example2Companion => {
                let (d, k) = (self.degree()?, self.k()?);
                require(k >= 2 && k <= d, "companion family needs 2 <= k <= d")?;
                example2_companion(d, k, &self.aux(d - k)?, self.scalar("a")?, self.scalar("t")?)
            }
            FamilyName::EpsteinFT => make_epstein_ft(self.scalar("T")?),
            FamilyName::CubicEps => make_cubic_eps(self.scalar("eps")?),
            FamilyName::Polylimit => make_polylimit(&self.param("roots")?.list(), self.real("k")?),
            FamilyName::Inversion => make_inversion(self.scalar("k")?),
            FamilyName::Custom => {
                let p = HPoly::new(self.param("P")?.list());
                let q = HPoly::new(self.param("Q")?.list());
                BoundaryMap::new(p, q)
            }
        }
    }

    /// The map whose measure the family's maximal measures approach along the
    /// sweep: the second-iterate limit for Examples 1 and 2, the coefficient
    /// limit otherwise.
    pub fn target(&self) -> Result<BoundaryMap> {
        match self.name {
            FamilyName::Example1 => {
                let d = self.degree()?;
                require(d >= 2, "example 1 needs d >= 2")?;
                example1_fa(d, &self.aux(d - 1)?, self.scalar("a")?)
            }
            FamilyName::Example2 => {
                let (d, k) = (self.degree()?, self.k()?);
                require(k >= 2 && k <= d, "example 2 needs 2 <= k <= d")?;
                example2_fa(d, k, &self.aux(d - k)?, self.scalar("a")?)
            }
            FamilyName::Example2Companion => {
                let (d, k) = (self.degree()?, self.k()?);
                require(k >= 2 && k <= d, "companion family needs 2 <= k <= d")?;
                example2_companion_limit(d, k, &self.aux(d - k)?, self.scalar("a")?)
            }
            _ => self.limit(),
        }
    }

    /// The coefficient limit of the family along its sweep parameter.
    pub fn limit(&self) -> Result<BoundaryMap> {
        match self.name {
            FamilyName::Example1 => {
                let d = self.degree()?;
                require(d >= 2, "example 1 needs d >= 2")?;
                example1_limit(d, &self.aux(d - 1)?)
            }
            FamilyName::Example2 | FamilyName::Example2Companion => {
                let (d, k) = (self.degree()?, self.k()?);
                require(k >= 2 && k <= d, "example 2 needs 2 <= k <= d")?;
                let p = self.aux(d - k)?;
                BoundaryMap::new(w_pow(k).multiply(&p), HPoly::zero(d))
            }
            FamilyName::CubicEps => Ok(cubic_eps_limit()),
            FamilyName::Polylimit => polylimit_limit(&self.param("roots")?.list()),
            FamilyName::EpsteinFT | FamilyName::Custom => self.build(),
            FamilyName::Inversion => Err(Error::Validation(
                "the inversion family has no limit in its own degree".into(),
            )),
        }
    }
}
