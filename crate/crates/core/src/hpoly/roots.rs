//! Roots of homogeneous polynomials on P¹.
//!
//! Vanishing leading (trailing) coefficients become a root at `(1:0)`
//! (`(0:1)`) directly. What remains is a dehomogenized polynomial with nonzero
//! constant and leading terms, solved by Aberth–Ehrlich iteration started from
//! circles whose radii come from the Newton polygon of the coefficient moduli.
//! Numeric roots are then grouped by single-linkage clustering in the chordal
//! metric to recover multiplicities.

use serde::{Deserialize, Serialize};

use super::{HPoly, C64};
use crate::error::{Error, Result};
use crate::projline::{canonicalize, chordal_distance, ProjPoint};
use crate::tolerance::EPS_CLUSTER_FLOOR;

const MAX_ITER: usize = 2000;

/// Largest relative size of an end coefficient that is read as an exact zero.
const END_COEFF_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootEntry {
    pub point: ProjPoint,
    pub multiplicity: usize,
}

/// Roots with multiplicity; multiplicities sum to the polynomial's degree.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RootList {
    pub entries: Vec<RootEntry>,
}

impl RootList {
    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RootEntry> {
        self.entries.iter()
    }

    /// Multiplicity of the entry within `eps` of `p`, or 0.
    pub fn multiplicity_at(&self, p: &ProjPoint, eps: f64) -> usize {
        self.entries
            .iter()
            .filter(|e| chordal_distance(&e.point, p) < eps)
            .map(|e| e.multiplicity)
            .sum()
    }

    /// Polynomial `∏ (w_r z − z_r w)^mult`.
    pub fn to_poly(&self) -> HPoly {
        HPoly::from_roots(self.entries.iter().map(|e| (&e.point, e.multiplicity)))
    }
}

/// All roots of `p` on P¹ with multiplicity. Coefficients at either end with
/// modulus at most `min(tol, 1e−14) · max|c|` are treated as zero; numeric
/// roots within `max(tol, 1e−7)` (chordal, single linkage) are merged into one
/// entry. Large roots from small but nonzero end coefficients still merge
/// with `0` or `∞` through the clustering.
pub fn roots(p: &HPoly, tol: f64) -> Result<RootList> {
    let radius = tol.max(EPS_CLUSTER_FLOOR);
    let raw = raw_roots(p, tol)?;
    let mut list = cluster(&raw, radius);
    for e in list.entries.iter_mut().filter(|e| e.multiplicity > 1) {
        e.point = refine_multiple(p, &e.point, e.multiplicity, radius);
    }
    Ok(list)
}

/// A root of multiplicity `m` is a simple root of the `(m−1)`-th derivative,
/// where Newton's method recovers full precision.
fn refine_multiple(p: &HPoly, x: &ProjPoint, m: usize, radius: f64) -> ProjPoint {
    let d = p.degree();
    if m > d {
        return *x;
    }
    let flip = x.z().norm() > x.w().norm();
    let mut c: Vec<C64> = p.coeffs().to_vec();
    if flip {
        c.reverse();
    }
    // (m−1)-th derivative in u, ascending.
    let q: Vec<C64> = (m - 1..=d)
        .map(|i| c[i] * ((i + 2 - m)..=i).map(|k| k as f64).product::<f64>())
        .collect();
    let abs_q: Vec<f64> = q.iter().map(|c| c.norm()).collect();
    let start = if flip { x.w() / x.z() } else { x.z() / x.w() };
    let mut u = start;
    for _ in 0..8 {
        let (val, der, bound) = horner(q.iter().rev(), abs_q.iter().rev(), u);
        if val.norm() <= 2.0 * f64::EPSILON * bound || der.norm() == 0.0 {
            break;
        }
        u -= val / der;
    }
    let one = C64::new(1.0, 0.0);
    let refined = if flip { canonicalize(one, u) } else { canonicalize(u, one) };
    match refined {
        Ok(r) if chordal_distance(&r, x) < radius => r,
        _ => *x,
    }
}

/// Root points before clustering, each with multiplicity one, except for the
/// exact roots at `0` and `∞` read off vanishing end coefficients.
pub(crate) fn raw_roots(p: &HPoly, tol: f64) -> Result<Vec<RootEntry>> {
    let scale = p.max_norm();
    if scale == 0.0 {
        return Err(Error::RootsUndefined);
    }
    let c = p.coeffs();
    let small = |x: &C64| x.norm() <= tol.min(END_COEFF_FLOOR) * scale;
    let d = p.degree();
    let hi = (0..=d).rev().find(|&i| !small(&c[i])).unwrap();
    let lo = (0..=hi).find(|&i| !small(&c[i])).unwrap();
    let mut out = Vec::with_capacity(d);
    if d > hi {
        out.push(RootEntry {
            point: ProjPoint::INFINITY,
            multiplicity: d - hi,
        });
    }
    if lo > 0 {
        out.push(RootEntry {
            point: ProjPoint::ZERO,
            multiplicity: lo,
        });
    }
    for r in aberth_roots(&c[lo..=hi]) {
        let point = if r.norm() <= 1.0 {
            canonicalize(r, C64::new(1.0, 0.0))
        } else {
            canonicalize(C64::new(1.0, 0.0), C64::new(1.0, 0.0) / r)
        }
        .map_err(|_| Error::Numerical("root finder produced a non-finite root".into()))?;
        out.push(RootEntry {
            point,
            multiplicity: 1,
        });
    }
    Ok(out)
}

/// Single-linkage clustering at chordal radius `radius`. The cluster centre is
/// the multiplicity-weighted mean taken in the affine chart that contains the
/// cluster, which keeps the centre of a split multiple root accurate.
pub(crate) fn cluster(raw: &[RootEntry], radius: f64) -> RootList {
    let n = raw.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if chordal_distance(&raw[i].point, &raw[j].point) < radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, g)) => g.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let entries = groups
        .into_iter()
        .map(|(_, members)| {
            let multiplicity = members.iter().map(|&i| raw[i].multiplicity).sum();
            let point = if members.len() == 1 {
                raw[members[0]].point
            } else {
                chart_mean(members.iter().map(|&i| (&raw[i].point, raw[i].multiplicity)))
            };
            RootEntry {
                point,
                multiplicity,
            }
        })
        .collect();
    RootList { entries }
}

fn chart_mean<'a>(pts: impl Iterator<Item = (&'a ProjPoint, usize)> + Clone) -> ProjPoint {
    let (sz, sw) = pts
        .clone()
        .fold((0.0, 0.0), |(a, b), (p, _)| (a + p.z().norm(), b + p.w().norm()));
    let total: usize = pts.clone().map(|(_, m)| m).sum();
    let one = C64::new(1.0, 0.0);
    if sw >= sz {
        let mean: C64 = pts.map(|(p, m)| p.z() / p.w() * m as f64).sum::<C64>() / total as f64;
        canonicalize(mean, one).expect("finite mean")
    } else {
        let mean: C64 = pts.map(|(p, m)| p.w() / p.z() * m as f64).sum::<C64>() / total as f64;
        canonicalize(one, mean).expect("finite mean")
    }
}

/// Roots of `Σ coeffs[i] u^i` (ascending), assuming nonzero constant and
/// leading coefficients. Returns `coeffs.len() − 1` roots.
pub fn aberth_roots(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    match n {
        0 => return Vec::new(),
        1 => return vec![-coeffs[0] / coeffs[1]],
        _ => {}
    }
    let mut z = initial_guesses(coeffs);
    let mut done = vec![false; n];
    let abs_coeffs: Vec<f64> = coeffs.iter().map(|c| c.norm()).collect();
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for j in 0..n {
            if done[j] {
                continue;
            }
            let (ratio, small) = newton_ratio(coeffs, &abs_coeffs, z[j]);
            if small {
                done[j] = true;
                continue;
            }
            let mut s = C64::new(0.0, 0.0);
            for k in 0..n {
                if k != j {
                    let diff = z[j] - z[k];
                    if diff.norm() > 0.0 {
                        s += C64::new(1.0, 0.0) / diff;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - ratio * s;
            let corr = if denom.norm() > 0.0 { ratio / denom } else { ratio };
            if !(corr.re.is_finite() && corr.im.is_finite()) {
                done[j] = true;
                continue;
            }
            z[j] -= corr;
            if corr.norm() <= 4.0 * f64::EPSILON * z[j].norm() {
                done[j] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    for zj in z.iter_mut() {
        polish(coeffs, &abs_coeffs, zj);
    }
    z
}

/// Newton ratio `p(u)/p'(u)`, evaluated through the reversed polynomial when
/// `|u| > 1`; the flag reports that `|p(u)|` is within rounding error of zero.
fn newton_ratio(coeffs: &[C64], abs_coeffs: &[f64], u: C64) -> (C64, bool) {
    let n = coeffs.len() - 1;
    if u.norm() <= 1.0 {
        let (p, dp, bound) = horner(coeffs.iter().rev(), abs_coeffs.iter().rev(), u);
        (p / dp, p.norm() <= 2.0 * f64::EPSILON * bound)
    } else {
        let y = C64::new(1.0, 0.0) / u;
        let (r, dr, bound) = horner(coeffs.iter(), abs_coeffs.iter(), y);
        // p(u) = u^n r(1/u)  ⇒  p/p' = u r / (n r − y r').
        let ratio = u * r / (r * n as f64 - y * dr);
        (ratio, r.norm() <= 2.0 * f64::EPSILON * bound)
    }
}

/// Horner evaluation over coefficients given highest power first. Returns the
/// value, derivative, and a running bound `Σ|c_i||u|^i` for the rounding error
/// test.
fn horner<'a>(
    coeffs: impl Iterator<Item = &'a C64>,
    abs_coeffs: impl Iterator<Item = &'a f64>,
    u: C64,
) -> (C64, C64, f64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    let mut bound = 0.0;
    let au = u.norm();
    for (c, a) in coeffs.zip(abs_coeffs) {
        dp = dp * u + p;
        p = p * u + c;
        bound = bound * au + a;
    }
    (p, dp, bound)
}

fn polish(coeffs: &[C64], abs_coeffs: &[f64], z: &mut C64) {
    let value = |u: C64| -> f64 {
        if u.norm() <= 1.0 {
            horner(coeffs.iter().rev(), abs_coeffs.iter().rev(), u).0.norm()
        } else {
            let y = C64::new(1.0, 0.0) / u;
            horner(coeffs.iter(), abs_coeffs.iter(), y).0.norm() * u.norm().powi(coeffs.len() as i32 - 1)
        }
    };
    for _ in 0..3 {
        let (ratio, small) = newton_ratio(coeffs, abs_coeffs, *z);
        if small || !(ratio.re.is_finite() && ratio.im.is_finite()) {
            return;
        }
        let cand = *z - ratio;
        if value(cand) < value(*z) {
            *z = cand;
        } else {
            return;
        }
    }
}

/// Starting points on circles whose radii are read off the upper convex hull of
/// `(i, log|c_i|)`.
fn initial_guesses(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (i, c.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (p.1 - a.1) - (b.1 - a.1) * (p.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(n);
    let sigma = 0.7;
    for (seg, w) in hull.windows(2).enumerate() {
        let (i0, l0) = w[0];
        let (i1, l1) = w[1];
        let k = i1 - i0;
        let r = ((l0 - l1) / k as f64).exp();
        for j in 0..k {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / k as f64
                + 2.0 * std::f64::consts::PI * (i0 as f64) / n as f64
                + sigma
                + 0.1 * seg as f64;
            out.push(C64::from_polar(r, theta));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sorted_re(mut v: Vec<C64>) -> Vec<C64> {
        v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        v
    }

    #[test]
    fn aberth_simple_roots() {
        // (u-1)(u-2)(u+3) = u³ − 7u + 6
        let r = sorted_re(aberth_roots(&[c(6.0, 0.0), c(-7.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]));
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - c(want, 0.0)).norm() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn aberth_degree_sixteen_accuracy() {
        let want: Vec<C64> = (0..16)
            .map(|k| C64::from_polar(0.5 + 0.1 * k as f64, 0.9 * k as f64))
            .collect();
        let p = HPoly::from_affine_roots(&want);
        let got = aberth_roots(p.coeffs());
        for w in &want {
            let best = got.iter().map(|g| (g - w).norm()).fold(f64::INFINITY, f64::min);
            assert!(best < 1e-10, "root {w} missed by {best}");
        }
    }

    #[test]
    fn aberth_wide_dynamic_range() {
        // 1e-6 u³ + u² − 2: roots near ±√2 and −1e6.
        let got = aberth_roots(&[c(-2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1e-6, 0.0)]);
        let big = got.iter().find(|r| r.norm() > 1e3).expect("large root");
        assert!((big.re + 1e6).abs() / 1e6 < 1e-9);
        assert_eq!(got.iter().filter(|r| (r.norm() - 2f64.sqrt()).abs() < 1e-5).count(), 2);
    }

    #[test]
    fn monomial_roots() {
        // z²w
        let p = HPoly::from_real(&[0.0, 0.0, 1.0, 0.0]);
        let r = roots(&p, 1e-12).unwrap();
        assert_eq!(r.total_multiplicity(), 3);
        assert_eq!(r.multiplicity_at(&ProjPoint::ZERO, 1e-9), 2);
        assert_eq!(r.multiplicity_at(&ProjPoint::INFINITY, 1e-9), 1);
    }

    #[test]
    fn factored_roots() {
        let p = HPoly::from_real(&[-1.0, 0.0, 1.0]);
        let r = roots(&p, 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.multiplicity_at(&ProjPoint::finite(c(1.0, 0.0)), 1e-9), 1);
        assert_eq!(r.multiplicity_at(&ProjPoint::finite(c(-1.0, 0.0)), 1e-9), 1);
    }

    #[test]
    fn triple_root_clusters() {
        // (z − w)³ w
        let p = HPoly::from_real(&[-1.0, 1.0]).pow(3, false).multiply(&HPoly::w());
        let r = roots(&p, 1e-4).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r.multiplicity_at(&ProjPoint::finite(c(1.0, 0.0)), 1e-9), 3);
        assert_eq!(r.multiplicity_at(&ProjPoint::INFINITY, 1e-9), 1);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert_eq!(roots(&HPoly::zero(3), 1e-9), Err(Error::RootsUndefined));
    }

    #[test]
    fn constant_has_no_roots() {
        let r = roots(&HPoly::constant(c(2.0, 1.0)), 1e-9).unwrap();
        assert!(r.is_empty());
    }
}
