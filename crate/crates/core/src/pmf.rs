//! Finite-window probability mass functions on the integers.
//!
//! A [`Pmf`] stores a contiguous window of probabilities starting at `offset`
//! together with `tail_mass`, the probability that was deliberately cut off
//! above the window. Every metric computed from truncated laws carries the
//! worst-case effect of that mass as an explicit slack term.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default truncation budget for infinite-support laws.
pub const DEFAULT_TRUNC_EPS: f64 = 1e-12;
/// Hard cap on the number of stored support points.
pub const DEFAULT_SUPPORT_CAP: usize = 1_000_000;
/// Tolerance on `sum(probs) + tail_mass` around 1.
pub const MASS_TOL: f64 = 1e-12;

/// Truncation policy for laws with unbounded support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub eps: f64,
    pub support_cap: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Self {
            eps: DEFAULT_TRUNC_EPS,
            support_cap: DEFAULT_SUPPORT_CAP,
        }
    }
}

impl Truncation {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }
}

/// First support point of a geometric law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Start {
    /// `Ge⁰(p)`: `P(k) = (1-p)^k p` for `k >= 0`.
    Zero,
    /// `Ge(p)`: `P(k) = (1-p)^(k-1) p` for `k >= 1`.
    One,
}

impl Start {
    pub fn as_i64(self) -> i64 {
        match self {
            Start::Zero => 0,
            Start::One => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfRepr", into = "PmfRepr")]
pub struct Pmf {
    offset: i64,
    probs: Vec<f64>,
    tail_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct PmfRepr {
    offset: i64,
    probs: Vec<f64>,
    #[serde(default)]
    tail_mass: f64,
}

impl TryFrom<PmfRepr> for Pmf {
    type Error = Error;

    fn try_from(r: PmfRepr) -> Result<Self> {
        Pmf::from_parts(r.offset, r.probs, r.tail_mass)
    }
}

impl From<Pmf> for PmfRepr {
    fn from(p: Pmf) -> Self {
        PmfRepr {
            offset: p.offset,
            probs: p.probs,
            tail_mass: p.tail_mass,
        }
    }
}

/// A window moment together with the estimated contribution of the tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: f64,
    pub tail_estimate: f64,
}

impl Moment {
    pub fn total(&self) -> f64 {
        self.value + self.tail_estimate
    }
}

/// Total variation, Kolmogorov and local distances between two laws.
///
/// All three are computed on the union of the stored windows. The true
/// distances differ from the window values by at most `truncation_slack`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceTriple {
    pub tv: f64,
    pub kolmogorov: f64,
    pub local: f64,
    pub truncation_slack: f64,
}

impl DistanceTriple {
    /// Interval guaranteed to contain the total variation distance of the
    /// untruncated laws.
    pub fn tv_interval(&self) -> (f64, f64) {
        (
            (self.tv - self.truncation_slack).max(0.0),
            (self.tv + self.truncation_slack).min(1.0),
        )
    }

    pub fn tv_upper(&self) -> f64 {
        self.tv_interval().1
    }

    pub fn local_upper(&self) -> f64 {
        (self.local + self.truncation_slack).min(1.0)
    }
}

fn check_entry(k: i64, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::BadProbability { k, value: v });
    }
    Ok(())
}

impl Pmf {
    /// Builds a pmf from its raw parts, validating every invariant.
    pub fn from_parts(offset: i64, probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        for (i, &v) in probs.iter().enumerate() {
            check_entry(offset + i as i64, v)?;
        }
        if !(tail_mass.is_finite() && tail_mass >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tail mass must be a finite non-negative number, got {tail_mass}"
            )));
        }
        let total: f64 = probs.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::MassNotNormalized { total });
        }
        if probs.iter().all(|&v| v == 0.0) {
            return Err(Error::EmptyMass);
        }
        Ok(Self::trimmed(offset, probs, tail_mass))
    }

    /// Internal constructor: trims zero margins, no mass check.
    pub(crate) fn trimmed(mut offset: i64, mut probs: Vec<f64>, tail_mass: f64) -> Self {
        let first = probs.iter().position(|&v| v > 0.0);
        match first {
            None => {
                // Degenerate: everything lives in the tail. Keep a single zero
                // entry so the window is never empty.
                probs.clear();
                probs.push(0.0);
            }
            Some(first) => {
                let last = probs.iter().rposition(|&v| v > 0.0).unwrap();
                probs.truncate(last + 1);
                probs.drain(..first);
                offset += first as i64;
            }
        }
        Self {
            offset,
            probs,
            tail_mass,
        }
    }

    /// Scales non-negative weights to a probability vector.
    pub fn normalize(raw: &[f64], offset: i64) -> Result<Self> {
        for (i, &v) in raw.iter().enumerate() {
            check_entry(offset + i as i64, v)?;
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyMass);
        }
        let probs = raw.iter().map(|v| v / total).collect();
        Ok(Self::trimmed(offset, probs, 0.0))
    }

    pub fn point(k: i64) -> Self {
        Self {
            offset: k,
            probs: vec![1.0],
            tail_mass: 0.0,
        }
    }

    /// Uniform law on `lo..=hi`.
    pub fn uniform(lo: i64, hi: i64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidParameter(format!("empty range {lo}..={hi}")));
        }
        let n = (hi - lo + 1) as usize;
        Ok(Self {
            offset: lo,
            probs: vec![1.0 / n as f64; n],
            tail_mass: 0.0,
        })
    }

    pub fn bernoulli(mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::InvalidParameter(format!(
                "Bernoulli mean must lie in [0,1], got {mu}"
            )));
        }
        Ok(Self::trimmed(0, vec![1.0 - mu, mu], 0.0))
    }

    /// Geometric law with success probability `p`, truncated once the
    /// remaining tail drops below `trunc.eps`.
    pub fn geometric(p: f64, start: Start, trunc: Truncation) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric parameter must lie in (0,1], got {p}"
            )));
        }
        let offset = start.as_i64();
        if p == 1.0 {
            return Ok(Self::point(offset));
        }
        let q = 1.0 - p;
        // smallest K with q^K < eps
        let k_needed = (trunc.eps.ln() / q.ln()).floor() + 1.0;
        let len = k_needed.max(1.0);
        if len > trunc.support_cap as f64 {
            return Err(Error::SupportCap {
                len: len.min(usize::MAX as f64) as usize,
                cap: trunc.support_cap,
            });
        }
        let len = len as usize;
        let probs: Vec<f64> = (0..len).map(|k| q.powi(k as i32) * p).collect();
        let tail = q.powi(len as i32);
        Ok(Self::trimmed(offset, probs, tail))
    }

    /// Yule–Simon law `P(k) = 4/(k(k+1)(k+2))`, stored on `1..=kmax` with the
    /// exact telescoped tail `2/((kmax+1)(kmax+2))`.
    pub fn yule_simon(kmax: i64) -> Result<Self> {
        if kmax < 1 {
            return Err(Error::InvalidParameter(format!(
                "Yule-Simon window must be at least 1, got {kmax}"
            )));
        }
        let probs = (1..=kmax)
            .map(|k| {
                let k = k as f64;
                4.0 / (k * (k + 1.0) * (k + 2.0))
            })
            .collect();
        let kf = kmax as f64;
        let tail = 2.0 / ((kf + 1.0) * (kf + 2.0));
        Ok(Self::trimmed(1, probs, tail))
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn min_support(&self) -> i64 {
        self.offset
    }

    pub fn max_support(&self) -> i64 {
        self.offset + self.probs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `P(k)` for `k` inside the window, 0 outside.
    pub fn get(&self, k: i64) -> f64 {
        let i = k - self.offset;
        if i < 0 || i >= self.probs.len() as i64 {
            0.0
        } else {
            self.probs[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.offset + i as i64, p))
    }

    pub fn window_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// `sum(probs) + tail_mass - 1`.
    pub fn mass_defect(&self) -> f64 {
        self.window_mass() + self.tail_mass - 1.0
    }

    pub fn is_point_mass(&self) -> bool {
        self.probs.len() == 1 && self.tail_mass == 0.0
    }

    /// Law of `X + by`.
    pub fn shift(&self, by: i64) -> Self {
        Self {
            offset: self.offset + by,
            probs: self.probs.clone(),
            tail_mass: self.tail_mass,
        }
    }

    /// `P(X >= k)`, counting the tail mass as lying above the window.
    pub fn survival(&self, k: i64) -> f64 {
        let start = (k - self.offset).max(0) as usize;
        let w: f64 = self.probs.iter().skip(start).sum();
        w + self.tail_mass
    }

    /// Exact convolution. Fails if the result would exceed `cap` points.
    pub fn convolve(&self, other: &Pmf, cap: usize) -> Result<Pmf> {
        let len = self.probs.len() + other.probs.len() - 1;
        if len > cap {
            return Err(Error::SupportCap { len, cap });
        }
        let probs = convolve_slices(&self.probs, &other.probs, len);
        let tail = combine_tails(self.tail_mass, other.tail_mass);
        Ok(Self::trimmed(self.offset + other.offset, probs, tail))
    }

    /// Convolution restricted to values `<= max_value`; mass above is swept
    /// into the tail.
    pub fn convolve_capped(&self, other: &Pmf, max_value: i64) -> Pmf {
        let offset = self.offset + other.offset;
        let full = self.probs.len() + other.probs.len() - 1;
        let keep = (max_value - offset + 1).clamp(0, full as i64) as usize;
        let (a, b) = (self.window_mass(), other.window_mass());
        if keep == 0 {
            return Self::trimmed(offset, vec![0.0], 1.0);
        }
        let probs = convolve_slices(&self.probs, &other.probs, keep);
        let kept: f64 = probs.iter().sum();
        let swept = (a * b - kept).max(0.0);
        let tail = combine_tails(self.tail_mass, other.tail_mass) + swept;
        Self::trimmed(offset, probs, tail)
    }

    /// Weighted pointwise sum of laws.
    pub fn mixture(weights: &[f64], components: &[Pmf]) -> Result<Pmf> {
        if weights.len() != components.len() {
            return Err(Error::LengthMismatch(weights.len(), components.len()));
        }
        if components.is_empty() {
            return Err(Error::EmptyMass);
        }
        let mut total = 0.0;
        for &w in weights {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "mixture weight must be non-negative, got {w}"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParameter(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(Self::mixture_unchecked(weights, components))
    }

    pub(crate) fn mixture_unchecked(weights: &[f64], components: &[Pmf]) -> Pmf {
        let lo = components.iter().map(Pmf::min_support).min().unwrap();
        let hi = components.iter().map(Pmf::max_support).max().unwrap();
        let mut probs = vec![0.0; (hi - lo + 1) as usize];
        let mut tail = 0.0;
        for (&w, c) in weights.iter().zip(components) {
            if w == 0.0 {
                continue;
            }
            let base = (c.offset - lo) as usize;
            for (slot, &p) in probs[base..].iter_mut().zip(&c.probs) {
                *slot += w * p;
            }
            tail += w * c.tail_mass;
        }
        Self::trimmed(lo, probs, tail)
    }

    /// Law of `X | X > 0`.
    pub fn condition_positive(&self) -> Result<Pmf> {
        let above = self.survival(1);
        let window_above: f64 = self.iter().filter(|&(k, _)| k > 0).map(|(_, p)| p).sum();
        if window_above <= 0.0 {
            return Err(Error::NoPositiveMass);
        }
        let start = (1 - self.offset).max(0) as usize;
        let probs = self.probs[start..].iter().map(|p| p / above).collect();
        let offset = self.offset.max(1);
        Ok(Self::trimmed(offset, probs, self.tail_mass / above))
    }

    /// Raw moment of order `r` in `1..=3`.
    ///
    /// The tail estimate assumes the truncated mass continues the geometric
    /// decay seen at the right edge of the window; it is exact for geometric
    /// laws and is refused when the window does not decay.
    pub fn moment(&self, r: u32) -> Result<Moment> {
        if !(1..=3).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "moment order must be 1, 2 or 3, got {r}"
            )));
        }
        let value: f64 = self
            .iter()
            .map(|(k, p)| (k as f64).powi(r as i32) * p)
            .sum();
        if self.tail_mass == 0.0 {
            return Ok(Moment {
                value,
                tail_estimate: 0.0,
            });
        }
        let n = self.probs.len();
        if n < 2 || self.probs[n - 2] <= 0.0 {
            return Err(Error::TailUnbounded { order: r });
        }
        let rho = self.probs[n - 1] / self.probs[n - 2];
        if !(rho < 1.0) {
            return Err(Error::TailUnbounded { order: r });
        }
        // tail = t·(1-rho)·rho^(j-1) at K + j, j >= 1
        let k = self.max_support() as f64;
        let s = 1.0 - rho;
        let ej = 1.0 / s;
        let ej2 = (1.0 + rho) / (s * s);
        let ej3 = (1.0 + 4.0 * rho + rho * rho) / (s * s * s);
        let e = match r {
            1 => k + ej,
            2 => k * k + 2.0 * k * ej + ej2,
            _ => k * k * k + 3.0 * k * k * ej + 3.0 * k * ej2 + ej3,
        };
        Ok(Moment {
            value,
            tail_estimate: self.tail_mass * e,
        })
    }

    /// Mean including the tail estimate.
    pub fn mean(&self) -> Result<f64> {
        self.moment(1).map(|m| m.total())
    }

    /// Writes a two-column `k,p` CSV with a header row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["k", "p"])?;
        for (k, p) in self.iter() {
            wtr.write_record([k.to_string(), format!("{p:e}")])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a `k,p` CSV. Points must be consecutive and increasing; the
    /// missing mass `1 - sum(p)` becomes the tail.
    pub fn read_csv<R: Read>(r: R) -> Result<Pmf> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut offset = None;
        let mut probs = Vec::new();
        for rec in rdr.deserialize() {
            let (k, p): (i64, f64) = rec?;
            let start = *offset.get_or_insert(k);
            if k != start + probs.len() as i64 {
                return Err(Error::Support(format!(
                    "CSV support points must be consecutive; got k = {k}"
                )));
            }
            probs.push(p);
        }
        let offset = offset.ok_or(Error::EmptyMass)?;
        let sum: f64 = probs.iter().sum();
        let tail = (1.0 - sum).max(0.0);
        Pmf::from_parts(offset, probs, tail)
    }
}

fn combine_tails(a: f64, b: f64) -> f64 {
    a + b - a * b
}

/// First `len` coefficients of the product of two coefficient sequences.
pub(crate) fn convolve_slices(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    for (i, &x) in short.iter().enumerate() {
        if x == 0.0 || i >= len {
            continue;
        }
        let stop = (len - i).min(long.len());
        for (slot, &y) in out[i..i + stop].iter_mut().zip(&long[..stop]) {
            *slot += x * y;
        }
    }
    out
}

/// Distances between two laws over the union of their windows.
pub fn distances(p: &Pmf, q: &Pmf) -> DistanceTriple {
    let lo = p.min_support().min(q.min_support());
    let hi = p.max_support().max(q.max_support());
    let mut l1 = 0.0;
    let mut local: f64 = 0.0;
    let mut cdf_gap = 0.0;
    let mut kolmogorov: f64 = 0.0;
    for k in lo..=hi {
        let d = p.get(k) - q.get(k);
        l1 += d.abs();
        local = local.max(d.abs());
        cdf_gap += d;
        kolmogorov = kolmogorov.max(cdf_gap.abs());
    }
    DistanceTriple {
        tv: 0.5 * l1,
        kolmogorov,
        local,
        truncation_slack: 0.5 * (p.tail_mass() + q.tail_mass()),
    }
}

/// Total variation between a law and its shift by +1.
pub fn shift_tv(p: &Pmf) -> f64 {
    let mut l1 = 0.0;
    let mut prev = 0.0;
    for &v in p.probs() {
        l1 += (v - prev).abs();
        prev = v;
    }
    l1 += prev;
    0.5 * l1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn normalize_examples() {
        let p = Pmf::normalize(&[0.0, 2.0, 2.0], 0).unwrap();
        assert_eq!(p.offset(), 1);
        assert_eq!(p.probs(), &[0.5, 0.5]);

        let p = Pmf::normalize(&[1.0], 7).unwrap();
        assert!(p.is_point_mass());
        assert_eq!(p.offset(), 7);

        let p = Pmf::normalize(&[1.0, 1.0, 2.0], -1).unwrap();
        assert_eq!(p.offset(), -1);
        assert_eq!(p.probs(), &[0.25, 0.25, 0.5]);
    }

    #[test]
    fn normalize_errors() {
        assert!(matches!(
            Pmf::normalize(&[0.0, 0.0], 0),
            Err(Error::EmptyMass)
        ));
        assert!(matches!(
            Pmf::normalize(&[1.0, -0.5], 0),
            Err(Error::BadProbability { k: 1, .. })
        ));
    }

    #[test]
    fn from_parts_rejects_bad_mass() {
        assert!(matches!(
            Pmf::from_parts(0, vec![0.5, 0.4], 0.0),
            Err(Error::MassNotNormalized { .. })
        ));
        assert!(Pmf::from_parts(0, vec![0.5, 0.4], 0.1).is_ok());
    }

    #[test]
    fn geometric_examples() {
        let t = Truncation::default();
        let p = Pmf::geometric(1.0, Start::One, t).unwrap();
        assert!(p.is_point_mass());
        assert_eq!(p.offset(), 1);

        let p = Pmf::geometric(0.5, Start::One, t).unwrap();
        assert_eq!(p.offset(), 1);
        assert_eq!(&p.probs()[..3], &[0.5, 0.25, 0.125]);
        assert!(p.tail_mass() < t.eps);
        assert!(p.mass_defect().abs() <= MASS_TOL);

        let p = Pmf::geometric(0.5, Start::Zero, t).unwrap();
        assert_eq!(p.offset(), 0);
        assert_eq!(&p.probs()[..2], &[0.5, 0.25]);
    }

    #[test]
    fn geometric_rejects_bad_p() {
        let t = Truncation::default();
        for p in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(Pmf::geometric(p, Start::One, t).is_err());
        }
        // p so small the window would blow through the cap
        assert!(matches!(
            Pmf::geometric(1e-9, Start::One, t),
            Err(Error::SupportCap { .. })
        ));
    }

    #[test]
    fn yule_simon_values_and_tail() {
        let y = Pmf::yule_simon(50).unwrap();
        assert!(close(y.get(1), 2.0 / 3.0, 1e-15));
        assert!(close(y.get(2), 1.0 / 6.0, 1e-15));
        // oracle: sum the partial fractions far past the window
        let oracle: f64 = (51..2_000_000)
            .map(|k| {
                let k = k as f64;
                4.0 / (k * (k + 1.0) * (k + 2.0))
            })
            .sum();
        assert!(close(y.tail_mass(), oracle, 1e-12));
        assert!(y.mass_defect().abs() <= MASS_TOL);
        assert!(Pmf::yule_simon(0).is_err());
    }

    #[test]
    fn convolve_examples() {
        let p = Pmf::geometric(0.3, Start::Zero, Truncation::default()).unwrap();
        let id = Pmf::point(0).convolve(&p, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(id, p);

        let b = Pmf::bernoulli(0.5).unwrap();
        let bb = b.convolve(&b, DEFAULT_SUPPORT_CAP).unwrap();
        assert_eq!(bb.probs(), &[0.25, 0.5, 0.25]);
    }

    #[test]
    fn convolve_geometric_matches_double_sum() {
        let a = 0.4;
        let g = Pmf::geometric(a, Start::One, Truncation::default()).unwrap();
        let nb = g.convolve(&g, DEFAULT_SUPPORT_CAP).unwrap();
        let q = 1.0 - a;
        for k in 2..40i64 {
            let oracle: f64 = (1..k)
                .map(|j| q.powi(j as i32 - 1) * a * q.powi((k - j) as i32 - 1) * a)
                .sum();
            assert!(close(nb.get(k), oracle, 1e-15), "k = {k}");
            let closed = (k - 1) as f64 * a * a * q.powi(k as i32 - 2);
            assert!(close(nb.get(k), closed, 1e-14));
        }
        assert!(nb.mass_defect().abs() <= MASS_TOL);
    }

    #[test]
    fn convolve_cap_is_enforced() {
        let u = Pmf::uniform(0, 9).unwrap();
        assert!(matches!(
            u.convolve(&u, 10),
            Err(Error::SupportCap { len: 19, cap: 10 })
        ));
    }

    #[test]
    fn convolve_capped_sweeps_to_tail() {
        let u = Pmf::uniform(0, 3).unwrap();
        let c = u.convolve_capped(&u, 3);
        assert_eq!(c.max_support(), 3);
        assert!(close(c.tail_mass(), 6.0 / 16.0, 1e-15));
        assert!(c.mass_defect().abs() <= MASS_TOL);
    }

    #[test]
    fn mixture_examples() {
        let g = Pmf::geometric(0.2, Start::One, Truncation::default()).unwrap();
        assert_eq!(Pmf::mixture(&[1.0], std::slice::from_ref(&g)).unwrap(), g);

        let m = Pmf::mixture(&[0.5, 0.5], &[Pmf::point(0), Pmf::point(1)]).unwrap();
        assert_eq!(m, Pmf::bernoulli(0.5).unwrap());

        let comps: Vec<Pmf> = (1..=5).map(Pmf::point).collect();
        let m = Pmf::mixture(&[0.2; 5], &comps).unwrap();
        let d = distances(&m, &Pmf::uniform(1, 5).unwrap());
        assert!(d.tv <= 1e-15);
    }

    #[test]
    fn mixture_errors() {
        assert!(matches!(
            Pmf::mixture(&[0.5, 0.5], &[Pmf::point(0)]),
            Err(Error::LengthMismatch(2, 1))
        ));
        assert!(Pmf::mixture(&[1.5, -0.5], &[Pmf::point(0), Pmf::point(1)]).is_err());
        assert!(Pmf::mixture(&[0.5, 0.4], &[Pmf::point(0), Pmf::point(1)]).is_err());
    }

    #[test]
    fn condition_positive_examples() {
        let p = Pmf::uniform(1, 3).unwrap();
        assert_eq!(p.condition_positive().unwrap(), p);

        let p = Pmf::normalize(&[0.5, 0.25, 0.25], 0).unwrap();
        let c = p.condition_positive().unwrap();
        assert_eq!(c.offset(), 1);
        assert_eq!(c.probs(), &[0.5, 0.5]);

        assert!(matches!(
            Pmf::point(0).condition_positive(),
            Err(Error::NoPositiveMass)
        ));
    }

    #[test]
    fn condition_positive_of_shifted_geometric() {
        // P(k | k >= 1) = (1-p)^k p / (1-p) = (1-p)^(k-1) p
        let t = Truncation::default();
        for p in [0.1, 0.5, 0.8] {
            let c = Pmf::geometric(p, Start::Zero, t)
                .unwrap()
                .condition_positive()
                .unwrap();
            for k in 1..=c.max_support().min(30) {
                let oracle = (1.0 - p).powi(k as i32) * p / (1.0 - p);
                assert!(close(c.get(k), oracle, 1e-14), "{} vs {oracle}", c.get(k));
            }
            let d = distances(&c, &Pmf::geometric(p, Start::One, t).unwrap());
            assert!(d.tv_upper() <= 2e-12);
        }
    }

    #[test]
    fn moment_examples() {
        let m = Pmf::point(7).moment(1).unwrap();
        assert_eq!(m.total(), 7.0);

        let t = Truncation::default();
        for p in [0.05, 0.3, 0.9] {
            let g = Pmf::geometric(p, Start::One, t).unwrap();
            assert!(close(g.mean().unwrap(), 1.0 / p, 1e-9));

            let g0 = Pmf::geometric(p, Start::Zero, t).unwrap();
            let q = 1.0 - p;
            // summation oracle for E X^2, run far beyond the window
            let oracle: f64 = (0..20_000)
                .map(|k| (k as f64).powi(2) * q.powi(k) * p)
                .sum();
            let m2 = g0.moment(2).unwrap();
            assert!(close(m2.total(), oracle, 1e-9 * oracle.max(1.0)));
            assert!(close(oracle, q * (1.0 + q) / (p * p), 1e-9 * oracle.max(1.0)));
        }
    }

    #[test]
    fn moment_rejects_non_decaying_tail() {
        let p = Pmf::from_parts(0, vec![0.2, 0.3], 0.5).unwrap();
        assert!(matches!(p.moment(1), Err(Error::TailUnbounded { order: 1 })));
        assert!(Pmf::point(0).moment(4).is_err());
    }

    #[test]
    fn distance_examples() {
        let g = Pmf::geometric(0.3, Start::One, Truncation::default()).unwrap();
        let d = distances(&g, &g);
        assert_eq!((d.tv, d.kolmogorov, d.local), (0.0, 0.0, 0.0));

        for n in [1i64, 3, 10, 25] {
            let evens: Vec<i64> = (1..=2 * n).filter(|k| k % 2 == 0).collect();
            let odds: Vec<i64> = (1..=2 * n).filter(|k| k % 2 == 1).collect();
            let w = vec![1.0 / n as f64; n as usize];
            let u = Pmf::mixture(&w, &evens.iter().map(|&k| Pmf::point(k)).collect::<Vec<_>>())
                .unwrap();
            let v = Pmf::mixture(&w, &odds.iter().map(|&k| Pmf::point(k)).collect::<Vec<_>>())
                .unwrap();
            let d = distances(&u, &v);
            assert!(close(d.tv, 1.0, 1e-12));
            assert!(close(d.kolmogorov, 1.0 / n as f64, 1e-12));
        }
    }

    #[test]
    fn distance_between_shifted_geometrics() {
        let t = Truncation::default();
        let a = Pmf::geometric(0.5, Start::Zero, t).unwrap();
        let b = Pmf::geometric(1.0 / 3.0, Start::Zero, t).unwrap();
        // half-L1 oracle, summed far beyond both windows
        let oracle: f64 = 0.5
            * (0..400)
                .map(|k| (0.5f64.powi(k + 1) - (2.0f64 / 3.0).powi(k) / 3.0).abs())
                .sum::<f64>();
        assert!(close(oracle, 7.0 / 36.0, 1e-14));
        let d = distances(&a, &b);
        let (lo, hi) = d.tv_interval();
        assert!(lo <= oracle && oracle <= hi);
        assert!(d.kolmogorov <= d.tv + 1e-15);
    }

    #[test]
    fn shift_tv_values() {
        assert_eq!(shift_tv(&Pmf::point(3)), 1.0);
        assert_eq!(shift_tv(&Pmf::bernoulli(0.5).unwrap()), 0.5);
    }

    #[test]
    fn json_round_trip_and_validation() {
        let g = Pmf::geometric(0.4, Start::Zero, Truncation::default()).unwrap();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"offset\":0") && s.contains("tail_mass"));
        let back: Pmf = serde_json::from_str(&s).unwrap();
        assert_eq!(back, g);

        let bad = r#"{"offset":0,"probs":[0.5,0.6],"tail_mass":0.0}"#;
        assert!(serde_json::from_str::<Pmf>(bad).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let u = Pmf::normalize(&[1.0, 2.0, 1.0], -2).unwrap();
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("k,p\n-2,"));
        let back = Pmf::read_csv(&buf[..]).unwrap();
        assert_eq!(back.offset(), -2);
        assert!(distances(&back, &u).tv < 1e-15);

        let gap = "k,p\n0,0.5\n2,0.5\n";
        assert!(Pmf::read_csv(gap.as_bytes()).is_err());
    }
}
