//! Right-hand sides of the geometric approximation bounds and the reports
//! that pair them with exactly computed distances.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pmf::{distances, Pmf, Start, Truncation};
use crate::rng::{random_pmf, SeededRng};
use crate::transforms::{equilibrium_nonneg, equilibrium_pos, smoothness, SmoothnessValue};

/// One draw of a `(W, Wᵉ)` coupling with the conditional smoothness values
/// supplied by the model that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingSample {
    pub w: i64,
    pub w_eq: i64,
    pub d: i64,
    pub s1: f64,
    pub s2: f64,
    pub in_a: bool,
}

impl CouplingSample {
    pub fn new(w: i64, w_eq: i64, s1: f64, s2: f64, in_a: bool) -> Self {
        debug_assert!((0.0..=2.0).contains(&s1), "s1 = {s1}");
        debug_assert!((0.0..=4.0).contains(&s2), "s2 = {s2}");
        Self {
            w,
            w_eq,
            d: w - w_eq,
            s1,
            s2,
            in_a,
        }
    }

    fn smoothness(&self, order: Order) -> f64 {
        match order {
            Order::First => self.s1,
            Order::Second => self.s2,
        }
    }
}

/// Which of the two metrics a bound controls: `l = 1` (total variation,
/// with `S₁`) or `l = 2` (local metric, with `S₂`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    First,
    Second,
}

impl Order {
    pub fn metric(self) -> Metric {
        match self {
            Order::First => Metric::Tv,
            Order::Second => Metric::Local,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Tv,
    Local,
    Kolmogorov,
    /// A reported quantity that is not a distance (e.g. a quadrature error).
    Value,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Tv => "tv",
            Metric::Local => "local",
            Metric::Kolmogorov => "kolmogorov",
            Metric::Value => "value",
        }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
        }
    }

    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut n = 0usize;
        let mut mean = 0.0;
        let mut m2 = 0.0;
        for x in values {
            n += 1;
            let delta = x - mean;
            mean += delta / n as f64;
            m2 += delta * (x - mean);
        }
        if n == 0 {
            return Err(Error::EmptySamples);
        }
        let std_error = if n > 1 {
            (m2 / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            value: mean,
            std_error,
        })
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            std_error: self.std_error * c.abs(),
        }
    }
}

/// `E{|D| S_l(W|𝓕) 1_A} + 2 P(Aᶜ)` for a positive `W`.
pub fn positive_coupling_rhs(samples: &[CouplingSample], order: Order) -> Result<Estimate> {
    Estimate::from_values(samples.iter().map(|s| {
        if s.in_a {
            s.d.unsigned_abs() as f64 * s.smoothness(order)
        } else {
            2.0
        }
    }))
}

/// `(1−p) E{|D| S_l(W|𝓕) 1_A} + 2(1−p) P(Aᶜ)` for a non-negative `W`.
pub fn nonneg_coupling_rhs(samples: &[CouplingSample], order: Order, p: f64) -> Result<Estimate> {
    check_p(p)?;
    Ok(positive_coupling_rhs(samples, order)?.scale(1.0 - p))
}

/// `p E|D|`, bounding `d_TV(Wᵉ, Ge(p))` (and `d_TV(W^{e₀}, Ge⁰(p))`).
pub fn mean_abs_d_rhs(p: f64, mean_abs_d: f64) -> Result<f64> {
    check_p(p)?;
    if !(mean_abs_d >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "E|D| must be non-negative, got {mean_abs_d}"
        )));
    }
    Ok(p * mean_abs_d)
}

/// `2(1−p) P(W ≠ W^{e₀})`.
pub fn mismatch_rhs(p: f64, prob_neq: f64) -> Result<f64> {
    check_p(p)?;
    if !(0.0..=1.0).contains(&prob_neq) {
        return Err(Error::InvalidParameter(format!(
            "P(W != W^e0) must lie in [0,1], got {prob_neq}"
        )));
    }
    Ok(2.0 * (1.0 - p) * prob_neq)
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p must lie in (0,1], got {p}"
        )));
    }
    Ok(())
}

/// The constants `(C₁, C₂)` of the geometric-sum bounds.
///
/// At `a = 1` both reduce to `min{1, a} = 1`.
pub fn c_constants(a: f64, u: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "a must lie in (0,1], got {a}"
        )));
    }
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "u must lie in (0,1], got {u}"
        )));
    }
    if a == 1.0 {
        return Ok((1.0, 1.0));
    }
    let c1 = a * (1.0 + (-2.0 / (u * (1.0 - a).ln())).sqrt());
    let c2 = a * (1.0 - 6.0 * a.ln() / (std::f64::consts::PI * u));
    Ok((c1.min(1.0), c2.min(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GsumBound {
    /// Parameter of the approximating geometric law.
    pub p: f64,
    pub rhs_tv: f64,
    pub rhs_local: f64,
}

/// Moment forms of the geometric-sum bounds. With `positive = true` the
/// summands live on `{1, 2, ...}`, `N ~ Ge(a)` and the target is `Ge(a/μ)`;
/// otherwise they live on `{0, 1, ...}`, `M ~ Ge⁰(a)` and the target is
/// `Ge⁰(a / (a + μ(1−a)))`.
pub fn gsum_bounds(a: f64, u: f64, mu: f64, mu2: f64, positive: bool) -> Result<GsumBound> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "summand mean must be positive, got {mu}"
        )));
    }
    if mu2 < mu * mu * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "second moment {mu2} is below the squared mean {}",
            mu * mu
        )));
    }
    if positive && mu < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "positive summands have mean at least 1, got {mu}"
        )));
    }
    let (c1, c2) = c_constants(a, u)?;
    let (p, factor) = if positive {
        (a / mu, mu2 / 2.0 + 0.5 + mu)
    } else {
        (a / (a + mu * (1.0 - a)), (mu2 / (2.0 * mu) - 0.5).max(0.0))
    };
    Ok(GsumBound {
        p,
        rhs_tv: c1 * factor,
        rhs_local: c2 * factor,
    })
}

/// `d_TV(Ge(p), Ge(p − ε)) ≤ ε / p`.
pub fn geo_param_tv_bound(p: f64, eps: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0 && eps >= 0.0 && eps < p) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < p - eps < p <= 1, got p = {p}, eps = {eps}"
        )));
    }
    Ok(eps / p)
}

/// `E|W − V|` for independent `W ~ w`, `V ~ v`.
pub fn independent_mean_abs_diff(w: &Pmf, v: &Pmf) -> f64 {
    let mut total = 0.0;
    for (j, pj) in w.iter() {
        for (k, pk) in v.iter() {
            total += pj * pk * (j - k).unsigned_abs() as f64;
        }
    }
    total
}

/// Outcome of comparing a bound against its left-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// Monte Carlo bound not dominating within three standard errors.
    Flag,
    /// Reported only; no assertion attached.
    Soft,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Flag => "FLAG",
            Verdict::Soft => "SOFT",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: f64,
}

/// An evaluated bound next to the exact left-hand side it controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem_tag: String,
    pub params: Vec<Param>,
    pub lhs_metric: Metric,
    pub lhs_value: f64,
    pub slack: f64,
    pub rhs_value: f64,
    pub rhs_std_error: f64,
    pub empirical_c: Option<f64>,
    pub hard: bool,
    pub verdict: Verdict,
}

impl BoundReport {
    /// Builds a report and settles its verdict. Exact right-hand sides
    /// assert `lhs ≤ rhs + slack + tol`; Monte Carlo ones only flag.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        tag: impl Into<String>,
        params: &[(&str, f64)],
        metric: Metric,
        lhs: f64,
        slack: f64,
        rhs: Estimate,
        hard: bool,
        tol: f64,
    ) -> Self {
        let dominated = if rhs.std_error > 0.0 {
            lhs <= rhs.value + 3.0 * rhs.std_error + slack + tol
        } else {
            lhs <= rhs.value + slack + tol
        };
        let verdict = match (hard, rhs.std_error > 0.0, dominated) {
            (false, _, _) => Verdict::Soft,
            (true, false, true) | (true, true, true) => Verdict::Pass,
            (true, false, false) => Verdict::Fail,
            (true, true, false) => Verdict::Flag,
        };
        Self {
            theorem_tag: tag.into(),
            params: params
                .iter()
                .map(|&(n, v)| Param {
                    name: n.to_string(),
                    value: v,
                })
                .collect(),
            lhs_metric: metric,
            lhs_value: lhs,
            slack,
            rhs_value: rhs.value,
            rhs_std_error: rhs.std_error,
            empirical_c: None,
            hard,
            verdict,
        }
    }

    pub fn with_empirical_c(mut self, c: f64) -> Self {
        self.empirical_c = Some(c);
        self
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|p| p.name == name).map(|p| p.value)
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

/// Writes reports as RFC-4180 CSV. Parameter columns are the union of all
/// parameter names in order of first appearance.
pub fn write_reports_csv<W: Write>(reports: &[BoundReport], w: W) -> Result<()> {
    let mut names: Vec<&str> = Vec::new();
    for r in reports {
        for p in &r.params {
            if !names.contains(&p.name.as_str()) {
                names.push(&p.name);
            }
        }
    }
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["theorem_tag"];
    header.extend(names.iter().copied());
    header.extend([
        "lhs_metric",
        "lhs",
        "slack",
        "rhs",
        "stderr",
        "empirical_c",
        "verdict",
    ]);
    wtr.write_record(&header)?;
    for r in reports {
        let mut row = vec![r.theorem_tag.clone()];
        for n in &names {
            row.push(r.param(n).map(|v| v.to_string()).unwrap_or_default());
        }
        row.push(r.lhs_metric.as_str().into());
        row.push(r.lhs_value.to_string());
        row.push(r.slack.to_string());
        row.push(r.rhs_value.to_string());
        row.push(r.rhs_std_error.to_string());
        row.push(r.empirical_c.map(|c| c.to_string()).unwrap_or_default());
        row.push(r.verdict.as_str().into());
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// `E{|D| S(W | σ(D))}` for the independent coupling of `W ~ w` and `V ~ v`.
///
/// Given `D = d` the conditional law of `W` has weights `P(W=k) P(V=k−d)`;
/// the conditional law of `V` is the same law shifted by `−d`, so the
/// smoothness of `W` and of `V` given `σ(D)` coincide.
pub fn conditional_smoothness_moments(w: &Pmf, v: &Pmf) -> Result<(f64, SmoothnessValue)> {
    let d_lo = w.min_support() - v.max_support();
    let d_hi = w.max_support() - v.min_support();
    let mut abs_d = 0.0;
    let mut acc = SmoothnessValue { s1: 0.0, s2: 0.0 };
    for d in d_lo..=d_hi {
        let weights: Vec<f64> = (w.min_support()..=w.max_support())
            .map(|k| w.get(k) * v.get(k - d))
            .collect();
        let mass: f64 = weights.iter().sum();
        if mass <= 0.0 {
            continue;
        }
        let cond = Pmf::normalize(&weights, w.min_support())?;
        let s = smoothness(&cond);
        let ad = d.unsigned_abs() as f64;
        abs_d += mass * ad;
        acc.s1 += mass * ad * s.s1;
        acc.s2 += mass * ad * s.s2;
    }
    Ok((abs_d, acc))
}

/// Exact check of the positive-case bounds for one law.
///
/// `W` and `Wᵉ` are coupled independently and `𝓕 = σ(D)`, so every
/// conditional smoothness is computed from an exact conditional law.
/// Returns reports for the total variation and local bounds on `W` and the
/// two bounds on `Wᵉ`.
pub fn positive_validity(w: &Pmf, tol: f64) -> Result<Vec<BoundReport>> {
    let mean = w.mean()?;
    let p = 1.0 / mean;
    let we = equilibrium_pos(w)?;
    let geo = Pmf::geometric(p, Start::One, Truncation::default())?;
    let (abs_d, ds) = conditional_smoothness_moments(w, &we)?;
    let d_w = distances(w, &geo);
    let d_e = distances(&we, &geo);
    let params = [("mean", mean), ("p", p), ("mean_abs_d", abs_d)];
    let rep = |tag: &str, metric: Metric, lhs: f64, slack: f64, rhs: f64| {
        BoundReport::new(tag, &params, metric, lhs, slack, Estimate::exact(rhs), true, tol)
    };
    Ok(vec![
        rep("positive_w_tv", Metric::Tv, d_w.tv, d_w.truncation_slack, ds.s1),
        rep("positive_w_local", Metric::Local, d_w.local, d_w.truncation_slack, ds.s2),
        rep("positive_eq_tv", Metric::Tv, d_e.tv, d_e.truncation_slack, p * abs_d),
        rep("positive_eq_local", Metric::Local, d_e.local, d_e.truncation_slack, p * ds.s1),
    ])
}

/// Non-negative counterpart of [`positive_validity`] with `W^{e₀}` and the
/// `(1−p)` factors; requires `P(W = 0) > 0`.
pub fn nonneg_validity(w: &Pmf, tol: f64) -> Result<Vec<BoundReport>> {
    let mean = w.mean()?;
    let p = 1.0 / (1.0 + mean);
    let we = equilibrium_nonneg(w)?;
    let geo = Pmf::geometric(p, Start::Zero, Truncation::default())?;
    let (abs_d, ds) = conditional_smoothness_moments(w, &we)?;
    let d_w = distances(w, &geo);
    let d_e = distances(&we, &geo);
    let q = 1.0 - p;
    let params = [("mean", mean), ("p", p), ("mean_abs_d", abs_d)];
    let rep = |tag: &str, metric: Metric, lhs: f64, slack: f64, rhs: f64| {
        BoundReport::new(tag, &params, metric, lhs, slack, Estimate::exact(rhs), true, tol)
    };
    Ok(vec![
        rep("nonneg_w_tv", Metric::Tv, d_w.tv, d_w.truncation_slack, q * ds.s1),
        rep("nonneg_w_local", Metric::Local, d_w.local, d_w.truncation_slack, q * ds.s2),
        rep("nonneg_eq_tv", Metric::Tv, d_e.tv, d_e.truncation_slack, p * abs_d),
        rep("nonneg_eq_local", Metric::Local, d_e.local, d_e.truncation_slack, p * ds.s1),
    ])
}

/// Exact validity checks on `count` random positive laws and `count` random
/// non-negative laws with support length at most `max_len`. Instance `j`
/// draws from `rng.split(j)`, so the output does not depend on `exec`.
pub fn validity_sweep(
    rng: &SeededRng,
    count: usize,
    max_len: usize,
    tol: f64,
    exec: Execution,
) -> Result<Vec<BoundReport>> {
    let idx: Vec<u64> = (0..count as u64).collect();
    let per = exec.map(&idx, |&j| -> Result<Vec<BoundReport>> {
        let mut r = rng.split(j);
        let pos = random_pmf(&mut r, 1, max_len);
        let mut out = positive_validity(&pos, tol)?;
        let nonneg = random_pmf(&mut r, 0, max_len);
        if nonneg.max_support() > 0 {
            out.extend(nonneg_validity(&nonneg, tol)?);
        }
        for rep in &mut out {
            rep.params.insert(
                0,
                Param {
                    name: "instance".into(),
                    value: j as f64,
                },
            );
        }
        Ok(out)
    });
    let mut all = Vec::new();
    for rows in per {
        all.extend(rows?);
    }
    Ok(all)
}
