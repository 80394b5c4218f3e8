//! Size-bias and discrete equilibrium transforms, and the smoothness
//! functionals `S₁`, `S₂`.
//!
//! The equilibrium transforms are defined through test functions,
//! `E f(W) - f(0) = E W · E ∇f(Wᵉ)` (positive case, backward difference)
//! and `E f(W) - f(0) = E W · E Δf(W^{e₀})` (non-negative case, forward
//! difference). Summation by parts turns these into the survival formulas
//!
//! ```text
//! P(Wᵉ = k)    = P(W ≥ k)   / E W,   k ≥ 1
//! P(W^{e₀} = k) = P(W ≥ k+1) / E W,   k ≥ 0
//! ```
//!
//! which is what is implemented here. The test-function identity itself is
//! checked in the integration tests.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{shift_tv, Pmf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessValue {
    /// `sup_{‖g‖≤1} |E Δg(W)| = 2 d_TV(W, W+1)`, in `[0, 2]`.
    pub s1: f64,
    /// `sup_{‖g‖≤1} |E Δ²g(W)|`, in `[0, 4]`.
    pub s2: f64,
}

fn require_nonneg_support(p: &Pmf) -> Result<()> {
    if p.min_support() < 0 {
        return Err(Error::Support(format!(
            "expected support on the non-negative integers, found k = {}",
            p.min_support()
        )));
    }
    Ok(())
}

fn positive_mean(p: &Pmf) -> Result<f64> {
    let mean = p.mean()?;
    if !(mean > 0.0) {
        return Err(Error::Support("law has zero mean".into()));
    }
    Ok(mean)
}

/// `Pˢ(k) = k P(k) / E W`.
pub fn size_bias(p: &Pmf) -> Result<Pmf> {
    require_nonneg_support(p)?;
    let mean = positive_mean(p)?;
    let probs: Vec<f64> = p.iter().map(|(k, v)| k as f64 * v / mean).collect();
    let tail = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    Ok(Pmf::trimmed(p.offset(), probs, tail))
}

/// Equilibrium law for a positive integer-valued `W`:
/// `P(Wᵉ = k) = P(W ≥ k) / E W` for `k ≥ 1`.
pub fn equilibrium_pos(p: &Pmf) -> Result<Pmf> {
    if p.min_support() < 1 {
        return Err(Error::Support(format!(
            "positive equilibrium needs support on k >= 1, found k = {}",
            p.min_support()
        )));
    }
    let mean = positive_mean(p)?;
    Ok(survival_law(p, 1, mean))
}

/// Equilibrium law for a non-negative `W` with `P(W = 0) > 0`:
/// `P(W^{e₀} = k) = P(W ≥ k+1) / E W` for `k ≥ 0`.
pub fn equilibrium_nonneg(p: &Pmf) -> Result<Pmf> {
    require_nonneg_support(p)?;
    if p.get(0) <= 0.0 {
        return Err(Error::Support(
            "P(W = 0) = 0; use the positive equilibrium transform of the shifted law".into(),
        ));
    }
    let mean = positive_mean(p)?;
    Ok(survival_law(p, 1, mean).shift(-1))
}

/// Law on `from..=max_support` with masses `P(W ≥ k) / mean`. When `W`
/// has tail mass the entry at `max_support + 1` is `tail / mean` exactly.
fn survival_law(p: &Pmf, from: i64, mean: f64) -> Pmf {
    let hi = p.max_support();
    let mut probs = Vec::with_capacity((hi - from + 2).max(1) as usize);
    // accumulate survival from the top down so small tails keep precision
    let mut surv = p.tail_mass();
    let mut rev = Vec::with_capacity(probs.capacity());
    if surv > 0.0 {
        rev.push(surv / mean);
    }
    for k in (from..=hi).rev() {
        surv += p.get(k);
        rev.push(surv / mean);
    }
    probs.extend(rev.into_iter().rev());
    let tail = (1.0 - probs.iter().sum::<f64>()).max(0.0);
    Pmf::trimmed(from, probs, tail)
}

/// First and second order smoothness of an (unconditional) law.
pub fn smoothness(p: &Pmf) -> SmoothnessValue {
    let probs = p.probs();
    let n = probs.len();
    let at = |i: isize| -> f64 {
        if i < 0 || i as usize >= n {
            0.0
        } else {
            probs[i as usize]
        }
    };
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for i in 0..(n as isize + 2) {
        s1 += (at(i) - at(i - 1)).abs();
        s2 += (at(i) - 2.0 * at(i - 1) + at(i - 2)).abs();
    }
    SmoothnessValue {
        s1: s1.min(2.0),
        s2: s2.min(4.0),
    }
}

/// `u = 1 - d_TV(X, X+1)`.
pub fn shift_overlap_u(p: &Pmf) -> f64 {
    (1.0 - shift_tv(p)).clamp(0.0, 1.0)
}

/// Bound on `d_TV(S, S+1)` for a sum `S` of independent integer variables
/// with shift overlaps `u_i`: `min(1, sqrt(2/π) (1/4 + Σ u_i)^{-1/2})`.
pub fn mattner_bound(u_values: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for &u in u_values {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidParameter(format!(
                "shift overlap must lie in [0,1], got {u}"
            )));
        }
        total += u;
    }
    Ok(mattner_from_sum(total))
}

/// Same as [`mattner_bound`] but from a precomputed `Σ u_i`.
pub fn mattner_from_sum(u_sum: f64) -> f64 {
    ((2.0 / std::f64::consts::PI).sqrt() / (0.25 + u_sum).sqrt()).min(1.0)
}
