//! In-degree of a uniformly chosen vertex in the uniform attachment graph.
//!
//! Vertex `n−m+1` (for `m = 1..n`) receives one edge from each later vertex
//! and its own loop, so its in-degree is `X_1 + ... + X_m` with independent
//! `X_i ~ Bern(1/(n−i+1))`. A uniform vertex gives a uniform `N = m`.

use crate::bounds::{mismatch_rhs, BoundReport, Estimate, Metric};
use crate::error::{Error, Result};
use crate::pmf::{distances, Pmf, Start, Truncation};

/// Laws of the partial sums `S_0, S_1, ..., S_n`, each on `0..=n`.
fn partial_sums(n: usize) -> Vec<Vec<f64>> {
    let mut cur = vec![0.0; n + 1];
    cur[0] = 1.0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(cur.clone());
    for i in 1..=n {
        let mu = 1.0 / (n - i + 1) as f64;
        for k in (0..=i).rev() {
            let stay = cur[k] * (1.0 - mu);
            let step = if k > 0 { cur[k - 1] * mu } else { 0.0 };
            cur[k] = stay + step;
        }
        out.push(cur.clone());
    }
    out
}

fn uniform_mix(rows: &[Vec<f64>]) -> Pmf {
    let w = 1.0 / rows.len() as f64;
    let len = rows[0].len();
    let probs: Vec<f64> = (0..len).map(|k| rows.iter().map(|r| r[k]).sum::<f64>() * w).collect();
    Pmf::trimmed(0, probs, 0.0)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    Ok(())
}

/// Exact law of `W = S_N`, `N` uniform on `1..=n`.
pub fn ua_degree_dist(n: usize) -> Result<Pmf> {
    check_n(n)?;
    let sums = partial_sums(n);
    Ok(uniform_mix(&sums[1..]))
}

/// Exact law of `S_{N−1}`, the coupled version of `W^{e₀}`.
pub fn ua_coupled_equilibrium(n: usize) -> Result<Pmf> {
    check_n(n)?;
    let sums = partial_sums(n);
    Ok(uniform_mix(&sums[..n]))
}

/// One report per `n`: exact `d_TV(W, Ge⁰(½))` against the coupling bound
/// with `P(W ≠ W^{e₀}) = P(N = n) = 1/n`.
pub fn ua_experiment(n_grid: &[usize], trunc: Truncation) -> Result<Vec<BoundReport>> {
    let geo = Pmf::geometric(0.5, Start::Zero, trunc)?;
    let mut sorted = n_grid.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted
        .into_iter()
        .map(|n| {
            let w = ua_degree_dist(n)?;
            let d = distances(&w, &geo);
            let prob_neq = 1.0 / n as f64;
            let rhs = mismatch_rhs(0.5, prob_neq)?;
            Ok(BoundReport::new(
                "ua_degree",
                &[("n", n as f64), ("p", 0.5), ("prob_neq", prob_neq)],
                Metric::Tv,
                d.tv,
                d.truncation_slack,
                Estimate::exact(rhs),
                true,
                1e-12,
            )
            .with_empirical_c(n as f64 * d.tv))
        })
        .collect()
}
