//! Degree of a fixed vertex in the single-edge preferential attachment graph.
//!
//! Vertex `j` arrives with one out-edge and attaches it to vertex `l ≤ j`
//! with probability proportional to degree, counting its own out-edge, so a
//! vertex of degree `d` is hit with probability `d / (2j − 1)`. The degree
//! chain of vertex `i` is `W_{i,i} = 1 + Bern(1/(2i − 1))` and
//! `W_{j,i} = W_{j−1,i} + Bern(W_{j−1,i} / (2j − 1))`.

use crate::bounds::{mismatch_rhs, BoundReport, Estimate, Metric};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pmf::{distances, Pmf, Start, Truncation};
use crate::quad::integrate;
use crate::rng::{PmfSampler, SeededRng};

/// Window end for the Yule–Simon comparison law; its tail is `2/((K+1)(K+2))`.
pub const YULE_WINDOW: i64 = 100_000;

fn check(n: usize, i: usize) -> Result<()> {
    if i < 1 || i > n {
        return Err(Error::InvalidParameter(format!(
            "vertex index must satisfy 1 <= i <= n, got i = {i}, n = {n}"
        )));
    }
    Ok(())
}

/// Exact law of `W_{n,i}`, supported on `1..=n−i+2`.
pub fn pa_degree_dist(n: usize, i: usize) -> Result<Pmf> {
    check(n, i)?;
    let top = n - i + 2;
    // index = degree
    let mut cur = vec![0.0; top + 1];
    let loop_p = 1.0 / (2 * i - 1) as f64;
    cur[1] = 1.0 - loop_p;
    cur[2] = loop_p;
    for (hi, j) in (2..).zip(i + 1..=n) {
        let denom = (2 * j - 1) as f64;
        for d in (1..=hi + 1).rev() {
            let stay = if d <= hi { cur[d] * (1.0 - d as f64 / denom) } else { 0.0 };
            let step = cur[d - 1] * (d - 1) as f64 / denom;
            cur[d] = stay + step;
        }
    }
    Ok(Pmf::trimmed(1, cur[1..].to_vec(), 0.0))
}

/// `E W_{n,i} = Π_{j=i}^n 2j/(2j−1)`.
pub fn pa_mean(n: usize, i: usize) -> Result<f64> {
    check(n, i)?;
    Ok(mean_from(i, n))
}

/// `Π_{j=i}^{last} 2j/(2j−1)`; equals 1 when `last < i`.
fn mean_from(i: usize, last: usize) -> f64 {
    (i..=last).map(|j| 2.0 * j as f64 / (2 * j - 1) as f64).product()
}

/// Law of `W_{n,I}` with `I` uniform on `1..=n`.
pub fn pa_mixture(n: usize, exec: Execution) -> Result<Pmf> {
    let laws = all_degrees(n, exec)?;
    let w = vec![1.0 / n as f64; n];
    Ok(Pmf::mixture_unchecked(&w, &laws))
}

fn all_degrees(n: usize, exec: Execution) -> Result<Vec<Pmf>> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    let idx: Vec<usize> = (1..=n).collect();
    exec.map(&idx, |&i| pa_degree_dist(n, i)).into_iter().collect()
}

/// Exact `d_TV(W_{n,i}, Ge(1/E W_{n,i}))` per `i`, reported softly with
/// `i · tv` as the empirical constant.
pub fn pa_fixed_vertex_experiment(
    n: usize,
    i_grid: &[usize],
    trunc: Truncation,
    exec: Execution,
) -> Result<Vec<BoundReport>> {
    let mut grid = i_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    for &i in &grid {
        check(n, i)?;
    }
    exec.map(&grid, |&i| -> Result<BoundReport> {
        let w = pa_degree_dist(n, i)?;
        let mean = mean_from(i, n);
        let geo = Pmf::geometric(1.0 / mean, Start::One, trunc)?;
        let d = distances(&w, &geo);
        Ok(BoundReport::new(
            "pa_fixed_vertex",
            &[("n", n as f64), ("i", i as f64), ("mean", mean)],
            Metric::Tv,
            d.tv,
            d.truncation_slack,
            Estimate::exact(f64::NAN),
            false,
            0.0,
        )
        .with_empirical_c(i as f64 * d.tv))
    })
    .into_iter()
    .collect()
}

/// Mixture versus Yule–Simon per `n` (soft, empirical `n·tv/log n`), plus
/// the exact averaging inequality `tv(mixture, Z) ≤ (1/n) Σ_i tv(W_{n,i}, Z)`.
pub fn pa_mixture_experiment(n_grid: &[usize], exec: Execution) -> Result<Vec<BoundReport>> {
    let ys = Pmf::yule_simon(YULE_WINDOW)?;
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let mut out = Vec::with_capacity(2 * grid.len());
    for n in grid {
        if n < 2 {
            return Err(Error::InvalidParameter(
                "mixture experiment needs n >= 2 (log n appears in the rate)".into(),
            ));
        }
        let laws = all_degrees(n, exec)?;
        let w = vec![1.0 / n as f64; n];
        let mix = Pmf::mixture_unchecked(&w, &laws);
        let d = distances(&mix, &ys);
        let per_vertex = exec.map(&laws, |l| distances(l, &ys));
        let avg_tv = per_vertex.iter().map(|x| x.tv).sum::<f64>() / n as f64;
        let avg_slack = per_vertex.iter().map(|x| x.truncation_slack).sum::<f64>() / n as f64;
        let params = [("n", n as f64)];
        out.push(
            BoundReport::new(
                "pa_mixture",
                &params,
                Metric::Tv,
                d.tv,
                d.truncation_slack,
                Estimate::exact(f64::NAN),
                false,
                0.0,
            )
            .with_empirical_c(n as f64 * d.tv / (n as f64).ln()),
        );
        out.push(BoundReport::new(
            "pa_mixture_averaging",
            &params,
            Metric::Tv,
            d.tv,
            d.truncation_slack + avg_slack,
            Estimate::exact(avg_tv),
            true,
            1e-12,
        ));
    }
    Ok(out)
}

/// One draw of the coupling behind the fixed-vertex bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PaCouplingDraw {
    /// Degree of `i` in the ordinary graph.
    pub w_tilde: i64,
    /// Degree of `i` in the graph built given `K = k` attaches to `i`.
    pub w_k: i64,
    pub k: i64,
    pub neq: bool,
}

/// Shared-uniform coupling of `W_{n,i}` with `W^K_{n,i}`, where
/// `W^K_{n,i} − 1` has the discrete equilibrium law of `W_{n,i} − 1`.
#[derive(Debug, Clone)]
pub struct PaCoupling {
    n: usize,
    i: usize,
    mean: f64,
    k_sampler: PmfSampler,
}

impl PaCoupling {
    pub fn new(n: usize, i: usize) -> Result<Self> {
        check(n, i)?;
        // E X_{k,i} = E W_{k−1,i} / (2k − 1), with E W_{i−1,i} = 1
        let weights: Vec<f64> = (i..=n)
            .map(|k| mean_from(i, k - 1) / (2 * k - 1) as f64)
            .collect();
        let k_law = Pmf::normalize(&weights, i as i64)?;
        Ok(Self {
            n,
            i,
            mean: mean_from(i, n),
            k_sampler: PmfSampler::new(&k_law)?,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn sample(&self, rng: &mut SeededRng) -> PaCouplingDraw {
        let k = self.k_sampler.sample(rng) as usize;
        let mut w = 1i64;
        let mut wt = 1i64;
        for j in self.i..=self.n {
            let u = rng.uniform();
            let odd = (2 * j - 1) as f64;
            wt += (u < wt as f64 / odd) as i64;
            w += match j.cmp(&k) {
                std::cmp::Ordering::Less => (u < w as f64 / (2 * j) as f64) as i64,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => (u < w as f64 / odd) as i64,
            };
        }
        PaCouplingDraw {
            w_tilde: wt,
            w_k: w,
            k: k as i64,
            neq: w != wt,
        }
    }

    pub fn samples(
        &self,
        rng: &SeededRng,
        reps: usize,
        shards: usize,
        exec: Execution,
    ) -> Vec<PaCouplingDraw> {
        exec.replicate(rng, reps, shards, |r| self.sample(r))
    }
}

/// Monte Carlo coupling bound `2(1−p) P(W̃ ≠ W^K)` against the exact
/// distance, per `i`.
pub fn pa_coupling_experiment(
    n: usize,
    i_grid: &[usize],
    rng: &SeededRng,
    reps: usize,
    shards: usize,
    exec: Execution,
) -> Result<Vec<BoundReport>> {
    let mut grid = i_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let mut out = Vec::with_capacity(grid.len());
    for i in grid {
        let c = PaCoupling::new(n, i)?;
        let draws = c.samples(&rng.split(i as u64), reps, shards, exec);
        let neq = Estimate::from_values(draws.iter().map(|d| d.neq as u8 as f64))?;
        let p = 1.0 / c.mean();
        let w = pa_degree_dist(n, i)?;
        let geo = Pmf::geometric(p, Start::One, Truncation::default())?;
        let d = distances(&w, &geo);
        let factor = mismatch_rhs(p, 1.0)?;
        out.push(
            BoundReport::new(
                "pa_coupling",
                &[
                    ("n", n as f64),
                    ("i", i as f64),
                    ("p", p),
                    ("prob_neq", neq.value),
                    ("reps", reps as f64),
                ],
                Metric::Tv,
                d.tv,
                d.truncation_slack,
                neq.scale(factor),
                true,
                0.0,
            )
            .with_empirical_c(i as f64 * neq.value),
        );
    }
    Ok(out)
}

/// Largest `|∫₀¹ (1−√u)^{k−1} √u du − 4/(k(k+1)(k+2))|` over `k = 1..=kmax`:
/// the Yule–Simon law is the `Ge(√U)` mixture.
pub fn yule_mixture_check(kmax: usize, quadrature_tol: f64) -> Result<f64> {
    if kmax == 0 {
        return Err(Error::InvalidParameter("kmax must be at least 1".into()));
    }
    let mut worst = 0.0f64;
    for k in 1..=kmax {
        let e = (k - 1) as i32;
        let v = integrate(|u| (1.0 - u.sqrt()).powi(e) * u.sqrt(), 0.0, 1.0, quadrature_tol)?;
        let kf = k as f64;
        worst = worst.max((v - 4.0 / (kf * (kf + 1.0) * (kf + 2.0))).abs());
    }
    Ok(worst)
}
