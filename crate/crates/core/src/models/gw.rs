//! Critical Galton–Watson processes conditioned on survival.

use crate::bounds::{BoundReport, Estimate, Metric};
use crate::error::{Error, Result};
use crate::pmf::{distances, shift_tv, Pmf, Start, Truncation};
use crate::rng::{PmfSampler, SeededRng};
use crate::transforms::size_bias;

/// Tail budget used when the window is chosen adaptively.
pub const DEFAULT_TAIL_BUDGET: f64 = 1e-9;
/// Largest window the adaptive search will try.
pub const MAX_WINDOW: i64 = 1 << 14;
/// Live-population cap for the spine sampler.
pub const POPULATION_CAP: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct OffspringLaw {
    pmf: Pmf,
    mean: f64,
    variance: f64,
    smooth: bool,
}

impl OffspringLaw {
    pub fn new(pmf: Pmf) -> Result<Self> {
        if pmf.min_support() < 0 {
            return Err(Error::Support("offspring counts must be non-negative".into()));
        }
        if pmf.tail_mass() > 0.0 {
            return Err(Error::InvalidParameter(
                "offspring law must be given without truncated tail".into(),
            ));
        }
        let mean: f64 = pmf.iter().map(|(k, p)| k as f64 * p).sum();
        let second: f64 = pmf.iter().map(|(k, p)| (k * k) as f64 * p).sum();
        let smooth = shift_tv(&pmf) < 1.0;
        Ok(Self {
            mean,
            variance: second - mean * mean,
            smooth,
            pmf,
        })
    }

    pub fn pmf(&self) -> &Pmf {
        &self.pmf
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn smooth(&self) -> bool {
        self.smooth
    }

    pub fn require_critical(&self) -> Result<()> {
        if (self.mean - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "offspring not critical: mean = {}",
                self.mean
            )));
        }
        Ok(())
    }
}

/// Law of `Z_n` on `0..=k_cap`; mass above `k_cap` goes to the tail.
pub fn gw_generation(offspring: &OffspringLaw, n: usize, k_cap: i64) -> Result<Pmf> {
    if k_cap < 1 {
        return Err(Error::InvalidParameter("window cap must be positive".into()));
    }
    let mut law = Pmf::point(1);
    if n == 0 {
        return Ok(law);
    }
    let off = offspring.pmf();
    // powers[m] = offspring^{*m} on 0..=k_cap
    let mut powers: Vec<Pmf> = vec![Pmf::point(0)];
    for _ in 0..n {
        let top = law.max_support();
        while (powers.len() as i64) <= top {
            let next = powers.last().unwrap().convolve_capped(off, k_cap);
            powers.push(next);
        }
        let mut probs = vec![0.0; k_cap as usize + 1];
        let mut tail = law.tail_mass();
        for (m, pm) in law.iter() {
            if pm == 0.0 {
                continue;
            }
            let pw = &powers[m as usize];
            for (k, v) in pw.iter() {
                probs[k as usize] += pm * v;
            }
            tail += pm * pw.tail_mass();
        }
        law = Pmf::trimmed(0, probs, tail.min(1.0));
    }
    Ok(law)
}

/// Starting window for the adaptive search: a multiple of
/// `E(Z_n | Z_n > 0) ≈ σ² n / 2` large enough for an exponential tail to
/// fall below `budget`.
fn initial_window(offspring: &OffspringLaw, n: usize, budget: f64) -> i64 {
    let scale = offspring.variance() * n as f64 / 2.0 + 1.0;
    let w = scale * ((1.0 / budget).ln() + 3.0) + offspring.pmf().max_support() as f64;
    (w.ceil() as i64).clamp(8, MAX_WINDOW)
}

/// [`gw_generation`] with the window doubled until the tail is within
/// `budget`.
pub fn gw_generation_adaptive(offspring: &OffspringLaw, n: usize, budget: f64) -> Result<Pmf> {
    let mut k = initial_window(offspring, n, budget);
    loop {
        let law = gw_generation(offspring, n, k)?;
        if law.tail_mass() <= budget {
            return Ok(law);
        }
        if k >= MAX_WINDOW {
            return Err(Error::TruncationBudget {
                tail: law.tail_mass(),
                budget,
            });
        }
        k = (2 * k).min(MAX_WINDOW);
    }
}

/// `d_TV(L(Z_n | Z_n > 0), Ge(2/(σ² n)))` per `n`, reported softly with the
/// empirical constant `tv · n^{1/4} / log n`.
pub fn gw_tv_experiment(
    offspring: &OffspringLaw,
    n_grid: &[usize],
    budget: f64,
    trunc: Truncation,
) -> Result<Vec<BoundReport>> {
    offspring.require_critical()?;
    let s2 = offspring.variance();
    if !(s2 > 0.0) {
        return Err(Error::InvalidParameter(
            "offspring variance must be positive".into(),
        ));
    }
    let mut grid = n_grid.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let mut out = Vec::with_capacity(grid.len());
    for n in grid {
        let p = 2.0 / (s2 * n as f64);
        if !(p > 0.0 && p <= 1.0) || n < 2 {
            return Err(Error::InvalidParameter(format!(
                "need n >= 2 and 2/(σ² n) <= 1, got n = {n}, σ² = {s2}"
            )));
        }
        let z = gw_generation_adaptive(offspring, n, budget)?;
        let cond = z.condition_positive()?;
        let geo = Pmf::geometric(p, Start::One, trunc)?;
        let d = distances(&cond, &geo);
        let nf = n as f64;
        out.push(
            BoundReport::new(
                "gw_survival",
                &[
                    ("n", nf),
                    ("sigma2", s2),
                    ("p", p),
                    ("survival", 1.0 - z.get(0) - z.tail_mass()),
                ],
                Metric::Tv,
                d.tv,
                d.truncation_slack + z.tail_mass(),
                Estimate::exact(f64::NAN),
                false,
                0.0,
            )
            .with_empirical_c(d.tv * nf.powf(0.25) / nf.ln()),
        );
    }
    Ok(out)
}

/// Generation-`n` size of the size-biased tree, split at the spine vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpineSample {
    pub s_n: u64,
    pub l_n: u64,
    /// Includes the spine vertex `v_n`.
    pub r_n: u64,
}

/// Simulates the size-biased tree along its spine.
#[derive(Debug, Clone)]
pub struct GwSpine {
    offspring: PmfSampler,
    biased: PmfSampler,
    n: usize,
}

impl GwSpine {
    pub fn new(offspring: &OffspringLaw, n: usize) -> Result<Self> {
        offspring.require_critical()?;
        Ok(Self {
            offspring: PmfSampler::new(offspring.pmf())?,
            biased: PmfSampler::new(&size_bias(offspring.pmf())?)?,
            n,
        })
    }

    /// Generation-`gens` size of a GW forest started from `roots` individuals.
    fn forest(&self, roots: u64, gens: usize, rng: &mut SeededRng) -> Result<u64> {
        let mut pop = roots;
        for _ in 0..gens {
            if pop == 0 {
                break;
            }
            let mut next = 0u64;
            for _ in 0..pop {
                next += self.offspring.sample(rng) as u64;
            }
            if next > POPULATION_CAP {
                return Err(Error::PopulationCap(POPULATION_CAP));
            }
            pop = next;
        }
        Ok(pop)
    }

    pub fn sample(&self, rng: &mut SeededRng) -> Result<SpineSample> {
        let mut l_n = 0u64;
        let mut r_n = 1u64;
        for j in 0..self.n {
            let c = self.biased.sample(rng) as u64;
            let pos = (rng.uniform() * c as f64) as u64;
            let pos = pos.min(c - 1);
            let remaining = self.n - j - 1;
            l_n += self.forest(pos, remaining, rng)?;
            r_n += self.forest(c - 1 - pos, remaining, rng)?;
        }
        Ok(SpineSample {
            s_n: l_n + r_n,
            l_n,
            r_n,
        })
    }

    pub fn samples(
        &self,
        rng: &SeededRng,
        reps: usize,
        shards: usize,
        exec: crate::exec::Execution,
    ) -> Result<Vec<SpineSample>> {
        exec.replicate(rng, reps, shards, |r| self.sample(r))
            .into_iter()
            .collect()
    }
}
