//! Geometric sums `W = X_1 + ... + X_N` with `N ~ Ge(a)` (positive
//! summands) or `M ~ Ge⁰(a)` (non-negative summands).

use crate::bounds::{
    c_constants, gsum_bounds, independent_mean_abs_diff, positive_coupling_rhs, BoundReport, CouplingSample,
    Estimate, Metric, Order,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pmf::{distances, Pmf, Start, Truncation};
use crate::rng::{PmfSampler, SeededRng};
use crate::transforms::{equilibrium_pos, mattner_from_sum, shift_overlap_u};

fn check_a(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "a must lie in (0,1], got {a}"
        )));
    }
    Ok(())
}

fn check_summand(x: &Pmf, start: Start) -> Result<()> {
    match start {
        Start::One if x.min_support() < 1 => Err(Error::Support(
            "summands of a Ge(a) sum must be positive".into(),
        )),
        Start::Zero if x.min_support() < 0 => Err(Error::Support(
            "summands of a Ge0(a) sum must be non-negative".into(),
        )),
        _ => Ok(()),
    }
}

/// Exact law of an i.i.d. geometric sum.
///
/// Conditioning on the first summand gives the renewal equations
///
/// ```text
/// start = One:  P_W = a P_X + (1−a) P_X * P_W
/// start = Zero: P_W = a δ₀  + (1−a) P_X * P_W
/// ```
///
/// which are solved forward in `k` until the stored mass reaches the mass
/// inherited from `X`'s window minus `trunc.eps`.
pub fn gsum_exact(x: &Pmf, a: f64, start: Start, trunc: Truncation) -> Result<Pmf> {
    check_a(a)?;
    check_summand(x, start)?;
    let m = x.window_mass();
    let q = 1.0 - a;
    // mass of W that the recursion can ever produce from X's window
    let reachable = match start {
        Start::One => a * m / (1.0 - q * m),
        Start::Zero => a / (1.0 - q * m),
    };
    let target = reachable - trunc.eps;

    let lo = x.min_support();
    let x0 = x.get(0);
    let denom = 1.0 - q * x0;
    let w_lo = match start {
        Start::One => lo,
        Start::Zero => 0,
    };
    let mut probs: Vec<f64> = Vec::new();
    let mut total = 0.0;
    let mut k = w_lo;
    loop {
        let mut conv = 0.0;
        for (j, xj) in x.iter() {
            if j < 1 {
                continue;
            }
            let idx = k - j - w_lo;
            if idx < 0 {
                break;
            }
            if let Some(&pw) = probs.get(idx as usize) {
                conv += xj * pw;
            }
        }
        let v = match start {
            Start::One => a * x.get(k) + q * conv,
            Start::Zero => ((if k == 0 { a } else { 0.0 }) + q * conv) / denom,
        };
        probs.push(v);
        total += v;
        if total >= target || (q == 0.0 && k >= x.max_support()) {
            break;
        }
        if probs.len() >= trunc.support_cap {
            return Err(Error::TruncationBudget {
                tail: 1.0 - total,
                budget: trunc.eps,
            });
        }
        k += 1;
    }
    let tail = (1.0 - total).max(0.0);
    Ok(Pmf::trimmed(w_lo, probs, tail))
}

/// Exact law of a geometric sum whose summands cycle through `laws`
/// (`X_i ~ laws[(i−1) mod L]`), as the mixture over `N` of incrementally
/// convolved partial sums.
pub fn gsum_exact_sequence(laws: &[Pmf], a: f64, start: Start, trunc: Truncation) -> Result<Pmf> {
    check_a(a)?;
    if laws.is_empty() {
        return Err(Error::InvalidParameter("no summand laws given".into()));
    }
    for x in laws {
        check_summand(x, start)?;
    }
    let q = 1.0 - a;
    let cap = trunc.support_cap as i64;
    let mut partial = Pmf::point(0);
    let mut weights = Vec::new();
    let mut comps = Vec::new();
    let mut n = 0usize;
    // P(N = n) for the current n and the mass of N not yet covered
    let (mut weight, mut remaining) = match start {
        Start::One => (0.0, 1.0),
        Start::Zero => (a, 1.0),
    };
    if start == Start::Zero {
        weights.push(weight);
        comps.push(partial.clone());
        remaining -= weight;
    }
    while remaining > trunc.eps && q > 0.0 || (q == 0.0 && comps.is_empty()) {
        let x = &laws[n % laws.len()];
        partial = partial.convolve_capped(x, cap);
        n += 1;
        weight = match start {
            Start::One => a * q.powi(n as i32 - 1),
            Start::Zero => a * q.powi(n as i32),
        };
        weights.push(weight);
        comps.push(partial.clone());
        remaining -= weight;
        if n > trunc.support_cap {
            return Err(Error::TruncationBudget {
                tail: remaining,
                budget: trunc.eps,
            });
        }
    }
    let mix = Pmf::mixture_unchecked(&weights, &comps);
    let tail = (1.0 - mix.window_mass()).max(0.0);
    Ok(Pmf::trimmed(mix.offset(), mix.probs().to_vec(), tail))
}

/// Equilibrium coupling for a positive geometric sum:
/// `Wᵉ = X_1 + ... + X_{N−1} + X_Nᵉ` with `X_Nᵉ` independent of `X_N`, except
/// that a summand law equal to its own equilibrium law uses `X_Nᵉ = X_N`.
#[derive(Debug, Clone)]
pub struct GsumCoupling {
    a: f64,
    mean: f64,
    u: Vec<f64>,
    samplers: Vec<PmfSampler>,
    eq_samplers: Vec<Option<PmfSampler>>,
}

/// Tolerance for treating a law as its own equilibrium law.
const FIXED_POINT_TOL: f64 = 1e-10;

fn is_fixed_point(x: &Pmf, xe: &Pmf) -> bool {
    distances(x, xe).tv_upper() <= FIXED_POINT_TOL
}

impl GsumCoupling {
    pub fn new(laws: &[Pmf], a: f64) -> Result<Self> {
        check_a(a)?;
        if laws.is_empty() {
            return Err(Error::InvalidParameter("no summand laws given".into()));
        }
        let mut mean = None;
        let mut u = Vec::with_capacity(laws.len());
        let mut samplers = Vec::with_capacity(laws.len());
        let mut eq_samplers = Vec::with_capacity(laws.len());
        for x in laws {
            check_summand(x, Start::One)?;
            let m = x.mean()?;
            let first = *mean.get_or_insert(m);
            if (m - first).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "summand means differ: {first} vs {m}"
                )));
            }
            u.push(shift_overlap_u(x));
            samplers.push(PmfSampler::new(x)?);
            let xe = equilibrium_pos(x)?;
            eq_samplers.push(if is_fixed_point(x, &xe) {
                None
            } else {
                Some(PmfSampler::new(&xe)?)
            });
        }
        Ok(Self {
            a,
            mean: mean.unwrap(),
            u,
            samplers,
            eq_samplers,
        })
    }

    /// Parameter `a/μ` of the approximating geometric law.
    pub fn p(&self) -> f64 {
        self.a / self.mean
    }

    /// `Σ u_i` over summands `first..first+count` (0-based, cyclic).
    fn u_sum(&self, first: u64, count: u64) -> f64 {
        let len = self.u.len() as u64;
        let cycle: f64 = self.u.iter().sum();
        let full = count / len;
        let rest = count % len;
        let mut s = full as f64 * cycle;
        for i in 0..rest {
            s += self.u[((first + i) % len) as usize];
        }
        s
    }

    /// Upper bound on `S₁` of a sum with overlap total `u`.
    fn s1_bound(u: f64) -> f64 {
        (2.0 * mattner_from_sum(u)).min(2.0)
    }

    pub fn sample(&self, rng: &mut SeededRng) -> CouplingSample {
        let n = rng.geometric_pos(self.a);
        let len = self.samplers.len() as u64;
        let mut base = 0i64;
        for i in 0..n - 1 {
            base += self.samplers[(i % len) as usize].sample(rng);
        }
        let last = ((n - 1) % len) as usize;
        let x_n = self.samplers[last].sample(rng);
        let x_e = match &self.eq_samplers[last] {
            Some(s) => s.sample(rng),
            None => x_n,
        };
        // S(Wᵉ | N, X_N, X_Nᵉ) is the smoothness of the first N−1 summands
        let before = n - 1;
        let s1 = Self::s1_bound(self.u_sum(0, before));
        let half = before / 2;
        let s2 = (Self::s1_bound(self.u_sum(0, half))
            * Self::s1_bound(self.u_sum(half, before - half)))
        .min(4.0);
        CouplingSample::new(base + x_n, base + x_e, s1, s2, true)
    }

    pub fn samples(
        &self,
        rng: &SeededRng,
        reps: usize,
        shards: usize,
        exec: Execution,
    ) -> Vec<CouplingSample> {
        exec.replicate(rng, reps, shards, |r| self.sample(r))
    }
}

/// `(E|X − Xᵉ|, E X²)` for one positive summand law under the coupling used
/// by [`GsumCoupling`].
pub fn summand_coupling_moments(x: &Pmf) -> Result<(f64, f64)> {
    let xe = equilibrium_pos(x)?;
    let abs_d = if is_fixed_point(x, &xe) {
        0.0
    } else {
        independent_mean_abs_diff(x, &xe)
    };
    Ok((abs_d, x.moment(2)?.total()))
}

/// Exact-versus-bound reports for i.i.d. positive summands: the first
/// inequality (`C_l sup E|X − Xᵉ|`) and the moment form.
///
/// The coupling form needs `u > 0`; a lattice summand (`u = 0`) only gets
/// the moment form, with the constants at their `u → 0` value 1.
pub fn gsum_dominance(name: &str, x: &Pmf, a: f64) -> Result<Vec<BoundReport>> {
    let mu = x.mean()?;
    let (abs_d, mu2) = summand_coupling_moments(x)?;
    let u = shift_overlap_u(x);
    let w = gsum_exact(x, a, Start::One, Truncation::default())?;
    let p = a / mu;
    let geo = Pmf::geometric(p, Start::One, Truncation::default())?;
    let d = distances(&w, &geo);
    let params = [("a", a), ("mu", mu), ("mu2", mu2), ("u", u), ("p", p)];
    let rep = |t: &str, metric: Metric, lhs: f64, rhs: f64| {
        BoundReport::new(
            format!("{t}_{name}"),
            &params,
            metric,
            lhs,
            d.truncation_slack,
            Estimate::exact(rhs),
            true,
            1e-12,
        )
    };
    let mut out = Vec::with_capacity(4);
    if u > 0.0 {
        let (c1, c2) = c_constants(a, u)?;
        let b = gsum_bounds(a, u, mu, mu2, true)?;
        out.push(rep("gsum_tv_coupling", Metric::Tv, d.tv, c1 * abs_d));
        out.push(rep("gsum_local_coupling", Metric::Local, d.local, c2 * abs_d));
        out.push(rep("gsum_tv_moment", Metric::Tv, d.tv, b.rhs_tv));
        out.push(rep("gsum_local_moment", Metric::Local, d.local, b.rhs_local));
    } else {
        let f = mu2 / 2.0 + 0.5 + mu;
        out.push(rep("gsum_tv_moment", Metric::Tv, d.tv, f));
        out.push(rep("gsum_local_moment", Metric::Local, d.local, f));
    }
    Ok(out)
}

/// Non-negative counterpart of [`gsum_dominance`]: `W` against
/// `Ge⁰(a/(a + μ(1−a)))`, bounded by `C_l E X^{e₀} = C_l (μ₂/(2μ) − ½)`.
pub fn gsum_dominance_nonneg(name: &str, x: &Pmf, a: f64) -> Result<Vec<BoundReport>> {
    let mu = x.mean()?;
    let mu2 = x.moment(2)?.total();
    let u = shift_overlap_u(x);
    let w = gsum_exact(x, a, Start::Zero, Truncation::default())?;
    let p = a / (a + mu * (1.0 - a));
    let geo = Pmf::geometric(p, Start::Zero, Truncation::default())?;
    let d = distances(&w, &geo);
    let (rhs_tv, rhs_local) = if u > 0.0 {
        let b = gsum_bounds(a, u, mu, mu2, false)?;
        (b.rhs_tv, b.rhs_local)
    } else {
        let f = (mu2 / (2.0 * mu) - 0.5).max(0.0);
        (f, f)
    };
    let params = [("a", a), ("mu", mu), ("mu2", mu2), ("u", u), ("p", p)];
    let rep = |t: &str, metric: Metric, lhs: f64, rhs: f64| {
        BoundReport::new(
            format!("{t}_{name}"),
            &params,
            metric,
            lhs,
            d.truncation_slack,
            Estimate::exact(rhs),
            true,
            1e-12,
        )
    };
    Ok(vec![
        rep("gsum0_tv", Metric::Tv, d.tv, rhs_tv),
        rep("gsum0_local", Metric::Local, d.local, rhs_local),
    ])
}

/// Bernoulli closure: `Ge⁰(a)` many `Bern(μ)` summands are `Ge⁰(a/(a+μ(1−a)))`.
pub fn gsum_bernoulli_closure(a: f64, mu: f64) -> Result<BoundReport> {
    let x = Pmf::bernoulli(mu)?;
    let w = gsum_exact(&x, a, Start::Zero, Truncation::default())?;
    let p = a / (a + mu * (1.0 - a));
    let geo = Pmf::geometric(p, Start::Zero, Truncation::default())?;
    let d = distances(&w, &geo);
    Ok(BoundReport::new(
        "gsum_bernoulli_closure",
        &[("a", a), ("mu", mu), ("p", p)],
        Metric::Tv,
        d.tv,
        d.truncation_slack,
        Estimate::exact(1e-10),
        true,
        0.0,
    ))
}

/// Monte Carlo evaluation of the coupling bound next to the exact distance,
/// for summands cycling through `laws`.
pub fn gsum_coupling_report(
    name: &str,
    laws: &[Pmf],
    a: f64,
    rng: &SeededRng,
    reps: usize,
    shards: usize,
    exec: Execution,
) -> Result<Vec<BoundReport>> {
    let coupling = GsumCoupling::new(laws, a)?;
    let p = coupling.p();
    let samples = coupling.samples(rng, reps, shards, exec);
    let w = gsum_exact_sequence(laws, a, Start::One, Truncation::default())?;
    let geo = Pmf::geometric(p, Start::One, Truncation::default())?;
    let d = distances(&w, &geo);
    let params = [("a", a), ("p", p), ("reps", reps as f64)];
    let mut out = Vec::new();
    for order in [Order::First, Order::Second] {
        let est = positive_coupling_rhs(&samples, order)?;
        let lhs = match order {
            Order::First => d.tv,
            Order::Second => d.local,
        };
        out.push(BoundReport::new(
            format!("gsum_mc_{}_{name}", order.metric().as_str()),
            &params,
            order.metric(),
            lhs,
            d.truncation_slack,
            est,
            true,
            0.0,
        ));
    }
    Ok(out)
}
