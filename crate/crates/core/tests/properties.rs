mod common;

use std::collections::BTreeSet;

use geostein::pmf::shift_tv;
use geostein::stein::{default_window, solve};
use geostein::transforms::{
    equilibrium_nonneg, equilibrium_pos, mattner_bound, shift_overlap_u, size_bias,
};
use geostein::{distances, Pmf, SeededRng};
use proptest::prelude::*;
use rand::Rng;

use common::{random_pmf, uniform_mixture};

fn pmf_strategy(offset: std::ops::RangeInclusive<i64>, max_len: usize) -> impl Strategy<Value = Pmf> {
    (offset, prop::collection::vec(0.0f64..1.0, 1..=max_len)).prop_filter_map(
        "needs positive mass",
        |(off, mut raw)| {
            raw[0] += 0.01;
            Pmf::normalize(&raw, off).ok()
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kolmogorov_and_local_below_tv(p in pmf_strategy(-5..=5, 15), q in pmf_strategy(-5..=5, 15)) {
        let d = distances(&p, &q);
        prop_assert!(d.kolmogorov <= d.tv + 1e-15);
        prop_assert!(d.local <= d.tv + 1e-15);
    }

    #[test]
    fn tv_is_a_metric(
        p in pmf_strategy(0..=4, 10),
        q in pmf_strategy(0..=4, 10),
        r in pmf_strategy(0..=4, 10),
    ) {
        let pq = distances(&p, &q).tv;
        prop_assert!((pq - distances(&q, &p).tv).abs() <= 1e-15);
        prop_assert!(pq <= distances(&p, &r).tv + distances(&r, &q).tv + 1e-14);
        prop_assert!(distances(&p, &p).tv == 0.0);
    }

    #[test]
    fn convolution_commutes_and_associates(
        p in pmf_strategy(-3..=3, 8),
        q in pmf_strategy(-3..=3, 8),
        r in pmf_strategy(-3..=3, 8),
    ) {
        let pq = p.convolve(&q, 100).unwrap();
        let qp = q.convolve(&p, 100).unwrap();
        prop_assert!(distances(&pq, &qp).tv <= 1e-12);
        let left = pq.convolve(&r, 100).unwrap();
        let right = p.convolve(&q.convolve(&r, 100).unwrap(), 100).unwrap();
        prop_assert!(distances(&left, &right).tv <= 1e-12);
    }

    #[test]
    fn means_add_under_convolution(p in pmf_strategy(-3..=6, 12), q in pmf_strategy(-3..=6, 12)) {
        let s = p.convolve(&q, 100).unwrap();
        let lhs = s.moment(1).unwrap().total();
        let rhs = p.moment(1).unwrap().total() + q.moment(1).unwrap().total();
        prop_assert!((lhs - rhs).abs() <= 1e-10);
    }

    #[test]
    fn mixture_tv_is_at_most_average_tv(
        comps in prop::collection::vec(pmf_strategy(0..=3, 8), 1..5),
        target in pmf_strategy(0..=3, 8),
        raw_w in prop::collection::vec(0.01f64..1.0, 5),
    ) {
        let w: Vec<f64> = raw_w[..comps.len()].to_vec();
        let total: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / total).collect();
        let mix = Pmf::mixture(&w, &comps).unwrap();
        let lhs = distances(&mix, &target).tv;
        let rhs: f64 = w.iter().zip(&comps).map(|(wi, c)| wi * distances(c, &target).tv).sum();
        prop_assert!(lhs <= rhs + 1e-14);
    }

    #[test]
    fn equilibrium_is_size_bias_then_uniform(p in pmf_strategy(1..=4, 20)) {
        let via_sb = uniform_mixture(&size_bias(&p).unwrap(), |s| (1, s));
        prop_assert!(distances(&equilibrium_pos(&p).unwrap(), &via_sb).tv <= 1e-12);
    }

    #[test]
    fn nonneg_equilibrium_is_size_bias_then_uniform(p in pmf_strategy(0..=0, 20)) {
        prop_assume!(p.max_support() > 0);
        let via_sb = uniform_mixture(&size_bias(&p).unwrap(), |s| (0, s - 1));
        prop_assert!(distances(&equilibrium_nonneg(&p).unwrap(), &via_sb).tv <= 1e-12);
    }

    #[test]
    fn equilibrium_is_smooth_at_scale_of_mean(p in pmf_strategy(1..=10, 20)) {
        let e = equilibrium_pos(&p).unwrap();
        prop_assert!(shift_tv(&e) <= 1.0 / p.mean().unwrap() + 1e-12);
    }

    #[test]
    fn positive_mixture_identity(p in pmf_strategy(0..=0, 15)) {
        prop_assume!(p.max_support() > 0);
        let prob = 1.0 / (1.0 + p.mean().unwrap());
        let up = p.shift(1);
        let rhs = Pmf::mixture(
            &[prob, 1.0 - prob],
            &[up.clone(), equilibrium_nonneg(&p).unwrap().shift(1)],
        ).unwrap();
        prop_assert!(distances(&equilibrium_pos(&up).unwrap(), &rhs).tv <= 1e-10);
    }

    #[test]
    fn shift_overlap_bound_dominates(laws in prop::collection::vec(pmf_strategy(-2..=2, 5), 1..=8)) {
        let mut sum = Pmf::point(0);
        let mut us = Vec::new();
        for x in &laws {
            us.push(shift_overlap_u(x));
            sum = sum.convolve(x, 1000).unwrap();
        }
        prop_assert!(shift_tv(&sum) <= mattner_bound(&us).unwrap() + 1e-12);
    }

    #[test]
    fn stein_solution_identities(
        b in prop::collection::btree_set(1i64..=40, 0..12),
        p in 0.01f64..=1.0,
    ) {
        let s = solve(&b, p, default_window(&b, p)).unwrap();
        prop_assert!(s.residuals().iter().all(|r| r.abs() <= 1e-12));
        prop_assert!(s.shifted_residuals().iter().all(|r| r.abs() <= 1e-12));
        let g = s.gradient_bounds();
        prop_assert!(g.sup_grad <= 1.0 + 1e-12);
        if let Some(a) = g.sup_abs {
            prop_assert!(a <= 1.0 + 1e-12);
        }
    }
}

/// `E f(X) − f(0) = E X · E ∇f(Xᵉ)` and `E f(X) − f(0) = E X · E Δf(X^{e₀})`
/// for random laws and random bounded test functions.
#[test]
fn defining_identities_hold_for_test_functions() {
    let mut rng = SeededRng::new(77);
    for _ in 0..50 {
        let pos = random_pmf(&mut rng, 1, 15);
        let nonneg = random_pmf(&mut rng, 0, 15);
        let e = equilibrium_pos(&pos).unwrap();
        let e0 = (nonneg.max_support() > 0).then(|| equilibrium_nonneg(&nonneg).unwrap());
        for _ in 0..20 {
            let f: Vec<f64> = (0..=20).map(|_| rng.random_range(-1.0..1.0)).collect();
            let ev = |law: &Pmf, g: &dyn Fn(i64) -> f64| law.iter().map(|(k, v)| v * g(k)).sum::<f64>();

            let lhs = ev(&pos, &|k| f[k as usize]) - f[0];
            let rhs = pos.mean().unwrap() * ev(&e, &|k| f[k as usize] - f[k as usize - 1]);
            assert!((lhs - rhs).abs() <= 1e-9, "{lhs} vs {rhs}");

            if let Some(e0) = &e0 {
                let lhs = ev(&nonneg, &|k| f[k as usize]) - f[0];
                let rhs = nonneg.mean().unwrap() * ev(e0, &|k| f[k as usize + 1] - f[k as usize]);
                assert!((lhs - rhs).abs() <= 1e-9, "{lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn singleton_targets_over_a_grid() {
    for k in 1..=25 {
        for p in [0.01, 0.1, 0.5, 0.99, 1.0] {
            let b: BTreeSet<i64> = [k].into();
            let s = solve(&b, p, default_window(&b, p)).unwrap();
            assert!(s.gradient_bounds().sup_abs.unwrap() <= 1.0 + 1e-12);
        }
    }
}
