#![allow(dead_code)]

use geostein::{Pmf, SeededRng};
use rand::Rng;

/// Random law on `offset..offset+len` (`len ≤ max_len`) with mass at both
/// ends and about a fifth of the interior set to zero.
pub fn random_pmf(rng: &mut SeededRng, offset: i64, max_len: usize) -> Pmf {
    let len = rng.random_range(1..=max_len);
    let raw: Vec<f64> = (0..len)
        .map(|k| {
            let interior = k != 0 && k + 1 != len;
            if interior && rng.random_bool(0.2) {
                0.0
            } else {
                rng.random_range(0.05..1.0)
            }
        })
        .collect();
    Pmf::normalize(&raw, offset).unwrap()
}

/// Empirical law of integer draws.
pub fn empirical(values: impl IntoIterator<Item = i64>) -> Pmf {
    let values: Vec<i64> = values.into_iter().collect();
    let lo = *values.iter().min().unwrap();
    let hi = *values.iter().max().unwrap();
    let mut counts = vec![0.0; (hi - lo + 1) as usize];
    for v in values {
        counts[(v - lo) as usize] += 1.0;
    }
    Pmf::normalize(&counts, lo).unwrap()
}

/// `Σ_s Pˢ(s) · uniform{lo(s)..=hi(s)}`.
pub fn uniform_mixture(sb: &Pmf, bounds: impl Fn(i64) -> (i64, i64)) -> Pmf {
    let weights: Vec<f64> = sb.probs().to_vec();
    let comps: Vec<Pmf> = sb
        .iter()
        .map(|(s, _)| {
            let (lo, hi) = bounds(s);
            Pmf::uniform(lo, hi.max(lo)).unwrap()
        })
        .collect();
    let nonzero: Vec<(f64, Pmf)> = weights
        .into_iter()
        .zip(comps)
        .filter(|(w, _)| *w > 0.0)
        .collect();
    let (w, c): (Vec<f64>, Vec<Pmf>) = nonzero.into_iter().unzip();
    Pmf::mixture(&w, &c).unwrap()
}
