//! Solution of the geometric Stein equation
//!
//! ```text
//! q f(k) − f(k−1) = 1{k ∈ B} − Ge(p){B},   k ≥ 1,   f(0) = 0
//! ```
//!
//! evaluated from its closed form
//! `f(k) = Σ_{i∈B} q^{i−1} − Σ_{i∈B, i≥k+1} q^{i−k−1}` on a working window.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::pmf::{Truncation, DEFAULT_TRUNC_EPS};

#[derive(Debug, Clone)]
pub struct SteinSolution {
    target: BTreeSet<i64>,
    p: f64,
    values: Vec<f64>,
}

/// Default window end: `max(B) + ⌈log(1/ε) / (−log q)⌉`.
pub fn default_window(target: &BTreeSet<i64>, p: f64) -> usize {
    let top = target.iter().next_back().copied().unwrap_or(0).max(0) as usize;
    let q = 1.0 - p;
    if q <= 0.0 {
        return top.max(1);
    }
    let extra = ((1.0 / DEFAULT_TRUNC_EPS).ln() / -q.ln()).ceil();
    top + extra.max(1.0) as usize
}

/// Evaluates `f_{B,p}` on `0..=window`.
pub fn solve(target: &BTreeSet<i64>, p: f64, window: usize) -> Result<SteinSolution> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "geometric parameter must lie in (0,1], got {p}"
        )));
    }
    if window == 0 {
        return Err(Error::InvalidParameter("empty working window".into()));
    }
    if let Some(&lo) = target.iter().next() {
        if lo < 1 {
            return Err(Error::InvalidParameter(format!(
                "target set must contain positive integers only, found {lo}"
            )));
        }
    }
    if let Some(&hi) = target.iter().next_back() {
        if hi as usize > window {
            return Err(Error::InvalidParameter(format!(
                "window {window} does not reach max(B) = {hi}"
            )));
        }
    }
    if window > Truncation::default().support_cap {
        return Err(Error::SupportCap {
            len: window,
            cap: Truncation::default().support_cap,
        });
    }
    let q = 1.0 - p;
    let pow = |e: i64| -> f64 { q.powi(e as i32) };
    let total: f64 = target.iter().map(|&i| pow(i - 1)).sum();
    let values = (0..=window as i64)
        .map(|k| {
            let upper: f64 = target.range(k + 1..).map(|&i| pow(i - k - 1)).sum();
            total - upper
        })
        .collect();
    Ok(SteinSolution {
        target: target.clone(),
        p,
        values,
    })
}

/// Suprema of `|∇f|` and, for singleton targets, of `|f|` over the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientBounds {
    pub sup_grad: f64,
    pub sup_abs: Option<f64>,
}

impl SteinSolution {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn target(&self) -> &BTreeSet<i64> {
        &self.target
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn window(&self) -> usize {
        self.values.len() - 1
    }

    /// `Ge(p){B}`.
    pub fn target_mass(&self) -> f64 {
        let q = 1.0 - self.p;
        self.target
            .iter()
            .map(|&i| q.powi(i as i32 - 1) * self.p)
            .sum()
    }

    /// `q f(k) − f(k−1) − (1{k∈B} − Ge(p){B})` for `k = 1..=window`.
    pub fn residuals(&self) -> Vec<f64> {
        let q = 1.0 - self.p;
        let mass = self.target_mass();
        (1..self.values.len())
            .map(|k| {
                let ind = if self.target.contains(&(k as i64)) { 1.0 } else { 0.0 };
                q * self.values[k] - self.values[k - 1] - (ind - mass)
            })
            .collect()
    }

    /// Residuals of the shifted form
    /// `q f(k+1) − f(k) = 1{k ∈ B−1} − Ge⁰(p){B−1}`, `k = 0..window`.
    pub fn shifted_residuals(&self) -> Vec<f64> {
        let q = 1.0 - self.p;
        let mass0: f64 = self
            .target
            .iter()
            .map(|&i| q.powi(i as i32 - 1) * self.p)
            .sum();
        (0..self.values.len() - 1)
            .map(|k| {
                let ind = if self.target.contains(&(k as i64 + 1)) { 1.0 } else { 0.0 };
                q * self.values[k + 1] - self.values[k] - (ind - mass0)
            })
            .collect()
    }

    pub fn gradient_bounds(&self) -> GradientBounds {
        let sup_grad = self
            .values
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        let sup_abs = (self.target.len() == 1)
            .then(|| self.values.iter().map(|v| v.abs()).fold(0.0, f64::max));
        GradientBounds { sup_grad, sup_abs }
    }
}
