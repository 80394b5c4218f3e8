//! Geometric approximation in total variation through discrete equilibrium
//! couplings.
//!
//! The crate is organised bottom-up:
//!
//! * [`pmf`]: finite-window integer laws with explicit truncation mass, and
//!   the total variation / Kolmogorov / local distances between them.
//! * [`transforms`]: size-bias and discrete equilibrium transforms, the
//!   smoothness functionals and the shift-overlap bound for sums.
//! * [`stein`]: the geometric Stein equation and its closed-form solution.
//! * [`bounds`]: right-hand sides of the approximation bounds, reports, and
//!   exact validity checks.
//! * [`models`]: geometric sums, critical Galton–Watson, uniform and
//!   preferential attachment, with exact laws and coupled samplers.
//! * [`exec`] / [`rng`]: seeded, shard-parallel Monte Carlo plumbing.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod exec;
pub mod models;
pub mod pmf;
pub mod quad;
pub mod rng;
pub mod stein;
pub mod transforms;

pub use error::{Error, Result};
/// Library version, recorded in experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use exec::Execution;
pub use pmf::{distances, DistanceTriple, Pmf, Start, Truncation};
pub use rng::SeededRng;
