//! The four applications: geometric sums, critical Galton–Watson,
//! uniform attachment and preferential attachment.

pub mod gsum;
pub mod gw;
pub mod pa;
pub mod ua;
