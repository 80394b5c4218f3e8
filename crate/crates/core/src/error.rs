use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("probability mass is empty (all entries zero)")]
    EmptyMass,

    #[error("negative or non-finite probability {value} at k = {k}")]
    BadProbability { k: i64, value: f64 },

    #[error("total mass {total} is not within 1e-12 of 1")]
    MassNotNormalized { total: f64 },

    #[error("support of {len} points exceeds the hard cap of {cap}")]
    SupportCap { len: usize, cap: usize },

    #[error("truncation budget exceeded: tail mass {tail} > {budget}")]
    TruncationBudget { tail: f64, budget: f64 },

    #[error("tail contribution to the moment of order {order} cannot be bounded")]
    TailUnbounded { order: u32 },

    #[error("pmf has no mass above zero")]
    NoPositiveMass,

    #[error("support violates precondition: {0}")]
    Support(String),

    #[error("length mismatch: {0} weights vs {1} components")]
    LengthMismatch(usize, usize),

    #[error("population exceeded cap of {0} individuals")]
    PopulationCap(u64),

    #[error("quadrature did not converge (estimated error {0:e})")]
    Quadrature(f64),

    #[error("empty sample set")]
    EmptySamples,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
