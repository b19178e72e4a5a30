use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate vector has odd length {0}")]
    OddLength(usize),

    #[error("dimension must be at least 1")]
    ZeroDimension,

    #[error("point must lie strictly inside the unit ball (norm {0})")]
    NotInterior(f64),

    #[error("point lies outside the closed unit ball (norm {0})")]
    OutsideBall(f64),

    #[error("point is not on the unit sphere (norm {0})")]
    NotOnSphere(f64),

    #[error("direction is not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("Möbius involution hits its pole (1 - <z,a> = 0)")]
    Singular,

    #[error("radius {0} is beyond the default evaluation limit; enable near-boundary evaluation to override")]
    NearBoundary(f64),

    #[error("finite-difference stencil leaves the ball")]
    StencilOutside,

    #[error("non-finite integrand value at node {0}")]
    NonFinite(usize),

    #[error("boundary value {value} at node {node} exceeds the declared bound {bound}")]
    SupBoundExceeded { node: usize, value: f64, bound: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
