use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("convexity lost at sample {index} (h + h'' = {value:e})")]
    ConvexityLost { index: usize, value: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("step rejected: {0}")]
    StepRejected(String),
    #[error("extinction reached at t = {time}")]
    ExtinctionReached { time: f64 },
    #[error("integration failure: {0}")]
    IntegrationFailure(String),
    #[error("insufficient history: need t <= {needed}, earliest frame at {available}")]
    InsufficientHistory { needed: f64, available: f64 },
    #[error("point ({0}, {1}) is never swept by the flow")]
    OutOfSweep(f64, f64),
    #[error("stencil failure: {0}")]
    StencilFailure(String),
    #[error("degenerate gradient |Du| = {0:e}")]
    DegenerateGradient(f64),
    #[error("flow is not slab-like (blow-down label {0})")]
    NotSlabLike(String),
    #[error("insufficient profile: {0}")]
    InsufficientProfile(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}
