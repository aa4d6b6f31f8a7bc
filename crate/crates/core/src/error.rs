use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum WaveError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid symbol `{name}`: {reason}")]
    InvalidSymbol { name: String, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("singular Jacobian (fold point): smallest |eigenvalue| {smallest:.3e} vs norm {norm:.3e}")]
    FoldPoint { smallest: f64, norm: f64 },

    #[error("Newton iteration diverged after {iterations} iterations, last residual {residual:.3e}")]
    Divergence { iterations: usize, residual: f64 },

    #[error("continuation failed at stencil point ({i}, {j}): {source}")]
    Continuation {
        i: i32,
        j: i32,
        #[source]
        source: Box<WaveError>,
    },

    #[error("degenerate constraint: {0}")]
    DegenerateConstraint(String),

    #[error("bad seed: {0}")]
    BadSeed(String),

    #[error("non-finite state at t = {time}")]
    BlowUp { time: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, WaveError>;
