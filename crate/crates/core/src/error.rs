use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Two objects that must share an alphabet do not.
    #[error("alphabet size mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    /// A numeric parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// An exact computation would exceed its enumeration budget.
    #[error("enumeration of {outcomes:.3e} outcomes exceeds the cap of {cap}")]
    Resource { outcomes: f64, cap: u64 },

    /// A dataset contains a symbol with zero mass under both hypotheses.
    #[error("symbol {symbol} has zero probability under both hypotheses")]
    ImpossibleSample { symbol: usize },

    /// A geometric construction has no solution for the given direction.
    #[error("degenerate direction: mu^2 = {mu_sq} must be below K = {dims}")]
    DegenerateDirection { mu_sq: f64, dims: usize },

    /// A least-squares fit cannot be computed.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// Inconsistent experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
