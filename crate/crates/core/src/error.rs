use thiserror::Error;

use crate::quantization::QuantizerCodebook;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("noise power must be positive and finite, got {0}")]
    InvalidNoisePower(f64),

    #[error("branch SNR profile contains non-finite or negative entries")]
    InvalidProfile,

    #[error("power budget is defined for b_bar >= 1, got {0}")]
    InvalidBudgetBits(u32),

    /// Lloyd iteration ran out of iterations; the last iterate is attached so
    /// callers can inspect how far it got.
    #[error("Lloyd-Max did not reach tol {tol} within {max_iter} iterations (last change {last_change:.3e})")]
    LloydMaxNoConvergence {
        tol: f64,
        max_iter: usize,
        last_change: f64,
        last_iterate: Box<QuantizerCodebook>,
    },

    #[error("no {0}-bit codebook available from this bank")]
    MissingCodebook(u32),

    #[error("relative trade-off is undefined at integer b_hat = {0}")]
    IntegerTradeoffPoint(f64),

    #[error("bisection could not bracket the budget multiplier")]
    BracketFailure,

    #[error("brute-force search space of {size} allocations exceeds cap {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    #[error("reducible set exhausted while total power still exceeds the budget")]
    BudgetUnreachable,

    #[error("effective channel is rank deficient: {active} active branches for {users} users")]
    RankDeficient { active: usize, users: usize },

    #[error("EVM reference vector has zero norm")]
    ZeroReference,

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
