use thiserror::Error;

/// Which of two price vectors handed to a checker failed to clear the market.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PriceArg {
    First,
    Second,
}

impl std::fmt::Display for PriceArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PriceArg::First => f.write_str("first"),
            PriceArg::Second => f.write_str("second"),
        }
    }
}

/// Indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("valuation matrix must be square and non-empty: {0}")]
    NotSquare(String),

    #[error("valuation v[{buyer},{product}] = {value} is negative")]
    NegativeValuation {
        buyer: usize,
        product: usize,
        value: String,
    },

    #[error("dimension mismatch: expected length {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what} {index} is out of range for a market of size {n}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        n: usize,
    },

    #[error("matching reuses {what} {index}")]
    InvalidMatching { what: &'static str, index: usize },

    #[error("matching has {size} pairs but the market has {n} buyers")]
    NotPerfect { size: usize, n: usize },

    #[error("alpha = {0} is outside [0, 1]")]
    AlphaOutOfRange(String),

    #[error("brute-force oracle is capped at n = {cap}, got n = {n}")]
    OracleCapExceeded { n: usize, cap: usize },

    #[error("the {0} price vector is not market-clearing")]
    NotClearing(PriceArg),
}
