use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A direct summation would exceed the configured term budget.
    #[error("budget exceeded: {needed} terms needed, limit is {limit}")]
    Budget { needed: u128, limit: u64 },

    /// A theorem hypothesis (multiplicativity class, h = one, a-range) does
    /// not hold for the supplied instance.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A real-valued function reached a pipeline that requires exact
    /// rational arithmetic.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    /// Text-grammar parse failure; `pos` is a byte offset into the input.
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    /// Invalid verifier or CLI configuration.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
