//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An argument is outside the supported integer range; computing with it
    /// would overflow or exceed declared limits.
    #[error("out of supported range: {0}")]
    Range(String),

    /// A simulation would exceed the configured amplitude budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The instance has `x mod r = 0`, so the orbit is a fixed point and no
    /// circuit is needed: `gcd(x, r) = r` directly.
    #[error("trivial instance: {0}")]
    TrivialInstance(String),

    /// A gate refers to a qubit the state does not have.
    #[error("qubit index out of range: {0}")]
    QubitIndex(String),

    /// Circuit text that does not conform to the emitter grammar.
    #[error("parse error: {0}")]
    Parse(String),
}
