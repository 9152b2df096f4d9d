use thiserror::Error;

/// Errors raised by the benchmark rig.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// The requested TCP port cannot be bound.
    #[error("port unavailable: {0}")]
    PortUnavailable(String),

    /// A bundled fixture violates its invariants.
    #[error("invalid fixture: {0}")]
    FixtureInvalid(String),

    /// Benchmark output could not be written.
    #[error("io failure: {0}")]
    IoFailure(String),

    /// The agent could not reach the origin at all.
    #[error("http failure: {0}")]
    HttpFailure(String),
}
