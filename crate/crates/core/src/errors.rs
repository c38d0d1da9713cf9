use thiserror::Error;

/// Errors raised by provers, setup and the feature pipeline.
///
/// Verifiers never return these for a bad proof; a proof that does not check
/// out is reported as `false` or as a [`crate::zksvm::Verdict::Reject`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The prover was handed a witness that does not satisfy the statement.
    #[error("prover precondition violated: {0}")]
    Precondition(String),
    /// A committed quantity would leave the range the proofs are sized for.
    #[error("bound violated: {0}")]
    Bound(String),
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("model file: {0}")]
    Model(String),
}

/// Decoding failures. Distinct from verification failures.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum WireError {
    #[error("input truncated")]
    Truncated,
    #[error("trailing bytes after message")]
    TrailingBytes,
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("bad magic bytes")]
    BadMagic,
    #[error("non-canonical scalar encoding")]
    NonCanonicalScalar,
    #[error("invalid point encoding")]
    InvalidPoint,
    #[error("element count does not match the declared layout")]
    BadLayout,
}
