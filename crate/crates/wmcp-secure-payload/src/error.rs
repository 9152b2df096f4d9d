use thiserror::Error;

/// Errors raised by payload encryption and CSRF extraction.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PayloadError {
    /// Symmetric key is not 32 bytes.
    #[error("bad key length: expected {expected} bytes, got {got}")]
    BadKeyLength { expected: usize, got: usize },

    /// Refusing to encrypt nothing.
    #[error("plaintext must be non-empty")]
    EmptyPlaintext,

    /// Header suite other than dir/A256GCM.
    #[error("unsupported algorithm: {0}")]
    UnsupportedAlgorithm(String),

    /// AEAD tag verification failed: ciphertext, tag, or header tampered.
    #[error("authentication failed: payload or header has been altered")]
    AuthenticationFailed,

    /// Not a 5-segment compact JWE (or undecodable segments).
    #[error("malformed compact JWE: {0}")]
    MalformedCompactForm(String),

    /// Neither a csrf meta tag nor a hidden input carries the token.
    #[error("csrf token not found under field {0:?}")]
    TokenNotFound(String),

    /// Multiple token sources disagree; refusing to pick one.
    #[error("ambiguous csrf token: sources disagree on the value")]
    AmbiguousToken,
}
