use thiserror::Error;

/// Errors from token issuance, verification, and endpoint resolution.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ResolverError {
    /// Signing key seed has the wrong length.
    #[error("bad key length: expected {expected} bytes, got {got}")]
    BadKeyLength { expected: usize, got: usize },

    /// A scope string that is not a lowercase `domain:verb` pair.
    #[error("invalid scope syntax: {0:?}")]
    InvalidScopeSyntax(String),

    /// Token lifetime must be strictly positive.
    #[error("token ttl must be positive")]
    InvalidTtl,

    /// Token string is not a well-formed three-segment JWT.
    #[error("malformed agent token: {0}")]
    MalformedToken(String),

    /// The symbolic name is not registered (404 semantics).
    #[error("unknown endpoint symbol {0:?}")]
    UnknownSymbol(String),

    /// Token lacks a scope the endpoint policy requires (403 semantics).
    #[error("forbidden: token lacks required scope {missing:?}")]
    Forbidden { missing: String },

    /// Token expiry has passed (401 semantics).
    #[error("agent token expired")]
    TokenExpired,

    /// Token signature does not verify (401 semantics).
    #[error("agent token signature invalid")]
    SignatureInvalid,

    /// Registry file could not be parsed.
    #[error("malformed endpoint registry: {0}")]
    MalformedRegistry(String),
}

impl ResolverError {
    /// HTTP status the mock origin maps each failure to.
    pub fn http_status(&self) -> u16 {
        match self {
            ResolverError::UnknownSymbol(_) => 404,
            ResolverError::Forbidden { .. } => 403,
            ResolverError::TokenExpired
            | ResolverError::SignatureInvalid
            | ResolverError::MalformedToken(_) => 401,
            _ => 400,
        }
    }
}
