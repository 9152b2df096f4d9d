use thiserror::Error;

/// Errors raised by signing, verification, and trust-store loading.
#[derive(Debug, Error)]
pub enum SignatureError {
    /// Key material has the wrong length.
    #[error("bad key length: expected {expected} bytes, got {got}")]
    BadKeyLength { expected: usize, got: usize },

    /// 32 bytes that do not decode to a valid Ed25519 public key.
    #[error("invalid public key: {0}")]
    InvalidKey(String),

    /// Key id violates the charset/length rules.
    #[error("invalid key id {0:?}: must be non-empty, at most 64 chars, URL-safe")]
    InvalidKeyId(String),

    /// The bundle names a key id that is not pinned.
    #[error("unknown key id {0:?}: not present in the trust store")]
    UnknownKeyId(String),

    /// Cryptographic verification failed.
    #[error("signature verification failed")]
    SignatureInvalid,

    /// Pin file line that is not `key_id base64key`.
    #[error("malformed pin file at line {line}: {message}")]
    MalformedPinFile { line: usize, message: String },

    /// The same key id pinned twice.
    #[error("duplicate key id {0:?} in pin file")]
    DuplicateKeyId(String),

    /// An `X-WMCP-SIG` value that is not `key_id.base64url_signature`.
    #[error("malformed signature value: {0}")]
    MalformedSignatureValue(String),
}
