//! Ed25519 key plumbing shared by the bundle layer and the agent-token
//! machinery in the resolver.

use ed25519_dalek::{Signature, Signer, SigningKey, Verifier, VerifyingKey};

use crate::error::SignatureError;

pub const SEED_LEN: usize = 32;
pub const PUBLIC_KEY_LEN: usize = 32;
pub const SIGNATURE_LEN: usize = 64;

/// Build a signing key from a 32-byte seed.
pub fn signing_key_from_seed(seed: &[u8]) -> Result<SigningKey, SignatureError> {
    let seed: [u8; SEED_LEN] = seed
        .try_into()
        .map_err(|_| SignatureError::BadKeyLength {
            expected: SEED_LEN,
            got: seed.len(),
        })?;
    Ok(SigningKey::from_bytes(&seed))
}

/// Decode a 32-byte Ed25519 public key.
pub fn verifying_key_from_bytes(bytes: &[u8]) -> Result<VerifyingKey, SignatureError> {
    let bytes: [u8; PUBLIC_KEY_LEN] =
        bytes
            .try_into()
            .map_err(|_| SignatureError::BadKeyLength {
                expected: PUBLIC_KEY_LEN,
                got: bytes.len(),
            })?;
    VerifyingKey::from_bytes(&bytes).map_err(|e| SignatureError::InvalidKey(e.to_string()))
}

/// The public key corresponding to a 32-byte seed.
pub fn public_key_bytes(seed: &[u8]) -> Result<[u8; PUBLIC_KEY_LEN], SignatureError> {
    Ok(signing_key_from_seed(seed)?.verifying_key().to_bytes())
}

/// Sign arbitrary bytes; Ed25519 is deterministic, so identical inputs
/// yield identical signatures.
pub fn sign_raw(key: &SigningKey, message: &[u8]) -> [u8; SIGNATURE_LEN] {
    key.sign(message).to_bytes()
}

/// Verify a detached signature over arbitrary bytes.
pub fn verify_raw(
    key: &VerifyingKey,
    message: &[u8],
    signature: &[u8],
) -> Result<(), SignatureError> {
    let sig_bytes: [u8; SIGNATURE_LEN] =
        signature
            .try_into()
            .map_err(|_| SignatureError::BadKeyLength {
                expected: SIGNATURE_LEN,
                got: signature.len(),
            })?;
    key.verify(message, &Signature::from_bytes(&sig_bytes))
        .map_err(|_| SignatureError::SignatureInvalid)
}
