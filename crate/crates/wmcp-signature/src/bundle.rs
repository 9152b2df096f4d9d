//! Signed bundles: raw document bytes plus detached signature and key id.

use crate::error::SignatureError;
use crate::keys::{sign_raw, signing_key_from_seed, verify_raw, SIGNATURE_LEN};
use crate::store::TrustStore;

/// Document bytes exactly as served, with the detached signature over them.
///
/// No canonicalization happens before signing; the signature covers the
/// raw byte stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedBundle {
    pub document_bytes: Vec<u8>,
    pub signature: [u8; SIGNATURE_LEN],
    pub key_id: String,
}

/// Key id rules: non-empty, at most 64 chars, URL-safe charset
/// (RFC 3986 unreserved).
pub(crate) fn check_key_id(key_id: &str) -> Result<(), SignatureError> {
    let ok = !key_id.is_empty()
        && key_id.chars().count() <= 64
        && key_id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | '~'));
    if ok {
        Ok(())
    } else {
        Err(SignatureError::InvalidKeyId(key_id.to_owned()))
    }
}

/// Sign document bytes with a 32-byte seed, producing a detached bundle.
pub fn sign_bundle(
    document_bytes: &[u8],
    private_key_seed: &[u8],
    key_id: &str,
) -> Result<SignedBundle, SignatureError> {
    check_key_id(key_id)?;
    let key = signing_key_from_seed(private_key_seed)?;
    Ok(SignedBundle {
        document_bytes: document_bytes.to_vec(),
        signature: sign_raw(&key, document_bytes),
        key_id: key_id.to_owned(),
    })
}

/// Verify a bundle against the pinned trust store.
///
/// On success returns the document bytes; in the secure pipeline this is
/// the only path by which bytes may reach the parser. An unpinned key id
/// fails even when the signature would verify under some other key.
pub fn verify_bundle<'a>(
    bundle: &'a SignedBundle,
    store: &TrustStore,
) -> Result<&'a [u8], SignatureError> {
    let key = store
        .get(&bundle.key_id)
        .ok_or_else(|| SignatureError::UnknownKeyId(bundle.key_id.clone()))?;
    verify_raw(key, &bundle.document_bytes, &bundle.signature)?;
    Ok(&bundle.document_bytes)
}
