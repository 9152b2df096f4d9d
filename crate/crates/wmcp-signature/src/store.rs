//! Local pin file standing in for DNS key pinning.
//!
//! Format: one `key_id base64key` pair per line, `#` starts a comment,
//! blank lines ignored. Keys are standard base64 of the 32-byte Ed25519
//! public key.

use std::collections::BTreeMap;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use ed25519_dalek::VerifyingKey;

use crate::bundle::check_key_id;
use crate::error::SignatureError;
use crate::keys::{verifying_key_from_bytes, PUBLIC_KEY_LEN};

/// Pinned key ids mapped to Ed25519 public keys. Immutable after load.
#[derive(Debug, Clone, Default)]
pub struct TrustStore {
    entries: BTreeMap<String, VerifyingKey>,
}

impl TrustStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pin a key. Replacing an existing id is an error.
    pub fn insert(&mut self, key_id: &str, key: VerifyingKey) -> Result<(), SignatureError> {
        check_key_id(key_id)?;
        if self.entries.contains_key(key_id) {
            return Err(SignatureError::DuplicateKeyId(key_id.to_owned()));
        }
        self.entries.insert(key_id.to_owned(), key);
        Ok(())
    }

    pub fn get(&self, key_id: &str) -> Option<&VerifyingKey> {
        self.entries.get(key_id)
    }

    pub fn key_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parse a pin file into a populated trust store.
pub fn load_trust_store(source: &[u8]) -> Result<TrustStore, SignatureError> {
    let text = std::str::from_utf8(source).map_err(|e| SignatureError::MalformedPinFile {
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;

    let mut store = TrustStore::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw_line.trim(),
        };
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(key_id), Some(key_b64), None) = (parts.next(), parts.next(), parts.next())
        else {
            return Err(SignatureError::MalformedPinFile {
                line: line_no,
                message: "expected exactly `key_id base64key`".into(),
            });
        };
        let key_bytes = STANDARD
            .decode(key_b64)
            .map_err(|e| SignatureError::MalformedPinFile {
                line: line_no,
                message: format!("bad base64: {e}"),
            })?;
        if key_bytes.len() != PUBLIC_KEY_LEN {
            return Err(SignatureError::BadKeyLength {
                expected: PUBLIC_KEY_LEN,
                got: key_bytes.len(),
            });
        }
        let key = verifying_key_from_bytes(&key_bytes)?;
        store.insert(key_id, key)?;
    }
    Ok(store)
}
