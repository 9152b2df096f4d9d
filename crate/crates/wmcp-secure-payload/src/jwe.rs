//! Compact JWE in direct mode with AES-256-GCM.
//!
//! Layout per RFC 7516 compact serialization:
//! `BASE64URL(header) . encrypted_key . BASE64URL(iv) . BASE64URL(ct) . BASE64URL(tag)`
//! with an empty encrypted-key segment in direct mode. The AAD is the
//! ASCII bytes of the protected-header segment exactly as transmitted.

use aes_gcm::aead::{Aead, Payload};
use aes_gcm::{Aes256Gcm, KeyInit, Nonce};
use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use rand::RngCore;

use crate::error::PayloadError;

/// Supported symmetric key length (A256GCM).
pub const JWE_KEY_LEN: usize = 32;

const IV_LEN: usize = 12;
const TAG_LEN: usize = 16;

/// The protected header bytes this crate emits. Stored verbatim so the
/// AAD is stable.
const DIR_A256GCM_HEADER: &str = r#"{"alg":"dir","enc":"A256GCM"}"#;

/// A compact JWE split into its five segments, kept exactly as
/// transmitted (re-encoding could silently change the AAD).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompactJwe {
    pub protected_header: String,
    pub encrypted_key: String,
    pub iv: String,
    pub ciphertext: String,
    pub auth_tag: String,
}

impl CompactJwe {
    /// Split a compact string into segments. Shape checks only; the
    /// algorithm suite is enforced at decryption time.
    pub fn parse(compact: &str) -> Result<Self, PayloadError> {
        let segments: Vec<&str> = compact.split('.').collect();
        if segments.len() != 5 {
            return Err(PayloadError::MalformedCompactForm(format!(
                "expected 5 dot-separated segments, got {}",
                segments.len()
            )));
        }
        let charset_ok = |seg: &str| {
            seg.chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        };
        if !segments.iter().all(|s| charset_ok(s)) {
            return Err(PayloadError::MalformedCompactForm(
                "segments must be unpadded base64url".into(),
            ));
        }
        for (i, name) in [(0, "header"), (2, "iv"), (3, "ciphertext"), (4, "tag")] {
            if segments[i].is_empty() {
                return Err(PayloadError::MalformedCompactForm(format!(
                    "{name} segment must be non-empty"
                )));
            }
        }
        Ok(CompactJwe {
            protected_header: segments[0].to_owned(),
            encrypted_key: segments[1].to_owned(),
            iv: segments[2].to_owned(),
            ciphertext: segments[3].to_owned(),
            auth_tag: segments[4].to_owned(),
        })
    }

    /// Join the segments back into the compact string.
    pub fn to_compact(&self) -> String {
        format!(
            "{}.{}.{}.{}.{}",
            self.protected_header, self.encrypted_key, self.iv, self.ciphertext, self.auth_tag
        )
    }
}

fn check_key(key: &[u8]) -> Result<(), PayloadError> {
    if key.len() != JWE_KEY_LEN {
        return Err(PayloadError::BadKeyLength {
            expected: JWE_KEY_LEN,
            got: key.len(),
        });
    }
    Ok(())
}

/// Encrypt a payload under a 32-byte key with a fresh random IV.
pub fn encrypt_payload(plaintext: &[u8], key: &[u8]) -> Result<CompactJwe, PayloadError> {
    if plaintext.is_empty() {
        return Err(PayloadError::EmptyPlaintext);
    }
    let mut iv = [0u8; IV_LEN];
    rand::rngs::OsRng.fill_bytes(&mut iv);
    encrypt_with_iv(plaintext, key, &iv)
}

/// Deterministic core used by [`encrypt_payload`] and the known-answer
/// tests. Callers outside tests must never fix the IV.
fn encrypt_with_iv(plaintext: &[u8], key: &[u8], iv: &[u8; IV_LEN]) -> Result<CompactJwe, PayloadError> {
    check_key(key)?;
    let header_b64 = URL_SAFE_NO_PAD.encode(DIR_A256GCM_HEADER);

    let cipher = Aes256Gcm::new_from_slice(key).expect("length checked above");
    let nonce = Nonce::<aes_gcm::aead::consts::U12>::try_from(&iv[..]).expect("fixed length");
    let sealed = cipher
        .encrypt(
            &nonce,
            Payload {
                msg: plaintext,
                aad: header_b64.as_bytes(),
            },
        )
        .map_err(|_| PayloadError::AuthenticationFailed)?;
    let (ct, tag) = sealed.split_at(sealed.len() - TAG_LEN);

    Ok(CompactJwe {
        protected_header: header_b64,
        encrypted_key: String::new(),
        iv: URL_SAFE_NO_PAD.encode(iv),
        ciphertext: URL_SAFE_NO_PAD.encode(ct),
        auth_tag: URL_SAFE_NO_PAD.encode(tag),
    })
}

/// Decrypt a compact JWE. The plaintext is returned only when the
/// authentication tag verifies over header, IV, and ciphertext.
pub fn decrypt_payload(jwe: &CompactJwe, key: &[u8]) -> Result<Vec<u8>, PayloadError> {
    check_key(key)?;

    let header_bytes = URL_SAFE_NO_PAD
        .decode(&jwe.protected_header)
        .map_err(|e| PayloadError::MalformedCompactForm(format!("header: {e}")))?;
    let header: serde_json::Value = serde_json::from_slice(&header_bytes)
        .map_err(|e| PayloadError::MalformedCompactForm(format!("header is not JSON: {e}")))?;
    let alg = header.get("alg").and_then(|v| v.as_str()).unwrap_or("");
    let enc = header.get("enc").and_then(|v| v.as_str()).unwrap_or("");
    if alg != "dir" || enc != "A256GCM" {
        return Err(PayloadError::UnsupportedAlgorithm(format!(
            "alg={alg:?} enc={enc:?} (supported: dir/A256GCM)"
        )));
    }
    if !jwe.encrypted_key.is_empty() {
        return Err(PayloadError::MalformedCompactForm(
            "encrypted key segment must be empty in direct mode".into(),
        ));
    }

    let iv = URL_SAFE_NO_PAD
        .decode(&jwe.iv)
        .map_err(|e| PayloadError::MalformedCompactForm(format!("iv: {e}")))?;
    if iv.len() != IV_LEN {
        return Err(PayloadError::MalformedCompactForm(format!(
            "iv must be {IV_LEN} bytes, got {}",
            iv.len()
        )));
    }
    let ct = URL_SAFE_NO_PAD
        .decode(&jwe.ciphertext)
        .map_err(|e| PayloadError::MalformedCompactForm(format!("ciphertext: {e}")))?;
    let tag = URL_SAFE_NO_PAD
        .decode(&jwe.auth_tag)
        .map_err(|e| PayloadError::MalformedCompactForm(format!("tag: {e}")))?;
    if tag.len() != TAG_LEN {
        return Err(PayloadError::MalformedCompactForm(format!(
            "tag must be {TAG_LEN} bytes, got {}",
            tag.len()
        )));
    }

    let mut sealed = ct;
    sealed.extend_from_slice(&tag);
    let cipher = Aes256Gcm::new_from_slice(key).expect("length checked above");
    let nonce = Nonce::<aes_gcm::aead::consts::U12>::try_from(&iv[..]).expect("length checked");
    cipher
        .decrypt(
            &nonce,
            Payload {
                msg: &sealed,
                // AAD is the transmitted header segment, not a re-encoding.
                aad: jwe.protected_header.as_bytes(),
            },
        )
        .map_err(|_| PayloadError::AuthenticationFailed)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Known-answer vector computed with an independent JOSE reference
    // implementation before this module was written.
    const KAT_KEY_HEX: &str = "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f";
    const KAT_IV: [u8; 12] = [
        0xa0, 0xa1, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xab,
    ];
    const KAT_PLAINTEXT: &[u8] = br#"{"card":"4111111111111111","cvv":"123"}"#;
    const KAT_COMPACT: &str = "eyJhbGciOiJkaXIiLCJlbmMiOiJBMjU2R0NNIn0..oKGio6Slpqeoqaqr.nTofTDevIIVAUbbiNkvx70GdaCGjhnNdrSwKpBzdAyPoVHbNnAAu.3jashREaNtcRvmQc8oOo5w";

    #[test]
    fn known_answer_encrypt() {
        let key = hex::decode(KAT_KEY_HEX).unwrap();
        let jwe = encrypt_with_iv(KAT_PLAINTEXT, &key, &KAT_IV).unwrap();
        assert_eq!(jwe.to_compact(), KAT_COMPACT);
    }

    #[test]
    fn known_answer_decrypt() {
        let key = hex::decode(KAT_KEY_HEX).unwrap();
        let jwe = CompactJwe::parse(KAT_COMPACT).unwrap();
        assert_eq!(decrypt_payload(&jwe, &key).unwrap(), KAT_PLAINTEXT);
    }

    #[test]
    fn empty_plaintext_refused() {
        assert_eq!(
            encrypt_payload(b"", &[0u8; 32]),
            Err(PayloadError::EmptyPlaintext)
        );
    }

    #[test]
    fn bad_key_length_refused() {
        assert!(matches!(
            encrypt_payload(b"x", &[0u8; 16]),
            Err(PayloadError::BadKeyLength { .. })
        ));
    }
}
