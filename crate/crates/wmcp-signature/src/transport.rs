//! Signature transport: the `X-WMCP-SIG` header and `.sig` sidecar files.
//!
//! Both carry the same payload: `<key_id>.<base64url signature>`, base64url
//! unpadded. Key ids may themselves contain `.`, so the value splits at the
//! last dot.

use std::path::{Path, PathBuf};

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;

use crate::error::SignatureError;
use crate::keys::SIGNATURE_LEN;

/// HTTP header that carries the detached signature.
pub const SIG_HEADER: &str = "X-WMCP-SIG";

/// Encode a signature value for the header or sidecar.
pub fn encode_sig_value(key_id: &str, signature: &[u8; SIGNATURE_LEN]) -> String {
    format!("{key_id}.{}", URL_SAFE_NO_PAD.encode(signature))
}

/// Decode a header/sidecar value into `(key_id, signature)`.
pub fn decode_sig_value(value: &str) -> Result<(String, [u8; SIGNATURE_LEN]), SignatureError> {
    let (key_id, sig_b64) = value
        .trim()
        .rsplit_once('.')
        .ok_or_else(|| SignatureError::MalformedSignatureValue(value.to_owned()))?;
    if key_id.is_empty() {
        return Err(SignatureError::MalformedSignatureValue(value.to_owned()));
    }
    let sig_bytes = URL_SAFE_NO_PAD
        .decode(sig_b64)
        .map_err(|e| SignatureError::MalformedSignatureValue(format!("bad base64: {e}")))?;
    let signature: [u8; SIGNATURE_LEN] =
        sig_bytes
            .try_into()
            .map_err(|v: Vec<u8>| SignatureError::BadKeyLength {
                expected: SIGNATURE_LEN,
                got: v.len(),
            })?;
    Ok((key_id.to_owned(), signature))
}

/// Sidecar signature path for a document: `<name>.wmcp` -> `<name>.wmcp.sig`.
pub fn sig_sidecar_path(document_path: &Path) -> PathBuf {
    let mut os = document_path.as_os_str().to_owned();
    os.push(".sig");
    PathBuf::from(os)
}
