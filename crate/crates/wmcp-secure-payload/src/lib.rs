//! Encrypted payload hints and element-level CSRF handling.
//!
//! Sensitive action parameters travel as compact JWE strings
//! (`alg: dir`, `enc: A256GCM` — the only supported suite; the symmetric
//! key is delivered out of band through the tokenised endpoint map).
//! CSRF tokens are read from the page (meta tag or hidden input) and echoed
//! into outgoing requests per the document's csrf policy.

mod csrf;
mod error;
mod jwe;
mod request;

pub use csrf::{extract_csrf_token, CsrfToken, TokenSource};
pub use error::PayloadError;
pub use jwe::{decrypt_payload, encrypt_payload, CompactJwe, JWE_KEY_LEN};
pub use request::{apply_csrf, ActionRequest, RequestBody};
