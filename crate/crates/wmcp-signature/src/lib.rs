//! Detached signing and verification of webMCP document bytes.
//!
//! Every served document ships with an `X-WMCP-SIG` header (or a `.sig`
//! sidecar) carrying an Ed25519 signature over the exact served bytes.
//! Verification happens against a pinned local trust store and strictly
//! precedes parsing: the verified bytes returned by [`verify_bundle`] are
//! the only sanctioned input to the document parser in the secure pipeline.

mod bundle;
mod error;
mod keys;
mod store;
mod transport;

pub use bundle::{sign_bundle, verify_bundle, SignedBundle};
pub use error::SignatureError;
pub use keys::{
    public_key_bytes, sign_raw, signing_key_from_seed, verify_raw, verifying_key_from_bytes,
    PUBLIC_KEY_LEN, SEED_LEN, SIGNATURE_LEN,
};
pub use store::{load_trust_store, TrustStore};
pub use transport::{decode_sig_value, encode_sig_value, sig_sidecar_path, SIG_HEADER};

// The key types downstream crates plumb around.
pub use ed25519_dalek::{SigningKey, VerifyingKey};
