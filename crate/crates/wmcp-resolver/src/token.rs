//! Short-lived scoped agent tokens: compact EdDSA-signed JWTs.
//!
//! Three dot-joined base64url segments; the Ed25519 signature covers the
//! ASCII bytes of `header.claims`. Ed25519 signing is deterministic, so
//! issuance is reproducible for fixed inputs.

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use ed25519_dalek::VerifyingKey;
use serde::{Deserialize, Serialize};
use wmcp_core::Scope;
use wmcp_signature::{sign_raw, signing_key_from_seed, verify_raw, SignatureError};

use crate::error::ResolverError;

const JWT_HEADER: &str = r#"{"alg":"EdDSA","typ":"JWT"}"#;

/// Claims carried by an agent token.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenClaims {
    #[serde(rename = "sub")]
    pub subject: String,
    pub scopes: Vec<String>,
    #[serde(rename = "iat")]
    pub issued_at: u64,
    #[serde(rename = "exp")]
    pub expires_at: u64,
}

impl TokenClaims {
    pub fn is_expired(&self, now: u64) -> bool {
        now >= self.expires_at
    }

    pub fn has_scope(&self, scope: &Scope) -> bool {
        self.scopes.iter().any(|s| s == scope.as_str())
    }
}

/// A minted agent token: the compact wire form plus its decoded claims.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentToken {
    pub compact: String,
    pub claims: TokenClaims,
}

/// Mint a token for `subject` holding `scopes`, valid for `ttl` seconds
/// from `now`.
pub fn issue_agent_token(
    subject: &str,
    scopes: &[impl AsRef<str>],
    ttl: u64,
    signing_key_seed: &[u8],
    now: u64,
) -> Result<AgentToken, ResolverError> {
    if ttl == 0 {
        return Err(ResolverError::InvalidTtl);
    }
    let mut parsed = Vec::with_capacity(scopes.len());
    for scope in scopes {
        let s = scope.as_ref();
        parsed.push(
            Scope::parse(s)
                .ok_or_else(|| ResolverError::InvalidScopeSyntax(s.to_owned()))?,
        );
    }
    let key = signing_key_from_seed(signing_key_seed).map_err(map_key_error)?;

    let claims = TokenClaims {
        subject: subject.to_owned(),
        scopes: parsed.iter().map(|s| s.as_str().to_owned()).collect(),
        issued_at: now,
        expires_at: now + ttl,
    };
    let header_b64 = URL_SAFE_NO_PAD.encode(JWT_HEADER);
    let claims_b64 =
        URL_SAFE_NO_PAD.encode(serde_json::to_vec(&claims).expect("claims serialize"));
    let signing_input = format!("{header_b64}.{claims_b64}");
    let signature = sign_raw(&key, signing_input.as_bytes());
    let compact = format!("{signing_input}.{}", URL_SAFE_NO_PAD.encode(signature));

    Ok(AgentToken { compact, claims })
}

/// Verify a compact token's shape and signature, returning its claims.
///
/// Expiry is not checked here; callers compare `claims.expires_at`
/// against their own clock (resolution does this in a fixed order).
pub fn verify_agent_token(
    compact: &str,
    key: &VerifyingKey,
) -> Result<TokenClaims, ResolverError> {
    let mut parts = compact.split('.');
    let (Some(header_b64), Some(claims_b64), Some(sig_b64), None) =
        (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err(ResolverError::MalformedToken(
            "expected 3 dot-joined segments".into(),
        ));
    };

    let header_bytes = URL_SAFE_NO_PAD
        .decode(header_b64)
        .map_err(|e| ResolverError::MalformedToken(format!("header: {e}")))?;
    let header: serde_json::Value = serde_json::from_slice(&header_bytes)
        .map_err(|e| ResolverError::MalformedToken(format!("header: {e}")))?;
    if header.get("alg").and_then(|v| v.as_str()) != Some("EdDSA") {
        return Err(ResolverError::MalformedToken(
            "header alg must be EdDSA".into(),
        ));
    }

    let signature = URL_SAFE_NO_PAD
        .decode(sig_b64)
        .map_err(|e| ResolverError::MalformedToken(format!("signature: {e}")))?;
    let signing_input = format!("{header_b64}.{claims_b64}");
    verify_raw(key, signing_input.as_bytes(), &signature).map_err(|e| match e {
        SignatureError::BadKeyLength { .. } => {
            ResolverError::MalformedToken("signature must be 64 bytes".into())
        }
        _ => ResolverError::SignatureInvalid,
    })?;

    let claims_bytes = URL_SAFE_NO_PAD
        .decode(claims_b64)
        .map_err(|e| ResolverError::MalformedToken(format!("claims: {e}")))?;
    let claims: TokenClaims = serde_json::from_slice(&claims_bytes)
        .map_err(|e| ResolverError::MalformedToken(format!("claims: {e}")))?;
    if claims.expires_at <= claims.issued_at {
        return Err(ResolverError::MalformedToken(
            "expires_at must exceed issued_at".into(),
        ));
    }
    Ok(claims)
}

fn map_key_error(e: SignatureError) -> ResolverError {
    match e {
        SignatureError::BadKeyLength { expected, got } => {
            ResolverError::BadKeyLength { expected, got }
        }
        other => ResolverError::MalformedToken(other.to_string()),
    }
}
