//! Scope-gated resolution of symbolic endpoint names.

use ed25519_dalek::VerifyingKey;

use crate::error::ResolverError;
use crate::registry::EndpointRegistry;
use crate::token::{verify_agent_token, AgentToken};

/// Resolve `symbol` to its real URL.
///
/// Succeeds iff, in this order: (a) the symbol is registered, (b) the
/// token's signature verifies, (c) the token has not expired at `now`,
/// and (d) the token's scopes cover every scope the policy requires.
/// The decision trusts only the token's compact wire form; embedded
/// claims are re-derived during verification.
pub fn resolve_endpoint(
    symbol: &str,
    token: &AgentToken,
    registry: &EndpointRegistry,
    token_key: &VerifyingKey,
    now: u64,
) -> Result<String, ResolverError> {
    let entry = registry
        .get(symbol)
        .ok_or_else(|| ResolverError::UnknownSymbol(symbol.to_owned()))?;

    let claims = verify_agent_token(&token.compact, token_key)?;

    if claims.is_expired(now) {
        return Err(ResolverError::TokenExpired);
    }

    for required in &entry.policy.scopes {
        if !claims.has_scope(required) {
            return Err(ResolverError::Forbidden {
                missing: required.as_str().to_owned(),
            });
        }
    }

    Ok(entry.url.clone())
}
