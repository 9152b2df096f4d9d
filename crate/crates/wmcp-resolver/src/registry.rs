//! Server-side endpoint registry: symbolic names to real URLs and policies.
//!
//! This file is never served to agents; shielding holds only if real URLs
//! stay out of documents and pages.

use std::collections::BTreeMap;

use wmcp_core::{is_valid_symbol, EndpointPolicy, Scope};

use crate::error::ResolverError;

/// Reserved registry entry through which the JWE decryption key is
/// delivered (requires scope `payload:key`; the plaintext downgrade
/// requires `payload:plaintext`).
pub const KEY_DELIVERY_SYMBOL: &str = "@WMCP_KEYS";

/// One registered endpoint: the real URL plus its policy.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisteredEndpoint {
    pub url: String,
    pub policy: EndpointPolicy,
}

/// Immutable map from `@NAME` to registered endpoints.
#[derive(Debug, Clone, Default)]
pub struct EndpointRegistry {
    entries: BTreeMap<String, RegisteredEndpoint>,
}

impl EndpointRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(
        &mut self,
        symbol: &str,
        endpoint: RegisteredEndpoint,
    ) -> Result<(), ResolverError> {
        if !is_valid_symbol(symbol) {
            return Err(ResolverError::MalformedRegistry(format!(
                "{symbol:?} is not a valid @NAME symbol"
            )));
        }
        self.entries.insert(symbol.to_owned(), endpoint);
        Ok(())
    }

    pub fn get(&self, symbol: &str) -> Option<&RegisteredEndpoint> {
        self.entries.get(symbol)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &RegisteredEndpoint)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parse the registry file format:
    /// `{"@NAME": {"url": "...", "tokenised": true, "expires": N,
    ///   "scopes": [...], "rpm": N, "burst": N}}`.
    pub fn from_json(bytes: &[u8]) -> Result<Self, ResolverError> {
        let value: serde_json::Value = serde_json::from_slice(bytes)
            .map_err(|e| ResolverError::MalformedRegistry(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| ResolverError::MalformedRegistry("top level must be an object".into()))?;

        let mut registry = EndpointRegistry::new();
        for (symbol, entry) in obj {
            let entry = entry.as_object().ok_or_else(|| {
                ResolverError::MalformedRegistry(format!("{symbol}: entry must be an object"))
            })?;
            let url = entry
                .get("url")
                .and_then(|v| v.as_str())
                .ok_or_else(|| {
                    ResolverError::MalformedRegistry(format!("{symbol}: missing url"))
                })?
                .to_owned();
            let tokenised = entry
                .get("tokenised")
                .and_then(|v| v.as_bool())
                .unwrap_or(true);
            let expires = entry
                .get("expires")
                .and_then(|v| v.as_u64())
                .filter(|&n| n > 0)
                .ok_or_else(|| {
                    ResolverError::MalformedRegistry(format!(
                        "{symbol}: expires must be a positive integer"
                    ))
                })?;
            let mut scopes = Vec::new();
            if let Some(list) = entry.get("scopes") {
                let list = list.as_array().ok_or_else(|| {
                    ResolverError::MalformedRegistry(format!("{symbol}: scopes must be an array"))
                })?;
                for item in list {
                    let s = item.as_str().ok_or_else(|| {
                        ResolverError::MalformedRegistry(format!(
                            "{symbol}: scopes must be strings"
                        ))
                    })?;
                    scopes.push(Scope::parse(s).ok_or_else(|| {
                        ResolverError::InvalidScopeSyntax(s.to_owned())
                    })?);
                }
            }
            let rpm = entry.get("rpm").and_then(|v| v.as_u64());
            let burst = entry.get("burst").and_then(|v| v.as_u64());

            registry.insert(
                symbol,
                RegisteredEndpoint {
                    url,
                    policy: EndpointPolicy {
                        tokenised,
                        expires,
                        scopes,
                        rpm,
                        burst,
                    },
                },
            )?;
        }
        Ok(registry)
    }
}
