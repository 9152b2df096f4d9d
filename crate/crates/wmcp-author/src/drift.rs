//! Drift detection: does the deployed page (and server policy) still
//! match the metadata? An empty report is the CI pass condition.

use std::collections::{BTreeMap, BTreeSet};

use scraper::{Html, Selector};
use serde::{Deserialize, Serialize};
use wmcp_core::WmcpDocument;

use crate::error::AuthorError;

/// What kind of policy drifted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftKind {
    Scope,
    CsrfHeader,
    KeyId,
}

/// One policy-level divergence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyDrift {
    pub kind: DriftKind,
    pub detail: String,
}

/// Drift findings. `missing_selectors` and `policy_drift` block CI;
/// `multi_match` entries are advisory (repeated widgets are sometimes
/// intentional).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DriftReport {
    pub missing_selectors: Vec<String>,
    pub policy_drift: Vec<PolicyDrift>,
    pub multi_match: Vec<(String, usize)>,
}

impl DriftReport {
    /// The CI gate: true when nothing blocking drifted.
    pub fn clean(&self) -> bool {
        self.missing_selectors.is_empty() && self.policy_drift.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "clean": self.clean(),
            "missing_selectors": self.missing_selectors,
            "policy_drift": self.policy_drift,
            "multi_match": self.multi_match.iter()
                .map(|(s, n)| serde_json::json!({"selector": s, "matches": n}))
                .collect::<Vec<_>>(),
        })
    }
}

/// Server-side truth to compare the document against: per-endpoint scope
/// sets and the csrf header from the registry, plus the key ids the
/// registry expects versus the ids actually pinned locally.
#[derive(Debug, Clone, Default)]
pub struct RegistryDigest {
    pub endpoint_scopes: BTreeMap<String, BTreeSet<String>>,
    pub csrf_header: Option<String>,
    pub registry_key_ids: BTreeSet<String>,
    pub pinned_key_ids: BTreeSet<String>,
}

/// Execute every document selector against the page and, when a digest is
/// supplied, compare scopes, csrf header, and pinned keys.
pub fn check_drift(
    doc: &WmcpDocument,
    html: &[u8],
    registry_digest: Option<&RegistryDigest>,
) -> Result<DriftReport, AuthorError> {
    let text = std::str::from_utf8(html)
        .map_err(|e| AuthorError::UnparseableHtml(format!("not UTF-8: {e}")))?;
    let dom = Html::parse_document(text);

    let mut report = DriftReport::default();
    for el in &doc.elements {
        let Ok(selector) = Selector::parse(&el.selector) else {
            // A valid document cannot hold an unparseable selector, but a
            // hand-built one can; that counts as missing from the page.
            report.missing_selectors.push(el.selector.clone());
            continue;
        };
        let count = dom.select(&selector).count();
        match count {
            0 => report.missing_selectors.push(el.selector.clone()),
            1 => {}
            n => report.multi_match.push((el.selector.clone(), n)),
        }
    }

    if let Some(digest) = registry_digest {
        compare_policies(doc, digest, &mut report);
    }
    Ok(report)
}

fn compare_policies(doc: &WmcpDocument, digest: &RegistryDigest, report: &mut DriftReport) {
    if let Some(security) = &doc.security {
        for (symbol, policy) in &security.endpoints {
            let doc_scopes: BTreeSet<String> = policy
                .scopes
                .iter()
                .map(|s| s.as_str().to_owned())
                .collect();
            match digest.endpoint_scopes.get(symbol) {
                None => report.policy_drift.push(PolicyDrift {
                    kind: DriftKind::Scope,
                    detail: format!("{symbol} is not registered server-side"),
                }),
                Some(registry_scopes) if *registry_scopes != doc_scopes => {
                    report.policy_drift.push(PolicyDrift {
                        kind: DriftKind::Scope,
                        detail: format!(
                            "{symbol}: document scopes {doc_scopes:?} != registry {registry_scopes:?}"
                        ),
                    })
                }
                Some(_) => {}
            }
        }
        if let (Some(csrf), Some(registry_header)) = (&security.csrf, &digest.csrf_header) {
            if &csrf.header_name != registry_header {
                report.policy_drift.push(PolicyDrift {
                    kind: DriftKind::CsrfHeader,
                    detail: format!(
                        "document header {:?} != registry header {registry_header:?}",
                        csrf.header_name
                    ),
                });
            }
        }
    }

    if digest.registry_key_ids != digest.pinned_key_ids {
        let missing: Vec<&String> = digest
            .registry_key_ids
            .difference(&digest.pinned_key_ids)
            .collect();
        let stale: Vec<&String> = digest
            .pinned_key_ids
            .difference(&digest.registry_key_ids)
            .collect();
        report.policy_drift.push(PolicyDrift {
            kind: DriftKind::KeyId,
            detail: format!("unpinned: {missing:?}, stale pins: {stale:?}"),
        });
    }
}
