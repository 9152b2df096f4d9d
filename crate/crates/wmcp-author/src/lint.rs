//! Document linting: schema rules plus the security lints, reported as
//! data. Malformed input lints too — the parse failure becomes an error
//! entry rather than aborting.

use serde::{Deserialize, Serialize};
use wmcp_core::{parse_structural, validate_document, CoreError, EndpointRef, WmcpDocument};

/// The published rule catalog (one rule per line, versioned).
pub const RULE_CATALOG: &str = include_str!("../rules/catalog.txt");

/// One lint finding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub rule: String,
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} [{}]: {}", self.path, self.rule, self.message)
    }
}

/// Lint outcome. Empty `errors` means the document is deploy-ready;
/// warnings never block.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LintReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl LintReport {
    pub fn deploy_ready(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "deploy_ready": self.deploy_ready(),
            "errors": self.errors,
            "warnings": self.warnings,
        })
    }
}

/// Markdown markers the strict parser's character rules do not cover.
const MARKDOWN_MARKERS: &[&str] = &["**", "__", "~~", "]("];

/// Lint raw document bytes.
pub fn lint_document(bytes: &[u8]) -> LintReport {
    let mut report = LintReport::default();

    let doc = match parse_structural(bytes) {
        Ok(doc) => doc,
        Err(err) => {
            report.errors.push(parse_error_finding(err));
            return report;
        }
    };

    for v in validate_document(&doc).violations {
        report.errors.push(Finding {
            rule: v.rule,
            path: v.path,
            message: v.message,
        });
    }
    security_lints(&doc, &mut report);
    report
}

fn parse_error_finding(err: CoreError) -> Finding {
    match err {
        CoreError::MalformedJson(msg) => Finding {
            rule: "parse-failure".into(),
            path: ".".into(),
            message: msg,
        },
        CoreError::SchemaViolation {
            path,
            rule,
            message,
        } => Finding {
            rule,
            path,
            message,
        },
        CoreError::UnsupportedVersion(v) => Finding {
            rule: "unsupported-version".into(),
            path: ".version".into(),
            message: format!("unsupported version {v:?}"),
        },
        CoreError::OversizedDescription { path, len } => Finding {
            rule: "desc-length".into(),
            path,
            message: format!("{len} chars exceeds the 160-char cap"),
        },
        CoreError::MarkupInText { path } => Finding {
            rule: "desc-markup".into(),
            path,
            message: "text field contains markup or control characters".into(),
        },
        CoreError::MultipleInlineBlocks => Finding {
            rule: "parse-failure".into(),
            path: ".".into(),
            message: "multiple inline webmcp blocks".into(),
        },
    }
}

fn security_lints(doc: &WmcpDocument, report: &mut LintReport) {
    let has_security = doc.security.is_some();

    if let Some(security) = &doc.security {
        for (symbol, policy) in &security.endpoints {
            if policy.tokenised && policy.scopes.is_empty() {
                report.errors.push(Finding {
                    rule: "tokenised-no-scopes".into(),
                    path: format!(".security.endpoints.{symbol}"),
                    message: "tokenised endpoint declares no scopes; nothing gates resolution"
                        .into(),
                });
            }
        }
    }

    for (i, el) in doc.elements.iter().enumerate() {
        let base = format!(".elements[{i}]");
        match &el.description {
            None => report.warnings.push(Finding {
                rule: "missing-description".into(),
                path: format!("{base}.description"),
                message: format!("element {:?} has no description", el.selector),
            }),
            Some(desc) => {
                if MARKDOWN_MARKERS.iter().any(|m| desc.contains(m)) {
                    report.errors.push(Finding {
                        rule: "desc-markup".into(),
                        path: format!("{base}.description"),
                        message: "description contains Markdown markers".into(),
                    });
                }
            }
        }
        if let Some(action) = &el.action {
            if has_security {
                if let EndpointRef::Literal(url) = &action.endpoint {
                    report.warnings.push(Finding {
                        rule: "unshielded-endpoint".into(),
                        path: format!("{base}.action.endpoint"),
                        message: format!(
                            "literal URL {url:?} bypasses endpoint tokenisation"
                        ),
                    });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmcp_core::fixtures;

    #[test]
    fn login_example_is_deploy_ready() {
        let report = lint_document(fixtures::LOGIN_WMCP.as_bytes());
        assert!(report.deploy_ready(), "errors: {:?}", report.errors);
        // No descriptions in the example: warnings, never blockers.
        assert!(report
            .warnings
            .iter()
            .all(|w| w.rule == "missing-description"));
    }

    #[test]
    fn oversize_description_is_desc_length() {
        let long = "a".repeat(161);
        let json = format!(
            r##"{{"version":"0.2","context":"x","elements":[{{"selector":"#a","role":"input.text","description":"{long}"}}]}}"##
        );
        let report = lint_document(json.as_bytes());
        assert!(report.errors.iter().any(|e| e.rule == "desc-length"));
    }

    #[test]
    fn markdown_description_is_desc_markup() {
        let json = br##"{"version":"0.2","context":"x","elements":[
            {"selector":"#a","role":"input.text","description":"**bold** move"}
        ]}"##;
        let report = lint_document(json);
        assert!(
            report.errors.iter().any(|e| e.rule == "desc-markup"),
            "errors: {:?}",
            report.errors
        );
    }

    #[test]
    fn malformed_input_lints_as_parse_failure() {
        let report = lint_document(b"{not json");
        assert_eq!(report.errors.len(), 1);
        assert_eq!(report.errors[0].rule, "parse-failure");
    }

    #[test]
    fn tokenised_endpoint_without_scopes_is_an_error() {
        let json = br##"{"version":"0.2","context":"x","elements":[
            {"selector":"#go","role":"button.submit",
             "action":{"kind":"POST","endpoint":"@API"}}
        ],"security":{"endpoints":{"@API":{"tokenised":true,"expires":60,"scopes":[]}}}}"##;
        let report = lint_document(json);
        assert!(report
            .errors
            .iter()
            .any(|e| e.rule == "tokenised-no-scopes"));
    }

    #[test]
    fn literal_url_with_security_block_warns() {
        let json = br##"{"version":"0.2","context":"x","elements":[
            {"selector":"#go","role":"button.submit",
             "action":{"kind":"POST","endpoint":"/api/direct"},
             "description":"submit"}
        ],"security":{"endpoints":{"@API":{"tokenised":true,"expires":60,"scopes":["a:b"]}}}}"##;
        let report = lint_document(json);
        assert!(report.deploy_ready());
        assert!(report
            .warnings
            .iter()
            .any(|w| w.rule == "unshielded-endpoint"));
    }

    #[test]
    fn every_finding_rule_is_in_the_catalog() {
        let catalog_rules: Vec<&str> = RULE_CATALOG
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
            .filter_map(|l| l.split('\t').next())
            .collect();
        for rule in [
            "parse-failure",
            "desc-length",
            "desc-markup",
            "tokenised-no-scopes",
            "missing-description",
            "unshielded-endpoint",
            "unresolved-symbol",
            "duplicate-selector",
            "csrf-policy-missing",
        ] {
            assert!(catalog_rules.contains(&rule), "{rule} missing from catalog");
        }
    }
}
