//! Whole-document validation: every invariant violation, reported as data.
//!
//! Unlike the fail-fast parser, `validate_document` never errors; it walks
//! the document and accumulates findings, including the cross-reference
//! rules that individual field parsing cannot see (unresolved symbols,
//! missing csrf policy, duplicate selectors).

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::model::*;
use crate::parse::check_short_text;

/// One validation finding: where, which rule, and what went wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub path: String,
    pub rule: String,
    pub message: String,
}

impl Violation {
    pub fn new(
        path: impl Into<String>,
        rule: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Violation {
            path: path.into(),
            rule: rule.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} [{}]: {}", self.path, self.rule, self.message)
    }
}

/// Outcome of [`validate_document`]. Ok iff no violations.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "ok": self.ok(),
            "violations": self.violations,
        })
    }
}

/// Check every invariant on a structurally parsed document.
///
/// Documents coming out of [`parse_structural`](crate::parse_structural)
/// can only trip the cross-reference rules; hand-constructed documents are
/// re-checked in full.
pub fn validate_document(doc: &WmcpDocument) -> ValidationReport {
    let mut v = Vec::new();

    check_text_fields(doc, &mut v);
    check_element_fields(doc, &mut v);
    check_security_fields(doc, &mut v);
    check_duplicate_selectors(doc, &mut v);
    check_symbol_resolution(doc, &mut v);
    check_csrf_backing(doc, &mut v);

    ValidationReport { violations: v }
}

fn push_text_findings(s: &str, path: &str, out: &mut Vec<Violation>) {
    match check_short_text(s, path) {
        Ok(()) => {}
        Err(crate::CoreError::MarkupInText { .. }) => out.push(Violation::new(
            path,
            "desc-markup",
            "text field contains markup or control characters",
        )),
        Err(crate::CoreError::OversizedDescription { len, .. }) => out.push(Violation::new(
            path,
            "desc-length",
            format!("{len} chars exceeds the 160-char cap"),
        )),
        Err(_) => unreachable!("check_short_text only raises text errors"),
    }
}

fn check_text_fields(doc: &WmcpDocument, out: &mut Vec<Violation>) {
    push_text_findings(&doc.context, ".context", out);
    for (i, el) in doc.elements.iter().enumerate() {
        if let Some(desc) = &el.description {
            push_text_findings(desc, &format!(".elements[{i}].description"), out);
        }
    }
}

fn check_element_fields(doc: &WmcpDocument, out: &mut Vec<Violation>) {
    for (i, el) in doc.elements.iter().enumerate() {
        let base = format!(".elements[{i}]");
        if el.selector.is_empty() {
            out.push(Violation::new(
                format!("{base}.selector"),
                "empty-selector",
                "selector must be non-empty",
            ));
        } else if scraper::Selector::parse(&el.selector).is_err() {
            out.push(Violation::new(
                format!("{base}.selector"),
                "selector-syntax",
                format!("{:?} is not a valid CSS selector", el.selector),
            ));
        }
        if !is_lower_token(&el.role.subtype) {
            out.push(Violation::new(
                format!("{base}.role"),
                "role-vocab",
                format!("subtype {:?} is not a lowercase token", el.role.subtype),
            ));
        }
        if let Some(name) = &el.name {
            if !is_valid_name(name) {
                out.push(Violation::new(
                    format!("{base}.name"),
                    "name-syntax",
                    format!("{name:?} must be uppercase letters, digits, underscore"),
                ));
            }
        }
        if let Some(action) = &el.action {
            check_action(action, &format!("{base}.action"), out);
        }
    }
}

fn check_action(action: &ActionSpec, base: &str, out: &mut Vec<Violation>) {
    match &action.endpoint {
        EndpointRef::Symbolic(s) => {
            if !is_valid_symbol(s) {
                out.push(Violation::new(
                    format!("{base}.endpoint"),
                    "endpoint-syntax",
                    format!("{s:?} must be '@' followed by an uppercase identifier"),
                ));
            }
        }
        EndpointRef::Literal(s) => {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c.is_control()) {
                out.push(Violation::new(
                    format!("{base}.endpoint"),
                    "endpoint-syntax",
                    "literal endpoint must be a non-empty URL without whitespace",
                ));
            }
        }
    }
    if let Some(tag) = &action.csrf_tag {
        if !is_valid_csrf_tag(tag) {
            out.push(Violation::new(
                format!("{base}.csrf_tag"),
                "csrf-tag-syntax",
                format!("{tag:?} must be '$' followed by an uppercase identifier"),
            ));
        }
    }
    if let Some(jwe) = &action.payload_jwe {
        if !is_compact_jwe_shape(jwe) {
            out.push(Violation::new(
                format!("{base}.payload_jwe"),
                "jwe-format",
                "payload_jwe must be exactly 5 non-empty base64url segments",
            ));
        }
    }
}

fn check_security_fields(doc: &WmcpDocument, out: &mut Vec<Violation>) {
    let Some(security) = &doc.security else {
        return;
    };
    for (key, policy) in &security.endpoints {
        let base = format!(".security.endpoints.{key}");
        if !is_valid_symbol(key) {
            out.push(Violation::new(
                &base,
                "endpoint-key-syntax",
                format!("{key:?} must be '@' followed by an uppercase identifier"),
            ));
        }
        if policy.expires == 0 {
            out.push(Violation::new(
                format!("{base}.expires"),
                "positive-int",
                "expires must be a positive integer",
            ));
        }
        match (policy.rpm, policy.burst) {
            (Some(r), Some(b)) if b > r => out.push(Violation::new(
                format!("{base}.burst"),
                "rpm-burst",
                format!("burst {b} exceeds rpm {r}"),
            )),
            (Some(0), _) => out.push(Violation::new(
                format!("{base}.rpm"),
                "positive-int",
                "rpm must be a positive integer",
            )),
            (_, Some(0)) => out.push(Violation::new(
                format!("{base}.burst"),
                "positive-int",
                "burst must be a positive integer",
            )),
            _ => {}
        }
    }
    if let Some(csrf) = &security.csrf {
        if !is_valid_header_name(&csrf.header_name) {
            out.push(Violation::new(
                ".security.csrf.header_name",
                "csrf-header-syntax",
                format!("{:?} is not a valid HTTP field name", csrf.header_name),
            ));
        }
        if csrf.token_field.is_empty()
            || csrf
                .token_field
                .chars()
                .any(|c| c.is_whitespace() || c.is_control())
        {
            out.push(Violation::new(
                ".security.csrf.token_field",
                "csrf-field-syntax",
                "token_field must be a non-empty form field name",
            ));
        }
    }
}

fn check_duplicate_selectors(doc: &WmcpDocument, out: &mut Vec<Violation>) {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (i, el) in doc.elements.iter().enumerate() {
        if let Some(first) = seen.get(el.selector.as_str()) {
            out.push(Violation::new(
                format!(".elements[{i}].selector"),
                "duplicate-selector",
                format!(
                    "selector {:?} already used by elements[{first}]",
                    el.selector
                ),
            ));
        } else {
            seen.insert(&el.selector, i);
        }
    }
}

fn check_symbol_resolution(doc: &WmcpDocument, out: &mut Vec<Violation>) {
    for (i, el) in doc.elements.iter().enumerate() {
        let Some(action) = &el.action else { continue };
        let Some(symbol) = action.endpoint.symbol() else {
            continue;
        };
        let resolvable = doc
            .security
            .as_ref()
            .is_some_and(|s| s.endpoints.contains_key(symbol));
        if !resolvable {
            out.push(Violation::new(
                format!(".elements[{i}].action.endpoint"),
                "unresolved-symbol",
                format!("{symbol} has no entry in security.endpoints"),
            ));
        }
    }
}

fn check_csrf_backing(doc: &WmcpDocument, out: &mut Vec<Violation>) {
    let has_policy = doc
        .security
        .as_ref()
        .is_some_and(|s| s.csrf.is_some());
    for (i, el) in doc.elements.iter().enumerate() {
        let Some(action) = &el.action else { continue };
        if action.csrf_tag.is_some() && !has_policy {
            out.push(Violation::new(
                format!(".elements[{i}].action.csrf_tag"),
                "csrf-policy-missing",
                "csrf_tag is set but the document declares no security.csrf policy",
            ));
        }
    }
}
