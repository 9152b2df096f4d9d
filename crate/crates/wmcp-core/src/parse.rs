//! Strict schema walker: JSON tree to [`WmcpDocument`].
//!
//! Parsing is strict. Unknown keys are rejected at every object level,
//! duplicate keys are rejected, free-text fields must be markup-free and
//! within the 160-char cap. `parse_structural` stops at per-field checks;
//! [`parse_document`] additionally requires the cross-reference checks from
//! [`validate_document`](crate::validate::validate_document) to be clean.

use std::collections::BTreeMap;

use crate::error::CoreError;
use crate::json::{parse_tree, JsonValue};
use crate::model::*;
use crate::validate::validate_document;

/// Parse and fully validate a webMCP document.
///
/// The returned document satisfies every schema invariant including the
/// cross-reference rules (symbolic endpoints resolvable, csrf tags backed
/// by a policy, selectors distinct). Text fields are carried as inert data.
pub fn parse_document(bytes: &[u8]) -> Result<WmcpDocument, CoreError> {
    let doc = parse_structural(bytes)?;
    let report = validate_document(&doc);
    if let Some(v) = report.violations.first() {
        return Err(CoreError::violation(
            v.path.clone(),
            v.rule.clone(),
            v.message.clone(),
        ));
    }
    Ok(doc)
}

/// Parse a document enforcing per-field structure only.
///
/// Cross-reference invariants (unresolved symbols, duplicate selectors,
/// missing csrf policy) are *not* checked here; run
/// [`validate_document`](crate::validate::validate_document) to collect them.
/// This is the entry point for linting, where such findings must be reported
/// as data rather than aborting.
pub fn parse_structural(bytes: &[u8]) -> Result<WmcpDocument, CoreError> {
    let tree = parse_tree(bytes)?;
    document_from_tree(&tree)
}

fn document_from_tree(tree: &JsonValue) -> Result<WmcpDocument, CoreError> {
    let entries = expect_object(tree, ".")?;
    let fields = collect_fields(
        entries,
        ".",
        &["version", "context", "elements", "security"],
    )?;

    let version_raw = expect_string(require(&fields, "version", ".")?, ".version")?;
    let version = SchemaVersion::parse(version_raw)
        .ok_or_else(|| CoreError::UnsupportedVersion(version_raw.to_owned()))?;

    let context_raw = expect_string(require(&fields, "context", ".")?, ".context")?;
    check_short_text(context_raw, ".context")?;

    let elements_raw = require(&fields, "elements", ".")?;
    let JsonValue::Array(items) = elements_raw else {
        return Err(CoreError::violation(
            ".elements",
            "type",
            format!("expected array, got {}", elements_raw.type_name()),
        ));
    };
    let mut elements = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        elements.push(element_from_tree(item, &format!(".elements[{i}]"))?);
    }

    let security = match fields.get("security") {
        Some(v) => Some(security_from_tree(v, ".security")?),
        None => None,
    };

    Ok(WmcpDocument {
        version,
        context: context_raw.to_owned(),
        elements,
        security,
    })
}

fn element_from_tree(tree: &JsonValue, path: &str) -> Result<ElementDescriptor, CoreError> {
    let entries = expect_object(tree, path)?;
    let fields = collect_fields(
        entries,
        path,
        &["selector", "role", "name", "action", "description"],
    )?;

    let selector_path = format!("{path}.selector");
    let selector = expect_string(require(&fields, "selector", path)?, &selector_path)?;
    if selector.is_empty() {
        return Err(CoreError::violation(
            selector_path,
            "empty-selector",
            "selector must be non-empty",
        ));
    }
    if scraper::Selector::parse(selector).is_err() {
        return Err(CoreError::violation(
            selector_path,
            "selector-syntax",
            format!("{selector:?} is not a valid CSS selector"),
        ));
    }

    let role_path = format!("{path}.role");
    let role_raw = expect_string(require(&fields, "role", path)?, &role_path)?;
    let role = Role::parse(role_raw).ok_or_else(|| {
        CoreError::violation(
            role_path,
            "role-vocab",
            format!(
                "{role_raw:?} is not a category.subtype token with category in \
                 input|button|link|select|form|region"
            ),
        )
    })?;

    let name = match fields.get("name") {
        Some(v) => {
            let name_path = format!("{path}.name");
            let s = expect_string(v, &name_path)?;
            if !is_valid_name(s) {
                return Err(CoreError::violation(
                    name_path,
                    "name-syntax",
                    format!("{s:?} must be uppercase letters, digits, underscore"),
                ));
            }
            Some(s.to_owned())
        }
        None => None,
    };

    let action = match fields.get("action") {
        Some(v) => Some(action_from_tree(v, &format!("{path}.action"))?),
        None => None,
    };

    let description = match fields.get("description") {
        Some(v) => {
            let desc_path = format!("{path}.description");
            let s = expect_string(v, &desc_path)?;
            check_short_text(s, &desc_path)?;
            Some(s.to_owned())
        }
        None => None,
    };

    Ok(ElementDescriptor {
        selector: selector.to_owned(),
        role,
        name,
        action,
        description,
    })
}

fn action_from_tree(tree: &JsonValue, path: &str) -> Result<ActionSpec, CoreError> {
    let entries = expect_object(tree, path)?;
    let fields = collect_fields(
        entries,
        path,
        &["kind", "endpoint", "csrf_tag", "payload_jwe"],
    )?;

    let kind_path = format!("{path}.kind");
    let kind_raw = expect_string(require(&fields, "kind", path)?, &kind_path)?;
    let kind = HttpVerb::parse(kind_raw).ok_or_else(|| {
        CoreError::violation(
            kind_path,
            "verb-vocab",
            format!("{kind_raw:?} is not one of GET|POST|PUT|PATCH|DELETE"),
        )
    })?;

    let endpoint_path = format!("{path}.endpoint");
    let endpoint_raw = expect_string(require(&fields, "endpoint", path)?, &endpoint_path)?;
    let endpoint = parse_endpoint_ref(endpoint_raw, &endpoint_path)?;

    let csrf_tag = match fields.get("csrf_tag") {
        Some(v) => {
            let tag_path = format!("{path}.csrf_tag");
            let s = expect_string(v, &tag_path)?;
            if !is_valid_csrf_tag(s) {
                return Err(CoreError::violation(
                    tag_path,
                    "csrf-tag-syntax",
                    format!("{s:?} must be '$' followed by an uppercase identifier"),
                ));
            }
            Some(s.to_owned())
        }
        None => None,
    };

    let payload_jwe = match fields.get("payload_jwe") {
        Some(v) => {
            let jwe_path = format!("{path}.payload_jwe");
            let s = expect_string(v, &jwe_path)?;
            if !is_compact_jwe_shape(s) {
                return Err(CoreError::violation(
                    jwe_path,
                    "jwe-format",
                    "payload_jwe must be exactly 5 non-empty base64url segments",
                ));
            }
            Some(s.to_owned())
        }
        None => None,
    };

    Ok(ActionSpec {
        kind,
        endpoint,
        csrf_tag,
        payload_jwe,
    })
}

pub(crate) fn parse_endpoint_ref(raw: &str, path: &str) -> Result<EndpointRef, CoreError> {
    if raw.starts_with('@') {
        if !is_valid_symbol(raw) {
            return Err(CoreError::violation(
                path,
                "endpoint-syntax",
                format!("{raw:?} must be '@' followed by an uppercase identifier"),
            ));
        }
        return Ok(EndpointRef::Symbolic(raw.to_owned()));
    }
    if raw.is_empty() || raw.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(CoreError::violation(
            path,
            "endpoint-syntax",
            "literal endpoint must be a non-empty URL without whitespace",
        ));
    }
    Ok(EndpointRef::Literal(raw.to_owned()))
}

fn security_from_tree(tree: &JsonValue, path: &str) -> Result<SecurityPolicy, CoreError> {
    let entries = expect_object(tree, path)?;
    let fields = collect_fields(entries, path, &["endpoints", "csrf"])?;

    let endpoints_path = format!("{path}.endpoints");
    let endpoints_raw = require(&fields, "endpoints", path)?;
    let endpoint_entries = expect_object(endpoints_raw, &endpoints_path)?;

    let mut endpoints = BTreeMap::new();
    for (key, value) in endpoint_entries {
        let entry_path = format!("{endpoints_path}.{key}");
        if !is_valid_symbol(key) {
            return Err(CoreError::violation(
                entry_path,
                "endpoint-key-syntax",
                format!("{key:?} must be '@' followed by an uppercase identifier"),
            ));
        }
        if endpoints.contains_key(key.as_str()) {
            return Err(CoreError::violation(
                entry_path,
                "duplicate-key",
                format!("duplicate endpoint key {key:?}"),
            ));
        }
        endpoints.insert(key.clone(), endpoint_policy_from_tree(value, &entry_path)?);
    }

    let csrf = match fields.get("csrf") {
        Some(v) => Some(csrf_policy_from_tree(v, &format!("{path}.csrf"))?),
        None => None,
    };

    Ok(SecurityPolicy { endpoints, csrf })
}

fn endpoint_policy_from_tree(tree: &JsonValue, path: &str) -> Result<EndpointPolicy, CoreError> {
    let entries = expect_object(tree, path)?;
    let fields = collect_fields(
        entries,
        path,
        &["tokenised", "expires", "scopes", "rpm", "burst"],
    )?;

    let tokenised_path = format!("{path}.tokenised");
    let tokenised = match require(&fields, "tokenised", path)? {
        JsonValue::Bool(b) => *b,
        other => {
            return Err(CoreError::violation(
                tokenised_path,
                "type",
                format!("expected boolean, got {}", other.type_name()),
            ))
        }
    };

    let expires = expect_positive_int(require(&fields, "expires", path)?, &format!("{path}.expires"))?;

    let scopes_path = format!("{path}.scopes");
    let scopes_raw = require(&fields, "scopes", path)?;
    let JsonValue::Array(scope_items) = scopes_raw else {
        return Err(CoreError::violation(
            scopes_path,
            "type",
            format!("expected array, got {}", scopes_raw.type_name()),
        ));
    };
    let mut scopes = Vec::with_capacity(scope_items.len());
    for (i, item) in scope_items.iter().enumerate() {
        let scope_path = format!("{scopes_path}[{i}]");
        let s = expect_string(item, &scope_path)?;
        let scope = Scope::parse(s).ok_or_else(|| {
            CoreError::violation(
                scope_path,
                "scope-syntax",
                format!("{s:?} must be a lowercase domain:verb pair"),
            )
        })?;
        scopes.push(scope);
    }

    let rpm = match fields.get("rpm") {
        Some(v) => Some(expect_positive_int(v, &format!("{path}.rpm"))?),
        None => None,
    };
    let burst = match fields.get("burst") {
        Some(v) => Some(expect_positive_int(v, &format!("{path}.burst"))?),
        None => None,
    };
    if let (Some(r), Some(b)) = (rpm, burst) {
        if b > r {
            return Err(CoreError::violation(
                format!("{path}.burst"),
                "rpm-burst",
                format!("burst {b} exceeds rpm {r}"),
            ));
        }
    }

    Ok(EndpointPolicy {
        tokenised,
        expires,
        scopes,
        rpm,
        burst,
    })
}

fn csrf_policy_from_tree(tree: &JsonValue, path: &str) -> Result<CsrfPolicy, CoreError> {
    let entries = expect_object(tree, path)?;
    let fields = collect_fields(entries, path, &["token_field", "header_name", "mode"])?;

    let field_path = format!("{path}.token_field");
    let token_field = expect_string(require(&fields, "token_field", path)?, &field_path)?;
    if token_field.is_empty()
        || token_field
            .chars()
            .any(|c| c.is_whitespace() || c.is_control())
    {
        return Err(CoreError::violation(
            field_path,
            "csrf-field-syntax",
            "token_field must be a non-empty form field name",
        ));
    }

    let header_path = format!("{path}.header_name");
    let header_name = expect_string(require(&fields, "header_name", path)?, &header_path)?;
    if !is_valid_header_name(header_name) {
        return Err(CoreError::violation(
            header_path,
            "csrf-header-syntax",
            format!("{header_name:?} is not a valid HTTP field name"),
        ));
    }

    let mode_path = format!("{path}.mode");
    let mode_raw = expect_string(require(&fields, "mode", path)?, &mode_path)?;
    let mode = CsrfMode::parse(mode_raw).ok_or_else(|| {
        CoreError::violation(
            mode_path,
            "csrf-mode",
            format!("{mode_raw:?} must be \"double-submit\" or \"synchroniser\""),
        )
    })?;

    Ok(CsrfPolicy {
        token_field: token_field.to_owned(),
        header_name: header_name.to_owned(),
        mode,
    })
}

// --- tree helpers -----------------------------------------------------------

fn expect_object<'a>(
    tree: &'a JsonValue,
    path: &str,
) -> Result<&'a [(String, JsonValue)], CoreError> {
    match tree {
        JsonValue::Object(entries) => Ok(entries),
        other => Err(CoreError::violation(
            path,
            "type",
            format!("expected object, got {}", other.type_name()),
        )),
    }
}

fn expect_string<'a>(tree: &'a JsonValue, path: &str) -> Result<&'a str, CoreError> {
    match tree {
        JsonValue::String(s) => Ok(s),
        other => Err(CoreError::violation(
            path,
            "type",
            format!("expected string, got {}", other.type_name()),
        )),
    }
}

fn expect_positive_int(tree: &JsonValue, path: &str) -> Result<u64, CoreError> {
    let JsonValue::Number(n) = tree else {
        return Err(CoreError::violation(
            path,
            "type",
            format!("expected positive integer, got {}", tree.type_name()),
        ));
    };
    match n.as_u64() {
        Some(v) if v > 0 => Ok(v),
        _ => Err(CoreError::violation(
            path,
            "positive-int",
            format!("{n} must be a positive integer"),
        )),
    }
}

/// Collect an object's fields, rejecting duplicates and unknown keys.
fn collect_fields<'a>(
    entries: &'a [(String, JsonValue)],
    path: &str,
    allowed: &[&str],
) -> Result<BTreeMap<&'a str, &'a JsonValue>, CoreError> {
    let mut fields: BTreeMap<&str, &JsonValue> = BTreeMap::new();
    for (key, value) in entries {
        if !allowed.contains(&key.as_str()) {
            return Err(CoreError::violation(
                format!("{}.{key}", trim_root(path)),
                "unknown-key",
                format!("unknown key {key:?}"),
            ));
        }
        if fields.insert(key.as_str(), value).is_some() {
            return Err(CoreError::violation(
                format!("{}.{key}", trim_root(path)),
                "duplicate-key",
                format!("duplicate key {key:?}"),
            ));
        }
    }
    Ok(fields)
}

fn require<'a>(
    fields: &BTreeMap<&str, &'a JsonValue>,
    key: &str,
    path: &str,
) -> Result<&'a JsonValue, CoreError> {
    fields.get(key).copied().ok_or_else(|| {
        CoreError::violation(
            format!("{}.{key}", trim_root(path)),
            "missing-field",
            format!("required key {key:?} is missing"),
        )
    })
}

fn trim_root(path: &str) -> &str {
    if path == "." {
        ""
    } else {
        path
    }
}

/// Enforce the free-text rules: 160-char cap, no markup, no control chars.
pub(crate) fn check_short_text(s: &str, path: &str) -> Result<(), CoreError> {
    if has_markup_chars(s) || has_control_chars(s) {
        return Err(CoreError::MarkupInText {
            path: path.to_owned(),
        });
    }
    let len = s.chars().count();
    if len > 160 {
        return Err(CoreError::OversizedDescription {
            path: path.to_owned(),
            len,
        });
    }
    Ok(())
}
