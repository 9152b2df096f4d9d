//! Domain types for webMCP documents (schema v0.1/v0.2).
//!
//! All types are immutable after construction and safe to share across
//! concurrent tasks. Field content is inert data: nothing here interprets,
//! executes, or forwards text-field content.

use std::collections::BTreeMap;
use std::fmt;

/// Supported schema versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaVersion {
    V0_1,
    V0_2,
}

impl SchemaVersion {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemaVersion::V0_1 => "0.1",
            SchemaVersion::V0_2 => "0.2",
        }
    }

    /// Parse a version string; `None` for anything outside the supported set.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "0.1" => Some(SchemaVersion::V0_1),
            "0.2" => Some(SchemaVersion::V0_2),
            _ => None,
        }
    }
}

impl fmt::Display for SchemaVersion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The parsed, validated page-local interaction metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct WmcpDocument {
    pub version: SchemaVersion,
    /// Short human context line, capped at 160 chars, markup-free.
    pub context: String,
    /// Interactive elements in document order.
    pub elements: Vec<ElementDescriptor>,
    pub security: Option<SecurityPolicy>,
}

/// One interactive element: a selector mapped to a semantic role,
/// an optional parameter name, and an optional action.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementDescriptor {
    /// CSS selector locating the element in the page.
    pub selector: String,
    pub role: Role,
    /// Symbolic parameter name (uppercase, digits, underscore).
    pub name: Option<String>,
    pub action: Option<ActionSpec>,
    /// Short free-text description, capped at 160 chars, markup-free.
    pub description: Option<String>,
}

/// Controlled role vocabulary category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleCategory {
    Input,
    Button,
    Link,
    Select,
    Form,
    Region,
}

impl RoleCategory {
    pub fn as_str(&self) -> &'static str {
        match self {
            RoleCategory::Input => "input",
            RoleCategory::Button => "button",
            RoleCategory::Link => "link",
            RoleCategory::Select => "select",
            RoleCategory::Form => "form",
            RoleCategory::Region => "region",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "input" => Some(RoleCategory::Input),
            "button" => Some(RoleCategory::Button),
            "link" => Some(RoleCategory::Link),
            "select" => Some(RoleCategory::Select),
            "form" => Some(RoleCategory::Form),
            "region" => Some(RoleCategory::Region),
            _ => None,
        }
    }
}

/// Dotted role token: `category.subtype`, e.g. `input.text`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Role {
    pub category: RoleCategory,
    pub subtype: String,
}

impl Role {
    pub fn new(category: RoleCategory, subtype: impl Into<String>) -> Self {
        Role {
            category,
            subtype: subtype.into(),
        }
    }

    /// Parse a `category.subtype` token against the controlled vocabulary.
    pub fn parse(s: &str) -> Option<Self> {
        let (cat, sub) = s.split_once('.')?;
        let category = RoleCategory::parse(cat)?;
        if !is_lower_token(sub) {
            return None;
        }
        Some(Role {
            category,
            subtype: sub.to_owned(),
        })
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.category.as_str(), self.subtype)
    }
}

/// HTTP verbs permitted in an [`ActionSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HttpVerb {
    Get,
    Post,
    Put,
    Patch,
    Delete,
}

impl HttpVerb {
    pub fn as_str(&self) -> &'static str {
        match self {
            HttpVerb::Get => "GET",
            HttpVerb::Post => "POST",
            HttpVerb::Put => "PUT",
            HttpVerb::Patch => "PATCH",
            HttpVerb::Delete => "DELETE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "GET" => Some(HttpVerb::Get),
            "POST" => Some(HttpVerb::Post),
            "PUT" => Some(HttpVerb::Put),
            "PATCH" => Some(HttpVerb::Patch),
            "DELETE" => Some(HttpVerb::Delete),
            _ => None,
        }
    }
}

/// Endpoint reference: either a literal URL or a shielded symbolic name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EndpointRef {
    /// `@NAME` form, resolved through the security endpoint map.
    Symbolic(String),
    /// Literal absolute or relative URL.
    Literal(String),
}

impl EndpointRef {
    /// The symbolic `@NAME`, when this reference is shielded.
    pub fn symbol(&self) -> Option<&str> {
        match self {
            EndpointRef::Symbolic(s) => Some(s),
            EndpointRef::Literal(_) => None,
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            EndpointRef::Symbolic(s) | EndpointRef::Literal(s) => s,
        }
    }
}

/// Declarative action attached to an element.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpec {
    pub kind: HttpVerb,
    pub endpoint: EndpointRef,
    /// CSRF placeholder, `$NAME` form.
    pub csrf_tag: Option<String>,
    /// Compact JWE string (5 dot-joined base64url segments).
    pub payload_jwe: Option<String>,
}

/// Per-document security block.
#[derive(Debug, Clone, PartialEq)]
pub struct SecurityPolicy {
    /// Symbolic name (`@NAME`) to endpoint policy. Sorted for canonical output.
    pub endpoints: BTreeMap<String, EndpointPolicy>,
    pub csrf: Option<CsrfPolicy>,
}

/// Policy attached to one symbolic endpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointPolicy {
    pub tokenised: bool,
    /// Token lifetime bound in seconds; strictly positive.
    pub expires: u64,
    pub scopes: Vec<Scope>,
    /// Requests-per-minute throttle hint.
    pub rpm: Option<u64>,
    /// Burst allowance hint; at most `rpm` when both present.
    pub burst: Option<u64>,
}

/// A `domain:verb` capability claim, e.g. `auth:login`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Scope(String);

impl Scope {
    /// Parse a lowercase `word:word` scope string.
    pub fn parse(s: &str) -> Option<Self> {
        let (domain, verb) = s.split_once(':')?;
        if is_lower_token(domain) && is_lower_token(verb) {
            Some(Scope(s.to_owned()))
        } else {
            None
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// CSRF validation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsrfMode {
    /// Token must match in both the designated header and the body field.
    DoubleSubmit,
    /// Token validated against the body field only.
    Synchroniser,
}

impl CsrfMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CsrfMode::DoubleSubmit => "double-submit",
            CsrfMode::Synchroniser => "synchroniser",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "double-submit" => Some(CsrfMode::DoubleSubmit),
            "synchroniser" => Some(CsrfMode::Synchroniser),
            _ => None,
        }
    }
}

/// CSRF token plumbing configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrfPolicy {
    /// Form field carrying the token.
    pub token_field: String,
    /// HTTP header carrying the token.
    pub header_name: String,
    pub mode: CsrfMode,
}

// --- small shared syntax checks -------------------------------------------

/// Lowercase token: `[a-z][a-z0-9_]*`.
pub(crate) fn is_lower_token(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// Symbolic parameter name: `[A-Z0-9_]+`.
pub fn is_valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Symbolic endpoint reference: `@` followed by an uppercase identifier.
pub fn is_valid_symbol(s: &str) -> bool {
    let Some(rest) = s.strip_prefix('@') else {
        return false;
    };
    let mut chars = rest.chars();
    match chars.next() {
        Some(c) if c.is_ascii_uppercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// CSRF placeholder: `$` followed by an uppercase identifier.
pub fn is_valid_csrf_tag(s: &str) -> bool {
    match s.strip_prefix('$') {
        Some(rest) => is_valid_symbol(&format!("@{rest}")),
        None => false,
    }
}

/// Compact JWE shape: exactly 5 dot-joined base64url segments.
///
/// The second segment (encrypted key) is empty in direct mode, the only
/// supported suite; header, iv, ciphertext, and tag must be non-empty.
pub fn is_compact_jwe_shape(s: &str) -> bool {
    let segments: Vec<&str> = s.split('.').collect();
    if segments.len() != 5 {
        return false;
    }
    let charset_ok = |seg: &str| {
        seg.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
    };
    segments.iter().all(|seg| charset_ok(seg))
        && [0usize, 2, 3, 4].iter().all(|&i| !segments[i].is_empty())
}

/// RFC 7230 header field-name token.
pub fn is_valid_header_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || "!#$%&'*+-.^_`|~".contains(c))
}

/// Unicode C0/C1 control characters, the conservative "control token" set.
/// `char::is_control` tests the Cc category, which is exactly C0 + DEL + C1.
pub fn has_control_chars(s: &str) -> bool {
    s.chars().any(|c| c.is_control())
}

/// Markup characters banned from free-text fields.
pub fn has_markup_chars(s: &str) -> bool {
    s.chars().any(|c| c == '<' || c == '>' || c == '`')
}
