//! Parse, strictly validate, and canonically serialize webMCP documents.
//!
//! A webMCP document is page-local JSON metadata mapping DOM selectors to
//! semantic roles, parameters, actions, and a security policy. It travels
//! either as a `.wmcp` sidecar file (media type `application/webmcp+json`)
//! or inline in a `<script type="application/webmcp+json">` block.
//!
//! Parsing is deliberately strict: unknown keys, duplicate keys, oversized
//! text, and markup or control characters in text fields are all rejected.
//! Parsed fields are inert data; nothing in this crate interprets or
//! forwards them.

mod error;
mod inline;
mod json;
mod model;
mod parse;
mod serialize;
mod validate;

pub mod fixtures;

pub use error::CoreError;
pub use inline::{extract_inline, WEBMCP_MEDIA_TYPE};
pub use model::{
    has_control_chars, has_markup_chars, is_compact_jwe_shape, is_valid_csrf_tag,
    is_valid_header_name, is_valid_name, is_valid_symbol, ActionSpec, CsrfMode,
    CsrfPolicy, ElementDescriptor, EndpointPolicy, EndpointRef, HttpVerb, Role, RoleCategory,
    SchemaVersion, Scope, SecurityPolicy, WmcpDocument,
};
pub use parse::{parse_document, parse_structural};
pub use serialize::{serialize_document, serialize_elements};
pub use validate::{validate_document, ValidationReport, Violation};
