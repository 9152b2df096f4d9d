//! Authoring toolchain for webMCP metadata.
//!
//! Three capabilities: scan existing HTML and suggest a draft document,
//! lint documents against the schema and security rules, and detect drift
//! between deployed HTML/policies and the metadata (the CI gate).

mod drift;
mod error;
mod lint;
mod scan;

pub use drift::{check_drift, DriftKind, DriftReport, PolicyDrift, RegistryDigest};
pub use error::AuthorError;
pub use lint::{lint_document, Finding, LintReport, RULE_CATALOG};
pub use scan::{scan_html, ScanSuggestion};
