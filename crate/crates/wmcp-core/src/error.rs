//! Error types for document parsing and inline extraction.

use thiserror::Error;

/// Errors raised while parsing or extracting webMCP documents.
#[derive(Debug, Error)]
pub enum CoreError {
    /// The input is not well-formed JSON (or not UTF-8).
    #[error("malformed JSON: {0}")]
    MalformedJson(String),

    /// A field, type, or invariant check failed at the given path.
    #[error("schema violation at {path} [{rule}]: {message}")]
    SchemaViolation {
        path: String,
        rule: String,
        message: String,
    },

    /// The document declares a version outside the supported set.
    #[error("unsupported version {0:?} (supported: \"0.1\", \"0.2\")")]
    UnsupportedVersion(String),

    /// A capped text field exceeds 160 characters.
    #[error("oversized text at {path}: {len} chars exceeds the 160-char cap")]
    OversizedDescription { path: String, len: usize },

    /// A text field contains markup characters or control characters.
    #[error("markup or control characters in text field at {path}")]
    MarkupInText { path: String },

    /// More than one inline `application/webmcp+json` script block.
    #[error("multiple inline webmcp script blocks; the container must be unambiguous")]
    MultipleInlineBlocks,
}

impl CoreError {
    /// Shorthand used throughout the schema walker.
    pub(crate) fn violation(
        path: impl Into<String>,
        rule: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        CoreError::SchemaViolation {
            path: path.into(),
            rule: rule.into(),
            message: message.into(),
        }
    }
}
