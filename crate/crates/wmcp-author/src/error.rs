use thiserror::Error;

/// Errors raised by the authoring tools.
#[derive(Debug, Error)]
pub enum AuthorError {
    /// Input byte stream cannot be recovered as a DOM.
    #[error("unparseable HTML: {0}")]
    UnparseableHtml(String),
}
