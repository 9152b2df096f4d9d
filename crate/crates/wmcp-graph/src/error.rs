use thiserror::Error;

/// Errors from graph construction, planning, and token reporting.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    /// Two elements resolve to the same node name.
    #[error("duplicate element name {0:?}")]
    DuplicateName(String),

    /// The graph holds no action-bearing node to submit.
    #[error("no actionable element in the graph")]
    NoActionableElement,

    /// A named input participates in the flow but no parameter was given.
    #[error("missing parameter for input {0:?}")]
    MissingParam(String),

    /// Token report over an empty page is meaningless.
    #[error("page has zero tokens; cannot compute a reduction")]
    ZeroHtmlTokens,
}
