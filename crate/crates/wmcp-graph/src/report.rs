//! Paired token counts: full page HTML vs the elements-only payload.

use wmcp_core::WmcpDocument;

use crate::error::GraphError;
use crate::prompt::elements_payload;
use crate::tokens::estimate_tokens;

/// Token counts for one scenario and the reduction between them.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenReport {
    pub scenario: String,
    /// Proxy for O(|HTML|): tokens over the full page.
    pub tokens_full_html: u64,
    /// Proxy for O(|E|): tokens over the elements-only payload.
    pub tokens_elements_payload: u64,
    pub reduction_pct: f64,
}

/// Compute the reduction percentage from paired counts.
pub fn reduction_pct(full: u64, elements: u64) -> f64 {
    100.0 * (1.0 - elements as f64 / full as f64)
}

/// Measure a page against its metadata document.
pub fn token_report(
    scenario: &str,
    full_html: &[u8],
    doc: &WmcpDocument,
) -> Result<TokenReport, GraphError> {
    let tokens_full_html = estimate_tokens(full_html);
    if tokens_full_html == 0 {
        return Err(GraphError::ZeroHtmlTokens);
    }
    let tokens_elements_payload = estimate_tokens(&elements_payload(doc));
    Ok(TokenReport {
        scenario: scenario.to_owned(),
        tokens_full_html,
        tokens_elements_payload,
        reduction_pct: reduction_pct(tokens_full_html, tokens_elements_payload),
    })
}
