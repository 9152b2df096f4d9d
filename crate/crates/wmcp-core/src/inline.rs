//! Inline container extraction.
//!
//! A page may carry its metadata in a
//! `<script type="application/webmcp+json">` block instead of a sidecar
//! file. Extraction is tolerant of broken HTML but strict about ambiguity:
//! two matching blocks is an error, not a pick-one.

use scraper::{Html, Selector};

use crate::error::CoreError;

/// Media type that marks the inline container (matched byte-for-byte).
pub const WEBMCP_MEDIA_TYPE: &str = "application/webmcp+json";

/// Extract the raw content of the inline webMCP script block, if present.
///
/// Returns the script text with leading/trailing whitespace trimmed and no
/// other transformation. `None` when the page has no matching block.
pub fn extract_inline(html: &[u8]) -> Result<Option<Vec<u8>>, CoreError> {
    let text = String::from_utf8_lossy(html);
    let dom = Html::parse_document(&text);
    let selector = Selector::parse("script").expect("static selector");

    let mut found: Option<String> = None;
    for script in dom.select(&selector) {
        if script.value().attr("type") != Some(WEBMCP_MEDIA_TYPE) {
            continue;
        }
        if found.is_some() {
            return Err(CoreError::MultipleInlineBlocks);
        }
        found = Some(script.text().collect::<String>());
    }
    Ok(found.map(|s| s.trim().as_bytes().to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn absent_block_is_none() {
        let html = b"<html><head><script>var x = 1;</script></head></html>";
        assert_eq!(extract_inline(html).unwrap(), None);
    }

    #[test]
    fn content_is_raw_and_trimmed() {
        let html = br#"<html><head>
<script type="application/webmcp+json">
{"version": "0.2"}
</script></head></html>"#;
        let bytes = extract_inline(html).unwrap().unwrap();
        assert_eq!(bytes, br#"{"version": "0.2"}"#);
    }

    #[test]
    fn two_blocks_is_an_error() {
        let html = br#"<script type="application/webmcp+json">{}</script>
<script type="application/webmcp+json">{}</script>"#;
        assert!(matches!(
            extract_inline(html),
            Err(CoreError::MultipleInlineBlocks)
        ));
    }

    #[test]
    fn type_must_match_exactly() {
        let html = br#"<script type="application/webmcp+json; charset=utf-8">{}</script>"#;
        assert_eq!(extract_inline(html).unwrap(), None);
    }

    #[test]
    fn inline_login_example_extracts_exact_bytes() {
        let html = format!(
            "<html><head>\n<script type=\"application/webmcp+json\">\n{}\n</script>\n</head><body></body></html>",
            crate::fixtures::LOGIN_WMCP
        );
        let bytes = extract_inline(html.as_bytes()).unwrap().unwrap();
        assert_eq!(bytes, crate::fixtures::LOGIN_WMCP.trim().as_bytes());
        // The extracted bytes parse into the same document as the sidecar.
        let inline_doc = crate::parse_document(&bytes).unwrap();
        let sidecar_doc = crate::parse_document(crate::fixtures::LOGIN_WMCP.as_bytes()).unwrap();
        assert_eq!(inline_doc, sidecar_doc);
    }
}
