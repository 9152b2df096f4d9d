//! CSRF token extraction from served pages.
//!
//! The server injects either `<meta name="csrf_token" value="...">` or a
//! hidden input with the same name. Both may appear; consistent duplicates
//! are fine, disagreeing sources are an error — the extractor never
//! silently picks one.

use scraper::{Html, Selector};
use wmcp_core::{has_control_chars, CsrfPolicy};

use crate::error::PayloadError;

/// Where a token value was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenSource {
    MetaTag,
    HiddenInput,
}

/// An extracted CSRF token: opaque non-empty value plus its source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrfToken {
    pub value: String,
    pub source: TokenSource,
}

/// Pull the CSRF token named by `policy.token_field` out of a page.
///
/// Meta tags take precedence over hidden inputs. Values that are empty or
/// carry control characters cannot form a token and are ignored.
pub fn extract_csrf_token(html: &[u8], policy: &CsrfPolicy) -> Result<CsrfToken, PayloadError> {
    let text = String::from_utf8_lossy(html);
    let dom = Html::parse_document(&text);

    let mut meta_values = Vec::new();
    let meta_selector = Selector::parse("meta").expect("static selector");
    for el in dom.select(&meta_selector) {
        if el.value().attr("name") != Some(policy.token_field.as_str()) {
            continue;
        }
        // The injected tag uses `value=`; `content=` accepted for
        // legacy-form adoption.
        let value = el
            .value()
            .attr("value")
            .or_else(|| el.value().attr("content"));
        if let Some(v) = value {
            if usable(v) {
                meta_values.push(v.to_owned());
            }
        }
    }

    let mut input_values = Vec::new();
    let input_selector = Selector::parse(r#"input[type="hidden"]"#).expect("static selector");
    for el in dom.select(&input_selector) {
        if el.value().attr("name") != Some(policy.token_field.as_str()) {
            continue;
        }
        if let Some(v) = el.value().attr("value") {
            if usable(v) {
                input_values.push(v.to_owned());
            }
        }
    }

    let mut all = meta_values.iter().chain(input_values.iter());
    let Some(first) = all.next() else {
        return Err(PayloadError::TokenNotFound(policy.token_field.clone()));
    };
    if all.any(|v| v != first) {
        return Err(PayloadError::AmbiguousToken);
    }

    let source = if meta_values.is_empty() {
        TokenSource::HiddenInput
    } else {
        TokenSource::MetaTag
    };
    Ok(CsrfToken {
        value: first.clone(),
        source,
    })
}

fn usable(value: &str) -> bool {
    !value.is_empty() && !has_control_chars(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wmcp_core::CsrfMode;

    fn policy() -> CsrfPolicy {
        CsrfPolicy {
            token_field: "csrf_token".into(),
            header_name: "X-CSRF-TOKEN".into(),
            mode: CsrfMode::DoubleSubmit,
        }
    }

    #[test]
    fn meta_tag_value() {
        let html = br#"<html><head><meta name="csrf_token" value="XYZ123" /></head></html>"#;
        let token = extract_csrf_token(html, &policy()).unwrap();
        assert_eq!(token.value, "XYZ123");
        assert_eq!(token.source, TokenSource::MetaTag);
    }

    #[test]
    fn hidden_input_fallback() {
        let html = br#"<form><input type="hidden" name="csrf_token" value="abc"></form>"#;
        let token = extract_csrf_token(html, &policy()).unwrap();
        assert_eq!(token.value, "abc");
        assert_eq!(token.source, TokenSource::HiddenInput);
    }

    #[test]
    fn meta_takes_precedence_when_consistent() {
        let html = br#"<meta name="csrf_token" value="T1">
            <input type="hidden" name="csrf_token" value="T1">"#;
        let token = extract_csrf_token(html, &policy()).unwrap();
        assert_eq!(token.value, "T1");
        assert_eq!(token.source, TokenSource::MetaTag);
    }

    #[test]
    fn absent_token_not_found() {
        let err = extract_csrf_token(b"<html><body>nothing</body></html>", &policy()).unwrap_err();
        assert_eq!(err, PayloadError::TokenNotFound("csrf_token".into()));
    }

    #[test]
    fn disagreeing_sources_are_ambiguous() {
        let html = br#"<meta name="csrf_token" value="T1">
            <input type="hidden" name="csrf_token" value="T2">"#;
        assert_eq!(
            extract_csrf_token(html, &policy()).unwrap_err(),
            PayloadError::AmbiguousToken
        );
    }

    #[test]
    fn disagreeing_duplicate_metas_are_ambiguous() {
        let html = br#"<meta name="csrf_token" value="T1">
            <meta name="csrf_token" value="T2">"#;
        assert_eq!(
            extract_csrf_token(html, &policy()).unwrap_err(),
            PayloadError::AmbiguousToken
        );
    }

    #[test]
    fn other_field_names_ignored() {
        let html = br#"<meta name="other" value="nope">
            <input type="text" name="csrf_token" value="visible-not-hidden">"#;
        assert!(extract_csrf_token(html, &policy()).is_err());
    }
}
