//! Outgoing action requests and CSRF propagation.

use std::collections::BTreeMap;

use wmcp_core::{CsrfMode, CsrfPolicy};

use crate::csrf::CsrfToken;

/// Request body: either form fields or a flat JSON object.
#[derive(Debug, Clone, PartialEq)]
pub enum RequestBody {
    Form(BTreeMap<String, String>),
    Json(serde_json::Map<String, serde_json::Value>),
}

impl RequestBody {
    pub fn set_field(&mut self, name: &str, value: &str) {
        match self {
            RequestBody::Form(fields) => {
                fields.insert(name.to_owned(), value.to_owned());
            }
            RequestBody::Json(obj) => {
                obj.insert(name.to_owned(), serde_json::Value::String(value.to_owned()));
            }
        }
    }

    pub fn get_field(&self, name: &str) -> Option<String> {
        match self {
            RequestBody::Form(fields) => fields.get(name).cloned(),
            RequestBody::Json(obj) => obj
                .get(name)
                .and_then(|v| v.as_str())
                .map(str::to_owned),
        }
    }
}

/// An outgoing action request, before transport encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionRequest {
    pub method: String,
    pub url: String,
    pub headers: BTreeMap<String, String>,
    pub body: RequestBody,
}

impl ActionRequest {
    pub fn new(method: impl Into<String>, url: impl Into<String>, body: RequestBody) -> Self {
        ActionRequest {
            method: method.into(),
            url: url.into(),
            headers: BTreeMap::new(),
            body,
        }
    }
}

/// Echo a CSRF token into the request per the policy.
///
/// Double-submit sets both the designated header and the body field;
/// synchroniser mode sets the body field only. Idempotent, and touches
/// nothing besides those two slots.
pub fn apply_csrf(mut request: ActionRequest, token: &CsrfToken, policy: &CsrfPolicy) -> ActionRequest {
    match policy.mode {
        CsrfMode::DoubleSubmit => {
            request
                .headers
                .insert(policy.header_name.clone(), token.value.clone());
            request.body.set_field(&policy.token_field, &token.value);
        }
        CsrfMode::Synchroniser => {
            request.body.set_field(&policy.token_field, &token.value);
        }
    }
    request
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csrf::TokenSource;

    fn token() -> CsrfToken {
        CsrfToken {
            value: "XYZ123".into(),
            source: TokenSource::MetaTag,
        }
    }

    fn base_request() -> ActionRequest {
        let mut fields = BTreeMap::new();
        fields.insert("username".into(), "alice".into());
        ActionRequest::new("POST", "/api/login", RequestBody::Form(fields))
    }

    #[test]
    fn double_submit_sets_header_and_body() {
        let policy = CsrfPolicy {
            token_field: "csrf_token".into(),
            header_name: "X-CSRF-TOKEN".into(),
            mode: CsrfMode::DoubleSubmit,
        };
        let out = apply_csrf(base_request(), &token(), &policy);
        assert_eq!(out.headers.get("X-CSRF-TOKEN").unwrap(), "XYZ123");
        assert_eq!(out.body.get_field("csrf_token").unwrap(), "XYZ123");
        assert_eq!(out.body.get_field("username").unwrap(), "alice");
    }

    #[test]
    fn synchroniser_sets_body_only() {
        let policy = CsrfPolicy {
            token_field: "csrf_token".into(),
            header_name: "X-CSRF-TOKEN".into(),
            mode: CsrfMode::Synchroniser,
        };
        let out = apply_csrf(base_request(), &token(), &policy);
        assert!(!out.headers.contains_key("X-CSRF-TOKEN"));
        assert_eq!(out.body.get_field("csrf_token").unwrap(), "XYZ123");
    }

    #[test]
    fn applying_twice_is_identity() {
        let policy = CsrfPolicy {
            token_field: "csrf_token".into(),
            header_name: "X-CSRF-TOKEN".into(),
            mode: CsrfMode::DoubleSubmit,
        };
        let once = apply_csrf(base_request(), &token(), &policy);
        let twice = apply_csrf(once.clone(), &token(), &policy);
        assert_eq!(once, twice);
    }

    #[test]
    fn json_body_field_set() {
        let policy = CsrfPolicy {
            token_field: "csrf_token".into(),
            header_name: "X-CSRF-TOKEN".into(),
            mode: CsrfMode::DoubleSubmit,
        };
        let req = ActionRequest::new("POST", "/api/x", RequestBody::Json(Default::default()));
        let out = apply_csrf(req, &token(), &policy);
        assert_eq!(out.body.get_field("csrf_token").unwrap(), "XYZ123");
    }
}
