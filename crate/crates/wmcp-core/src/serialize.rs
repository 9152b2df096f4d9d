//! Deterministic canonical serialization.
//!
//! Object keys appear in fixed schema order, endpoint maps are sorted by
//! symbolic name, output is two-space indented UTF-8 with a trailing
//! newline. `parse_document(serialize_document(d))` reproduces `d`.

use serde_json::{json, Map, Value};

use crate::model::*;

/// Serialize a document to its canonical byte form.
pub fn serialize_document(doc: &WmcpDocument) -> Vec<u8> {
    let value = document_value(doc);
    let mut bytes = serde_json::to_vec_pretty(&value).expect("canonical tree is valid JSON");
    bytes.push(b'\n');
    bytes
}

/// Canonical serialization of an elements array alone (no document wrapper,
/// no trailing newline). This is the minimal agent payload.
pub fn serialize_elements(elements: &[ElementDescriptor]) -> Vec<u8> {
    let value = Value::Array(elements.iter().map(element_value).collect());
    serde_json::to_vec_pretty(&value).expect("canonical tree is valid JSON")
}

fn document_value(doc: &WmcpDocument) -> Value {
    let mut obj = Map::new();
    obj.insert("version".into(), json!(doc.version.as_str()));
    obj.insert("context".into(), json!(doc.context));
    obj.insert(
        "elements".into(),
        Value::Array(doc.elements.iter().map(element_value).collect()),
    );
    if let Some(security) = &doc.security {
        obj.insert("security".into(), security_value(security));
    }
    Value::Object(obj)
}

fn element_value(el: &ElementDescriptor) -> Value {
    let mut obj = Map::new();
    obj.insert("selector".into(), json!(el.selector));
    obj.insert("role".into(), json!(el.role.to_string()));
    if let Some(name) = &el.name {
        obj.insert("name".into(), json!(name));
    }
    if let Some(action) = &el.action {
        obj.insert("action".into(), action_value(action));
    }
    if let Some(desc) = &el.description {
        obj.insert("description".into(), json!(desc));
    }
    Value::Object(obj)
}

fn action_value(action: &ActionSpec) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), json!(action.kind.as_str()));
    obj.insert("endpoint".into(), json!(action.endpoint.as_str()));
    if let Some(tag) = &action.csrf_tag {
        obj.insert("csrf_tag".into(), json!(tag));
    }
    if let Some(jwe) = &action.payload_jwe {
        obj.insert("payload_jwe".into(), json!(jwe));
    }
    Value::Object(obj)
}

fn security_value(security: &SecurityPolicy) -> Value {
    let mut endpoints = Map::new();
    // BTreeMap iteration gives sorted symbolic names.
    for (key, policy) in &security.endpoints {
        endpoints.insert(key.clone(), endpoint_policy_value(policy));
    }
    let mut obj = Map::new();
    obj.insert("endpoints".into(), Value::Object(endpoints));
    if let Some(csrf) = &security.csrf {
        let mut c = Map::new();
        c.insert("token_field".into(), json!(csrf.token_field));
        c.insert("header_name".into(), json!(csrf.header_name));
        c.insert("mode".into(), json!(csrf.mode.as_str()));
        obj.insert("csrf".into(), Value::Object(c));
    }
    Value::Object(obj)
}

fn endpoint_policy_value(policy: &EndpointPolicy) -> Value {
    let mut obj = Map::new();
    obj.insert("tokenised".into(), json!(policy.tokenised));
    obj.insert("expires".into(), json!(policy.expires));
    obj.insert(
        "scopes".into(),
        Value::Array(policy.scopes.iter().map(|s| json!(s.as_str())).collect()),
    );
    if let Some(rpm) = policy.rpm {
        obj.insert("rpm".into(), json!(rpm));
    }
    if let Some(burst) = policy.burst {
        obj.insert("burst".into(), json!(burst));
    }
    Value::Object(obj)
}
