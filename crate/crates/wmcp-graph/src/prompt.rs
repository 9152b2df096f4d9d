//! Minimal agent prompts: the elements array and nothing else from the
//! document besides the goal and user parameters.

use std::collections::BTreeMap;

use wmcp_core::{serialize_elements, WmcpDocument};

/// Canonical serialization of the document's elements array alone.
///
/// This is the payload forwarded to the agent; the security block never
/// travels (symbolic endpoint names already embedded in actions are all
/// an agent sees).
pub fn elements_payload(doc: &WmcpDocument) -> Vec<u8> {
    serialize_elements(&doc.elements)
}

/// The compact prompt an agent receives: goal, elements JSON, user params.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentPrompt {
    pub goal: String,
    pub elements_json: Vec<u8>,
    pub user_params: BTreeMap<String, String>,
}

impl AgentPrompt {
    pub fn new(goal: &str, doc: &WmcpDocument, user_params: BTreeMap<String, String>) -> Self {
        AgentPrompt {
            goal: goal.to_owned(),
            elements_json: elements_payload(doc),
            user_params,
        }
    }

    /// Render the prompt deterministically for token accounting and
    /// transport: a JSON object `{goal, elements, params}`.
    pub fn render(&self) -> Vec<u8> {
        let elements: serde_json::Value =
            serde_json::from_slice(&self.elements_json).expect("payload is canonical JSON");
        let mut obj = serde_json::Map::new();
        obj.insert("goal".into(), serde_json::json!(self.goal));
        obj.insert("elements".into(), elements);
        obj.insert("params".into(), serde_json::json!(self.user_params));
        serde_json::to_vec_pretty(&serde_json::Value::Object(obj)).expect("prompt serializes")
    }
}
