//! Graph construction: document elements keyed by name, in document order.

use std::collections::HashMap;

use wmcp_core::{ElementDescriptor, WmcpDocument};

use crate::error::GraphError;

/// One node: the element plus the name it is keyed under (declared, or
/// synthesized from the selector when the document names no parameter).
#[derive(Debug, Clone, PartialEq)]
pub struct GraphNode {
    pub name: String,
    pub element: ElementDescriptor,
}

impl GraphNode {
    pub fn has_action(&self) -> bool {
        self.element.action.is_some()
    }
}

/// The pre-computed element/action structure an agent consumes.
///
/// `order` preserves the document's element sequence; lookups by name are
/// O(1), giving the direct element-to-action mapping.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InteractionGraph {
    order: Vec<GraphNode>,
    index: HashMap<String, usize>,
}

impl InteractionGraph {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&GraphNode> {
        self.index.get(name).map(|&i| &self.order[i])
    }

    /// Nodes in document order.
    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.order.iter()
    }

    /// Action-bearing nodes in document order.
    pub fn actions(&self) -> impl Iterator<Item = &GraphNode> {
        self.order.iter().filter(|n| n.has_action())
    }
}

/// Derive a node name from a selector: uppercase every ASCII letter and
/// keep digits and underscores, e.g. `#loginBtn` -> `LOGINBTN`.
pub fn synthesize_name(selector: &str) -> String {
    selector
        .chars()
        .filter_map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                Some(c.to_ascii_uppercase())
            } else {
                None
            }
        })
        .collect()
}

/// Build the interaction graph for a validated document.
pub fn build_graph(doc: &WmcpDocument) -> Result<InteractionGraph, GraphError> {
    let mut order = Vec::with_capacity(doc.elements.len());
    let mut index = HashMap::with_capacity(doc.elements.len());

    for (i, element) in doc.elements.iter().enumerate() {
        let name = match &element.name {
            Some(name) => name.clone(),
            None => {
                let synthesized = synthesize_name(&element.selector);
                if synthesized.is_empty() {
                    format!("ELEMENT_{i}")
                } else {
                    synthesized
                }
            }
        };
        if index.contains_key(&name) {
            return Err(GraphError::DuplicateName(name));
        }
        index.insert(name.clone(), i);
        order.push(GraphNode {
            name,
            element: element.clone(),
        });
    }

    Ok(InteractionGraph { order, index })
}
