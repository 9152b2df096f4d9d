//! Deterministic goal plans: parameters drive fills, the first actionable
//! node submits. No natural-language inference happens here — hints stay
//! inert and goal text is carried, never interpreted.

use std::collections::BTreeMap;

use wmcp_core::RoleCategory;

use crate::error::GraphError;
use crate::graph::InteractionGraph;

/// Plan step operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanOp {
    Fill,
    Submit,
}

/// One step: which node, what to do, and the parameter slot a fill draws
/// from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub element: String,
    pub operation: PlanOp,
    pub param: Option<String>,
}

/// An ordered plan for a goal: every fill precedes the submit that
/// consumes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionPlan {
    pub goal: String,
    pub steps: Vec<PlanStep>,
}

/// Produce the plan for `goal` over `graph` with the supplied parameters.
///
/// Every document-named input node must have a parameter; inputs without
/// a declared name expose no parameter slot and are skipped. The submit
/// step targets the first action-bearing node in document order.
pub fn plan_for_goal(
    graph: &InteractionGraph,
    goal: &str,
    params: &BTreeMap<String, String>,
) -> Result<ActionPlan, GraphError> {
    let submit_node = graph
        .actions()
        .next()
        .ok_or(GraphError::NoActionableElement)?;

    let mut steps = Vec::new();
    for node in graph.nodes() {
        if node.element.role.category != RoleCategory::Input {
            continue;
        }
        if node.element.name.is_none() {
            continue;
        }
        if !params.contains_key(&node.name) {
            return Err(GraphError::MissingParam(node.name.clone()));
        }
        steps.push(PlanStep {
            element: node.name.clone(),
            operation: PlanOp::Fill,
            param: Some(node.name.clone()),
        });
    }
    steps.push(PlanStep {
        element: submit_node.name.clone(),
        operation: PlanOp::Submit,
        param: None,
    });

    Ok(ActionPlan {
        goal: goal.to_owned(),
        steps,
    })
}
