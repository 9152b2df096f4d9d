//! Pre-computed interaction graphs and minimal agent payloads.
//!
//! An agent working from a webMCP document never parses page HTML: it
//! consumes the element/action structure directly (O(|E|) lookup instead
//! of O(|HTML|) scanning) and receives only the elements array in its
//! prompt. This crate builds that graph, derives deterministic action
//! plans (no free-text inference — parameters drive fills, the first
//! actionable node fires), and measures the token cost of both routes.

mod error;
mod graph;
mod plan;
mod prompt;
mod report;
mod tokens;

pub use error::GraphError;
pub use graph::{build_graph, synthesize_name, GraphNode, InteractionGraph};
pub use plan::{plan_for_goal, ActionPlan, PlanOp, PlanStep};
pub use prompt::{elements_payload, AgentPrompt};
pub use report::{reduction_pct, token_report, TokenReport};
pub use tokens::estimate_tokens;
