//! Endpoint shielding: resolve symbolic endpoint names to real URLs only
//! for agents presenting a valid short-lived scoped token, and self-limit
//! per the document's throttle hints.
//!
//! The registry mapping `@NAME` to real URLs lives server-side only; real
//! URLs never appear in a webMCP document. Clocks are injected (`now` in
//! unix seconds) everywhere, so expiry and throttle behavior are
//! deterministic under test.

mod error;
mod registry;
mod resolve;
mod throttle;
mod token;

pub use error::ResolverError;
pub use registry::{EndpointRegistry, RegisteredEndpoint, KEY_DELIVERY_SYMBOL};
pub use resolve::resolve_endpoint;
pub use throttle::{Decision, ThrottleState};
pub use token::{issue_agent_token, verify_agent_token, AgentToken, TokenClaims};
