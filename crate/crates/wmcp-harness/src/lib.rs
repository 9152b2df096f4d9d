//! Desk-scale benchmark rig.
//!
//! An embedded mock origin serves the bundled fixture sites with the full
//! security layer live (detached signatures, CSRF double-submit, scoped
//! agent tokens, per-endpoint throttling), and a deterministic scripted
//! agent exercises each scenario twice: the baseline path that downloads
//! and tokenizes full HTML, and the optimized path that works from the
//! signed sidecar metadata. No LLM is called; token counts use the
//! deterministic estimator, so the tokens column is bit-stable run to run.

mod agent;
mod bench;
mod clock;
mod error;
mod fixtures;
mod origin;

pub use agent::{run_agent_step, Agent, Method, RunRecord, TEST_SCOPES};
pub use bench::{run_benchmark, BenchOptions, BenchSummary, ScenarioSummary};
pub use clock::{Clock, ManualClock, WallClock};
pub use error::HarnessError;
pub use fixtures::{
    builtin_scenarios, dev_keys, dev_registry, dev_trust_store, scaled_page, scenario_csrf_value,
    validate_fixture, FixturePage, OriginKeys, ScenarioFixture, DEV_DOC_KEY_ID,
};
pub use origin::{start_origin, start_origin_with_clock, OriginHandle};
