//! The benchmark runner: scenario x method x iteration, CSV output with a
//! per-scenario summary block.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::agent::{run_agent_step, Agent, Method, RunRecord};
use crate::error::HarnessError;
use crate::fixtures::{dev_keys, dev_registry, dev_trust_store, ScenarioFixture};
use crate::origin::start_origin;

/// CSV column order, fixed by the interface contract.
pub const CSV_HEADER: &str = "scenario,method,iteration,tokens,latency_ms,success,cost_proxy";

/// Runner knobs.
#[derive(Debug, Clone)]
pub struct BenchOptions {
    /// Cost per 1000 tokens for the cost_proxy column.
    pub cost_per_1k: f64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { cost_per_1k: 0.01 }
    }
}

/// Per-scenario aggregate.
#[derive(Debug, Clone)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub mean_tokens_baseline: f64,
    pub mean_tokens_webmcp: f64,
    pub mean_latency_baseline_ms: f64,
    pub mean_latency_webmcp_ms: f64,
    pub reduction_pct: f64,
}

/// Full benchmark outcome: raw rows plus summaries and the CSV bytes.
#[derive(Debug, Clone)]
pub struct BenchSummary {
    pub records: Vec<RunRecord>,
    pub scenarios: Vec<ScenarioSummary>,
    pub csv: Vec<u8>,
}

/// Run the benchmark: one aggregated record per scenario x method x
/// iteration, sequential requests for deterministic token ordering.
///
/// The `seed` is recorded in the output for provenance; the runner itself
/// is deterministic in the tokens column by construction.
pub fn run_benchmark(
    scenarios: &[ScenarioFixture],
    iterations: u32,
    seed: u64,
    output: Option<&Path>,
) -> Result<BenchSummary, HarnessError> {
    if iterations == 0 {
        return Err(HarnessError::FixtureInvalid(
            "iterations must be at least 1".into(),
        ));
    }
    let origin = start_origin(scenarios, dev_registry(), dev_keys(), 0)?;
    let agent = Agent::new(&origin, dev_trust_store());

    let mut records = Vec::new();
    for fixture in scenarios {
        for method in [Method::BaselineHtml, Method::WebmcpOptimized] {
            for iteration in 1..=iterations {
                records.push(run_scenario_once(&agent, fixture, method, iteration)?);
            }
        }
    }

    let scenarios_summary = summarize(&records);
    let csv = render_csv(&records, &scenarios_summary, seed);
    if let Some(path) = output {
        std::fs::write(path, &csv).map_err(|e| HarnessError::IoFailure(e.to_string()))?;
    }
    Ok(BenchSummary {
        records,
        scenarios: scenarios_summary,
        csv,
    })
}

/// One scenario run: every page in order; tokens and latency accumulate,
/// success requires every step to succeed.
fn run_scenario_once(
    agent: &Agent,
    fixture: &ScenarioFixture,
    method: Method,
    iteration: u32,
) -> Result<RunRecord, HarnessError> {
    let mut tokens = 0u64;
    let mut latency_ms = 0f64;
    let mut success = true;
    let mut trace = Vec::new();

    for page in &fixture.pages {
        let record = run_agent_step(
            agent,
            method,
            &fixture.name,
            &page.path,
            &fixture.goal,
            &fixture.params,
            iteration,
        )?;
        tokens += record.tokens;
        latency_ms += record.latency_ms;
        success &= record.success;
        trace.push(format!("{}: {}", page.path, record.trace.join(" > ")));
    }

    Ok(RunRecord {
        scenario: fixture.name.clone(),
        method,
        iteration,
        tokens,
        latency_ms,
        success,
        cost_proxy: tokens as f64 * BenchOptions::default().cost_per_1k / 1000.0,
        trace,
    })
}

fn summarize(records: &[RunRecord]) -> Vec<ScenarioSummary> {
    let mut order: Vec<String> = Vec::new();
    let mut by_key: BTreeMap<(String, &'static str), (f64, f64, u64)> = BTreeMap::new();
    for r in records {
        if !order.contains(&r.scenario) {
            order.push(r.scenario.clone());
        }
        let entry = by_key
            .entry((r.scenario.clone(), r.method.as_str()))
            .or_insert((0.0, 0.0, 0));
        entry.0 += r.tokens as f64;
        entry.1 += r.latency_ms;
        entry.2 += 1;
    }
    let mean = |key: &(String, &'static str)| -> (f64, f64) {
        by_key
            .get(key)
            .map(|(t, l, n)| (t / *n as f64, l / *n as f64))
            .unwrap_or((0.0, 0.0))
    };

    order
        .into_iter()
        .map(|scenario| {
            let (bt, bl) = mean(&(scenario.clone(), "baseline_html"));
            let (wt, wl) = mean(&(scenario.clone(), "webmcp_optimized"));
            ScenarioSummary {
                scenario,
                mean_tokens_baseline: bt,
                mean_tokens_webmcp: wt,
                mean_latency_baseline_ms: bl,
                mean_latency_webmcp_ms: wl,
                reduction_pct: if bt > 0.0 { 100.0 * (1.0 - wt / bt) } else { 0.0 },
            }
        })
        .collect()
}

fn render_csv(records: &[RunRecord], summaries: &[ScenarioSummary], seed: u64) -> Vec<u8> {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{:.3},{},{:.6}",
            r.scenario,
            r.method.as_str(),
            r.iteration,
            r.tokens,
            r.latency_ms,
            r.success,
            r.cost_proxy
        )
        .expect("string write");
    }
    writeln!(out, "# seed,{seed}").expect("string write");
    for s in summaries {
        writeln!(
            out,
            "# summary,{},baseline_html,mean_tokens={:.1},mean_latency_ms={:.3}",
            s.scenario, s.mean_tokens_baseline, s.mean_latency_baseline_ms
        )
        .expect("string write");
        writeln!(
            out,
            "# summary,{},webmcp_optimized,mean_tokens={:.1},mean_latency_ms={:.3}",
            s.scenario, s.mean_tokens_webmcp, s.mean_latency_webmcp_ms
        )
        .expect("string write");
        writeln!(out, "# reduction,{},{:.4}", s.scenario, s.reduction_pct).expect("string write");
    }
    out.into_bytes()
}
