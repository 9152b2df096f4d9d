//! The deterministic scripted agent.
//!
//! Two paths per page. Baseline downloads the full HTML, counts its
//! tokens, locates the form with the scanner, and submits. The optimized
//! path fetches the signed sidecar, verifies the signature *before any
//! parsing*, builds the interaction graph, counts only the compact prompt
//! (goal + elements + params), resolves the shielded endpoint with a
//! scoped token, applies CSRF, and submits. Each step carries an ordered
//! trace so tests can assert the verification-precedes-parsing order.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;
use std::time::Instant;

use scraper::{ElementRef, Html, Selector};
use wmcp_core::{parse_document, CsrfMode, CsrfPolicy, EndpointRef, WmcpDocument};
use wmcp_graph::{build_graph, estimate_tokens, plan_for_goal, AgentPrompt, GraphError};
use wmcp_resolver::{Decision, ThrottleState};
use wmcp_secure_payload::{
    apply_csrf, decrypt_payload, extract_csrf_token, ActionRequest, CompactJwe, RequestBody,
};
use wmcp_signature::{decode_sig_value, verify_bundle, SignedBundle, TrustStore};

use crate::error::HarnessError;
use crate::origin::OriginHandle;

/// Every scope the mock origin knows; the baseline agent has no metadata
/// to derive least privilege from, so it asks for the lot.
pub const TEST_SCOPES: &[&str] = &[
    "shop:search",
    "cart:write",
    "cart:review",
    "checkout:submit",
    "auth:login",
    "feed:comment",
    "panel:ack",
];

/// Benchmark method labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    BaselineHtml,
    WebmcpOptimized,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::BaselineHtml => "baseline_html",
            Method::WebmcpOptimized => "webmcp_optimized",
        }
    }
}

/// One benchmark record (per page step; the runner aggregates per
/// scenario run).
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub scenario: String,
    pub method: Method,
    pub iteration: u32,
    pub tokens: u64,
    pub latency_ms: f64,
    pub success: bool,
    pub cost_proxy: f64,
    /// Ordered step log, e.g. `verified` before `parsed`.
    pub trace: Vec<String>,
}

/// The scripted client: HTTP transport, pinned trust store, and the
/// per-endpoint self-throttle states hinted by sidecar policies.
pub struct Agent {
    base: String,
    http: reqwest::blocking::Client,
    pins: TrustStore,
    throttles: Mutex<HashMap<String, ThrottleState>>,
    cost_per_1k: f64,
}

impl Agent {
    pub fn new(origin: &OriginHandle, pins: TrustStore) -> Self {
        Agent {
            base: origin.base_url(),
            http: reqwest::blocking::Client::new(),
            pins,
            throttles: Mutex::new(HashMap::new()),
            cost_per_1k: 0.01,
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.base, path)
    }

    fn get(&self, path: &str) -> Result<(u16, Vec<u8>, Option<String>), HarnessError> {
        let response = self
            .http
            .get(self.url(path))
            .send()
            .map_err(|e| HarnessError::HttpFailure(e.to_string()))?;
        let status = response.status().as_u16();
        let sig = response
            .headers()
            .get("x-wmcp-sig")
            .and_then(|v| v.to_str().ok())
            .map(str::to_owned);
        let body = response
            .bytes()
            .map_err(|e| HarnessError::HttpFailure(e.to_string()))?
            .to_vec();
        Ok((status, body, sig))
    }

    fn mint_token(&self, scopes: &[String], ttl: u64) -> Result<Option<String>, HarnessError> {
        let response = self
            .http
            .post(self.url("/wmcp/token"))
            .json(&serde_json::json!({
                "subject": "bench-agent",
                "scopes": scopes,
                "ttl": ttl,
            }))
            .send()
            .map_err(|e| HarnessError::HttpFailure(e.to_string()))?;
        if !response.status().is_success() {
            return Ok(None);
        }
        let value: serde_json::Value = response
            .json()
            .map_err(|e| HarnessError::HttpFailure(e.to_string()))?;
        Ok(value
            .get("token")
            .and_then(|t| t.as_str())
            .map(str::to_owned))
    }

    fn resolve(&self, symbol: &str, token: &str) -> Result<Result<String, u16>, HarnessError> {
        let response = self
            .http
            .post(self.url("/wmcp/resolve"))
            .bearer_auth(token)
            .json(&serde_json::json!({ "symbol": symbol }))
            .send()
            .map_err(|e| HarnessError::HttpFailure(e.to_string()))?;
        let status = response.status().as_u16();
        if status != 200 {
            return Ok(Err(status));
        }
        let value: serde_json::Value = response
            .json()
            .map_err(|e| HarnessError::HttpFailure(e.to_string()))?;
        match value.get("url").and_then(|u| u.as_str()) {
            Some(url) => Ok(Ok(url.to_owned())),
            None => Ok(Err(500)),
        }
    }

    fn submit(&self, request: &ActionRequest, bearer: &str) -> Result<u16, HarnessError> {
        let mut builder = match request.method.as_str() {
            "GET" => self.http.get(self.url(&request.url)),
            _ => self.http.post(self.url(&request.url)),
        };
        builder = builder.bearer_auth(bearer);
        for (name, value) in &request.headers {
            builder = builder.header(name, value);
        }
        let builder = match &request.body {
            RequestBody::Form(fields) => builder.form(fields),
            RequestBody::Json(obj) => builder.json(obj),
        };
        let response = builder
            .send()
            .map_err(|e| HarnessError::HttpFailure(e.to_string()))?;
        Ok(response.status().as_u16())
    }

    /// Honor the sidecar's rpm/burst hints before hitting an endpoint.
    fn self_throttle(&self, symbol: &str, doc: &WmcpDocument, trace: &mut Vec<String>) {
        let Some(policy) = doc
            .security
            .as_ref()
            .and_then(|s| s.endpoints.get(symbol))
        else {
            return;
        };
        let now = crate::clock::Clock::now(&crate::clock::WallClock);
        let mut throttles = self.throttles.lock().expect("throttle map lock");
        let Some(state) = ThrottleState::from_policy(policy, now).map(|fresh| {
            throttles
                .entry(symbol.to_owned())
                .or_insert(fresh)
        }) else {
            return;
        };
        if let Decision::WaitUntil(at) = state.acquire(now) {
            let wait = at.saturating_sub(now).min(2);
            trace.push(format!("self-throttled:{wait}s"));
            std::thread::sleep(std::time::Duration::from_secs(wait));
            state.acquire(crate::clock::Clock::now(&crate::clock::WallClock));
        }
    }
}

/// Execute one page step. Security failures become `success = false`
/// records; only transport-level breakage errors out.
pub fn run_agent_step(
    agent: &Agent,
    method: Method,
    scenario: &str,
    page_path: &str,
    goal: &str,
    params: &BTreeMap<String, String>,
    iteration: u32,
) -> Result<RunRecord, HarnessError> {
    let started = Instant::now();
    let mut trace = Vec::new();
    let (tokens, success) = match method {
        Method::BaselineHtml => baseline_step(agent, page_path, params, &mut trace)?,
        Method::WebmcpOptimized => webmcp_step(agent, page_path, goal, params, &mut trace)?,
    };
    let latency_ms = started.elapsed().as_secs_f64() * 1000.0;
    Ok(RunRecord {
        scenario: scenario.to_owned(),
        method,
        iteration,
        tokens,
        latency_ms,
        success,
        cost_proxy: tokens as f64 * agent.cost_per_1k / 1000.0,
        trace,
    })
}

fn default_csrf_policy() -> CsrfPolicy {
    CsrfPolicy {
        token_field: "csrf_token".into(),
        header_name: "X-CSRF-TOKEN".into(),
        mode: CsrfMode::DoubleSubmit,
    }
}

fn baseline_step(
    agent: &Agent,
    page_path: &str,
    params: &BTreeMap<String, String>,
    trace: &mut Vec<String>,
) -> Result<(u64, bool), HarnessError> {
    let (status, html, _) = agent.get(page_path)?;
    if status != 200 {
        trace.push(format!("page-fetch-failed:{status}"));
        return Ok((0, false));
    }
    trace.push("page-fetched".into());

    // The whole page goes into the model's context.
    let tokens = estimate_tokens(&html);

    // Locate the form via the scanner.
    let suggestion = scan(&html, trace)?;
    let Some(action_el) = suggestion
        .document
        .elements
        .iter()
        .find(|e| e.action.is_some())
    else {
        trace.push("no-form".into());
        return Ok((tokens, true)); // browse-only page
    };
    let action = action_el.action.as_ref().expect("filtered on action");
    let EndpointRef::Literal(url) = &action.endpoint else {
        trace.push("symbolic-endpoint-unusable".into());
        return Ok((tokens, false));
    };

    // Fill the form from the raw HTML field names.
    let mut fields = BTreeMap::new();
    let dom = Html::parse_document(&String::from_utf8_lossy(&html));
    let named = Selector::parse("form input[name], form textarea[name], form select[name]")
        .expect("static selector");
    for el in dom.select(&named) {
        fill_field(el, params, &mut fields);
    }

    let policy = default_csrf_policy();
    let Ok(csrf) = extract_csrf_token(&html, &policy) else {
        trace.push("csrf-not-found".into());
        return Ok((tokens, false));
    };
    let request = apply_csrf(
        ActionRequest::new(action.kind.as_str(), url.clone(), RequestBody::Form(fields)),
        &csrf,
        &policy,
    );

    let scopes: Vec<String> = TEST_SCOPES.iter().map(|s| s.to_string()).collect();
    let Some(token) = agent.mint_token(&scopes, 300)? else {
        trace.push("token-mint-failed".into());
        return Ok((tokens, false));
    };
    let status = agent.submit(&request, &token)?;
    trace.push(format!("submitted:{status}"));
    Ok((tokens, status == 200))
}

fn fill_field(
    el: ElementRef<'_>,
    params: &BTreeMap<String, String>,
    fields: &mut BTreeMap<String, String>,
) {
    let Some(name) = el.value().attr("name") else {
        return;
    };
    if el.value().attr("type").is_some_and(|t| t == "hidden") {
        return;
    }
    let param_key: String = name
        .chars()
        .filter_map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                Some(c.to_ascii_uppercase())
            } else {
                None
            }
        })
        .collect();
    if let Some(value) = params.get(&param_key) {
        fields.insert(name.to_owned(), value.clone());
    }
}

fn scan(html: &[u8], trace: &mut Vec<String>) -> Result<wmcp_author::ScanSuggestion, HarnessError> {
    match wmcp_author::scan_html(html) {
        Ok(s) => {
            trace.push("scanned".into());
            Ok(s)
        }
        Err(e) => Err(HarnessError::HttpFailure(format!("scan failed: {e}"))),
    }
}

fn webmcp_step(
    agent: &Agent,
    page_path: &str,
    goal: &str,
    params: &BTreeMap<String, String>,
    trace: &mut Vec<String>,
) -> Result<(u64, bool), HarnessError> {
    // The page is fetched for the CSRF tag the server injected; its bytes
    // never enter the prompt.
    let (page_status, page_html, _) = agent.get(page_path)?;
    if page_status != 200 {
        trace.push(format!("page-fetch-failed:{page_status}"));
        return Ok((0, false));
    }
    trace.push("page-fetched".into());

    let (status, sidecar, sig) = agent.get(&format!("{page_path}.wmcp"))?;
    if status != 200 {
        trace.push(format!("sidecar-fetch-failed:{status}"));
        return Ok((0, false));
    }
    trace.push("sidecar-fetched".into());

    // Verification strictly precedes parsing.
    let Some(sig_value) = sig else {
        trace.push("signature-missing".into());
        return Ok((0, false));
    };
    let Ok((key_id, signature)) = decode_sig_value(&sig_value) else {
        trace.push("signature-malformed".into());
        return Ok((0, false));
    };
    let bundle = SignedBundle {
        document_bytes: sidecar,
        signature,
        key_id,
    };
    let verified = match verify_bundle(&bundle, &agent.pins) {
        Ok(bytes) => {
            trace.push("verified".into());
            bytes
        }
        Err(e) => {
            trace.push(format!("verify-failed:{e}"));
            return Ok((0, false));
        }
    };

    let doc = match parse_document(verified) {
        Ok(doc) => {
            trace.push("parsed".into());
            doc
        }
        Err(e) => {
            trace.push(format!("parse-failed:{e}"));
            return Ok((0, false));
        }
    };

    let graph = match build_graph(&doc) {
        Ok(g) => g,
        Err(e) => {
            trace.push(format!("graph-failed:{e}"));
            return Ok((0, false));
        }
    };

    // The compact prompt is all the model would see.
    let prompt = AgentPrompt::new(goal, &doc, params.clone());
    let tokens = estimate_tokens(&prompt.render());

    let plan = match plan_for_goal(&graph, goal, params) {
        Ok(plan) => plan,
        Err(GraphError::NoActionableElement) => {
            trace.push("browse-only".into());
            return Ok((tokens, true));
        }
        Err(e) => {
            trace.push(format!("plan-failed:{e}"));
            return Ok((tokens, false));
        }
    };
    trace.push("planned".into());

    let submit_name = &plan.steps.last().expect("plan has a submit").element;
    let action = graph
        .get(submit_name)
        .and_then(|n| n.element.action.as_ref())
        .expect("submit node carries the action");

    // Least privilege: request exactly the scopes the document declares.
    let (resolved_url, bearer) = match &action.endpoint {
        EndpointRef::Symbolic(symbol) => {
            let policy = doc
                .security
                .as_ref()
                .and_then(|s| s.endpoints.get(symbol.as_str()));
            let (scopes, ttl) = match policy {
                Some(p) => (
                    p.scopes
                        .iter()
                        .map(|s| s.as_str().to_owned())
                        .collect::<Vec<_>>(),
                    p.expires,
                ),
                None => (Vec::new(), 300),
            };
            let Some(token) = agent.mint_token(&scopes, ttl)? else {
                trace.push("token-mint-failed".into());
                return Ok((tokens, false));
            };
            agent.self_throttle(symbol, &doc, trace);
            match agent.resolve(symbol, &token)? {
                Ok(url) => {
                    trace.push("resolved".into());
                    (url, token)
                }
                Err(code) => {
                    trace.push(format!("resolve-failed:{code}"));
                    return Ok((tokens, false));
                }
            }
        }
        EndpointRef::Literal(url) => {
            let scopes: Vec<String> = TEST_SCOPES.iter().map(|s| s.to_string()).collect();
            let Some(token) = agent.mint_token(&scopes, 300)? else {
                trace.push("token-mint-failed".into());
                return Ok((tokens, false));
            };
            (url.clone(), token)
        }
    };

    // Encrypted payload hint: fetch the key through the tokenised map and
    // prove the hint decrypts.
    if let Some(jwe_compact) = &action.payload_jwe {
        if let Some(key_token) = agent.mint_token(&["payload:key".to_owned()], 120)? {
            if let Ok(Some(key)) = fetch_jwe_key(agent, &key_token) {
                match CompactJwe::parse(jwe_compact)
                    .and_then(|jwe| decrypt_payload(&jwe, &key))
                {
                    Ok(_) => trace.push("payload-decrypted".into()),
                    Err(e) => trace.push(format!("payload-undecryptable:{e}")),
                }
            }
        }
    }

    let mut fields = BTreeMap::new();
    for step in &plan.steps {
        if let (wmcp_graph::PlanOp::Fill, Some(param)) = (step.operation, step.param.as_ref()) {
            if let Some(value) = params.get(param) {
                fields.insert(param.clone(), value.clone());
            }
        }
    }
    let mut request = ActionRequest::new(
        action.kind.as_str(),
        resolved_url,
        RequestBody::Form(fields),
    );
    if action.csrf_tag.is_some() {
        if let Some(policy) = doc.security.as_ref().and_then(|s| s.csrf.as_ref()) {
            match extract_csrf_token(&page_html, policy) {
                Ok(csrf) => {
                    request = apply_csrf(request, &csrf, policy);
                    trace.push("csrf-applied".into());
                }
                Err(e) => {
                    trace.push(format!("csrf-extract-failed:{e}"));
                    return Ok((tokens, false));
                }
            }
        }
    }

    let status = agent.submit(&request, &bearer)?;
    trace.push(format!("submitted:{status}"));
    Ok((tokens, status == 200))
}

fn fetch_jwe_key(agent: &Agent, token: &str) -> Result<Option<Vec<u8>>, HarnessError> {
    let response = agent
        .http
        .get(agent.url("/wmcp/keys"))
        .bearer_auth(token)
        .send()
        .map_err(|e| HarnessError::HttpFailure(e.to_string()))?;
    if !response.status().is_success() {
        return Ok(None);
    }
    let value: serde_json::Value = response
        .json()
        .map_err(|e| HarnessError::HttpFailure(e.to_string()))?;
    Ok(value
        .get("jwe_key_hex")
        .and_then(|k| k.as_str())
        .and_then(|k| hex::decode(k).ok()))
}
