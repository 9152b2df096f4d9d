//! The embedded mock origin.
//!
//! Serves each fixture page (with the CSRF meta tag injected), its signed
//! sidecar, and the action routes with the security gates live:
//! throttling (429), agent-token scopes with resolve semantics (401/403),
//! and CSRF validation (403). Also exposes the token mint, the resolve
//! route, and the scope-gated JWE key delivery.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::{to_bytes, Body};
use axum::extract::State;
use axum::http::{header, HeaderMap, Method as HttpMethod, Request, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::any;
use axum::Router;
use tokio::sync::oneshot;
use wmcp_core::{parse_document, CsrfMode, CsrfPolicy};
use wmcp_resolver::{
    issue_agent_token, resolve_endpoint, verify_agent_token, AgentToken, Decision,
    EndpointRegistry, ResolverError, ThrottleState,
};
use wmcp_signature::{encode_sig_value, sign_bundle, VerifyingKey};

use crate::clock::{Clock, WallClock};
use crate::error::HarnessError;
use crate::fixtures::{scenario_csrf_value, validate_fixture, OriginKeys, ScenarioFixture};

/// Media type for sidecar responses.
const WEBMCP_CONTENT_TYPE: &str = "application/webmcp+json";

struct ServedPage {
    html: String,
    sidecar: Vec<u8>,
    sig_value: String,
    scenario: String,
}

struct CsrfConfig {
    value: String,
    policy: CsrfPolicy,
}

struct OriginState {
    pages: HashMap<String, ServedPage>,
    actions: HashMap<String, (String, String)>, // url path -> (symbol, scenario)
    registry: EndpointRegistry,
    throttles: HashMap<String, ThrottleState>,
    csrf: HashMap<String, CsrfConfig>,
    token_seed: [u8; 32],
    token_key: VerifyingKey,
    jwe_key: [u8; 32],
    clock: Arc<dyn Clock>,
}

/// A running origin. Dropping the handle shuts the server down.
pub struct OriginHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<std::thread::JoinHandle<()>>,
}

impl OriginHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for OriginHandle {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(handle) = self.thread.take() {
            let _ = handle.join();
        }
    }
}

/// Start the origin on `port` (0 picks a free port) with the wall clock.
pub fn start_origin(
    fixtures: &[ScenarioFixture],
    registry: EndpointRegistry,
    keys: OriginKeys,
    port: u16,
) -> Result<OriginHandle, HarnessError> {
    start_origin_with_clock(fixtures, registry, keys, port, Arc::new(WallClock))
}

/// Start the origin with an injected clock (expiry and throttle decisions
/// read it; latency is always wall time on the client side).
pub fn start_origin_with_clock(
    fixtures: &[ScenarioFixture],
    registry: EndpointRegistry,
    keys: OriginKeys,
    port: u16,
    clock: Arc<dyn Clock>,
) -> Result<OriginHandle, HarnessError> {
    for fixture in fixtures {
        validate_fixture(fixture)?;
    }

    let mut pages = HashMap::new();
    let mut actions = HashMap::new();
    let mut csrf = HashMap::new();

    for fixture in fixtures {
        let mut policy_for_scenario: Option<CsrfPolicy> = None;
        for page in &fixture.pages {
            let bundle = sign_bundle(page.sidecar.as_bytes(), &keys.doc_seed, &keys.doc_key_id)
                .map_err(|e| HarnessError::FixtureInvalid(e.to_string()))?;
            pages.insert(
                page.path.clone(),
                ServedPage {
                    html: page.html.clone(),
                    sidecar: page.sidecar.as_bytes().to_vec(),
                    sig_value: encode_sig_value(&keys.doc_key_id, &bundle.signature),
                    scenario: fixture.name.clone(),
                },
            );
            let doc = parse_document(page.sidecar.as_bytes())
                .map_err(|e| HarnessError::FixtureInvalid(format!("{}: {e}", page.path)))?;
            if let Some(security) = &doc.security {
                if let Some(policy) = &security.csrf {
                    policy_for_scenario.get_or_insert_with(|| policy.clone());
                }
                for symbol in security.endpoints.keys() {
                    if let Some(entry) = registry.get(symbol) {
                        actions.insert(entry.url.clone(), (symbol.clone(), fixture.name.clone()));
                    }
                }
            }
        }
        csrf.insert(
            fixture.name.clone(),
            CsrfConfig {
                value: scenario_csrf_value(&fixture.name),
                policy: policy_for_scenario.unwrap_or(CsrfPolicy {
                    token_field: "csrf_token".into(),
                    header_name: "X-CSRF-TOKEN".into(),
                    mode: CsrfMode::DoubleSubmit,
                }),
            },
        );
    }

    let now = clock.now();
    let mut throttles = HashMap::new();
    for (symbol, entry) in registry.iter() {
        if let Some(state) = ThrottleState::from_policy(&entry.policy, now) {
            throttles.insert(symbol.to_owned(), state);
        }
    }

    let token_key = wmcp_signature::verifying_key_from_bytes(
        &wmcp_signature::public_key_bytes(&keys.token_seed)
            .map_err(|e| HarnessError::FixtureInvalid(e.to_string()))?,
    )
    .map_err(|e| HarnessError::FixtureInvalid(e.to_string()))?;

    let state = Arc::new(OriginState {
        pages,
        actions,
        registry,
        throttles,
        csrf,
        token_seed: keys.token_seed,
        token_key,
        jwe_key: keys.jwe_key,
        clock,
    });

    let listener = std::net::TcpListener::bind(("127.0.0.1", port))
        .map_err(|e| HarnessError::PortUnavailable(e.to_string()))?;
    listener
        .set_nonblocking(true)
        .map_err(|e| HarnessError::PortUnavailable(e.to_string()))?;
    let addr = listener
        .local_addr()
        .map_err(|e| HarnessError::PortUnavailable(e.to_string()))?;

    let (tx, rx) = oneshot::channel::<()>();
    let thread = std::thread::spawn(move || {
        let runtime = tokio::runtime::Builder::new_current_thread()
            .enable_all()
            .build()
            .expect("tokio runtime");
        runtime.block_on(async move {
            let app = Router::new()
                .fallback(any(handle_request))
                .with_state(state);
            let listener = tokio::net::TcpListener::from_std(listener).expect("listener");
            axum::serve(listener, app)
                .with_graceful_shutdown(async {
                    let _ = rx.await;
                })
                .await
                .expect("origin serve");
        });
    });

    Ok(OriginHandle {
        addr,
        shutdown: Some(tx),
        thread: Some(thread),
    })
}

async fn handle_request(
    State(state): State<Arc<OriginState>>,
    request: Request<Body>,
) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_owned();
    let query = request.uri().query().map(str::to_owned);
    let headers = request.headers().clone();
    let body = match to_bytes(request.into_body(), 1 << 20).await {
        Ok(bytes) => bytes,
        Err(_) => return status_json(StatusCode::PAYLOAD_TOO_LARGE, "body too large"),
    };

    match (method, path.as_str()) {
        (HttpMethod::POST, "/wmcp/token") => mint_token(&state, &body),
        (HttpMethod::POST, "/wmcp/resolve") => resolve_symbol(&state, &headers, &body),
        (HttpMethod::GET, "/wmcp/keys") => deliver_key(&state, &headers, query.as_deref()),
        (HttpMethod::GET, p) if p.ends_with(".wmcp") => serve_sidecar(&state, p),
        (HttpMethod::GET, p) => serve_page(&state, p),
        (HttpMethod::POST, p) => handle_action(&state, p, &headers, &body),
        _ => status_json(StatusCode::METHOD_NOT_ALLOWED, "method not allowed"),
    }
}

fn serve_page(state: &OriginState, path: &str) -> Response {
    let Some(page) = state.pages.get(path) else {
        return status_json(StatusCode::NOT_FOUND, "no such page");
    };
    let csrf = &state.csrf[&page.scenario];
    let meta = format!(
        "<head>\n  <meta name=\"{}\" value=\"{}\">",
        csrf.policy.token_field, csrf.value
    );
    let html = page.html.replacen("<head>", &meta, 1);
    (
        StatusCode::OK,
        [(header::CONTENT_TYPE, "text/html; charset=utf-8")],
        html,
    )
        .into_response()
}

fn serve_sidecar(state: &OriginState, path: &str) -> Response {
    let page_path = path.trim_end_matches(".wmcp");
    let Some(page) = state.pages.get(page_path) else {
        return status_json(StatusCode::NOT_FOUND, "no such sidecar");
    };
    (
        StatusCode::OK,
        [
            ("content-type", WEBMCP_CONTENT_TYPE),
            ("x-wmcp-sig", page.sig_value.as_str()),
        ],
        page.sidecar.clone(),
    )
        .into_response()
}

fn mint_token(state: &OriginState, body: &[u8]) -> Response {
    let Ok(req) = serde_json::from_slice::<serde_json::Value>(body) else {
        return status_json(StatusCode::BAD_REQUEST, "token request must be JSON");
    };
    let subject = req
        .get("subject")
        .and_then(|v| v.as_str())
        .unwrap_or("test-agent");
    let scopes: Vec<String> = req
        .get("scopes")
        .and_then(|v| v.as_array())
        .map(|a| {
            a.iter()
                .filter_map(|s| s.as_str().map(str::to_owned))
                .collect()
        })
        .unwrap_or_default();
    let ttl = req.get("ttl").and_then(|v| v.as_u64()).unwrap_or(300);

    match issue_agent_token(subject, &scopes, ttl, &state.token_seed, state.clock.now()) {
        Ok(token) => json_ok(serde_json::json!({ "token": token.compact })),
        Err(e) => status_json(StatusCode::BAD_REQUEST, &e.to_string()),
    }
}

fn bearer_token(
    state: &OriginState,
    headers: &HeaderMap,
) -> Result<AgentToken, Box<Response>> {
    let value = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .ok_or_else(|| Box::new(status_json(StatusCode::UNAUTHORIZED, "missing bearer token")))?;
    let compact = value
        .strip_prefix("Bearer ")
        .ok_or_else(|| {
            Box::new(status_json(StatusCode::UNAUTHORIZED, "authorization must be Bearer"))
        })?;
    let claims = verify_agent_token(compact, &state.token_key).map_err(|e| {
        Box::new(status_json(
            StatusCode::from_u16(e.http_status()).unwrap(),
            &e.to_string(),
        ))
    })?;
    Ok(AgentToken {
        compact: compact.to_owned(),
        claims,
    })
}

fn resolve_symbol(state: &OriginState, headers: &HeaderMap, body: &[u8]) -> Response {
    let token = match bearer_token(state, headers) {
        Ok(t) => t,
        Err(resp) => return *resp,
    };
    let Ok(req) = serde_json::from_slice::<serde_json::Value>(body) else {
        return status_json(StatusCode::BAD_REQUEST, "resolve request must be JSON");
    };
    let Some(symbol) = req.get("symbol").and_then(|v| v.as_str()) else {
        return status_json(StatusCode::BAD_REQUEST, "missing symbol");
    };
    match resolve_endpoint(
        symbol,
        &token,
        &state.registry,
        &state.token_key,
        state.clock.now(),
    ) {
        Ok(url) => json_ok(serde_json::json!({ "url": url })),
        Err(e) => resolver_error(&e),
    }
}

/// JWE key delivery through the tokenised endpoint map, plus the
/// downgrade path for agents without JWE support: with scope
/// `payload:plaintext` and `?downgrade=plaintext&jwe=<compact>`, the
/// origin decrypts the payload hint server-side and returns the
/// plaintext field instead of the key.
fn deliver_key(state: &OriginState, headers: &HeaderMap, query: Option<&str>) -> Response {
    let token = match bearer_token(state, headers) {
        Ok(t) => t,
        Err(resp) => return *resp,
    };
    if token.claims.is_expired(state.clock.now()) {
        return status_json(StatusCode::UNAUTHORIZED, "agent token expired");
    }

    let query_map: std::collections::BTreeMap<String, String> = query
        .map(|q| serde_urlencoded::from_str(q).unwrap_or_default())
        .unwrap_or_default();

    if query_map.get("downgrade").map(String::as_str) == Some("plaintext") {
        if !token.claims.scopes.iter().any(|s| s == "payload:plaintext") {
            return status_json(
                StatusCode::FORBIDDEN,
                "plaintext downgrade requires scope payload:plaintext",
            );
        }
        let Some(compact) = query_map.get("jwe") else {
            return status_json(StatusCode::BAD_REQUEST, "downgrade requires a jwe parameter");
        };
        return match wmcp_secure_payload::CompactJwe::parse(compact)
            .and_then(|jwe| wmcp_secure_payload::decrypt_payload(&jwe, &state.jwe_key))
        {
            Ok(plaintext) => json_ok(serde_json::json!({
                "payload_plaintext": String::from_utf8_lossy(&plaintext),
            })),
            Err(e) => status_json(StatusCode::BAD_REQUEST, &e.to_string()),
        };
    }

    match resolve_endpoint(
        wmcp_resolver::KEY_DELIVERY_SYMBOL,
        &token,
        &state.registry,
        &state.token_key,
        state.clock.now(),
    ) {
        Ok(_) => json_ok(serde_json::json!({ "jwe_key_hex": hex::encode(state.jwe_key) })),
        Err(e) => resolver_error(&e),
    }
}

fn handle_action(
    state: &OriginState,
    path: &str,
    headers: &HeaderMap,
    body: &[u8],
) -> Response {
    let Some((symbol, scenario)) = state.actions.get(path) else {
        return status_json(StatusCode::NOT_FOUND, "no such action");
    };

    // Gate 1: throttle.
    if let Some(throttle) = state.throttles.get(symbol) {
        if let Decision::WaitUntil(at) = throttle.acquire(state.clock.now()) {
            let retry_after = at.saturating_sub(state.clock.now()).max(1).to_string();
            return (
                StatusCode::TOO_MANY_REQUESTS,
                [(header::RETRY_AFTER, retry_after)],
                "throttled",
            )
                .into_response();
        }
    }

    // Gate 2: agent token with resolve semantics.
    let token = match bearer_token(state, headers) {
        Ok(t) => t,
        Err(resp) => return *resp,
    };
    if let Err(e) = resolve_endpoint(
        symbol,
        &token,
        &state.registry,
        &state.token_key,
        state.clock.now(),
    ) {
        return resolver_error(&e);
    }

    // Gate 3: CSRF.
    let csrf = &state.csrf[scenario];
    let body_value = body_field(headers, body, &csrf.policy.token_field);
    let body_ok = body_value.as_deref() == Some(csrf.value.as_str());
    let header_value = headers
        .get(csrf.policy.header_name.as_str())
        .and_then(|v| v.to_str().ok());
    let csrf_ok = match csrf.policy.mode {
        CsrfMode::DoubleSubmit => body_ok && header_value == Some(csrf.value.as_str()),
        CsrfMode::Synchroniser => body_ok,
    };
    if !csrf_ok {
        return status_json(StatusCode::FORBIDDEN, "csrf validation failed");
    }

    json_ok(serde_json::json!({ "ok": true, "action": symbol }))
}

fn body_field(headers: &HeaderMap, body: &[u8], field: &str) -> Option<String> {
    let content_type = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .unwrap_or("");
    if content_type.starts_with("application/json") {
        let value: serde_json::Value = serde_json::from_slice(body).ok()?;
        return value.get(field).and_then(|v| v.as_str()).map(str::to_owned);
    }
    let fields: std::collections::BTreeMap<String, String> =
        serde_urlencoded::from_bytes(body).ok()?;
    fields.get(field).cloned()
}

fn resolver_error(e: &ResolverError) -> Response {
    status_json(
        StatusCode::from_u16(e.http_status()).unwrap_or(StatusCode::BAD_REQUEST),
        &e.to_string(),
    )
}

fn json_ok(value: serde_json::Value) -> Response {
    (
        StatusCode::OK,
        [(header::CONTENT_TYPE, "application/json")],
        value.to_string(),
    )
        .into_response()
}

fn status_json(code: StatusCode, message: &str) -> Response {
    (
        code,
        [(header::CONTENT_TYPE, "application/json")],
        serde_json::json!({ "error": message }).to_string(),
    )
        .into_response()
}
