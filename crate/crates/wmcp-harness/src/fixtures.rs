//! Bundled fixture scenarios, development keys, and the server-side
//! endpoint registry. Everything is embedded so the rig runs anywhere
//! without touching the filesystem.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use wmcp_author::lint_document;
use wmcp_core::parse_document;
use wmcp_resolver::EndpointRegistry;
use wmcp_signature::{load_trust_store, TrustStore};

use crate::error::HarnessError;

/// Key id the development document-signing key is pinned under.
pub const DEV_DOC_KEY_ID: &str = "dev-2024";

const DEV_DOC_SEED: [u8; 32] = [0x5a; 32];
const DEV_TOKEN_SEED: [u8; 32] = [0x7c; 32];

const DEV_PINS: &str = include_str!("../../../keys/pins.txt");
const DEV_REGISTRY: &str = include_str!("../../../keys/registry.json");

/// One served page: path, raw HTML, and its sidecar document bytes.
#[derive(Debug, Clone)]
pub struct FixturePage {
    pub path: String,
    pub html: String,
    pub sidecar: String,
}

/// A benchmark scenario: ordered pages, the goal, and the parameter set
/// the agent is given.
#[derive(Debug, Clone)]
pub struct ScenarioFixture {
    pub name: String,
    pub pages: Vec<FixturePage>,
    pub goal: String,
    pub params: BTreeMap<String, String>,
}

impl ScenarioFixture {
    fn new(
        name: &str,
        goal: &str,
        params: &[(&str, &str)],
        pages: Vec<(&str, &str, &str)>,
    ) -> Self {
        ScenarioFixture {
            name: name.to_owned(),
            goal: goal.to_owned(),
            params: params
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            pages: pages
                .into_iter()
                .map(|(path, html, sidecar)| FixturePage {
                    path: path.to_owned(),
                    html: html.to_owned(),
                    sidecar: sidecar.to_owned(),
                })
                .collect(),
        }
    }
}

/// All signing material the origin needs.
#[derive(Debug, Clone)]
pub struct OriginKeys {
    /// Seed of the key documents are signed with.
    pub doc_seed: [u8; 32],
    pub doc_key_id: String,
    /// Seed of the key agent tokens are minted with.
    pub token_seed: [u8; 32],
    /// The symmetric JWE key delivered through `@WMCP_KEYS`.
    pub jwe_key: [u8; 32],
}

/// Development keys matching the checked-in `keys/` directory.
pub fn dev_keys() -> OriginKeys {
    let mut jwe_key = [0u8; 32];
    for (i, byte) in jwe_key.iter_mut().enumerate() {
        *byte = i as u8;
    }
    OriginKeys {
        doc_seed: DEV_DOC_SEED,
        doc_key_id: DEV_DOC_KEY_ID.to_owned(),
        token_seed: DEV_TOKEN_SEED,
        jwe_key,
    }
}

/// The pinned trust store for the development document key.
pub fn dev_trust_store() -> TrustStore {
    load_trust_store(DEV_PINS.as_bytes()).expect("bundled pin file is valid")
}

/// The server-side registry for every bundled scenario.
pub fn dev_registry() -> EndpointRegistry {
    EndpointRegistry::from_json(DEV_REGISTRY.as_bytes()).expect("bundled registry is valid")
}

/// Deterministic per-scenario CSRF token value the origin injects and
/// validates.
pub fn scenario_csrf_value(scenario: &str) -> String {
    let digest = Sha256::digest(format!("wmcp-csrf:{scenario}").as_bytes());
    hex::encode(&digest[..16])
}

/// The three bundled scenarios.
pub fn builtin_scenarios() -> Vec<ScenarioFixture> {
    vec![
        ScenarioFixture::new(
            "ecommerce",
            "Buy the aurora desk lamp",
            &[
                ("QUERY", "aurora desk lamp"),
                ("QTY", "1"),
                ("PROMO", "SPRING10"),
                ("SHIP_NAME", "Avery Quinn"),
                ("SHIP_ADDR", "12 Canal Walk, Portsmouth"),
            ],
            vec![
                (
                    "/shop/search.html",
                    include_str!("../fixtures/ecommerce/search.html"),
                    include_str!("../fixtures/ecommerce/search.wmcp"),
                ),
                (
                    "/shop/product.html",
                    include_str!("../fixtures/ecommerce/product.html"),
                    include_str!("../fixtures/ecommerce/product.wmcp"),
                ),
                (
                    "/shop/cart.html",
                    include_str!("../fixtures/ecommerce/cart.html"),
                    include_str!("../fixtures/ecommerce/cart.wmcp"),
                ),
                (
                    "/shop/checkout.html",
                    include_str!("../fixtures/ecommerce/checkout.html"),
                    include_str!("../fixtures/ecommerce/checkout.wmcp"),
                ),
            ],
        ),
        ScenarioFixture::new(
            "auth",
            "Log in",
            &[("USERNAME", "avery"), ("PASSWORD", "correct-horse")],
            vec![(
                "/account/login.html",
                include_str!("../fixtures/auth/login.html"),
                include_str!("../fixtures/auth/login.wmcp"),
            )],
        ),
        ScenarioFixture::new(
            "dynamic",
            "Post a comment",
            &[("COMMENT", "The 71cm pendant height worked for us too.")],
            vec![
                (
                    "/feed/live.html",
                    include_str!("../fixtures/dynamic/live.html"),
                    include_str!("../fixtures/dynamic/live.wmcp"),
                ),
                (
                    "/feed/live-update.html",
                    include_str!("../fixtures/dynamic/live-update.html"),
                    include_str!("../fixtures/dynamic/live-update.wmcp"),
                ),
            ],
        ),
    ]
}

/// Check the fixture invariants: every sidecar lints clean and the final
/// page carries exactly one submit-capable action.
pub fn validate_fixture(fixture: &ScenarioFixture) -> Result<(), HarnessError> {
    if fixture.pages.is_empty() {
        return Err(HarnessError::FixtureInvalid(format!(
            "{}: no pages",
            fixture.name
        )));
    }
    for page in &fixture.pages {
        let report = lint_document(page.sidecar.as_bytes());
        if !report.errors.is_empty() {
            return Err(HarnessError::FixtureInvalid(format!(
                "{}: sidecar for {} has lint errors: {:?}",
                fixture.name, page.path, report.errors
            )));
        }
    }
    let last = fixture.pages.last().expect("non-empty");
    let doc = parse_document(last.sidecar.as_bytes())
        .map_err(|e| HarnessError::FixtureInvalid(format!("{}: {e}", fixture.name)))?;
    let actions = doc.elements.iter().filter(|e| e.action.is_some()).count();
    if actions != 1 {
        return Err(HarnessError::FixtureInvalid(format!(
            "{}: final page must end in exactly one action, found {actions}",
            fixture.name
        )));
    }
    Ok(())
}

const SCALING_SIDECAR: &str = include_str!("../fixtures/scaling/panel.wmcp");

const SCALING_FILLER: &str = r#"<section class="status-block">
  <h2>Subsystem report</h2>
  <p>All probes answered within budget during the last interval. Queue depth stayed
  under the alert threshold and no retries were escalated to operators.</p>
  <table><tr><th>Probe</th><th>p50</th><th>p99</th><th>State</th></tr>
  <tr><td>ingest</td><td>12ms</td><td>40ms</td><td>ok</td></tr>
  <tr><td>index</td><td>8ms</td><td>31ms</td><td>ok</td></tr>
  <tr><td>serve</td><td>4ms</td><td>19ms</td><td>ok</td></tr></table>
</section>
"#;

/// Build the scaling-family page `P_k`: fixed interactive elements plus
/// `k` repeated non-interactive content blocks.
pub fn scaled_page(k: usize) -> (String, &'static str) {
    let mut html = String::from(
        r#"<!DOCTYPE html>
<html lang="en">
<head><meta charset="utf-8"><title>Status panel</title></head>
<body>
<main>
<h1>Status panel</h1>
"#,
    );
    for _ in 0..k {
        html.push_str(SCALING_FILLER);
    }
    html.push_str(
        r#"<form id="ack-form" method="post" action="/api/ack">
  <label for="ack-note">Note</label>
  <input type="text" id="ack-note" name="note">
  <button id="ack-send" type="submit">Acknowledge</button>
</form>
</main>
</body>
</html>
"#,
    );
    (html, SCALING_SIDECAR)
}
