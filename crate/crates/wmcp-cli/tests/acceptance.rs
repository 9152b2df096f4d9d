//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Expected values marked as golden were computed with independent
//! one-off oracles (a reference Ed25519/JOSE implementation and a
//! standalone tokenizer script) before the corresponding modules were
//! built, then frozen here.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use wmcp_core::{parse_document, parse_structural, validate_document, CoreError};
use wmcp_harness::{
    builtin_scenarios, dev_keys, dev_registry, dev_trust_store, run_benchmark, scaled_page,
    scenario_csrf_value, start_origin,
};
use wmcp_resolver::{issue_agent_token, resolve_endpoint, Decision, ThrottleState};
use wmcp_signature::{sign_bundle, verify_bundle, SignatureError, TrustStore};

const LOGIN_FIXTURE: &str = include_str!("../../wmcp-core/fixtures/login.wmcp");

// Golden token counts for the bundled scenarios (tokenizer oracle).
const GOLDEN_TOKENS: &[(&str, u64, u64)] = &[
    ("ecommerce", 4369, 1060),
    ("auth", 657, 265),
    ("dynamic", 1727, 387),
];

fn golden_reduction(scenario: &str) -> f64 {
    let (_, baseline, webmcp) = GOLDEN_TOKENS
        .iter()
        .find(|(name, _, _)| *name == scenario)
        .expect("known scenario");
    100.0 * (1.0 - *webmcp as f64 / *baseline as f64)
}

/// Deterministic pseudo-random stream for the property-style criteria.
struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    fn below(&mut self, bound: u64) -> u64 {
        self.next() % bound
    }
}

// --- criterion 1 -------------------------------------------------------------

enum Expect {
    Rule(&'static str),
    UnsupportedVersion,
    Oversized,
    Markup,
}

fn expect_matches(expect: &Expect, err: &CoreError) -> bool {
    match (expect, err) {
        (Expect::Rule(rule), CoreError::SchemaViolation { rule: got, .. }) => got == rule,
        (Expect::UnsupportedVersion, CoreError::UnsupportedVersion(_)) => true,
        (Expect::Oversized, CoreError::OversizedDescription { .. }) => true,
        (Expect::Markup, CoreError::MarkupInText { .. }) => true,
        _ => false,
    }
}

type Mutator = Box<dyn Fn(&mut serde_json::Value)>;

fn value_mutations() -> Vec<(&'static str, Expect, Mutator)> {
    fn m(f: impl Fn(&mut serde_json::Value) + 'static) -> Mutator {
        Box::new(f)
    }
    vec![
        ("unknown top-level key", Expect::Rule("unknown-key"),
         m(|v| { v["surprise"] = 1.into(); })),
        ("unknown element key", Expect::Rule("unknown-key"),
         m(|v| { v["elements"][0]["bonus"] = true.into(); })),
        ("unknown action key", Expect::Rule("unknown-key"),
         m(|v| { v["elements"][2]["action"]["extra"] = 1.into(); })),
        ("unknown security key", Expect::Rule("unknown-key"),
         m(|v| { v["security"]["audit"] = 1.into(); })),
        ("unknown policy key", Expect::Rule("unknown-key"),
         m(|v| { v["security"]["endpoints"]["@LOGIN_API"]["ttl"] = 1.into(); })),
        ("unknown csrf key", Expect::Rule("unknown-key"),
         m(|v| { v["security"]["csrf"]["cookie"] = "x".into(); })),
        ("unsupported version", Expect::UnsupportedVersion,
         m(|v| { v["version"] = "9.9".into(); })),
        ("version wrong type", Expect::Rule("type"),
         m(|v| { v["version"] = 2.into(); })),
        ("markup in context", Expect::Markup,
         m(|v| { v["context"] = "<b>Login</b>".into(); })),
        ("backtick in context", Expect::Markup,
         m(|v| { v["context"] = "run `rm`".into(); })),
        ("control char in context", Expect::Markup,
         m(|v| { v["context"] = "line\u{0007}bell".into(); })),
        ("context over 160 chars", Expect::Oversized,
         m(|v| { v["context"] = "c".repeat(161).into(); })),
        ("description over 160 chars", Expect::Oversized,
         m(|v| { v["elements"][0]["description"] = "d".repeat(161).into(); })),
        ("markup in description", Expect::Markup,
         m(|v| { v["elements"][0]["description"] = "try <i>this</i>".into(); })),
        ("empty selector", Expect::Rule("empty-selector"),
         m(|v| { v["elements"][0]["selector"] = "".into(); })),
        ("unparseable selector", Expect::Rule("selector-syntax"),
         m(|v| { v["elements"][0]["selector"] = "div > >".into(); })),
        ("role outside vocabulary", Expect::Rule("role-vocab"),
         m(|v| { v["elements"][0]["role"] = "widget.spinner".into(); })),
        ("role without subtype", Expect::Rule("role-vocab"),
         m(|v| { v["elements"][0]["role"] = "input".into(); })),
        ("lowercase name", Expect::Rule("name-syntax"),
         m(|v| { v["elements"][0]["name"] = "username".into(); })),
        ("unknown verb", Expect::Rule("verb-vocab"),
         m(|v| { v["elements"][2]["action"]["kind"] = "FETCH".into(); })),
        ("lowercase symbol", Expect::Rule("endpoint-syntax"),
         m(|v| { v["elements"][2]["action"]["endpoint"] = "@login_api".into(); })),
        ("empty endpoint", Expect::Rule("endpoint-syntax"),
         m(|v| { v["elements"][2]["action"]["endpoint"] = "".into(); })),
        ("csrf tag without dollar", Expect::Rule("csrf-tag-syntax"),
         m(|v| { v["elements"][2]["action"]["csrf_tag"] = "CSRF_TOKEN".into(); })),
        ("four-segment payload_jwe", Expect::Rule("jwe-format"),
         m(|v| { v["elements"][2]["action"]["payload_jwe"] = "a.b.c.d".into(); })),
        ("empty jwe header segment", Expect::Rule("jwe-format"),
         m(|v| { v["elements"][2]["action"]["payload_jwe"] = ".x.a.b.c".into(); })),
        ("uppercase scope", Expect::Rule("scope-syntax"),
         m(|v| { v["security"]["endpoints"]["@LOGIN_API"]["scopes"][0] = "Auth:Login".into(); })),
        ("scope without colon", Expect::Rule("scope-syntax"),
         m(|v| { v["security"]["endpoints"]["@LOGIN_API"]["scopes"][0] = "authlogin".into(); })),
        ("zero expires", Expect::Rule("positive-int"),
         m(|v| { v["security"]["endpoints"]["@LOGIN_API"]["expires"] = 0.into(); })),
        ("expires wrong type", Expect::Rule("type"),
         m(|v| { v["security"]["endpoints"]["@LOGIN_API"]["expires"] = "300".into(); })),
        ("burst above rpm", Expect::Rule("rpm-burst"),
         m(|v| {
             v["security"]["endpoints"]["@LOGIN_API"]["rpm"] = 10.into();
             v["security"]["endpoints"]["@LOGIN_API"]["burst"] = 20.into();
         })),
        ("endpoint key without @", Expect::Rule("endpoint-key-syntax"),
         m(|v| {
             let endpoints = v["security"]["endpoints"].as_object_mut().unwrap();
             let policy = endpoints.remove("@LOGIN_API").unwrap();
             endpoints.insert("LOGIN_API".into(), policy);
         })),
        ("unknown csrf mode", Expect::Rule("csrf-mode"),
         m(|v| { v["security"]["csrf"]["mode"] = "triple-submit".into(); })),
        ("header name with space", Expect::Rule("csrf-header-syntax"),
         m(|v| { v["security"]["csrf"]["header_name"] = "X CSRF".into(); })),
        ("empty token field", Expect::Rule("csrf-field-syntax"),
         m(|v| { v["security"]["csrf"]["token_field"] = "".into(); })),
        ("unresolved symbol", Expect::Rule("unresolved-symbol"),
         m(|v| { v["elements"][2]["action"]["endpoint"] = "@NOWHERE".into(); })),
        ("duplicate selector", Expect::Rule("duplicate-selector"),
         m(|v| {
             let clone = v["elements"][0].clone();
             v["elements"].as_array_mut().unwrap().push(clone);
         })),
        ("missing context", Expect::Rule("missing-field"),
         m(|v| { v.as_object_mut().unwrap().remove("context"); })),
        ("elements wrong type", Expect::Rule("type"),
         m(|v| { v["elements"] = serde_json::json!({}); })),
    ]
}

#[test]
fn criterion_01_schema_conformance() {
    let started = Instant::now();

    // The schema-section login example parses with zero violations.
    let doc = parse_document(LOGIN_FIXTURE.as_bytes()).unwrap();
    assert_eq!(doc.elements.len(), 3);
    let report = validate_document(&parse_structural(LOGIN_FIXTURE.as_bytes()).unwrap());
    assert!(report.ok(), "violations: {:?}", report.violations);

    // Mutation suite: every single-field corruption produces the
    // documented error.
    let mutations = value_mutations();
    let mut total = mutations.len();
    for (name, expect, mutate) in &mutations {
        let mut value: serde_json::Value = serde_json::from_str(LOGIN_FIXTURE).unwrap();
        mutate(&mut value);
        let bytes = serde_json::to_vec(&value).unwrap();
        match parse_document(&bytes) {
            Err(err) => assert!(
                expect_matches(expect, &err),
                "{name}: unexpected error {err:?}"
            ),
            Ok(_) => panic!("{name}: mutation slipped through"),
        }
    }

    // Duplicate-key mutations need raw bytes (a JSON tree cannot hold
    // duplicates).
    for (name, needle, replacement) in [
        (
            "duplicate top-level key",
            "\"version\": \"0.2\",",
            "\"version\": \"0.2\",\n  \"version\": \"0.2\",",
        ),
        (
            "duplicate action key",
            "\"kind\": \"POST\",",
            "\"kind\": \"POST\",\n        \"kind\": \"POST\",",
        ),
    ] {
        let mutated = LOGIN_FIXTURE.replacen(needle, replacement, 1);
        assert_ne!(mutated, LOGIN_FIXTURE, "{name}: needle not found");
        match parse_document(mutated.as_bytes()) {
            Err(CoreError::SchemaViolation { rule, .. }) => {
                assert_eq!(rule, "duplicate-key", "{name}")
            }
            other => panic!("{name}: expected duplicate-key, got {other:?}"),
        }
        total += 1;
    }

    assert!(total >= 30, "only {total} mutations exercised");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 1: schema conformance ({total} mutations, {:.0} ms)",
        elapsed.as_secs_f64() * 1000.0
    );
}

// --- criterion 2 -------------------------------------------------------------

#[test]
fn criterion_02_signature_triad() {
    let started = Instant::now();
    let seed: [u8; 32] = [0x42; 32];
    let mut store = TrustStore::new();
    store
        .insert(
            "dev-1",
            wmcp_signature::verifying_key_from_bytes(
                &wmcp_signature::public_key_bytes(&seed).unwrap(),
            )
            .unwrap(),
        )
        .unwrap();

    // RFC 8032 test vector 1, reproduced with an independent reference
    // implementation before this suite was written.
    let rfc_seed =
        hex_to_vec("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
    let rfc = sign_bundle(b"", &rfc_seed, "rfc").unwrap();
    assert_eq!(
        hex::encode(rfc.signature),
        "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e06522490155\
         5fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b"
    );

    // Round-trip.
    let doc = LOGIN_FIXTURE.as_bytes();
    let bundle = sign_bundle(doc, &seed, "dev-1").unwrap();
    assert_eq!(verify_bundle(&bundle, &store).unwrap(), doc);

    // >= 1000 single-bit tampers, all rejected.
    let mut tampered_count = 0u32;
    'outer: for byte_idx in 0..doc.len() {
        for bit in 0..8 {
            let mut tampered = bundle.clone();
            tampered.document_bytes[byte_idx] ^= 1 << bit;
            assert!(
                matches!(
                    verify_bundle(&tampered, &store),
                    Err(SignatureError::SignatureInvalid)
                ),
                "bit flip at byte {byte_idx} bit {bit} slipped through"
            );
            tampered_count += 1;
            if tampered_count >= 1000 {
                break 'outer;
            }
        }
    }
    // And some signature-side flips for good measure.
    for i in 0..64 {
        let mut tampered = bundle.clone();
        tampered.signature[i] ^= 0x80;
        assert!(verify_bundle(&tampered, &store).is_err());
        tampered_count += 1;
    }
    assert!(tampered_count >= 1000);

    // Unpinned key id fails even though the signature is valid.
    let unpinned = sign_bundle(doc, &seed, "staging-1").unwrap();
    assert!(matches!(
        verify_bundle(&unpinned, &store),
        Err(SignatureError::UnknownKeyId(_))
    ));

    // Verification precedes parsing: on failure the parser is unreachable.
    let mut parse_attempted = false;
    let mut tampered = bundle.clone();
    tampered.document_bytes[0] ^= 1;
    let outcome = verify_bundle(&tampered, &store).map(|bytes| {
        parse_attempted = true;
        parse_document(bytes)
    });
    assert!(outcome.is_err());
    assert!(!parse_attempted, "parser ran before verification settled");

    // End to end: an agent facing an unpinned origin never parses.
    let scenarios = builtin_scenarios();
    let mut bad_keys = dev_keys();
    bad_keys.doc_seed = [0x99; 32];
    let origin = start_origin(&scenarios, dev_registry(), bad_keys, 0).unwrap();
    let agent = wmcp_harness::Agent::new(&origin, dev_trust_store());
    let auth = &scenarios[1];
    let record = wmcp_harness::run_agent_step(
        &agent,
        wmcp_harness::Method::WebmcpOptimized,
        &auth.name,
        &auth.pages[0].path,
        &auth.goal,
        &auth.params,
        1,
    )
    .unwrap();
    assert!(!record.success);
    assert!(!record.trace.iter().any(|t| t == "parsed"));

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 2: signature triad ({tampered_count} tampers, {:.1} s)",
        elapsed.as_secs_f64()
    );
}

fn hex_to_vec(s: &str) -> Vec<u8> {
    hex::decode(s).unwrap()
}

// --- criterion 3 -------------------------------------------------------------

#[test]
fn criterion_03_jwe() {
    use wmcp_secure_payload::{decrypt_payload, encrypt_payload, CompactJwe, PayloadError};

    // Round-trip identity across sizes.
    let key: Vec<u8> = (0u8..32).collect();
    for size in [1usize, 17, 256, 4093] {
        let plaintext: Vec<u8> = (0..size).map(|i| (i % 251) as u8).collect();
        let jwe = encrypt_payload(&plaintext, &key).unwrap();
        assert_eq!(decrypt_payload(&jwe, &key).unwrap(), plaintext);
    }

    // Tamper rejection.
    let jwe = encrypt_payload(b"attack at dawn", &key).unwrap();
    let mut tampered = jwe.clone();
    let mut ct = base64_url_decode(&tampered.ciphertext);
    ct[0] ^= 1;
    tampered.ciphertext = base64_url_encode(&ct);
    assert_eq!(
        decrypt_payload(&tampered, &key).unwrap_err(),
        PayloadError::AuthenticationFailed
    );

    // Unsupported algorithm.
    let mut rsa = jwe.clone();
    rsa.protected_header = base64_url_encode(br#"{"alg":"RSA-OAEP","enc":"A256GCM"}"#);
    assert!(matches!(
        decrypt_payload(&rsa, &key),
        Err(PayloadError::UnsupportedAlgorithm(_))
    ));

    // Known-answer vector computed with an independent JOSE reference
    // oracle: fixed key, fixed IV, fixed plaintext.
    let kat = "eyJhbGciOiJkaXIiLCJlbmMiOiJBMjU2R0NNIn0..oKGio6Slpqeoqaqr.\
               nTofTDevIIVAUbbiNkvx70GdaCGjhnNdrSwKpBzdAyPoVHbNnAAu.3jashREaNtcRvmQc8oOo5w";
    let parsed = CompactJwe::parse(kat).unwrap();
    assert_eq!(
        decrypt_payload(&parsed, &key).unwrap(),
        br#"{"card":"4111111111111111","cvv":"123"}"#
    );

    println!("[PASS] criterion 3: JWE round-trip, tamper, alg gate, known-answer");
}

fn base64_url_decode(s: &str) -> Vec<u8> {
    use base64::Engine;
    base64::engine::general_purpose::URL_SAFE_NO_PAD
        .decode(s)
        .unwrap()
}

fn base64_url_encode(b: &[u8]) -> String {
    use base64::Engine;
    base64::engine::general_purpose::URL_SAFE_NO_PAD.encode(b)
}

// --- criterion 4 -------------------------------------------------------------

#[test]
fn criterion_04_csrf_matrix() {
    let scenarios = builtin_scenarios();
    let auth = scenarios[1].clone();
    let origin = start_origin(&[auth], dev_registry(), dev_keys(), 0).unwrap();
    let client = reqwest::blocking::Client::new();
    let csrf = scenario_csrf_value("auth");

    let mint = |scopes: &[&str]| -> String {
        client
            .post(format!("{}/wmcp/token", origin.base_url()))
            .json(&serde_json::json!({"subject": "m", "scopes": scopes, "ttl": 300}))
            .send()
            .unwrap()
            .json::<serde_json::Value>()
            .unwrap()["token"]
            .as_str()
            .unwrap()
            .to_owned()
    };
    let token = mint(&["auth:login"]);
    let post = |header: Option<&str>, body: Option<&str>| -> u16 {
        let mut form = BTreeMap::new();
        if let Some(v) = body {
            form.insert("csrf_token", v);
        }
        let mut builder = client
            .post(format!("{}/api/login", origin.base_url()))
            .bearer_auth(&token)
            .form(&form);
        if let Some(v) = header {
            builder = builder.header("X-CSRF-TOKEN", v);
        }
        builder.send().unwrap().status().as_u16()
    };

    assert_eq!(post(Some(&csrf), Some(&csrf)), 200, "valid double-submit");
    assert_eq!(post(Some(&csrf), Some("forged")), 403, "header != body");
    assert_eq!(post(None, Some(&csrf)), 403, "missing header");
    assert_eq!(post(Some(&csrf), None), 403, "missing body field");

    // Synchroniser mode: the body field alone authorizes.
    let sync_fixture = synchroniser_fixture();
    let mut registry = wmcp_resolver::EndpointRegistry::new();
    registry
        .insert(
            "@PING_API",
            wmcp_resolver::RegisteredEndpoint {
                url: "/api/ping".into(),
                policy: wmcp_core::EndpointPolicy {
                    tokenised: true,
                    expires: 300,
                    scopes: vec![wmcp_core::Scope::parse("panel:ack").unwrap()],
                    rpm: None,
                    burst: None,
                },
            },
        )
        .unwrap();
    let sync_origin = start_origin(&[sync_fixture], registry, dev_keys(), 0).unwrap();
    let sync_csrf = scenario_csrf_value("ping");
    let sync_token = client
        .post(format!("{}/wmcp/token", sync_origin.base_url()))
        .json(&serde_json::json!({"subject": "m", "scopes": ["panel:ack"], "ttl": 300}))
        .send()
        .unwrap()
        .json::<serde_json::Value>()
        .unwrap()["token"]
        .as_str()
        .unwrap()
        .to_owned();
    let status = client
        .post(format!("{}/api/ping", sync_origin.base_url()))
        .bearer_auth(&sync_token)
        .form(&BTreeMap::from([("csrf_token", sync_csrf.as_str())]))
        .send()
        .unwrap()
        .status()
        .as_u16();
    assert_eq!(status, 200, "synchroniser honors body-only");

    println!("[PASS] criterion 4: csrf matrix (5/5 outcomes exact)");
}

fn synchroniser_fixture() -> wmcp_harness::ScenarioFixture {
    wmcp_harness::ScenarioFixture {
        name: "ping".into(),
        goal: "ping".into(),
        params: BTreeMap::new(),
        pages: vec![wmcp_harness::FixturePage {
            path: "/panel/ping.html".into(),
            html: "<html><head><title>Ping</title></head><body>\
                   <button id=\"ping\">Ping</button></body></html>"
                .into(),
            sidecar: r##"{
  "version": "0.2",
  "context": "Ping panel",
  "elements": [
    {
      "selector": "#ping",
      "role": "button.submit",
      "action": {"kind": "POST", "endpoint": "@PING_API", "csrf_tag": "$CSRF_TOKEN"},
      "description": "Sends a ping"
    }
  ],
  "security": {
    "endpoints": {"@PING_API": {"tokenised": true, "expires": 300, "scopes": ["panel:ack"]}},
    "csrf": {"token_field": "csrf_token", "header_name": "X-CSRF-TOKEN", "mode": "synchroniser"}
  }
}
"##
            .into(),
        }],
    }
}

// --- criterion 5 -------------------------------------------------------------

#[test]
fn criterion_05_endpoint_shielding() {
    use wmcp_resolver::{EndpointRegistry, RegisteredEndpoint, ResolverError};

    const SEED: [u8; 32] = [0x21; 32];
    const NOW: u64 = 1_750_000_000;
    let key = wmcp_signature::verifying_key_from_bytes(
        &wmcp_signature::public_key_bytes(&SEED).unwrap(),
    )
    .unwrap();

    let mut registry = EndpointRegistry::new();
    registry
        .insert(
            "@LOGIN_API",
            RegisteredEndpoint {
                url: "/api/login".into(),
                policy: wmcp_core::EndpointPolicy {
                    tokenised: true,
                    expires: 300,
                    scopes: vec![wmcp_core::Scope::parse("auth:login").unwrap()],
                    rpm: None,
                    burst: None,
                },
            },
        )
        .unwrap();

    // Named cases.
    let with_scope = issue_agent_token("a", &["auth:login"], 300, &SEED, NOW).unwrap();
    assert_eq!(
        resolve_endpoint("@LOGIN_API", &with_scope, &registry, &key, NOW + 1).unwrap(),
        "/api/login"
    );
    let without_scope = issue_agent_token("a", &["cart:write"], 300, &SEED, NOW).unwrap();
    let err = resolve_endpoint("@LOGIN_API", &without_scope, &registry, &key, NOW + 1).unwrap_err();
    assert!(matches!(err, ResolverError::Forbidden { .. }));
    assert_eq!(err.http_status(), 403);
    let err = resolve_endpoint("@LOGIN_API", &with_scope, &registry, &key, NOW + 300).unwrap_err();
    assert!(matches!(err, ResolverError::TokenExpired));
    assert_eq!(err.http_status(), 401);

    // Brute-force oracle over >= 500 random triples.
    let scope_pool = ["auth:login", "cart:write", "checkout:submit", "payload:key"];
    let mut rng = XorShift(0x5eed_cafe_f00d_0001);
    let cases = 600;
    for case in 0..cases {
        let registered = rng.below(2) == 0;
        let tampered = rng.below(4) == 0;
        let policy_mask = rng.below(16) as usize;
        let token_mask = rng.below(16) as usize;
        let issued_at = NOW + rng.below(1000);
        let ttl = 1 + rng.below(500);
        let now = issued_at + rng.below(1000);

        let policy_scopes: Vec<&str> = scope_pool
            .iter()
            .enumerate()
            .filter(|(i, _)| policy_mask & (1 << i) != 0)
            .map(|(_, s)| *s)
            .collect();
        let token_scopes: Vec<&str> = scope_pool
            .iter()
            .enumerate()
            .filter(|(i, _)| token_mask & (1 << i) != 0)
            .map(|(_, s)| *s)
            .collect();

        let mut case_registry = EndpointRegistry::new();
        case_registry
            .insert(
                "@CASE_API",
                RegisteredEndpoint {
                    url: "/api/case".into(),
                    policy: wmcp_core::EndpointPolicy {
                        tokenised: true,
                        expires: ttl,
                        scopes: policy_scopes
                            .iter()
                            .map(|s| wmcp_core::Scope::parse(s).unwrap())
                            .collect(),
                        rpm: None,
                        burst: None,
                    },
                },
            )
            .unwrap();

        let mut token = issue_agent_token("a", &token_scopes, ttl, &SEED, issued_at).unwrap();
        if tampered {
            let sig_start = token.compact.rfind('.').unwrap() + 1;
            let mut bytes = token.compact.into_bytes();
            let i = sig_start + 5;
            bytes[i] = if bytes[i] == b'A' { b'B' } else { b'A' };
            token.compact = String::from_utf8(bytes).unwrap();
        }

        let symbol = if registered { "@CASE_API" } else { "@GHOST_API" };
        let got = resolve_endpoint(symbol, &token, &case_registry, &key, now);

        // Oracle: re-derive the decision from raw facts, in gate order.
        #[derive(Debug, PartialEq)]
        enum Verdict {
            Ok,
            Unknown,
            BadSig,
            Expired,
            Forbidden,
        }
        let expected = if !registered {
            Verdict::Unknown
        } else if tampered {
            Verdict::BadSig
        } else if now >= issued_at + ttl {
            Verdict::Expired
        } else if policy_scopes.iter().any(|s| !token_scopes.contains(s)) {
            Verdict::Forbidden
        } else {
            Verdict::Ok
        };
        let actual = match &got {
            Ok(_) => Verdict::Ok,
            Err(ResolverError::UnknownSymbol(_)) => Verdict::Unknown,
            Err(ResolverError::SignatureInvalid) => Verdict::BadSig,
            Err(ResolverError::TokenExpired) => Verdict::Expired,
            Err(ResolverError::Forbidden { .. }) => Verdict::Forbidden,
            Err(other) => panic!("case {case}: unexpected {other:?}"),
        };
        assert_eq!(actual, expected, "case {case}: {got:?}");
    }

    println!("[PASS] criterion 5: endpoint shielding ({cases} oracle cases exact)");
}

// --- criterion 6 -------------------------------------------------------------

#[test]
fn criterion_06_throttle_budget() {
    // Brute-force simulator: steps one second at a time, no closed-form
    // refill.
    struct Sim {
        sixtieths: u64,
        cap: u64,
        rpm: u64,
        clock: u64,
    }
    impl Sim {
        fn acquire(&mut self, now: u64) -> bool {
            while self.clock < now {
                self.clock += 1;
                self.sixtieths = (self.sixtieths + self.rpm).min(self.cap);
            }
            if self.sixtieths >= 60 {
                self.sixtieths -= 60;
                true
            } else {
                false
            }
        }
    }

    let window = 600u64; // the 10-minute virtual clock

    // Greedy schedules achieve the budget exactly (0 tolerance).
    for (rpm, burst) in [(60u64, 5u64), (120, 10), (12, 1)] {
        let start = 1_000u64;
        let state = ThrottleState::new(rpm, burst, start);
        let mut sim = Sim {
            sixtieths: burst * 60,
            cap: burst * 60,
            rpm,
            clock: start,
        };
        let mut granted = 0u64;
        for offset in 0..=window {
            loop {
                let implementation = matches!(state.acquire(start + offset), Decision::Proceed);
                let oracle = sim.acquire(start + offset);
                assert_eq!(implementation, oracle, "rpm={rpm} burst={burst} t+{offset}");
                if !implementation {
                    break;
                }
                granted += 1;
            }
        }
        assert_eq!(granted, burst + rpm * 10, "rpm={rpm} burst={burst}");
    }

    // Random schedules never exceed the budget and match the simulator
    // decision for decision.
    let mut rng = XorShift(0xabcd_1234_5678_9999);
    for trial in 0..20 {
        let rpm = 1 + rng.below(200);
        let burst = 1 + rng.below(20);
        let start = 5_000u64;
        let state = ThrottleState::new(rpm, burst, start);
        let mut sim = Sim {
            sixtieths: burst * 60,
            cap: burst * 60,
            rpm,
            clock: start,
        };
        let mut granted = 0u64;
        for offset in 0..=window {
            let attempts = rng.below(5);
            for _ in 0..attempts {
                let implementation = matches!(state.acquire(start + offset), Decision::Proceed);
                let oracle = sim.acquire(start + offset);
                assert_eq!(
                    implementation, oracle,
                    "trial {trial} rpm={rpm} burst={burst} t+{offset}"
                );
                granted += u64::from(implementation);
            }
        }
        assert!(
            granted <= burst + rpm * 10,
            "trial {trial}: granted {granted} over budget"
        );
    }

    println!("[PASS] criterion 6: throttle budget exact against brute-force simulator");
}

// --- criterion 7 -------------------------------------------------------------

#[test]
fn criterion_07_token_reduction() {
    let started = Instant::now();
    let scenarios = builtin_scenarios();
    let summary = run_benchmark(&scenarios, 1, 0, None).unwrap();

    for (scenario, golden_baseline, golden_webmcp) in GOLDEN_TOKENS {
        let baseline = summary
            .records
            .iter()
            .find(|r| r.scenario == *scenario && r.method.as_str() == "baseline_html")
            .unwrap();
        let webmcp = summary
            .records
            .iter()
            .find(|r| r.scenario == *scenario && r.method.as_str() == "webmcp_optimized")
            .unwrap();
        assert_eq!(
            baseline.tokens, *golden_baseline,
            "{scenario}: baseline tokens drifted from the oracle golden"
        );
        assert_eq!(
            webmcp.tokens, *golden_webmcp,
            "{scenario}: webmcp tokens drifted from the oracle golden"
        );
        assert!(baseline.success && webmcp.success, "{scenario}: steps failed");

        let reduction = 100.0 * (1.0 - webmcp.tokens as f64 / baseline.tokens as f64);
        assert!(
            reduction >= 50.0,
            "{scenario}: reduction {reduction:.1}% below 50%"
        );
        if *scenario == "ecommerce" {
            assert!(
                reduction >= 65.0,
                "ecommerce reduction {reduction:.1}% below 65%"
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "[PASS] criterion 7: token reduction (ecommerce {:.1}%, auth {:.1}%, dynamic {:.1}%, {:.1} s)",
        golden_reduction("ecommerce"),
        golden_reduction("auth"),
        golden_reduction("dynamic"),
        elapsed.as_secs_f64()
    );
}

// --- criterion 8 -------------------------------------------------------------

#[test]
fn criterion_08_scaling_property() {
    let mut previous_html_tokens = 0u64;
    let mut payload_tokens: Option<u64> = None;
    for k in [1usize, 2, 4, 8] {
        let (html, sidecar) = scaled_page(k);
        let doc = parse_document(sidecar.as_bytes()).unwrap();
        let report = wmcp_graph::token_report(&format!("P_{k}"), html.as_bytes(), &doc).unwrap();
        assert!(
            report.tokens_full_html > previous_html_tokens,
            "P_{k}: full-page tokens must strictly increase"
        );
        previous_html_tokens = report.tokens_full_html;
        match payload_tokens {
            None => payload_tokens = Some(report.tokens_elements_payload),
            Some(expected) => assert_eq!(
                report.tokens_elements_payload, expected,
                "P_{k}: elements payload must stay constant"
            ),
        }
    }
    println!(
        "[PASS] criterion 8: O(page) vs O(elements) scaling (payload constant at {} tokens)",
        payload_tokens.unwrap()
    );
}

// --- criterion 9 -------------------------------------------------------------

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

#[test]
fn criterion_09_authoring_loop() {
    let html_path = repo_root().join("crates/wmcp-author/fixtures/login.html");
    let html = std::fs::read(&html_path).unwrap();

    // scan -> lint closure: zero schema errors.
    let suggestion = wmcp_author::scan_html(&html).unwrap();
    let report = wmcp_author::lint_document(&wmcp_core::serialize_document(&suggestion.document));
    assert!(report.errors.is_empty(), "errors: {:?}", report.errors);

    // Deleting #loginBtn makes `drift` exit non-zero, listing exactly
    // that selector.
    let dir = tempfile::tempdir().unwrap();
    let doc_path = dir.path().join("login.wmcp");
    std::fs::write(
        &doc_path,
        wmcp_core::serialize_document(&suggestion.document),
    )
    .unwrap();
    let stripped = String::from_utf8(html)
        .unwrap()
        .replace(r#"<button id="loginBtn" type="submit">Sign in</button>"#, "");
    let page_path = dir.path().join("stripped.html");
    std::fs::write(&page_path, stripped).unwrap();

    let output = Command::new(env!("CARGO_BIN_EXE_wmcp"))
        .args([
            "drift",
            doc_path.to_str().unwrap(),
            page_path.to_str().unwrap(),
            "--json",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(
        value["missing_selectors"],
        serde_json::json!(["#loginBtn"]),
        "missing list must be exactly the deleted selector"
    );

    println!("[PASS] criterion 9: authoring loop (scan -> lint clean, drift gates CI)");
}

// --- criterion 10 ------------------------------------------------------------

#[test]
fn criterion_10_benchmark_output() {
    let dir = tempfile::tempdir().unwrap();

    let run = |name: &str| -> (Vec<String>, String) {
        let csv_path = dir.path().join(name);
        let output = Command::new(env!("CARGO_BIN_EXE_wmcp"))
            .args([
                "bench",
                "--iterations",
                "15",
                "--seed",
                "7",
                "--out",
                csv_path.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert_eq!(output.status.code(), Some(0), "{output:?}");
        let text = std::fs::read_to_string(&csv_path).unwrap();
        let lines: Vec<String> = text.lines().map(str::to_owned).collect();
        (lines, text)
    };

    let (lines, text) = run("first.csv");
    assert_eq!(
        lines[0],
        "scenario,method,iteration,tokens,latency_ms,success,cost_proxy"
    );
    let data_rows: Vec<&String> = lines[1..]
        .iter()
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(data_rows.len(), 90, "3 scenarios x 2 methods x 15 iterations");

    // Token column: identical across iterations within the run.
    let mut token_by_key: BTreeMap<(String, String), u64> = BTreeMap::new();
    for row in &data_rows {
        let cells: Vec<&str> = row.split(',').collect();
        let key = (cells[0].to_owned(), cells[1].to_owned());
        let tokens: u64 = cells[3].parse().unwrap();
        assert!(cells[5] == "true", "run failed: {row}");
        if let Some(previous) = token_by_key.insert(key.clone(), tokens) {
            assert_eq!(previous, tokens, "tokens drifted within run for {key:?}");
        }
    }

    // ... and identical across independent runs.
    let (second_lines, _) = run("second.csv");
    let tokens_of = |lines: &[String]| -> Vec<String> {
        lines
            .iter()
            .filter(|l| !l.starts_with('#') && !l.starts_with("scenario,"))
            .map(|l| {
                let cells: Vec<&str> = l.split(',').collect();
                format!("{},{},{},{}", cells[0], cells[1], cells[2], cells[3])
            })
            .collect()
    };
    assert_eq!(tokens_of(&lines), tokens_of(&second_lines));

    // Summary reduction equals the criterion-7 golden value.
    let reduction_line = text
        .lines()
        .find(|l| l.starts_with("# reduction,ecommerce,"))
        .expect("summary block present");
    let reported: f64 = reduction_line
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    let golden = golden_reduction("ecommerce");
    assert!(
        (reported - golden).abs() < 1e-3,
        "summary reduction {reported} != golden {golden}"
    );

    println!(
        "[PASS] criterion 10: benchmark CSV (90 rows, deterministic tokens, \
         ecommerce reduction {reported:.4}%)"
    );
}
