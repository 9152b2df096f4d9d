//! Subcommand implementations.

use std::io::Read;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use wmcp_author::{check_drift, lint_document, scan_html, RegistryDigest, RULE_CATALOG};
use wmcp_core::{parse_document, serialize_document};
use wmcp_harness::{builtin_scenarios, dev_keys, dev_registry, run_benchmark, start_origin};
use wmcp_resolver::{issue_agent_token, resolve_endpoint, AgentToken, EndpointRegistry};
use wmcp_secure_payload::{decrypt_payload, encrypt_payload, CompactJwe};
use wmcp_signature::{
    decode_sig_value, encode_sig_value, load_trust_store, sig_sidecar_path, sign_bundle,
    verify_bundle, SignedBundle, TrustStore,
};

const DEFAULT_DOC_SEED: &str = "keys/dev.seed";
const DEFAULT_TOKEN_SEED: &str = "keys/token.seed";
const DEFAULT_PINS: &str = "keys/pins.txt";
const DEFAULT_JWE_KEY: &str = "keys/jwe.key";
const DEFAULT_REGISTRY: &str = "keys/registry.json";

const OK: ExitCode = ExitCode::SUCCESS;

fn read_input(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buffer = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buffer)
            .context("reading stdin")?;
        Ok(buffer)
    } else {
        std::fs::read(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).context("writing stdout")?;
            if !bytes.ends_with(b"\n") {
                println!();
            }
            Ok(())
        }
    }
}

/// A 32-byte hex seed from a flag path, $WMCP_KEY_SEED, or a default path.
fn load_seed(flag: Option<&Path>, default_path: &str) -> Result<[u8; 32]> {
    let hex_text = match flag {
        Some(path) => {
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
        }
        None => match std::env::var("WMCP_KEY_SEED") {
            Ok(value) => value,
            Err(_) => std::fs::read_to_string(default_path)
                .with_context(|| format!("reading {default_path} (pass --key or set WMCP_KEY_SEED)"))?,
        },
    };
    let bytes = hex::decode(hex_text.trim()).context("key seed must be hex")?;
    let seed: [u8; 32] = bytes
        .try_into()
        .map_err(|v: Vec<u8>| anyhow::anyhow!("seed must be 32 bytes, got {}", v.len()))?;
    Ok(seed)
}

fn load_key_file(flag: Option<&Path>, default_path: &str) -> Result<[u8; 32]> {
    let path = flag.map(Path::to_path_buf).unwrap_or(default_path.into());
    let hex_text =
        std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
    let bytes = hex::decode(hex_text.trim()).context("key must be hex")?;
    bytes
        .try_into()
        .map_err(|v: Vec<u8>| anyhow::anyhow!("key must be 32 bytes, got {}", v.len()))
}

fn load_pins(flag: Option<&Path>) -> Result<TrustStore> {
    let path = flag.map(Path::to_path_buf).unwrap_or(DEFAULT_PINS.into());
    let bytes =
        std::fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    load_trust_store(&bytes).map_err(Into::into)
}

pub fn scan(page: &Path, json: bool) -> Result<ExitCode> {
    let html = read_input(page)?;
    let suggestion = scan_html(&html)?;
    if json {
        let value = serde_json::json!({
            "document": serde_json::from_slice::<serde_json::Value>(
                &serialize_document(&suggestion.document))?,
            "notes": suggestion.confidence_notes.iter()
                .map(|(selector, note)| serde_json::json!({"selector": selector, "note": note}))
                .collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        write_output(None, &serialize_document(&suggestion.document))?;
        for (selector, note) in &suggestion.confidence_notes {
            eprintln!("note: {selector}: {note}");
        }
    }
    Ok(OK)
}

pub fn lint(document: &Path, json: bool, rules: bool) -> Result<ExitCode> {
    if rules {
        print!("{RULE_CATALOG}");
        return Ok(OK);
    }
    let bytes = read_input(document)?;
    let report = lint_document(&bytes);
    if json {
        println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    } else {
        for finding in &report.errors {
            println!("error: {finding}");
        }
        for finding in &report.warnings {
            println!("warning: {finding}");
        }
        println!(
            "{}: {} error(s), {} warning(s)",
            if report.deploy_ready() { "ok" } else { "fail" },
            report.errors.len(),
            report.warnings.len()
        );
    }
    Ok(if report.deploy_ready() { OK } else { findings() })
}

pub fn sign(
    file: &Path,
    key: Option<&Path>,
    key_id: &str,
    out: Option<&Path>,
) -> Result<ExitCode> {
    let bytes = read_input(file)?;
    let seed = load_seed(key, DEFAULT_DOC_SEED)?;
    let bundle = sign_bundle(&bytes, &seed, key_id)?;
    let value = encode_sig_value(key_id, &bundle.signature);
    let sig_path = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| sig_sidecar_path(file));
    std::fs::write(&sig_path, format!("{value}\n"))
        .with_context(|| format!("writing {}", sig_path.display()))?;
    println!("{value}");
    eprintln!("wrote {}", sig_path.display());
    Ok(OK)
}

pub fn verify(file: &Path, sig: Option<&Path>, pins: Option<&Path>) -> Result<ExitCode> {
    let bytes = read_input(file)?;
    let sig_path = sig
        .map(Path::to_path_buf)
        .unwrap_or_else(|| sig_sidecar_path(file));
    let sig_text = std::fs::read_to_string(&sig_path)
        .with_context(|| format!("reading {}", sig_path.display()))?;
    let (key_id, signature) = decode_sig_value(sig_text.trim())?;
    let store = load_pins(pins)?;
    let bundle = SignedBundle {
        document_bytes: bytes,
        signature,
        key_id: key_id.clone(),
    };
    verify_bundle(&bundle, &store)?;
    println!("verified under pinned key {key_id:?}");
    Ok(OK)
}

pub fn encrypt(file: &Path, jwe_key: Option<&Path>, out: Option<&Path>) -> Result<ExitCode> {
    let plaintext = read_input(file)?;
    let key = load_key_file(jwe_key, DEFAULT_JWE_KEY)?;
    let jwe = encrypt_payload(&plaintext, &key)?;
    write_output(out, jwe.to_compact().as_bytes())?;
    Ok(OK)
}

pub fn decrypt(file: &Path, jwe_key: Option<&Path>, out: Option<&Path>) -> Result<ExitCode> {
    let compact = String::from_utf8(read_input(file)?).context("compact JWE must be UTF-8")?;
    let key = load_key_file(jwe_key, DEFAULT_JWE_KEY)?;
    let jwe = CompactJwe::parse(compact.trim())?;
    let plaintext = decrypt_payload(&jwe, &key)?;
    write_output(out, &plaintext)?;
    Ok(OK)
}

pub fn token(
    subject: &str,
    scopes: &[String],
    ttl: u64,
    key: Option<&Path>,
    now: Option<u64>,
    json: bool,
) -> Result<ExitCode> {
    let seed = load_seed(key, DEFAULT_TOKEN_SEED)?;
    let now = now.unwrap_or_else(unix_now);
    let token = issue_agent_token(subject, scopes, ttl, &seed, now)?;
    if json {
        println!(
            "{}",
            serde_json::json!({
                "token": token.compact,
                "claims": {
                    "sub": token.claims.subject,
                    "scopes": token.claims.scopes,
                    "iat": token.claims.issued_at,
                    "exp": token.claims.expires_at,
                },
            })
        );
    } else {
        println!("{}", token.compact);
    }
    Ok(OK)
}

pub fn resolve(
    symbol: &str,
    token: &str,
    registry: Option<&Path>,
    key: Option<&Path>,
    now: Option<u64>,
) -> Result<ExitCode> {
    let registry_path = registry
        .map(Path::to_path_buf)
        .unwrap_or(DEFAULT_REGISTRY.into());
    let registry_bytes = std::fs::read(&registry_path)
        .with_context(|| format!("reading {}", registry_path.display()))?;
    let registry = EndpointRegistry::from_json(&registry_bytes)?;
    let seed = load_seed(key, DEFAULT_TOKEN_SEED)?;
    let verifying = wmcp_signature::verifying_key_from_bytes(
        &wmcp_signature::public_key_bytes(&seed)?,
    )?;
    let claims = wmcp_resolver::verify_agent_token(token, &verifying)?;
    let agent_token = AgentToken {
        compact: token.to_owned(),
        claims,
    };
    let now = now.unwrap_or_else(unix_now);
    match resolve_endpoint(symbol, &agent_token, &registry, &verifying, now) {
        Ok(url) => {
            println!("{url}");
            Ok(OK)
        }
        Err(e) => {
            eprintln!("error: {e} (http {})", e.http_status());
            Ok(findings())
        }
    }
}

pub fn drift(
    document: &Path,
    page: &Path,
    registry: Option<&Path>,
    pins: Option<&Path>,
    json: bool,
) -> Result<ExitCode> {
    let doc = parse_document(&read_input(document)?)?;
    let html = read_input(page)?;

    let digest = match registry {
        Some(registry_path) => {
            let registry_bytes = std::fs::read(registry_path)
                .with_context(|| format!("reading {}", registry_path.display()))?;
            let registry = EndpointRegistry::from_json(&registry_bytes)?;
            let mut digest = RegistryDigest::default();
            for (symbol, entry) in registry.iter() {
                digest.endpoint_scopes.insert(
                    symbol.to_owned(),
                    entry
                        .policy
                        .scopes
                        .iter()
                        .map(|s| s.as_str().to_owned())
                        .collect(),
                );
            }
            digest.csrf_header = doc
                .security
                .as_ref()
                .and_then(|s| s.csrf.as_ref())
                .map(|c| c.header_name.clone());
            // Key-id comparison only when a pin file is supplied; the
            // registry side of the comparison is the bundled dev key.
            if let Some(pins_path) = pins {
                let store = load_trust_store(
                    &std::fs::read(pins_path)
                        .with_context(|| format!("reading {}", pins_path.display()))?,
                )?;
                digest.pinned_key_ids = store.key_ids().map(str::to_owned).collect();
                digest.registry_key_ids =
                    [wmcp_harness::DEV_DOC_KEY_ID.to_owned()].into_iter().collect();
            }
            Some(digest)
        }
        None => None,
    };

    let report = check_drift(&doc, &html, digest.as_ref())?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report.to_json())?);
    } else {
        for selector in &report.missing_selectors {
            println!("missing: {selector}");
        }
        for drift in &report.policy_drift {
            println!("policy drift ({:?}): {}", drift.kind, drift.detail);
        }
        for (selector, count) in &report.multi_match {
            println!("warning: {selector} matches {count} elements");
        }
        println!("{}", if report.clean() { "clean" } else { "drift detected" });
    }
    Ok(if report.clean() { OK } else { findings() })
}

pub fn serve(port: u16) -> Result<ExitCode> {
    let scenarios = builtin_scenarios();
    let origin = start_origin(&scenarios, dev_registry(), dev_keys(), port)?;
    println!("origin listening on {}", origin.base_url());
    for fixture in &scenarios {
        for page in &fixture.pages {
            println!("  GET  {}  (+ .wmcp sidecar)", page.path);
        }
    }
    println!("  POST /wmcp/token   mint an agent token");
    println!("  POST /wmcp/resolve resolve a symbolic endpoint");
    println!("  GET  /wmcp/keys    JWE key (scope payload:key)");
    println!("press ctrl-c to stop");
    loop {
        std::thread::sleep(std::time::Duration::from_secs(3600));
    }
}

pub fn bench(iterations: u32, seed: u64, out: Option<&Path>, json: bool) -> Result<ExitCode> {
    if iterations == 0 {
        bail!("--iterations must be at least 1");
    }
    let scenarios = builtin_scenarios();
    let summary = run_benchmark(&scenarios, iterations, seed, out)?;
    if json {
        let value = serde_json::json!({
            "rows": summary.records.len(),
            "scenarios": summary.scenarios.iter().map(|s| serde_json::json!({
                "scenario": s.scenario,
                "mean_tokens_baseline": s.mean_tokens_baseline,
                "mean_tokens_webmcp": s.mean_tokens_webmcp,
                "reduction_pct": s.reduction_pct,
                "mean_latency_baseline_ms": s.mean_latency_baseline_ms,
                "mean_latency_webmcp_ms": s.mean_latency_webmcp_ms,
            })).collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&value)?);
    } else {
        if out.is_none() {
            write_output(None, &summary.csv)?;
        }
        for s in &summary.scenarios {
            println!(
                "{}: {} -> {} tokens, reduction {:.1}%",
                s.scenario,
                s.mean_tokens_baseline.round() as u64,
                s.mean_tokens_webmcp.round() as u64,
                s.reduction_pct
            );
        }
        if let Some(path) = out {
            println!("wrote {}", path.display());
        }
    }
    Ok(OK)
}

fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .expect("system clock before unix epoch")
        .as_secs()
}

fn findings() -> ExitCode {
    ExitCode::from(1)
}
