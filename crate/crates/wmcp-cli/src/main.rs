//! `wmcp` — the command-line entry point for the webMCP toolkit.
//!
//! Exit codes: 0 on success, 1 for operation failures and error-level
//! findings (lint/drift), 2 for usage errors. Key material is accepted
//! only from files or the `WMCP_KEY_SEED` environment variable, never as
//! bare argument values.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "wmcp", version, about = "webMCP authoring, security, and benchmark toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan HTML and suggest a draft webMCP document.
    Scan {
        /// Page to scan.
        page: std::path::PathBuf,
        /// Emit machine-readable JSON.
        #[arg(long)]
        json: bool,
    },
    /// Lint a webMCP document against schema and security rules.
    Lint {
        /// Document to lint (`-` for stdin).
        document: std::path::PathBuf,
        #[arg(long)]
        json: bool,
        /// Print the lint rule catalog and exit.
        #[arg(long)]
        rules: bool,
    },
    /// Sign a document file, producing a detached `.sig` sidecar.
    Sign {
        file: std::path::PathBuf,
        /// Path to the 32-byte signing seed (hex). Falls back to
        /// $WMCP_KEY_SEED (hex), then ./keys/dev.seed.
        #[arg(long)]
        key: Option<std::path::PathBuf>,
        /// Key id to embed in the signature value.
        #[arg(long, default_value = "dev-2024")]
        key_id: String,
        /// Where to write the signature (default: <file>.sig).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Verify a document file against its detached signature and the
    /// pinned trust store.
    Verify {
        file: std::path::PathBuf,
        /// Signature file (default: <file>.sig).
        #[arg(long)]
        sig: Option<std::path::PathBuf>,
        /// Pin file (default: ./keys/pins.txt).
        #[arg(long)]
        pins: Option<std::path::PathBuf>,
    },
    /// Encrypt a payload file into a compact JWE (dir/A256GCM).
    Encrypt {
        /// Plaintext file (`-` for stdin).
        file: std::path::PathBuf,
        /// Path to the 32-byte symmetric key (hex). Default ./keys/jwe.key.
        #[arg(long)]
        jwe_key: Option<std::path::PathBuf>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Decrypt a compact JWE file back to its payload.
    Decrypt {
        /// File holding the compact JWE string (`-` for stdin).
        file: std::path::PathBuf,
        #[arg(long)]
        jwe_key: Option<std::path::PathBuf>,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Mint a short-lived scoped agent token.
    Token {
        #[arg(long, default_value = "dev-agent")]
        subject: String,
        /// Comma-separated scopes, e.g. `auth:login,cart:write`.
        #[arg(long, value_delimiter = ',')]
        scopes: Vec<String>,
        /// Lifetime in seconds.
        #[arg(long, default_value_t = 300)]
        ttl: u64,
        /// Path to the token-signing seed (hex). Falls back to
        /// $WMCP_KEY_SEED, then ./keys/token.seed.
        #[arg(long)]
        key: Option<std::path::PathBuf>,
        /// Unix-seconds issue time (default: wall clock).
        #[arg(long)]
        now: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Resolve a symbolic endpoint with an agent token.
    Resolve {
        /// The `@NAME` symbol to resolve.
        symbol: String,
        /// Compact agent token.
        #[arg(long)]
        token: String,
        /// Registry file (default: ./keys/registry.json).
        #[arg(long)]
        registry: Option<std::path::PathBuf>,
        /// Path to the token-signing seed used to derive the
        /// verification key (default: ./keys/token.seed).
        #[arg(long)]
        key: Option<std::path::PathBuf>,
        #[arg(long)]
        now: Option<u64>,
    },
    /// Check a document against deployed HTML (and optionally the
    /// server-side registry and pin file) for drift.
    Drift {
        document: std::path::PathBuf,
        page: std::path::PathBuf,
        /// Registry file for scope/csrf-header comparison.
        #[arg(long)]
        registry: Option<std::path::PathBuf>,
        /// Pin file for key-id comparison.
        #[arg(long)]
        pins: Option<std::path::PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Serve the bundled fixture scenarios with live security gates.
    Serve {
        #[arg(long, default_value_t = 8787)]
        port: u16,
    },
    /// Run the desk-scale benchmark over the bundled scenarios.
    Bench {
        #[arg(long, default_value_t = 15)]
        iterations: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV output path (default: print to stdout).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long)]
        json: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Scan { page, json } => commands::scan(&page, json),
        Command::Lint {
            document,
            json,
            rules,
        } => commands::lint(&document, json, rules),
        Command::Sign {
            file,
            key,
            key_id,
            out,
        } => commands::sign(&file, key.as_deref(), &key_id, out.as_deref()),
        Command::Verify { file, sig, pins } => {
            commands::verify(&file, sig.as_deref(), pins.as_deref())
        }
        Command::Encrypt { file, jwe_key, out } => {
            commands::encrypt(&file, jwe_key.as_deref(), out.as_deref())
        }
        Command::Decrypt { file, jwe_key, out } => {
            commands::decrypt(&file, jwe_key.as_deref(), out.as_deref())
        }
        Command::Token {
            subject,
            scopes,
            ttl,
            key,
            now,
            json,
        } => commands::token(&subject, &scopes, ttl, key.as_deref(), now, json),
        Command::Resolve {
            symbol,
            token,
            registry,
            key,
            now,
        } => commands::resolve(&symbol, &token, registry.as_deref(), key.as_deref(), now),
        Command::Drift {
            document,
            page,
            registry,
            pins,
            json,
        } => commands::drift(&document, &page, registry.as_deref(), pins.as_deref(), json),
        Command::Serve { port } => commands::serve(port),
        Command::Bench {
            iterations,
            seed,
            out,
            json,
        } => commands::bench(iterations, seed, out.as_deref(), json),
    }
}
