//! Command-line surface: containment reports, OCN-2 classification, single
//! density-increment steps, the full find-or-certify pipeline, bound
//! evaluation and exact small-scale extremal numbers.
//!
//! Exit codes: 0 = contains / yes, 1 = avoids / no, 2 = error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use eog::driver::{find_or_certify, DriveConfig, DriveOutcome, RecursionConstants};
use eog::exmax::cached_brute_force_ex;
use eog::graph::EdgeOrderedGraph;
use eog::increment::{increment_step, IncrementError, IncrementOutcome, StepConfig};
use eog::oracle;
use eog::pattern::{certify, ocn2_witness};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "eog", version, about = "Edge-ordered graph toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for all sampling (grid Monte Carlo).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Enumerate all grids when their count is at most this; sample otherwise.
    #[arg(long, global = true, default_value_t = 200_000)]
    grid_cap: u64,
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Omit run metadata (timings) so identical invocations are
    /// byte-identical.
    #[arg(long, global = true)]
    no_meta: bool,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether HOST contains PATTERN; print the vertex map if so.
    Contains { host: String, pattern: String },
    /// Classify PATTERN: close vertices, OCN-2 witness, (k, l), left order.
    Classify { pattern: String },
    /// Run one density-increment step on HOST against PATTERN.
    Step { host: String, pattern: String },
    /// Run the find-or-certify pipeline on HOST against PATTERN.
    Drive {
        host: String,
        pattern: String,
        /// Maximum pipeline iterations.
        #[arg(long, default_value_t = 64)]
        budget: usize,
        /// Search-node cap for the terminal oracle pass (0 disables).
        #[arg(long, default_value_t = 50_000_000)]
        oracle_budget: u64,
    },
    /// Print the recursion constants c1..c5 and the bound for (n, k, l).
    Bound {
        n: u64,
        k: usize,
        ell: usize,
    },
    /// Exact ex_<(n, PATTERN) by exhaustive search (desk scale).
    Exmax {
        n: usize,
        pattern: String,
        /// Candidate budget for the search.
        #[arg(long, default_value_t = u64::MAX)]
        budget: u64,
        /// Result cache file (JSON lines, append-only); EOG_EXMAX_CACHE is
        /// used when the flag is absent.
        #[arg(long)]
        cache: Option<PathBuf>,
        /// Allow n = 7 (long-running).
        #[arg(long)]
        large: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    #[cfg(feature = "parallel")]
    if let Some(t) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: --threads: {e}");
            return ExitCode::from(2);
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = cli.common.threads;
    let start = std::time::Instant::now();
    match run(&cli) {
        Ok((report, code)) => {
            match cli.common.format {
                Format::Text => {
                    print!("{}", render_text(&report));
                    if !cli.common.no_meta {
                        println!("elapsed: {:?}", start.elapsed());
                    }
                }
                Format::Json => {
                    let mut report = report;
                    if !cli.common.no_meta {
                        report["meta"] = json!({ "elapsed_ms": start.elapsed().as_millis() as u64 });
                    }
                    println!("{}", serde_json::to_string_pretty(&report).unwrap());
                }
            }
            ExitCode::from(code)
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Flat "key: value" rendering; arrays of scalars inline, nested values as
/// pretty JSON.
fn render_text(v: &serde_json::Value) -> String {
    let mut out = String::new();
    if let Some(map) = v.as_object() {
        for (k, val) in map {
            match val {
                serde_json::Value::String(s) if s.contains('\n') => {
                    out.push_str(&format!("{k}:\n{s}\n"));
                }
                serde_json::Value::Object(_) | serde_json::Value::Array(_) => {
                    out.push_str(&format!("{k}: {}\n", serde_json::to_string(val).unwrap()));
                }
                other => out.push_str(&format!("{k}: {other}\n")),
            }
        }
    }
    out
}

/// A host argument: a file path, or `K<n>` for the complete graph with
/// lexicographic labels.
fn load_host(arg: &str) -> Result<EdgeOrderedGraph, String> {
    if let Some(n) = arg.strip_prefix('K').and_then(|s| s.parse::<usize>().ok()) {
        let mut edges = Vec::new();
        let mut label = 0;
        for u in 0..n {
            for v in (u + 1)..n {
                label += 1;
                edges.push((u, v, label));
            }
        }
        return EdgeOrderedGraph::new(n, edges).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    EdgeOrderedGraph::parse(&text).map_err(|e| format!("{arg}: {e}"))
}

/// A pattern argument: P-notation (e.g. `P5^1342`) or a file path.
fn load_pattern(arg: &str) -> Result<EdgeOrderedGraph, String> {
    if arg.starts_with('P') && arg.contains('^') {
        return EdgeOrderedGraph::parse_path_notation(arg).map_err(|e| e.to_string());
    }
    let text = std::fs::read_to_string(arg).map_err(|e| format!("{arg}: {e}"))?;
    EdgeOrderedGraph::parse(&text).map_err(|e| format!("{arg}: {e}"))
}

fn run(cli: &Cli) -> Result<(serde_json::Value, u8), String> {
    match &cli.cmd {
        Cmd::Contains { host, pattern } => {
            let g = load_host(host)?;
            let h = load_pattern(pattern)?;
            match oracle::contains(&g, &h).map_err(|e| e.to_string())? {
                Some(e) => Ok((
                    json!({ "verdict": "contains", "map": e.map }),
                    0,
                )),
                None => Ok((json!({ "verdict": "avoids" }), 1)),
            }
        }
        Cmd::Classify { pattern } => {
            let h = load_pattern(pattern)?;
            let close = eog::pattern::close_vertices(&h);
            match ocn2_witness(&h).map_err(|e| e.to_string())? {
                Some(w) => {
                    let f = certify(&h).map_err(|e| e.to_string())?;
                    Ok((
                        json!({
                            "ocn2": true,
                            "close_vertices": close,
                            "close_side": w.close_side,
                            "other_side": w.other_side,
                            "left_order": w.left_order,
                            "k": f.k,
                            "ell": f.ell,
                            "star": f.star,
                        }),
                        0,
                    ))
                }
                None => Ok((
                    json!({ "ocn2": false, "close_vertices": close }),
                    1,
                )),
            }
        }
        Cmd::Step { host, pattern } => {
            let g = load_host(host)?.normalize_labels();
            let h = certify(&load_pattern(pattern)?).map_err(|e| e.to_string())?;
            let cfg = StepConfig {
                seed: cli.common.seed,
                grid_cap: cli.common.grid_cap,
                ..StepConfig::default()
            };
            let res = match increment_step(&g, &h, &cfg) {
                Ok(r) => r,
                Err(IncrementError::Diagnostic { msg, audit }) => {
                    return Ok((
                        json!({ "outcome": "diagnostic", "message": msg, "audit": audit }),
                        1,
                    ))
                }
                Err(e) => return Err(e.to_string()),
            };
            let outcome = match &res.outcome {
                IncrementOutcome::DenseSubgraph { edge_indices, average_degree } => json!({
                    "kind": "dense-subgraph",
                    "edges": edge_indices.len(),
                    "average_degree": average_degree.to_string(),
                }),
                IncrementOutcome::FoundEmbedding(ne) => json!({
                    "kind": "found-embedding",
                    "map": ne.embedding.map,
                    "grid": ne.grid.thresholds(),
                }),
                IncrementOutcome::HostReturned => json!({ "kind": "host-returned" }),
            };
            let code = match res.outcome {
                IncrementOutcome::FoundEmbedding(_) => 0,
                _ => 1,
            };
            Ok((json!({ "outcome": outcome, "audit": res.audit }), code))
        }
        Cmd::Drive { host, pattern, budget, oracle_budget } => {
            let g = load_host(host)?;
            let h = certify(&load_pattern(pattern)?).map_err(|e| e.to_string())?;
            let cfg = DriveConfig {
                budget: *budget,
                oracle_budget: *oracle_budget,
                step: StepConfig {
                    seed: cli.common.seed,
                    grid_cap: cli.common.grid_cap,
                    ..StepConfig::default()
                },
            };
            match find_or_certify(&g, &h, &cfg).map_err(|e| e.to_string())? {
                DriveOutcome::FoundEmbedding(e, trace) => Ok((
                    json!({ "verdict": "contains", "map": e.map, "trace": trace }),
                    0,
                )),
                DriveOutcome::DensityCertificate(trace) => Ok((
                    json!({ "verdict": "certificate", "trace": trace }),
                    1,
                )),
            }
        }
        Cmd::Bound { n, k, ell } => {
            let c = RecursionConstants::new(*k, *ell).map_err(|e| e.to_string())?;
            let b = c.bound(*n).map_err(|e| e.to_string())?;
            Ok((
                json!({
                    "n": n, "k": k, "ell": ell,
                    "c1_base": c.c1_base.to_string(),
                    "c1": { "lo": c.c1.0, "hi": c.c1.1 },
                    "c2": c.c2.to_string(),
                    "c3": c.c3.to_string(),
                    "c4": c.c4.to_string(),
                    "c5": { "lo": c.c5.0, "hi": c.c5.1 },
                    "bound": b.to_string(),
                }),
                0,
            ))
        }
        Cmd::Exmax { n, pattern, budget, cache, large } => {
            if *n > 7 || (*n == 7 && !large) {
                return Err(format!(
                    "n = {n} is beyond the desk-scale envelope (n <= 6; n = 7 needs --large)"
                ));
            }
            let h = load_pattern(pattern)?;
            let cache = cache
                .clone()
                .or_else(|| std::env::var_os("EOG_EXMAX_CACHE").map(PathBuf::from));
            let r = cached_brute_force_ex(cache.as_deref(), *n, &h, *budget)
                .map_err(|e| e.to_string())?;
            Ok((
                json!({
                    "n": r.n,
                    "value": r.value,
                    "witness": r.witness,
                    "stats": r.stats,
                }),
                0,
            ))
        }
    }
}
