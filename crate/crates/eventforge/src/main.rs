//! Command-line front end: the whole pipeline as subcommands for
//! batch use and CI.
//!
//! Subcommands mirror the library's stages — `extract` runs a
//! document through chunking, prompting, and lifting; `validate`
//! grades classes and structural defects; `reason` prints causal
//! pairs or cascades; `translate` emits a Coq module; `score`
//! compares runs; `demo` runs a bundled narrative end to end with the
//! deterministic mock backend.
//!
//! Conventions:
//! - Machine-readable output (Turtle, JSON, CSV, `.v`) goes to files
//!   or to stdout alone; logs and warnings go to stderr, never mixed
//!   into data.
//! - Exit codes: 0 success; 1 unusable input (missing file, parse
//!   failure, offline cache miss); 2 partial success (some chunks
//!   failed, but the surviving graph was still written).
//! - `EVENTFORGE_OFFLINE=1` forces cache-only knowledge queries;
//!   `EVENTFORGE_COQC=/path/to/coqc` names the external checker used
//!   by `translate --check`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use eventforge::causal::{find_cascades, may_have_caused, CausalConfig};
use eventforge::coqgen::{emit_file, CoqgenConfig};
use eventforge::event::EventGraph;
use eventforge::metrics::{compare, score, GoldLocations, GraphMetrics};
use eventforge::ontology::{validate_graph, ClassReport, ValidationConfig};
use eventforge::pipeline::{
    run_pipeline, ExtractionConfig, KnowledgeClients, LlmBackend, MockBackend, Mode, NoNetwork,
    Retriever, RunReport, TokenCosineRetriever,
};

/// Narrative bundled for the `demo` subcommand.
const DEMO_TEXT: &str = include_str!("../data/thucydides_sample.txt");

// ===== Argument surface =====

#[derive(Parser)]
#[command(
    name = "eventforge",
    version,
    about = "Historical-event extraction, validation, causal reasoning, and Coq translation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    /// Deterministic built-in backend; no network or model needed.
    Mock,
    /// Remote HTTP model endpoint (not bundled in this build).
    Http,
}

#[derive(Subcommand)]
enum Command {
    /// Extract events from a narrative document into Turtle.
    Extract {
        /// Input document (plain text).
        input: PathBuf,
        /// Extraction config (TOML); built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Language-model backend.
        #[arg(long, value_enum, default_value_t = BackendKind::Mock)]
        backend: BackendKind,
        /// Output Turtle path.
        #[arg(long)]
        out: PathBuf,
        /// Run-report JSON path (default: `<out>.report.json`).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Retrieval corpus for rag mode: text file, one passage per
        /// blank-line-separated block.
        #[arg(long)]
        rag_corpus: Option<PathBuf>,
        /// Serve knowledge queries from cache only; a cold cache is an
        /// error rather than a network call.
        #[arg(long)]
        offline: bool,
    },
    /// Grade a Turtle graph: class verdicts, defects, parse errors.
    Validate {
        /// Input Turtle graph.
        input: PathBuf,
    },
    /// Print causal pairs, or full cascades with --cascades.
    Reason {
        /// Input Turtle graph.
        input: PathBuf,
        /// Print three-event cascades instead of pairwise links.
        #[arg(long)]
        cascades: bool,
    },
    /// Translate a Turtle graph into a Coq module.
    Translate {
        /// Input Turtle graph.
        input: PathBuf,
        /// Output `.v` path.
        #[arg(long)]
        out: PathBuf,
        /// Run the emitted file through an external Coq checker
        /// (EVENTFORGE_COQC or --coqc); skipped with a warning when
        /// none is configured.
        #[arg(long)]
        check: bool,
        /// Path to the Coq checker binary; overrides EVENTFORGE_COQC.
        #[arg(long)]
        coqc: Option<PathBuf>,
        /// Also emit classes that validation judged suspect.
        #[arg(long)]
        include_suspect: bool,
    },
    /// Score one or more graphs and print a comparison table.
    Score {
        /// Input Turtle graphs, compared side by side.
        #[arg(required = true)]
        input: Vec<PathBuf>,
        /// Gold locations file (name, lat, lon per line).
        #[arg(long)]
        gold: Option<PathBuf>,
        /// Also write the comparison as CSV to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Row label; repeat to label each input (default: file stem).
        #[arg(long)]
        label: Vec<String>,
    },
    /// Run the bundled narrative end to end with the mock backend.
    Demo {
        /// Directory for the demo's output files.
        #[arg(long, default_value = "eventforge-demo")]
        out_dir: PathBuf,
    },
}

// ===== Entry point =====

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Extract {
            input,
            config,
            backend,
            out,
            report,
            rag_corpus,
            offline,
        } => cmd_extract(&input, config.as_deref(), backend, &out, report, rag_corpus, offline),
        Command::Validate { input } => cmd_validate(&input),
        Command::Reason { input, cascades } => cmd_reason(&input, cascades),
        Command::Translate {
            input,
            out,
            check,
            coqc,
            include_suspect,
        } => cmd_translate(&input, &out, check, coqc, include_suspect),
        Command::Score {
            input,
            gold,
            csv,
            label,
        } => cmd_score(&input, gold.as_deref(), csv.as_deref(), &label),
        Command::Demo { out_dir } => cmd_demo(&out_dir),
    }
}

/// True when the environment variable is set to anything but "" / "0"
/// / "false" (case-insensitive).
fn env_truthy(name: &str) -> bool {
    std::env::var(name)
        .map(|v| {
            let v = v.trim().to_ascii_lowercase();
            !(v.is_empty() || v == "0" || v == "false")
        })
        .unwrap_or(false)
}

fn read_to_string(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("cannot create {}", parent.display()))?;
        }
    }
    std::fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Strict parse for subcommands that must not reason over partial
/// data; on failure, lists every unparseable statement's line.
fn load_graph_strict(path: &Path) -> anyhow::Result<EventGraph> {
    let text = read_to_string(path)?;
    match EventGraph::load(&text) {
        Ok(graph) => Ok(graph),
        Err(_) => {
            let (_, errors) = EventGraph::load_recovering(&text);
            for e in &errors {
                eprintln!("{}: {}", path.display(), e);
            }
            bail!("{} parse errors in {}", errors.len(), path.display());
        }
    }
}

/// Grade classes, tolerating the impossible-for-lifted-graphs error.
fn classify(graph: &EventGraph) -> anyhow::Result<Vec<ClassReport>> {
    validate_graph(graph, &ValidationConfig::default())
        .map_err(|e| anyhow::anyhow!("class validation failed: {}", e))
}

// ===== extract =====

#[allow(clippy::too_many_arguments)]
fn cmd_extract(
    input: &Path,
    config_path: Option<&Path>,
    backend_kind: BackendKind,
    out: &Path,
    report_path: Option<PathBuf>,
    rag_corpus: Option<PathBuf>,
    offline_flag: bool,
) -> anyhow::Result<u8> {
    let doc = read_to_string(input)?;
    let config = match config_path {
        Some(p) => ExtractionConfig::from_file(p)
            .with_context(|| format!("bad config {}", p.display()))?,
        None => ExtractionConfig::default(),
    };
    let offline = offline_flag || env_truthy("EVENTFORGE_OFFLINE");

    let backend: Box<dyn LlmBackend> = match backend_kind {
        BackendKind::Mock => Box::new(MockBackend),
        BackendKind::Http => bail!(
            "the http backend needs a remote model endpoint, which this \
             build does not bundle; use --backend mock"
        ),
    };

    let retriever: Option<TokenCosineRetriever> = match (&config.mode, rag_corpus) {
        (Mode::RagEnhanced { .. }, Some(path)) => {
            let corpus = read_to_string(&path)?;
            let passages: Vec<String> = corpus
                .split("\n\n")
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(str::to_string)
                .collect();
            Some(TokenCosineRetriever::index(&passages))
        }
        (Mode::RagEnhanced { .. }, None) => {
            bail!("rag mode needs --rag-corpus <file> to retrieve from")
        }
        (_, Some(_)) => {
            log::warn!("--rag-corpus ignored: mode is not rag-enhanced");
            None
        }
        (_, None) => None,
    };

    let clients = KnowledgeClients::from_config(&config, Arc::new(NoNetwork), offline)
        .map_err(|e| anyhow::anyhow!("gazetteer: {}", e))?;
    let (graph, report) = run_pipeline(
        &doc,
        &config,
        backend.as_ref(),
        retriever.as_ref().map(|r| r as &dyn Retriever),
        &clients,
    )?;

    write_file(out, &graph.to_turtle())?;
    let report_path = report_path.unwrap_or_else(|| default_report_path(out));
    write_file(&report_path, &report.to_json())?;
    log::info!(
        "extracted {} events from {} chunks into {}",
        report.event_count,
        report.chunk_count,
        out.display()
    );

    Ok(exit_code_for(&report, offline))
}

fn default_report_path(out: &Path) -> PathBuf {
    out.with_extension("report.json")
}

fn exit_code_for(report: &RunReport, offline: bool) -> u8 {
    if offline && report.stats.offline_misses > 0 {
        eprintln!(
            "error: offline mode, but {} knowledge queries were not in the cache; \
             run once without --offline to warm it",
            report.stats.offline_misses
        );
        return 1;
    }
    if report.failed_chunks > 0 {
        eprintln!(
            "warning: {} of {} chunks failed; the graph holds the remainder",
            report.failed_chunks, report.chunk_count
        );
        return 2;
    }
    0
}

// ===== validate =====

fn cmd_validate(input: &Path) -> anyhow::Result<u8> {
    let text = read_to_string(input)?;
    let (graph, parse_errors) = EventGraph::load_recovering(&text);
    let reports = classify(&graph)?;

    println!(
        "{}: {} events, {} parse errors, {} defects",
        input.display(),
        graph.events.len(),
        parse_errors.len(),
        graph.defects.len()
    );
    for e in &parse_errors {
        println!("parse-error: {}", e);
    }
    for report in &reports {
        println!(
            "class {}: {} (bearers {}, indicators [{}], time {:.0}%, agent {:.0}%, \
             location {:.0}%, checks {}/3)",
            report.class,
            report.verdict,
            report.bearer_count,
            report.indicators.join(" "),
            report.time_ratio * 100.0,
            report.agent_ratio * 100.0,
            report.location_ratio * 100.0,
            report.checks_passed
        );
    }
    for defect in &graph.defects {
        println!("defect {}: {}", defect.event_id, defect.kind);
    }
    Ok(0)
}

// ===== reason =====

fn cmd_reason(input: &Path, cascades: bool) -> anyhow::Result<u8> {
    let graph = load_graph_strict(input)?;
    let config = CausalConfig::default();
    if cascades {
        for (a, b, c) in find_cascades(&graph, &config) {
            println!("{} -> {} -> {}", a, b, c);
        }
    } else {
        // Pairwise candidate links, in the graph's natural id order.
        for e1 in &graph.events {
            for e2 in &graph.events {
                if e1.id != e2.id && may_have_caused(e1, e2, &config) {
                    println!("{} -> {}", e1.id, e2.id);
                }
            }
        }
    }
    Ok(0)
}

// ===== translate =====

fn cmd_translate(
    input: &Path,
    out: &Path,
    check: bool,
    coqc: Option<PathBuf>,
    include_suspect: bool,
) -> anyhow::Result<u8> {
    let graph = load_graph_strict(input)?;
    let reports = classify(&graph)?;
    let config = CoqgenConfig {
        include_suspect,
        ..CoqgenConfig::default()
    };
    let artifact = emit_file(&graph, &reports, &CausalConfig::default(), &config)
        .map_err(|e| anyhow::anyhow!("emission failed: {}", e))?;
    write_file(out, &artifact.source_text)?;
    for (wanted, got) in &artifact.renames {
        log::warn!("identifier '{}' was taken; emitted '{}'", wanted, got);
    }
    let proved = artifact.theorem_manifest.iter().filter(|t| t.proved).count();
    log::info!(
        "emitted {} with {} declarations, {} theorems proved",
        out.display(),
        artifact.declared_names.len(),
        proved
    );

    if check {
        let checker = coqc.or_else(|| std::env::var_os("EVENTFORGE_COQC").map(PathBuf::from));
        match checker {
            Some(bin) => {
                let status = std::process::Command::new(&bin)
                    .arg("-q")
                    .arg(out)
                    .status()
                    .with_context(|| format!("cannot run checker {}", bin.display()))?;
                if !status.success() {
                    bail!("Coq checker rejected {}", out.display());
                }
                log::info!("{} type-checked cleanly", out.display());
            }
            None => {
                eprintln!(
                    "warning: no Coq checker configured (set EVENTFORGE_COQC or pass \
                     --coqc); emission succeeded, type-check skipped"
                );
            }
        }
    }
    Ok(0)
}

// ===== score =====

fn cmd_score(
    inputs: &[PathBuf],
    gold_path: Option<&Path>,
    csv_path: Option<&Path>,
    labels: &[String],
) -> anyhow::Result<u8> {
    if !labels.is_empty() && labels.len() != inputs.len() {
        bail!(
            "{} labels given for {} inputs; pass --label once per --input or not at all",
            labels.len(),
            inputs.len()
        );
    }
    let gold = gold_path
        .map(|p| GoldLocations::from_file(p).map_err(|e| anyhow::anyhow!("{}", e)))
        .transpose()?;

    let mut runs: Vec<(String, GraphMetrics)> = Vec::with_capacity(inputs.len());
    for (i, path) in inputs.iter().enumerate() {
        let text = read_to_string(path)?;
        let (graph, parse_errors) = EventGraph::load_recovering(&text);
        let reports = classify(&graph)?;
        let label = labels.get(i).cloned().unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string())
        });
        runs.push((label, score(&graph, &parse_errors, &reports, gold.as_ref())));
    }

    let report = compare(&runs);
    print!("{}", report.text);
    if let Some(path) = csv_path {
        write_file(path, &report.csv)?;
    }
    Ok(0)
}

// ===== demo =====

fn cmd_demo(out_dir: &Path) -> anyhow::Result<u8> {
    let config = ExtractionConfig {
        mode: Mode::RagEnhanced { k: 4 },
        cache_dir: out_dir.join(".cache"),
        ..ExtractionConfig::default()
    };
    let passages: Vec<String> = DEMO_TEXT
        .split("\n\n")
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::to_string)
        .collect();
    let retriever = TokenCosineRetriever::index(&passages);
    let backend = MockBackend;
    let clients = KnowledgeClients::from_config(&config, Arc::new(NoNetwork), false)
        .map_err(|e| anyhow::anyhow!("gazetteer: {}", e))?;

    let (graph, report) = run_pipeline(
        DEMO_TEXT,
        &config,
        &backend,
        Some(&retriever as &dyn Retriever),
        &clients,
    )?;
    write_file(&out_dir.join("graph.ttl"), &graph.to_turtle())?;
    write_file(&out_dir.join("report.json"), &report.to_json())?;

    println!(
        "extracted {} events from {} chunks ({} mode, {} backend)",
        report.event_count, report.chunk_count, report.mode, report.backend
    );

    let reports = classify(&graph)?;
    for class_report in &reports {
        println!("class {}: {}", class_report.class, class_report.verdict);
    }

    let causal = CausalConfig::default();
    let cascades = find_cascades(&graph, &causal);
    println!("cascades found: {}", cascades.len());
    for (a, b, c) in &cascades {
        println!("  {} -> {} -> {}", a, b, c);
    }

    let artifact = emit_file(&graph, &reports, &causal, &CoqgenConfig::default())
        .map_err(|e| anyhow::anyhow!("emission failed: {}", e))?;
    write_file(&out_dir.join("spec.v"), &artifact.source_text)?;
    println!(
        "translated to Coq: {} declarations, {} theorems",
        artifact.declared_names.len(),
        artifact.theorem_manifest.len()
    );

    let metrics = score(&graph, &[], &reports, None);
    let comparison = compare(&[("demo".to_string(), metrics)]);
    print!("{}", comparison.text);
    write_file(&out_dir.join("metrics.csv"), &comparison.csv)?;

    println!("outputs written to {}", out_dir.display());
    Ok(exit_code_for(&report, false))
}

// ===== Tests =====
