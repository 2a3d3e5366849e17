//! `cycletrace` — replay a sales ledger, cancel circular trades, and leave
//! an audit trail on disk.
//!
//! Subcommands: `detect` (the pipeline), `gen` (synthetic ledgers), `bench`
//! (timing sweeps), `report` (human summary of a finished run), and
//! `widest-path` (debug view of the path search). Every run that produces
//! artifacts also writes a `manifest.json` with the input digest so a run
//! can be tied back to its exact input later.
//!
//! Exit codes: 0 success, 1 parse/validation problem, 2 I/O problem,
//! 3 verification mismatch. Set `CYCLETRACE_LOG=info` (or `debug`) for
//! progress chatter on stderr.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use cycletrace_core::oracle::{audit_removals, AuditError, SmallInstanceBudget};
use cycletrace_core::synth::{
    bench_csv, bench_svg, generate, run_benchmarks, BenchTemplate, SynthConfig,
};
use cycletrace_core::{
    aggregate_pairs, max_min, net_tax_position, parse_ledger, removals_to_jsonl, run_wcd,
    serialize_ledger, DealerId, LedgerError, LedgerFormat, MultiGraph, ParseMode, SearchError,
    Transaction, WcdStats,
};

#[derive(Parser)]
#[command(name = "cycletrace", version, about = "Circular-trading forensics for taxed-sales ledgers")]
struct Cli {
    /// Override the seed used by `gen` and `bench`.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Directory where artifacts are written.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Format for path data printed to stdout (`widest-path`).
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Jsonl,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a ledger chronologically, cancelling every cycle as it forms.
    ///
    /// Writes residual.csv, removals.jsonl, stats.json and manifest.json
    /// into the output directory.
    Detect {
        /// Ledger CSV: serial,seller_id,buyer_id,time,value_rupees
        input: PathBuf,
        /// Re-check the whole run against an exhaustive validator
        /// (small ledgers only; larger inputs are skipped with a warning).
        #[arg(long)]
        verify: bool,
        /// Also write the residual graph as residual.dot.
        #[arg(long)]
        dot: bool,
        /// Skip rows that fail validation instead of aborting.
        #[arg(long)]
        lenient: bool,
    },
    /// Generate a synthetic ledger (plus ground-truth labels) from a JSON config.
    Gen {
        /// JSON config: dealers, legit_edges, rings, seed.
        config: PathBuf,
    },
    /// Time full replays across ledger sizes; writes bench.csv and bench.svg.
    Bench {
        /// Ledger sizes (edge counts) to sweep.
        #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000")]
        sizes: Vec<usize>,
        /// Timed repetitions per size.
        #[arg(long, default_value_t = 3)]
        reps: u32,
    },
    /// Render a finished detect run as aggregated.dot, net_tax.csv and summary.md.
    Report {
        /// Directory holding residual.csv, removals.jsonl and stats.json.
        run_dir: PathBuf,
    },
    /// Print the widest (maximum-bottleneck) path between two dealers.
    WidestPath {
        /// Ledger CSV to load.
        input: PathBuf,
        /// Start dealer.
        #[arg(long)]
        from: String,
        /// Goal dealer.
        #[arg(long)]
        to: String,
    },
}

/// Errors mapped onto the exit-code contract. Validation problems are the
/// caller's to fix (bad rows, bad config, unknown dealers); I/O problems are
/// environmental; a verification mismatch means the pipeline and the
/// exhaustive checker disagree and the run must not be trusted.
enum CliError {
    Invalid(String),
    Io(String),
    Verify(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(msg) => write!(f, "{msg}"),
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Verify(msg) => write!(f, "verification mismatch: {msg}"),
        }
    }
}

impl From<LedgerError> for CliError {
    fn from(err: LedgerError) -> Self {
        match err {
            LedgerError::Io(io) => CliError::Io(format!("ledger I/O: {io}")),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

fn io_err(context: &str, path: &Path, err: std::io::Error) -> CliError {
    CliError::Io(format!("{context} {}: {err}", path.display()))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| io_err("reading", path, e))
}

/// Write via a sibling temp file and rename, so a crash never leaves a
/// half-written artifact behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_else(|| "artifact".into());
    name.push(".tmp");
    let tmp = path.with_file_name(name);
    let mut file = fs::File::create(&tmp).map_err(|e| io_err("creating", &tmp, e))?;
    file.write_all(bytes).map_err(|e| io_err("writing", &tmp, e))?;
    file.sync_all().map_err(|e| io_err("flushing", &tmp, e))?;
    drop(file);
    fs::rename(&tmp, path).map_err(|e| io_err("renaming into place", path, e))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// One per artifact-producing run; ties outputs back to the exact input.
#[derive(Serialize)]
struct RunManifest {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    input_path: Option<String>,
    input_sha256: Option<String>,
    out_dir: String,
    flags: Vec<String>,
    started_at_utc: String,
    duration_seconds: f64,
}

struct ManifestDraft {
    command: &'static str,
    input_path: Option<String>,
    input_sha256: Option<String>,
    flags: Vec<String>,
    started_at_utc: String,
    started: Instant,
}

impl ManifestDraft {
    fn new(command: &'static str) -> Self {
        ManifestDraft {
            command,
            input_path: None,
            input_sha256: None,
            flags: Vec::new(),
            started_at_utc: chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ").to_string(),
            started: Instant::now(),
        }
    }

    fn input(mut self, path: &Path, bytes: &[u8]) -> Self {
        self.input_path = Some(path.display().to_string());
        self.input_sha256 = Some(sha256_hex(bytes));
        self
    }

    fn flag(mut self, flag: impl Into<String>) -> Self {
        self.flags.push(flag.into());
        self
    }

    /// Finalize and write `manifest.json`; the last artifact of a run, so
    /// its presence means the run completed.
    fn write(self, out_dir: &Path) -> Result<(), CliError> {
        let manifest = RunManifest {
            tool: "cycletrace",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            input_path: self.input_path,
            input_sha256: self.input_sha256,
            out_dir: out_dir.display().to_string(),
            flags: self.flags,
            started_at_utc: self.started_at_utc,
            duration_seconds: self.started.elapsed().as_secs_f64(),
        };
        let json = serde_json::to_string_pretty(&manifest)
            .expect("manifest serialization cannot fail");
        write_atomic(&out_dir.join("manifest.json"), format!("{json}\n").as_bytes())
    }
}

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out).map_err(|e| io_err("creating output directory", out, e))
}

/// Residual edges as a ledger, oldest first, serials reassigned 1..; the
/// file re-parses with the same reader that accepts input ledgers.
fn residual_to_csv(g: &MultiGraph) -> Vec<u8> {
    let mut edges: Vec<_> = g.iter_edges().collect();
    edges.sort_by(|a, b| {
        (a.time, &a.seller, &a.buyer).cmp(&(b.time, &b.seller, &b.buyer))
    });
    let transactions: Vec<Transaction> = edges
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            Transaction::new(i as u64 + 1, e.seller, e.buyer, e.time, e.value)
                .expect("residual edges satisfy ledger invariants")
        })
        .collect();
    let mut buf = Vec::new();
    serialize_ledger(&transactions, &mut buf).expect("writing to memory cannot fail");
    buf
}

fn cmd_detect(
    out: &Path,
    input: &Path,
    verify: bool,
    dot: bool,
    lenient: bool,
) -> Result<(), CliError> {
    let mut draft = ManifestDraft::new("detect");
    for (on, name) in [(verify, "--verify"), (dot, "--dot"), (lenient, "--lenient")] {
        if on {
            draft = draft.flag(name);
        }
    }

    let bytes = read_bytes(input)?;
    let draft = draft.input(input, &bytes);
    let mode = if lenient { ParseMode::Lenient } else { ParseMode::Strict };
    let parsed = parse_ledger(bytes.as_slice(), LedgerFormat::Csv, mode)?;
    for diagnostic in &parsed.skipped {
        log::warn!("skipped line {}: {}", diagnostic.line, diagnostic.error);
    }

    let result = run_wcd(&parsed.transactions)
        .map_err(|e| CliError::Invalid(format!("replay failed: {e}")))?;

    if verify {
        let budget = SmallInstanceBudget::default();
        if budget.admits_ledger(&parsed.transactions) {
            match audit_removals(&parsed.transactions, &result, &budget) {
                Ok(()) => log::info!("exhaustive verification passed"),
                Err(AuditError::Mismatch { detail }) => return Err(CliError::Verify(detail)),
                Err(AuditError::Budget(e)) => {
                    log::warn!("verification skipped after admission: {e}")
                }
            }
        } else {
            log::warn!(
                "input exceeds the exhaustive-verification budget ({} rows); skipping --verify",
                parsed.transactions.len()
            );
        }
    }

    ensure_out_dir(out)?;
    write_atomic(&out.join("residual.csv"), &residual_to_csv(&result.residual))?;
    write_atomic(
        &out.join("removals.jsonl"),
        removals_to_jsonl(&result.removals).as_bytes(),
    )?;
    let stats_json = serde_json::to_string_pretty(&result.stats)
        .expect("stats serialization cannot fail");
    write_atomic(&out.join("stats.json"), format!("{stats_json}\n").as_bytes())?;
    if dot {
        write_atomic(
            &out.join("residual.dot"),
            result.residual.to_dot("residual").as_bytes(),
        )?;
    }
    draft.write(out)?;

    println!(
        "{} rows in, {} cycles cancelled ({} drained), {} edges remain -> {}",
        result.stats.edges_in,
        result.stats.cycles_cancelled,
        result.stats.paise_cancelled.format_indian(),
        result.stats.edges_surviving,
        out.display()
    );
    Ok(())
}

fn cmd_gen(out: &Path, config_path: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let bytes = read_bytes(config_path)?;
    let mut draft = ManifestDraft::new("gen").input(config_path, &bytes);
    let mut config: SynthConfig = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Invalid(format!("bad config {}: {e}", config_path.display())))?;
    if let Some(seed) = seed {
        config.seed = seed;
        draft = draft.flag(format!("--seed={seed}"));
    }

    let ledger = generate(&config).map_err(|e| CliError::Invalid(e.to_string()))?;

    ensure_out_dir(out)?;
    let mut csv = Vec::new();
    serialize_ledger(&ledger.transactions, &mut csv).expect("writing to memory cannot fail");
    write_atomic(&out.join("ledger.csv"), &csv)?;
    write_atomic(&out.join("labels.csv"), ledger.labels_csv().as_bytes())?;
    draft.write(out)?;

    println!(
        "{} transactions over {} dealers (seed {}) -> {}",
        ledger.transactions.len(),
        config.dealers,
        config.seed,
        out.display()
    );
    Ok(())
}

fn cmd_bench(out: &Path, sizes: &[usize], reps: u32, seed: Option<u64>) -> Result<(), CliError> {
    if sizes.is_empty() {
        return Err(CliError::Invalid("--sizes must name at least one size".into()));
    }
    if reps == 0 {
        return Err(CliError::Invalid("--reps must be at least 1".into()));
    }
    let mut draft = ManifestDraft::new("bench")
        .flag(format!(
            "--sizes={}",
            sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        ))
        .flag(format!("--reps={reps}"));
    let mut template = BenchTemplate::default();
    if let Some(seed) = seed {
        template.seed = seed;
        draft = draft.flag(format!("--seed={seed}"));
    }

    log::info!("timing {} sizes x {reps} repetitions", sizes.len());
    let rows = run_benchmarks(sizes, &template, reps);

    ensure_out_dir(out)?;
    write_atomic(&out.join("bench.csv"), bench_csv(&rows).as_bytes())?;
    write_atomic(&out.join("bench.svg"), bench_svg(&rows).as_bytes())?;
    draft.write(out)?;

    for (edges, median) in cycletrace_core::synth::median_by_size(&rows) {
        println!("{edges} edges: median {median:.3}s over {reps} runs");
    }
    println!("-> {}", out.display());
    Ok(())
}

fn read_run_dir(run_dir: &Path) -> Result<(MultiGraph, Vec<String>, WcdStats), CliError> {
    let residual_bytes = read_bytes(&run_dir.join("residual.csv"))?;
    let parsed = parse_ledger(residual_bytes.as_slice(), LedgerFormat::Csv, ParseMode::Strict)?;
    let residual = MultiGraph::from_transactions(&parsed.transactions)
        .map_err(|e| CliError::Invalid(format!("residual.csv is not a valid graph: {e}")))?;

    let removals_path = run_dir.join("removals.jsonl");
    let removals_text =
        fs::read_to_string(&removals_path).map_err(|e| io_err("reading", &removals_path, e))?;
    let mut removal_lines = Vec::new();
    for (i, line) in removals_text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        cycletrace_core::RemovalRecord::from_json(line).map_err(|e| {
            CliError::Invalid(format!("removals.jsonl line {}: {e}", i + 1))
        })?;
        removal_lines.push(line.to_string());
    }

    let stats_path = run_dir.join("stats.json");
    let stats_text =
        fs::read_to_string(&stats_path).map_err(|e| io_err("reading", &stats_path, e))?;
    let stats: WcdStats = serde_json::from_str(&stats_text)
        .map_err(|e| CliError::Invalid(format!("stats.json: {e}")))?;

    Ok((residual, removal_lines, stats))
}

/// Pair totals over all surviving parallel edges, rendered for graphviz.
fn aggregated_dot(residual: &MultiGraph) -> String {
    let mut dot = String::from("digraph aggregated {\n    rankdir=LR;\n");
    for ((seller, buyer), total) in aggregate_pairs(residual) {
        dot.push_str(&format!(
            "    \"{seller}\" -> \"{buyer}\" [label=\"{}\"];\n",
            total.format_indian()
        ));
    }
    dot.push_str("}\n");
    dot
}

fn net_tax_csv(residual: &MultiGraph) -> String {
    let mut csv = String::from("dealer_id,net_paise\n");
    for (dealer, net) in net_tax_position(residual) {
        csv.push_str(&format!("{dealer},{}\n", net.paise()));
    }
    csv
}

fn summary_md(stats: &WcdStats, removal_count: usize, residual: &MultiGraph) -> String {
    let mut md = String::from("# Run summary\n\n");
    md.push_str(&format!(
        "- Transactions replayed: {}\n- Dealers: {}\n- Cycles cancelled: {} \
         ({} removal records)\n- Value drained: {}\n- Surviving transactions: {}\n",
        stats.edges_in,
        stats.dealers,
        stats.cycles_cancelled,
        removal_count,
        stats.paise_cancelled.format_indian(),
        stats.edges_surviving,
    ));

    md.push_str("\n## Aggregated residual flows\n\n");
    let pairs = aggregate_pairs(residual);
    if pairs.is_empty() {
        md.push_str("No surviving transactions.\n");
    } else {
        md.push_str("| Seller | Buyer | Total |\n|---|---|---|\n");
        for ((seller, buyer), total) in pairs {
            md.push_str(&format!("| {seller} | {buyer} | {} |\n", total.format_indian()));
        }
    }

    md.push_str("\n## Net tax position (residual only)\n\n");
    let positions = net_tax_position(residual);
    if positions.is_empty() {
        md.push_str("No dealers.\n");
    } else {
        md.push_str("| Dealer | Output − input |\n|---|---|\n");
        for (dealer, net) in positions {
            md.push_str(&format!("| {dealer} | {} |\n", net.format_indian()));
        }
    }
    md
}

fn cmd_report(run_dir: &Path) -> Result<(), CliError> {
    let (residual, removal_lines, stats) = read_run_dir(run_dir)?;
    write_atomic(&run_dir.join("aggregated.dot"), aggregated_dot(&residual).as_bytes())?;
    write_atomic(&run_dir.join("net_tax.csv"), net_tax_csv(&residual).as_bytes())?;
    write_atomic(
        &run_dir.join("summary.md"),
        summary_md(&stats, removal_lines.len(), &residual).as_bytes(),
    )?;
    println!(
        "report for {} written ({} cancelled cycles, {} surviving edges)",
        run_dir.display(),
        removal_lines.len(),
        stats.edges_surviving
    );
    Ok(())
}

fn cmd_widest_path(
    input: &Path,
    from: &str,
    to: &str,
    format: OutputFormat,
) -> Result<(), CliError> {
    let from = DealerId::from_str(from).map_err(|e| CliError::Invalid(format!("--from: {e}")))?;
    let to = DealerId::from_str(to).map_err(|e| CliError::Invalid(format!("--to: {e}")))?;

    let bytes = read_bytes(input)?;
    let parsed = parse_ledger(bytes.as_slice(), LedgerFormat::Csv, ParseMode::Strict)?;
    let g = MultiGraph::from_transactions(&parsed.transactions)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    if !g.contains_vertex(&from) {
        return Err(CliError::Invalid(format!("unknown dealer {from}")));
    }

    // The search runs from the start vertex toward the goal.
    let path = max_min(&g, &to, &from).map_err(|e| match e {
        SearchError::UnknownVertex(v) => CliError::Invalid(format!("unknown dealer {v}")),
    })?;

    let Some(path) = path else {
        match format {
            OutputFormat::Csv => println!("serial,seller_id,buyer_id,time,value_rupees"),
            OutputFormat::Jsonl => println!("null"),
            OutputFormat::Dot => println!("digraph widest_path {{\n}}"),
        }
        eprintln!("no path from {from} to {to}");
        return Ok(());
    };

    match format {
        OutputFormat::Csv => {
            let transactions: Vec<Transaction> = path
                .edges
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    Transaction::new(
                        i as u64 + 1,
                        e.seller.clone(),
                        e.buyer.clone(),
                        e.time,
                        e.value,
                    )
                    .expect("path edges satisfy ledger invariants")
                })
                .collect();
            let mut buf = Vec::new();
            serialize_ledger(&transactions, &mut buf).expect("writing to memory cannot fail");
            print!("{}", String::from_utf8(buf).expect("ledger CSV is UTF-8"));
        }
        OutputFormat::Jsonl => {
            for e in &path.edges {
                let line = serde_json::json!({
                    "seller": e.seller,
                    "buyer": e.buyer,
                    "time": e.time,
                    "value_paise": e.value,
                });
                println!("{line}");
            }
        }
        OutputFormat::Dot => {
            let mut path_graph = MultiGraph::new();
            for e in &path.edges {
                path_graph
                    .insert_edge(e.seller.clone(), e.buyer.clone(), e.time, e.value)
                    .expect("path edges are distinct");
            }
            print!("{}", path_graph.to_dot("widest_path"));
        }
    }
    eprintln!(
        "{} hops, bottleneck {}, max edge {}",
        path.edges.len(),
        path.bottleneck.format_indian(),
        path.max_edge_value.format_indian()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Detect { input, verify, dot, lenient } => {
            cmd_detect(&cli.out, input, *verify, *dot, *lenient)
        }
        Command::Gen { config } => cmd_gen(&cli.out, config, cli.seed),
        Command::Bench { sizes, reps } => cmd_bench(&cli.out, sizes, *reps, cli.seed),
        Command::Report { run_dir } => cmd_report(run_dir),
        Command::WidestPath { input, from, to } => {
            cmd_widest_path(input, from, to, cli.format)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("CYCLETRACE_LOG", "warn"),
    )
    .format_timestamp(None)
    .init();

    // Usage mistakes follow the same exit-code contract as bad input files.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
