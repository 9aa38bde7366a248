//! `fssp`: generate digraphs, run the firing squad program, check traces and
//! reproduce the result tables.
//!
//! Exit codes: 0 success or fired, 1 not fired or failed rows, 2 invalid
//! input.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fssp_core::experiments::{reproduce_tables, Family, RowResult};
use fssp_core::topology::{random_strongly_connected, sample_ten};
use fssp_core::trace::{check_records, read_trace, records, write_trace};
use fssp_core::{
    default_budget, simulate, Digraph, DigraphFile, Granularity, Selection, SyncReport,
    TopologyMetrics,
};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "fssp",
    version,
    about = "Firing squad synchronization on simplex-channel P systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a digraph and print its metrics.
    Gen(GenArgs),
    /// Run the firing squad program on a digraph.
    Run(RunArgs),
    /// Recompute the synchronization verdict from a trace file.
    Check(CheckArgs),
    /// Re-run every row of the published result tables.
    Tables(TablesArgs),
    /// Validate a digraph and print N, e_g and D.
    Metrics(MetricsArgs),
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Args)]
struct GenArgs {
    /// ring, rings2, rings3, increasing, random or sample.
    generator: String,
    /// Number of cells (ignored by `sample`).
    cells: Option<u32>,
    /// Output file; the digraph goes to stdout when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Seed of the `random` generator.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of the non-cycle arcs the `random` generator adds.
    #[arg(long, default_value_t = 0.05)]
    extra_arcs: f64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

/// Where a digraph comes from: a file, or a generator and a cell count.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Digraph JSON file.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Generator name and cell count, e.g. `--gen ring 6`.
    #[arg(long, num_args = 2, value_names = ["GENERATOR", "CELLS"])]
    gen: Option<Vec<String>>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: Source,
    /// Seed of the `random` generator when `--gen random` is used.
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
    /// Step budget; defaults to 10·N².
    #[arg(long)]
    max_steps: Option<u64>,
    /// Seed for random instance selection; lowest instance when omitted.
    #[arg(long)]
    seed: Option<u64>,
    /// Write a line-delimited JSON trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// `full` or `sampled:<k>`.
    #[arg(long, default_value = "full")]
    granularity: GranularityArg,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct CheckArgs {
    trace: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct TablesArgs {
    /// Seed for random instance selection.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 0)]
    graph_seed: u64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Clone, Copy)]
struct GranularityArg(Granularity);

impl FromStr for GranularityArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "full" {
            return Ok(GranularityArg(Granularity::Full));
        }
        let k = s
            .strip_prefix("sampled:")
            .and_then(|k| k.parse::<u64>().ok())
            .filter(|&k| k > 0)
            .ok_or_else(|| format!("expected `full` or `sampled:<k>` with k ≥ 1, got `{s}`"))?;
        Ok(GranularityArg(Granularity::Sampled(k)))
    }
}

/// Failures that are the caller's fault end with exit code 2.
struct Invalid(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Invalid {
    fn from(e: E) -> Self {
        Invalid(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Check(a) => cmd_check(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Metrics(a) => cmd_metrics(a),
    };
    match result {
        Ok(code) => code,
        Err(Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn selection(seed: Option<u64>) -> Selection {
    seed.map_or(Selection::Lowest, Selection::Seeded)
}

fn generate(name: &str, cells: Option<u32>, seed: u64, extra_arcs: f64) -> Result<Digraph> {
    if name == "sample" {
        return Ok(sample_ten());
    }
    let n = cells.ok_or_else(|| anyhow!("generator `{name}` needs a cell count"))?;
    if name == "random" {
        return Ok(random_strongly_connected(n, extra_arcs, seed)?);
    }
    let family = Family::from_name(name).ok_or_else(|| {
        anyhow!("unknown generator `{name}`; expected ring, rings2, rings3, increasing, random or sample")
    })?;
    Ok(family.build(n)?)
}

fn load(path: &Path) -> Result<Digraph> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let raw: DigraphFile = serde_json::from_reader(BufReader::new(file))
        .with_context(|| format!("{} is not a digraph file", path.display()))?;
    let report = fssp_core::topology::validate(&raw);
    if !report.all_ok() {
        bail!(
            "{} is not a valid digraph: irreflexive={} simple={} strongly_connected={}",
            path.display(),
            report.irreflexive,
            report.simple,
            report.strongly_connected
        );
    }
    Ok(Digraph::try_from(raw)?)
}

fn resolve(source: &Source, graph_seed: u64) -> Result<Digraph> {
    match (&source.file, &source.gen) {
        (Some(path), _) => load(path),
        (None, Some(g)) => {
            let cells = g[1]
                .parse::<u32>()
                .with_context(|| format!("bad cell count `{}`", g[1]))?;
            generate(&g[0], Some(cells), graph_seed, 0.05)
        }
        (None, None) => bail!("no digraph given"),
    }
}

fn metrics_json(m: &TopologyMetrics) -> serde_json::Value {
    json!({ "n": m.size, "eccentricity": m.eccentricity, "diameter": m.diameter })
}

fn metrics_text(m: &TopologyMetrics) -> String {
    format!("N={} e_g={} D={}", m.size, m.eccentricity, m.diameter)
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode, Invalid> {
    let d = generate(&a.generator, a.cells, a.seed, a.extra_arcs)?;
    let m = d.metrics()?;
    let text = serde_json::to_string(&d).expect("digraphs serialize") + "\n";
    match &a.out {
        Some(path) => std::fs::write(path, &text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    let line = match a.format {
        Format::Text => metrics_text(&m),
        Format::Json => metrics_json(&m).to_string(),
    };
    // keep stdout clean for the digraph itself
    if a.out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
    Ok(ExitCode::SUCCESS)
}

fn verdict_text(r: &SyncReport) -> String {
    let step = r.firing_step.map_or("none".to_string(), |s| s.to_string());
    let mut s = format!("fired={} step={step}", r.fired);
    if let Some(f) = r.failure {
        let reason = serde_json::to_value(f).expect("plain enum");
        s.push_str(&format!(" reason={}", reason.as_str().unwrap_or("unknown")));
    }
    s
}

fn cmd_run(a: RunArgs) -> Result<ExitCode, Invalid> {
    let d = resolve(&a.source, a.graph_seed)?;
    let m = d.metrics()?;
    let budget = a.max_steps.unwrap_or_else(|| default_budget(d.len()));
    let granularity = if a.trace.is_some() {
        a.granularity.0
    } else {
        Granularity::Sampled(0)
    };
    let (trace, report) = simulate(&d, selection(a.seed), budget, granularity)?;
    if let Some(path) = &a.trace {
        let file =
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        write_trace(BufWriter::new(file), &records(&trace, &report))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    match a.format {
        Format::Text => println!(
            "{} {} steps_taken={}",
            verdict_text(&report),
            metrics_text(&m),
            trace.steps_taken()
        ),
        Format::Json => println!(
            "{}",
            json!({
                "sync": report,
                "metrics": metrics_json(&m),
                "stepsTaken": trace.steps_taken(),
                "halt": trace.halt,
            })
        ),
    }
    Ok(if report.fired {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_check(a: CheckArgs) -> Result<ExitCode, Invalid> {
    let file =
        File::open(&a.trace).with_context(|| format!("cannot open {}", a.trace.display()))?;
    let recs = read_trace(BufReader::new(file))
        .with_context(|| format!("malformed trace {}", a.trace.display()))?;
    let report = check_records(&recs);
    match a.format {
        Format::Text => {
            println!("{}", verdict_text(&report));
            println!(
                "simultaneous={} first_time={}",
                report.simultaneous, report.first_time
            );
        }
        Format::Json => println!("{}", serde_json::to_value(&report).expect("plain data")),
    }
    Ok(if report.fired {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn row_json(r: &RowResult) -> serde_json::Value {
    json!({
        "family": r.expected.family.name(),
        "expected": {
            "n": r.expected.n,
            "eccentricity": r.expected.eccentricity,
            "diameter": r.expected.diameter,
            "steps": r.expected.steps,
        },
        "observed": r.observed,
        "pass": r.passed(),
        "diameterMatches": r.diameter_matches(),
    })
}

fn cmd_tables(a: TablesArgs) -> Result<ExitCode, Invalid> {
    let rows = reproduce_tables(selection(a.seed))?;
    let passed = rows.iter().filter(|r| r.passed()).count();
    match a.format {
        Format::Json => {
            let out = json!({ "rows": rows.iter().map(row_json).collect::<Vec<_>>(), "passed": passed, "total": rows.len() });
            println!("{out}");
        }
        Format::Text => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(
                out,
                "{:<11} {:>3} {:>4} {:>3} {:>6}   {:>3} {:>4} {:>3} {:>6}   result",
                "family", "N", "e_g", "D", "steps", "N", "e_g", "D", "steps"
            );
            let _ = writeln!(out, "{:<11} {:^19}   {:^19}", "", "observed", "expected");
            for r in &rows {
                let (e, o) = (&r.expected, &r.observed);
                let steps = o.steps.map_or("-".to_string(), |s| s.to_string());
                let verdict = if r.passed() { "PASS" } else { "FAIL" };
                let note = if r.diameter_matches() {
                    ""
                } else {
                    "  (D differs)"
                };
                let _ = writeln!(
                    out,
                    "{:<11} {:>3} {:>4} {:>3} {:>6}   {:>3} {:>4} {:>3} {:>6}   {verdict}{note}",
                    e.family.name(),
                    o.n,
                    o.eccentricity,
                    o.diameter,
                    steps,
                    e.n,
                    e.eccentricity,
                    e.diameter,
                    e.steps
                );
            }
            let _ = writeln!(out, "{passed}/{} rows pass", rows.len());
        }
    }
    Ok(if passed == rows.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_metrics(a: MetricsArgs) -> Result<ExitCode, Invalid> {
    let d = resolve(&a.source, a.graph_seed)?;
    let m = d.metrics()?;
    match a.format {
        Format::Text => println!("{} strongly_connected=true", metrics_text(&m)),
        Format::Json => println!("{}", metrics_json(&m)),
    }
    Ok(ExitCode::SUCCESS)
}
