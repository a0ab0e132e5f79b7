use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use touchvis_core::chart::SpecDocument;
use touchvis_core::config::EngineConfig;
use touchvis_core::data::load_dataset;
use touchvis_core::demo::DemoChart;
use touchvis_core::trace::{compare_logs, replay, InputTrace, SnapshotPolicy, Verdict};

#[derive(Parser)]
#[command(name = "touchvis", version, about = "Replay and verify touch interaction traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay an input trace and write its snapshot log.
    Replay {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Policy::Change)]
        snapshot_every: Policy,
        /// Engine config file (`key = value` lines).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Compare a snapshot log with a golden one; exits 1 on mismatch.
    Verify {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        golden: PathBuf,
    },
    /// Write a bundled chart, its data, sample traces and their golden logs.
    Demo {
        #[arg(long, value_enum)]
        chart: Chart,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Change,
    Event,
    Final,
}

impl From<Policy> for SnapshotPolicy {
    fn from(p: Policy) -> Self {
        match p {
            Policy::Change => SnapshotPolicy::Change,
            Policy::Event => SnapshotPolicy::Event,
            Policy::Final => SnapshotPolicy::Final,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Chart {
    Iris,
    Population,
    Unemployment,
}

impl From<Chart> for DemoChart {
    fn from(c: Chart) -> Self {
        match c {
            Chart::Iris => DemoChart::Iris,
            Chart::Population => DemoChart::Population,
            Chart::Unemployment => DemoChart::Unemployment,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run_replay(
    spec: &Path,
    data: &Path,
    trace: &Path,
    out: &Path,
    policy: SnapshotPolicy,
    config: Option<&Path>,
) -> Result<()> {
    let doc = SpecDocument::parse(&read(spec)?).with_context(|| format!("parsing {}", spec.display()))?;
    let dataset = load_dataset(data, &doc.schema()).with_context(|| format!("loading {}", data.display()))?;
    let trace = InputTrace::parse(&read(trace)?).with_context(|| format!("parsing {}", trace.display()))?;
    let base = match config {
        Some(path) => EngineConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => EngineConfig::default(),
    };
    let (log, _) = replay(&doc.chart, &dataset, &trace, &base, policy)?;
    write(out, &log.to_text())
}

fn run_verify(out: &Path, golden: &Path) -> Result<bool> {
    match compare_logs(&read(out)?, &read(golden)?) {
        Verdict::Identical => {
            println!("identical");
            Ok(true)
        }
        Verdict::Differs { line, event_index } => {
            match event_index {
                Some(i) => println!("mismatch: first difference at eventIndex {i} (line {line})"),
                None => println!("mismatch: first difference at line {line}"),
            }
            Ok(false)
        }
    }
}

fn run_demo(chart: DemoChart, out: &Path) -> Result<()> {
    let traces_dir = out.join("traces");
    let golden_dir = out.join("golden");
    fs::create_dir_all(&traces_dir).with_context(|| format!("creating {}", traces_dir.display()))?;
    fs::create_dir_all(&golden_dir).with_context(|| format!("creating {}", golden_dir.display()))?;
    write(&out.join(chart.spec_file_name()), chart.spec_text())?;
    write(&out.join(chart.data_file_name()), chart.data_text())?;
    let (spec, data) = chart.load();
    let traces = chart.traces();
    for demo in &traces {
        let file = format!("{}.jsonl", demo.name);
        write(&traces_dir.join(&file), &demo.trace.to_text())?;
        let (log, _) = replay(&spec, &data, &demo.trace, &EngineConfig::default(), SnapshotPolicy::Change)?;
        write(&golden_dir.join(&file), &log.to_text())?;
    }
    println!("wrote {} traces for {} to {}", traces.len(), chart.name(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Replay {
            spec,
            data,
            trace,
            out,
            snapshot_every,
            config,
        } => run_replay(&spec, &data, &trace, &out, snapshot_every.into(), config.as_deref()).map(|()| true),
        Command::Verify { out, golden } => run_verify(&out, &golden),
        Command::Demo { chart, out } => run_demo(chart.into(), &out).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
