//! Command-line front end of the experiment harness.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use txnav::harness::{builtin_sweep, read_trace, render_trajectory_plot, run_and_write, ExperimentSpec, SWEEP_NAMES};
use txnav::world::Scenario;
use txnav::Error;

#[derive(Parser)]
#[command(name = "txnav", version, about = "Simulate robots that transmit a data buffer while moving")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a spec file.
    Run {
        #[arg(long)]
        spec: PathBuf,
        /// Master seed; overrides the one in the spec file.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides the spec file (default results/<name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Render an episode CSV as an SVG trajectory plot.
    Plot {
        /// Episode CSV written by `run` or `sweep`.
        input: PathBuf,
        /// Built-in scenario name or scenario file the episode ran on.
        #[arg(long)]
        scenario: String,
        /// SVG file to write (default: the input with an .svg extension).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in sweep.
    Sweep {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SWEEP_NAMES))]
        name: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory (default results/<sweep>).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        /// Replace the scenario of every spec in the sweep.
        #[arg(long)]
        scenario: Option<String>,
    },
}

fn summarize(dir: &Path, result: &txnav::harness::ExperimentResult) {
    let done: usize = result.summaries.iter().map(|s| s.completed).sum();
    let total: usize = result.summaries.iter().map(|s| s.runs).sum();
    println!("{}: {} configurations, {done}/{total} runs terminated", dir.display(), result.configurations.len());
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { spec, seed, out, jobs } => {
            let mut spec = ExperimentSpec::from_path(&spec)?;
            if let Some(s) = seed {
                spec.seed = s;
            }
            let dir = out.or_else(|| spec.out.clone()).unwrap_or_else(|| Path::new("results").join(&spec.name));
            let result = run_and_write(&spec, &dir, jobs)?;
            summarize(&dir, &result);
        }
        Command::Plot { input, scenario, out } => {
            let scenario = Scenario::load(&scenario)?;
            let rows = read_trace(std::fs::File::open(&input)?)?;
            let out = out.unwrap_or_else(|| input.with_extension("svg"));
            render_trajectory_plot(&rows, &scenario, &out)?;
            println!("{}", out.display());
        }
        Command::Sweep { name, seed, out, jobs, scenario } => {
            let root = out.unwrap_or_else(|| Path::new("results").join(&name));
            for mut spec in builtin_sweep(&name, seed)? {
                if let Some(s) = &scenario {
                    spec.scenario = s.clone();
                }
                let dir = root.join(&spec.name);
                let result = run_and_write(&spec, &dir, jobs)?;
                summarize(&dir, &result);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 3 })
        }
    }
}
