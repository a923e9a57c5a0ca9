use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use angrad::{load_runs, load_summary, perf_profile, render_table, run_suite_path, save_profile, Metric, TableId};

#[derive(Parser)]
#[command(name = "angrad", version, about = "Adaptive BB gradient benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every job of a suite configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Performance profile from a runs file.
    Profile {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "iters")]
        metric: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a summary as a text table.
    Table {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        table: String,
    },
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.cmd {
        Cmd::Run { config } => {
            let out = run_suite_path(&config).with_context(|| format!("running {}", config.display()))?;
            let solved = out.records.iter().filter(|r| r.converged).count();
            println!("{} runs, {} converged", out.records.len(), solved);
            println!("wrote {}", out.runs_path.display());
            println!("wrote {}", out.summary_path.display());
            println!("wrote {}", out.profile_path.display());
            for f in &out.failures {
                eprintln!("failed: {f}");
            }
            Ok(out.all_completed())
        }
        Cmd::Profile { input, metric, out } => {
            let metric: Metric = metric.parse()?;
            let records = load_runs(&input)?;
            if records.is_empty() {
                bail!("{} has no runs", input.display());
            }
            let p = perf_profile(&records, metric)?;
            save_profile(&p, &out)?;
            println!("{} methods over {} instances, wrote {}", p.methods.len(), p.problems, out.display());
            Ok(true)
        }
        Cmd::Table { input, table } => {
            let id: TableId = table.parse()?;
            let rows = load_summary(&input)?;
            let t = render_table(&rows, id)?;
            print!("{}", t.text);
            if t.is_partial() {
                eprintln!("warning: partial table, {} cells missing", t.missing);
            }
            Ok(!t.is_partial())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
