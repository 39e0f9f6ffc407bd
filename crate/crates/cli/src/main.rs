use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use qd_cli::output::{cmd_replicate, cmd_run, parallelism_from};
use qd_cli::variants::VariantTable;
use qd_cli::{ResolvedConfig, RunArgs};

#[derive(Parser)]
#[command(name = "qd", version, about = "Quality-diversity optimization runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one run (or a replicate set when --reps is above 1).
    Run(RunArgs),
    /// Execute --reps runs with consecutive seeds and summarize them.
    Replicate(RunArgs),
    /// List the named variants and their flags.
    Variants,
}

fn resolve(args: RunArgs) -> Result<ResolvedConfig> {
    ResolvedConfig::resolve(&args.with_file()?)
}

fn replicate(config: &ResolvedConfig) -> Result<()> {
    let threads = parallelism_from(std::env::var("QD_THREADS").ok().as_deref())?;
    let report = cmd_replicate(config, threads)?;
    for (index, why) in &report.failed {
        eprintln!("warning: replicate {index} failed: {why}");
    }
    if !report.failed.is_empty() {
        eprintln!(
            "warning: summary covers {} of {} replicates",
            report.completed.len(),
            config.reps
        );
    }
    println!("{}", report.summary.display());
    Ok(())
}

fn main_result(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Variants => print!("{VariantTable}"),
        Command::Run(args) => {
            let config = resolve(args)?;
            if config.reps > 1 {
                return replicate(&config);
            }
            let threads = parallelism_from(std::env::var("QD_THREADS").ok().as_deref())?;
            println!("{}", cmd_run(&config, threads)?.display());
        }
        Command::Replicate(args) => replicate(&resolve(args)?)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match main_result(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
