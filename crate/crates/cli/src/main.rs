use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use finsler_ceq_cli::{exit, run_with_threads, Command, JobConfig, Overrides, RunError};

#[derive(Parser)]
#[command(name = "finsler-ceq", version, about = "Semi-symmetric compatible connections of Finsler metrics")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Recover the torsion one-form at the configured point.
    Solve(JobArgs),
    /// Contact census over sample directions, plus the averaged metric if `quad` is set.
    Analyze(JobArgs),
    /// Intrinsic cyclic conditions over sample directions.
    Check(JobArgs),
    /// Build a compatible germ from a base norm and `rho_star`, then solve it.
    Synth(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Job file (TOML, or JSON with a `.json` extension).
    config: PathBuf,
    #[arg(long)]
    samples: Option<usize>,
    /// Residual tolerance separating UNIQUE from INSOLVABLE.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    contact_tol: Option<f64>,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eps_fraction: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads; all cores when absent.
    #[arg(long, env = "FINSLER_CEQ_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Cmd::Solve(a) => (Command::Solve, a),
        Cmd::Analyze(a) => (Command::Analyze, a),
        Cmd::Check(a) => (Command::Check, a),
        Cmd::Synth(a) => (Command::Synth, a),
    };
    match execute(command, args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<RunError>().map_or(exit::RUNTIME, RunError::exit_code);
            ExitCode::from(code)
        }
    }
}

fn execute(command: Command, args: JobArgs) -> anyhow::Result<u8> {
    let mut cfg = JobConfig::load(&args.config).map_err(RunError::from)?;
    cfg.apply(&Overrides {
        samples: args.samples,
        residual_tol: args.tol,
        contact_tol: args.contact_tol,
        rank_tol: args.rank_tol,
        seed: args.seed,
        eps_fraction: args.eps_fraction,
        out: args.out,
    });
    let report = run_with_threads(command, cfg, args.threads)?;
    let json = report.to_json();
    match &report.config.output_path {
        Some(path) => std::fs::write(path, json + "\n")
            .map_err(|e| anyhow::anyhow!("cannot write report to {path}: {e}"))?,
        None => println!("{json}"),
    }
    Ok(report.exit_code())
}
