use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use polar_morse::oracle::parse_t;
use polar_morse::par::ExecMode;
use polar_morse::pipeline::{analyze, PipelineError, RunConfig};

#[derive(Parser)]
#[command(name = "polar-morse", version, about = "Morse numbers of plane polynomials via polar curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the attractors of f - t·ℓ and count trajectories per attractor.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct AnalyzeArgs {
    /// Polynomial in x and y, e.g. "x + x^2*y".
    #[arg(long)]
    f: String,
    /// Linear form a*x + b*y; drawn from --seed when absent.
    #[arg(long)]
    ell: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Cross-check the indices numerically.
    #[arg(long)]
    verify: bool,
    /// Comma-separated decreasing values of t, e.g. "1e-2,1e-3,1e-4".
    #[arg(long)]
    t_schedule: Option<String>,
    /// Working precision in bits.
    #[arg(long, default_value_t = 256)]
    precision: u32,
    #[arg(long, default_value_t = 16)]
    max_redraws: u32,
    /// Run on one thread.
    #[arg(long)]
    sequential: bool,
}

fn config(args: &AnalyzeArgs) -> Result<RunConfig> {
    let t_schedule = args
        .t_schedule
        .as_deref()
        .map(|s| s.split(',').map(parse_t).collect::<Result<Vec<_>, _>>())
        .transpose()
        .context("bad --t-schedule")?;
    Ok(RunConfig {
        f_text: args.f.clone(),
        ell_text: args.ell.clone(),
        seed: args.seed,
        verify: args.verify,
        t_schedule,
        precision: args.precision.max(64),
        max_redraws: args.max_redraws,
        mode: if args.sequential { ExecMode::Sequential } else { ExecMode::Parallel },
    })
}

fn run(args: &AnalyzeArgs) -> ExitCode {
    let cfg = match config(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    match analyze(&cfg) {
        Ok(report) => {
            match args.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{report}"),
            }
            if report.mismatched() {
                ExitCode::from(4)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let PipelineError::Genericity { report, .. } = &e {
                eprintln!(
                    "  squarefree polar: {}, avoids infinity points: {}, compositions: {}",
                    report.polar_squarefree, report.ell_avoids_infinity_points, report.no_degenerate_compositions
                );
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Command::Analyze(args) => run(args),
    }
}
