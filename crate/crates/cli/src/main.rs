use std::path::PathBuf;
use std::process::ExitCode;

use bellkit_cli::commands::{self, OptimizeArgs, ToleranceMode};
use bellkit_cli::{CliError, ExitStatus};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "bellkit",
    version,
    about = "Local bounds, quantum values and noise tolerances of Bell expressions"
)]
struct Cli {
    /// Print numbers at full precision instead of six significant digits.
    #[arg(long, global = true)]
    full_precision: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Inequality,
    EqualityPinned,
    EqualityStrict,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Local bounds of an expression.
    Bounds {
        expression: PathBuf,
        /// Also print every gamma coefficient.
        #[arg(long)]
        gamma: bool,
    },
    /// Quantum value, and noisy value with --noise.
    Eval {
        expression: PathBuf,
        settings: PathBuf,
        #[arg(long)]
        noise: Option<f64>,
    },
    /// White-noise tolerance.
    Tolerance {
        expression: PathBuf,
        settings: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        complement: Option<PathBuf>,
    },
    /// Independent-probability counts for a scenario given as "l1,l2,r1,r2".
    Rank {
        scenario: String,
        /// Write the report as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Search settings for the largest objective.
    Optimize {
        expression: PathBuf,
        config: PathBuf,
        #[arg(long)]
        complement: Option<PathBuf>,
        /// Refine from these settings instead of random restarts.
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        parallel: bool,
        /// Where to write the best settings.
        #[arg(long, default_value = "best_settings.json")]
        output: PathBuf,
        /// Where to write the full result document.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run the reproduction suite on the bundled fixtures.
    Verify {
        /// Load fixtures from this directory instead.
        #[arg(long)]
        fixtures: Option<PathBuf>,
        #[arg(long, default_value = "verification_report.json")]
        output: PathBuf,
    },
}

fn run(cli: Cli) -> Result<ExitStatus, CliError> {
    let full = cli.full_precision;
    let mut out = std::io::stdout().lock();
    match cli.command {
        Command::Bounds { expression, gamma } => {
            commands::bounds(&expression, gamma, full, &mut out)?
        }
        Command::Eval {
            expression,
            settings,
            noise,
        } => commands::eval(&expression, &settings, noise, full, &mut out)?,
        Command::Tolerance {
            expression,
            settings,
            mode,
            complement,
        } => {
            let mode = match mode {
                Mode::Inequality => ToleranceMode::Inequality,
                Mode::EqualityPinned => ToleranceMode::EqualityPinned,
                Mode::EqualityStrict => ToleranceMode::EqualityStrict,
            };
            commands::tolerance(
                &expression,
                &settings,
                mode,
                complement.as_deref(),
                full,
                &mut out,
            )?
        }
        Command::Rank { scenario, output } => {
            commands::rank(&scenario, output.as_deref(), &mut out)?
        }
        Command::Optimize {
            expression,
            config,
            complement,
            start,
            seed,
            restarts,
            parallel,
            output,
            report,
        } => commands::optimize(
            OptimizeArgs {
                expression: &expression,
                config: &config,
                complement: complement.as_deref(),
                start: start.as_deref(),
                seed,
                restarts,
                parallel,
                output,
                report: report.as_deref(),
                full,
            },
            &mut out,
        )?,
        Command::Verify { fixtures, output } => {
            if !commands::verify(fixtures.as_deref(), &output, full, &mut out)? {
                return Ok(ExitStatus::NoViolation);
            }
        }
    }
    Ok(ExitStatus::Success)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitStatus::InputError.into()
            } else {
                ExitStatus::Success.into()
            };
        }
    };
    match run(cli) {
        Ok(status) => status.into(),
        Err(e) => {
            eprintln!("bellkit: {e}");
            e.status().into()
        }
    }
}
