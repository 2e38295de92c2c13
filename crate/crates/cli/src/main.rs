use std::path::PathBuf;
use std::process::ExitCode;

use cdos_cli::check::run_checks;
use cdos_cli::runner::workers_from_env;
use cdos_cli::{run, Format, RunError, RunRequest};
use clap::{Parser, Subcommand};

/// Coherent decay rates of extended sources in structured photonic environments.
#[derive(Parser)]
#[command(name = "cdos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario config and write CSV/JSON results.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        verbose: bool,
    },
    /// Run the built-in invariant suite.
    Check {
        #[arg(long)]
        verbose: bool,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn run_command(
    config: PathBuf,
    out: Option<PathBuf>,
    format: Option<Format>,
    verbose: bool,
) -> Result<(), RunError> {
    let workers = workers_from_env()?;
    let report = run(&RunRequest {
        config,
        out,
        format,
        workers,
    })?;
    if verbose {
        eprintln!("workers: {workers}");
        for path in &report.written {
            eprintln!("wrote {}", path.display());
        }
    }
    let s = &report.summary;
    let axis = match report.output {
        cdos_cli::SweepOutput::Spectrum { .. } => "k",
        cdos_cli::SweepOutput::Length { .. } => "d_nm",
    };
    println!(
        "{}: gamma_ratio min {:.6e} max {:.6e} at {axis} = {:.6e}",
        s.scenario, s.gamma_ratio_min, s.gamma_ratio_max, s.k_or_d_at_extremum
    );
    Ok(())
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            format,
            verbose,
        } => {
            let shown = config.display().to_string();
            match run_command(config, out, format, verbose) {
                Ok(()) => Ok(ExitCode::SUCCESS),
                Err(e) => {
                    let code = e.exit_code();
                    let err = anyhow::Error::new(e).context(format!("scenario {shown} failed"));
                    eprintln!("error: {err:#}");
                    Ok(ExitCode::from(code))
                }
            }
        }
        Command::Check {
            verbose,
            inject_fault,
        } => {
            let results = run_checks(inject_fault);
            let failed = results.iter().filter(|r| !r.passed()).count();
            for r in &results {
                if verbose || !r.passed() {
                    println!("{r}");
                }
            }
            println!(
                "check: {}/{} invariants passed",
                results.len() - failed,
                results.len()
            );
            let code = if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
            Ok(code)
        }
    }
}
