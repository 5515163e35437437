use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hurwitz_cli::{cmd_analyze, cmd_check, cmd_example, cmd_sweep, parse_complex, CliError, ExitStatus, Output};
use hurwitz_core::checks::CheckOptions;
use hurwitz_core::C64;

/// Isomonodromic tau-functions and G-functions of Hurwitz spaces in genus
/// zero and one.
///
/// Exit codes: 0 success, 1 failed identity or computation, 2 parse error or
/// unknown name, 3 covering on the boundary (S1/S2), 4 caustic with
/// --strict, 5 sweep left the space. HURWITZ_TRUNC overrides the elliptic
/// series cap.
#[derive(Parser)]
#[command(name = "hurwitz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical data, Hamiltonians, tau routes, G and caustic diagnostics.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
        /// Exit with 4 when the critical values nearly coalesce.
        #[arg(long)]
        strict: bool,
    },
    /// Runs the identity suite, one line per identity.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-5)]
        fd_step: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Moves one parameter along a straight segment and reports the
    /// constancy of the tau route ratio.
    Sweep {
        file: PathBuf,
        /// Dot path of the parameter, e.g. poles.0.b or modulus.
        #[arg(long)]
        param: String,
        /// Target value RE,IM.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        to: C64,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        json: bool,
    },
    /// Writes a built-in covering spec (a2, h0_surf, h12).
    Example {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::new(ExitStatus::Parse, format!("cannot read {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<Output, CliError> {
    match cli.command {
        Command::Analyze { file, json, strict } => cmd_analyze(&read(&file)?, json, strict),
        Command::Check {
            file,
            fd_step,
            tol,
            seed,
        } => {
            let opts = CheckOptions {
                fd_step,
                tol,
                seed,
                ..CheckOptions::default()
            };
            cmd_check(&read(&file)?, &opts)
        }
        Command::Sweep {
            file,
            param,
            to,
            steps,
            json,
        } => cmd_sweep(&read(&file)?, &param, to, steps, json),
        Command::Example { name, out } => {
            let text = cmd_example(&name)?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text)
                        .map_err(|e| CliError::new(ExitStatus::Failure, format!("cannot write {}: {e}", path.display())))?;
                    Ok(Output {
                        stdout: String::new(),
                        status: ExitStatus::Success,
                        message: None,
                    })
                }
                None => Ok(Output {
                    stdout: text,
                    status: ExitStatus::Success,
                    message: None,
                }),
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{}", out.stdout);
            if let Some(m) = out.message {
                eprintln!("{m}");
            }
            ExitCode::from(out.status.code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.status.code())
        }
    }
}
