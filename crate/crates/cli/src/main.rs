use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use poisson_core::dynamics::Precision;
use ppa::app::{self, CheckArgs, CliError, IntegrateArgs};

#[derive(Parser)]
#[command(name = "ppa", version, about = "Verify polynomial Poisson and Nambu models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrecisionArg {
    Double,
    DoubleDouble,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks requested by a model file.
    Check {
        file: PathBuf,
        /// Write the JSON report here (`-` for standard output).
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Run every check on one thread.
        #[arg(long)]
        sequential: bool,
        /// Record wall-clock milliseconds per check (reports are then not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Integrate the model's flow with fixed-step RK4 and write a CSV trajectory.
    Integrate {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "double-double")]
        precision: PrecisionArg,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long)]
        until: Option<f64>,
        /// Exit with status 1 if any monitored drift exceeds this bound.
        #[arg(long)]
        max_drift: Option<f64>,
    },
    /// Emit a built-in example as a model file; lists entries without a name.
    Catalog {
        name: Option<String>,
        /// Override a parameter, e.g. `--param k=3/2`.
        #[arg(long = "param", value_name = "NAME=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Rewrite a model in new variables given by a monomial map file.
    Transport {
        file: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Check {
            file,
            json,
            seed,
            sequential,
            timings,
        } => app::check(
            &CheckArgs {
                file: &file,
                json: json.as_deref(),
                seed,
                sequential,
                timings,
            },
            &mut out,
        ),
        Command::Integrate {
            file,
            out: csv,
            precision,
            step,
            until,
            max_drift,
        } => app::integrate_cmd(
            &IntegrateArgs {
                file: &file,
                out: &csv,
                precision: match precision {
                    PrecisionArg::Double => Precision::Double,
                    PrecisionArg::DoubleDouble => Precision::DoubleDouble,
                },
                step,
                until,
                max_drift,
            },
            &mut out,
        ),
        Command::Catalog { name, params, emit } => {
            let Some(name) = name else {
                print!("{}", app::catalog_listing());
                return Ok(app::EXIT_PASS);
            };
            let params = params
                .iter()
                .map(|p| app::parse_param(p))
                .collect::<Result<Vec<_>, _>>()?;
            app::catalog_cmd(&name, &params, emit.as_deref(), &mut out)
        }
        Command::Transport { file, map, emit } => {
            app::transport_cmd(&file, &map, emit.as_deref(), &mut out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
