use clap::{Parser, Subcommand};
use cvples::overhead::format_table;
use cvples::{measure_overhead, parse_with_overrides, run, Error, EXIT_CONFIG, EXIT_FAILURE};
use cvples_core::{sigma_eq_quadrature, FilterKind, InterpolantMode, TestFilterSpec};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cvples", version, about = "Compressible LES with the CvP eddy-viscosity sensor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a case from a key=value file; `--key=value` arguments override it.
    Run {
        config: PathBuf,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Equilibrium enstrophy ratio of a test filter.
    SigmaEq {
        #[arg(long)]
        filter: FilterKind,
        /// Include the sixth-order midpoint interpolant.
        #[arg(long)]
        int6: bool,
        /// IMPL6 strength.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
    },
    /// Step-loop wall time of each config relative to a run without model.
    Overhead {
        configs: Vec<PathBuf>,
        /// Steps per run.
        #[arg(long, default_value_t = 20)]
        steps: u64,
    },
}

fn load(path: &Path, overrides: &[String]) -> Result<cvples::RunConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_with_overrides(&text, overrides)
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(if e.is_config_error() { EXIT_CONFIG } else { EXIT_FAILURE } as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, overrides } => {
            let cfg = match load(&config, &overrides) {
                Ok(c) => c,
                Err(e) => return fail(e),
            };
            match run(&cfg) {
                Ok(out) => {
                    if let Some(m) = &out.blow_up {
                        eprintln!("blow-up: {m}");
                    } else {
                        println!("completed {} steps, t = {}", out.steps, out.t);
                    }
                    ExitCode::from(out.exit_code() as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::SigmaEq { filter, int6, alpha } => {
            let spec = match (filter, alpha) {
                (FilterKind::Impl6, Some(a)) => match TestFilterSpec::impl6(a) {
                    Ok(s) => s,
                    Err(e) => return fail(e.into()),
                },
                (_, Some(_)) => {
                    eprintln!("error: --alpha only applies to impl6");
                    return ExitCode::from(EXIT_CONFIG as u8);
                }
                (k, None) => TestFilterSpec::of_kind(k),
            };
            let mode = if int6 { InterpolantMode::Int6 } else { InterpolantMode::Identity };
            println!("{:.5}", sigma_eq_quadrature(&spec, mode));
            ExitCode::SUCCESS
        }
        Command::Overhead { configs, steps } => {
            let mut cfgs = Vec::new();
            for p in &configs {
                match load(p, &[format!("--max_steps={steps}")]) {
                    Ok(c) => cfgs.push(c),
                    Err(e) => return fail(e),
                }
            }
            match measure_overhead(&cfgs) {
                Ok(rows) => {
                    print!("{}", format_table(&rows));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
    }
}
