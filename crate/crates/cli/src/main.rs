use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::error;
use serde::Serialize;

use impedance_cli::commands::{self, Overrides, VerifyTarget};
use impedance_core::BuiltinWavelet;
use impedance_cli::verify::VerifyOptions;
use impedance_cli::{BuiltinProfile, CliError};

#[derive(Parser)]
#[command(name = "impedance", version, about = "Simulate layered-medium reflection data and recover impedance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct ExperimentArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Noise seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Built-in profile: p1, p2, p3 or p4.
    #[arg(long)]
    profile: Option<BuiltinProfile>,
    /// Built-in wavelet: delta, gaussian, dgaussian or d2gaussian.
    #[arg(long)]
    wavelet: Option<BuiltinWavelet>,
    /// Noise level as a fraction of the clean trace peak.
    #[arg(long)]
    noise: Option<f64>,
}

impl ExperimentArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            config: self.config.clone(),
            profile: self.profile,
            wavelet: self.wavelet,
            noise: self.noise,
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write profile, Green's function and data files.
    Simulate(ExperimentArgs),
    /// Recover impedance from previously simulated data.
    Invert(ExperimentArgs),
    /// Compare estimates with the true profile.
    Compare(ExperimentArgs),
    /// Check the forward model against ray enumeration and the sum identity.
    Verify {
        #[command(flatten)]
        experiment: ExperimentArgs,
        /// Number of interfaces of a random stack (used without --config/--profile).
        #[arg(long, default_value_t = 3)]
        layers: usize,
        /// Bounce order for the ray comparison.
        #[arg(long, default_value_t = 12)]
        max_bounces: u32,
        /// Scale the amplitude of this event by 1.001 before comparing.
        #[arg(long)]
        corrupt: Option<usize>,
    },
    /// Run the built-in suite: four profiles, two sources, with and without noise.
    ReproduceFigures {
        #[arg(long, default_value = "figures")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("report serializes"));
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate(args) => print_json(&commands::simulate(&args.overrides().resolve()?)?),
        Command::Invert(args) => print_json(&commands::invert(&args.overrides().resolve()?)?),
        Command::Compare(args) => print_json(&commands::compare(&args.overrides().resolve()?)?),
        Command::Verify {
            experiment,
            layers,
            max_bounces,
            corrupt,
        } => {
            let overrides = experiment.overrides();
            let target = if overrides.config.is_some() || overrides.profile.is_some() {
                VerifyTarget::Config(overrides.resolve()?)
            } else {
                VerifyTarget::Random {
                    layers,
                    seed: overrides.seed.unwrap_or(0),
                }
            };
            let options = VerifyOptions {
                max_bounces,
                corrupt,
                ..Default::default()
            };
            let report = commands::verify(&target, &options)?;
            if let Some(out) = &overrides.out {
                let dir = impedance_cli::output::ensure_dir(out)?;
                impedance_cli::output::write_json(&dir.join("verify.json"), &report)?;
            }
            print_json(&report);
            if !report.passed {
                return Err(CliError::Verification(format!(
                    "oracle passed: {}, sum passed: {}",
                    report.oracle.passed, report.sum.passed
                )));
            }
        }
        Command::ReproduceFigures { out, seed } => print_json(&commands::reproduce_figures(&out, seed)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
