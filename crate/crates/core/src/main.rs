use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use inverse_teleport::noise::{NoiseConfig, NoiseTarget};
use inverse_teleport::parallel::{with_jobs, Execution};
use inverse_teleport::protocol::DEFAULT_MAX_ROUNDS;
use inverse_teleport::runner::{
    cmd_invert, cmd_reproduce_paper, cmd_tomography, to_json, RunConfig, UnitarySpec,
};
use inverse_teleport::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;

#[derive(Parser, Debug)]
#[command(name = "inverse-teleport", version, about = "Undo an unknown single-qubit unitary by gate teleportation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run seeded repeat-until-success inversions and report query statistics
    Invert(CommonArgs),
    /// Process tomography of the heralded inverse channel
    Tomography(CommonArgs),
    /// Tomography of the three test unitaries with calibrated noise
    ReproducePaper(CommonArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TargetArg {
    Output,
    Resource,
    None,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// U1|U2|U3, random, haar, `theta,phi1,phi2`, or a JSON matrix file
    #[arg(long, default_value = "U1")]
    unitary: String,
    /// Shots per tomography setting
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    /// Protocol runs (invert)
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Depolarizing strength
    #[arg(long, default_value_t = 0.0)]
    noise_p: f64,
    #[arg(long, value_enum, default_value = "output")]
    noise_target: TargetArg,
    /// Worker threads (default: all cores)
    #[arg(long)]
    jobs: Option<usize>,
    /// Run on the calling thread only
    #[arg(long)]
    sequential: bool,
    /// Output directory for artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    /// Disable noise (reproduce-paper)
    #[arg(long)]
    no_noise: bool,
    /// Debug: always project onto the heralding outcome
    #[arg(long)]
    force_success: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_ROUNDS)]
    max_rounds: usize,
}

impl CommonArgs {
    fn config(&self) -> Result<RunConfig, Error> {
        let target = match self.noise_target {
            TargetArg::Output => NoiseTarget::Output,
            TargetArg::Resource => NoiseTarget::Resource,
            TargetArg::None => NoiseTarget::None,
        };
        let noise = if self.no_noise {
            NoiseConfig::none()
        } else {
            NoiseConfig::new(self.noise_p, target).map_err(|e| Error::Usage {
                field: "noise-p",
                message: e.to_string(),
            })?
        };
        if self.jobs == Some(0) {
            return Err(Error::Usage {
                field: "jobs",
                message: "must be at least 1".into(),
            });
        }
        let cfg = RunConfig {
            unitary: UnitarySpec::parse(&self.unitary)?,
            shots: self.shots,
            noise,
            seed: self.seed,
            trials: self.trials,
            output_dir: self.out.clone(),
            execution: if self.sequential {
                Execution::Sequential
            } else {
                Execution::Parallel
            },
            max_rounds: self.max_rounds,
            force_success: self.force_success,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Invert(args) => {
            let cfg = args.config()?;
            let report = with_jobs(args.jobs, || cmd_invert(&cfg))?;
            let json = to_json(&report)?;
            if let Some(dir) = &cfg.output_dir {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("invert.json"), &json)?;
            }
            print!("{json}");
        }
        Command::Tomography(args) => {
            let cfg = args.config()?;
            let report = with_jobs(args.jobs, || cmd_tomography(&cfg))?;
            print!("{}", to_json(&report)?);
        }
        Command::ReproducePaper(args) => {
            let cfg = args.config()?;
            let summary = with_jobs(args.jobs, || cmd_reproduce_paper(&cfg, !args.no_noise))?;
            print!("{}", summary.table());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::NotConverged { chi, .. } = &e {
                eprintln!("last iterate: {chi:?}");
            }
            ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_NUMERICAL })
        }
    }
}
