use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nls2d::imethod::PlannerConstants;
use nls2d_cli::commands::{self, Overrides};
use nls2d_cli::config;
use nls2d_cli::error::CliError;

#[derive(Parser)]
#[command(
    name = "nls2d",
    about = "Pseudospectral 2D cubic NLS simulator with smoothing-operator and interaction-Morawetz diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Experiment configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory (overrides the config's `[output]` directory).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed override for the data synthesis.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for sweeps and sampling (0 = library default).
    #[arg(long, value_name = "K", default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve one trajectory and write its diagnostics.
    Run(CommonArgs),
    /// Cutoff-ladder sweep: almost-conservation increments and commutator decay.
    SweepN(CommonArgs),
    /// Interaction Morawetz and almost-Morawetz inequality reports.
    Morawetz(CommonArgs),
    /// Monte-Carlo multiplier certificates for the four dyadic regions.
    Regions {
        #[command(flatten)]
        common: CommonArgs,
        /// Frequency triples sampled per region.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Closed-form scaling-planner arithmetic (no simulation).
    Plan {
        /// Regularity exponent, must exceed 1/4.
        #[arg(long)]
        s: f64,
        /// Physical time horizon.
        #[arg(long)]
        t0: f64,
        /// Initial mass (L2 norm of the data).
        #[arg(long)]
        m0: f64,
        /// Smallness parameter of the local intervals.
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[arg(long, default_value_t = 1.0)]
        c_prime: f64,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
        /// Realization of the `+` in the paper-style exponents.
        #[arg(long, default_value_t = 0.01)]
        delta_exp: f64,
        /// Optional directory for plan.json.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Run the direct-sum oracle battery; exits nonzero on any violation.
    OracleValidate {
        /// Optional directory for oracle_reports.jsonl.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "K", default_value_t = 0)]
        threads: usize,
    },
}

fn setup_threads(threads: usize) {
    if threads > 0 {
        // ignore failure: the global pool may already exist (e.g. in tests)
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
}

fn load_config(path: &PathBuf) -> Result<config::ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    config::parse(&text)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(common) => {
            setup_threads(common.threads);
            let cfg = load_config(&common.config)?;
            let ov = Overrides {
                out_dir: common.out,
                seed: common.seed,
            };
            let files = commands::cmd_run(&cfg, &ov)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::SweepN(common) => {
            setup_threads(common.threads);
            let cfg = load_config(&common.config)?;
            let ov = Overrides {
                out_dir: common.out,
                seed: common.seed,
            };
            let files = commands::cmd_sweep_n(&cfg, &ov)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Morawetz(common) => {
            setup_threads(common.threads);
            let cfg = load_config(&common.config)?;
            let ov = Overrides {
                out_dir: common.out,
                seed: common.seed,
            };
            let files = commands::cmd_morawetz(&cfg, &ov)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Regions { common, samples } => {
            setup_threads(common.threads);
            let cfg = load_config(&common.config)?;
            let ov = Overrides {
                out_dir: common.out,
                seed: common.seed,
            };
            let files = commands::cmd_regions(&cfg, &ov, samples)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
        Command::Plan {
            s,
            t0,
            m0,
            eps,
            c_prime,
            c0,
            delta_exp,
            out,
        } => {
            let consts = PlannerConstants {
                c_prime,
                c0,
                delta_exp,
            };
            let (plan, _files) = commands::cmd_plan(s, t0, m0, eps, &consts, out.as_deref())?;
            let text = serde_json::to_string_pretty(&plan).map_err(|e| CliError::Io {
                message: format!("json encoding failed: {e}"),
            })?;
            println!("{text}");
            Ok(())
        }
        Command::OracleValidate { out, threads } => {
            setup_threads(threads);
            let (outcome, _files) = commands::cmd_oracle_validate(out.as_deref())?;
            for r in &outcome.reports {
                println!(
                    "{}",
                    serde_json::to_string(r).map_err(|e| CliError::Io {
                        message: format!("json encoding failed: {e}"),
                    })?
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
