//! `zkr`: batch driver for the randomized final-state problem.

mod commands;
mod config;
mod data;
mod experiments;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toml::Value;
use zakharov_core::{Error, Result};

use crate::commands::Kind;
use crate::config::{parse_override, FamilyName};

#[derive(Parser, Debug)]
#[command(name = "zkr", version, about = "Randomized final-state problem for the 3D Zakharov system")]
struct Cli {
    /// TOML run configuration; relative paths inside resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set grid.n=32` (repeatable, applied in order).
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Shorthand for `randomization.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Shorthand for `randomization.family`.
    #[arg(long, value_enum, global = true)]
    family: Option<FamilyName>,
    /// Shorthand for `randomization.variance`.
    #[arg(long, global = true)]
    variance: Option<f64>,
    /// Shorthand for `randomization.bound`.
    #[arg(long, global = true)]
    bound: Option<f64>,
    /// Upper bound on worker threads.
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Randomize a stored field; writes the field and a JSON sidecar.
    Randomize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Forward evolution of the configured data on [T, T_max].
    Evolve {
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomize the final data, solve backward, and write a run directory.
    FinalState {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run diagnostic experiments and write CSV + JSON reports.
    Diagnose {
        /// Experiment id (repeatable); defaults to `experiments.ids`.
        #[arg(long = "experiment")]
        experiments: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Final-state run directory (for `scattering_residual`).
        #[arg(long)]
        run: Option<PathBuf>,
    },
    /// Summarize a run directory into `summary.json`.
    Report {
        #[arg(long)]
        run: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonContraction(_) => 3,
        Error::NumericalAbort { .. } => 4,
        _ => 2,
    }
}

fn kind_of(e: &Error) -> &'static str {
    match e {
        Error::NonContraction(_) => "non_contraction",
        Error::NumericalAbort { .. } => "numerical_abort",
        Error::Io(_) => "io",
        Error::Json(_) | Error::Format(_) => "format",
        Error::UnknownExperiment { .. } => "unknown_experiment",
        _ => "precondition",
    }
}

fn overrides(cli: &Cli) -> Result<Vec<(Vec<String>, Value)>> {
    let mut o = cli.overrides.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>>>()?;
    let key = |k: &str| vec!["randomization".to_string(), k.to_string()];
    if let Some(s) = cli.seed {
        let s = i64::try_from(s).map_err(|_| Error::InvalidParameter(format!("seed {s} exceeds the TOML integer range")))?;
        o.push((key("seed"), Value::Integer(s)));
    }
    if let Some(f) = cli.family {
        let name = match f {
            FamilyName::Gaussian => "gaussian",
            FamilyName::Bounded => "bounded",
        };
        o.push((key("family"), Value::String(name.into())));
    }
    if let Some(v) = cli.variance {
        o.push((key("variance"), Value::Float(v)));
    }
    if let Some(b) = cli.bound {
        o.push((key("bound"), Value::Float(b)));
    }
    Ok(o)
}

fn run(cli: &Cli) -> Result<()> {
    if cli.jobs == 0 {
        return Err(Error::InvalidParameter("--jobs must be at least 1".into()));
    }
    if let Command::Report { run } = &cli.command {
        let s = commands::report(run)?;
        println!("{} {} (exit {})", s.run_id, s.status, s.exit_code);
        if let Some(c) = &s.convergence {
            println!("iterations {} contraction {:.4} residual {:.3e}", c.iterations, c.contraction_ratio, c.residual);
        }
        for (id, pass) in &s.diagnostics {
            println!("{id}: {}", if *pass { "PASS" } else { "FAIL" });
        }
        return Ok(());
    }
    let loaded = config::load(cli.config.as_deref(), &overrides(cli)?)?;
    match &cli.command {
        Command::Randomize { input, kind, out } => {
            let sc = commands::randomize(&loaded, input, *kind, out)?;
            for n in &sc.notes {
                eprintln!("note: {n}");
            }
            println!("{} ({:?}, draw {}): ||f||_2 {:.6e} -> {:.6e}", out.display(), kind, sc.draw, sc.input_l2, sc.output_l2);
        }
        Command::Evolve { out } => {
            let m = commands::evolve(&loaded, out)?;
            println!("mass drift {:.3e}, energy drift {:.3e}", m.norms["mass_drift"], m.norms["energy_drift"]);
        }
        Command::FinalState { out } => {
            let m = commands::final_state(&loaded, out)?;
            println!(
                "{}: {} in {} iterations, contraction ratio {:.4}, residual {:.3e}",
                m.run_id, m.status, m.norms["iterations"], m.norms["contraction_ratio"], m.norms["residual"]
            );
        }
        Command::Diagnose { experiments, out, run } => {
            for (id, pass) in commands::diagnose(&loaded, experiments, out, run.as_deref())? {
                println!("{id}: {}", if pass { "PASS" } else { "FAIL" });
            }
        }
        Command::Report { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            let msg = serde_json::json!({ "error": kind_of(&e), "message": e.to_string(), "exit_code": code });
            eprintln!("{msg}");
            ExitCode::from(code)
        }
    }
}
