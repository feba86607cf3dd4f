//! Command-line front end: coefficient dumps, single-rate evaluation,
//! parameter sweeps, stochastic simulation runs and the validation suite.

mod output;
mod sweep;
mod validate;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use qkramers_core::rate::{kramers_rate, RateFormula};
use qkramers_core::resolvent::Region;
use qkramers_core::sim::estimate_rate;
use qkramers_core::{Config, Error as CoreError, FdrMode};

#[derive(Parser)]
#[command(
    name = "qkramers",
    about = "Quantum Kramers escape rates for a Brownian particle in a metastable cubic potential",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// JSON configuration file {bath, potential, dispersion, sim, sweep}.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Dotted-path overrides, e.g. --set bath.temperature=3.0
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Time-dependent Fokker-Planck coefficients as CSV.
    Coeffs {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// well or barrier
        #[arg(long, default_value = "well")]
        region: String,
        #[arg(long, default_value_t = 0.05)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// quantum or classical fluctuation-dissipation relation
        #[arg(long, default_value = "quantum")]
        fdr: String,
        /// Output CSV path (stdout if omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Single escape-rate evaluation; emits a JSON audit document.
    Rate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// full, simplified or classical
        #[arg(long, default_value = "simplified")]
        formula: String,
        #[arg(long, default_value = "quantum")]
        fdr: String,
    },
    /// Temperature or friction sweep; CSV plus a gnuplot script.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output CSV path (stdout if omitted; the gnuplot script needs a path).
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "simplified")]
        formula: String,
        #[arg(long, default_value = "quantum")]
        fdr: String,
    },
    /// First-passage-time simulation; CSV of outcomes plus a JSON summary.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Output CSV path for (trajectory_index, fpt_or_censored).
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Oracle cross-checks; machine-readable JSON report.
    Validate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Skip the slower sweep and Monte Carlo criteria.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}

/// Exit codes: 0 success, 2 config error, 3 numeric/convergence error,
/// 4 validation failure.
fn classify(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<CoreError>() {
        match core {
            CoreError::Config(_) | CoreError::Domain(_) => 2,
            _ => 3,
        }
    } else {
        2
    }
}

fn parse_region(s: &str) -> anyhow::Result<Region> {
    match s {
        "well" => Ok(Region::Well),
        "barrier" => Ok(Region::Barrier),
        other => Err(anyhow!(CoreError::Config(format!(
            "unknown region '{other}' (well|barrier)"
        )))),
    }
}

fn parse_fdr(s: &str) -> anyhow::Result<FdrMode> {
    match s {
        "quantum" => Ok(FdrMode::Quantum),
        "classical" => Ok(FdrMode::Classical),
        other => Err(anyhow!(CoreError::Config(format!(
            "unknown FDR mode '{other}' (quantum|classical)"
        )))),
    }
}

fn parse_formula(s: &str) -> anyhow::Result<RateFormula> {
    match s {
        "full" => Ok(RateFormula::Full),
        "simplified" => Ok(RateFormula::Simplified),
        "classical" => Ok(RateFormula::Classical),
        other => Err(anyhow!(CoreError::Config(format!(
            "unknown formula '{other}' (full|simplified|classical)"
        )))),
    }
}

/// Loads the JSON config, applies --set overrides, and deserializes.
fn load_config(args: &ConfigArgs) -> anyhow::Result<(Config, serde_json::Value)> {
    let mut value: serde_json::Value = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text)
                .map_err(|e| anyhow!(CoreError::Config(format!("config parse: {e}"))))?
        }
        None => default_config(),
    };
    for set in &args.sets {
        let (key, raw) = set
            .split_once('=')
            .ok_or_else(|| anyhow!(CoreError::Config(format!("--set needs KEY=VALUE: {set}"))))?;
        let parsed: serde_json::Value =
            serde_json::from_str(raw).unwrap_or(serde_json::Value::String(raw.to_string()));
        let mut cursor = &mut value;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            if i == parts.len() - 1 {
                cursor[part] = parsed.clone();
            } else {
                if cursor.get(*part).is_none() {
                    cursor[part] = serde_json::json!({});
                }
                cursor = cursor.get_mut(*part).unwrap();
            }
        }
    }
    let config: Config = serde_json::from_value(value.clone())
        .map_err(|e| anyhow!(CoreError::Config(format!("config: {e}"))))?;
    for warning in config.bath.validate().map_err(anyhow::Error::from)? {
        eprintln!("warning: {warning}");
    }
    Ok((config, value))
}

/// Defaults mirroring the worked example: A = 0.5, E = 10, tau_c = 0.3,
/// Gamma = 1.3, hbar = kB = 1.
fn default_config() -> serde_json::Value {
    serde_json::json!({
        "bath": {"gamma": 1.3, "tau_c": 0.3, "temperature": 10.0},
        "potential": {"a_bar": 0.5, "e_act": 10.0},
        "dispersion": {"minimum_uncertainty": true}
    })
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Coeffs {
            cfg,
            region,
            t_min,
            t_max,
            n,
            fdr,
            output,
        } => {
            let (config, _) = load_config(&cfg)?;
            let region = parse_region(&region)?;
            let mode = parse_fdr(&fdr)?;
            let csv = output::coeffs_csv(&config, region, mode, t_min, t_max, n)?;
            output::write_text(output.as_deref(), &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Rate { cfg, formula, fdr } => {
            let (config, _) = load_config(&cfg)?;
            let formula = parse_formula(&formula)?;
            let mode = parse_fdr(&fdr)?;
            let result = kramers_rate(
                &config.bath,
                &config.potential,
                &config.dispersion,
                mode,
                formula,
            )
            .map_err(anyhow::Error::from)?;
            println!("{}", serde_json::to_string_pretty(&result)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            cfg,
            output,
            formula,
            fdr,
        } => {
            let (config, raw) = load_config(&cfg)?;
            let formula = parse_formula(&formula)?;
            let mode = parse_fdr(&fdr)?;
            let spec = sweep::SweepSpec::from_config(&raw)?;
            let table = sweep::run_sweep(&config, &spec, mode, formula);
            output::write_text(output.as_deref(), &table.to_csv())?;
            if table.all_failed() {
                eprintln!("error: every sweep row failed");
                return Ok(ExitCode::from(3));
            }
            if let Some(path) = &output {
                let script = sweep::gnuplot_script(&spec, path);
                let gp = path.with_extension("gnuplot");
                std::fs::write(&gp, script)?;
                eprintln!("wrote {} and {}", path.display(), gp.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate { cfg, output } => {
            let (config, _) = load_config(&cfg)?;
            let sim_cfg = config.sim.clone().ok_or_else(|| {
                anyhow!(CoreError::Config("config has no \"sim\" section".into()))
            })?;
            let (estimate, outcomes) = estimate_rate(&config.potential, &config.bath, &sim_cfg)
                .map_err(anyhow::Error::from)?;
            let mut csv = String::from("trajectory_index,fpt_or_censored\r\n");
            for o in &outcomes {
                match o.fpt {
                    Some(t) => csv.push_str(&format!("{},{:.12e}\r\n", o.index, t)),
                    None => csv.push_str(&format!("{},censored\r\n", o.index)),
                }
            }
            output::write_text(output.as_deref(), &csv)?;
            println!("{}", serde_json::to_string_pretty(&estimate)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { cfg, quick } => {
            let (config, _) = load_config(&cfg)?;
            let report = validate::run(&config, quick)?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.iter().all(|c| c.pass) {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(4))
            }
        }
    }
}
