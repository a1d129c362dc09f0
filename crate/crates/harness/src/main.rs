use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gridroute::constellation::verify_model_assumptions;
use gridroute_harness::{bench, frr, multigs, output, validation, ExperimentConfig, FailureMode, Result, Scenario};

#[derive(Parser)]
#[command(name = "gridroute", version, about = "Routing experiments on +Grid LEO constellations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(0..=3))]
    failures: Option<u32>,
    #[arg(long, global = true, value_enum)]
    mode: Option<FailureMode>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Fast-reroute comparison (CSV).
    Frr,
    /// Validation accuracy (CSV).
    Validate,
    /// Multi-station attack campaign (CSV).
    Multigs,
    /// Model assumption checks (JSON).
    Assumptions,
    /// Validation timing (JSON).
    Bench,
}

impl Command {
    fn scenario(self) -> Scenario {
        match self {
            Command::Frr => Scenario::Frr,
            Command::Validate => Scenario::Validation,
            Command::Multigs => Scenario::MultiGs,
            Command::Assumptions => Scenario::Assumptions,
            Command::Bench => Scenario::Bench,
        }
    }
}

fn experiment(cli: &Cli) -> Result<ExperimentConfig> {
    let mut exp = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    exp.scenario = cli.command.scenario();
    if let Some(s) = cli.seed {
        exp.rng_seed = s;
    }
    if let Some(t) = cli.trials {
        exp.trials = t;
    }
    if let Some(f) = cli.failures {
        exp.failure_count = f;
    }
    if let Some(m) = cli.mode {
        exp.failure_mode = m;
    }
    if let Some(o) = &cli.out {
        exp.output = Some(o.clone());
    }
    exp.validate()?;
    Ok(exp)
}

fn run(cli: &Cli) -> Result<()> {
    let exp = experiment(cli)?;
    let mut out: Box<dyn Write> = match &exp.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match exp.scenario {
        Scenario::Frr => output::write_frr(&mut out, &frr::run_frr(&exp)?)?,
        Scenario::Validation => {
            let records = validation::run_validation(&exp)?;
            output::write_validation(&mut out, &records, &exp.stretch_thresholds_pct)?;
        }
        Scenario::MultiGs => output::write_multigs(&mut out, &multigs::run_multigs(&exp)?)?,
        Scenario::Assumptions => {
            let cfg = exp.constellation()?;
            let times: Vec<f64> = (0..exp.assumption_samples)
                .map(|i| cfg.period_s() * i as f64 / exp.assumption_samples.max(1) as f64)
                .collect();
            let report = verify_model_assumptions(&cfg, &times, exp.assumption_pairs);
            serde_json::to_writer_pretty(&mut out, &report)?;
            writeln!(out)?;
        }
        Scenario::Bench => {
            serde_json::to_writer_pretty(&mut out, &bench::run_bench(&exp)?)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
