use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use klentropy_core::experiments::{run_validation, Suite, ValidationConfig};
use klentropy_core::{
    io, jitter, kl_entropy_with, results_csv, run_experiment_with, DensitySpec, Error, ExperimentConfig, KlEstimator,
    KlOptions, RandomStream,
};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "klentropy", version, about = "k-nearest-neighbour entropy estimation on the unit torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the entropy of a point set read from CSV.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Write the per-point log terms to this CSV file.
        #[arg(long)]
        terms_out: Option<PathBuf>,
        /// Perturb every coordinate uniformly in [-EPS, EPS] before estimating.
        #[arg(long, value_name = "EPS")]
        dedup_jitter: Option<f64>,
        /// Seed for the jitter.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw a sample from a density described in JSON.
    Sample {
        #[arg(long)]
        density: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a Monte Carlo sweep and write results.csv.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Output path; defaults to `outputs.results` in the config, else stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run a validation suite; exits 1 if it fails its threshold.
    Validate {
        #[arg(long, value_parser = ["beta", "bias", "variance", "holder"])]
        suite: String,
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Serialize)]
struct EstimateOutput {
    entropy: f64,
    n: usize,
    k: usize,
    d: usize,
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Estimate { input, k, terms_out, dedup_jitter, seed } => {
            let mut s = io::read_points(&input).with_context(|| format!("reading {}", input.display()))?;
            if let Some(eps) = dedup_jitter {
                s = jitter(&s, eps, &mut RandomStream::new(seed))?;
            }
            let est = kl_entropy_with(&s, k, KlOptions { retain_terms: terms_out.is_some() })?;
            if let (Some(path), Some(terms)) = (&terms_out, &est.per_point_log_terms) {
                let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
                io::write_terms_to(file, terms)?;
            }
            let out = EstimateOutput { entropy: est.value, n: est.n, k: est.k, d: est.d };
            println!("{}", serde_json::to_string(&out)?);
        }
        Command::Sample { density, n, seed, out } => {
            let spec = DensitySpec::from_json(&read(&density)?)?;
            let s = spec.sample(n, &mut RandomStream::new(seed))?;
            io::write_points(&out, &s).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Experiment { config, out, workers } => {
            let cfg = ExperimentConfig::from_json(&read(&config)?)?;
            if workers == Some(0) {
                return Err(anyhow!("--workers must be at least 1"));
            }
            let result = run_experiment_with(&cfg, &KlEstimator { k: cfg.k }, workers)?;
            let text = results_csv(&result);
            match out.or_else(|| cfg.outputs.and_then(|o| o.results)) {
                Some(path) => std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
        }
        Command::Validate { suite, config } => {
            let suite: Suite = suite.parse()?;
            let cfg: ValidationConfig = serde_json::from_str(&read(&config)?)?;
            let report = run_validation(suite, &cfg)?;
            for line in &report.lines {
                println!("{line}");
            }
            println!("{}", if report.passed { "PASS" } else { "FAIL" });
            if !report.passed {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>().map(Error::root) {
        Some(Error::DuplicatePoints { .. }) => 2,
        Some(Error::InsufficientPoints { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
