//! Monte Carlo harness: bias / std / RMSE sweeps over sample sizes, log-log
//! rate fits, and the distributional validation suites.
//!
//! Every trial draws from its own child stream keyed by `(seed, n, trial)`,
//! so results are identical for any worker count and extending `n_grid` or
//! `trials` never changes existing draws.

use crate::densities::{default_check_grids, DensitySpec};
use crate::error::{Error, Result};
use crate::estimator::{kl_entropy, knn_ball_mass};
use crate::geometry::SampleSet;
use crate::rng::RandomStream;
use crate::special::{beta_cdf, digamma_int, BetaParams};
use crate::stats::{ks_statistic, mean_and_variance, ols};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::PathBuf;

/// Declarative description of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub density: DensitySpec,
    pub k: usize,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<OutputPaths>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(density: DensitySpec, k: usize, n_grid: Vec<usize>, trials: usize, seed: u64) -> Self {
        Self { density, k, n_grid, trials, seed, outputs: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.n_grid.is_empty() {
            return Err(Error::InvalidConfig("n_grid must not be empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig("n_grid must be strictly ascending".into()));
        }
        if self.n_grid[0] <= self.k {
            return Err(Error::InvalidConfig(format!(
                "every n must exceed k = {}, got n = {}",
                self.k, self.n_grid[0]
            )));
        }
        if self.trials < 2 {
            return Err(Error::InvalidConfig("trials must be at least 2".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Anything that maps a sample set to an entropy estimate.
pub trait EntropyEstimator: Sync {
    fn estimate(&self, s: &SampleSet) -> Result<f64>;
}

/// The KL estimator at a fixed neighbour order.
#[derive(Debug, Clone, Copy)]
pub struct KlEstimator {
    pub k: usize,
}

impl EntropyEstimator for KlEstimator {
    fn estimate(&self, s: &SampleSet) -> Result<f64> {
        Ok(kl_entropy(s, self.k)?.value)
    }
}

/// Aggregate statistics at one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub mean_estimate: f64,
    pub true_h: f64,
    pub bias: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub std: f64,
    /// `sqrt(bias² + std² (trials − 1) / trials)`.
    pub rmse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub family: String,
    pub d: usize,
    pub s: f64,
    pub k: usize,
    pub trials: usize,
    pub rows: Vec<ResultRow>,
    /// Log-log slope of RMSE against n; absent with fewer than three sizes
    /// or a zero RMSE.
    pub fitted_slope: Option<f64>,
    pub fitted_intercept: Option<f64>,
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Raw estimates, one vector of `trials` values per entry of `n_grid`.
pub fn collect_estimates(cfg: &ExperimentConfig, estimator: &dyn EntropyEstimator) -> Result<Vec<Vec<f64>>> {
    cfg.validate()?;
    let root = RandomStream::new(cfg.seed);
    let mut out = Vec::with_capacity(cfg.n_grid.len());
    for &n in &cfg.n_grid {
        let results: Vec<Result<f64>> = (0..cfg.trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = root.child(&[n as u64, trial as u64]);
                let s = cfg.density.sample(n, &mut rng)?;
                estimator.estimate(&s)
            })
            .collect();
        let mut values = Vec::with_capacity(cfg.trials);
        for (trial, r) in results.into_iter().enumerate() {
            values.push(r.map_err(|e| Error::Trial { n, trial, source: Box::new(e) })?);
        }
        out.push(values);
    }
    Ok(out)
}

fn aggregate(n: usize, estimates: &[f64], true_h: f64) -> ResultRow {
    let trials = estimates.len() as f64;
    let (mean, var) = mean_and_variance(estimates);
    let bias = mean - true_h;
    let std = var.sqrt();
    let rmse = (bias * bias + var * (trials - 1.0) / trials).sqrt();
    ResultRow { n, mean_estimate: mean, true_h, bias, std, rmse }
}

/// Runs the KL estimator over the whole grid on the global thread pool.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_with(cfg, &KlEstimator { k: cfg.k }, None)
}

/// Runs `estimator` over the grid, optionally on a dedicated pool of `workers` threads.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    estimator: &dyn EntropyEstimator,
    workers: Option<usize>,
) -> Result<ExperimentResult> {
    let estimates = in_pool(workers, || collect_estimates(cfg, estimator))??;
    let true_h = cfg.density.true_entropy();
    let rows: Vec<ResultRow> = cfg
        .n_grid
        .iter()
        .zip(&estimates)
        .map(|(&n, e)| aggregate(n, e, true_h))
        .collect();
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, r.rmse)).collect();
    let fit = fit_rate(&pairs).ok();
    Ok(ExperimentResult {
        family: cfg.density.family_name().to_string(),
        d: cfg.density.dim(),
        s: cfg.density.smoothness(),
        k: cfg.k,
        trials: cfg.trials,
        rows,
        fitted_slope: fit.map(|f| f.0),
        fitted_intercept: fit.map(|f| f.1),
    })
}

/// OLS fit of `ln(error)` on `ln(n)`; returns `(slope, intercept)`.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pairs.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: pairs.len() });
    }
    if let Some((n, e)) = pairs.iter().find(|(n, e)| !(*e > 0.0 && e.is_finite() && *n > 0.0)) {
        return Err(Error::Domain(format!("rate fit needs positive n and error, got ({n}, {e})")));
    }
    let mut ns: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    if ns.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Domain("rate fit needs distinct sample sizes".into()));
    }
    let x: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    Ok(ols(&x, &y))
}

/// Exact header of `results.csv`.
pub const RESULTS_HEADER: &str = "family,d,s,k,n,trials,mean_est,true_h,bias,std,rmse";

/// Renders an experiment result as `results.csv` text: one row per `n`, then
/// the fitted slope and intercept as `#` comment lines.
pub fn results_csv(result: &ExperimentResult) -> String {
    let mut out = String::new();
    out.push_str(RESULTS_HEADER);
    out.push('\n');
    for r in &result.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            result.family, result.d, result.s, result.k, r.n, result.trials, r.mean_estimate, r.true_h, r.bias, r.std, r.rmse
        )
        .expect("writing to a String");
    }
    let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| v.to_string());
    writeln!(out, "# fitted_slope={}", fmt(result.fitted_slope)).expect("writing to a String");
    writeln!(out, "# fitted_intercept={}", fmt(result.fitted_intercept)).expect("writing to a String");
    out
}

/// `reps` independent draws of `μ(B(X, R_k(X)))` with `X` independent of the
/// `n` sample points.
pub fn ball_mass_draws(density: &DensitySpec, n: usize, k: usize, reps: usize, seed: u64) -> Result<Vec<f64>> {
    if density.dim() > 2 {
        return Err(Error::Unsupported(format!("ball-mass validation in d = {}", density.dim())));
    }
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    BetaParams::knn_ball_mass(k, n)?;
    let root = RandomStream::new(seed);
    let draws: Vec<Result<f64>> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = root.child(&[n as u64, rep as u64]);
            let s = density.sample(n, &mut rng)?;
            let extra = density.sample_point(&mut rng);
            knn_ball_mass(&s, &extra, k, density)
        })
        .collect();
    draws.into_iter().collect()
}

/// KS distance between ball-mass draws and the Beta(k, n + 1 − k) law.
pub fn validate_beta_law(density: &DensitySpec, n: usize, k: usize, reps: usize, seed: u64) -> Result<f64> {
    let mut draws = ball_mass_draws(density, n, k, reps, seed)?;
    let law = BetaParams::knn_ball_mass(k, n)?;
    Ok(ks_statistic(&mut draws, |x| beta_cdf(law, x)))
}

/// Monte Carlo check of `E ln((n+1) μ(B)) = ψ(k) − ψ(n+1) + ln(n+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasIdentityReport {
    pub mean: f64,
    pub expected: f64,
    pub std_error: f64,
}

impl BiasIdentityReport {
    /// Deviation in standard errors.
    pub fn z_score(&self) -> f64 {
        (self.mean - self.expected) / self.std_error
    }
}

pub fn validate_bias_identity(density: &DensitySpec, n: usize, k: usize, reps: usize, seed: u64) -> Result<BiasIdentityReport> {
    if reps < 2 {
        return Err(Error::InvalidConfig("need at least 2 replications".into()));
    }
    let draws = ball_mass_draws(density, n, k, reps, seed)?;
    let scale = (n + 1) as f64;
    let logs: Vec<f64> = draws.iter().map(|m| (scale * m).ln()).collect();
    let (mean, var) = mean_and_variance(&logs);
    Ok(BiasIdentityReport {
        mean,
        expected: digamma_int(k) - digamma_int(n + 1) + scale.ln(),
        std_error: (var / reps as f64).sqrt(),
    })
}

/// `(n, n · Var(ĥ))` for each grid size, from the sample variance over trials.
pub fn validate_variance_scaling(cfg: &ExperimentConfig) -> Result<Vec<(usize, f64)>> {
    validate_variance_scaling_with(cfg, &KlEstimator { k: cfg.k })
}

pub fn validate_variance_scaling_with(cfg: &ExperimentConfig, estimator: &dyn EntropyEstimator) -> Result<Vec<(usize, f64)>> {
    if cfg.n_grid.len() < 3 {
        return Err(Error::InvalidConfig("variance scaling needs at least 3 sample sizes".into()));
    }
    let (lo, hi) = (cfg.n_grid[0], cfg.n_grid[cfg.n_grid.len() - 1]);
    if hi < 8 * lo {
        return Err(Error::InvalidConfig("variance scaling needs n_grid to span a factor of at least 8".into()));
    }
    let estimates = collect_estimates(cfg, estimator)?;
    Ok(cfg
        .n_grid
        .iter()
        .zip(&estimates)
        .map(|(&n, e)| (n, n as f64 * mean_and_variance(e).1))
        .collect())
}

/// `max / min` of the scaled variances; `NaN` when they are all zero.
pub fn variance_spread(scaled: &[(usize, f64)]) -> f64 {
    let max = scaled.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let min = scaled.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    max / min
}

/// Pass thresholds used by [`run_validation`].
pub const BETA_KS_MAX: f64 = 0.05;
pub const BIAS_Z_MAX: f64 = 3.0;
pub const VARIANCE_SPREAD_MAX: f64 = 3.0;
pub const ENVELOPE_RATIO_MAX: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Beta,
    Bias,
    Variance,
    Holder,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beta" => Ok(Suite::Beta),
            "bias" => Ok(Suite::Bias),
            "variance" => Ok(Suite::Variance),
            "holder" => Ok(Suite::Holder),
            other => Err(Error::InvalidConfig(format!("unknown suite {other:?}"))),
        }
    }
}

/// Configuration file for `validate`. Fields a suite does not use are ignored.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidationConfig {
    pub density: DensitySpec,
    #[serde(default = "one")]
    pub k: usize,
    #[serde(default)]
    pub seed: u64,
    /// Sample size for the beta and bias suites.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub reps: Option<usize>,
    /// Sample sizes and trials for the variance suite.
    #[serde(default)]
    pub n_grid: Option<Vec<usize>>,
    #[serde(default)]
    pub trials: Option<usize>,
    /// Grids for the holder suite; defaults to 50 centres × 20 radii.
    #[serde(default)]
    pub t_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub x_grid: Option<Vec<Vec<f64>>>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub passed: bool,
    pub lines: Vec<String>,
}

fn required<T: Copy>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidConfig(format!("missing field {name:?}")))
}

/// Runs one validation suite and reports pass/fail against the fixed thresholds.
pub fn run_validation(suite: Suite, cfg: &ValidationConfig) -> Result<SuiteReport> {
    let mut lines = Vec::new();
    let passed = match suite {
        Suite::Beta => {
            let (n, reps) = (required(cfg.n, "n")?, required(cfg.reps, "reps")?);
            let ks = validate_beta_law(&cfg.density, n, cfg.k, reps, cfg.seed)?;
            lines.push(format!("beta: n={n} k={} reps={reps} ks={ks} (threshold {BETA_KS_MAX})", cfg.k));
            ks < BETA_KS_MAX
        }
        Suite::Bias => {
            let (n, reps) = (required(cfg.n, "n")?, required(cfg.reps, "reps")?);
            let r = validate_bias_identity(&cfg.density, n, cfg.k, reps, cfg.seed)?;
            lines.push(format!(
                "bias: n={n} k={} reps={reps} mean={} expected={} se={} z={}",
                cfg.k,
                r.mean,
                r.expected,
                r.std_error,
                r.z_score()
            ));
            r.z_score().abs() <= BIAS_Z_MAX
        }
        Suite::Variance => {
            let n_grid = cfg.n_grid.clone().ok_or_else(|| Error::InvalidConfig("missing field \"n_grid\"".into()))?;
            let exp = ExperimentConfig::new(cfg.density.clone(), cfg.k, n_grid, required(cfg.trials, "trials")?, cfg.seed);
            let scaled = validate_variance_scaling(&exp)?;
            for (n, v) in &scaled {
                lines.push(format!("variance: n={n} n*var={v}"));
            }
            let spread = variance_spread(&scaled);
            lines.push(format!("variance: max/min={spread} (threshold {VARIANCE_SPREAD_MAX})"));
            spread <= VARIANCE_SPREAD_MAX
        }
        Suite::Holder => {
            let (t_default, x_default) = default_check_grids(&cfg.density);
            let t_grid = cfg.t_grid.clone().unwrap_or(t_default);
            let x_grid = cfg.x_grid.clone().unwrap_or(x_default);
            let smooth = cfg.density.check_holder_bound(&t_grid, &x_grid)?;
            let sup = cfg.density.check_density_sup_bound(&t_grid, &x_grid)?;
            lines.push(format!("holder: smoothing-error ratio={smooth} (threshold {ENVELOPE_RATIO_MAX})"));
            lines.push(format!("holder: sup-bound ratio={sup} (threshold {ENVELOPE_RATIO_MAX})"));
            smooth <= ENVELOPE_RATIO_MAX && sup <= ENVELOPE_RATIO_MAX
        }
    };
    Ok(SuiteReport { passed, lines })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant;
    impl EntropyEstimator for Constant {
        fn estimate(&self, _: &SampleSet) -> Result<f64> {
            Ok(0.25)
        }
    }

    fn uniform1() -> DensitySpec {
        DensitySpec::uniform(1).unwrap()
    }

    #[test]
    fn config_validation() {
        let ok = ExperimentConfig::new(uniform1(), 1, vec![10, 20], 2, 0);
        assert!(ok.validate().is_ok());
        for bad in [
            ExperimentConfig::new(uniform1(), 1, vec![20, 10], 2, 0),
            ExperimentConfig::new(uniform1(), 1, vec![10, 10], 2, 0),
            ExperimentConfig::new(uniform1(), 3, vec![3, 10], 2, 0),
            ExperimentConfig::new(uniform1(), 1, vec![10], 1, 0),
            ExperimentConfig::new(uniform1(), 0, vec![10], 2, 0),
            ExperimentConfig::new(uniform1(), 1, vec![], 2, 0),
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))), "{bad:?}");
            assert!(run_experiment(&bad).is_err());
        }
    }

    #[test]
    fn config_json() {
        let text = r#"{
            "density": {"family": "trig_product", "d": 1, "params": {"amplitude": [1.0]}},
            "k": 2, "n_grid": [100, 200, 400], "trials": 5, "seed": 9,
            "outputs": {"results": "out.csv"}
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.outputs.unwrap().results.unwrap(), PathBuf::from("out.csv"));
        assert!(ExperimentConfig::from_json(r#"{"density":{"family":"uniform","d":1},"k":1,"n_grid":[5],"trials":1,"seed":0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"density":{"family":"uniform","d":1},"k":1,"n_grid":[5],"trials":3,"seed":0,"extra":1}"#).is_err());
    }

    #[test]
    fn two_trials_give_finite_rows() {
        let cfg = ExperimentConfig::new(DensitySpec::triangle_product(2).unwrap(), 1, vec![50, 100], 2, 3);
        let r = run_experiment(&cfg).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.rows.iter().all(|row| row.std.is_finite() && row.rmse.is_finite()));
        assert_eq!(r.fitted_slope, None);
        assert_eq!(r.rows[0].n, 50);
    }

    #[test]
    fn deterministic_and_independent_of_workers() {
        let cfg = ExperimentConfig::new(DensitySpec::trig(1.0, 1, 0.0).unwrap(), 1, vec![64, 128, 256], 12, 42);
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        let c = run_experiment_with(&cfg, &KlEstimator { k: 1 }, Some(1)).unwrap();
        let d = run_experiment_with(&cfg, &KlEstimator { k: 1 }, Some(3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(results_csv(&a), results_csv(&d));
    }

    #[test]
    fn extending_trials_keeps_existing_draws() {
        let small = ExperimentConfig::new(uniform1(), 1, vec![40], 5, 8);
        let large = ExperimentConfig::new(uniform1(), 1, vec![40, 80], 9, 8);
        let a = collect_estimates(&small, &KlEstimator { k: 1 }).unwrap();
        let b = collect_estimates(&large, &KlEstimator { k: 1 }).unwrap();
        assert_eq!(a[0][..], b[0][..5]);
    }

    #[test]
    fn rmse_decomposition() {
        let cfg = ExperimentConfig::new(DensitySpec::triangle_product(1).unwrap(), 2, vec![100, 300], 30, 5);
        let est = collect_estimates(&cfg, &KlEstimator { k: 2 }).unwrap();
        let r = run_experiment(&cfg).unwrap();
        for (row, e) in r.rows.iter().zip(&est) {
            let mse = e.iter().map(|v| (v - row.true_h).powi(2)).sum::<f64>() / e.len() as f64;
            assert!((row.rmse * row.rmse - mse).abs() < 1e-12);
            let pop_var = row.std * row.std * (e.len() as f64 - 1.0) / e.len() as f64;
            assert!((row.rmse * row.rmse - (row.bias * row.bias + pop_var)).abs() < 1e-12);
            assert!(row.rmse >= row.bias.abs());
        }
    }

    #[test]
    fn trial_errors_carry_context() {
        struct Failing;
        impl EntropyEstimator for Failing {
            fn estimate(&self, s: &SampleSet) -> Result<f64> {
                if s.point(0)[0] < 2.0 {
                    Err(Error::DuplicatePoints { index: 0 })
                } else {
                    Ok(0.0)
                }
            }
        }
        let cfg = ExperimentConfig::new(uniform1(), 1, vec![10], 4, 0);
        let err = run_experiment_with(&cfg, &Failing, None).unwrap_err();
        assert!(matches!(err, Error::Trial { n: 10, trial: 0, .. }));
        assert!(matches!(err.root(), Error::DuplicatePoints { .. }));
    }

    #[test]
    fn fit_rate_examples() {
        let pairs: Vec<(f64, f64)> = [1e2, 1e3, 1e4].iter().map(|&n: &f64| (n, n.powf(-0.5))).collect();
        let (slope, intercept) = fit_rate(&pairs).unwrap();
        assert!((slope + 0.5).abs() < 1e-12 && intercept.abs() < 1e-12);

        let pairs: Vec<(f64, f64)> = [1e2, 1e3, 1e4, 3e4].iter().map(|&n: &f64| (n, 3.0 * n.powf(-1.0 / 3.0))).collect();
        let (slope, intercept) = fit_rate(&pairs).unwrap();
        assert!((slope + 1.0 / 3.0).abs() < 1e-12);
        assert!((intercept - 3f64.ln()).abs() < 1e-12);

        // log factor flattens the slope; -0.199687... frozen from numpy.polyfit
        let pairs: Vec<(f64, f64)> = (8..=14)
            .map(|p| 2f64.powi(p))
            .map(|n| (n, n.powf(-1.0 / 3.0) * (n + 1.0).ln()))
            .collect();
        let (slope, _) = fit_rate(&pairs).unwrap();
        assert!((slope + 0.199_687_27).abs() < 1e-7, "{slope}");
        assert!(slope > -0.33);

        assert!(matches!(fit_rate(&pairs[..2]), Err(Error::InsufficientData { .. })));
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(Error::Domain(_))));
        assert!(matches!(fit_rate(&[(1.0, 1.0), (1.0, 0.5), (3.0, 1.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn csv_layout() {
        let cfg = ExperimentConfig::new(uniform1(), 1, vec![20, 40, 80], 3, 1);
        let text = results_csv(&run_experiment(&cfg).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], RESULTS_HEADER);
        assert_eq!(lines.len(), 6);
        assert!(lines[1].starts_with("uniform,1,2,1,20,3,"));
        assert_eq!(lines[1].split(',').count(), 11);
        assert!(lines[4].starts_with("# fitted_slope="));
        assert!(lines[5].starts_with("# fitted_intercept="));
        let short = ExperimentConfig::new(uniform1(), 1, vec![20], 3, 1);
        assert!(results_csv(&run_experiment(&short).unwrap()).contains("# fitted_slope=NA"));
    }

    #[test]
    fn beta_law_small_cases() {
        let ks = validate_beta_law(&uniform1(), 50, 1, 1, 3).unwrap();
        assert!(ks > 0.0 && ks <= 1.0);
        assert!(validate_beta_law(&DensitySpec::uniform(3).unwrap(), 50, 1, 10, 3).is_err());
        assert!(validate_beta_law(&uniform1(), 5, 6, 10, 3).is_err());
        let ks = validate_beta_law(&uniform1(), 200, 1, 500, 11).unwrap();
        assert!(ks < 0.05 * 1.5, "{ks}");
    }

    #[test]
    fn constant_estimator_has_zero_variance() {
        let cfg = ExperimentConfig::new(uniform1(), 1, vec![10, 40, 80], 4, 0);
        let scaled = validate_variance_scaling_with(&cfg, &Constant).unwrap();
        assert!(scaled.iter().all(|&(_, v)| v == 0.0));
        assert!(variance_spread(&scaled).is_nan());
        let narrow = ExperimentConfig::new(uniform1(), 1, vec![10, 20, 40], 4, 0);
        assert!(validate_variance_scaling(&narrow).is_err());
        let r = run_experiment_with(&cfg, &Constant, None).unwrap();
        assert!(r.fitted_slope.unwrap().abs() < 1e-12);
        assert!(r.rows.iter().all(|row| row.std == 0.0));
    }

    #[test]
    fn validation_suites_run() {
        let cfg: ValidationConfig = serde_json::from_str(
            r#"{"density": {"family": "uniform", "d": 1}, "n": 100, "reps": 200, "seed": 1,
                "n_grid": [50, 100, 400], "trials": 20}"#,
        )
        .unwrap();
        for suite in ["beta", "bias", "variance", "holder"] {
            let report = run_validation(suite.parse().unwrap(), &cfg).unwrap();
            assert!(!report.lines.is_empty());
        }
        assert!("nope".parse::<Suite>().is_err());
        let missing: ValidationConfig = serde_json::from_str(r#"{"density": {"family": "uniform", "d": 1}}"#).unwrap();
        assert!(run_validation(Suite::Beta, &missing).is_err());
        assert!(run_validation(Suite::Holder, &missing).unwrap().passed);
    }
}
