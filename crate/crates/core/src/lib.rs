//! Fixed-k Kozachenko–Leonenko entropy estimation on the unit torus.
//!
//! The crate provides torus geometry, an exact cell-grid k-nearest-neighbour
//! index, the estimator itself, a family of product densities with known
//! entropies and smoothness, and a deterministic Monte Carlo harness.
//!
//! ```
//! use klentropy_core::{kl_entropy, DensitySpec, RandomStream};
//!
//! let density = DensitySpec::uniform(2).unwrap();
//! let sample = density.sample(2000, &mut RandomStream::new(7)).unwrap();
//! let estimate = kl_entropy(&sample, 1).unwrap();
//! assert!(estimate.value.abs() < 0.1);
//! ```

pub mod densities;
pub mod error;
pub mod estimator;
pub mod experiments;
pub mod geometry;
pub mod io;
pub mod knn;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stats;

pub use densities::{shipped_instances, DensitySpec, Factor, Family, TrigAxis};
pub use error::{Error, Result};
pub use estimator::{jitter, kl_entropy, kl_entropy_with, knn_ball_mass, knn_density_estimate, knn_radii, EntropyEstimate, KlOptions};
pub use experiments::{
    fit_rate, results_csv, run_experiment, run_experiment_with, run_validation, validate_beta_law, validate_bias_identity,
    validate_variance_scaling, EntropyEstimator, ExperimentConfig, ExperimentResult, KlEstimator, ResultRow, Suite,
    SuiteReport, ValidationConfig,
};
pub use geometry::{ball_volume, torus_distance, SampleSet, TorusPoint};
pub use knn::{brute_force_knn, build_index, knn_query, KnnIndex, Neighbor};
pub use rng::RandomStream;
pub use special::{beta_cdf, beta_pdf, beta_sample, digamma, ln_gamma, BetaParams};
