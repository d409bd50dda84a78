//! The fixed-k Kozachenko–Leonenko entropy estimator on the torus and its
//! diagnostic companions.
//!
//! ```text
//! ĥ = ln k − ψ(k) + (1/n) Σ_i ln((n/k) · V_d · R_{i,k}^d)
//! ```
//!
//! where `R_{i,k}` is the leave-one-out k-NN torus distance of sample `i`.

use crate::densities::DensitySpec;
use crate::error::{Error, Result};
use crate::geometry::{ball_volume, ln_ball_volume, wrap_coord, SampleSet, TorusPoint};
use crate::knn::{KnnIndex, QueryScratch};
use crate::rng::RandomStream;
use crate::special::digamma_int;
use rayon::prelude::*;

/// An entropy estimate in nats.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    pub value: f64,
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// `ln((n/k) λ(B(X_i, R_{i,k})))` per sample, when requested.
    pub per_point_log_terms: Option<Vec<f64>>,
}

impl EntropyEstimate {
    /// The additive correction `ln k − ψ(k)`.
    pub fn bias_correction(&self) -> f64 {
        bias_correction(self.k)
    }
}

fn bias_correction(k: usize) -> f64 {
    (k as f64).ln() - digamma_int(k)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct KlOptions {
    /// Keep the per-sample log terms in the result.
    pub retain_terms: bool,
}

/// Leave-one-out `k`-NN distances for every sample, in sample order.
pub fn knn_radii(s: &SampleSet, k: usize) -> Result<Vec<f64>> {
    let n = s.len();
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if n <= k {
        return Err(Error::InsufficientPoints { needed: k + 1, available: n });
    }
    let idx = KnnIndex::build(s)?;
    (0..n)
        .into_par_iter()
        .map_init(QueryScratch::default, |scratch, i| idx.kth_distance(s.point(i), k, Some(i), scratch))
        .collect()
}

/// KL estimate without retaining per-sample terms.
pub fn kl_entropy(s: &SampleSet, k: usize) -> Result<EntropyEstimate> {
    kl_entropy_with(s, k, KlOptions::default())
}

/// KL estimate. Any zero k-NN distance is a [`Error::DuplicatePoints`] error.
///
/// Per-sample queries run in parallel, but the terms are summed sequentially
/// in sample order, so the value does not depend on the thread schedule.
pub fn kl_entropy_with(s: &SampleSet, k: usize, opts: KlOptions) -> Result<EntropyEstimate> {
    let radii = knn_radii(s, k)?;
    if let Some(index) = radii.iter().position(|&r| r == 0.0) {
        return Err(Error::DuplicatePoints { index });
    }
    let n = s.len();
    let d = s.dim();
    let ln_scale = (n as f64 / k as f64).ln();
    let terms: Vec<f64> = radii.iter().map(|&r| ln_scale + ln_ball_volume(d, r)).collect();
    let mean = terms.iter().sum::<f64>() / n as f64;
    Ok(EntropyEstimate {
        value: bias_correction(k) + mean,
        n,
        k,
        d,
        per_point_log_terms: opts.retain_terms.then_some(terms),
    })
}

fn kth_distance_to_set(s: &SampleSet, x: &[f64], k: usize) -> Result<f64> {
    if x.len() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: x.len() });
    }
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    if s.len() < k {
        return Err(Error::InsufficientPoints { needed: k, available: s.len() });
    }
    let idx = KnnIndex::build(s)?;
    let mut scratch = QueryScratch::default();
    idx.kth_distance(x, k, None, &mut scratch)
}

/// k-NN density estimate `k / (n V_d R_k(x)^d)` at an arbitrary point.
pub fn knn_density_estimate(s: &SampleSet, x: &TorusPoint, k: usize) -> Result<f64> {
    let r = kth_distance_to_set(s, x.coords(), k)?;
    if r == 0.0 {
        return Err(Error::DegenerateQuery);
    }
    Ok(k as f64 / (s.len() as f64 * ball_volume(s.dim(), r)))
}

/// `μ(B(x, R_k(x)))`: the density's mass in the ball reaching the `k`-th
/// nearest sample. For an independent `x ~ f` this is Beta(k, n + 1 − k).
pub fn knn_ball_mass(s: &SampleSet, extra: &TorusPoint, k: usize, density: &DensitySpec) -> Result<f64> {
    if density.dim() != s.dim() {
        return Err(Error::DimensionMismatch { expected: s.dim(), found: density.dim() });
    }
    let r = kth_distance_to_set(s, extra.coords(), k)?;
    density.ball_mass(extra.coords(), r)
}

/// Adds independent uniform noise in `[0, eps)^d` to every point, wrapping
/// back onto the torus.
pub fn jitter(s: &SampleSet, eps: f64, rng: &mut RandomStream) -> Result<SampleSet> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("jitter width must be finite and nonnegative, got {eps}")));
    }
    let coords = s.as_flat().iter().map(|&c| wrap_coord(c + eps * rng.uniform())).collect();
    Ok(SampleSet::from_flat_unchecked(s.dim(), coords))
}
