//! Points on the unit torus `[0,1)^d`, the minimum-image metric, and
//! Euclidean ball volumes.

use crate::error::{Error, Result};
use crate::special::ln_gamma;
use std::f64::consts::PI;

/// A point of the unit torus. Coordinates are always stored reduced into `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Builds a point from coordinates that are already in `[0, 1)`.
    ///
    /// Out-of-range input is rejected rather than wrapped; use [`wrap_point`]
    /// to reduce arbitrary coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (axis, &value) in coords.iter().enumerate() {
            if !(value.is_finite() && (0.0..1.0).contains(&value)) {
                return Err(Error::InvalidCoordinate { axis, value });
            }
        }
        // normalise -0.0
        Ok(Self {
            coords: coords.into_iter().map(|c| c + 0.0).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }
}

impl AsRef<[f64]> for TorusPoint {
    fn as_ref(&self) -> &[f64] {
        &self.coords
    }
}

/// Reduces a single real into `[0, 1)`.
#[inline]
pub fn wrap_coord(c: f64) -> f64 {
    let r = c - c.floor();
    // c - floor(c) rounds up to 1.0 for tiny negative c
    if r >= 1.0 {
        0.0
    } else {
        r + 0.0
    }
}

/// Reduces every coordinate modulo 1. Idempotent.
pub fn wrap_point(coords: &[f64]) -> Result<TorusPoint> {
    if coords.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut out = Vec::with_capacity(coords.len());
    for (axis, &value) in coords.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::InvalidCoordinate { axis, value });
        }
        out.push(wrap_coord(value));
    }
    Ok(TorusPoint { coords: out })
}

/// Minimum-image distance between two coordinate slices of equal length.
///
/// Callers guarantee the lengths agree; this is the hot path shared by the
/// brute-force scan and the cell-grid index so both see identical bits.
#[inline]
pub(crate) fn torus_distance_unchecked(a: &[f64], b: &[f64]) -> f64 {
    torus_distance_sq_unchecked(a, b).sqrt()
}

#[inline]
pub(crate) fn torus_distance_sq_unchecked(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        let delta = (x - y).abs();
        let delta = delta.min(1.0 - delta);
        acc += delta * delta;
    }
    acc
}

/// Torus distance `min_{m in Z^d} |m + x - y|`, computed per axis.
pub fn torus_distance(x: &TorusPoint, y: &TorusPoint) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(torus_distance_unchecked(&x.coords, &y.coords))
}

/// `ln V_d`, the log-volume of the unit ball in `R^d`.
pub fn ln_unit_ball_volume(d: usize) -> f64 {
    let half = d as f64 / 2.0;
    half * PI.ln() - ln_gamma(1.0 + half)
}

/// `ln(V_d r^d)`; `-inf` at `r = 0`.
pub fn ln_ball_volume(d: usize, r: f64) -> f64 {
    if r == 0.0 {
        return f64::NEG_INFINITY;
    }
    ln_unit_ball_volume(d) + d as f64 * r.ln()
}

/// Lebesgue volume `V_d r^d` of a Euclidean ball of radius `r` in `R^d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    assert!(d >= 1, "dimension must be positive");
    assert!(r >= 0.0, "radius must be nonnegative");
    if r == 0.0 {
        0.0
    } else {
        ln_ball_volume(d, r).exp()
    }
}

/// `n` points of common dimension `d`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    dim: usize,
    coords: Vec<f64>,
}

impl SampleSet {
    pub fn new(points: Vec<TorusPoint>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyInput)?.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            coords.extend_from_slice(&p.coords);
        }
        Ok(Self { dim, coords })
    }

    /// Builds a sample set from row-major coordinates, validating each one.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.is_empty() {
            return Err(Error::EmptyInput);
        }
        if coords.len() % dim != 0 {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        for (i, &value) in coords.iter().enumerate() {
            if !(value.is_finite() && (0.0..1.0).contains(&value)) {
                return Err(Error::InvalidCoordinate {
                    axis: i % dim,
                    value,
                });
            }
        }
        Ok(Self {
            dim,
            coords: coords.into_iter().map(|c| c + 0.0).collect(),
        })
    }

    /// One-dimensional convenience constructor.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec())
    }

    pub(crate) fn from_flat_unchecked(dim: usize, coords: Vec<f64>) -> Self {
        debug_assert!(dim > 0 && !coords.is_empty() && coords.len() % dim == 0);
        Self { dim, coords }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    /// Always false: a sample set holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    pub fn to_points(&self) -> Vec<TorusPoint> {
        self.iter()
            .map(|c| TorusPoint { coords: c.to_vec() })
            .collect()
    }

    /// Returns the set shifted by `v` on the torus.
    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| wrap_coord(c + v[i % self.dim]))
            .collect();
        Ok(Self::from_flat_unchecked(self.dim, coords))
    }

    /// Appends one point, returning the extended set.
    pub fn with_point(&self, p: &TorusPoint) -> Result<Self> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        let mut coords = self.coords.clone();
        coords.extend_from_slice(p.coords());
        Ok(Self::from_flat_unchecked(self.dim, coords))
    }
}
