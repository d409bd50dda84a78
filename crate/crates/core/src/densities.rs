//! Product-form synthetic densities on the unit torus.
//!
//! Every family is a product of 1-periodic factors that each integrate to one,
//! so sampling, entropy and ball masses decompose per axis:
//!
//! * `uniform`: `f ≡ 1` (declared `s = 2`, `L = 1`).
//! * `trig_product`: `Π_j (1 + a_j cos(2π m_j x_j + φ_j))`, `a_j ∈ [0, 1]`.
//!   In `H^2` with `L` bounded by the Frobenius norm of the Hessian.
//! * `triangle_product`: `Π_j T(x_j)` with `T(x) = 4x` on `[0, 1/2]` and
//!   `4(1 - x)` on `[1/2, 1]`. Lipschitz, so `s = 1`, `L = 4 · 2^(d-1) · √d`.
//!
//! With `a_j = 1` or any triangle factor the density touches zero.

use crate::error::{Error, Result};
use crate::geometry::{ball_volume, SampleSet, TorusPoint};
use crate::quadrature::{integrate, QuadOptions};
use crate::rng::RandomStream;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// One axis of a trigonometric product density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigAxis {
    pub amplitude: f64,
    pub frequency: u32,
    pub phase: f64,
}

impl TrigAxis {
    pub fn new(amplitude: f64, frequency: u32, phase: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&amplitude) {
            return Err(Error::InvalidConfig(format!("trig amplitude must lie in [0, 1], got {amplitude}")));
        }
        if frequency == 0 {
            return Err(Error::InvalidConfig("trig frequency must be a positive integer".into()));
        }
        if !phase.is_finite() {
            return Err(Error::InvalidConfig("trig phase must be finite".into()));
        }
        Ok(Self { amplitude, frequency, phase })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Uniform,
    TrigProduct(Vec<TrigAxis>),
    TriangleProduct,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::TrigProduct(_) => "trig_product",
            Family::TriangleProduct => "triangle_product",
        }
    }
}

/// A one-dimensional periodic factor of a product density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    Uniform,
    Trig(TrigAxis),
    Triangle,
}

impl Factor {
    /// Density at any real `x` (1-periodic).
    #[inline]
    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Factor::Uniform => 1.0,
            Factor::Trig(t) => (1.0 + t.amplitude * (TAU * t.frequency as f64 * x + t.phase).cos()).max(0.0),
            Factor::Triangle => {
                let u = x - x.floor();
                if u <= 0.5 {
                    4.0 * u
                } else {
                    4.0 * (1.0 - u)
                }
            }
        }
    }

    /// `∫_0^u pdf` for any real `u`; increases by exactly one per period.
    #[inline]
    pub fn cumulative(&self, u: f64) -> f64 {
        match *self {
            Factor::Uniform => u,
            Factor::Trig(t) => {
                let w = TAU * t.frequency as f64;
                u + t.amplitude / w * ((w * u + t.phase).sin() - t.phase.sin())
            }
            Factor::Triangle => {
                let whole = u.floor();
                let x = u - whole;
                let part = if x <= 0.5 { 2.0 * x * x } else { 1.0 - 2.0 * (1.0 - x) * (1.0 - x) };
                whole + part
            }
        }
    }

    pub fn sup(&self) -> f64 {
        match *self {
            Factor::Uniform => 1.0,
            Factor::Trig(t) => 1.0 + t.amplitude,
            Factor::Triangle => 2.0,
        }
    }

    /// Points of `[0, 1)` where the factor has a kink or a zero.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Factor::Uniform => vec![],
            Factor::Trig(t) if t.amplitude >= 1.0 => {
                let m = t.frequency as f64;
                (0..t.frequency)
                    .map(|j| crate::geometry::wrap_coord((PI - t.phase + TAU * j as f64) / (TAU * m)))
                    .collect()
            }
            Factor::Trig(_) => vec![],
            Factor::Triangle => vec![0.0, 0.5],
        }
    }

    /// Exact draw in `[0, 1)`.
    pub fn sample(&self, rng: &mut RandomStream) -> f64 {
        match *self {
            Factor::Uniform => rng.uniform(),
            Factor::Trig(t) => loop {
                // rejection from the flat envelope 1 + a
                let x = rng.uniform();
                if rng.uniform() * (1.0 + t.amplitude) <= self.pdf(x) {
                    return x;
                }
            },
            Factor::Triangle => {
                let u = rng.uniform();
                if u <= 0.5 {
                    (0.5 * u).sqrt()
                } else {
                    1.0 - (0.5 * (1.0 - u)).sqrt()
                }
            }
        }
    }

    /// Closed-form differential entropy in nats.
    pub fn entropy(&self) -> f64 {
        match *self {
            Factor::Uniform => 0.0,
            Factor::Trig(t) => {
                // Fourier expansion of ln(1 + a cos θ) gives the mean and the
                // first cosine coefficient in closed form
                let root = (1.0 - t.amplitude * t.amplitude).sqrt();
                -((1.0 + root) / 2.0).ln() - (1.0 - root)
            }
            Factor::Triangle => 0.5 - std::f64::consts::LN_2,
        }
    }

    /// `-∫_0^1 pdf ln pdf` by adaptive quadrature, with `0 ln 0 = 0`.
    pub fn entropy_by_quadrature(&self) -> Result<f64> {
        let opts = QuadOptions { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 5000 };
        let r = integrate(
            |x| {
                let p = self.pdf(x);
                if p > 0.0 {
                    -p * p.ln()
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
            &self.breakpoints(),
            opts,
        )?;
        Ok(r.value)
    }
}

/// A synthetic density instance with its declared Hölder class `(s, L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySpec {
    family: Family,
    d: usize,
    s: f64,
    l: f64,
}

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::InvalidConfig("dimension must be at least 1".into()))
    } else {
        Ok(())
    }
}

impl DensitySpec {
    pub fn uniform(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self { family: Family::Uniform, d, s: 2.0, l: 1.0 })
    }

    pub fn triangle_product(d: usize) -> Result<Self> {
        check_dim(d)?;
        let l = 4.0 * 2f64.powi(d as i32 - 1) * (d as f64).sqrt();
        Ok(Self { family: Family::TriangleProduct, d, s: 1.0, l })
    }

    pub fn trig_product(axes: Vec<TrigAxis>) -> Result<Self> {
        check_dim(axes.len())?;
        for a in &axes {
            TrigAxis::new(a.amplitude, a.frequency, a.phase)?;
        }
        let d = axes.len();
        let l = trig_hessian_bound(&axes);
        // a constant density sits in every Hölder ball
        let l = if l > 0.0 { l } else { 1.0 };
        Ok(Self { family: Family::TrigProduct(axes), d, s: 2.0, l })
    }

    /// Single-axis `1 + a cos(2π m x + φ)`.
    pub fn trig(amplitude: f64, frequency: u32, phase: f64) -> Result<Self> {
        Self::trig_product(vec![TrigAxis::new(amplitude, frequency, phase)?])
    }

    /// Replaces the declared smoothness with a looser one: same `s`, larger `L`.
    pub fn with_declared(mut self, s: f64, l: f64) -> Result<Self> {
        if (s - self.s).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "{} densities are declared with s = {}, got {s}",
                self.family.name(),
                self.s
            )));
        }
        if !(l.is_finite() && l >= self.l * (1.0 - 1e-12)) {
            return Err(Error::InvalidConfig(format!(
                "declared L = {l} is below the family bound {}",
                self.l
            )));
        }
        self.l = l;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        self.family.name()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Declared Hölder exponent `s`.
    pub fn smoothness(&self) -> f64 {
        self.s
    }

    /// Declared Hölder constant `L`.
    pub fn holder_constant(&self) -> f64 {
        self.l
    }

    pub fn factor(&self, axis: usize) -> Factor {
        match &self.family {
            Family::Uniform => Factor::Uniform,
            Family::TrigProduct(axes) => Factor::Trig(axes[axis]),
            Family::TriangleProduct => Factor::Triangle,
        }
    }

    pub fn factors(&self) -> impl Iterator<Item = Factor> + '_ {
        (0..self.d).map(|j| self.factor(j))
    }

    /// `sup f`, the product of per-factor maxima.
    pub fn sup(&self) -> f64 {
        self.factors().map(|f| f.sup()).product()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            Err(Error::DimensionMismatch { expected: self.d, found: x.len() })
        } else {
            Ok(())
        }
    }

    /// Density at coordinates of matching length (periodic in each).
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(j, &c)| self.factor(j).pdf(c)).product()
    }

    pub fn eval_density(&self, x: &TorusPoint) -> Result<f64> {
        self.eval(x.coords())
    }

    /// Draws `n` i.i.d. points.
    pub fn sample(&self, n: usize, rng: &mut RandomStream) -> Result<SampleSet> {
        if n == 0 {
            return Err(Error::EmptyInput);
        }
        let mut coords = Vec::with_capacity(n * self.d);
        for _ in 0..n {
            for j in 0..self.d {
                coords.push(self.factor(j).sample(rng));
            }
        }
        Ok(SampleSet::from_flat_unchecked(self.d, coords))
    }

    /// Draws a single point.
    pub fn sample_point(&self, rng: &mut RandomStream) -> TorusPoint {
        let coords = (0..self.d).map(|j| self.factor(j).sample(rng)).collect();
        TorusPoint::new(coords).expect("factor samples lie in [0, 1)")
    }

    /// Differential entropy `h(f)` in nats, as the sum of per-axis closed forms.
    pub fn true_entropy(&self) -> f64 {
        self.factors().map(|f| f.entropy()).sum()
    }

    /// `h(f)` from per-axis adaptive quadrature.
    pub fn entropy_by_quadrature(&self) -> Result<f64> {
        self.factors().map(|f| f.entropy_by_quadrature()).sum()
    }

    /// Probability mass of the torus ball `{y : d(x, y) <= r}`, in `[0, 1]`.
    pub fn ball_mass(&self, x: &[f64], r: f64) -> Result<f64> {
        self.check_point(x)?;
        check_radius(r)?;
        if r == 0.0 {
            return Ok(0.0);
        }
        if r >= (self.d as f64).sqrt() / 2.0 {
            return Ok(1.0);
        }
        let mass = match self.d {
            1 => {
                let f = self.factor(0);
                f.cumulative(x[0] + r) - f.cumulative(x[0] - r)
            }
            2 => self.disc_integral(x, r, true)?,
            d => return Err(Error::Unsupported(format!("ball mass quadrature in d = {d} (d <= 2 supported)"))),
        };
        Ok(mass.clamp(0.0, 1.0))
    }

    /// Average of the periodic density over the Euclidean ball `B(x, t)` in `R^d`.
    ///
    /// For `t <= 1/2` this is the torus ball mass divided by `V_d t^d`.
    pub fn smoothed_density(&self, x: &[f64], t: f64) -> Result<f64> {
        self.check_point(x)?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("smoothing radius must be positive, got {t}")));
        }
        if matches!(self.family, Family::Uniform) {
            return Ok(1.0);
        }
        let integral = match self.d {
            1 => {
                let f = self.factor(0);
                f.cumulative(x[0] + t) - f.cumulative(x[0] - t)
            }
            2 => self.disc_integral(x, t, false)?,
            d => return Err(Error::Unsupported(format!("smoothed density quadrature in d = {d} (d <= 2 supported)"))),
        };
        Ok((integral / ball_volume(self.d, t)).max(0.0))
    }

    /// `∫ f` over the disc of radius `r` at `x` in d = 2. With `torus` set
    /// the region is clipped to the fundamental square around `x`, which is
    /// exactly the torus ball.
    ///
    /// The inner coordinate is integrated in closed form through the second
    /// factor's cumulative, leaving a 1-D adaptive quadrature.
    fn disc_integral(&self, x: &[f64], r: f64, torus: bool) -> Result<f64> {
        let (f1, f2) = (self.factor(0), self.factor(1));
        let (x1, x2) = (x[0], x[1]);
        let opts = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-12, max_intervals: 4000 };
        let strip = |v1: f64, w: f64| f1.pdf(x1 + v1) * (f2.cumulative(x2 + w) - f2.cumulative(x2 - w));

        if !torus || r <= 0.5 {
            // v1 = r sin φ removes the square-root endpoint singularity
            let mut cuts = Vec::new();
            for k in f1.breakpoints() {
                for p in periodic_hits(k, x1 - r, x1 + r) {
                    cuts.push(((p - x1) / r).clamp(-1.0, 1.0).asin());
                }
            }
            for k in f2.breakpoints() {
                for p in periodic_hits(k, x2 - r, x2 + r) {
                    let phi = ((p - x2).abs() / r).clamp(-1.0, 1.0).acos();
                    cuts.push(phi);
                    cuts.push(-phi);
                }
            }
            let res = integrate(
                |phi| {
                    let c = phi.cos();
                    strip(r * phi.sin(), r * c) * r * c
                },
                -PI / 2.0,
                PI / 2.0,
                &cuts,
                opts,
            )?;
            Ok(res.value)
        } else {
            // 1/2 < r < √2/2: disc clipped to the unit square
            let corner = (r * r - 0.25).sqrt();
            let mut cuts = vec![-corner, corner];
            for k in f1.breakpoints() {
                cuts.extend(periodic_hits(k, x1 - 0.5, x1 + 0.5).map(|p| p - x1));
            }
            let res = integrate(
                |v1| strip(v1, (r * r - v1 * v1).max(0.0).sqrt().min(0.5)),
                -0.5,
                0.5,
                &cuts,
                opts,
            )?;
            Ok(res.value)
        }
    }

    /// Worst ratio `|f_t(x) - f(x)| / (d L t^s / (s + d))` over the grid.
    /// Densities in the declared Hölder ball give at most one.
    pub fn check_holder_bound(&self, t_grid: &[f64], x_grid: &[Vec<f64>]) -> Result<f64> {
        check_grids(t_grid, x_grid)?;
        let (d, s, l) = (self.d as f64, self.s, self.l);
        let mut worst: f64 = 0.0;
        for x in x_grid {
            let f = self.eval(x)?;
            for &t in t_grid {
                let ft = self.smoothed_density(x, t)?;
                let envelope = d * l * t.powf(s) / (s + d);
                worst = worst.max((ft - f).abs() / envelope);
            }
        }
        Ok(worst)
    }

    /// The constant `C` in `f(x) <= C max{f_t(x), (f_t(x) V_d t^d)^(s/(s+d))}`,
    /// reconstructed from the two-case argument that bounds `f` by its local average.
    pub fn sup_bound_constant(&self) -> f64 {
        let (d, s, l) = (self.d as f64, self.s, self.l);
        let vd = ball_volume(self.d, 1.0);
        let k = vd * ((s + d) / (d * l)).powf(d / s) * (2f64.powf(-d / s) - 2f64.powf(-(s + d) / s));
        2f64.max(k.powf(-s / (s + d)))
    }

    /// Worst ratio `f(x) / (C max{f_t, (f_t V_d t^d)^(s/(s+d))})` over the grid.
    pub fn check_density_sup_bound(&self, t_grid: &[f64], x_grid: &[Vec<f64>]) -> Result<f64> {
        check_grids(t_grid, x_grid)?;
        let c = self.sup_bound_constant();
        let (s, d) = (self.s, self.d as f64);
        let mut worst: f64 = 0.0;
        for x in x_grid {
            let f = self.eval(x)?;
            if f == 0.0 {
                continue;
            }
            for &t in t_grid {
                let ft = self.smoothed_density(x, t)?;
                let mass = ft * ball_volume(self.d, t);
                let bound = c * ft.max(mass.powf(s / (s + d)));
                worst = worst.max(if bound > 0.0 { f / bound } else { f64::INFINITY });
            }
        }
        Ok(worst)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("radius must be finite and nonnegative, got {r}")))
    }
}

fn check_grids(t_grid: &[f64], x_grid: &[Vec<f64>]) -> Result<()> {
    if t_grid.is_empty() || x_grid.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(t) = t_grid.iter().find(|t| t.is_nan() || **t <= 0.0) {
        return Err(Error::Domain(format!("grid radii must be positive, got {t}")));
    }
    Ok(())
}

/// All `k + j` (integer `j`) in the open interval `(lo, hi)`.
fn periodic_hits(k: f64, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let first = (lo - k).floor() as i64;
    let last = (hi - k).ceil() as i64;
    (first..=last).map(move |j| k + j as f64).filter(move |&p| p > lo && p < hi)
}

/// Frobenius-norm bound on the Hessian of `Π_j (1 + a_j cos(2π m_j x_j + φ_j))`,
/// using `|g''| <= a(2πm)²`, `|g'| <= a·2πm` and `|g| <= 1 + a` per factor.
fn trig_hessian_bound(axes: &[TrigAxis]) -> f64 {
    let d = axes.len();
    let first: Vec<f64> = axes.iter().map(|a| a.amplitude * TAU * a.frequency as f64).collect();
    let second: Vec<f64> = axes.iter().map(|a| a.amplitude * (TAU * a.frequency as f64).powi(2)).collect();
    let sup: Vec<f64> = axes.iter().map(|a| 1.0 + a.amplitude).collect();
    let others = |skip: &[usize]| -> f64 { (0..d).filter(|i| !skip.contains(i)).map(|i| sup[i]).product() };
    let mut frob = 0.0;
    for j in 0..d {
        for l in 0..d {
            let h = if j == l { second[j] * others(&[j]) } else { first[j] * first[l] * others(&[j, l]) };
            frob += h * h;
        }
    }
    frob.sqrt()
}

/// The densities exercised by the validation suites.
pub fn shipped_instances() -> Vec<DensitySpec> {
    let trig2 = vec![
        TrigAxis::new(1.0, 1, 0.0).expect("valid"),
        TrigAxis::new(0.5, 2, 0.3).expect("valid"),
    ];
    vec![
        DensitySpec::uniform(1).expect("valid"),
        DensitySpec::uniform(2).expect("valid"),
        DensitySpec::trig(1.0, 1, 0.0).expect("valid"),
        DensitySpec::trig(0.5, 1, 0.0).expect("valid"),
        DensitySpec::trig(1.0, 3, 1.0).expect("valid"),
        DensitySpec::trig_product(trig2).expect("valid"),
        DensitySpec::triangle_product(1).expect("valid"),
        DensitySpec::triangle_product(2).expect("valid"),
    ]
}

/// Default evaluation grids for the envelope checks: 50 centres and 20 radii
/// log-spaced over `[0.01, 0.3]`.
pub fn default_check_grids(spec: &DensitySpec) -> (Vec<f64>, Vec<Vec<f64>>) {
    let t_grid: Vec<f64> = (0..20)
        .map(|i| (0.01f64.ln() + (0.3f64.ln() - 0.01f64.ln()) * i as f64 / 19.0).exp())
        .collect();
    let x_grid: Vec<Vec<f64>> = match spec.dim() {
        1 => (0..50).map(|i| vec![i as f64 / 50.0]).collect(),
        d => {
            // quasi-random (Kronecker) sequence plus the lattice corners and centre
            let alphas: Vec<f64> = (0..d).map(|j| (((j + 2) as f64).sqrt()).fract()).collect();
            let mut pts = vec![vec![0.0; d], vec![0.5; d]];
            let mut i = 1;
            while pts.len() < 50 {
                pts.push(alphas.iter().map(|a| (a * i as f64).fract()).collect());
                i += 1;
            }
            pts
        }
    };
    (t_grid, x_grid)
}

// JSON form: {"family", "d", "params", "s", "L"}
#[derive(Debug, Serialize, Deserialize)]
struct RawSpec {
    family: String,
    d: usize,
    #[serde(default)]
    params: RawParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    l: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitude: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frequency: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<Vec<f64>>,
}

impl TryFrom<RawSpec> for DensitySpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let d = raw.d;
        let p = raw.params;
        let no_params = p.amplitude.is_none() && p.frequency.is_none() && p.phase.is_none();
        let spec = match raw.family.as_str() {
            "uniform" | "triangle_product" if !no_params => {
                return Err(Error::InvalidConfig(format!("family {} takes no params", raw.family)))
            }
            "uniform" => DensitySpec::uniform(d)?,
            "triangle_product" => DensitySpec::triangle_product(d)?,
            "trig_product" => {
                let amplitude = p
                    .amplitude
                    .ok_or_else(|| Error::InvalidConfig("trig_product needs params.amplitude".into()))?;
                let frequency = p.frequency.unwrap_or_else(|| vec![1; d]);
                let phase = p.phase.unwrap_or_else(|| vec![0.0; d]);
                if amplitude.len() != d || frequency.len() != d || phase.len() != d {
                    return Err(Error::InvalidConfig(format!(
                        "trig_product params must each have d = {d} entries"
                    )));
                }
                let axes = (0..d)
                    .map(|j| TrigAxis::new(amplitude[j], frequency[j], phase[j]))
                    .collect::<Result<Vec<_>>>()?;
                DensitySpec::trig_product(axes)?
            }
            other => return Err(Error::InvalidConfig(format!("unknown density family {other:?}"))),
        };
        match (raw.s, raw.l) {
            (None, None) => Ok(spec),
            (s, l) => {
                let s = s.unwrap_or(spec.s);
                let l = l.unwrap_or(spec.l);
                spec.with_declared(s, l)
            }
        }
    }
}

impl From<&DensitySpec> for RawSpec {
    fn from(spec: &DensitySpec) -> Self {
        let params = match &spec.family {
            Family::TrigProduct(axes) => RawParams {
                amplitude: Some(axes.iter().map(|a| a.amplitude).collect()),
                frequency: Some(axes.iter().map(|a| a.frequency).collect()),
                phase: Some(axes.iter().map(|a| a.phase).collect()),
            },
            _ => RawParams::default(),
        };
        RawSpec {
            family: spec.family_name().to_string(),
            d: spec.d,
            params,
            s: Some(spec.s),
            l: Some(spec.l),
        }
    }
}

impl Serialize for DensitySpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpec::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensitySpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = RawSpec::deserialize(deserializer)?;
        DensitySpec::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl DensitySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        raw.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}
