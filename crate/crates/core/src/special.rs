//! Digamma, log-gamma and the Beta-distribution helpers used by the bias
//! correction and the distributional validation suites.

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use rand_distr::{Distribution, Gamma};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

// Lanczos approximation, g = 7, n = 9
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

// Asymptotic threshold: the first omitted Bernoulli term at x = 10 is below 1e-15.
const DIGAMMA_ASYMPTOTIC_FROM: f64 = 10.0;

/// Digamma ψ(x) for `x > 0`.
///
/// Shifts `x` up with ψ(x) = ψ(x+1) − 1/x, then sums the asymptotic series
/// through the x^-12 Bernoulli term.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("digamma requires a finite x > 0, got {x}")));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < DIGAMMA_ASYMPTOTIC_FROM {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32_760.0))))));
    Ok(shift + x.ln() - 0.5 / x - series)
}

/// ψ at a positive integer, which is always in the domain.
pub(crate) fn digamma_int(k: usize) -> f64 {
    digamma(k as f64).expect("positive integer argument")
}

/// Parameters of a Beta distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    alpha: f64,
    beta: f64,
}

impl BetaParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite() {
            Ok(Self { alpha, beta })
        } else {
            Err(Error::Domain(format!("Beta parameters must be positive, got ({alpha}, {beta})")))
        }
    }

    /// The law of the `k`-NN ball mass among `n` points: Beta(k, n + 1 - k).
    pub fn knn_ball_mass(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Domain(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        Self::new(k as f64, (n + 1 - k) as f64)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }

    pub fn variance(&self) -> f64 {
        let s = self.alpha + self.beta;
        self.alpha * self.beta / (s * s * (s + 1.0))
    }

    fn integer_params(&self) -> Option<(u64, u64)> {
        let int = |v: f64| (v.fract() == 0.0 && v < 1e15).then_some(v as u64);
        Some((int(self.alpha)?, int(self.beta)?))
    }
}

/// E[ln Y] for Y ~ Beta(α, β): ψ(α) − ψ(α + β).
pub fn beta_ln_moment(p: BetaParams) -> f64 {
    let a = digamma(p.alpha).expect("alpha > 0");
    let ab = digamma(p.alpha + p.beta).expect("alpha + beta > 0");
    a - ab
}

/// E[Y²] for Y ~ Beta(k, n + 1 − k).
pub fn beta_second_moment(k: usize, n: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let (k, n) = (k as f64, n as f64);
    let mean = k / (n + 1.0);
    Ok(mean * mean + k * (n + 1.0 - k) / ((n + 1.0) * (n + 1.0) * (n + 2.0)))
}

// Largest order-statistic problem solved by sorting uniforms directly.
const ORDER_STATISTIC_MAX_N: u64 = 64;

/// Draws one Beta variate in `(0, 1)`.
///
/// Small integer parameters use the α-th order statistic of α + β − 1
/// uniforms; everything else uses the Gamma ratio X / (X + Y).
pub fn beta_sample(p: BetaParams, rng: &mut RandomStream) -> f64 {
    if let Some((a, b)) = p.integer_params() {
        let n = a + b - 1;
        if n <= ORDER_STATISTIC_MAX_N {
            let mut u: Vec<f64> = (0..n).map(|_| rng.uniform_open()).collect();
            let (_, kth, _) = u.select_nth_unstable_by((a - 1) as usize, f64::total_cmp);
            return *kth;
        }
    }
    let ga = Gamma::new(p.alpha, 1.0).expect("validated shape");
    let gb = Gamma::new(p.beta, 1.0).expect("validated shape");
    loop {
        let x: f64 = ga.sample(rng);
        let y: f64 = gb.sample(rng);
        let v = x / (x + y);
        if v > 0.0 && v < 1.0 {
            return v;
        }
    }
}

/// Beta density.
pub fn beta_pdf(p: BetaParams, x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    let ln_b = ln_gamma(p.alpha) + ln_gamma(p.beta) - ln_gamma(p.alpha + p.beta);
    ((p.alpha - 1.0) * x.ln() + (p.beta - 1.0) * (1.0 - x).ln() - ln_b).exp()
}

/// Regularized incomplete beta `I_x(α, β)`, the Beta CDF.
///
/// Integer parameters use the binomial identity
/// `I_x(a, b) = P[Binomial(a + b - 1, x) >= a]`; others use Lentz's
/// continued fraction.
pub fn beta_cdf(p: BetaParams, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    if let Some((a, b)) = p.integer_params() {
        if a + b <= 1_000_000 {
            return binomial_upper_tail(a + b - 1, a, x);
        }
    }
    incomplete_beta_cf(p.alpha, p.beta, x)
}

// P[Bin(n, x) >= k], summing whichever tail is shorter in log space.
fn binomial_upper_tail(n: u64, k: u64, x: f64) -> f64 {
    let ln_x = x.ln();
    let ln_1mx = (-x).ln_1p();
    let nf = n as f64;
    let ln_pmf = |j: u64| {
        let jf = j as f64;
        ln_gamma(nf + 1.0) - ln_gamma(jf + 1.0) - ln_gamma(nf - jf + 1.0) + jf * ln_x + (nf - jf) * ln_1mx
    };
    let sum_range = |lo: u64, hi: u64| -> f64 {
        // log-sum-exp over j in [lo, hi]
        let terms: Vec<f64> = (lo..=hi).map(ln_pmf).collect();
        let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        m.exp() * terms.iter().map(|t| (t - m).exp()).sum::<f64>()
    };
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if k <= n - k + 1 {
        (1.0 - sum_range(0, k - 1)).clamp(0.0, 1.0)
    } else {
        sum_range(k, n).clamp(0.0, 1.0)
    }
}

fn incomplete_beta_cf(a: f64, b: f64, x: f64) -> f64 {
    if x > (a + 1.0) / (a + b + 2.0) {
        return 1.0 - incomplete_beta_cf(b, a, 1.0 - x);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
    const TINY: f64 = 1e-300;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..10_000 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        d = 1.0 + num * d;
        d = if d.abs() < TINY { 1.0 / TINY } else { 1.0 / d };
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        h *= d * c;
        let num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
        d = 1.0 + num * d;
        d = if d.abs() < TINY { 1.0 / TINY } else { 1.0 / d };
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-15 {
            break;
        }
    }
    (ln_front.exp() * h / a).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};

    // ψ(n) = H_{n-1} - γ, summed directly
    fn digamma_harmonic(n: usize) -> f64 {
        (1..n).map(|j| 1.0 / j as f64).sum::<f64>() - EULER_GAMMA
    }

    #[test]
    fn digamma_examples() {
        assert!((digamma(1.0).unwrap() + 0.577_215_664_9).abs() < 1e-10);
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - (1.0 - EULER_GAMMA)).abs() < 1e-12);
        assert!((digamma(2.0).unwrap() - 0.422_784_335_1).abs() < 1e-10);
        assert!((digamma(10.0).unwrap() - digamma_harmonic(10)).abs() < 1e-12);
        assert!((digamma(10.0).unwrap() - 2.251_752_589_1).abs() < 1e-10);
        // ψ(1/2) = -γ - 2 ln 2
        assert!((digamma(0.5).unwrap() + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn digamma_domain() {
        for x in [0.0, -1.0, -0.5, f64::NAN, f64::INFINITY] {
            assert!(matches!(digamma(x), Err(Error::Domain(_))), "{x}");
        }
    }

    #[test]
    fn digamma_integer_values_match_harmonic_sums() {
        for n in [1, 2, 3, 5, 7, 9, 10, 11, 50, 101, 1000] {
            assert!((digamma_int(n) - digamma_harmonic(n)).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn digamma_recurrence_and_monotonicity() {
        let mut prev = f64::NEG_INFINITY;
        let mut x = 0.5;
        while x <= 100.0 {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap() - 1.0 / x;
            assert!(lhs.abs() < 1e-12, "x={x}: {lhs:e}");
            let v = digamma(x).unwrap();
            assert!(v > prev);
            prev = v;
            x += 0.0625;
        }
    }

    #[test]
    fn log_k_minus_digamma_positive_and_vanishing() {
        let mut prev = f64::INFINITY;
        for k in 1..=10_000usize {
            let c = (k as f64).ln() - digamma_int(k);
            assert!(c > 0.0);
            assert!(c < prev);
            prev = c;
        }
        assert!(prev < 1e-4);
    }

    #[test]
    fn ln_gamma_reference_values() {
        assert!(ln_gamma(1.0).abs() < 1e-15);
        assert!(ln_gamma(2.0).abs() < 1e-15);
        assert!((ln_gamma(0.5) - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!((ln_gamma(10.0) - 362_880f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.1) - 2.252_712_651_734_206).abs() < 1e-13);
    }

    #[test]
    fn beta_ln_moment_examples() {
        let uniform = BetaParams::new(1.0, 1.0).unwrap();
        assert!((beta_ln_moment(uniform) + 1.0).abs() < 1e-12);
        let p = BetaParams::knn_ball_mass(1, 100).unwrap();
        assert_eq!((p.alpha(), p.beta()), (1.0, 100.0));
        let expected = digamma_harmonic(1) - digamma_harmonic(101);
        assert!((beta_ln_moment(p) - expected).abs() < 1e-12);
        let p = BetaParams::new(2.0, 2.0).unwrap();
        assert!((beta_ln_moment(p) + 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn beta_second_moment_examples() {
        assert!((beta_second_moment(1, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((beta_second_moment(1, 3).unwrap() - 0.1).abs() < 1e-15);
        assert!((beta_second_moment(2, 4).unwrap() - 0.2).abs() < 1e-15);
        assert!(beta_second_moment(5, 4).is_err());
        assert!(beta_second_moment(0, 4).is_err());
        // agrees with mean² + variance
        let p = BetaParams::knn_ball_mass(3, 40).unwrap();
        let m = p.mean();
        assert!((beta_second_moment(3, 40).unwrap() - (m * m + p.variance())).abs() < 1e-15);
    }

    #[test]
    fn beta_params_validation() {
        assert!(BetaParams::new(0.0, 1.0).is_err());
        assert!(BetaParams::new(1.0, -2.0).is_err());
        assert!(BetaParams::new(f64::NAN, 1.0).is_err());
        assert!(BetaParams::knn_ball_mass(0, 5).is_err());
        assert!(BetaParams::knn_ball_mass(6, 5).is_err());
    }

    fn sample_stats(p: BetaParams, n: usize, seed: u64) -> (Vec<f64>, f64, f64) {
        let mut rng = RandomStream::new(seed);
        let xs: Vec<f64> = (0..n).map(|_| beta_sample(p, &mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (xs, mean, var)
    }

    #[test]
    fn beta_sample_uniform_mean() {
        let (xs, mean, _) = sample_stats(BetaParams::new(1.0, 1.0).unwrap(), 100_000, 1);
        assert!(xs.iter().all(|&x| x > 0.0 && x < 1.0));
        assert!((mean - 0.5).abs() < 0.005);
    }

    #[test]
    fn beta_sample_means_within_three_standard_errors() {
        for (n, path) in [(10usize, "order"), (200, "gamma")] {
            let p = BetaParams::new(1.0, n as f64).unwrap();
            let (_, mean, var) = sample_stats(p, 20_000, 2);
            let se = (var / 20_000.0).sqrt();
            assert!((mean - 1.0 / (n as f64 + 1.0)).abs() < 3.0 * se, "{path}");
        }
        for (k, n) in [(1usize, 30usize), (3, 30), (3, 500)] {
            let p = BetaParams::knn_ball_mass(k, n).unwrap();
            let mut rng = RandomStream::new(3);
            let logs: Vec<f64> = (0..20_000).map(|_| beta_sample(p, &mut rng).ln()).collect();
            let m = logs.iter().sum::<f64>() / logs.len() as f64;
            let v = logs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (logs.len() - 1) as f64;
            let expected = digamma_int(k) - digamma_int(n + 1);
            assert!((m - expected).abs() < 3.0 * (v / logs.len() as f64).sqrt(), "k={k} n={n}");
        }
    }

    // CDF oracle by direct quadrature of the density
    fn cdf_by_quadrature(p: BetaParams, x: f64) -> f64 {
        let opts = QuadOptions { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 5000 };
        integrate(|u| beta_pdf(p, u), 0.0, x, &[p.mean()], opts).unwrap().value
    }

    #[test]
    fn beta_cdf_matches_quadrature() {
        for (a, b) in [(1.0, 1.0), (2.0, 5.0), (3.0, 198.0), (0.7, 1.3), (2.5, 40.0)] {
            let p = BetaParams::new(a, b).unwrap();
            for x in [0.001, 0.01, 0.05, 0.2, 0.5, 0.9] {
                let got = beta_cdf(p, x);
                let want = cdf_by_quadrature(p, x);
                assert!((got - want).abs() < 1e-9, "({a},{b}) x={x}: {got} vs {want}");
            }
        }
        let p = BetaParams::new(3.0, 4.0).unwrap();
        assert_eq!(beta_cdf(p, 0.0), 0.0);
        assert_eq!(beta_cdf(p, 1.0), 1.0);
        // both CDF routes agree on integer parameters
        for x in [0.05, 0.3, 0.7] {
            assert!((binomial_upper_tail(6, 3, x) - incomplete_beta_cf(3.0, 4.0, x)).abs() < 1e-13);
        }
    }

    fn ks_against(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn beta_sample_ks_against_quadrature_cdf() {
        for (a, b) in [(1.0, 1.0), (3.0, 10.0), (2.0, 300.0), (0.8, 2.2)] {
            let p = BetaParams::new(a, b).unwrap();
            let (mut xs, _, _) = sample_stats(p, 10_000, 4);
            let ks = ks_against(&mut xs, |x| cdf_by_quadrature(p, x));
            assert!(ks < 0.02, "({a},{b}) ks={ks}");
        }
    }
}
