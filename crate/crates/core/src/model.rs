//! Lognormal components, sum models, closed-form pdf/CDF, a lognormality
//! diagnostic, a Monte Carlo sampler and the moment-matching baseline.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::specfun::erfc;

/// One lognormal variable `exp(μ + σZ)` with `Z` standard normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalComponent {
    pub mu: f64,
    pub sigma: f64,
}

impl LognormalComponent {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::invalid(format!("mu must be finite, got {mu}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("sigma must be positive and finite, got {sigma}")));
        }
        Ok(LognormalComponent { mu, sigma })
    }

    /// Zero-location component, the form the transform engines work with.
    pub fn standard(sigma: f64) -> Result<Self> {
        Self::new(0.0, sigma)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        pdf(x, self)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        cdf(x, self)
    }

    /// Raw moment `E[Xⁿ] = exp(nμ + n²σ²/2)`; negative `n` gives inverse moments.
    pub fn moment(&self, n: i32) -> f64 {
        let n = n as f64;
        (n * self.mu + 0.5 * n * n * self.sigma * self.sigma).exp()
    }

    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    pub fn median(&self) -> f64 {
        self.mu.exp()
    }
}

/// Ordered list of independent lognormal components.
#[derive(Debug, Clone, PartialEq)]
pub struct SumModel {
    pub components: Vec<LognormalComponent>,
}

impl SumModel {
    pub fn new(components: Vec<LognormalComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("a sum model needs at least one component"));
        }
        Ok(SumModel { components })
    }

    pub fn single(c: LognormalComponent) -> Self {
        SumModel { components: vec![c] }
    }

    /// Builds a model from parallel `mu` and `sigma` lists.
    pub fn from_params(mus: &[f64], sigmas: &[f64]) -> Result<Self> {
        if mus.len() != sigmas.len() {
            return Err(Error::invalid("mu and sigma lists differ in length"));
        }
        let comps = mus.iter().zip(sigmas).map(|(&m, &s)| LognormalComponent::new(m, s)).collect::<Result<Vec<_>>>()?;
        Self::new(comps)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.components.iter().map(|c| c.mean()).sum()
    }

    pub fn variance(&self) -> f64 {
        self.components.iter().map(|c| c.moment(2) - c.mean().powi(2)).sum()
    }
}

/// Tabulated distribution: strictly increasing `xs`, CDF values and an optional pdf.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    pub xs: Vec<f64>,
    pub cdf: Vec<f64>,
    pub pdf: Option<Vec<f64>>,
}

pub const MONOTONE_TOL: f64 = 1e-9;

impl DistributionTable {
    pub fn new(xs: Vec<f64>, cdf: Vec<f64>, pdf: Option<Vec<f64>>) -> Result<Self> {
        let t = DistributionTable { xs, cdf, pdf };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.xs.len() != self.cdf.len() || self.pdf.as_ref().is_some_and(|p| p.len() != self.xs.len()) {
            return Err(Error::invalid("distribution table columns differ in length"));
        }
        if self.xs.iter().any(|&x| !(x > 0.0)) || self.xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("abscissas must be positive and strictly increasing"));
        }
        if self.cdf.iter().any(|&f| !(-MONOTONE_TOL..=1.0 + MONOTONE_TOL).contains(&f)) {
            return Err(Error::invalid("CDF values outside [0, 1]"));
        }
        if self.cdf.windows(2).any(|w| w[1] < w[0] - MONOTONE_TOL) {
            return Err(Error::invalid("CDF is not nondecreasing"));
        }
        if let Some(p) = &self.pdf {
            if p.iter().any(|&v| v < 0.0) {
                return Err(Error::invalid("pdf has negative values"));
            }
            let n = self.xs.len();
            if n >= 2 {
                let area: f64 = (1..n).map(|i| 0.5 * (p[i] + p[i - 1]) * (self.xs[i] - self.xs[i - 1])).sum();
                let mass = self.cdf[n - 1] - self.cdf[0];
                if (area - mass).abs() > 1e-3 {
                    return Err(Error::invalid(format!("pdf area {area} disagrees with CDF mass {mass}")));
                }
            }
        }
        Ok(())
    }
}

fn check_positive(x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("lognormal support is x > 0, got {x}")))
    }
}

/// Lognormal density.
pub fn pdf(x: f64, c: &LognormalComponent) -> Result<f64> {
    check_positive(x)?;
    let z = (x.ln() - c.mu) / c.sigma;
    Ok((-0.5 * z * z).exp() / (x * c.sigma * (2.0 * PI).sqrt()))
}

/// Lognormal CDF `½ + ½·erf((ln x − μ)/(√2σ))`, evaluated through `erfc`
/// so the lower tail keeps relative accuracy.
pub fn cdf(x: f64, c: &LognormalComponent) -> Result<f64> {
    check_positive(x)?;
    let z = (x.ln() - c.mu) / (SQRT_2 * c.sigma);
    Ok(0.5 * erfc(-z))
}

/// RMS residual of a least-squares quadratic fit of `ln p` against `ln x`.
///
/// Zero (to rounding) exactly when the samples have lognormal shape.
pub fn lognormality_residual(xs: &[f64], ps: &[f64]) -> Result<f64> {
    if xs.len() != ps.len() {
        return Err(Error::invalid("xs and ps differ in length"));
    }
    if xs.iter().chain(ps).any(|&v| !(v > 0.0)) {
        return Err(Error::domain("lognormality test needs positive xs and ps"));
    }
    let mut distinct = xs.to_vec();
    distinct.sort_by(|a, b| a.total_cmp(b));
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::DegenerateFit(format!("need at least 4 distinct abscissas, got {}", distinct.len())));
    }
    let n = xs.len();
    let u: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let centre = u.iter().sum::<f64>() / n as f64;
    let scale = u.iter().map(|v| (v - centre).abs()).fold(0.0, f64::max).max(1e-300);
    let a = DMatrix::from_fn(n, 3, |i, j| ((u[i] - centre) / scale).powi(j as i32));
    let y = DVector::from_iterator(n, ps.iter().map(|p| p.ln()));
    let svd = a.clone().svd(true, true);
    let coef = svd.solve(&y, 1e-14).map_err(|e| Error::DegenerateFit(e.to_string()))?;
    let r = y - a * coef;
    Ok((r.norm_squared() / n as f64).sqrt())
}

/// `n` independent draws of `Σ exp(μ_i + σ_i Z_i)`.
///
/// Draw `k` uses its own ChaCha8 stream keyed by `(seed, k)`, so the output
/// does not depend on how draws are scheduled.
pub fn sample_sum(m: &SumModel, n: usize, seed: u64) -> Vec<f64> {
    (0..n).map(|k| draw(m, seed, k as u64)).collect()
}

fn draw(m: &SumModel, seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    m.components
        .iter()
        .map(|c| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (c.mu + c.sigma * z).exp()
        })
        .sum()
}

/// Fenton-Wilkinson style equivalent lognormal matching the first two moments.
pub fn fw_equivalent(m: &SumModel) -> LognormalComponent {
    let m1: f64 = m.components.iter().map(|c| (c.mu + 0.5 * c.sigma * c.sigma).exp()).sum();
    let var: f64 = m
        .components
        .iter()
        .map(|c| {
            let s2 = c.sigma * c.sigma;
            (2.0 * c.mu + s2).exp() * s2.exp_m1()
        })
        .sum();
    let s2 = (var / (m1 * m1)).ln_1p();
    LognormalComponent { mu: m1.ln() - 0.5 * s2, sigma: s2.sqrt() }
}

/// Empirical CDF of sorted samples at `x` (fraction of samples `≤ x`).
pub fn empirical_cdf(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// Kolmogorov-Smirnov distance between sorted samples and a CDF.
pub fn ks_distance<F: FnMut(f64) -> f64>(sorted: &[f64], mut cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs()).max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// KS distance between an empirical sample and a tabulated CDF, checked only
/// at the table abscissas.
pub fn ks_distance_on_grid(sorted: &[f64], xs: &[f64], cdf: &[f64]) -> f64 {
    xs.iter().zip(cdf).map(|(&x, &f)| (empirical_cdf(sorted, x) - f).abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadConfig};

    fn ln(mu: f64, sigma: f64) -> LognormalComponent {
        LognormalComponent::new(mu, sigma).unwrap()
    }

    #[test]
    fn pdf_at_one() {
        assert!((pdf(1.0, &ln(0.0, 1.0)).unwrap() - 0.398_942_280_4).abs() < 1e-10);
    }

    #[test]
    fn pdf_integrates_to_one() {
        let c = ln(0.3, 0.8);
        let r = integrate(|t: f64| pdf(t.exp(), &c).unwrap() * t.exp(), -20.0, 20.0, QuadConfig::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn log_pdf_is_quadratic_in_log_x() {
        let c = ln(-0.4, 1.3);
        let g = |t: f64| pdf(t.exp(), &c).unwrap().ln() + t;
        // third finite difference of a quadratic vanishes
        let h = 0.37;
        let d3 = g(3.0 * h) - 3.0 * g(2.0 * h) + 3.0 * g(h) - g(0.0);
        assert!(d3.abs() < 1e-12);
    }

    #[test]
    fn cdf_reference_points() {
        let c = ln(0.7, 0.9);
        assert!((cdf(c.mu.exp(), &c).unwrap() - 0.5).abs() < 1e-15);
        assert!((cdf((c.mu + c.sigma).exp(), &c).unwrap() - 0.841_344_746_1).abs() < 1e-10);
        assert!((cdf((c.mu + 10.0 * c.sigma).exp(), &c).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let c = ln(0.0, 1.0);
        assert!(matches!(pdf(0.0, &c), Err(Error::Domain(_))));
        assert!(matches!(cdf(-1.0, &c), Err(Error::Domain(_))));
        assert!(LognormalComponent::new(0.0, 0.0).is_err());
        assert!(SumModel::new(vec![]).is_err());
    }

    #[test]
    fn lognormality_exact_shape() {
        let c = ln(0.2, 0.6);
        let xs: Vec<f64> = (1..40).map(|i| 0.1 * i as f64).collect();
        let ps: Vec<f64> = xs.iter().map(|&x| pdf(x, &c).unwrap()).collect();
        assert!(lognormality_residual(&xs, &ps).unwrap() <= 1e-10);
        let scaled: Vec<f64> = xs.iter().map(|x| x * 7.3).collect();
        let r1 = lognormality_residual(&xs, &ps).unwrap();
        let r2 = lognormality_residual(&scaled, &ps).unwrap();
        assert!((r1 - r2).abs() <= 1e-10);
    }

    #[test]
    fn lognormality_rejects_exponential() {
        let xs: Vec<f64> = (0..50).map(|i| 0.1 + 9.9 * i as f64 / 49.0).collect();
        let ps: Vec<f64> = xs.iter().map(|&x| (-x).exp()).collect();
        assert!(lognormality_residual(&xs, &ps).unwrap() > 0.01);
    }

    #[test]
    fn lognormality_needs_four_points() {
        let r = lognormality_residual(&[1.0, 2.0, 2.0, 3.0], &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(r, Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn sampler_is_deterministic() {
        let m = SumModel::from_params(&[0.0, 0.3], &[0.5, 1.0]).unwrap();
        assert_eq!(sample_sum(&m, 1000, 7), sample_sum(&m, 1000, 7));
        assert_ne!(sample_sum(&m, 10, 7), sample_sum(&m, 10, 8));
        let full = sample_sum(&m, 100, 3);
        let tail: Vec<f64> = (50..100).map(|k| draw(&m, 3, k)).collect();
        assert_eq!(&full[50..], &tail[..]);
    }

    #[test]
    fn sampler_median_and_mean() {
        let m = SumModel::single(ln(0.0, 1.0));
        let mut s = sample_sum(&m, 1_000_000, 42);
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        let c = m.components[0];
        let sd = (c.moment(2) - c.mean().powi(2)).sqrt();
        assert!((mean - 0.5f64.exp()).abs() < 3.0 * sd / 1000.0);
        s.sort_by(|a, b| a.total_cmp(b));
        let med = s[s.len() / 2];
        assert!((0.99..=1.01).contains(&med));
    }

    #[test]
    fn sampler_ks_against_cdf() {
        let c = ln(0.0, 1.0);
        let n = 100_000;
        let mut s = sample_sum(&SumModel::single(c), n, 11);
        s.sort_by(|a, b| a.total_cmp(b));
        let d = ks_distance(&s, |x| cdf(x, &c).unwrap());
        assert!(d <= 1.63 / (n as f64).sqrt());
    }

    #[test]
    fn fw_single_component_is_identity() {
        let c = ln(0.4, 1.7);
        let e = fw_equivalent(&SumModel::single(c));
        assert!((e.mu - c.mu).abs() < 1e-12 && (e.sigma - c.sigma).abs() < 1e-12);
    }

    #[test]
    fn fw_two_iid() {
        let c = ln(0.0, 0.5);
        let e = fw_equivalent(&SumModel::new(vec![c, c]).unwrap());
        // m1 = 2e^{1/8}, E[S²] = 2e^{1/2} + 2e^{1/4}
        let m1 = 2.0 * 0.125f64.exp();
        let m2 = 2.0 * 0.5f64.exp() + 2.0 * 0.25f64.exp();
        let s2 = (m2 / (m1 * m1)).ln();
        assert!((e.sigma * e.sigma - s2).abs() < 1e-12);
        assert!((e.mu - (m1.ln() - 0.5 * s2)).abs() < 1e-12);
        assert!(((e.mu + 0.5 * e.sigma * e.sigma).exp() - m1).abs() < 1e-12);
    }

    #[test]
    fn table_validation() {
        assert!(DistributionTable::new(vec![1.0, 2.0], vec![0.2, 0.1], None).is_err());
        assert!(DistributionTable::new(vec![2.0, 1.0], vec![0.1, 0.2], None).is_err());
        assert!(DistributionTable::new(vec![1.0, 2.0], vec![0.1, 0.2], None).is_ok());
    }
}
