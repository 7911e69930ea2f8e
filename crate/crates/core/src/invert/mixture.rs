//! Closed-form inverses of damped complex-exponential characteristic
//! functions, and the staircase converse from a tabulated CDF.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{Axis, Engine, TransformTable};
use crate::model::DistributionTable;
use crate::specfun::erfcx;

/// `Σ A_k·exp(−a_kω + jb_kω)`: one arctan pair per term in the CDF.
#[derive(Debug, Clone, PartialEq)]
pub struct ArctanMixture {
    pub terms: Vec<ArctanTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArctanTerm {
    pub weight: f64,
    pub a: f64,
    pub b: f64,
}

pub const MIXTURE_WEIGHT_TOL: f64 = 1e-9;

impl ArctanMixture {
    pub fn new(terms: Vec<ArctanTerm>) -> Result<Self> {
        let m = ArctanMixture { terms };
        m.validate()?;
        Ok(m)
    }

    pub fn single(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![ArctanTerm { weight: 1.0, a, b }])
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::invalid("mixture needs at least one term"));
        }
        if let Some(t) = self.terms.iter().find(|t| !(t.a > 0.0 && t.a.is_finite() && t.b.is_finite())) {
            return Err(Error::Constraint(format!("attenuation must be positive and finite, got a = {}", t.a)));
        }
        let total: f64 = self.terms.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > MIXTURE_WEIGHT_TOL {
            return Err(Error::Constraint(format!("weights sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `φ(ω) = Σ A_k·exp((−a_k + jb_k)ω)`.
    pub fn chf(&self, w: f64) -> Complex64 {
        self.terms.iter().map(|t| t.weight * (Complex64::new(-t.a, t.b) * w).exp()).sum()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        arctan_mixture_cdf(self, x)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        arctan_mixture_pdf(self, x)
    }
}

/// `F(x) = (1/π)·Σ A_k[atan((b_k + x)/a_k) − atan((b_k − x)/a_k)]`.
pub fn arctan_mixture_cdf(mix: &ArctanMixture, x: f64) -> f64 {
    mix.terms
        .iter()
        .map(|t| t.weight * (((t.b + x) / t.a).atan() - ((t.b - x) / t.a).atan()))
        .sum::<f64>()
        / PI
}

/// Single-term CDF as one arctangent, `atan(2ax/(a² + b² − x²))/π`, with the
/// `+π` branch correction once `x² > a² + b²`.
pub fn arctan_term_cdf_single(a: f64, b: f64, x: f64) -> f64 {
    let den = a * a + b * b - x * x;
    let mut v = (2.0 * a * x / den).atan();
    if den < 0.0 {
        v += PI;
    } else if den == 0.0 {
        v = 0.5 * PI;
    }
    v / PI
}

/// Two-Lorentzian density `(1/π)·Σ A_k[a_k/(a_k² + (b_k+x)²) + a_k/(a_k² + (b_k−x)²)]`.
pub fn arctan_mixture_pdf(mix: &ArctanMixture, x: f64) -> f64 {
    mix.terms
        .iter()
        .map(|t| {
            let a2 = t.a * t.a;
            t.weight * (t.a / (a2 + (t.b + x).powi(2)) + t.a / (a2 + (t.b - x).powi(2)))
        })
        .sum::<f64>()
        / PI
}

/// Gaussian-chirp term `A·exp(−(a₂ω² + a₁ω) + j(b₂ω² + b₁ω))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChirpTerm {
    pub weight: f64,
    pub a1: f64,
    pub b1: f64,
    pub a2: f64,
    pub b2: f64,
}

/// Largest `|z|` handed to `erfcx` with negative real part before the
/// `e^{z²}` growth is treated as unstable.
const ERFCX_REACH: f64 = 25.0;

/// `∫₀^∞ exp(−αω² − βω) dω = ½√(π/α)·erfcx(β/(2√α))`, or `1/β` when
/// `α = 0`.
fn half_line_chirp(alpha: Complex64, beta: Complex64) -> Result<Complex64> {
    if alpha.norm() == 0.0 {
        if beta.norm() == 0.0 {
            return Err(Error::domain("chirp integral diverges for α = β = 0"));
        }
        return Ok(1.0 / beta);
    }
    let root = alpha.sqrt();
    let z = beta / (2.0 * root);
    if z.re < 0.0 && z.norm() > ERFCX_REACH {
        return Err(Error::Instability(format!("erfcx argument {z} outside the stable region")));
    }
    Ok(0.5 * (PI / alpha).sqrt() * erfcx(z)?)
}

/// One-sided density `g(x) = (1/π)·Re Σ ∫₀^∞ term(ω)·e^{−jωx} dω`.
pub fn second_order_density(terms: &[ChirpTerm], x: f64) -> Result<f64> {
    let mut total = Complex64::new(0.0, 0.0);
    for t in terms {
        if t.a2 < 0.0 {
            return Err(Error::domain(format!("second-order attenuation must be nonnegative, got {}", t.a2)));
        }
        let alpha = Complex64::new(t.a2, -t.b2);
        let beta = Complex64::new(t.a1, -(t.b1 - x));
        total += t.weight * half_line_chirp(alpha, beta)?;
    }
    Ok(total.re / PI)
}

/// Folded density `g(x) + g(−x)` on `x ≥ 0`; reduces to the two-Lorentzian
/// mixture density when every `a₂ = b₂ = 0`.
pub fn second_order_pdf(terms: &[ChirpTerm], x: f64) -> Result<f64> {
    Ok(second_order_density(terms, x)? + second_order_density(terms, -x)?)
}

/// `φ(ω) = Σ A_k·e^{jωx_k}` with steps `A_k = F(x_{k+1}) − F(x_k)` placed at
/// the interval midpoints.
pub fn chf_from_cdf(table: &DistributionTable, omegas: &[f64]) -> Result<TransformTable> {
    table.validate()?;
    let n = table.xs.len();
    if n < 2 {
        return Err(Error::invalid("distribution table needs at least two points"));
    }
    let below = table.cdf[0];
    let above = 1.0 - table.cdf[n - 1];
    if below > 1e-3 || above > 1e-3 {
        return Err(Error::Coverage(format!(
            "uncaptured mass {below:.3e} below and {above:.3e} above the table"
        )));
    }
    if omegas.windows(2).any(|w| w[1] <= w[0]) || omegas.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::invalid("frequency grid must be nonnegative and strictly increasing"));
    }
    let steps: Vec<(f64, f64)> = (0..n - 1)
        .map(|k| (0.5 * (table.xs[k] + table.xs[k + 1]), table.cdf[k + 1] - table.cdf[k]))
        .collect();
    let values = omegas
        .iter()
        .map(|&w| steps.iter().map(|&(x, a)| a * Complex64::from_polar(1.0, w * x)).sum())
        .collect();
    Ok(TransformTable {
        axis: Axis::ImaginaryOmega,
        grid: omegas.to_vec(),
        values,
        engine: Engine::Staircase,
        factor_engine: Engine::Staircase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::chf_reduced;
    use crate::model::LognormalComponent;
    use crate::quad::{integrate, QuadConfig};

    fn mix() -> ArctanMixture {
        ArctanMixture::new(vec![
            ArctanTerm { weight: 0.6, a: 0.3, b: 1.2 },
            ArctanTerm { weight: 0.4, a: 1.5, b: 4.0 },
        ])
        .unwrap()
    }

    #[test]
    fn cdf_basics() {
        let m = mix();
        assert_eq!(m.cdf(0.0), 0.0);
        assert!((m.cdf(1e9) - 1.0).abs() < 1e-8);
        let one = ArctanMixture::single(1.0, 0.0).unwrap();
        let x = (0.45 * PI).tan();
        assert!((one.cdf(x) - 0.9).abs() < 1e-12);
        assert!((one.cdf(x) - 2.0 / PI * x.atan()).abs() < 1e-15);
    }

    #[test]
    fn branch_corrected_single_form() {
        for (a, b) in [(0.5, 1.0), (2.0, 0.1), (0.01, 3.0)] {
            let m = ArctanMixture::single(a, b).unwrap();
            for x in [0.01, 0.5, 1.0, 2.0, 3.0, 10.0, 100.0] {
                assert!((arctan_term_cdf_single(a, b, x) - m.cdf(x)).abs() < 1e-12, "a={a} b={b} x={x}");
            }
        }
    }

    #[test]
    fn pdf_is_cdf_derivative_and_normalised() {
        let m = mix();
        assert!(m.pdf(0.0) > 0.0 && m.pdf(0.0).is_finite());
        for x in [0.1, 0.7, 1.3, 3.9, 8.0] {
            let h = 1e-5;
            let fd = (m.cdf(x + h) - m.cdf(x - h)) / (2.0 * h);
            assert!((fd - m.pdf(x)).abs() < 1e-8);
        }
        let total: f64 = [(0.0, 10.0), (10.0, 1e3), (1e3, 1e6)]
            .iter()
            .map(|&(a, b)| integrate(|x: f64| m.pdf(x), a, b, QuadConfig::default()).unwrap().value)
            .sum();
        assert!((total - 1.0).abs() < 1e-5);
    }

    #[test]
    fn mixture_validation() {
        assert!(ArctanMixture::single(0.0, 1.0).is_err());
        assert!(ArctanMixture::new(vec![ArctanTerm { weight: 0.5, a: 1.0, b: 0.0 }]).is_err());
    }

    #[test]
    fn second_order_degenerate_reduces_to_lorentzians() {
        let m = mix();
        let terms: Vec<ChirpTerm> =
            m.terms.iter().map(|t| ChirpTerm { weight: t.weight, a1: t.a, b1: t.b, a2: 0.0, b2: 0.0 }).collect();
        for x in [0.0, 0.5, 1.2, 3.0, 7.0] {
            assert!((second_order_pdf(&terms, x).unwrap() - m.pdf(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn second_order_normal() {
        let t = [ChirpTerm { weight: 1.0, a1: 0.0, b1: 0.0, a2: 0.5, b2: 0.0 }];
        for x in [0.0f64, 1.0] {
            let want = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
            assert!((second_order_density(&t, x).unwrap() - want).abs() < 1e-6);
        }
    }

    #[test]
    fn second_order_small_curvature_is_continuous() {
        let base = ChirpTerm { weight: 1.0, a1: 0.8, b1: 2.0, a2: 0.0, b2: 0.0 };
        let bent = ChirpTerm { a2: 1e-9, b2: 1e-9, ..base };
        let a = second_order_pdf(&[base], 1.5).unwrap();
        let b = second_order_pdf(&[bent], 1.5).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn staircase_transform() {
        let t = DistributionTable::new(vec![0.5, 1.5, 3.5], vec![0.0, 0.25, 1.0], None).unwrap();
        let tab = chf_from_cdf(&t, &[0.0, 0.7]).unwrap();
        assert!((tab.values[0] - 1.0).norm() < 1e-15);
        let want = 0.25 * Complex64::from_polar(1.0, 0.7) + 0.75 * Complex64::from_polar(1.0, 0.7 * 2.5);
        assert!((tab.values[1] - want).norm() < 1e-15);
        let short = DistributionTable::new(vec![0.5, 1.0], vec![0.0, 0.9], None).unwrap();
        assert!(matches!(chf_from_cdf(&short, &[1.0]), Err(Error::Coverage(_))));
    }

    #[test]
    fn staircase_lognormal_matches_direct_chf() {
        let c = LognormalComponent::standard(1.0).unwrap();
        let xs: Vec<f64> = (0..2000).map(|i| 1e-3 * 1e5f64.powf(i as f64 / 1999.0)).collect();
        let cdf: Vec<f64> = xs.iter().map(|&x| c.cdf(x).unwrap()).collect();
        let t = DistributionTable::new(xs, cdf, None).unwrap();
        let omegas: Vec<f64> = (0..50).map(|i| 0.1 + 4.9 * i as f64 / 49.0).collect();
        let tab = chf_from_cdf(&t, &omegas).unwrap();
        for (w, v) in omegas.iter().zip(&tab.values) {
            assert!((v - chf_reduced(*w, 1.0).unwrap()).norm() < 1e-2);
        }
    }
}
