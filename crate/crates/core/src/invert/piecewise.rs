//! CDF from the cumulant curve: direct quadrature of the cumulant form, and
//! the piecewise method where each frequency segment has a linear cumulant
//! and integrates in closed form through `E1`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result, Warning};
use crate::forward::CumulantCurve;
use crate::quad::{try_integrate, QuadConfig};
use crate::specfun::{expint_e1, expint_e1_scaled};

/// Envelope below which the curve end counts as covered.
pub const COVERAGE_ENVELOPE: f64 = 1e-4;
/// Largest admissible first frequency of a curve.
pub const MAX_START_OMEGA: f64 = 1e-3;
/// Floor applied to segment attenuations before the `E1` evaluations.
pub const MIN_ATTENUATION: f64 = 1e-10;

/// Frequency stretch with linear cumulant `X_lo + (−a + jb)(ω − ω_lo)`,
/// optionally shaped by `1 + Σ c_k sin(πk(ω − ω_lo)/L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub a: f64,
    pub b: f64,
    pub x_lo: Complex64,
    /// Envelope `exp(Re X_lo)`.
    pub amplitude: f64,
    pub correction: Vec<Complex64>,
}

impl Segment {
    pub fn new(omega_lo: f64, omega_hi: f64, a: f64, b: f64, x_lo: Complex64) -> Self {
        Segment { omega_lo, omega_hi, a, b, x_lo, amplitude: x_lo.re.exp(), correction: Vec::new() }
    }

    pub fn len(&self) -> f64 {
        self.omega_hi - self.omega_lo
    }
}

/// Terminal stretch `[ω_m, ∞)` with cumulant `X_m + (−a_m + jb_m)(ω − ω_m)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tail {
    pub omega_m: f64,
    pub a_m: f64,
    pub b_m: f64,
    pub x_m: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentPlan {
    pub segments: Vec<Segment>,
    pub tail: Tail,
}

impl SegmentPlan {
    pub fn validate(&self) -> Result<()> {
        let first = self.segments.first().ok_or_else(|| Error::invalid("segment plan is empty"))?;
        if first.omega_lo != 0.0 {
            return Err(Error::Constraint(format!("first segment starts at {}, not 0", first.omega_lo)));
        }
        if first.x_lo.norm() > 1e-12 {
            return Err(Error::Constraint("cumulant must vanish at the origin".into()));
        }
        for s in &self.segments {
            if !(s.omega_hi > s.omega_lo) {
                return Err(Error::Constraint(format!("empty segment at {}", s.omega_lo)));
            }
            if s.a < 0.0 {
                return Err(Error::Constraint(format!("negative attenuation {} at {}", s.a, s.omega_lo)));
            }
        }
        for w in self.segments.windows(2) {
            if w[0].omega_hi != w[1].omega_lo {
                return Err(Error::Constraint(format!("gap or overlap at {}", w[0].omega_hi)));
            }
        }
        if self.segments.last().map(|s| s.omega_hi) != Some(self.tail.omega_m) {
            return Err(Error::Constraint("tail does not start at the end of the last segment".into()));
        }
        if self.tail.a_m < 0.0 {
            return Err(Error::Constraint(format!("negative tail attenuation {}", self.tail.a_m)));
        }
        Ok(())
    }
}

/// `F(x) = ½ − (1/π)∫ exp(X1)·sin(X2 − ωx)/ω dω` over the curve, with the
/// beyond-range stretch closed by `E1` using the terminal slopes.
pub fn cumulant_cdf(curve: &CumulantCurve, x: f64) -> Result<f64> {
    let n = curve.len();
    if n == 0 {
        return Err(Error::invalid("empty cumulant curve"));
    }
    if curve.omegas[0] > MAX_START_OMEGA {
        return Err(Error::Coverage(format!("curve starts at ω = {} above {MAX_START_OMEGA}", curve.omegas[0])));
    }
    let last = n - 1;
    let flat = curve.a1[last].abs() <= 1e-12 && curve.b1[last].abs() <= 1e-12;
    if curve.x1[last].exp() > COVERAGE_ENVELOPE && !flat {
        return Err(Error::Coverage(format!(
            "envelope {:.3e} at ω = {} exceeds {COVERAGE_ENVELOPE}",
            curve.x1[last].exp(),
            curve.omegas[last]
        )));
    }
    let g = |w: f64| -> Result<f64> {
        let c = curve.interpolate(w).ok_or_else(|| Error::invalid("interpolation outside curve"))?;
        Ok(c.re.exp() * (c.im - w * x).sin() / w)
    };
    let cfg = QuadConfig { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 2000 };
    let mut total = try_integrate(g, 0.0, curve.omegas[0], cfg)?.value;
    for w in curve.omegas.windows(2) {
        total += try_integrate(g, w[0], w[1], cfg)?.value;
    }
    let wm = curve.omegas[last];
    let q = Complex64::new(curve.a1[last].max(MIN_ATTENUATION), -(curve.b1[last] - x));
    let xm = Complex64::new(curve.x1[last], curve.x2[last] - wm * x);
    total += (xm.exp() * expint_e1_scaled(q * wm)?).im;
    Ok(0.5 - total / PI)
}

/// `∫_{ω1}^{ω2} e^{−r(ω−ω1)}/ω dω = e^{rω1}[E1(rω1) − E1(rω2)]` for `ω1 > 0`.
fn span(r: Complex64, w1: f64, w2: f64) -> Result<Complex64> {
    Ok(expint_e1_scaled(r * w1)? - (-r * (w2 - w1)).exp() * expint_e1_scaled(r * w2)?)
}

/// `∫₀^W (e^{−uω} − e^{−vω})/ω dω = ln(v/u) − E1(uW) + E1(vW)`.
fn origin_difference(u: Complex64, v: Complex64, w: f64) -> Result<Complex64> {
    Ok(v.ln() - u.ln() - expint_e1(u * w)? + expint_e1(v * w)?)
}

/// Closed-form Gil-Pelaez contribution `∫ φ(ω)e^{−jωx}/ω dω` of one
/// segment. For the segment at the origin only the imaginary part of the
/// base term is finite and the real part is returned as zero.
fn segment_integral(seg: &Segment, x: f64, warnings: &mut Vec<Warning>) -> Result<Complex64> {
    let a = seg.a.max(MIN_ATTENUATION);
    let beta = seg.b - x;
    let q = Complex64::new(a, -beta);
    if q.norm() < 1e-8 {
        warnings.push(Warning::BranchCut { argument: (q.re, q.im) });
    }
    let (w1, w2) = (seg.omega_lo, seg.omega_hi);
    let base = if w1 == 0.0 {
        Complex64::new(0.0, beta.atan2(a) - expint_e1(q * w2)?.im)
    } else {
        (seg.x_lo - Complex64::new(0.0, w1 * x)).exp() * span(q, w1, w2)?
    };
    Ok(base + correction_integral(&seg.correction, seg, x)?)
}

fn correction_integral(coeffs: &[Complex64], seg: &Segment, x: f64) -> Result<Complex64> {
    if coeffs.iter().all(|c| c.norm() == 0.0) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let a = seg.a.max(MIN_ATTENUATION);
    let q = Complex64::new(a, -(seg.b - x));
    let (w1, w2) = (seg.omega_lo, seg.omega_hi);
    let l = w2 - w1;
    let two_j = Complex64::new(0.0, 2.0);
    let mut total = Complex64::new(0.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate() {
        if c.norm() == 0.0 {
            continue;
        }
        let kappa = Complex64::new(0.0, PI * (k + 1) as f64 / l);
        let (u, v) = (q - kappa, q + kappa);
        let term = if w1 == 0.0 {
            origin_difference(u, v, w2)?
        } else {
            (seg.x_lo - Complex64::new(0.0, w1 * x)).exp() * (span(u, w1, w2)? - span(v, w1, w2)?)
        };
        total += c * term / two_j;
    }
    Ok(total)
}

fn tail_integral(tail: &Tail, x: f64) -> Result<Complex64> {
    let q = Complex64::new(tail.a_m.max(MIN_ATTENUATION), -(tail.b_m - x));
    let xm = tail.x_m - Complex64::new(0.0, tail.omega_m * x);
    Ok(xm.exp() * expint_e1_scaled(q * tail.omega_m)?)
}

fn plan_sum(plan: &SegmentPlan, x: f64, warnings: &mut Vec<Warning>) -> Result<f64> {
    let mut total = tail_integral(&plan.tail, x)?;
    for seg in &plan.segments {
        total += segment_integral(seg, x, warnings)?;
    }
    Ok(total.im)
}

/// Piecewise CDF, folded as `G(x) − G(−x)` with `G` the Gil-Pelaez value,
/// i.e. `(2/π)∫ Re φ(ω)·sin(ωx)/ω dω`. This vanishes at `x = 0` and reduces
/// to the two-arctangent form for a single exponential segment.
pub fn expint_piecewise_cdf_checked(plan: &SegmentPlan, x: f64) -> Result<(f64, Vec<Warning>)> {
    plan.validate()?;
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::domain(format!("abscissa must be nonnegative, got {x}")));
    }
    let mut warnings = Vec::new();
    let f = (plan_sum(plan, -x, &mut warnings)? - plan_sum(plan, x, &mut warnings)?) / PI;
    Ok((f, warnings))
}

pub fn expint_piecewise_cdf(plan: &SegmentPlan, x: f64) -> Result<f64> {
    Ok(expint_piecewise_cdf_checked(plan, x)?.0)
}

/// CDF change produced by the sine-series shaping `coeffs` on `seg`, in the
/// same folded form as [`expint_piecewise_cdf`]. Linear in the coefficients.
pub fn segment_correction(coeffs: &[Complex64], seg: &Segment, x: f64) -> Result<f64> {
    Ok((correction_integral(coeffs, seg, -x)?.im - correction_integral(coeffs, seg, x)?.im) / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::cumulants;
    use crate::invert::fourier::gil_pelaez_cdf;
    use crate::invert::mixture::ArctanMixture;
    use crate::model::{LognormalComponent, SumModel};

    fn exponential_plan(a: f64, b: f64, split: &[f64], wm: f64) -> SegmentPlan {
        let mut edges = vec![0.0];
        edges.extend_from_slice(split);
        edges.push(wm);
        let lin = |w: f64| Complex64::new(-a * w, b * w);
        let segments = edges.windows(2).map(|e| Segment::new(e[0], e[1], a, b, lin(e[0]))).collect();
        SegmentPlan { segments, tail: Tail { omega_m: wm, a_m: a, b_m: b, x_m: lin(wm) } }
    }

    #[test]
    fn single_exponential_matches_arctan_form() {
        for (a, b) in [(0.4, 1.3), (2.0, 0.2)] {
            let mix = ArctanMixture::single(a, b).unwrap();
            for plan in [exponential_plan(a, b, &[], 3.0), exponential_plan(a, b, &[0.5, 1.7, 2.2], 9.0)] {
                for x in [0.05, 0.5, 1.0, 2.0, 6.0] {
                    let v = expint_piecewise_cdf(&plan, x).unwrap();
                    assert!((v - mix.cdf(x)).abs() < 1e-8, "a={a} b={b} x={x}: {v} vs {}", mix.cdf(x));
                }
            }
            let far = 10.0 * (a * a + b * b).sqrt();
            assert!((expint_piecewise_cdf(&exponential_plan(a, b, &[1.0], 4.0), far).unwrap() - 1.0).abs() < 0.1);
        }
    }

    #[test]
    fn saturates_far_out() {
        let (a, b) = (0.5, 1.0);
        let plan = exponential_plan(a, b, &[1.0], 4.0);
        let x = 1000.0 * (a * a + b * b).sqrt();
        assert!((expint_piecewise_cdf(&plan, x).unwrap() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn correction_is_linear() {
        let seg = Segment::new(0.5, 1.5, 0.3, 1.1, Complex64::new(-0.1, 0.6));
        let c = [Complex64::new(0.05, -0.02), Complex64::new(-0.01, 0.03)];
        let neg: Vec<Complex64> = c.iter().map(|v| -v).collect();
        for x in [0.3, 1.0, 2.5] {
            assert_eq!(segment_correction(&[Complex64::new(0.0, 0.0); 3], &seg, x).unwrap(), 0.0);
            let p = segment_correction(&c, &seg, x).unwrap();
            let n = segment_correction(&neg, &seg, x).unwrap();
            assert!((p + n).abs() < 1e-15);
            let bound: f64 = c.iter().map(|v| v.norm()).sum();
            assert!(p.abs() <= bound);
        }
    }

    #[test]
    fn correction_recovers_sinusoidal_cumulant() {
        // φ(ω) = e^{(−a+jb)ω}(1 + c·sin(πω/L)) on [0, L], exact tail beyond.
        let (a, b, l, c) = (0.6, 1.4, 3.0, 0.2);
        let phi = |w: f64| -> Complex64 {
            let lin = (Complex64::new(-a, b) * w).exp();
            if w < l {
                lin * (1.0 + c * (PI * w / l).sin())
            } else {
                lin
            }
        };
        let folded = |x: f64| {
            let g = |y: f64| gil_pelaez_cdf(|w| Ok(phi(w)), y).unwrap();
            g(x) - g(-x)
        };
        let mut plan = exponential_plan(a, b, &[], l);
        let xs = [0.3, 0.8, 1.5, 2.5, 4.0];
        let plain: f64 = xs.iter().map(|&x| (expint_piecewise_cdf(&plan, x).unwrap() - folded(x)).abs()).fold(0.0, f64::max);
        plan.segments[0].correction = vec![Complex64::new(c, 0.0)];
        let fixed: f64 = xs.iter().map(|&x| (expint_piecewise_cdf(&plan, x).unwrap() - folded(x)).abs()).fold(0.0, f64::max);
        assert!(fixed * 2.0 <= plain, "{fixed} vs {plain}");
        assert!(fixed < 1e-6);
    }

    #[test]
    fn plan_validation() {
        let mut plan = exponential_plan(0.5, 1.0, &[1.0], 4.0);
        plan.validate().unwrap();
        plan.segments[1].omega_lo = 1.1;
        assert!(plan.validate().is_err());
    }

    #[test]
    fn cumulant_form_matches_gil_pelaez() {
        let m = SumModel::single(LognormalComponent::standard(1.0).unwrap());
        let omegas: Vec<f64> = (0..160).map(|i| 1e-4 * 1e7f64.powf(i as f64 / 159.0)).collect();
        let curve = cumulants(&m, &omegas).unwrap();
        let t = crate::forward::ModelTransform::new(m.clone(), crate::forward::Engine::ReducedRange);
        use crate::forward::Transform;
        for x in [0.5, 1.0, 2.0] {
            let a = cumulant_cdf(&curve, x).unwrap();
            let b = gil_pelaez_cdf(|w| t.chf(w), x).unwrap();
            assert!((a - b).abs() < 2e-3, "x={x}: {a} vs {b}");
        }
        assert!((cumulant_cdf(&curve, 1.0).unwrap() - 0.5).abs() < 5e-3);
    }

    #[test]
    fn cumulant_form_point_mass_and_coverage() {
        let omegas = vec![1e-4, 1.0, 10.0];
        let zero = vec![0.0; 3];
        let flat = CumulantCurve {
            omegas: omegas.clone(),
            x1: zero.clone(),
            x2: zero.clone(),
            a1: zero.clone(),
            b1: zero.clone(),
            a2: zero.clone(),
            b2: zero.clone(),
        };
        for x in [0.5, 3.0] {
            assert!((cumulant_cdf(&flat, x).unwrap() - 1.0).abs() < 1e-6);
        }
        let m = SumModel::single(LognormalComponent::standard(1.0).unwrap());
        let short = cumulants(&m, &[1e-4, 0.1, 1.0]).unwrap();
        assert!(matches!(cumulant_cdf(&short, 1.0), Err(Error::Coverage(_))));
    }
}
