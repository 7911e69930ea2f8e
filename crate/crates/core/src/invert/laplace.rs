//! Real-axis and complex-node Laplace inversion: Post-Widder, Der Haar,
//! Gaver-Stehfest, Zakian and Padé-node Gaussian quadrature.

use std::f64::consts::LN_2;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use num_complex::Complex64;

use crate::dd::{CDd, Dd};
use crate::error::{Error, Result};
use crate::forward::Transform;
use crate::specfun::ln_gamma_real;

pub const MAX_STEHFEST_ORDER: usize = 16;
pub const MAX_PADE_ORDER: usize = 24;
/// Relative imaginary residue tolerated in complex-node sums.
pub const RESIDUE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeFamily {
    StehfestReal,
    Zakian,
    PadeComplex,
}

/// Nodes and weights of the sum `f(x) ≈ Σ (1/x)·K_n·M(a_n/x)`.
///
/// For the Stehfest family the weights carry the `ln 2` factor, so
/// `K_n = ln2·V_n` with `V_n` the classical coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionNodes {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<Complex64>,
    pub order: usize,
    pub family: NodeFamily,
}

impl InversionNodes {
    /// `Σ K_n/a_n`, which is the inverse of `1/s` and should equal 1.
    pub fn unit_step(&self) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(a, k)| k / a).sum()
    }

    fn assemble<F: FnMut(Complex64, Complex64) -> Result<Complex64>>(&self, mut term: F) -> Result<f64> {
        let terms = self.nodes.iter().zip(&self.weights).map(|(&a, &k)| term(a, k)).collect::<Result<Vec<_>>>()?;
        // Conjugate partners are added to each other first so that rounding in
        // the large alternating terms cannot leave a spurious imaginary part.
        let mut used = vec![false; terms.len()];
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..terms.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let partner = (i + 1..terms.len()).find(|&j| !used[j] && self.nodes[j] == self.nodes[i].conj());
            match partner {
                Some(j) => {
                    used[j] = true;
                    total += terms[i] + terms[j];
                }
                None => total += terms[i],
            }
        }
        if self.family != NodeFamily::StehfestReal && total.im.abs() > RESIDUE_TOL * total.re.abs().max(1e-300) {
            return Err(Error::ImaginaryResidue { residue: total.im, value: total.re });
        }
        Ok(total.re)
    }

    /// Inverse `f(x)`.
    pub fn pdf<T: Transform + ?Sized>(&self, t: &T, x: f64) -> Result<f64> {
        self.derivative(t, x, 0)
    }

    /// `F(x) = Σ (K_n/a_n)·M(a_n/x)`, the inverse of `M(s)/s`.
    pub fn cdf<T: Transform + ?Sized>(&self, t: &T, x: f64) -> Result<f64> {
        check_x(x)?;
        self.assemble(|a, k| Ok(k / a * eval_at(t, a / x)?))
    }

    /// `P_k(x) = Σ (1/x)·K_n·(a_n/x)^k·M(a_n/x)`, the inverse of `s^k·M(s)`.
    pub fn derivative<T: Transform + ?Sized>(&self, t: &T, x: f64, k: u32) -> Result<f64> {
        check_x(x)?;
        self.assemble(|a, w| {
            let s = a / x;
            Ok(w / x * s.powu(k) * eval_at(t, s)?)
        })
    }
}

fn eval_at<T: Transform + ?Sized>(t: &T, s: Complex64) -> Result<Complex64> {
    if s.im == 0.0 {
        Ok(Complex64::new(t.eval(s)?.re, 0.0))
    } else {
        t.eval(s)
    }
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("inversion needs x > 0, got {x}")))
    }
}

/// `(−1)^k (k/x)^{k+1} M^{(k)}(k/x) / k!`, assembled in log space.
pub fn post_widder<T: Transform + ?Sized>(t: &T, x: f64, k: u32) -> Result<f64> {
    check_x(x)?;
    if k == 0 {
        return Err(Error::invalid("Post-Widder order must be at least 1"));
    }
    let kf = k as f64;
    let s = kf / x;
    let d = t.derivative(s, k)?;
    if d == 0.0 {
        return Ok(0.0);
    }
    let sign = if k % 2 == 0 { d.signum() } else { -d.signum() };
    let log_mag = (kf + 1.0) * s.ln() - ln_gamma_real(kf + 1.0) + d.abs().ln();
    if log_mag > f64::MAX.ln() {
        return Err(Error::Overflow(format!("Post-Widder value at x = {x}, k = {k}")));
    }
    Ok(sign * log_mag.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerHaar {
    One,
    Half,
}

/// Single-point indicators `(1/x)M(1/x)` and `(1/(2x))M(1/(2x))`.
pub fn der_haar<T: Transform + ?Sized>(t: &T, x: f64, variant: DerHaar) -> Result<f64> {
    check_x(x)?;
    let s = match variant {
        DerHaar::One => 1.0 / x,
        DerHaar::Half => 0.5 / x,
    };
    Ok(s * t.eval(Complex64::new(s, 0.0))?.re)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Classical Stehfest coefficients `V_1..V_N` in exact arithmetic.
fn stehfest_exact(n: usize) -> Vec<BigRational> {
    let half = n / 2;
    (1..=n)
        .map(|i| {
            let lo = (i + 1) / 2;
            let hi = i.min(half);
            let mut sum = BigRational::zero();
            for k in lo..=hi {
                let num = BigInt::from(k).pow(half as u32) * factorial(2 * k);
                let den = factorial(half - k) * factorial(k) * factorial(k - 1) * factorial(i - k) * factorial(2 * k - i);
                sum += BigRational::new(num, den);
            }
            if (i + half) % 2 == 1 {
                -sum
            } else {
                sum
            }
        })
        .collect()
}

/// Stehfest nodes `a_n = n·ln2` with weights `ln2·V_n`.
pub fn stehfest_coefficients(n: usize) -> Result<InversionNodes> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::invalid(format!("Stehfest order must be even and >= 2, got {n}")));
    }
    if n > MAX_STEHFEST_ORDER {
        return Err(Error::Precision(format!(
            "Stehfest order {n} exceeds {MAX_STEHFEST_ORDER}, beyond double precision"
        )));
    }
    let v = stehfest_exact(n);
    Ok(InversionNodes {
        nodes: (1..=n).map(|i| Complex64::new(i as f64 * LN_2, 0.0)).collect(),
        weights: v.iter().map(|r| Complex64::new(r.to_f64().unwrap_or(f64::NAN) * LN_2, 0.0)).collect(),
        order: n,
        family: NodeFamily::StehfestReal,
    })
}

/// `f(x) = (ln2/x)·Σ V_n M(n·ln2/x)`.
pub fn gaver_stehfest<T: Transform + ?Sized>(t: &T, x: f64, n: usize) -> Result<f64> {
    stehfest_coefficients(n)?.pdf(t, x)
}

/// CDF from the same nodes applied to `M(s)/s`.
pub fn gaver_stehfest_cdf<T: Transform + ?Sized>(t: &T, x: f64, n: usize) -> Result<f64> {
    stehfest_coefficients(n)?.cdf(t, x)
}

/// Zakian's five complex node pairs, as tabulated to ten digits.
const ZAKIAN: [((f64, f64), (f64, f64)); 5] = [
    ((12.83767675, 1.666063445), (-36902.08210, 196990.4257)),
    ((12.22613209, 5.012718792), (61277.02524, -95408.62551)),
    ((10.93430308, 8.409673116), (-28916.56288, 18169.18531)),
    ((8.776434715, 11.92185389), (4655.361138, -1.901528642)),
    ((5.225453361, 15.72952905), (-118.7414011, -141.3036911)),
];

/// Zakian nodes: `f(x) = (2/x)·Σ Re(K_i M(α_i/x))`, stored as conjugate
/// pairs. Only the five-pair set is tabulated, so `n` must be at most 5.
pub fn zakian_nodes(n: usize) -> Result<InversionNodes> {
    if n == 0 || n > ZAKIAN.len() {
        return Err(Error::invalid(format!("Zakian order must be in 1..=5, got {n}")));
    }
    let mut nodes = Vec::with_capacity(2 * n);
    let mut weights = Vec::with_capacity(2 * n);
    for &((ar, ai), (kr, ki)) in &ZAKIAN[..n] {
        let (a, k) = (Complex64::new(ar, ai), Complex64::new(kr, ki));
        nodes.extend([a, a.conj()]);
        weights.extend([k, k.conj()]);
    }
    Ok(InversionNodes { nodes, weights, order: n, family: NodeFamily::Zakian })
}

pub fn zakian<T: Transform + ?Sized>(t: &T, x: f64, n: usize) -> Result<f64> {
    zakian_nodes(n)?.pdf(t, x)
}

/// Coefficients of the `[n−1/n]` Padé approximant `P/Q` of `e^z`, lowest
/// power first.
fn pade_polynomials(n: usize) -> (Vec<BigRational>, Vec<BigRational>) {
    let m = n - 1;
    let top = factorial(m + n);
    let coeff = |k: usize, deg: usize| {
        BigRational::new(factorial(m + n - k) * factorial(deg), top.clone() * factorial(k) * factorial(deg - k))
    };
    let p = (0..=m).map(|k| coeff(k, m)).collect();
    let q = (0..=n)
        .map(|k| {
            let c = coeff(k, n);
            if k % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    (p, q)
}

fn to_dd(r: &BigRational) -> Dd {
    let hi = r.to_f64().unwrap_or(f64::NAN);
    let rest = r - BigRational::from_float(hi).unwrap_or_else(BigRational::zero);
    Dd::new(hi, rest.to_f64().unwrap_or(0.0))
}

fn horner(c: &[Dd], z: CDd) -> CDd {
    c.iter().rev().fold(CDd::default(), |acc, &ck| acc * z + CDd::new(ck, Dd::ZERO))
}

const POLISH_ITERATIONS: usize = 60;

/// Simultaneous Aberth-Ehrlich refinement of all roots in double-double,
/// started from the companion-matrix eigenvalues.
fn aberth_polish(q: &[Dd], dq: &[Dd], start: &[Complex64]) -> Result<Vec<CDd>> {
    let mut z: Vec<CDd> = start.iter().map(|r| CDd::from_f64(r.re, r.im)).collect();
    let one = CDd::from_f64(1.0, 0.0);
    for _ in 0..POLISH_ITERATIONS {
        let mut worst = 0.0f64;
        for i in 0..z.len() {
            let ratio = horner(q, z[i]) / horner(dq, z[i]);
            let mut repulsion = CDd::default();
            for j in 0..z.len() {
                if j != i {
                    repulsion = repulsion + one / (z[i] - z[j]);
                }
            }
            let step = ratio / (one - ratio * repulsion);
            z[i] = z[i] - step;
            worst = worst.max(step.to_c64().norm() / z[i].to_c64().norm());
        }
        if worst <= 1e-30 {
            return Ok(z);
        }
    }
    let worst = z
        .iter()
        .map(|&zi| (horner(q, zi) / horner(dq, zi)).to_c64().norm() / zi.to_c64().norm())
        .fold(0.0f64, f64::max);
    if !(worst <= 1e-20) {
        return Err(Error::NonConvergence { what: "Padé root polish", iterations: POLISH_ITERATIONS });
    }
    Ok(z)
}

/// Poles `a_n` of the `[N−1/N]` Padé approximant of `e^z` and weights
/// `K_n = −Res(P/Q, a_n)`, so that `f(x) ≈ Σ (1/x)K_n M(a_n/x)`.
pub fn pade_nodes(n: usize) -> Result<InversionNodes> {
    if !(2..=MAX_PADE_ORDER).contains(&n) {
        return Err(Error::invalid(format!("Padé order must be in 2..={MAX_PADE_ORDER}, got {n}")));
    }
    let (p, q) = pade_polynomials(n);
    let pd: Vec<Dd> = p.iter().map(to_dd).collect();
    let qd: Vec<Dd> = q.iter().map(to_dd).collect();
    let dq: Vec<Dd> = q.iter().enumerate().skip(1).map(|(k, c)| to_dd(&(c * BigRational::from_integer(BigInt::from(k))))).collect();

    // Companion matrix of the monic denominator in w = z/n, which keeps the
    // coefficients balanced; the roots have modulus of order n.
    let rho = BigRational::from_integer(BigInt::from(n));
    let scaled: Vec<BigRational> = q.iter().enumerate().map(|(k, c)| c * num::pow(rho.clone(), k)).collect();
    let lead = &scaled[n];
    let mut comp = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -(&scaled[i] / lead).to_f64().unwrap_or(f64::NAN);
    }
    let mut roots: Vec<Complex64> = comp.complex_eigenvalues().iter().map(|w| w * n as f64).collect();
    if roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::NonConvergence { what: "Padé denominator roots", iterations: 0 });
    }
    roots.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal));

    let z = aberth_polish(&qd, &dq, &roots)?;
    let nodes: Vec<Complex64> = z.iter().map(|z| z.to_c64()).collect();
    let mut weights: Vec<Complex64> = z.iter().map(|&z| -(horner(&pd, z) / horner(&dq, z)).to_c64()).collect();
    let mut nodes = nodes;
    // Enforce exact conjugate symmetry.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let a = 0.5 * (nodes[i].conj() + nodes[j]);
        let k = 0.5 * (weights[i].conj() + weights[j]);
        nodes[j] = a;
        nodes[i] = a.conj();
        weights[j] = k;
        weights[i] = k.conj();
    }
    if n % 2 == 1 {
        nodes[n / 2].im = 0.0;
        weights[n / 2].im = 0.0;
    }
    Ok(InversionNodes { nodes, weights, order: n, family: NodeFamily::PadeComplex })
}

/// Padé-node quadrature: `k = 0` gives the density, higher `k` the
/// inverse of `s^k·M(s)`.
pub fn gauss_quadrature_invert<T: Transform + ?Sized>(t: &T, x: f64, nodes: &InversionNodes, k: u32) -> Result<f64> {
    nodes.derivative(t, x, k)
}

pub fn gauss_quadrature_cdf<T: Transform + ?Sized>(t: &T, x: f64, nodes: &InversionNodes) -> Result<f64> {
    nodes.cdf(t, x)
}
