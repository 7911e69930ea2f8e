use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{Axis, TransformTable};
use crate::invert::{arctan_term_cdf_single, ArctanMixture, ArctanTerm};

pub const MAX_ITERATIONS: usize = 200;
pub const GRADIENT_TOL: f64 = 1e-10;
/// Terms with smaller `|A_k|` are removed.
pub const MIN_WEIGHT: f64 = 1e-4;
pub const MAX_EDITS: usize = 5;
const MIN_SEED_ATTENUATION: f64 = 1e-3;
/// Bound on `|ln a_k|`; beyond it a term is flat or invisible on any grid.
const LN_ATTENUATION_LIMIT: f64 = 30.0;
const REL_COST_TOL: f64 = 1e-12;
const REL_STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub mixture: ArctanMixture,
    /// `Σ|φ_i − φ̂_i|²` over the samples, unweighted.
    pub residual: f64,
    /// `max |φ_i − φ̂_i|`.
    pub max_error: f64,
    /// Accepted weighted costs of every optimizer run, in order.
    pub history: Vec<Vec<f64>>,
    /// Structural edits applied (reweightings and deletions).
    pub edits: usize,
    /// Whether the optimizer run behind the reported mixture met its
    /// stopping test before the iteration cap.
    pub converged: bool,
}

struct Problem<'a> {
    omegas: &'a [f64],
    target: &'a [Complex64],
    weights: Vec<f64>,
}

impl Problem<'_> {
    fn basis(&self, q: &[f64]) -> Vec<Vec<Complex64>> {
        let k = q.len() / 2;
        self.omegas
            .iter()
            .map(|&w| (0..k).map(|j| (Complex64::new(-q[j].exp(), q[k + j]) * w).exp()).collect())
            .collect()
    }

    /// Amplitudes minimizing the weighted error subject to `Σ A = 1`.
    fn amplitudes(&self, basis: &[Vec<Complex64>]) -> Result<Vec<f64>> {
        let k = basis[0].len();
        let mut kkt = DMatrix::<f64>::zeros(k + 1, k + 1);
        let mut rhs = DVector::<f64>::zeros(k + 1);
        for ((row, &t), &wt) in basis.iter().zip(self.target).zip(&self.weights) {
            for i in 0..k {
                for j in 0..k {
                    kkt[(i, j)] += wt * (row[i].conj() * row[j]).re;
                }
                rhs[i] += wt * (row[i].conj() * t).re;
            }
        }
        for i in 0..k {
            kkt[(i, k)] = 1.0;
            kkt[(k, i)] = 1.0;
        }
        rhs[k] = 1.0;
        let svd = kkt.svd(true, true);
        let eps = svd.singular_values.max() * 1e-15 * (k + 1) as f64;
        let sol = svd.solve(&rhs, eps).map_err(|e| Error::DegenerateFit(e.to_string()))?;
        let amps: Vec<f64> = sol.iter().take(k).copied().collect();
        if amps.iter().any(|a| !a.is_finite()) {
            return Err(Error::DegenerateFit("amplitude solve produced non-finite values".into()));
        }
        Ok(amps)
    }

    fn residual(&self, q: &[f64]) -> Result<(DVector<f64>, Vec<f64>)> {
        let basis = self.basis(q);
        let amps = self.amplitudes(&basis)?;
        let n = self.omegas.len();
        let mut r = DVector::zeros(2 * n);
        for (i, row) in basis.iter().enumerate() {
            let model: Complex64 = row.iter().zip(&amps).map(|(e, a)| e * a).sum();
            let d = (model - self.target[i]) * self.weights[i].sqrt();
            r[i] = d.re;
            r[n + i] = d.im;
        }
        Ok((r, amps))
    }
}

struct Run {
    q: Vec<f64>,
    history: Vec<f64>,
    converged: bool,
}

/// Levenberg-Marquardt on `(ln a_k, b_k)` with amplitudes projected out.
/// Stops at the iteration cap with the last accepted point.
fn levenberg_marquardt(p: &Problem, q0: Vec<f64>) -> Result<Run> {
    let m = q0.len();
    let mut q = q0;
    let (mut r, _) = p.residual(&q)?;
    let mut cost = r.norm_squared();
    let mut history = vec![cost];
    let mut lambda = 1e-3;
    let mut nu = 2.0;
    let mut scale = vec![0.0f64; m];
    for _ in 0..MAX_ITERATIONS {
        let mut jac = DMatrix::<f64>::zeros(r.len(), m);
        for j in 0..m {
            let h = 1e-7 * q[j].abs().max(1.0);
            let mut qh = q.clone();
            qh[j] += h;
            let (rh, _) = p.residual(&qh)?;
            jac.set_column(j, &((rh - &r) / h));
        }
        let grad = jac.tr_mul(&r);
        if grad.amax() <= GRADIENT_TOL {
            return Ok(Run { q, history, converged: true });
        }
        let jtj = jac.tr_mul(&jac);
        for j in 0..m {
            scale[j] = scale[j].max(jtj[(j, j)]);
        }
        loop {
            let mut lhs = jtj.clone();
            for j in 0..m {
                lhs[(j, j)] += lambda * scale[j];
            }
            let step = lhs.cholesky().map(|c| c.solve(&(-&grad)));
            if let Some(step) = step {
                let mut trial: Vec<f64> = q.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
                for alpha in &mut trial[..m / 2] {
                    *alpha = alpha.clamp(-LN_ATTENUATION_LIMIT, LN_ATTENUATION_LIMIT);
                }
                if let Ok((rt, _)) = p.residual(&trial) {
                    let ct = rt.norm_squared();
                    if ct < cost {
                        let predicted = -(2.0 * step.dot(&grad) + step.dot(&(&jtj * &step)));
                        let rho = (cost - ct) / predicted;
                        let small_gain = cost - ct <= REL_COST_TOL * cost;
                        let small_step = step.amax() <= REL_STEP_TOL * (1.0 + q.iter().fold(0.0f64, |s, v| s.max(v.abs())));
                        q = trial;
                        r = rt;
                        cost = ct;
                        history.push(cost);
                        lambda *= if rho.is_finite() { (1.0 - (2.0 * rho - 1.0).powi(3)).max(1.0 / 3.0) } else { 1.0 / 3.0 };
                        nu = 2.0;
                        if small_gain || small_step {
                            return Ok(Run { q, history, converged: true });
                        }
                        break;
                    }
                }
            }
            lambda *= nu;
            nu *= 2.0;
            if lambda > 1e16 {
                // No descent direction left at working precision.
                return Ok(Run { q, history, converged: true });
            }
        }
    }
    Ok(Run { q, history, converged: false })
}

/// Local cumulant slope `(a, b)` of the samples at `w` from the unwrapped
/// logarithm of neighbouring samples.
fn local_slopes(omegas: &[f64], values: &[Complex64], w: f64) -> (f64, f64) {
    let mut logs = Vec::with_capacity(values.len());
    let mut phase = values[0].arg();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            phase += (v / values[i - 1]).arg();
        }
        logs.push(Complex64::new(v.norm().ln(), phase));
    }
    let i = omegas.partition_point(|&o| o < w).clamp(1, omegas.len() - 1);
    let slope = (logs[i] - logs[i - 1]) / (omegas[i] - omegas[i - 1]);
    (-slope.re, slope.im)
}

/// Fits `φ(ω) ≈ Σ A_k exp((−a_k + jb_k)ω)` to samples on the imaginary axis
/// with `Σ A_k = 1` and `a_k > 0`. Terms are seeded with the local
/// attenuation and group delay of the samples at `K` of the given nodes.
/// After the first fit, samples are re-weighted by their relative error and
/// negligible terms are dropped, up to [`MAX_EDITS`] times, keeping the best
/// result by maximum error.
pub fn fit_exponential_sum(samples: &TransformTable, initial_nodes: &[f64], k: usize) -> Result<FitReport> {
    if samples.axis != Axis::ImaginaryOmega {
        return Err(Error::invalid("fitting needs samples on the imaginary axis"));
    }
    let n = samples.grid.len();
    if k == 0 || 4 * k > n {
        return Err(Error::invalid(format!("{k} terms need at least {} samples, have {n}", 4 * k)));
    }
    if initial_nodes.len() < k {
        return Err(Error::invalid(format!("{k} terms need {k} initial nodes")));
    }
    if samples.grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("sample frequencies must increase"));
    }
    let omegas = &samples.grid;
    let target = &samples.values;
    let stride = initial_nodes.len() as f64 / k as f64;
    let mut q = vec![0.0; 2 * k];
    for j in 0..k {
        let w = initial_nodes[(j as f64 * stride) as usize];
        let (a, b) = local_slopes(omegas, target, w);
        q[j] = a.max(MIN_SEED_ATTENUATION).ln();
        q[k + j] = b;
    }

    let mut problem = Problem { omegas, target, weights: vec![1.0; n] };
    let mut history = Vec::new();
    let run = levenberg_marquardt(&problem, q)?;
    history.push(run.history);
    q = run.q;
    let mut best = evaluate(&problem, &q, run.converged)?;
    let mut edits = 0;
    while edits < MAX_EDITS {
        let (_, amps) = problem.residual(&q)?;
        let kk = amps.len();
        if kk > 1 && amps.iter().any(|a| a.abs() < MIN_WEIGHT) {
            let keep: Vec<usize> = (0..kk).filter(|&j| amps[j].abs() >= MIN_WEIGHT).collect();
            q = keep.iter().map(|&j| q[j]).chain(keep.iter().map(|&j| q[kk + j])).collect();
        } else {
            let errors = pointwise_errors(&problem, &q)?;
            let worst = errors.iter().copied().fold(0.0, f64::max);
            if !(worst > 0.0) {
                break;
            }
            for (wt, e) in problem.weights.iter_mut().zip(&errors) {
                *wt *= 1.0 + e / worst;
            }
        }
        edits += 1;
        let run = levenberg_marquardt(&problem, q)?;
        history.push(run.history);
        q = run.q;
        let cand = evaluate(&problem, &q, run.converged)?;
        if cand.max_error < best.max_error {
            best = cand;
        }
    }
    if best.max_error.is_nan() {
        return Err(Error::DegenerateFit("fit produced non-finite values".into()));
    }
    Ok(FitReport {
        mixture: best.mixture,
        residual: best.residual,
        max_error: best.max_error,
        converged: best.converged,
        history,
        edits,
    })
}

struct Candidate {
    mixture: ArctanMixture,
    converged: bool,
    residual: f64,
    max_error: f64,
}

fn evaluate(p: &Problem, q: &[f64], converged: bool) -> Result<Candidate> {
    let (_, amps) = p.residual(q)?;
    let k = amps.len();
    let total: f64 = amps.iter().sum();
    let mut terms = Vec::with_capacity(k);
    for j in 0..k {
        let a = q[j].exp();
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Constraint(format!("fitted attenuation {a} is not positive")));
        }
        terms.push(ArctanTerm { weight: amps[j] / total, a, b: q[k + j] });
    }
    let mixture = ArctanMixture::new(terms)?;
    let mut residual = 0.0;
    let mut max_error = 0.0f64;
    for (&w, &t) in p.omegas.iter().zip(p.target) {
        let e = (mixture.chf(w) - t).norm();
        residual += e * e;
        max_error = max_error.max(e);
    }
    Ok(Candidate { mixture, converged, residual, max_error })
}

/// Unweighted `|φ̂_i − φ_i|` at the current parameters.
fn pointwise_errors(p: &Problem, q: &[f64]) -> Result<Vec<f64>> {
    let (r, _) = p.residual(q)?;
    let n = p.omegas.len();
    Ok((0..n).map(|i| r[i].hypot(r[n + i]) / p.weights[i].sqrt()).collect())
}

/// `x` at which the single-term CDF `(1/π)[arctan((b+x)/a) − arctan((b−x)/a)]`
/// reaches 0.1, 0.5 and 0.9.
pub fn quantile_bracket(a: f64, b: f64) -> Result<(f64, f64, f64)> {
    if !(a > 0.0) || !b.is_finite() {
        return Err(Error::domain(format!("quantiles need a > 0, got a = {a}, b = {b}")));
    }
    let solve = |p: f64| {
        let f = |x: f64| arctan_term_cdf_single(a, b, x) - p;
        let mut hi = a.hypot(b);
        while f(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        // Bisection with a secant probe kept inside the bracket.
        for _ in 0..400 {
            let (flo, fhi) = (f(lo), f(hi));
            let mut x = lo - flo * (hi - lo) / (fhi - flo);
            if !(x > lo && x < hi) || (x - lo).min(hi - x) < 0.01 * (hi - lo) {
                x = 0.5 * (lo + hi);
            }
            let fx = f(x);
            if fx == 0.0 {
                return x;
            }
            if fx < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    };
    Ok((solve(0.1), solve(0.5), solve(0.9)))
}
