//! Transform objects consumed by the inversion routines.

use num_complex::Complex64;

use super::{mgf_barouch_kaufman_derivative, mgf_derivative_gh, mgf_derivative_reduced, Engine, DEFAULT_ORDER};
use crate::error::{Error, Result};
use crate::model::SumModel;

/// A Laplace-type transform `M(s) = E[e^{−sX}]` of a nonnegative variable.
pub trait Transform {
    fn eval(&self, s: Complex64) -> Result<Complex64>;

    /// k-th derivative on the real axis. The default uses central
    /// differences with one Richardson step, adequate for small `k` only.
    fn derivative(&self, s: f64, k: u32) -> Result<f64> {
        if k == 0 {
            return Ok(self.eval(Complex64::new(s, 0.0))?.re);
        }
        let h = 0.05 * s.max(1e-2) / k as f64;
        let fd = |h: f64| -> Result<f64> {
            let mut acc = 0.0;
            let mut binom = 1.0;
            for i in 0..=k {
                let t = s + (0.5 * k as f64 - i as f64) * h;
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                acc += sign * binom * self.eval(Complex64::new(t, 0.0))?.re;
                binom = binom * (k - i) as f64 / (i + 1) as f64;
            }
            Ok(acc / h.powi(k as i32))
        };
        let d1 = fd(h)?;
        let d2 = fd(0.5 * h)?;
        Ok((4.0 * d2 - d1) / 3.0)
    }

    /// Characteristic function `E[e^{jωX}] = M(−jω)`.
    fn chf(&self, omega: f64) -> Result<Complex64> {
        self.eval(Complex64::new(0.0, -omega))
    }
}

/// Transform of a lognormal sum computed by one component engine.
#[derive(Debug, Clone)]
pub struct ModelTransform {
    pub model: SumModel,
    pub engine: Engine,
    pub order: usize,
}

impl ModelTransform {
    pub fn new(model: SumModel, engine: Engine) -> Self {
        Self { model, engine, order: DEFAULT_ORDER }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    fn component_derivatives(&self, s: f64, mu: f64, sigma: f64, k: u32) -> Result<Vec<f64>> {
        let scale = mu.exp();
        let z = s * scale;
        (0..=k)
            .map(|j| {
                let d = match self.engine {
                    Engine::ReducedRange => mgf_derivative_reduced(z, sigma, j)?,
                    Engine::Gh => mgf_derivative_gh(z, sigma, j, self.order)?,
                    Engine::BarouchKaufman => mgf_barouch_kaufman_derivative(z, sigma, j)?,
                    _ => {
                        let single = ModelTransform {
                            model: SumModel::single(crate::model::LognormalComponent::standard(sigma)?),
                            engine: self.engine,
                            order: self.order,
                        };
                        return Ok(single.fd_derivative(z, j)? * scale.powi(j as i32));
                    }
                };
                Ok(d * scale.powi(j as i32))
            })
            .collect()
    }

    fn fd_derivative(&self, s: f64, k: u32) -> Result<f64> {
        struct Plain<'a>(&'a ModelTransform);
        impl Transform for Plain<'_> {
            fn eval(&self, s: Complex64) -> Result<Complex64> {
                self.0.eval(s)
            }
        }
        Plain(self).derivative(s, k)
    }
}

impl Transform for ModelTransform {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        if self.engine == Engine::Product {
            return Err(Error::EngineAxisMismatch { engine: "product".into(), axis: "component".into() });
        }
        self.model.components.iter().try_fold(Complex64::new(1.0, 0.0), |acc, c| {
            Ok(acc * self.engine.evaluate(s * c.mu.exp(), c.sigma, self.order)?)
        })
    }

    /// Leibniz rule over the components, each differentiated analytically
    /// where its engine allows.
    fn derivative(&self, s: f64, k: u32) -> Result<f64> {
        let mut acc: Option<Vec<f64>> = None;
        for c in &self.model.components {
            let d = self.component_derivatives(s, c.mu, c.sigma, k)?;
            acc = Some(match acc {
                None => d,
                Some(prev) => leibniz(&prev, &d),
            });
        }
        acc.map(|v| v[k as usize]).ok_or_else(|| Error::invalid("empty model"))
    }
}

/// Derivatives `0..=k` of `f·g` from those of `f` and `g`.
fn leibniz(f: &[f64], g: &[f64]) -> Vec<f64> {
    (0..f.len())
        .map(|n| {
            let mut binom = 1.0;
            let mut sum = 0.0;
            for j in 0..=n {
                sum += binom * f[j] * g[n - j];
                binom = binom * (n - j) as f64 / (j + 1) as f64;
            }
            sum
        })
        .collect()
}

/// `M(s)/s`, the transform of the CDF of the variable behind `M`.
pub struct Integrated<'a, T: ?Sized>(pub &'a T);

impl<T: Transform + ?Sized> Transform for Integrated<'_, T> {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.0.eval(s)? / s)
    }

    /// Leibniz rule with `(1/s)^{(j)} = (−1)^j j!/s^{j+1}`.
    fn derivative(&self, s: f64, k: u32) -> Result<f64> {
        let mut inv = Vec::with_capacity(k as usize + 1);
        let mut term = 1.0 / s;
        for j in 0..=k {
            inv.push(term);
            term *= -((j + 1) as f64) / s;
        }
        let d = (0..=k).map(|i| self.0.derivative(s, i)).collect::<Result<Vec<f64>>>()?;
        Ok(leibniz(&d, &inv)[k as usize])
    }
}

/// Adapter for a closure.
pub struct FnTransform<F>(pub F);

impl<F: Fn(Complex64) -> Result<Complex64>> Transform for FnTransform<F> {
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        (self.0)(s)
    }
}

/// Closure transform with a closed-form real-axis derivative
/// `derivative(s, k)`.
pub struct WithDerivative<F, D> {
    pub eval: F,
    pub derivative: D,
}

impl<F, D> Transform for WithDerivative<F, D>
where
    F: Fn(Complex64) -> Result<Complex64>,
    D: Fn(f64, u32) -> Result<f64>,
{
    fn eval(&self, s: Complex64) -> Result<Complex64> {
        (self.eval)(s)
    }

    fn derivative(&self, s: f64, k: u32) -> Result<f64> {
        (self.derivative)(s, k)
    }
}
