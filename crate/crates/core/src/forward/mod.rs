//! Forward transform engines: the MGF on the real `s` axis and the CHF on
//! the imaginary axis, for single components and for products over a
//! [`SumModel`].

mod cumulant;
pub mod mgf;
pub mod reduced;
pub mod saddle;
mod transform;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::SumModel;

pub use cumulant::{cumulants, cumulants_with, log_chf, CumulantCurve, MAX_FIRST_OMEGA};
pub use mgf::{
    mgf_asymptotic_gh, mgf_asymptotic_gh_expanded, mgf_barouch_kaufman, mgf_barouch_kaufman_derivative,
    mgf_derivative_gh, mgf_derivative_gh_with, mgf_gh, mgf_saddle_prefactor, mgf_split, transform_gh,
    transform_split, DerivativeExponent, DEFAULT_ORDER,
};
pub use reduced::{
    chf_reduced, mgf_derivative_reduced, mgf_reduced, moment_by_quadrature, reduced_halves, transform_reduced,
    transform_reduced_derivative,
};
pub use saddle::{chf_holgate, mgf_saddle_gh, transform_holgate, transform_saddle_gh};
pub use transform::{FnTransform, Integrated, ModelTransform, Transform, WithDerivative};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    RealS,
    ImaginaryOmega,
}

impl Axis {
    /// Point on the complex `s` plane for a grid value.
    pub fn point(self, t: f64) -> Complex64 {
        match self {
            Axis::RealS => Complex64::new(t, 0.0),
            Axis::ImaginaryOmega => Complex64::new(0.0, -t),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::RealS => "real_s",
            Axis::ImaginaryOmega => "imaginary_omega",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "real_s" | "s" | "real" | "mgf" => Ok(Axis::RealS),
            "imaginary_omega" | "omega" | "imag" | "chf" => Ok(Axis::ImaginaryOmega),
            _ => Err(Error::invalid(format!("unknown axis '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Gh,
    SplitGh,
    AsymptoticGh,
    SaddleGh,
    ReducedRange,
    Holgate,
    BarouchKaufman,
    Product,
    /// Tables built from a sampled CDF rather than a component engine.
    Staircase,
}

impl Engine {
    pub const COMPONENT_ENGINES: [Engine; 7] = [
        Engine::Gh,
        Engine::SplitGh,
        Engine::AsymptoticGh,
        Engine::SaddleGh,
        Engine::ReducedRange,
        Engine::Holgate,
        Engine::BarouchKaufman,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Engine::Gh => "gh",
            Engine::SplitGh => "split_gh",
            Engine::AsymptoticGh => "asymptotic_gh",
            Engine::SaddleGh => "saddle_gh",
            Engine::ReducedRange => "reduced_range",
            Engine::Holgate => "holgate",
            Engine::BarouchKaufman => "barouch_kaufman",
            Engine::Product => "product",
            Engine::Staircase => "staircase",
        }
    }

    pub fn supports(self, axis: Axis) -> bool {
        match self {
            Engine::Gh | Engine::SplitGh | Engine::SaddleGh | Engine::ReducedRange => true,
            Engine::AsymptoticGh | Engine::BarouchKaufman => axis == Axis::RealS,
            Engine::Holgate => axis == Axis::ImaginaryOmega,
            Engine::Product | Engine::Staircase => false,
        }
    }

    /// Transform of a zero-location component at complex `s`.
    pub fn evaluate(self, s: Complex64, sigma: f64, order: usize) -> Result<Complex64> {
        if s == Complex64::new(0.0, 0.0) {
            return Ok(Complex64::new(1.0, 0.0));
        }
        let real = |v: f64| Complex64::new(v, 0.0);
        let needs_real = || {
            if s.im == 0.0 {
                Ok(s.re)
            } else {
                Err(Error::EngineAxisMismatch { engine: self.name().into(), axis: Axis::ImaginaryOmega.to_string() })
            }
        };
        match self {
            Engine::Gh => transform_gh(s, sigma, order),
            Engine::SplitGh => {
                let (m1, m2) = transform_split(s, sigma, order)?;
                Ok(m1 + m2)
            }
            Engine::AsymptoticGh => Ok(real(mgf_asymptotic_gh(needs_real()?, sigma, order)?)),
            Engine::SaddleGh => transform_saddle_gh(s, sigma, order),
            Engine::ReducedRange => transform_reduced(s, sigma),
            Engine::Holgate => transform_holgate(s, sigma),
            Engine::BarouchKaufman => Ok(real(mgf_barouch_kaufman(needs_real()?, sigma)?)),
            Engine::Product | Engine::Staircase => {
                Err(Error::EngineAxisMismatch { engine: self.name().into(), axis: "component".into() })
            }
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gh" => Ok(Engine::Gh),
            "split_gh" | "split" => Ok(Engine::SplitGh),
            "asymptotic_gh" | "asymptotic" => Ok(Engine::AsymptoticGh),
            "saddle_gh" | "saddle" => Ok(Engine::SaddleGh),
            "reduced_range" | "reduced" => Ok(Engine::ReducedRange),
            "holgate" => Ok(Engine::Holgate),
            "barouch_kaufman" | "bk" => Ok(Engine::BarouchKaufman),
            "product" => Ok(Engine::Product),
            "staircase" => Ok(Engine::Staircase),
            _ => Err(Error::invalid(format!("unknown engine '{s}'"))),
        }
    }
}

/// Sampled transform values along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformTable {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// `Product` for multi-component models, otherwise the component engine.
    pub engine: Engine,
    /// Engine used for each factor.
    pub factor_engine: Engine,
}

impl TransformTable {
    /// Checks the table invariants: unit value at the origin and, on the
    /// real axis, real values in `(0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if self.grid.len() != self.values.len() {
            return Err(Error::invalid("grid and values differ in length"));
        }
        for (&t, &v) in self.grid.iter().zip(&self.values) {
            if t == 0.0 && (v - 1.0).norm() > 1e-10 {
                return Err(Error::Precision(format!("transform at the origin is {v}, not 1")));
            }
            if self.axis == Axis::RealS && (v.im.abs() > 1e-12 || !(v.re > 0.0 && v.re <= 1.0 + 1e-12)) {
                return Err(Error::Precision(format!("MGF value {v} at s = {t} is outside (0, 1]")));
            }
        }
        Ok(())
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::invalid("transform grid must be finite and nonnegative"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("transform grid must be strictly increasing"));
    }
    Ok(())
}

/// Product of per-component transforms, with each location restored by the
/// scaling `M_i(s) → M_i(s·e^{μ_i})`.
pub fn transform_product(m: &SumModel, grid: &[f64], axis: Axis, engine: Engine) -> Result<TransformTable> {
    transform_product_with(m, grid, axis, engine, DEFAULT_ORDER)
}

pub fn transform_product_with(
    m: &SumModel,
    grid: &[f64],
    axis: Axis,
    engine: Engine,
    order: usize,
) -> Result<TransformTable> {
    if !engine.supports(axis) {
        return Err(Error::EngineAxisMismatch { engine: engine.name().into(), axis: axis.to_string() });
    }
    check_grid(grid)?;
    let values = grid
        .iter()
        .map(|&t| {
            let s = axis.point(t);
            m.components.iter().try_fold(Complex64::new(1.0, 0.0), |acc, c| {
                Ok(acc * engine.evaluate(s * c.mu.exp(), c.sigma, order)?)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let table_engine = if m.len() > 1 { Engine::Product } else { engine };
    Ok(TransformTable { axis, grid: grid.to_vec(), values, engine: table_engine, factor_engine: engine })
}
