use crate::error::{Error, Result};
use crate::forward::{cumulants, log_chf, transform_product, Axis, CumulantCurve, Engine};
use crate::invert::piecewise::COVERAGE_ENVELOPE;
use crate::invert::SegmentPlan;
use crate::model::SumModel;

use super::{build_segment_plan, fit_exponential_sum, node_intervals, FitReport};

pub const CURVE_POINTS_PER_DECADE: usize = 160;
pub const FIT_SAMPLES: usize = 128;
const CURVE_START: f64 = 1e-4;
const MAX_DECADES: i32 = 14;

/// Cumulant curve of the model on a log grid from `1e-4` to a decade where
/// the envelope has dropped below a tenth of the segmentation threshold.
pub fn model_curve(m: &SumModel) -> Result<CumulantCurve> {
    let stop = (0.1 * COVERAGE_ENVELOPE).ln();
    let mut decades = 1;
    loop {
        let w = CURVE_START * 10f64.powi(decades);
        if log_chf(m, w)?.re < stop {
            break;
        }
        decades += 1;
        if decades > MAX_DECADES {
            return Err(Error::Coverage(format!("envelope stays above {} up to omega = {w}", 0.1 * COVERAGE_ENVELOPE)));
        }
    }
    let n = decades as usize * CURVE_POINTS_PER_DECADE + 1;
    let ln_lo = CURVE_START.ln();
    let step = std::f64::consts::LN_10 * decades as f64 / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| (ln_lo + step * i as f64).exp()).collect();
    grid[0] = CURVE_START;
    cumulants(m, &grid)
}

/// Segment plan with `n_segments` equal-activity segments for the model.
pub fn model_segment_plan(m: &SumModel, n_segments: usize) -> Result<SegmentPlan> {
    build_segment_plan(&model_curve(m)?, n_segments)
}

/// `K`-term exponential-sum fit to the model's CHF, sampled at
/// [`FIT_SAMPLES`] activity-spaced frequencies and seeded at `K` interior
/// activity quantiles.
pub fn fit_model(m: &SumModel, k: usize) -> Result<FitReport> {
    let curve = model_curve(m)?;
    let omegas = node_intervals(&curve, FIT_SAMPLES.max(4 * k))?;
    let samples = transform_product(m, &omegas, Axis::ImaginaryOmega, Engine::ReducedRange)?;
    let seeds = node_intervals(&curve, k + 1)?;
    fit_exponential_sum(&samples, &seeds[..k], k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invert::expint_piecewise_cdf;
    use crate::model::LognormalComponent;

    #[test]
    fn curve_reaches_decay() {
        let m = SumModel::single(LognormalComponent::standard(1.0).unwrap());
        let c = model_curve(&m).unwrap();
        assert_eq!(c.omegas[0], CURVE_START);
        assert!(*c.x1.last().unwrap() < COVERAGE_ENVELOPE.ln());
    }

    #[test]
    fn three_component_plan_is_monotone() {
        let m = SumModel::from_params(&[0.0, 0.3, -0.2], &[0.5, 1.0, 1.5]).unwrap();
        let plan = model_segment_plan(&m, 4).unwrap();
        let mut prev = 0.0;
        for i in 1..=200 {
            let x = 0.5 * i as f64;
            let f = expint_piecewise_cdf(&plan, x).unwrap();
            assert!(f >= prev - 1e-3, "x = {x}: {f} < {prev}");
            prev = f;
        }
        assert!(prev >= 0.99, "{prev}");
    }
}
