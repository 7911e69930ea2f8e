//! Activity-based segmentation of the frequency axis and least-squares
//! fitting of damped exponential sums to CHF samples.

mod fit;
mod pipeline;
mod plan;

pub use fit::{fit_exponential_sum, quantile_bracket, FitReport, GRADIENT_TOL, MAX_EDITS, MAX_ITERATIONS, MIN_WEIGHT};
pub use pipeline::{fit_model, model_curve, model_segment_plan, CURVE_POINTS_PER_DECADE, FIT_SAMPLES};
pub use plan::{
    activity_rate, build_segment_plan, build_segment_plan_with, cumulative_activity, node_intervals,
    DEFAULT_CORRECTION_TERMS, NODE_ENVELOPE,
};
