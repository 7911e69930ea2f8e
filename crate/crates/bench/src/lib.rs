//! Fixtures shared by the benchmarks.

use lnsum_core::{LognormalComponent, SumModel};

/// Standard lognormal with the given shape.
pub fn standard(sigma: f64) -> SumModel {
    SumModel::single(LognormalComponent::standard(sigma).expect("positive sigma"))
}

/// Three-component sum with unequal shapes and locations.
pub fn three_components() -> SumModel {
    SumModel::from_params(&[0.0, 0.3, -0.2], &[0.5, 1.0, 1.5]).expect("valid parameters")
}

/// `n` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| lo * (step * i as f64).exp()).collect()
}
