use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::CumulantCurve;
use crate::invert::piecewise::COVERAGE_ENVELOPE;
use crate::invert::{Segment, SegmentPlan, Tail};
use crate::quad::{integrate, QuadConfig};

pub const DEFAULT_CORRECTION_TERMS: usize = 8;

/// Envelope level that ends the node range of [`node_intervals`].
pub const NODE_ENVELOPE: f64 = 1e-3;

/// Activity rate `√(a1² + b1²)` at every grid point.
pub fn activity_rate(curve: &CumulantCurve) -> Vec<f64> {
    curve.a1.iter().zip(&curve.b1).map(|(a, b)| a.hypot(*b)).collect()
}

/// Cumulative activity from the origin to each grid point (trapezoid, with
/// the first stretch `[0, ω_0]` taken at the first rate).
pub fn cumulative_activity(curve: &CumulantCurve) -> Vec<f64> {
    let rate = activity_rate(curve);
    let mut acc = Vec::with_capacity(rate.len());
    let mut total = 0.0;
    for i in 0..rate.len() {
        total += if i == 0 {
            rate[0] * curve.omegas[0]
        } else {
            0.5 * (rate[i] + rate[i - 1]) * (curve.omegas[i] - curve.omegas[i - 1])
        };
        acc.push(total);
    }
    acc
}

fn check_curve(curve: &CumulantCurve) -> Result<()> {
    if curve.len() < 2 {
        return Err(Error::invalid("cumulant curve needs at least two points"));
    }
    if !(curve.omegas[0] > 0.0) {
        return Err(Error::invalid("cumulant curve must start above zero"));
    }
    Ok(())
}

/// Index of the first grid point whose envelope `exp(X1)` falls below `level`.
fn decay_index(curve: &CumulantCurve, level: f64) -> Option<usize> {
    let ln = level.ln();
    curve.x1.iter().position(|&x| x < ln)
}

/// Splits `[0, ω_m]` into `n_segments` stretches of equal activity, with
/// boundaries on grid points. `ω_m` is the first grid point where the
/// envelope drops below `1e-4`; beyond it a linear tail uses the local slopes.
pub fn build_segment_plan(curve: &CumulantCurve, n_segments: usize) -> Result<SegmentPlan> {
    build_segment_plan_with(curve, n_segments, DEFAULT_CORRECTION_TERMS)
}

pub fn build_segment_plan_with(curve: &CumulantCurve, n_segments: usize, corrections: usize) -> Result<SegmentPlan> {
    check_curve(curve)?;
    if n_segments < 2 {
        return Err(Error::invalid("at least two segments are required"));
    }
    let m = decay_index(curve, COVERAGE_ENVELOPE).ok_or_else(|| {
        Error::Coverage(format!(
            "envelope stays above {COVERAGE_ENVELOPE} up to omega = {}",
            curve.omegas[curve.len() - 1]
        ))
    })?;
    if m < n_segments {
        return Err(Error::Coverage(format!("only {m} grid points before the envelope decays")));
    }
    let cum = cumulative_activity(curve);
    let total = cum[m];

    // Boundary grid indices, strictly increasing and ending at m.
    let mut ends = Vec::with_capacity(n_segments);
    let mut prev: Option<usize> = None;
    for j in 1..n_segments {
        let target = total * j as f64 / n_segments as f64;
        let k = cum[..=m].partition_point(|&c| c < target).min(m);
        let k = if k > 0 && (target - cum[k - 1]) < (cum[k] - target) { k - 1 } else { k };
        let lo = prev.map_or(0, |p| p + 1);
        let hi = m - (n_segments - j);
        let k = k.clamp(lo, hi);
        ends.push(k);
        prev = Some(k);
    }
    ends.push(m);

    let mut segments = Vec::with_capacity(n_segments);
    let (mut w_lo, mut x_lo) = (0.0, Complex64::new(0.0, 0.0));
    for &k in &ends {
        let w_hi = curve.omegas[k];
        let x_hi = curve.cumulant(k);
        let slope = (x_hi - x_lo) / (w_hi - w_lo);
        let mut seg = Segment::new(w_lo, w_hi, (-slope.re).max(0.0), slope.im, x_lo);
        seg.correction = correction_coefficients(curve, &seg, corrections)?;
        segments.push(seg);
        w_lo = w_hi;
        x_lo = x_hi;
    }
    let tail = Tail { omega_m: curve.omegas[m], a_m: curve.a1[m].max(0.0), b_m: curve.b1[m], x_m: curve.cumulant(m) };
    let plan = SegmentPlan { segments, tail };
    plan.validate()?;
    Ok(plan)
}

/// Sine coefficients of `exp(X(ω) − X_lin(ω)) − 1` over the segment, where
/// `X_lin` is the segment's linear cumulant.
fn correction_coefficients(curve: &CumulantCurve, seg: &Segment, terms: usize) -> Result<Vec<Complex64>> {
    let len = seg.len();
    let slope = Complex64::new(-seg.a, seg.b);
    let residual = |t: f64| -> Complex64 {
        let w = seg.omega_lo + t;
        let x = curve.interpolate(w.min(seg.omega_hi)).unwrap_or(seg.x_lo);
        (x - seg.x_lo - slope * t).exp() - 1.0
    };
    let cfg = QuadConfig::with_tol(1e-12, 1e-9);
    (1..=terms)
        .map(|k| {
            let nu = std::f64::consts::PI * k as f64 / len;
            let r = integrate(|t: f64| residual(t) * (nu * t).sin(), 0.0, len, cfg)?;
            Ok(r.value * (2.0 / len))
        })
        .collect()
}

/// `target_count` frequencies with local spacing proportional to
/// `1/√(a1² + b1²)`: equal steps of cumulative activity from the origin to
/// where the envelope falls below `1e-3` (or the end of the curve).
pub fn node_intervals(curve: &CumulantCurve, target_count: usize) -> Result<Vec<f64>> {
    check_curve(curve)?;
    if target_count == 0 {
        return Ok(Vec::new());
    }
    let end = decay_index(curve, NODE_ENVELOPE).unwrap_or(curve.len() - 1);
    let cum = cumulative_activity(curve);
    let total = cum[end];
    if !(total > 0.0) {
        return Err(Error::domain("cumulant curve has no activity"));
    }
    let nodes = (1..=target_count)
        .map(|j| {
            let target = total * j as f64 / target_count as f64;
            if target <= cum[0] {
                return curve.omegas[0] * target / cum[0];
            }
            let i = cum[..=end].partition_point(|&c| c < target).clamp(1, end);
            let (c0, c1) = (cum[i - 1], cum[i]);
            let t = if c1 > c0 { (target - c0) / (c1 - c0) } else { 1.0 };
            curve.omegas[i - 1] + t * (curve.omegas[i] - curve.omegas[i - 1])
        })
        .collect();
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::cumulants;
    use crate::model::{LognormalComponent, SumModel};

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let (l, h) = (lo.ln(), hi.ln());
        let mut g: Vec<f64> = (0..n).map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp()).collect();
        g[0] = lo;
        g
    }

    fn lognormal_curve(sigma: f64, n: usize) -> CumulantCurve {
        let m = SumModel::single(LognormalComponent::standard(sigma).unwrap());
        cumulants(&m, &grid(1e-4, 1e3, n)).unwrap()
    }

    fn linear_curve(a: f64, b: f64, omegas: Vec<f64>) -> CumulantCurve {
        let n = omegas.len();
        CumulantCurve {
            x1: omegas.iter().map(|w| -a * w).collect(),
            x2: omegas.iter().map(|w| b * w).collect(),
            a1: vec![a; n],
            b1: vec![b; n],
            a2: vec![0.0; n],
            b2: vec![0.0; n],
            omegas,
        }
    }

    #[test]
    fn equal_activity_shares() {
        let curve = lognormal_curve(1.0, 800);
        let plan = build_segment_plan(&curve, 4).unwrap();
        assert_eq!(plan.segments.len(), 4);
        let cum = cumulative_activity(&curve);
        let at = |w: f64| {
            if w == 0.0 {
                0.0
            } else {
                cum[curve.omegas.iter().position(|&o| o == w).unwrap()]
            }
        };
        let total = at(plan.tail.omega_m);
        for s in &plan.segments {
            let share = (at(s.omega_hi) - at(s.omega_lo)) / total;
            assert!((share - 0.25).abs() < 0.3 * 0.25, "share {share}");
        }
        assert!((plan.tail.x_m.re.exp() - 1e-4).abs() < 1e-4);
    }

    #[test]
    fn refinement_nests() {
        let curve = lognormal_curve(1.0, 800);
        let two = build_segment_plan(&curve, 2).unwrap();
        let four = build_segment_plan(&curve, 4).unwrap();
        let idx = |w: f64| curve.omegas.iter().position(|&o| o == w).unwrap() as i64;
        for s in &two.segments[..1] {
            let b = idx(s.omega_hi);
            assert!(four.segments.iter().any(|t| (idx(t.omega_hi) - b).abs() <= 1));
        }
    }

    #[test]
    fn low_frequencies_get_the_narrowest_segment() {
        let m = SumModel::single(LognormalComponent::standard(2.0).unwrap());
        let curve = cumulants(&m, &grid(1e-4, 1e6, 1500)).unwrap();
        let plan = build_segment_plan(&curve, 4).unwrap();
        let first = plan.segments[0].len();
        let last = plan.segments[3].len();
        assert!(first < last, "{first} vs {last}");
    }

    #[test]
    fn chord_slopes_are_continuous() {
        let curve = lognormal_curve(1.0, 600);
        let plan = build_segment_plan(&curve, 5).unwrap();
        for w in plan.segments.windows(2) {
            let end = w[0].x_lo + Complex64::new(-w[0].a, w[0].b) * w[0].len();
            assert!((end - w[1].x_lo).norm() < 1e-9);
        }
    }

    #[test]
    fn insufficient_decay_is_reported() {
        let curve = linear_curve(1e-3, 1.0, grid(1e-4, 10.0, 200));
        assert!(matches!(build_segment_plan(&curve, 2), Err(Error::Coverage(_))));
        assert!(build_segment_plan(&lognormal_curve(1.0, 200), 1).is_err());
    }

    #[test]
    fn linear_curve_needs_no_correction() {
        let curve = linear_curve(0.5, 2.0, grid(1e-4, 100.0, 400));
        let plan = build_segment_plan(&curve, 3).unwrap();
        for s in &plan.segments {
            assert!((s.a - 0.5).abs() < 1e-12 && (s.b - 2.0).abs() < 1e-12);
            assert!(s.correction.iter().all(|c| c.norm() < 1e-9));
        }
    }

    #[test]
    fn constant_rate_gives_uniform_nodes() {
        let curve = linear_curve(0.3, 0.4, (1..=1000).map(|i| i as f64 * 1e-2).collect());
        let nodes = node_intervals(&curve, 20).unwrap();
        let step = nodes[1] - nodes[0];
        for w in nodes.windows(2) {
            assert!(((w[1] - w[0]) - step).abs() < 1e-9);
        }
        assert!((nodes[19] - 10.0).abs() < 1e-9);
    }

    #[test]
    fn doubling_the_rate_halves_the_interval() {
        let omegas: Vec<f64> = (1..=2000).map(|i| i as f64 * 1e-2).collect();
        let mut curve = linear_curve(0.0, 1.0, omegas.clone());
        for (i, &w) in omegas.iter().enumerate() {
            if w > 10.0 {
                curve.b1[i] = 2.0;
            }
        }
        let nodes = node_intervals(&curve, 30).unwrap();
        let low = nodes[2] - nodes[1];
        let high = nodes[28] - nodes[27];
        assert!((low / high - 2.0).abs() < 1e-6, "{low} {high}");
    }

    #[test]
    fn nodes_cluster_at_low_frequency() {
        let curve = lognormal_curve(1.0, 800);
        let nodes = node_intervals(&curve, 64).unwrap();
        let spacing_near = |w: f64| {
            let i = nodes.partition_point(|&n| n < w).clamp(1, nodes.len() - 1);
            nodes[i] - nodes[i - 1]
        };
        let rate = activity_rate(&curve);
        let at = |w: f64| rate[curve.omegas.partition_point(|&o| o < w)];
        assert!(at(0.01) > at(10.0));
        assert!(spacing_near(0.01) < spacing_near(10.0));
    }
}
