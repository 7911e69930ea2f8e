use lnsum_core::forward::{transform_product, CumulantCurve};
use lnsum_core::invert::{arctan_term_cdf_single, DaviesConfig, DaviesTable};
use lnsum_core::segfit::{build_segment_plan, node_intervals, quantile_bracket};
use lnsum_core::{ArctanMixture, ArctanTerm, Axis, Engine, SumModel};
use proptest::prelude::*;

fn mixture(params: &[(f64, f64, f64)]) -> ArctanMixture {
    let total: f64 = params.iter().map(|p| p.0).sum();
    ArctanMixture::new(params.iter().map(|&(w, a, b)| ArctanTerm { weight: w / total, a, b }).collect()).unwrap()
}

fn linear_curve(a: f64, b: f64, hi: f64) -> CumulantCurve {
    let omegas: Vec<f64> = (0..400).map(|i| 1e-4 * (hi / 1e-4f64).powf(i as f64 / 399.0)).collect();
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

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, ..ProptestConfig::default() })]

    #[test]
    fn single_arctan_matches_two_arctan_form(la in -2.0f64..2.0, b in -20.0f64..20.0, lx in -3.0f64..3.0) {
        let a = 10f64.powf(la);
        let x = 10f64.powf(lx);
        let two = ArctanMixture::single(a, b).unwrap().cdf(x);
        prop_assert!((arctan_term_cdf_single(a, b, x) - two).abs() < 1e-12);
    }

    #[test]
    fn mixture_cdf_is_a_distribution(
        params in prop::collection::vec((0.01f64..1.0, 0.01f64..5.0, -10.0f64..10.0), 1..6),
        xs in prop::collection::vec(0.0f64..100.0, 2..30),
    ) {
        let mix = mixture(&params);
        prop_assert_eq!(mix.cdf(0.0), 0.0);
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        let mut prev = 0.0;
        for x in xs {
            let f = mix.cdf(x);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
            prop_assert!(f >= prev - 1e-12);
            prev = f;
        }
        prop_assert!(mix.pdf(0.0).is_finite() && mix.pdf(0.0) > 0.0);
    }

    #[test]
    fn mixture_pdf_is_the_cdf_slope(
        params in prop::collection::vec((0.01f64..1.0, 0.1f64..5.0, -5.0f64..5.0), 1..4),
        x in 0.1f64..20.0,
    ) {
        let mix = mixture(&params);
        let h = 1e-5 * x.max(1.0);
        let fd = (mix.cdf(x + h) - mix.cdf(x - h)) / (2.0 * h);
        prop_assert!((fd - mix.pdf(x)).abs() < 1e-6 * mix.pdf(x).max(1.0));
    }

    #[test]
    fn quantiles_solve_the_single_term_cdf(la in -2.0f64..2.0, b in -10.0f64..10.0) {
        let a = 10f64.powf(la);
        let (x10, x50, x90) = quantile_bracket(a, b).unwrap();
        prop_assert!((x50 - a.hypot(b)).abs() <= 1e-12 * a.hypot(b));
        prop_assert!((arctan_term_cdf_single(a, b, x10) - 0.1).abs() < 1e-12);
        prop_assert!((arctan_term_cdf_single(a, b, x90) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn linear_curve_plans_are_exact(a in 0.05f64..5.0, b in -5.0f64..5.0, n in 2usize..8) {
        let curve = linear_curve(a, b, 40.0 / a);
        let plan = build_segment_plan(&curve, n).unwrap();
        prop_assert!(plan.validate().is_ok());
        prop_assert_eq!(plan.segments.len(), n);
        for s in &plan.segments {
            prop_assert!((s.a - a).abs() < 1e-9 * a.max(1.0));
            prop_assert!((s.b - b).abs() < 1e-9 * b.abs().max(1.0));
        }
        let nodes = node_intervals(&curve, 16).unwrap();
        prop_assert!(nodes.windows(2).all(|w| w[1] > w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn real_axis_tables_are_decreasing_and_bounded(mu in -1.0f64..1.0, sigma in 0.2f64..2.0) {
        let m = SumModel::from_params(&[mu, 0.0], &[sigma, 0.5]).unwrap();
        let grid: Vec<f64> = (0..40).map(|i| 0.01 * 1e4f64.powf(i as f64 / 39.0)).collect();
        let t = transform_product(&m, &grid, Axis::RealS, Engine::ReducedRange).unwrap();
        prop_assert!(t.validate().is_ok());
        prop_assert!(t.values.windows(2).all(|w| w[1].re < w[0].re));
    }

    #[test]
    fn davies_cdf_stays_in_range_and_monotone(mu in -0.5f64..0.5, sigma in 0.3f64..1.2) {
        let m = SumModel::from_params(&[mu], &[sigma]).unwrap();
        let table = DaviesTable::for_model(&m, 0.05, 20.0, DaviesConfig::default()).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for i in 0..120 {
            let x = 0.05 * 400f64.powf(i as f64 / 119.0);
            let raw = table.cdf_raw(x);
            prop_assert!((-5e-3..=1.0 + 5e-3).contains(&raw), "raw {} at {}", raw, x);
            prop_assert!(raw >= prev - 1e-3);
            prev = raw;
        }
    }
}
