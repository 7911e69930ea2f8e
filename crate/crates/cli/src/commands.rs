use std::time::Instant;

use lnsum_core::forward::{
    chf_reduced, cumulants, mgf_derivative_reduced, mgf_split, transform_product_with, DEFAULT_ORDER,
};
use lnsum_core::invert::{expint_piecewise_cdf, DaviesConfig, DaviesTable};
use lnsum_core::model::{empirical_cdf, ks_distance_on_grid, sample_sum};
use lnsum_core::segfit::{fit_model, model_curve, build_segment_plan};
use lnsum_core::{Axis, Engine, LognormalComponent, SumModel};

use crate::config::{config, CliResult, GridSpec};
use crate::methods::{evaluate, Method, MethodParams, DEFAULT_ARCTAN_TERMS, DEFAULT_SEGMENTS};
use crate::output::{num, opt, Table};

pub const FIGURE_SIGMAS: [f64; 3] = [0.5, 1.0, 2.0];
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
/// Relative differences are only taken where the reference magnitude reaches this.
pub const REL_DIFF_FLOOR: f64 = 1e-8;

fn single(m: &SumModel) -> Option<LognormalComponent> {
    (m.len() == 1).then(|| m.components[0])
}

fn grid_name(axis: Axis) -> &'static str {
    match axis {
        Axis::RealS => "s",
        Axis::ImaginaryOmega => "omega",
    }
}

/// One engine: `s,re,im,engine`. Several engines: a pair of columns per
/// engine and the pairwise maximum relative difference in the footer.
pub fn transform(m: &SumModel, grid: &[f64], axis: Axis, engines: &[Engine], order: usize) -> CliResult<Table> {
    let tables = engines
        .iter()
        .map(|&e| transform_product_with(m, grid, axis, e, order))
        .collect::<lnsum_core::Result<Vec<_>>>()?;
    if let [t] = tables.as_slice() {
        let mut out = Table::new([grid_name(axis), "re", "im", "engine"]);
        for (g, v) in t.grid.iter().zip(&t.values) {
            out.push(vec![num(*g), num(v.re), num(v.im), engines[0].name().to_string()]);
        }
        return Ok(out);
    }
    let mut header = vec![grid_name(axis).to_string()];
    for e in engines {
        header.push(format!("{}_re", e.name()));
        header.push(format!("{}_im", e.name()));
    }
    let mut out = Table::new(header);
    for (i, g) in grid.iter().enumerate() {
        let mut row = vec![*g];
        for t in &tables {
            row.push(t.values[i].re);
            row.push(t.values[i].im);
        }
        out.push_nums(&row);
    }
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            let (mut abs, mut rel) = (0.0f64, 0.0f64);
            for (a, b) in tables[i].values.iter().zip(&tables[j].values) {
                abs = abs.max((a - b).norm());
                if b.norm() >= REL_DIFF_FLOOR {
                    rel = rel.max((a - b).norm() / b.norm());
                }
            }
            let pair = format!("{} vs {}", engines[i].name(), engines[j].name());
            out.note(format!("max_abs_diff {pair}"), abs);
            out.note(format!("max_rel_diff {pair}"), rel);
        }
    }
    Ok(out)
}

/// `x,cdf,pdf,cdf_raw`: clamped CDF, density where the method has one, and
/// the unclamped CDF.
pub fn invert(m: &SumModel, xs: &[f64], method: Method, params: MethodParams) -> CliResult<Table> {
    let e = evaluate(method, m, xs, params)?;
    let mut out = Table::new(["x", "cdf", "pdf", "cdf_raw"]);
    for (i, &x) in xs.iter().enumerate() {
        let raw = e.cdf_raw[i];
        out.push(vec![num(x), num(raw.clamp(0.0, 1.0)), opt(e.pdf.as_ref().map(|p| p[i])), num(raw)]);
    }
    out.note("method", method);
    for (k, v) in e.notes {
        out.note(k, v);
    }
    if let Some(c) = single(m) {
        let mut cdf_err = 0.0f64;
        let mut pdf_err = 0.0f64;
        for (i, &x) in xs.iter().enumerate() {
            cdf_err = cdf_err.max((e.cdf_raw[i].clamp(0.0, 1.0) - c.cdf(x)?).abs());
            if let Some(p) = &e.pdf {
                let want = c.pdf(x)?;
                if want > 1e-12 {
                    pdf_err = pdf_err.max((p[i] - want).abs() / want);
                }
            }
        }
        out.note("max_abs_cdf_error", cdf_err);
        if e.pdf.is_some() {
            out.note("max_rel_pdf_error", pdf_err);
        }
    }
    Ok(out)
}

/// Per-method errors against the closed form (one component) or a Monte
/// Carlo empirical CDF (sums). Wall times go to the footer.
pub fn compare(
    m: &SumModel,
    xs: &[f64],
    methods: &[Method],
    params: MethodParams,
    samples: usize,
    seed: u64,
) -> CliResult<Table> {
    if methods.len() < 2 {
        return Err(config("compare needs at least two methods"));
    }
    let reference: Vec<f64>;
    let mut sorted = Vec::new();
    let mut out = Table::new(["method", "max_abs_error", "mean_abs_error", "ks_distance"]);
    match single(m) {
        Some(c) => {
            reference = xs.iter().map(|&x| c.cdf(x)).collect::<lnsum_core::Result<_>>()?;
            out.note("reference", "closed_form");
        }
        None => {
            if samples == 0 {
                return Err(config("Monte Carlo reference needs at least one sample"));
            }
            sorted = sample_sum(m, samples, seed);
            sorted.sort_by(f64::total_cmp);
            reference = xs.iter().map(|&x| empirical_cdf(&sorted, x)).collect();
            out.note("reference", format!("monte_carlo n={samples} seed={seed}"));
        }
    }
    let mut timings = Vec::new();
    for &method in methods {
        let start = Instant::now();
        let e = evaluate(method, m, xs, params)?;
        timings.push((method, start.elapsed().as_secs_f64()));
        let cdf: Vec<f64> = e.cdf_raw.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let errors: Vec<f64> = cdf.iter().zip(&reference).map(|(a, b)| (a - b).abs()).collect();
        let max = errors.iter().copied().fold(0.0, f64::max);
        let mean = errors.iter().sum::<f64>() / errors.len() as f64;
        let ks = if sorted.is_empty() { max } else { ks_distance_on_grid(&sorted, xs, &cdf) };
        out.push(vec![method.to_string(), num(max), num(mean), num(ks)]);
    }
    for (method, secs) in timings {
        out.note(format!("seconds {method}"), secs);
    }
    Ok(out)
}

/// Abscissa of the first sign change of `a − b`, by linear interpolation.
fn crossing(grid: &[f64], a: &[f64], b: &[f64]) -> Option<f64> {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    (1..d.len()).find(|&i| d[i - 1].signum() != d[i].signum() && d[i - 1] != 0.0).map(|i| {
        let t = d[i - 1] / (d[i - 1] - d[i]);
        grid[i - 1] + t * (grid[i] - grid[i - 1])
    })
}

fn note_crossings(out: &mut Table, label: &str, grid: &[f64], curves: &[Vec<f64>]) {
    for i in 0..curves.len() {
        for j in i + 1..curves.len() {
            let key = format!("{label} sigma {} vs {}", FIGURE_SIGMAS[i], FIGURE_SIGMAS[j]);
            out.note(key, crossing(grid, &curves[i], &curves[j]).map_or("none".to_string(), |c| c.to_string()));
        }
    }
}

pub fn default_grid(id: u8) -> GridSpec {
    match id {
        1 | 3 => GridSpec { min: 0.01, max: 20.0, count: 200, log: true },
        2 => GridSpec { min: 0.0, max: 20.0, count: 401, log: false },
        4 => GridSpec { min: 1e-4, max: 100.0, count: 481, log: true },
        _ => GridSpec { min: 0.1, max: 50.0, count: 200, log: true },
    }
}

/// Plot-ready columns for figure `id`.
pub fn figure(id: u8, grid: Option<GridSpec>, order: usize, params: MethodParams) -> CliResult<Table> {
    if !(1..=6).contains(&id) {
        return Err(config(format!("figure id must be 1..6, got {id}")));
    }
    let g = grid.unwrap_or_else(|| default_grid(id)).points()?;
    let components: Vec<SumModel> = FIGURE_SIGMAS
        .iter()
        .map(|&s| SumModel::single(LognormalComponent::standard(s).expect("positive sigma")))
        .collect();
    let mut out;
    match id {
        1 => {
            let mut header = vec!["s".to_string()];
            for s in FIGURE_SIGMAS {
                header.extend([format!("m_{s}"), format!("m1_{s}"), format!("m2_{s}")]);
            }
            out = Table::new(header);
            let mut curves = vec![Vec::new(); 3];
            for &s in &g {
                let mut row = vec![s];
                for (i, sigma) in FIGURE_SIGMAS.iter().enumerate() {
                    let (m1, m2) = mgf_split(s, *sigma, order)?;
                    row.extend([m1 + m2, m1, m2]);
                    curves[i].push(m1 + m2);
                }
                out.push_nums(&row);
            }
            note_crossings(&mut out, "mgf crossing", &g, &curves);
        }
        2 => {
            let mut header = vec!["omega".to_string()];
            for s in FIGURE_SIGMAS {
                header.extend([format!("re_{s}"), format!("im_{s}")]);
            }
            out = Table::new(header);
            for &w in &g {
                let mut row = vec![w];
                for sigma in FIGURE_SIGMAS {
                    let v = chf_reduced(w, sigma)?;
                    row.extend([v.re, v.im]);
                }
                out.push_nums(&row);
            }
        }
        3 => {
            let mut header = vec!["s".to_string()];
            for s in FIGURE_SIGMAS {
                header.extend((1..=4).map(|n| format!("d{n}_{s}")));
            }
            out = Table::new(header);
            for &s in &g {
                let mut row = vec![s];
                for sigma in FIGURE_SIGMAS {
                    for n in 1..=4 {
                        row.push(mgf_derivative_reduced(s, sigma, n)?);
                    }
                }
                out.push_nums(&row);
            }
        }
        4 => {
            let mut header = vec!["omega".to_string()];
            for s in FIGURE_SIGMAS {
                header.extend([format!("x1_{s}"), format!("x2_{s}")]);
            }
            out = Table::new(header);
            let curves = components.iter().map(|m| cumulants(m, &g)).collect::<lnsum_core::Result<Vec<_>>>()?;
            for (i, &w) in g.iter().enumerate() {
                let mut row = vec![w];
                for c in &curves {
                    row.extend([c.x1[i], c.x2[i]]);
                }
                out.push_nums(&row);
            }
            let envelopes: Vec<Vec<f64>> = curves.iter().map(|c| c.x1.clone()).collect();
            note_crossings(&mut out, "envelope crossing", &g, &envelopes);
        }
        5 => {
            let m = SumModel::from_params(&[0.0, 0.3, -0.2], &[0.5, 1.0, 1.5])?;
            let table = DaviesTable::for_model(&m, g[0].max(1e-3), g[g.len() - 1], DaviesConfig::default())?;
            let curve = model_curve(&m)?;
            let four = params.segments.unwrap_or(DEFAULT_SEGMENTS);
            let plans = [build_segment_plan(&curve, 2)?, build_segment_plan(&curve, four)?];
            out = Table::new(["x".to_string(), "davies".into(), "piecewise_2".into(), format!("piecewise_{four}")]);
            let (mut lo, mut hi) = (f64::NAN, f64::NAN);
            let mut worst = 0.0f64;
            for &x in &g {
                let d = table.cdf(x);
                let p2 = expint_piecewise_cdf(&plans[0], x)?;
                let p4 = expint_piecewise_cdf(&plans[1], x)?;
                if (0.05..=0.95).contains(&d) {
                    worst = worst.max((p4 - d).abs());
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
                out.push_nums(&[x, d, p2, p4]);
            }
            out.note("central_90_range", format!("[{lo}, {hi}]"));
            out.note(format!("max_abs_diff piecewise_{four} vs davies (central 90%)"), worst);
        }
        _ => {
            let c = LognormalComponent::standard(2.0)?;
            let k = params.k.unwrap_or(DEFAULT_ARCTAN_TERMS);
            let fit = fit_model(&SumModel::single(c), k)?;
            out = Table::new(["x", "theoretical", "arctan_sum", "difference"]);
            let mut worst = 0.0f64;
            for &x in &g {
                let (f, a) = (c.cdf(x)?, fit.mixture.cdf(x));
                worst = worst.max((a - f).abs());
                out.push_nums(&[x, f, a, a - f]);
            }
            out.note("terms", fit.mixture.terms.len());
            out.note("max_abs_difference", worst);
        }
    }
    out.note("figure", id);
    Ok(out)
}

/// Segment plan rows (`segment`, `tail`) followed by fitted mixture terms.
pub fn segments(m: &SumModel, n_segments: usize, k: usize) -> CliResult<Table> {
    let curve = model_curve(m)?;
    let plan = build_segment_plan(&curve, n_segments)?;
    let fit = fit_model(m, k)?;
    let mut out = Table::new(["kind", "index", "omega_lo", "omega_hi", "a", "b", "weight", "x_re", "x_im"]);
    for (i, s) in plan.segments.iter().enumerate() {
        out.push(vec![
            "segment".into(),
            i.to_string(),
            num(s.omega_lo),
            num(s.omega_hi),
            num(s.a),
            num(s.b),
            String::new(),
            num(s.x_lo.re),
            num(s.x_lo.im),
        ]);
    }
    let t = plan.tail;
    out.push(vec![
        "tail".into(),
        "0".into(),
        num(t.omega_m),
        String::new(),
        num(t.a_m),
        num(t.b_m),
        String::new(),
        num(t.x_m.re),
        num(t.x_m.im),
    ]);
    for (i, term) in fit.mixture.terms.iter().enumerate() {
        out.push(vec![
            "term".into(),
            i.to_string(),
            String::new(),
            String::new(),
            num(term.a),
            num(term.b),
            num(term.weight),
            String::new(),
            String::new(),
        ]);
    }
    out.note("chf_max_error", fit.max_error);
    out.note("fit_converged", fit.converged);
    Ok(out)
}

pub fn mc(m: &SumModel, n: usize, seed: u64) -> CliResult<Table> {
    if n == 0 {
        return Err(config("sample count must be positive"));
    }
    let draws = sample_sum(m, n, seed);
    let mut out = Table::new(["x"]);
    for &x in &draws {
        out.push_nums(&[x]);
    }
    out.note("seed", seed);
    out.note("sample_mean", draws.iter().sum::<f64>() / n as f64);
    out.note("model_mean", m.mean());
    Ok(out)
}

pub fn default_order() -> usize {
    DEFAULT_ORDER
}
