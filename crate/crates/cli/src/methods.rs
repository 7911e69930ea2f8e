//! Inversion methods addressable by name from the command line.

use std::fmt;
use std::str::FromStr;

use lnsum_core::forward::{Integrated, ModelTransform, Transform};
use lnsum_core::invert::{
    expint_piecewise_cdf_checked, fourier_series_invert, gauss_quadrature_cdf, gauss_quadrature_invert,
    gaver_stehfest, gaver_stehfest_cdf, gil_pelaez_cdf, pade_nodes, post_widder, series_defaults, zakian_nodes,
    DaviesConfig, DaviesTable, SeriesVariant, DEFAULT_SERIES_TERMS,
};
use lnsum_core::segfit::{fit_model, model_segment_plan};
use lnsum_core::{Engine, SumModel};

use crate::config::{config, CliError, CliResult};

pub const DEFAULT_STEHFEST_ORDER: usize = 12;
pub const DEFAULT_PADE_ORDER: usize = 16;
pub const DEFAULT_ZAKIAN_ORDER: usize = 5;
pub const DEFAULT_POST_WIDDER_ORDER: usize = 20;
pub const DEFAULT_ARCTAN_TERMS: usize = 8;
pub const DEFAULT_SEGMENTS: usize = 4;
pub const DEFAULT_DAVIES_TERMS: usize = 2000;
/// `c·L` for the CDF series. Aliasing falls like `e^{-c·L}` while truncation
/// error is amplified by `e^{c·x}`.
pub const CDF_DAMPING: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Davies,
    GilPelaez,
    Gaver,
    Pade,
    Zakian,
    Fourier,
    PostWidder,
    Arctan,
    Piecewise,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Davies => "davies",
            Method::GilPelaez => "gil_pelaez",
            Method::Gaver => "gaver",
            Method::Pade => "gauss_quadrature",
            Method::Zakian => "zakian",
            Method::Fourier => "fourier",
            Method::PostWidder => "post_widder",
            Method::Arctan => "arctan",
            Method::Piecewise => "piecewise",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        Ok(match s.trim() {
            "davies" => Method::Davies,
            "gil_pelaez" | "gil-pelaez" => Method::GilPelaez,
            "gaver" | "stehfest" | "gaver_stehfest" => Method::Gaver,
            "gauss_quadrature" | "gauss-quadrature" | "pade" => Method::Pade,
            "zakian" => Method::Zakian,
            "fourier" => Method::Fourier,
            "post_widder" | "post-widder" => Method::PostWidder,
            "arctan" => Method::Arctan,
            "piecewise" | "segments" => Method::Piecewise,
            other => return Err(config(format!("unknown method '{other}'"))),
        })
    }
}

/// Optional numeric overrides shared by the methods.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MethodParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub c: Option<f64>,
    pub l: Option<f64>,
    pub d: Option<f64>,
    pub segments: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub cdf_raw: Vec<f64>,
    pub pdf: Option<Vec<f64>>,
    pub notes: Vec<(String, String)>,
}

fn each<F: FnMut(f64) -> lnsum_core::Result<f64>>(xs: &[f64], f: F) -> CliResult<Vec<f64>> {
    Ok(xs.iter().copied().map(f).collect::<lnsum_core::Result<Vec<f64>>>()?)
}

pub fn evaluate(method: Method, m: &SumModel, xs: &[f64], p: MethodParams) -> CliResult<Evaluation> {
    if xs.iter().any(|&x| !(x >= 0.0)) {
        return Err(config("inversion abscissas must be nonnegative"));
    }
    let t = ModelTransform::new(m.clone(), Engine::ReducedRange);
    let positive = |xs: &[f64]| xs.iter().copied().filter(|&x| x > 0.0).fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().copied().fold(0.0, f64::max);
    let mut notes = Vec::new();
    let mut note = |k: &str, v: String| notes.push((k.to_string(), v));
    let (cdf_raw, pdf) = match method {
        Method::Davies => {
            let table = match p.d {
                Some(d) => DaviesTable::new(|w| t.chf(w), d, p.k.unwrap_or(DEFAULT_DAVIES_TERMS))?,
                None => {
                    let x_min = positive(xs).min(x_max.max(1e-3));
                    DaviesTable::for_model(m, x_min.max(1e-6), x_max.max(x_min), DaviesConfig::default())?
                }
            };
            note("davies_terms", table.len().to_string());
            note("davies_spacing", table.d.to_string());
            (xs.iter().map(|&x| table.cdf_raw(x)).collect(), None)
        }
        Method::GilPelaez => (each(xs, |x| gil_pelaez_cdf(|w| t.chf(w), x))?, None),
        Method::Gaver => {
            let n = p.n.unwrap_or(DEFAULT_STEHFEST_ORDER);
            note("N", n.to_string());
            (each(xs, |x| gaver_stehfest_cdf(&t, x, n))?, Some(each(xs, |x| gaver_stehfest(&t, x, n))?))
        }
        Method::Pade => {
            let n = p.n.unwrap_or(DEFAULT_PADE_ORDER);
            let nodes = pade_nodes(n)?;
            note("N", n.to_string());
            (
                each(xs, |x| gauss_quadrature_cdf(&t, x, &nodes))?,
                Some(each(xs, |x| gauss_quadrature_invert(&t, x, &nodes, 0))?),
            )
        }
        Method::Zakian => {
            let n = p.n.unwrap_or(DEFAULT_ZAKIAN_ORDER);
            let nodes = zakian_nodes(n)?;
            note("N", n.to_string());
            (each(xs, |x| nodes.cdf(&t, x))?, Some(each(xs, |x| nodes.pdf(&t, x))?))
        }
        Method::Fourier => {
            let (c0, l0) = series_defaults(x_max);
            let l = p.l.unwrap_or(l0);
            let c = p.c.unwrap_or(if p.l.is_some() { 1.0 / l } else { c0 });
            let k = p.k.unwrap_or(DEFAULT_SERIES_TERMS);
            let pdf = fourier_series_invert(&t, xs, c, l, k, SeriesVariant::Cosine)?;
            // The CDF does not decay, so its series needs heavier damping.
            let c_cdf = p.c.unwrap_or(CDF_DAMPING / l);
            let cdf = fourier_series_invert(&Integrated(&t), xs, c_cdf, l, k, SeriesVariant::Cosine)?;
            note("K", k.to_string());
            note("c", c.to_string());
            note("c_cdf", c_cdf.to_string());
            note("L", l.to_string());
            note("aliasing_warnings", pdf.warnings.len().to_string());
            (cdf.values, Some(pdf.values))
        }
        Method::PostWidder => {
            let k = p.k.unwrap_or(DEFAULT_POST_WIDDER_ORDER) as u32;
            note("K", k.to_string());
            let positive_only = |f: &dyn Fn(f64) -> lnsum_core::Result<f64>| {
                each(xs, |x| if x == 0.0 { Ok(0.0) } else { f(x) })
            };
            (
                positive_only(&|x| post_widder(&Integrated(&t), x, k))?,
                Some(positive_only(&|x| post_widder(&t, x, k))?),
            )
        }
        Method::Arctan => {
            let k = p.k.unwrap_or(DEFAULT_ARCTAN_TERMS);
            let fit = fit_model(m, k)?;
            note("K", fit.mixture.terms.len().to_string());
            note("chf_max_error", fit.max_error.to_string());
            note("converged", fit.converged.to_string());
            (xs.iter().map(|&x| fit.mixture.cdf(x)).collect(), Some(xs.iter().map(|&x| fit.mixture.pdf(x)).collect()))
        }
        Method::Piecewise => {
            let n = p.segments.unwrap_or(DEFAULT_SEGMENTS);
            let plan = model_segment_plan(m, n)?;
            let mut warnings = 0;
            let cdf = each(xs, |x| {
                let (v, w) = expint_piecewise_cdf_checked(&plan, x)?;
                warnings += w.len();
                Ok(v)
            })?;
            note("segments", n.to_string());
            note("omega_m", plan.tail.omega_m.to_string());
            note("branch_cut_warnings", warnings.to_string());
            (cdf, None)
        }
    };
    Ok(Evaluation { cdf_raw, pdf, notes })
}
