//! Inversion of MGF/CHF samples to densities and distribution functions.

pub mod fourier;
pub mod laplace;
pub mod mixture;
pub mod piecewise;

pub use fourier::{
    davies_cdf, fourier_series_invert, gil_pelaez_cdf, series_defaults, upper_tail_point, DaviesConfig, DaviesTable, Inverted,
    SeriesVariant, CDF_SLACK, DEFAULT_SERIES_TERMS,
};
pub use laplace::{
    der_haar, gauss_quadrature_cdf, gauss_quadrature_invert, gaver_stehfest, gaver_stehfest_cdf, pade_nodes,
    post_widder, stehfest_coefficients, zakian, zakian_nodes, DerHaar, InversionNodes, NodeFamily,
};
pub use mixture::{
    arctan_mixture_cdf, arctan_mixture_pdf, arctan_term_cdf_single, chf_from_cdf, second_order_density,
    second_order_pdf, ArctanMixture, ArctanTerm, ChirpTerm,
};
pub use piecewise::{
    cumulant_cdf, expint_piecewise_cdf, expint_piecewise_cdf_checked, segment_correction, Segment, SegmentPlan, Tail,
};
