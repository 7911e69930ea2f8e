//! Special functions used by the transform engines and inverters.

mod erf;
mod expint;
mod faddeeva;
mod hermite;
mod lambert;

pub use erf::{erf, erfc, gamma_real, ln_gamma_real, log_gamma};
pub use expint::{expint_e1, expint_e1_scaled, near_branch_cut};
pub use faddeeva::{erfcx, faddeeva_w};
pub use hermite::{gauss_hermite, gauss_hermite_cached, QuadratureRule};
pub use lambert::{lambert_saddle, lambert_w0, lambert_w_real};

pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
