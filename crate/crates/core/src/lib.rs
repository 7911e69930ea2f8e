//! Moment generating and characteristic functions of sums of independent
//! lognormal variables, and numerical inversion of those transforms back to
//! the CDF and pdf.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: Lambert W, the complex exponential integral, error
//!   functions, log-gamma and Gauss-Hermite rules.
//! * [`model`]: lognormal components, sum models, closed-form pdf/CDF and a
//!   Monte Carlo sampler.
//! * [`forward`]: transform engines on the real `s` axis and the imaginary
//!   `ω` axis, products over a sum model and the cumulant curve.
//! * [`invert`]: Post-Widder, Gaver-Stehfest, Padé-node quadrature, Fourier
//!   series, Gil-Pelaez/Davies, and exponential-integral based inversions.
//! * [`segfit`]: activity-based frequency segmentation and least-squares
//!   fitting of damped exponential sums.

pub mod dd;
pub mod error;
pub mod forward;
pub mod invert;
pub mod model;
pub mod quad;
pub mod segfit;
pub mod specfun;

pub use error::{Error, Result, Warning};
pub use forward::{Axis, CumulantCurve, Engine, TransformTable};
pub use invert::{ArctanMixture, ArctanTerm, InversionNodes, NodeFamily, Segment, SegmentPlan, Tail};
pub use model::{DistributionTable, LognormalComponent, SumModel};
pub use segfit::FitReport;
pub use num_complex::Complex64;
pub use specfun::QuadratureRule;
