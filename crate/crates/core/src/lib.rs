//! The geodesic Normal distribution on the circle.
//!
//! ```
//! use geonorm::estimation::{asymptotic_ci, fit_gn_mle};
//! use geonorm::gn::{intrinsic_variance, trig_moment, GnParams};
//! use geonorm::{Angle, RngStream};
//!
//! let params = GnParams::new(Angle::new(2.356)?, 1.0)?;
//! let sample = params.sample(500, &mut RngStream::new(42));
//! let fit = fit_gn_mle(&sample)?;
//! let ci = asymptotic_ci(&fit, fit.n, 0.95)?;
//! assert!(ci.contains_mu(params.mu()));
//! let phi2 = trig_moment(2, &params)?;
//! assert!(phi2.resultant_length < trig_moment(1, &params)?.resultant_length);
//! assert!(intrinsic_variance(1.0)? < std::f64::consts::PI.powi(2) / 3.0);
//! # Ok::<(), geonorm::Error>(())
//! ```

pub mod circle;
pub mod error;
pub mod estimation;
pub mod gn;
pub mod rng;
pub mod special;
pub mod study;
pub mod vm;

pub use circle::{canonicalize, geodesic_distance, signed_displacement, Angle};
pub use error::{Error, Result};
pub use estimation::{AsymptoticCi, CircularSummary, MleFit};
pub use gn::{GnParams, TrigMoment};
pub use rng::RngStream;
pub use study::{CltSummary, MseSummary};
pub use vm::VmParams;
