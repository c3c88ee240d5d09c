//! Special functions shared by both circular families.

mod bessel;
mod erf;
mod faddeeva;
mod quadrature;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_ratio};
pub use erf::{erf, erfc, norm_cdf, norm_cdf_inv, norm_interval, norm_pdf};
pub use faddeeva::{faddeeva_w, re_erf_complex, scaled_re_erf_complex, PRIMARY_TOLERANCE};
pub use quadrature::{integrate, Quadrature};
