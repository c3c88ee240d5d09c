//! The von Mises law, kept alongside the geodesic Normal for comparison.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::circle::Angle;
use crate::error::{Error, Result};
use crate::estimation::first_moment;
use crate::special::{bessel_i_scaled, bessel_ratio, integrate, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VmParams {
    mu: Angle,
    kappa: f64,
}

impl VmParams {
    pub fn new(mu: Angle, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(VmParams { mu, kappa })
    }

    pub fn mu(&self) -> Angle {
        self.mu
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa >= 0.0 && kappa.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "concentration {kappa} must be non-negative and finite"
        )))
    }
}

pub fn vm_pdf(theta: Angle, params: &VmParams) -> f64 {
    let kappa = params.kappa;
    let i0e = bessel_i_scaled(0, kappa).expect("kappa validated on construction");
    // e^{κ cos x} / I₀(κ) = e^{κ (cos x - 1)} / i0e(κ)
    let c = (theta.value() - params.mu.value()).cos();
    (kappa * (c - 1.0)).exp() / (TAU * i0e)
}

/// Circular variance `1 - I₁(κ)/I₀(κ)`.
pub fn vm_extrinsic_variance(kappa: f64) -> Result<f64> {
    Ok(1.0 - bessel_ratio(kappa)?)
}

/// `E[d(μ, θ)²]`, by quadrature.
pub fn vm_intrinsic_variance(kappa: f64) -> Result<f64> {
    check_kappa(kappa)?;
    if kappa == 0.0 {
        return Ok(PI * PI / 3.0);
    }
    let i0e = bessel_i_scaled(0, kappa)?;
    let q = Quadrature::new(1e-300, 1e-13, 60)?;
    let f = |a: f64| a * a * (kappa * (a.cos() - 1.0)).exp();
    // Most of the mass sits within a few 1/√κ of zero.
    let split = (8.0 / kappa.sqrt()).min(PI);
    let mut total = integrate(f, 0.0, split, &q)?;
    if split < PI {
        total += integrate(f, split, PI, &q)?;
    }
    Ok(2.0 * total / (TAU * i0e))
}

/// Solves `I₁(κ)/I₀(κ) = rho` for `rho ∈ [0, 1)`.
pub fn vm_kappa_from_resultant(rho: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::domain(format!(
            "resultant length {rho} must lie in [0, 1)"
        )));
    }
    if rho == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 2.0 * rho / (1.0 - rho * rho) + 10.0;
    while bessel_ratio(hi)? < rho {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::AccuracyLoss(format!(
                "no concentration reaches resultant length {rho}"
            )));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bessel_ratio(mid)? < rho {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Moment fit: direction of the first sample trigonometric moment and the
/// concentration whose mean resultant length matches the sample's.
pub fn vm_fit_moments(sample: &[Angle]) -> Result<VmParams> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.len() < 2 || sample.iter().all(|t| *t == sample[0]) {
        return Err(Error::DegenerateSample(
            "all observations coincide".to_string(),
        ));
    }
    let (re, im) = first_moment(sample);
    let rho = re.hypot(im);
    if rho <= crate::estimation::RESULTANT_FLOOR {
        return Err(Error::DirectionUndefined);
    }
    if 1.0 - rho <= 1e-14 {
        return Err(Error::DegenerateSample(format!(
            "resultant length {rho} is indistinguishable from one"
        )));
    }
    let kappa = vm_kappa_from_resultant(rho)?;
    VmParams::new(Angle::new(im.atan2(re))?, kappa)
}
