//! The geodesic Normal law `gN(μ, γ)` on the circle.
//!
//! The density is `k(γ)⁻¹ exp(-γ d(μ, θ)² / 2)` where `d` is arc length and
//! `k(γ) = √(2π/γ) erf(π √(γ/2))`. In the tangent chart at `μ` the signed
//! displacement is a centred Gaussian with standard deviation `1/√γ`
//! truncated to `[-π, π]`, which gives closed forms for everything below.
//! At the cut locus `μ ± π` the density is taken by continuity.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use serde::Serialize;

use crate::circle::{geodesic_distance, Angle};
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::special::{erf, norm_cdf, norm_cdf_inv, norm_interval, norm_pdf, scaled_re_erf_complex};

/// Largest trigonometric order served by [`trig_moment`].
pub const MAX_TRIG_ORDER: u32 = 8;

// Below this value of γπ²/2 the moments come from power series instead of
// closed forms that cancel.
const SERIES_LIMIT: f64 = 1.0;

/// Location and concentration of a geodesic Normal law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GnParams {
    mu: Angle,
    gamma: f64,
}

impl GnParams {
    pub fn new(mu: Angle, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(GnParams { mu, gamma })
    }

    pub fn mu(&self) -> Angle {
        self.mu
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn pdf(&self, theta: Angle) -> f64 {
        pdf(theta, self)
    }

    pub fn log_pdf(&self, theta: Angle) -> f64 {
        log_pdf(theta, self)
    }

    pub fn sample(&self, n: usize, rng: &mut RngStream) -> Vec<Angle> {
        sample(n, self, rng)
    }
}

/// `p`-th trigonometric moment `E[e^{ipθ}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrigMoment {
    pub p: u32,
    pub re: f64,
    pub im: f64,
    pub resultant_length: f64,
    pub direction: Angle,
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "concentration {gamma} must be positive and finite"
        )))
    }
}

fn erf_arg(gamma: f64) -> f64 {
    PI * (0.5 * gamma).sqrt()
}

/// Normalizing constant `k(γ)`.
pub fn norm_const(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((TAU / gamma).sqrt() * erf(erf_arg(gamma)))
}

pub fn log_norm_const(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(0.5 * (TAU / gamma).ln() + erf(erf_arg(gamma)).ln())
}

pub fn pdf(theta: Angle, params: &GnParams) -> f64 {
    log_pdf(theta, params).exp()
}

pub fn log_pdf(theta: Angle, params: &GnParams) -> f64 {
    let d = geodesic_distance(params.mu, theta);
    // gamma was validated on construction
    let log_k = 0.5 * (TAU / params.gamma).ln() + erf(erf_arg(params.gamma)).ln();
    -0.5 * params.gamma * d * d - log_k
}

/// Distribution function of the signed displacement from `μ`, for `t ∈ [-π, π]`.
pub fn displacement_cdf(t: f64, params: &GnParams) -> Result<f64> {
    if !(-PI..=PI).contains(&t) {
        return Err(Error::domain(format!(
            "displacement {t} lies outside [-pi, pi]"
        )));
    }
    let s = params.gamma.sqrt();
    let c = PI * s;
    Ok((norm_interval(-c, t * s) / norm_interval(-c, c)).clamp(0.0, 1.0))
}

// Power series in s = γπ²/2 for E[θ^{2j}] / π^{2j} under the truncated law:
// Σ (-s)^n / (n! (2n + 2j + 1)) divided by the j = 0 sum.
fn series_moment(s: f64, j: u32) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut term = 1.0;
    for n in 0..80u32 {
        let nf = f64::from(n);
        if n > 0 {
            term *= -s / nf;
        }
        num += term / (2.0 * nf + 2.0 * f64::from(j) + 1.0);
        den += term / (2.0 * nf + 1.0);
        if term.abs() < 1e-18 {
            break;
        }
    }
    num / den
}

/// `γ V(γ) = 1 - 2π k(γ)⁻¹ e^{-γπ²/2}`, the factor shared by `V` and `J₁`.
pub(crate) fn truncation_factor(gamma: f64) -> f64 {
    let s = 0.5 * gamma * PI * PI;
    if s <= SERIES_LIMIT {
        gamma * PI * PI * series_moment(s, 1)
    } else {
        let k = (TAU / gamma).sqrt() * erf(erf_arg(gamma));
        1.0 - TAU * (-s).exp() / k
    }
}

/// Intrinsic variance `V(γ) = E[d(μ, θ)²]`.
pub fn intrinsic_variance(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(truncation_factor(gamma) / gamma)
}

/// Second and fourth moments of the geodesic distance to `μ`.
pub fn squared_distance_moments(gamma: f64) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    let s = 0.5 * gamma * PI * PI;
    if s <= SERIES_LIMIT {
        let p2 = PI * PI;
        return Ok((p2 * series_moment(s, 1), p2 * p2 * series_moment(s, 2)));
    }
    // Truncated standard normal on [-c, c]:
    // E[Z²] = 1 - 2cφ(c)/Z0, E[Z⁴] = 3 - 2(c³ + 3c)φ(c)/Z0.
    let c = PI * gamma.sqrt();
    let z0 = erf(c * FRAC_1_SQRT_2);
    let tail = 2.0 * norm_pdf(c) / z0;
    let ez2 = 1.0 - c * tail;
    let ez4 = 3.0 - (c * c * c + 3.0 * c) * tail;
    Ok((ez2 / gamma, ez4 / (gamma * gamma)))
}

/// `Var[d(μ, θ)²]`.
pub fn squared_distance_variance(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    let s = 0.5 * gamma * PI * PI;
    if s <= SERIES_LIMIT {
        let (m2, m4) = squared_distance_moments(gamma)?;
        return Ok(m4 - m2 * m2);
    }
    let c = PI * gamma.sqrt();
    let z0 = erf(c * FRAC_1_SQRT_2);
    let tail = 2.0 * norm_pdf(c) / z0;
    let ez2 = 1.0 - c * tail;
    // E[Z⁴] - E[Z²]² rearranged so the leading 3 - 1 cancels exactly.
    let var = 2.0 - (c * c * c + 3.0 * c) * tail + 2.0 * c * tail - (c * tail) * (c * tail);
    debug_assert!((var - ((3.0 - (c * c * c + 3.0 * c) * tail) - ez2 * ez2)).abs() < 1e-12);
    Ok(var / (gamma * gamma))
}

/// `p`-th trigonometric moment, `p ∈ 1..=MAX_TRIG_ORDER`.
pub fn trig_moment(p: u32, params: &GnParams) -> Result<TrigMoment> {
    if p == 0 {
        return Err(Error::domain("trigonometric order must be at least 1"));
    }
    if p > MAX_TRIG_ORDER {
        return Err(Error::AccuracyLoss(format!(
            "trigonometric order {p} exceeds the validated maximum {MAX_TRIG_ORDER}"
        )));
    }
    let gamma = params.gamma;
    let x = erf_arg(gamma);
    let y = -f64::from(p) / (2.0 * gamma).sqrt();
    // e^{-p²/2γ} Re erf(x + iy) / erf(x)
    let magnitude = scaled_re_erf_complex(x, y)? / erf(x);
    let phase = f64::from(p) * params.mu.value();
    let (sin, cos) = phase.sin_cos();
    let direction = if magnitude < 0.0 {
        Angle::new(phase + PI)?
    } else {
        Angle::new(phase)?
    };
    Ok(TrigMoment {
        p,
        re: magnitude * cos,
        im: magnitude * sin,
        resultant_length: magnitude.abs(),
        direction,
    })
}

/// Circular variance `1 - |φ₁|`.
pub fn extrinsic_variance(params: &GnParams) -> Result<f64> {
    Ok(1.0 - trig_moment(1, params)?.resultant_length)
}

/// `E[d(μ, θ)²]` for `θ ~ gN(μ*, γ)` and `μ = μ* - δ`, with `|δ| < π`.
///
/// Even in `δ`; equals `V(γ)` at `δ = 0`.
pub fn off_center_sq_distance(delta: f64, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if delta.is_nan() || delta.abs() >= PI {
        return Err(Error::domain(format!(
            "offset {delta} must lie strictly inside (-pi, pi)"
        )));
    }
    let d = delta.abs();
    let v = intrinsic_variance(gamma)?;
    if d == 0.0 {
        return Ok(v);
    }
    // Points beyond π - δ are closer to μ the other way round:
    // (2π - δ - α)² - (δ + α)² = 4π(π - δ - α).
    let k = norm_const(gamma)?;
    let a = PI - d;
    let s = gamma.sqrt();
    let mass = (TAU / gamma).sqrt() * norm_interval(a * s, PI * s);
    let first = ((-0.5 * gamma * a * a).exp() - (-0.5 * gamma * PI * PI).exp()) / gamma;
    let wrap = a * mass - first;
    Ok(d * d + v + 4.0 * PI * wrap / k)
}

/// Draws `n` angles by inverting the truncated-Gaussian displacement CDF.
pub fn sample(n: usize, params: &GnParams, rng: &mut RngStream) -> Vec<Angle> {
    let s = params.gamma.sqrt();
    let lower = norm_cdf(-PI * s);
    let half_mass = 0.5 - lower;
    (0..n)
        .map(|_| {
            let u = rng.uniform_open01();
            // Each half of the mass is inverted from its own tail.
            let (q, sign) = if u < 0.5 {
                (lower + 2.0 * u * half_mass, 1.0)
            } else {
                (lower + 2.0 * (1.0 - u) * half_mass, -1.0)
            };
            let z = match norm_cdf_inv(q) {
                Ok(z) => sign * z / s,
                Err(_) => 0.0,
            };
            params.mu.offset(z.clamp(-PI, PI))
        })
        .collect()
}
