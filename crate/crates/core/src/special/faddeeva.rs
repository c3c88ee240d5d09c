//! Faddeeva function `w(z) = e^{-z²} erfc(-iz)` in the closed upper half-plane
//! and the real part of `erf` at complex argument built on it.
//!
//! `w` is evaluated with the Laplace continued fraction far from the origin
//! and with Weideman's rational expansion elsewhere. Both carry an error
//! estimate; when the estimate propagated to `Re erf` exceeds
//! [`PRIMARY_TOLERANCE`] the value is recomputed by quadrature along the
//! straight contour from 0 to `z`.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};
use std::sync::OnceLock;

use num_complex::Complex64;

use super::quadrature::{integrate, Quadrature};
use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_948_079_451_560_772_6;

/// Relative error above which the contour-quadrature fallback is used.
pub const PRIMARY_TOLERANCE: f64 = 1e-11;

// Largest y² - x² for which Re erf(x + iy) is returned unscaled.
const MAX_EXPONENT: f64 = 700.0;

struct Weideman {
    l: f64,
    // a_1 ..= a_N, highest power last.
    coeffs: Vec<f64>,
}

impl Weideman {
    fn new(n: usize) -> Self {
        let m = 2 * n;
        let mf = m as f64;
        let l = (n as f64 / std::f64::consts::SQRT_2).sqrt();
        let samples: Vec<(f64, f64)> = (1..m)
            .map(|k| {
                let k = k as f64 - mf;
                let t = l * (k * PI / (2.0 * mf)).tan();
                (k, (-t * t).exp() * (l * l + t * t))
            })
            .chain((0..m).map(|k| {
                let k = k as f64;
                let t = l * (k * PI / (2.0 * mf)).tan();
                (k, (-t * t).exp() * (l * l + t * t))
            }))
            .collect();
        let coeffs = (1..=n)
            .map(|j| {
                let j = j as f64;
                samples
                    .iter()
                    .map(|&(k, g)| g * (PI * k * j / mf).cos())
                    .sum::<f64>()
                    / (2.0 * mf)
            })
            .collect();
        Weideman { l, coeffs }
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        let iz = Complex64::i() * z;
        let denom = self.l - iz;
        let ratio = (self.l + iz) / denom;
        let poly = self
            .coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * ratio + a);
        2.0 * poly / (denom * denom) + FRAC_1_SQRT_PI / denom
    }
}

fn weideman_pair() -> &'static (Weideman, Weideman) {
    static PAIR: OnceLock<(Weideman, Weideman)> = OnceLock::new();
    PAIR.get_or_init(|| (Weideman::new(40), Weideman::new(64)))
}

// Modified Lentz evaluation of w(z) = (i/√π) / (z - (1/2)/(z - 1/(z - (3/2)/(z - ...)))).
fn continued_fraction(z: Complex64) -> (Complex64, f64) {
    const TINY: f64 = 1e-300;
    let tiny = Complex64::new(TINY, 0.0);
    let mut f = z;
    let mut c = f;
    let mut d = Complex64::new(0.0, 0.0);
    let mut change = f64::INFINITY;
    for j in 1..=2000 {
        let a = -0.5 * j as f64;
        d = z + a * d;
        if d.norm() < TINY {
            d = tiny;
        }
        c = z + a / c;
        if c.norm() < TINY {
            c = tiny;
        }
        d = d.inv();
        let delta = c * d;
        f *= delta;
        change = (delta - 1.0).norm();
        if change < 1e-16 {
            break;
        }
    }
    let w = Complex64::i() * FRAC_1_SQRT_PI / f;
    (w, change.max(f64::EPSILON) * w.norm())
}

/// Faddeeva function for `Im z >= 0`, with an absolute error estimate.
pub fn faddeeva_w(z: Complex64) -> Result<(Complex64, f64)> {
    if z.im.is_nan() || z.im < 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain(format!(
            "Faddeeva function evaluated at {z}; only the closed upper half-plane is supported"
        )));
    }
    // w(-conj z) = conj w(z)
    let reflect = z.re < 0.0;
    let zr = if reflect {
        Complex64::new(-z.re, z.im)
    } else {
        z
    };
    let (x, y) = (zr.re, zr.im);

    let far = y > 7.0 || (x > 6.0 && (y > 0.1 || (x > 8.0 && y > 1e-10) || x > 28.0));
    let (w, err) = if far {
        continued_fraction(zr)
    } else {
        let (coarse, fine) = weideman_pair();
        let w = fine.eval(zr);
        let err = (coarse.eval(zr) - w).norm() + 4.0 * f64::EPSILON * w.norm();
        (w, err)
    };
    Ok((if reflect { w.conj() } else { w }, err))
}

fn erf_series(z: Complex64) -> Complex64 {
    // erf z = (2/√π) Σ (-1)^n z^{2n+1} / (n! (2n+1))
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..60 {
        let nf = n as f64;
        term *= -z2 / nf;
        let add = term / (2.0 * nf + 1.0);
        sum += add;
        if add.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    sum * FRAC_2_SQRT_PI
}

// Breakpoints for the contour integrand: mass sits within ~1/x of t = 0 and
// within ~1/(2y²) of t = 1, so both ends get a geometrically graded mesh.
fn contour_knots(x: f64, y: f64) -> Vec<f64> {
    let mut knots = vec![0.0, 1.0];
    let mut width = 0.25 / x.max(1e-300);
    while width < 1.0 {
        knots.push(width);
        width *= 2.0;
    }
    let mut width = 0.125 / (y * y).max(1e-300);
    while width < 1.0 {
        knots.push(1.0 - width);
        width *= 2.0;
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup();
    knots
}

// e^{-y²} Re erf(x + iy) for x, y >= 0 by quadrature along t ↦ t (x + iy).
fn scaled_by_contour(x: f64, y: f64) -> Result<f64> {
    let q = Quadrature {
        abs_tol: 1e-17,
        rel_tol: 1e-13,
        max_depth: 60,
    };
    let integrand = |t: f64| {
        let t2 = t * t;
        let modulus = (-x * x * t2 - y * y * (1.0 - t2)).exp();
        let phase = -2.0 * x * y * t2;
        modulus * (x * phase.cos() - y * phase.sin())
    };
    let mut total = 0.0;
    for pair in contour_knots(x, y).windows(2) {
        total += integrate(integrand, pair[0], pair[1], &q)
            .map_err(|e| Error::AccuracyLoss(format!("contour quadrature for erf failed: {e}")))?;
    }
    Ok(total * FRAC_2_SQRT_PI)
}

// e^{-y²} Re erf(x + iy) for x, y >= 0, plus a relative error estimate of the primary method.
fn scaled_primary(x: f64, y: f64) -> Result<(f64, f64)> {
    if x == 0.0 {
        return Ok((0.0, 0.0));
    }
    let z = Complex64::new(x, y);
    if z.norm() < 0.5 {
        let v = (-y * y).exp() * erf_series(z).re;
        return Ok((v, 4.0 * f64::EPSILON));
    }
    // erf z = 1 - e^{-z²} w(iz); scaling by e^{-y²} leaves e^{-x²} e^{-2ixy}.
    let (w, w_err) = faddeeva_w(Complex64::new(-y, x))?;
    let damp = (-x * x).exp();
    let rotation = Complex64::from_polar(1.0, -2.0 * x * y);
    let tail = damp * (rotation * w).re;
    let lead = (-y * y).exp();
    let value = lead - tail;
    let abs_err = damp * w_err + 4.0 * f64::EPSILON * (lead + tail.abs());
    let rel_err = if value != 0.0 {
        abs_err / value.abs()
    } else {
        f64::INFINITY
    };
    Ok((value, rel_err))
}

fn scaled_nonneg(x: f64, y: f64) -> Result<f64> {
    let (value, rel_err) = scaled_primary(x, y)?;
    if rel_err <= PRIMARY_TOLERANCE {
        Ok(value)
    } else {
        scaled_by_contour(x, y)
    }
}

fn check_finite(x: f64, y: f64) -> Result<()> {
    if x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "erf argument ({x}, {y}) is not finite"
        )))
    }
}

/// `e^{-y²} Re erf(x + iy)`.
///
/// Bounded by 1 in magnitude for every finite argument, so it stays
/// representable where `Re erf` itself overflows.
pub fn scaled_re_erf_complex(x: f64, y: f64) -> Result<f64> {
    check_finite(x, y)?;
    // Re erf is odd in x and even in y.
    let v = scaled_nonneg(x.abs(), y.abs())?;
    Ok(if x < 0.0 { -v } else { v })
}

/// `Re erf(x + iy)`.
///
/// Fails with [`Error::AccuracyLoss`] when `y² - x²` is so large that the
/// result would overflow.
pub fn re_erf_complex(x: f64, y: f64) -> Result<f64> {
    check_finite(x, y)?;
    if y == 0.0 {
        return Ok(super::erf(x));
    }
    if y * y - x * x > MAX_EXPONENT {
        return Err(Error::AccuracyLoss(format!(
            "Re erf({x} + {y}i) overflows; use the scaled form"
        )));
    }
    Ok(scaled_re_erf_complex(x, y)? * (y * y).exp())
}
