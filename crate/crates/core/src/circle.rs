//! Angles on the unit circle, geodesic distance, and the signed tangent
//! coordinate (the Log map at a base point).

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A point on the unit circle, stored as its representative in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps any finite number of radians onto `[0, 2π)`.
    pub fn new(raw: f64) -> Result<Self> {
        canonicalize(raw)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Rotates counterclockwise by `by` radians.
    pub fn rotate(self, by: f64) -> Result<Self> {
        canonicalize(self.0 + by)
    }

    /// Point reached by moving `x` radians along the circle; the Exp map at `self`.
    pub(crate) fn offset(self, x: f64) -> Self {
        wrap(self.0 + x)
    }

    pub fn distance(self, other: Angle) -> f64 {
        geodesic_distance(self, other)
    }

    pub fn displacement_to(self, other: Angle) -> f64 {
        signed_displacement(self, other)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

// Caller guarantees `raw` is finite.
fn wrap(raw: f64) -> Angle {
    let r = raw.rem_euclid(TAU);
    // rem_euclid of a tiny negative number rounds up to exactly 2π.
    if r >= TAU {
        Angle(0.0)
    } else {
        Angle(r)
    }
}

pub fn canonicalize(raw: f64) -> Result<Angle> {
    if !raw.is_finite() {
        return Err(Error::InvalidAngle(raw));
    }
    Ok(wrap(raw))
}

/// Shortest arc length between `a` and `b`, in `[0, π]`.
pub fn geodesic_distance(a: Angle, b: Angle) -> f64 {
    signed_displacement(a, b).abs()
}

/// Signed coordinate of `theta` in the tangent line at `mu`, in `(-π, π]`.
///
/// Antipodal points map to `+π`.
pub fn signed_displacement(mu: Angle, theta: Angle) -> f64 {
    let d = theta.0 - mu.0;
    if d > PI {
        d - TAU
    } else if d <= -PI {
        d + TAU
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn a(x: f64) -> Angle {
        Angle::new(x).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(a(0.0).value(), 0.0);
        assert!((a(5.0 * PI / 2.0).value() - FRAC_PI_2).abs() < 1e-15);
        assert!((a(-PI / 4.0).value() - 7.0 * PI / 4.0).abs() < 1e-15);
        assert_eq!(a(-1e-300).value(), 0.0);
        assert!(matches!(
            canonicalize(f64::NAN),
            Err(Error::InvalidAngle(_))
        ));
        assert!(matches!(
            canonicalize(f64::INFINITY),
            Err(Error::InvalidAngle(_))
        ));
    }

    #[test]
    fn distance_examples() {
        let mu = a(1.3);
        assert_eq!(geodesic_distance(mu, mu), 0.0);
        assert!((geodesic_distance(a(0.0), a(FRAC_PI_2)) - FRAC_PI_2).abs() < 1e-15);
        assert!((geodesic_distance(a(0.1), a(TAU - 0.1)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn displacement_examples() {
        assert_eq!(signed_displacement(a(FRAC_PI_2), a(FRAC_PI_2)), 0.0);
        assert!((signed_displacement(a(0.0), a(7.0 * PI / 4.0)) + PI / 4.0).abs() < 1e-15);
        let base = a(3.0 * PI / 4.0);
        assert!((signed_displacement(base, a(3.0 * PI / 4.0 + 0.3)) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn antipode_is_plus_pi() {
        assert_eq!(signed_displacement(a(0.0), a(PI)), PI);
        assert_eq!(signed_displacement(a(PI), a(0.0)), PI);
        assert_eq!(geodesic_distance(a(PI), a(0.0)), PI);
    }

    proptest! {
        #[test]
        fn canonical_range_and_periodicity(x in -1e3f64..1e3, k in -50i32..50) {
            let c = a(x);
            prop_assert!(c.value() >= 0.0 && c.value() < TAU);
            let shifted = a(x + TAU * f64::from(k));
            let gap = geodesic_distance(c, shifted);
            prop_assert!(gap < 1e-12);
        }

        #[test]
        fn distance_symmetric_and_bounded(x in 0.0..TAU, y in 0.0..TAU) {
            let (p, q) = (a(x), a(y));
            let d = geodesic_distance(p, q);
            prop_assert_eq!(d, geodesic_distance(q, p));
            prop_assert!((0.0..=PI).contains(&d));
            prop_assert_eq!(d, signed_displacement(p, q).abs());
        }

        #[test]
        fn triangle_inequality(x in 0.0..TAU, y in 0.0..TAU, z in 0.0..TAU) {
            let (p, q, r) = (a(x), a(y), a(z));
            prop_assert!(geodesic_distance(p, r) <= geodesic_distance(p, q) + geodesic_distance(q, r) + 1e-12);
        }

        #[test]
        fn log_inverts_exp(m in 0.0..TAU, x in -PI + 1e-9..PI - 1e-9) {
            let mu = a(m);
            let back = signed_displacement(mu, a(m + x));
            prop_assert!((back - x).abs() < 1e-12);
            let theta = a(m + x);
            let d = signed_displacement(mu, theta);
            prop_assert!(geodesic_distance(a(mu.value() + d), theta) < 1e-12);
        }
    }
}
