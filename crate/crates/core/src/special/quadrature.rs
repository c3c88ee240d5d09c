//! Globally adaptive 15-point Gauss–Kronrod integration.

// QUADPACK's constants are kept digit for digit.
#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae in descending order; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

// Hard cap on the number of live subintervals.
const MAX_INTERVALS: usize = 20_000;

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any one subinterval.
    pub max_depth: u32,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_depth: 60,
        }
    }
}

impl Quadrature {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: u32) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) || max_depth < 1 {
            return Err(Error::domain(
                "quadrature tolerances must be positive and max_depth at least 1",
            ));
        }
        Ok(Quadrature {
            abs_tol,
            rel_tol,
            max_depth,
        })
    }

    /// Tight settings for use as a reference value.
    pub fn precise() -> Self {
        Quadrature {
            abs_tol: 1e-15,
            rel_tol: 1e-14,
            max_depth: 60,
        }
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> Result<f64> {
        integrate(f, a, b, self)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, bool) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut res_abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = kronrod * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    let at_floor = res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && err <= floor;
    if at_floor {
        err = floor;
    }
    (value, err, at_floor)
}

/// Integrates `f` over `[a, b]`.
///
/// Subintervals with the largest error estimate are bisected until the total
/// estimate falls below `max(abs_tol, rel_tol * |result|)`. Fails with
/// [`Error::NoConvergence`] (carrying the best estimate) if only intervals at
/// `max_depth` remain to be refined. Intervals whose estimate has reached the
/// round-off floor are accepted as they are.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, q: &Quadrature) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }

    let (value, error, at_floor) = kronrod15(&f, a, b);
    if !value.is_finite() {
        return Err(Error::domain("integrand is not finite on the interval"));
    }
    let mut heap = BinaryHeap::new();
    let mut stalled: Vec<Segment> = Vec::new();
    let mut settled: Vec<Segment> = Vec::new();
    let first = Segment {
        a,
        b,
        value,
        error,
        depth: 0,
    };
    if at_floor {
        settled.push(first);
    } else {
        heap.push(first);
    }
    let mut total = value;
    let mut total_err = error;

    loop {
        let tol = q.abs_tol.max(q.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        let Some(worst) = heap.pop() else {
            if stalled.is_empty() {
                return Ok(total);
            }
            return Err(Error::NoConvergence {
                estimate: total,
                error_bound: total_err,
            });
        };
        if worst.depth >= q.max_depth || heap.len() + stalled.len() + settled.len() >= MAX_INTERVALS
        {
            stalled.push(worst);
            continue;
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1, f1) = kronrod15(&f, worst.a, mid);
        let (v2, e2, f2) = kronrod15(&f, mid, worst.b);
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        for (lo, hi, value, error, at_floor) in
            [(worst.a, mid, v1, e1, f1), (mid, worst.b, v2, e2, f2)]
        {
            let seg = Segment {
                a: lo,
                b: hi,
                value,
                error,
                depth: worst.depth + 1,
            };
            if at_floor {
                settled.push(seg);
            } else {
                heap.push(seg);
            }
        }
        // Re-sum occasionally; the running totals drift after many updates.
        if heap.len() % 64 == 0 {
            let all = || heap.iter().chain(stalled.iter()).chain(settled.iter());
            total = all().map(|s| s.value).sum();
            total_err = all().map(|s| s.error).sum();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rule_is_exact_for_polynomials() {
        // K15 integrates degree 22 exactly, G7 degree 13.
        for deg in 0..=22 {
            let (v, _, _) = kronrod15(&|x: f64| x.powi(deg), -1.0, 1.0);
            let exact = if deg % 2 == 1 {
                0.0
            } else {
                2.0 / f64::from(deg + 1)
            };
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
        let wsum: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((wsum - 2.0).abs() < 1e-15);
        let gsum: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((gsum - 2.0).abs() < 1e-15);
    }

    #[test]
    fn simple_integrals() {
        let q = Quadrature::default();
        assert!((integrate(|_| 1.0, 0.0, 1.0, &q).unwrap() - 1.0).abs() < 1e-15);
        assert!(integrate(|t| t, -PI, PI, &q).unwrap().abs() < 1e-12);
        assert_eq!(integrate(|t| t, 1.0, 1.0, &q).unwrap(), 0.0);
        let rev = integrate(|t| t * t, 1.0, 0.0, &q).unwrap();
        assert!((rev + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_against_norm_cdf() {
        let q = Quadrature::default();
        let v = integrate(|t| (-t * t / 2.0).exp(), -PI, PI, &q).unwrap();
        let exact = (2.0 * PI).sqrt() * (2.0 * crate::special::norm_cdf(PI) - 1.0);
        assert!((v - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn peaked_integrand() {
        let q = Quadrature::precise();
        let g = 1e4;
        let v = integrate(|t| (-g * t * t / 2.0).exp(), -PI, PI, &q).unwrap();
        let exact = (2.0 * PI / g).sqrt();
        assert!((v - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn linear_in_integrand() {
        let q = Quadrature::precise();
        let f = |t: f64| t.sin().exp();
        let g = |t: f64| (t * t).cos();
        let lhs = integrate(|t| 2.5 * f(t) - 0.75 * g(t), -1.0, 2.0, &q).unwrap();
        let rhs = 2.5 * integrate(f, -1.0, 2.0, &q).unwrap()
            - 0.75 * integrate(g, -1.0, 2.0, &q).unwrap();
        assert!((lhs - rhs).abs() < 1e-13);
    }

    #[test]
    fn depth_exhaustion_reports_estimate() {
        let q = Quadrature::new(1e-15, 1e-15, 2).unwrap();
        match integrate(|t: f64| t.abs().sqrt().recip().min(1e8), -1.0, 1.0, &q) {
            Err(Error::NoConvergence { estimate, .. }) => assert!(estimate.is_finite()),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_settings() {
        assert!(Quadrature::new(0.0, 1e-10, 10).is_err());
        assert!(Quadrature::new(1e-12, 1e-10, 0).is_err());
    }
}
