//! Real error function (Cody's rational approximations) and the standard
//! normal distribution function and its inverse.

// Published coefficients are kept digit for digit.
#![allow(clippy::excessive_precision)]

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_286_948_079_451_560_772_6;

const A: [f64; 5] = [
    3.161_123_743_870_565_6,
    113.864_154_151_050_156,
    377.485_237_685_302_021,
    3_209.377_589_138_469_47,
    0.185_777_706_184_603_153,
];
const B: [f64; 4] = [
    23.601_290_952_344_120_9,
    244.024_637_934_444_173,
    1_282.616_526_077_372_28,
    2_844.236_833_439_170_62,
];
const C: [f64; 9] = [
    0.564_188_496_988_670_089,
    8.883_149_794_388_375_94,
    66.119_190_637_141_629_5,
    298.635_138_197_400_131,
    881.952_221_241_769_09,
    1_712.047_612_634_070_58,
    2_051.078_377_826_071_47,
    1_230.339_354_797_997_25,
    2.153_115_354_744_038_46e-8,
];
const D: [f64; 8] = [
    15.744_926_110_709_834_7,
    117.693_950_891_312_499,
    537.181_101_862_009_858,
    1_621.389_574_566_690_19,
    3_290.799_235_733_459_63,
    4_362.619_090_143_247_16,
    3_439.367_674_143_721_64,
    1_230.339_354_803_749_42,
];
const P: [f64; 6] = [
    0.305_326_634_961_232_344,
    0.360_344_899_949_804_439,
    0.125_781_726_111_229_246,
    0.016_083_785_148_742_276_6,
    6.587_491_615_298_378_03e-4,
    0.016_315_387_137_302_097_8,
];
const Q: [f64; 5] = [
    2.568_520_192_289_822_42,
    1.872_952_849_923_460_47,
    0.527_905_102_951_428_412,
    0.060_518_341_312_441_319_1,
    0.002_335_204_976_268_691_85,
];

const SMALL: f64 = 0.468_75;
const BIG: f64 = 26.543;

fn small_ratio(z: f64) -> f64 {
    ((((A[4] * z + A[0]) * z + A[1]) * z + A[2]) * z + A[3])
        / ((((z + B[0]) * z + B[1]) * z + B[2]) * z + B[3])
}

fn mid_ratio(y: f64) -> f64 {
    let num = C[..8].iter().fold(C[8], |acc, &c| acc * y + c);
    let den = D.iter().fold(1.0, |acc, &d| acc * y + d);
    num / den
}

fn tail_ratio(z: f64) -> f64 {
    z * (((((P[5] * z + P[0]) * z + P[1]) * z + P[2]) * z + P[3]) * z + P[4])
        / (((((z + Q[0]) * z + Q[1]) * z + Q[2]) * z + Q[3]) * z + Q[4])
}

// exp(-y^2) with the square split to limit rounding error for large y.
fn exp_neg_square(y: f64) -> f64 {
    let yt = (y * 16.0).trunc() / 16.0;
    (-yt * yt).exp() * (-(y - yt) * (y + yt)).exp()
}

// erfc(y) for y > SMALL.
fn erfc_positive(y: f64) -> f64 {
    if y >= BIG {
        0.0
    } else if y <= 4.0 {
        mid_ratio(y) * exp_neg_square(y)
    } else {
        (FRAC_1_SQRT_PI - tail_ratio(1.0 / (y * y))) / y * exp_neg_square(y)
    }
}

pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= SMALL {
        return x * small_ratio(y * y);
    }
    let c = erfc_positive(y);
    if x < 0.0 {
        c - 1.0
    } else {
        1.0 - c
    }
}

pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= SMALL {
        return 1.0 - x * small_ratio(y * y);
    }
    let c = erfc_positive(y);
    if x < 0.0 {
        2.0 - c
    } else {
        c
    }
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Standard normal distribution function, accurate in both tails.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `Φ(b) - Φ(a)` for `a <= b`, computed on the side of zero that avoids cancellation.
pub fn norm_interval(a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        0.5 * (erfc(a * FRAC_1_SQRT_2) - erfc(b * FRAC_1_SQRT_2))
    } else if b <= 0.0 {
        0.5 * (erfc(-b * FRAC_1_SQRT_2) - erfc(-a * FRAC_1_SQRT_2))
    } else {
        0.5 * (erf(b * FRAC_1_SQRT_2) - erf(a * FRAC_1_SQRT_2))
    }
}

// Acklam's rational approximation, relative error about 1.15e-9.
fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    if p < P_LOW {
        tail((-2.0 * p.ln()).sqrt())
    } else if p > 1.0 - P_LOW {
        -tail((-2.0 * (1.0 - p).ln()).sqrt())
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Standard normal quantile function.
pub fn norm_cdf_inv(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "probability {p} is outside the open interval (0, 1)"
        )));
    }
    let x = acklam(p);
    // One Newton step on whichever tail keeps the residual exact.
    let residual = if p < 0.5 {
        norm_cdf(x) - p
    } else {
        (1.0 - p) - norm_cdf(-x)
    };
    let density = norm_pdf(x);
    if density > 0.0 {
        Ok(x - residual / density)
    } else {
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::quadrature::{integrate, Quadrature};
    use std::f64::consts::SQRT_2;

    #[test]
    fn erf_basics() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(6.0) - 1.0).abs() <= 1e-15);
        assert!((erf(-6.0) + 1.0).abs() <= 1e-15);
        let q = Quadrature::precise();
        let oracle = 2.0 / PI.sqrt() * integrate(|t| (-t * t).exp(), 0.0, 1.0, &q).unwrap();
        assert!((erf(1.0) - oracle).abs() < 1e-12);
    }

    #[test]
    fn erf_matches_quadrature_across_ranges() {
        let q = Quadrature::precise();
        for &x in &[0.1, 0.3, 0.46875, 0.5, 0.9, 1.5, 2.5, 3.9, 4.0, 4.5, 6.0] {
            let oracle = 2.0 / PI.sqrt() * integrate(|t| (-t * t).exp(), 0.0, x, &q).unwrap();
            assert!((erf(x) - oracle).abs() < 1e-14, "x={x}");
            assert_eq!(erf(-x), -erf(x));
        }
        let q = Quadrature::new(1e-300, 1e-13, 60).unwrap();
        for &x in &[1.0, 3.0, 5.0, 10.0] {
            let oracle = 2.0 / PI.sqrt() * integrate(|t| (-t * t).exp(), x, x + 12.0, &q).unwrap();
            assert!((erfc(x) - oracle).abs() < 1e-13 * oracle, "x={x}");
        }
    }

    #[test]
    fn erf_monotone() {
        let mut prev = -1.0;
        for i in -600..=600 {
            let v = erf(f64::from(i) * 0.01);
            assert!(v >= prev);
            assert!(v.abs() <= 1.0);
            prev = v;
        }
    }

    #[test]
    fn norm_cdf_examples() {
        assert_eq!(norm_cdf(0.0), 0.5);
        assert_eq!(norm_cdf_inv(0.5).unwrap(), 0.0);
        let half_erf = 0.5 * (1.0 + erf(1.959_964 / SQRT_2));
        assert!((norm_cdf(1.959_964) - 0.975).abs() < 1e-6);
        assert!((norm_cdf(1.959_964) - half_erf).abs() < 1e-15);
        assert!(norm_cdf_inv(0.0).is_err());
        assert!(norm_cdf_inv(1.0).is_err());
        assert!(norm_cdf_inv(f64::NAN).is_err());
    }

    #[test]
    fn norm_cdf_strictly_increasing() {
        // Beyond x ≈ 5 successive values differ by less than an ulp of 1.
        let mut prev = 0.0;
        for i in -800..=500 {
            let v = norm_cdf(f64::from(i) * 0.01);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn quantile_round_trip() {
        // A probability near 1 is only known to within half an ulp of 1, so
        // the attainable accuracy in x is 1e-9 plus that ulp over the density.
        for i in -800..=800 {
            let x = f64::from(i) * 0.01;
            let p = norm_cdf(x);
            let back = norm_cdf_inv(p).unwrap();
            let conditioning = (p * f64::EPSILON) / norm_pdf(x);
            assert!((back - x).abs() <= 1e-9 + conditioning, "x={x}: {back}");
        }
        for i in -800..=0 {
            let x = f64::from(i) * 0.01;
            assert!((norm_cdf_inv(norm_cdf(x)).unwrap() - x).abs() < 1e-9);
        }
    }

    #[test]
    fn norm_interval_matches_difference() {
        for &(a, b) in &[(-1.0, 2.0), (0.5, 3.0), (-4.0, -0.1), (8.0, 9.0)] {
            let direct = norm_cdf(b) - norm_cdf(a);
            let v = norm_interval(a, b);
            assert!((v - direct).abs() < 1e-15 + 1e-12 * direct.abs());
        }
        // Far tail where the plain difference is zero.
        assert!(norm_interval(9.0, 10.0) > 0.0);
    }
}
