//! Sample moments, the intrinsic (Fréchet) sample mean, and maximum
//! likelihood for the geodesic Normal law.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::circle::{geodesic_distance, Angle};
use crate::error::{Error, Result};
use crate::gn::{self, check_gamma};
use crate::special::norm_cdf_inv;

/// Resultant lengths at or below this are treated as zero.
pub const RESULTANT_FLOOR: f64 = 1e-12;

/// Width of the band below `π²/3` in which a fit is flagged as near the boundary.
pub const BOUNDARY_BAND: f64 = 1e-6;

const MEAN_SET_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CircularSummary {
    pub n: usize,
    pub intrinsic_mean_set: Vec<Angle>,
    pub intrinsic_variance: f64,
    pub extrinsic_mean: Option<Angle>,
    pub resultant_length: f64,
    pub extrinsic_variance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MleFit {
    pub n: usize,
    pub mu_hat: Angle,
    pub gamma_hat: f64,
    pub log_likelihood: f64,
    pub fisher_j1: f64,
    pub fisher_j2: f64,
    pub se_mu: f64,
    pub se_gamma: f64,
    pub mean_set_multiplicity: usize,
    pub intrinsic_variance: f64,
    /// The sample variance fell within [`BOUNDARY_BAND`] of `π²/3`, where
    /// `γ̂` is poorly determined.
    pub near_boundary: bool,
}

/// Wald intervals for `μ` and `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticCi {
    pub level: f64,
    pub z: f64,
    pub mu_lower: Angle,
    pub mu_upper: Angle,
    pub mu_half_width: f64,
    /// The half-width reaches `π`, so the interval is the whole circle.
    pub mu_covers_circle: bool,
    pub gamma_lower: f64,
    pub gamma_upper: f64,
}

impl AsymptoticCi {
    pub fn contains_mu(&self, mu: Angle) -> bool {
        self.mu_covers_circle
            || geodesic_distance(self.mu_lower.offset(self.mu_half_width), mu) <= self.mu_half_width
    }

    pub fn contains_gamma(&self, gamma: f64) -> bool {
        (self.gamma_lower..=self.gamma_upper).contains(&gamma)
    }
}

/// Mean of `(cos θ, sin θ)`.
pub(crate) fn first_moment(sample: &[Angle]) -> (f64, f64) {
    let n = sample.len() as f64;
    let (c, s) = sample.iter().fold((0.0, 0.0), |(c, s), t| {
        let (sin, cos) = t.value().sin_cos();
        (c + cos, s + sin)
    });
    (c / n, s / n)
}

/// `F(m) = (1/n) Σ d(m, θᵢ)²`.
pub fn frechet_function(m: Angle, sample: &[Angle]) -> f64 {
    let total: f64 = sample
        .iter()
        .map(|t| {
            let d = geodesic_distance(m, *t);
            d * d
        })
        .sum();
    total / sample.len() as f64
}

/// All global minimizers of the Fréchet function, in ascending order.
///
/// Each minimizer is the ordinary mean of the sample unrolled at some gap,
/// so the `n` cut positions of the sorted sample are scanned with prefix
/// sums and the best are checked against the exact objective.
pub fn intrinsic_sample_mean(sample: &[Angle]) -> Result<Vec<Angle>> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut xs: Vec<f64> = sample.iter().map(|t| t.value()).collect();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    let nf = n as f64;
    let sum: f64 = xs.iter().sum();
    let sum_sq: f64 = xs.iter().map(|x| x * x).sum();

    // Cut k lifts the first k points by 2π.
    let mut unrolled = Vec::with_capacity(n);
    let mut prefix = 0.0;
    for (k, x) in xs.iter().enumerate() {
        let kf = k as f64;
        let mean = (sum + TAU * kf) / nf;
        let second = (sum_sq + 2.0 * TAU * prefix + TAU * TAU * kf) / nf;
        unrolled.push((mean, second - mean * mean));
        prefix += x;
    }
    let best = unrolled.iter().map(|u| u.1).fold(f64::INFINITY, f64::min);
    // Slack for round-off in the prefix-sum variances.
    let slack = MEAN_SET_TOL + 1e-13 * (sum_sq / nf + TAU * TAU);
    let mut candidates: Vec<(Angle, f64)> = unrolled
        .iter()
        .filter(|u| u.1 <= best + slack)
        .map(|u| {
            let m = Angle::new(u.0).expect("finite mean");
            (m, frechet_function(m, sample))
        })
        .collect();
    let f_min = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    candidates.retain(|c| c.1 <= f_min + MEAN_SET_TOL);
    candidates.sort_by(|a, b| a.0.value().total_cmp(&b.0.value()));

    let mut set: Vec<Angle> = Vec::with_capacity(candidates.len());
    for (m, _) in candidates {
        if set.iter().all(|s| geodesic_distance(*s, m) > MEAN_SET_TOL) {
            set.push(m);
        }
    }
    Ok(set)
}

pub fn circular_summary(sample: &[Angle]) -> Result<CircularSummary> {
    let set = intrinsic_sample_mean(sample)?;
    let intrinsic_variance = frechet_function(set[0], sample);
    let (re, im) = first_moment(sample);
    let rho = re.hypot(im).min(1.0);
    let extrinsic_mean = if rho > RESULTANT_FLOOR {
        Some(Angle::new(im.atan2(re))?)
    } else {
        None
    };
    Ok(CircularSummary {
        n: sample.len(),
        intrinsic_mean_set: set,
        intrinsic_variance,
        extrinsic_mean,
        resultant_length: rho,
        extrinsic_variance: 1.0 - rho,
    })
}

/// Fisher information entries `(J₁, J₂)` for `μ` and `γ`.
pub fn fisher_info(gamma: f64) -> Result<(f64, f64)> {
    check_gamma(gamma)?;
    let j1 = gamma * gn::truncation_factor(gamma);
    let j2 = 0.25 * gn::squared_distance_variance(gamma)?;
    Ok((j1, j2))
}

/// Inverse of the strictly decreasing map `γ ↦ V(γ)`, for `0 < v < π²/3`.
///
/// The second value is true when `v` is too close to `π²/3` to be matched,
/// in which case the smallest reachable concentration is returned.
pub fn gamma_from_variance(v: f64) -> Result<(f64, bool)> {
    let limit = PI * PI / 3.0;
    if v.is_nan() || v >= limit {
        return Err(Error::GammaNotIdentifiable { variance: v });
    }
    if v <= 0.0 {
        return Err(Error::DegenerateSample(format!(
            "intrinsic variance {v} is not positive"
        )));
    }
    let f = |g: f64| gn::intrinsic_variance(g).map(|x| x - v);
    let mut lo = 1e-8;
    let mut hi = 1e8;
    while f(lo)? < 0.0 {
        hi = lo;
        lo *= 1e-4;
        if lo < 1e-300 {
            return Ok((hi, true));
        }
    }
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 1e4;
        if !hi.is_finite() || hi > 1e300 {
            return Err(Error::DegenerateSample(format!(
                "intrinsic variance {v} needs a concentration beyond floating-point range"
            )));
        }
    }
    let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
    for _ in 0..200 {
        if hi / lo - 1.0 <= 1e-15 {
            break;
        }
        let mid = (lo * hi).sqrt();
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, false));
        }
        if fm > 0.0 {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    // Secant polish inside the final bracket.
    let mut best = if flo.abs() < fhi.abs() {
        (lo, flo)
    } else {
        (hi, fhi)
    };
    for _ in 0..3 {
        if flo == fhi {
            break;
        }
        let g = (lo - flo * (hi - lo) / (fhi - flo)).clamp(lo, hi);
        let fg = f(g)?;
        if fg.abs() < best.1.abs() {
            best = (g, fg);
        }
        if fg > 0.0 {
            lo = g;
            flo = fg;
        } else {
            hi = g;
            fhi = fg;
        }
    }
    Ok((best.0, false))
}

/// Maximum likelihood fit of `gN(μ, γ)`.
///
/// `μ̂` is the smallest element of the intrinsic mean set and `γ̂` solves
/// `V(γ̂) = σ̂²_I`.
pub fn fit_gn_mle(sample: &[Angle]) -> Result<MleFit> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.len() < 2 {
        return Err(Error::DegenerateSample(
            "at least two observations are needed".to_string(),
        ));
    }
    let set = intrinsic_sample_mean(sample)?;
    let mu_hat = set[0];
    let v = frechet_function(mu_hat, sample);
    if v == 0.0 {
        return Err(Error::DegenerateSample(
            "all observations coincide".to_string(),
        ));
    }
    let (gamma_hat, clipped) = gamma_from_variance(v)?;
    let near_boundary = clipped || v >= PI * PI / 3.0 - BOUNDARY_BAND;
    let n = sample.len();
    let nf = n as f64;
    let (j1, j2) = fisher_info(gamma_hat)?;
    let log_likelihood = -nf * gn::log_norm_const(gamma_hat)? - 0.5 * gamma_hat * nf * v;
    Ok(MleFit {
        n,
        mu_hat,
        gamma_hat,
        log_likelihood,
        fisher_j1: j1,
        fisher_j2: j2,
        se_mu: 1.0 / (nf * j1).sqrt(),
        se_gamma: 1.0 / (nf * j2).sqrt(),
        mean_set_multiplicity: set.len(),
        intrinsic_variance: v,
        near_boundary,
    })
}

/// Wald intervals at `level` from the Fisher information at `γ̂` with `n` observations.
pub fn asymptotic_ci(fit: &MleFit, n: usize, level: f64) -> Result<AsymptoticCi> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!("level {level} must lie in (0, 1)")));
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let z = norm_cdf_inv(0.5 + 0.5 * level)?;
    let nf = n as f64;
    let se_mu = 1.0 / (nf * fit.fisher_j1).sqrt();
    let se_gamma = 1.0 / (nf * fit.fisher_j2).sqrt();
    let half = z * se_mu;
    let covers = half >= PI;
    let half = half.min(PI);
    Ok(AsymptoticCi {
        level,
        z,
        mu_lower: fit.mu_hat.offset(-half),
        mu_upper: fit.mu_hat.offset(half),
        mu_half_width: half,
        mu_covers_circle: covers,
        gamma_lower: (fit.gamma_hat - z * se_gamma).max(f64::MIN_POSITIVE),
        gamma_upper: fit.gamma_hat + z * se_gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gn::GnParams;
    use crate::rng::RngStream;
    use crate::special::{integrate, Quadrature};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn angles(xs: &[f64]) -> Vec<Angle> {
        xs.iter().map(|x| Angle::new(*x).unwrap()).collect()
    }

    fn grid_argmin(sample: &[Angle], points: usize) -> (f64, Vec<f64>) {
        let vals: Vec<f64> = (0..points)
            .map(|i| frechet_function(Angle::new(TAU * i as f64 / points as f64).unwrap(), sample))
            .collect();
        let best = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        (best, vals)
    }

    #[test]
    fn mean_set_examples() {
        let one = angles(&[2.5]);
        assert_eq!(intrinsic_sample_mean(&one).unwrap(), one);
        let pair = intrinsic_sample_mean(&angles(&[FRAC_PI_4, 3.0 * FRAC_PI_4])).unwrap();
        assert_eq!(pair.len(), 1);
        assert!((pair[0].value() - FRAC_PI_2).abs() < 1e-15);
        let anti = intrinsic_sample_mean(&angles(&[0.0, PI])).unwrap();
        assert_eq!(anti.len(), 2);
        assert!((anti[0].value() - FRAC_PI_2).abs() < 1e-12);
        assert!((anti[1].value() - 3.0 * FRAC_PI_2).abs() < 1e-12);
        assert_eq!(intrinsic_sample_mean(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn antipodal_pair_matches_grid() {
        let sample = angles(&[0.0, PI]);
        let points = 1_000_000;
        let (best, vals) = grid_argmin(&sample, points);
        let argmins: Vec<f64> = vals
            .iter()
            .enumerate()
            .filter(|(_, v)| **v <= best + 1e-12)
            .map(|(i, _)| TAU * i as f64 / points as f64)
            .collect();
        assert_eq!(argmins.len(), 2);
        assert!((argmins[0] - FRAC_PI_2).abs() < 1e-5);
        assert!((argmins[1] - 3.0 * FRAC_PI_2).abs() < 1e-5);
    }

    #[test]
    fn wrapped_cluster_mean() {
        let sample = angles(&[TAU - 0.1, 0.05, 0.2]);
        let set = intrinsic_sample_mean(&sample).unwrap();
        assert_eq!(set.len(), 1);
        assert!(geodesic_distance(set[0], Angle::new(0.05).unwrap()) < 1e-14);
    }

    #[test]
    fn mean_set_beats_grid_on_random_samples() {
        let mut rng = RngStream::new(77);
        for trial in 0..40 {
            let n = 1 + (rng.next_u64() % 30) as usize;
            let sample: Vec<Angle> = (0..n)
                .map(|_| Angle::new(TAU * rng.uniform_open01()).unwrap())
                .collect();
            let set = intrinsic_sample_mean(&sample).unwrap();
            let (best, _) = grid_argmin(&sample, 20_000);
            for m in &set {
                assert!(
                    frechet_function(*m, &sample) <= best + 1e-9,
                    "trial {trial}"
                );
            }
        }
    }

    #[test]
    fn summary_examples() {
        let s = circular_summary(&angles(&[1.3])).unwrap();
        assert_eq!(s.intrinsic_variance, 0.0);
        assert!(s.extrinsic_variance.abs() < 1e-15);
        assert!(s.extrinsic_mean.unwrap().distance(Angle::new(1.3).unwrap()) < 1e-15);

        let square = angles(&[0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]);
        let s = circular_summary(&square).unwrap();
        assert!(s.resultant_length < 1e-15);
        assert!(s.extrinsic_mean.is_none());
        assert_eq!(s.intrinsic_mean_set.len(), 4);
        let (best, _) = grid_argmin(&square, 100_000);
        assert!((s.intrinsic_variance - best).abs() < 1e-9);
        // Equispaced: each mean sits halfway between two points.
        assert!((s.intrinsic_variance - 5.0 * PI * PI / 16.0).abs() < 1e-12);
        assert_eq!(circular_summary(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn summary_monte_carlo_variance() {
        let p = GnParams::new(Angle::new(3.0 * FRAC_PI_4).unwrap(), 1.0).unwrap();
        let n = 100_000;
        let sample = p.sample(n, &mut RngStream::new(2024));
        let s = circular_summary(&sample).unwrap();
        let v = gn::intrinsic_variance(1.0).unwrap();
        let se = (gn::squared_distance_variance(1.0).unwrap() / n as f64).sqrt();
        assert!(
            (s.intrinsic_variance - v).abs() < 3.0 * se,
            "{} vs {v}",
            s.intrinsic_variance
        );
    }

    #[test]
    fn fit_inverts_variance() {
        let a = gn::intrinsic_variance(2.0).unwrap().sqrt();
        let sample = angles(&[1.0 - a, 1.0 + a]);
        let fit = fit_gn_mle(&sample).unwrap();
        assert!((fit.gamma_hat - 2.0).abs() < 1e-9);
        assert!(geodesic_distance(fit.mu_hat, Angle::new(1.0).unwrap()) < 1e-14);
        assert!(!fit.near_boundary);
        let k = gn::norm_const(fit.gamma_hat).unwrap();
        let ll = -2.0 * k.ln() - fit.gamma_hat * a * a;
        assert!((fit.log_likelihood - ll).abs() < 1e-12);
        assert!((fit.se_mu - 1.0 / (2.0 * fit.fisher_j1).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn variance_inverse_accuracy() {
        for &g in &[1e-7, 1e-3, 0.2, 1.0, 10.0, 1e4, 1e9] {
            let v = gn::intrinsic_variance(g).unwrap();
            let (back, flagged) = gamma_from_variance(v).unwrap();
            assert!(!flagged);
            assert!((gn::intrinsic_variance(back).unwrap() - v).abs() <= 1e-12);
            if g >= 1e-3 {
                assert!((back - g).abs() < 1e-9 * g, "{g}: {back}");
            }
        }
    }

    #[test]
    fn fit_errors() {
        let square = angles(&[0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]);
        // The grid oracle puts this configuration below π²/3, so it fits.
        let (best, _) = grid_argmin(&square, 100_000);
        assert!(best < PI * PI / 3.0);
        let fit = fit_gn_mle(&square).unwrap();
        assert!(fit.gamma_hat > 0.0);
        assert_eq!(fit.mean_set_multiplicity, 4);

        assert!(matches!(
            fit_gn_mle(&angles(&[2.0; 6])),
            Err(Error::DegenerateSample(_))
        ));
        assert!(matches!(
            fit_gn_mle(&angles(&[2.0])),
            Err(Error::DegenerateSample(_))
        ));
        assert_eq!(fit_gn_mle(&[]), Err(Error::EmptySample));
        assert!(matches!(
            gamma_from_variance(PI * PI / 3.0),
            Err(Error::GammaNotIdentifiable { .. })
        ));
        assert!(matches!(
            gamma_from_variance(4.0),
            Err(Error::GammaNotIdentifiable { .. })
        ));
        let (g, _) = gamma_from_variance(PI * PI / 3.0 - 5e-7).unwrap();
        assert!(g > 0.0 && g < 1e-6);
    }

    #[test]
    fn boundary_flag() {
        // Equispaced points with n = 2m + 1 odd have variance just under π²/3.
        let n = 2001;
        let sample: Vec<Angle> = (0..n)
            .map(|i| Angle::new(TAU * i as f64 / n as f64).unwrap())
            .collect();
        let fit = fit_gn_mle(&sample).unwrap();
        assert!(fit.intrinsic_variance < PI * PI / 3.0);
        assert!(fit.near_boundary);
    }

    #[test]
    fn fisher_examples() {
        let (j1, j2) = fisher_info(1.0).unwrap();
        assert!((j1 - gn::intrinsic_variance(1.0).unwrap()).abs() < 1e-15);
        let k = gn::norm_const(1.0).unwrap();
        let q = Quadrature::new(1e-15, 1e-13, 60).unwrap();
        let m2 = integrate(|t| t * t * (-0.5 * t * t).exp(), -PI, PI, &q).unwrap() / k;
        let m4 = integrate(|t| t.powi(4) * (-0.5 * t * t).exp(), -PI, PI, &q).unwrap() / k;
        assert!((j2 - 0.25 * (m4 - m2 * m2)).abs() < 1e-8);
        let (j1, _) = fisher_info(1e4).unwrap();
        assert!((j1 / 1e4 - 1.0).abs() < 1e-6);
        assert!(fisher_info(0.0).is_err());
        for &g in &[0.01, 0.5, 3.0, 80.0] {
            let (j1, j2) = fisher_info(g).unwrap();
            assert!(j1 > 0.0 && j2 > 0.0);
            let v = gn::intrinsic_variance(g).unwrap();
            assert!((j1 - g * g * v).abs() <= 1e-12 * j1);
            let h = 1e-4 * g;
            let dv = (gn::intrinsic_variance(g + h).unwrap()
                - gn::intrinsic_variance(g - h).unwrap())
                / (2.0 * h);
            assert!((j2 + 0.5 * dv).abs() < 1e-6 * j2, "{g}");
        }
    }

    fn fit_with(mu: f64, gamma_hat: f64, j1: f64) -> MleFit {
        MleFit {
            n: 1,
            mu_hat: Angle::new(mu).unwrap(),
            gamma_hat,
            log_likelihood: 0.0,
            fisher_j1: j1,
            fisher_j2: 0.01,
            se_mu: 1.0 / j1.sqrt(),
            se_gamma: 10.0,
            mean_set_multiplicity: 1,
            intrinsic_variance: 1.0,
            near_boundary: false,
        }
    }

    #[test]
    fn ci_examples() {
        // se_mu = 0.1 with n = 1
        let fit = fit_with(0.0, 2.0, 100.0);
        let ci = asymptotic_ci(&fit, 1, 0.95).unwrap();
        assert!((ci.mu_half_width - 0.19599639845400542).abs() < 1e-9);
        assert!((ci.mu_upper.value() - 0.19599639845400542).abs() < 1e-9);
        assert!((ci.mu_lower.value() - (TAU - 0.19599639845400542)).abs() < 1e-9);
        assert!(ci.contains_mu(Angle::new(TAU - 0.1).unwrap()));
        assert!(!ci.contains_mu(Angle::new(0.3).unwrap()));
        assert_eq!(ci.gamma_lower, f64::MIN_POSITIVE);

        let tiny = asymptotic_ci(&fit, 1, 1e-12).unwrap();
        assert!(tiny.mu_half_width < 1e-12);
        assert!(tiny.mu_lower.distance(fit.mu_hat) < 1e-12);
        assert!((tiny.gamma_upper - 2.0).abs() < 1e-10);

        let wide = asymptotic_ci(&fit_with(1.0, 2.0, 1e-4), 1, 0.99).unwrap();
        assert!(wide.mu_covers_circle);
        assert!(asymptotic_ci(&fit, 1, 1.0).is_err());
        assert!(asymptotic_ci(&fit, 1, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn rotation_equivariance(
            xs in proptest::collection::vec(0.0..TAU, 2..40),
            c in -10.0f64..10.0,
        ) {
            let sample = angles(&xs);
            let rotated: Vec<Angle> = sample.iter().map(|t| t.rotate(c).unwrap()).collect();
            let a = intrinsic_sample_mean(&sample).unwrap();
            let b = intrinsic_sample_mean(&rotated).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for m in &a {
                let moved = m.rotate(c).unwrap();
                prop_assert!(b.iter().any(|x| geodesic_distance(*x, moved) < 1e-10));
            }
            let fa = fit_gn_mle(&sample);
            let fb = fit_gn_mle(&rotated);
            match (fa, fb) {
                (Ok(fa), Ok(fb)) => {
                    prop_assert!((fa.intrinsic_variance - fb.intrinsic_variance).abs() < 1e-10);
                    prop_assert!((fa.gamma_hat - fb.gamma_hat).abs() < 1e-10 * fa.gamma_hat.max(1.0));
                }
                (Err(ea), Err(eb)) => prop_assert_eq!(
                    std::mem::discriminant(&ea),
                    std::mem::discriminant(&eb)
                ),
                _ => prop_assert!(false, "fit outcome changed under rotation"),
            }
        }
    }
}
