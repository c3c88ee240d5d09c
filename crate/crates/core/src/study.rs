//! Replicated simulation studies and the tabulated curves behind them.
//!
//! Replication `j` always draws from `RngStream::child(seed, j)`, so results
//! do not depend on scheduling and different sample sizes share random
//! numbers.

use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{geodesic_distance, signed_displacement};
use crate::error::{Error, Result};
use crate::estimation::{fisher_info, fit_gn_mle, MleFit};
use crate::gn::{self, GnParams};
use crate::rng::RngStream;
use crate::special::norm_cdf;
use crate::vm;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarianceCurveRow {
    pub concentration: f64,
    pub gn_var_i: f64,
    pub gn_var_e: f64,
    pub vm_var_i: f64,
    pub vm_var_e: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FisherCurveRow {
    pub concentration: f64,
    pub inv_j1: f64,
    pub inv_j2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MseSummary {
    pub mu_star: f64,
    pub gamma_star: f64,
    pub n: usize,
    pub m: usize,
    pub mse_mu: f64,
    pub mse_gamma: f64,
    pub failures: usize,
    /// Per replication `(d(μ̂, μ*)², (γ̂ - γ*)²)`, `None` where the fit failed.
    #[serde(skip)]
    pub squared_errors: Vec<Option<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltSummary {
    pub n: usize,
    pub m: usize,
    /// `√n` times the signed displacement from `μ*` to `μ̂`, in replication order.
    pub errors: Vec<f64>,
    pub asymptotic_variance: f64,
    pub empirical_variance: f64,
    pub ks_statistic: f64,
    pub failures: usize,
}

/// `points` values evenly spaced in log scale from `min` to `max`.
pub fn log_grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(Error::domain(format!(
            "grid bounds [{min}, {max}] must satisfy 0 < min <= max < inf"
        )));
    }
    if points == 0 || (points == 1 && max > min) {
        return Err(Error::domain(
            "a grid spanning a range needs at least two points",
        ));
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let (a, b) = (min.ln(), max.ln());
    let step = (b - a) / (points - 1) as f64;
    Ok((0..points)
        .map(|i| match i {
            0 => min,
            i if i == points - 1 => max,
            i => (a + step * i as f64).exp(),
        })
        .collect())
}

/// Intrinsic and extrinsic variances of both laws at each concentration.
pub fn variance_curves(grid: &[f64]) -> Result<Vec<VarianceCurveRow>> {
    grid.iter()
        .map(|&c| {
            let params = GnParams::new(crate::circle::Angle::ZERO, c)?;
            Ok(VarianceCurveRow {
                concentration: c,
                gn_var_i: gn::intrinsic_variance(c)?,
                gn_var_e: gn::extrinsic_variance(&params)?,
                vm_var_i: vm::vm_intrinsic_variance(c)?,
                vm_var_e: vm::vm_extrinsic_variance(c)?,
            })
        })
        .collect()
}

/// Asymptotic variances `1/J₁` and `1/J₂` along the grid.
pub fn fisher_curves(grid: &[f64]) -> Result<Vec<FisherCurveRow>> {
    grid.iter()
        .map(|&c| {
            let (j1, j2) = fisher_info(c)?;
            Ok(FisherCurveRow {
                concentration: c,
                inv_j1: 1.0 / j1,
                inv_j2: 1.0 / j2,
            })
        })
        .collect()
}

/// Kolmogorov-Smirnov distance between the empirical law of `values` and `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(values: &[f64], cdf: F) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).max((i + 1) as f64 / m - f)
        })
        .fold(0.0, f64::max)
}

/// Pearson correlation; `NaN` when either input is constant.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len()) as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}

fn one_replication(params: &GnParams, n: usize, seed: u64, j: usize) -> Result<MleFit> {
    let mut rng = RngStream::child(seed, j as u64);
    fit_gn_mle(&params.sample(n, &mut rng))
}

/// Fits `reps` independent samples of size `n`, in replication order.
pub fn replicate_fits(params: &GnParams, n: usize, reps: usize, seed: u64) -> Vec<Result<MleFit>> {
    (0..reps)
        .into_par_iter()
        .map(|j| one_replication(params, n, seed, j))
        .collect()
}

/// Same as [`replicate_fits`] on the calling thread.
pub fn replicate_fits_serial(
    params: &GnParams,
    n: usize,
    reps: usize,
    seed: u64,
) -> Vec<Result<MleFit>> {
    (0..reps)
        .map(|j| one_replication(params, n, seed, j))
        .collect()
}

fn check_plan(n: usize, reps: usize) -> Result<()> {
    if reps == 0 {
        return Err(Error::domain("at least one replication is required"));
    }
    if n == 0 {
        return Err(Error::domain("sample size must be at least one"));
    }
    Ok(())
}

/// Mean squared errors over the fits that succeeded.
///
/// Fits that fail with an estimation error are counted and left out; any
/// other error aborts the study.
pub fn mse_from_fits(params: &GnParams, n: usize, fits: &[Result<MleFit>]) -> Result<MseSummary> {
    let mut squared_errors = Vec::with_capacity(fits.len());
    for fit in fits {
        match fit {
            Ok(f) => {
                let d = geodesic_distance(f.mu_hat, params.mu());
                let g = f.gamma_hat - params.gamma();
                squared_errors.push(Some((d * d, g * g)));
            }
            Err(e) if e.is_estimation_error() => squared_errors.push(None),
            Err(e) => return Err(e.clone()),
        }
    }
    let ok: Vec<(f64, f64)> = squared_errors.iter().flatten().copied().collect();
    let count = ok.len() as f64;
    let (mse_mu, mse_gamma) = if ok.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        (
            ok.iter().map(|e| e.0).sum::<f64>() / count,
            ok.iter().map(|e| e.1).sum::<f64>() / count,
        )
    };
    Ok(MseSummary {
        mu_star: params.mu().value(),
        gamma_star: params.gamma(),
        n,
        m: fits.len(),
        mse_mu,
        mse_gamma,
        failures: fits.len() - ok.len(),
        squared_errors,
    })
}

pub fn mse_study(params: &GnParams, n: usize, reps: usize, seed: u64) -> Result<MseSummary> {
    check_plan(n, reps)?;
    mse_from_fits(params, n, &replicate_fits(params, n, reps, seed))
}

/// Standardized location errors and their distance to the limiting `N(0, 1/J₁)`.
pub fn clt_study(params: &GnParams, n: usize, reps: usize, seed: u64) -> Result<CltSummary> {
    check_plan(n, reps)?;
    let root_n = (n as f64).sqrt();
    let mut errors = Vec::with_capacity(reps);
    let mut failures = 0;
    for fit in replicate_fits(params, n, reps, seed) {
        match fit {
            Ok(f) => errors.push(root_n * signed_displacement(params.mu(), f.mu_hat)),
            Err(e) if e.is_estimation_error() => failures += 1,
            Err(e) => return Err(e),
        }
    }
    let (j1, _) = fisher_info(params.gamma())?;
    let sd = j1.sqrt();
    let ks = ks_statistic(&errors, |x| norm_cdf(x * sd));
    let m = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / m;
    let empirical_variance =
        errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (m - 1.0);
    Ok(CltSummary {
        n,
        m: reps,
        errors,
        asymptotic_variance: 1.0 / j1,
        empirical_variance,
        ks_statistic: ks,
        failures,
    })
}
