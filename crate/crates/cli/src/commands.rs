use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use geonorm::estimation::{asymptotic_ci, fisher_info, fit_gn_mle};
use geonorm::gn::{self, trig_moment, GnParams, MAX_TRIG_ORDER};
use geonorm::study::{self, log_grid};
use geonorm::vm::vm_fit_moments;
use geonorm::{Angle, RngStream};

use crate::args::{CltArgs, CurveKind, CurvesArgs, FitArgs, MomentsArgs, MseArgs, SampleArgs};
use crate::output::{sig17, Sink, Table};
use crate::CliError;

fn params(mu: f64, gamma: f64) -> Result<GnParams, CliError> {
    Ok(GnParams::new(Angle::new(mu)?, gamma)?)
}

pub fn sample(a: SampleArgs) -> Result<(), CliError> {
    let p = params(a.mu, a.gamma)?;
    let draws = p.sample(a.n, &mut RngStream::new(a.seed));
    let mut table = Table::new(Sink::open(a.common.out.as_deref())?, &["index", "theta"])?;
    for (i, theta) in draws.iter().enumerate() {
        table.row([i.to_string(), sig17(theta.value())])?;
    }
    table.finish()
}

/// Reads the `theta` column, or the only column, of a CSV file with a header.
pub fn read_angles(path: &Path) -> Result<Vec<Angle>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let column = match headers.iter().position(|h| h == "theta") {
        Some(c) => c,
        None if headers.len() == 1 => 0,
        None => {
            return Err(CliError::Parse(format!(
                "{}: no 'theta' column in header",
                path.display()
            )))
        }
    };
    let mut angles = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = record.get(column).unwrap_or("");
        let value: f64 = field.parse().map_err(|_| {
            CliError::Parse(format!(
                "{}:{line}: cannot read '{field}' as an angle",
                path.display()
            ))
        })?;
        let angle = Angle::new(value)
            .map_err(|e| CliError::Parse(format!("{}:{line}: {e}", path.display())))?;
        angles.push(angle);
    }
    Ok(angles)
}

pub fn fit(a: FitArgs) -> Result<(), CliError> {
    let sample = read_angles(&a.input)?;
    let fit = fit_gn_mle(&sample)?;
    let ci = asymptotic_ci(&fit, fit.n, a.level)?;
    let mut out = json!({
        "n": fit.n,
        "mu_hat": fit.mu_hat.value(),
        "gamma_hat": fit.gamma_hat,
        "se_mu": fit.se_mu,
        "se_gamma": fit.se_gamma,
        "log_likelihood": fit.log_likelihood,
        "fisher_j1": fit.fisher_j1,
        "fisher_j2": fit.fisher_j2,
        "intrinsic_variance": fit.intrinsic_variance,
        "mean_set_multiplicity": fit.mean_set_multiplicity,
        "near_boundary": fit.near_boundary,
        "level": ci.level,
        "mu_ci_lower": ci.mu_lower.value(),
        "mu_ci_upper": ci.mu_upper.value(),
        "mu_ci_covers_circle": ci.mu_covers_circle,
        "gamma_ci_lower": ci.gamma_lower,
        "gamma_ci_upper": ci.gamma_upper,
    });
    let fields = out.as_object_mut().expect("object literal");
    match vm_fit_moments(&sample) {
        Ok(vm) => {
            fields.insert("vm_mu".into(), json!(vm.mu().value()));
            fields.insert("vm_kappa".into(), json!(vm.kappa()));
        }
        Err(e) => {
            fields.insert("vm_mu".into(), Value::Null);
            fields.insert("vm_kappa".into(), Value::Null);
            fields.insert("vm_error".into(), json!(e.to_string()));
        }
    }
    Sink::open(a.common.out.as_deref())?.write_json(&out)
}

pub fn moments(a: MomentsArgs) -> Result<(), CliError> {
    let p = params(a.mu, a.gamma)?;
    let (j1, j2) = fisher_info(a.gamma)?;
    let mut fields = Map::new();
    fields.insert("mu".into(), json!(p.mu().value()));
    fields.insert("gamma".into(), json!(a.gamma));
    fields.insert("norm_const".into(), json!(gn::norm_const(a.gamma)?));
    fields.insert("log_norm_const".into(), json!(gn::log_norm_const(a.gamma)?));
    fields.insert(
        "intrinsic_variance".into(),
        json!(gn::intrinsic_variance(a.gamma)?),
    );
    fields.insert(
        "extrinsic_variance".into(),
        json!(gn::extrinsic_variance(&p)?),
    );
    fields.insert("fisher_j1".into(), json!(j1));
    fields.insert("fisher_j2".into(), json!(j2));
    for order in 1..=MAX_TRIG_ORDER {
        let m = trig_moment(order, &p)?;
        fields.insert(format!("trig_re_{order}"), json!(m.re));
        fields.insert(format!("trig_im_{order}"), json!(m.im));
        fields.insert(
            format!("resultant_length_{order}"),
            json!(m.resultant_length),
        );
    }
    Sink::open(a.common.out.as_deref())?.write_json(&Value::Object(fields))
}

pub fn curves(a: CurvesArgs) -> Result<(), CliError> {
    let grid = log_grid(a.grid_min, a.grid_max, a.grid_points)?;
    let sink = Sink::open(a.common.out.as_deref())?;
    match a.kind {
        CurveKind::Variance => {
            let rows = study::variance_curves(&grid)?;
            let mut table = Table::new(
                sink,
                &[
                    "concentration",
                    "gn_var_I",
                    "gn_var_E",
                    "vm_var_I",
                    "vm_var_E",
                ],
            )?;
            for r in rows {
                table.row(
                    [
                        r.concentration,
                        r.gn_var_i,
                        r.gn_var_e,
                        r.vm_var_i,
                        r.vm_var_e,
                    ]
                    .map(sig17),
                )?;
            }
            table.finish()
        }
        CurveKind::Fisher => {
            let rows = study::fisher_curves(&grid)?;
            let mut table = Table::new(sink, &["concentration", "inv_j1", "inv_j2"])?;
            for r in rows {
                table.row([r.concentration, r.inv_j1, r.inv_j2].map(sig17))?;
            }
            table.finish()
        }
    }
}

fn pairs(mu: &[f64], gamma: &[f64]) -> Result<Vec<(f64, f64)>, CliError> {
    match (mu.len(), gamma.len()) {
        (0, _) | (_, 0) => Err(CliError::Parse(
            "--mu and --gamma need at least one value".into(),
        )),
        (a, b) if a == b => Ok(mu.iter().copied().zip(gamma.iter().copied()).collect()),
        (1, _) => Ok(gamma.iter().map(|g| (mu[0], *g)).collect()),
        (_, 1) => Ok(mu.iter().map(|m| (*m, gamma[0])).collect()),
        (a, b) => Err(CliError::Parse(format!(
            "--mu has {a} values and --gamma has {b}; give equal counts or a single value"
        ))),
    }
}

pub fn mse_study(a: MseArgs) -> Result<(), CliError> {
    let cells = pairs(&a.mu, &a.gamma)?;
    if a.n.is_empty() {
        return Err(CliError::Parse("--n needs at least one sample size".into()));
    }
    let checked: Vec<GnParams> = cells
        .iter()
        .map(|&(m, g)| params(m, g))
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(
        Sink::open(a.common.out.as_deref())?,
        &[
            "mu_star",
            "gamma_star",
            "n",
            "m",
            "mse_mu",
            "mse_gamma",
            "failures",
        ],
    )?;
    for p in &checked {
        for &n in &a.n {
            let s = study::mse_study(p, n, a.reps, a.seed)?;
            table.row([
                sig17(s.mu_star),
                sig17(s.gamma_star),
                s.n.to_string(),
                s.m.to_string(),
                sig17(s.mse_mu),
                sig17(s.mse_gamma),
                s.failures.to_string(),
            ])?;
            // rows already written survive an interrupted run
            table.flush()?;
        }
    }
    table.finish()
}

fn sidecar_path(a: &CltArgs) -> Option<PathBuf> {
    a.sidecar.clone().or_else(|| {
        a.common.out.as_ref().map(|p| {
            let mut s = p.clone().into_os_string();
            s.push(".json");
            PathBuf::from(s)
        })
    })
}

pub fn clt_study(a: CltArgs) -> Result<(), CliError> {
    let p = params(a.mu, a.gamma)?;
    let s = study::clt_study(&p, a.n, a.reps, a.seed)?;
    let mut table = Table::new(
        Sink::open(a.common.out.as_deref())?,
        &["index", "standardized_error"],
    )?;
    for (i, e) in s.errors.iter().enumerate() {
        table.row([i.to_string(), sig17(*e)])?;
    }
    table.finish()?;

    let rng = RngStream::new(a.seed);
    let meta = json!({
        "mu_star": p.mu().value(),
        "gamma_star": a.gamma,
        "n": s.n,
        "m": s.m,
        "seed": a.seed,
        "rng_algorithm": rng.algorithm().id(),
        "asymptotic_variance": s.asymptotic_variance,
        "empirical_variance": s.empirical_variance,
        "ks_statistic": s.ks_statistic,
        "ks_critical_0_01": 1.628 / (s.errors.len() as f64).sqrt(),
        "failures": s.failures,
        "generated_at": chrono::Utc::now().to_rfc3339(),
    });
    match sidecar_path(&a) {
        Some(path) => Sink::open(Some(&path))?.write_json(&meta),
        None => {
            eprintln!("{}", serde_json::to_string(&meta).expect("json value"));
            Ok(())
        }
    }
}
