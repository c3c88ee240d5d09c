use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "geonorm",
    version,
    about = "Geodesic Normal distribution on the circle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw a sample and write it as CSV
    Sample(SampleArgs),
    /// Fit a sample read from CSV by maximum likelihood
    Fit(FitArgs),
    /// Normalizer, variances, trigonometric moments and Fisher information
    Moments(MomentsArgs),
    /// Variances or inverse Fisher information over a concentration grid
    Curves(CurvesArgs),
    /// Mean squared error of the estimates over replicated samples
    MseStudy(MseArgs),
    /// Standardized location errors over replicated samples
    CltStudy(CltArgs),
}

/// Accepts plain numbers and multiples of pi such as `3pi/4` or `-pi/2`.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, Some(b)),
        None => (t, None),
    };
    let coeff = match num.strip_suffix("pi") {
        Some("") | Some("+") => 1.0,
        Some("-") => -1.0,
        Some(c) => c
            .trim_end_matches('*')
            .parse::<f64>()
            .map_err(|_| format!("cannot read '{s}' as a number"))?,
        None => return Err(format!("cannot read '{s}' as a number")),
    };
    let den = match den {
        Some(d) => d
            .parse::<f64>()
            .map_err(|_| format!("cannot read '{s}' as a number"))?,
        None => 1.0,
    };
    Ok(coeff * PI / den)
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct Common {
    /// JSON object whose keys override the flags
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Output file; standard output when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct SampleArgs {
    #[arg(long, default_value = "0", value_parser = parse_real, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct FitArgs {
    /// CSV with a `theta` column, or a single column of angles
    pub input: PathBuf,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct MomentsArgs {
    #[arg(long, default_value = "0", value_parser = parse_real, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// Intrinsic and extrinsic variances of both laws
    Variance,
    /// 1/J1 and 1/J2
    Fisher,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct CurvesArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 100)]
    pub grid_points: usize,
    #[arg(long, value_enum, default_value_t = CurveKind::Variance)]
    pub kind: CurveKind,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct MseArgs {
    /// True locations, paired with --gamma (a single value is reused)
    #[arg(long, value_delimiter = ',', default_values = ["3pi/4", "7pi/4"], value_parser = parse_real, allow_hyphen_values = true)]
    pub mu: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 10.0])]
    pub gamma: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 20, 50, 100, 500])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize, Deserialize)]
pub struct CltArgs {
    #[arg(long, default_value = "3pi/4", value_parser = parse_real, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub gamma: f64,
    #[arg(long, default_value_t = 500)]
    pub n: usize,
    #[arg(long, default_value_t = 2000)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Where to write the JSON summary; defaults to the output path with `.json` appended
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// Replaces fields of `args` with the keys of the JSON object in `path`.
pub fn apply_config<T>(args: T, path: Option<&Path>) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let overrides: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut merged = serde_json::to_value(&args).map_err(|e| CliError::Parse(e.to_string()))?;
    let fields = merged
        .as_object_mut()
        .expect("arguments serialize to an object");
    for (key, value) in overrides {
        let key = key.replace('-', "_");
        if !fields.contains_key(&key) {
            return Err(CliError::Parse(format!(
                "{}: unknown key '{key}'",
                path.display()
            )));
        }
        fields.insert(key, value);
    }
    serde_json::from_value(merged).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}
