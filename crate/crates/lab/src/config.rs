//! Flat key-value run configuration.
//!
//! A config file is a flat TOML table; every key is optional and has a
//! default. Command-line `--key=value` pairs override the file, and the
//! `RIESZFLOW_OUTPUT_DIR` environment variable overrides `output_dir` only.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `subcommand` | from the command line | `linear`, `semilinear`, `admissible`, `sweep`, `oracle-test` |
//! | `n` | 1 | dimension |
//! | `sigma` | 1.0 | order of the fractional Laplacian |
//! | `alpha` | 0.5 | Riesz order, in `(0, n)` |
//! | `p` | 4.0 | power of the nonlinearity |
//! | `m` | 1.0 | data exponent, in `[1, 2]` |
//! | `N` | 8192 | points per axis (power of two) |
//! | `L` | `"auto"` | box length; `auto` is `2π(10·t_end)^{1/(2σ)}` |
//! | `dt` | 0.1 | time step |
//! | `t_end` | 200.0 | final time |
//! | `dealias` | true | 2/3 rule after the pointwise power |
//! | `amplitude` | 0.01 | data amplitude |
//! | `profile` | `"gaussian"` | `gaussian`, `bump`, `noise_bandlimited` |
//! | `mean_zero` | false | replace the profile by its mean-zero Laplacian |
//! | `seed` | 0 | seed of the noise profile |
//! | `sample_every` | 10 | steps between recorded snapshots |
//! | `fit_start`, `fit_end` | `0.1·t_end`, `t_end` | slope-fit window |
//! | `tolerance` | 0.1 | slope tolerance of the rate verdicts |
//! | `output_dir` | `"rieszflow-out"` | where every artifact is written |
//! | `emit` | `["csv", "json"]` | subset of `csv`, `json`, `fields` |
//! | `sweep_param` | `"m"` | `n`, `sigma`, `alpha`, `p`, `m`, `amplitude` |
//! | `sweep_values` | `[1.0, 1.5, 2.0]` | values of the swept parameter |
//! | `sweep_mode` | `"linear"` | `linear` or `semilinear` |
//! | `region_p_min`, `region_p_max`, `region_p_count` | 1.5, 8.0, 14 | `p` axis of the region table |
//! | `region_n_max` | 6 | largest `n` of the region table |

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rieszflow_core::{DataProfile, GridSpec, ModelParams, SolverConfig};
use serde::{Deserialize, Serialize};

use crate::error::LabError;

pub const OUTPUT_DIR_ENV: &str = "RIESZFLOW_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Linear,
    Semilinear,
    Admissible,
    Sweep,
    OracleTest,
}

impl Subcommand {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Semilinear => "semilinear",
            Self::Admissible => "admissible",
            Self::Sweep => "sweep",
            Self::OracleTest => "oracle-test",
        }
    }
}

impl FromStr for Subcommand {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(Self::Linear),
            "semilinear" => Ok(Self::Semilinear),
            "admissible" => Ok(Self::Admissible),
            "sweep" => Ok(Self::Sweep),
            "oracle-test" => Ok(Self::OracleTest),
            other => Err(LabError::Config(format!(
                "unknown subcommand `{other}` (expected linear, semilinear, admissible, sweep or oracle-test)"
            ))),
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emit {
    Csv,
    Json,
    Fields,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Linear,
    Semilinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    N,
    Sigma,
    Alpha,
    P,
    M,
    Amplitude,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            Self::N => "n",
            Self::Sigma => "sigma",
            Self::Alpha => "alpha",
            Self::P => "p",
            Self::M => "m",
            Self::Amplitude => "amplitude",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxLength {
    Fixed(f64),
    Auto(AutoTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// Keys exactly as they may appear in a file; everything is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    subcommand: Option<Subcommand>,
    n: Option<usize>,
    sigma: Option<f64>,
    alpha: Option<f64>,
    p: Option<f64>,
    m: Option<f64>,
    #[serde(rename = "N")]
    points: Option<usize>,
    #[serde(rename = "L")]
    box_length: Option<BoxLength>,
    dt: Option<f64>,
    t_end: Option<f64>,
    dealias: Option<bool>,
    amplitude: Option<f64>,
    profile: Option<DataProfile>,
    mean_zero: Option<bool>,
    seed: Option<u64>,
    sample_every: Option<usize>,
    fit_start: Option<f64>,
    fit_end: Option<f64>,
    tolerance: Option<f64>,
    output_dir: Option<PathBuf>,
    emit: Option<Vec<Emit>>,
    sweep_param: Option<SweepParam>,
    sweep_values: Option<Vec<f64>>,
    sweep_mode: Option<SweepMode>,
    region_p_min: Option<f64>,
    region_p_max: Option<f64>,
    region_p_count: Option<usize>,
    region_n_max: Option<usize>,
}

/// Fully populated, validated configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub model: ModelParams,
    pub grid: GridSpec,
    /// `L` as written (`auto` or a number); `grid.box_length` holds the resolved value.
    pub box_length: BoxLength,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub amplitude: f64,
    pub profile: DataProfile,
    pub mean_zero: bool,
    pub seed: u64,
    pub sample_every: usize,
    pub fit_start: f64,
    pub fit_end: f64,
    pub tolerance: f64,
    pub output_dir: PathBuf,
    pub emit: BTreeSet<Emit>,
    pub sweep_param: SweepParam,
    pub sweep_values: Vec<f64>,
    pub sweep_mode: SweepMode,
    pub region_p_min: f64,
    pub region_p_max: f64,
    pub region_p_count: usize,
    pub region_n_max: usize,
}

impl RunConfig {
    pub fn solver(&self) -> SolverConfig {
        let mut c = SolverConfig::new(self.model, self.grid, self.dt, self.t_end);
        c.dealias = self.dealias;
        c.amplitude = self.amplitude;
        c.profile = self.profile;
        c.mean_zero = self.mean_zero;
        c.seed = self.seed;
        c.sample_every = self.sample_every;
        c
    }

    pub fn emits(&self, e: Emit) -> bool {
        self.emit.contains(&e)
    }

    /// Checks everything the core types do not check themselves.
    pub fn validate(&self) -> Result<(), LabError> {
        if self.subcommand != Subcommand::OracleTest {
            self.model.validate()?;
        }
        if matches!(self.subcommand, Subcommand::Linear | Subcommand::Semilinear) {
            self.solver().validate()?;
        }
        let bad = |key: &str, msg: &str| Err(LabError::Config(format!("`{key}` {msg}")));
        if !(self.fit_start >= 1.0 && self.fit_end >= self.fit_start) {
            return bad("fit_start", "must satisfy 1 <= fit_start <= fit_end");
        }
        if !(self.tolerance.is_finite() && self.tolerance >= 0.0) {
            return bad("tolerance", "must be finite and non-negative");
        }
        if !(self.region_p_min > 1.0 && self.region_p_max >= self.region_p_min) {
            return bad(
                "region_p_min",
                "must satisfy 1 < region_p_min <= region_p_max",
            );
        }
        if self.region_p_count == 0 || self.region_n_max == 0 {
            return bad("region_p_count", "and region_n_max must be positive");
        }
        if self.sweep_values.iter().any(|v| !v.is_finite()) {
            return bad("sweep_values", "must be finite");
        }
        Ok(())
    }
}

/// Parses `value` as a TOML literal, falling back to a bare string (or a list
/// of them when it contains commas).
fn parse_override_value(value: &str) -> toml::Value {
    if let Ok(table) = toml::from_str::<toml::Table>(&format!("v = {value}")) {
        if let Some(v) = table.get("v") {
            return v.clone();
        }
    }
    if value.contains(',') {
        return toml::Value::Array(
            value
                .split(',')
                .map(|s| parse_override_value(s.trim()))
                .collect(),
        );
    }
    toml::Value::String(value.to_string())
}

/// Splits `--key=value` into a table entry.
pub fn parse_override(arg: &str) -> Result<(String, toml::Value), LabError> {
    let body = arg.strip_prefix("--").unwrap_or(arg);
    let Some((key, value)) = body.split_once('=') else {
        return Err(LabError::Config(format!(
            "override `{arg}` is not of the form --key=value"
        )));
    };
    Ok((key.to_string(), parse_override_value(value)))
}

/// Reads `file` (if any), applies `overrides` and the environment, fills
/// defaults and validates.
pub fn parse_config(
    subcommand: Option<Subcommand>,
    file: Option<&Path>,
    overrides: &[String],
) -> Result<RunConfig, LabError> {
    let mut table = match file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                LabError::Config(format!("cannot read config `{}`: {e}", path.display()))
            })?;
            toml::from_str::<toml::Table>(&text)
                .map_err(|e| LabError::Config(format!("`{}`: {e}", path.display())))?
        }
        None => toml::Table::new(),
    };
    for arg in overrides {
        let (key, value) = parse_override(arg)?;
        table.insert(key, value);
    }
    if let Some(s) = subcommand {
        table.insert("subcommand".into(), toml::Value::String(s.name().into()));
    }
    for key in LIST_KEYS {
        if let Some(v) = table.get_mut(key) {
            if !v.is_array() {
                *v = toml::Value::Array(vec![v.clone()]);
            }
        }
    }
    let raw = deserialize(table)?;
    let mut config = resolve(raw)?;
    if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
        if !dir.is_empty() {
            config.output_dir = PathBuf::from(dir);
        }
    }
    config.validate()?;
    Ok(config)
}

const LIST_KEYS: [&str; 2] = ["emit", "sweep_values"];

/// On failure, retries key by key so the message can name the offender.
fn deserialize(table: toml::Table) -> Result<RawConfig, LabError> {
    let message = match RawConfig::deserialize(toml::Value::Table(table.clone())) {
        Ok(raw) => return Ok(raw),
        Err(e) => e.message().to_string(),
    };
    for (key, value) in table {
        let single = toml::Table::from_iter([(key.clone(), value)]);
        if let Err(e) = RawConfig::deserialize(toml::Value::Table(single)) {
            return Err(LabError::Config(format!("`{key}`: {}", e.message())));
        }
    }
    Err(LabError::Config(message))
}

fn resolve(raw: RawConfig) -> Result<RunConfig, LabError> {
    let subcommand = raw
        .subcommand
        .ok_or_else(|| LabError::Config("no subcommand given".into()))?;
    let model = ModelParams {
        n: raw.n.unwrap_or(1),
        sigma: raw.sigma.unwrap_or(1.0),
        alpha: raw.alpha.unwrap_or(0.5),
        p: raw.p.unwrap_or(4.0),
        m: raw.m.unwrap_or(1.0),
    };
    let t_end = raw.t_end.unwrap_or(200.0);
    let box_length = raw.box_length.unwrap_or(BoxLength::Auto(AutoTag::Auto));
    let length = match box_length {
        BoxLength::Fixed(l) => l,
        BoxLength::Auto(_) => GridSpec::suggested_box_length(t_end, model.sigma),
    };
    let grid = GridSpec {
        dim: model.n,
        points_per_axis: raw.points.unwrap_or(8192),
        box_length: length,
    };
    if subcommand != Subcommand::OracleTest && subcommand != Subcommand::Admissible {
        grid.validate()?;
    }
    Ok(RunConfig {
        subcommand,
        model,
        grid,
        box_length,
        dt: raw.dt.unwrap_or(0.1),
        t_end,
        dealias: raw.dealias.unwrap_or(true),
        amplitude: raw.amplitude.unwrap_or(0.01),
        profile: raw.profile.unwrap_or(DataProfile::Gaussian),
        mean_zero: raw.mean_zero.unwrap_or(false),
        seed: raw.seed.unwrap_or(0),
        sample_every: raw.sample_every.unwrap_or(10),
        fit_start: raw.fit_start.unwrap_or((0.1 * t_end).max(1.0)),
        fit_end: raw.fit_end.unwrap_or(t_end),
        tolerance: raw.tolerance.unwrap_or(0.1),
        output_dir: raw
            .output_dir
            .unwrap_or_else(|| PathBuf::from("rieszflow-out")),
        emit: raw
            .emit
            .map(|v| v.into_iter().collect())
            .unwrap_or_else(|| [Emit::Csv, Emit::Json].into_iter().collect()),
        sweep_param: raw.sweep_param.unwrap_or(SweepParam::M),
        sweep_values: raw.sweep_values.unwrap_or_else(|| vec![1.0, 1.5, 2.0]),
        sweep_mode: raw.sweep_mode.unwrap_or(SweepMode::Linear),
        region_p_min: raw.region_p_min.unwrap_or(1.5),
        region_p_max: raw.region_p_max.unwrap_or(8.0),
        region_p_count: raw.region_p_count.unwrap_or(14),
        region_n_max: raw.region_n_max.unwrap_or(6),
    })
}
