use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diophantine::ThresholdRule;
use crate::error::{Error, Result};
use crate::quadform::FormSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    #[default]
    Generate,
    Centres,
    DioCheck,
    Bohr,
    Quadgap,
    Dettail,
    Cliquepack,
    Cutoffs,
    CompareSt,
    Search,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Generate => "generate",
            Experiment::Centres => "centres",
            Experiment::DioCheck => "dio-check",
            Experiment::Bohr => "bohr",
            Experiment::Quadgap => "quadgap",
            Experiment::Dettail => "dettail",
            Experiment::Cliquepack => "cliquepack",
            Experiment::Cutoffs => "cutoffs",
            Experiment::CompareSt => "compare-st",
            Experiment::Search => "search",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// Blue iff the base-3 digits avoid 2.
    Folklore,
    /// Behrend's sphere set.
    Behrend,
    /// One spherical annulus about the origin.
    GreenWolf,
    /// Random quadratic annuli about `M` random centres.
    Green,
}

impl std::str::FromStr for Construction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::InvalidArgument(format!("construction: unknown value '{s}' (folklore, behrend, green-wolf, green)")))
    }
}

impl std::str::FromStr for Experiment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::InvalidArgument(format!("experiment: unknown value '{s}'")))
    }
}

/// One experiment. Field names follow the parameter table; unset fields take the
/// defaults of the construction, and overriding a formula default requires `toy_ack`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub toy_ack: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub construction: Option<Construction>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub centres: Option<usize>,
    /// Entries of the quadratic perturbation are uniform in `[-e_bound, e_bound]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub behrend_d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_max: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_max: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_attempts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subspace_dim: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdRule>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_extra: Option<usize>,

    #[serde(rename = "X", skip_serializing_if = "Option::is_none")]
    pub x: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vol_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum_fraction: Option<f64>,

    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b_exp: Option<f64>,
    #[serde(rename = "L", skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diag_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_sample: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deltas: Option<Vec<f64>>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi_count: Option<usize>,

    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
}

pub(crate) fn required<T: Clone>(v: &Option<T>, field: &str, exp: Experiment) -> Result<T> {
    v.clone().ok_or_else(|| Error::InvalidArgument(format!("{field}: required by {}", exp.name())))
}

pub(crate) fn field_err<T>(field: &str, msg: impl std::fmt::Display) -> Result<T> {
    Err(Error::InvalidArgument(format!("{field}: {msg}")))
}

/// A field whose value differs from its formula default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Override {
    pub field: String,
    pub value: f64,
    pub default: f64,
}

fn differs(value: f64, default: f64) -> bool {
    (value - default).abs() > 1e-12 * default.abs().max(1e-300)
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig { experiment, ..Default::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// Hex SHA-256 of the canonical JSON form, ignoring the output path.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output = None;
        let json = serde_json::to_string(&c).expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }

    pub fn dim_f(&self) -> Option<f64> {
        self.dim.map(|d| d as f64)
    }

    /// `ρ`, defaulting to `D^{-4}`.
    pub fn rho_or_default(&self) -> Option<f64> {
        self.rho.or_else(|| self.dim_f().map(|d| d.powi(-4)))
    }

    /// Every formula-valued field set to something other than its formula.
    pub fn overrides(&self) -> Vec<Override> {
        let mut out = Vec::new();
        let mut check = |field: &str, value: Option<f64>, default: Option<f64>| {
            if let (Some(v), Some(d)) = (value, default) {
                if differs(v, d) {
                    out.push(Override { field: field.into(), value: v, default: d });
                }
            }
        };
        let d = self.dim_f();
        check("rho", self.rho, d.map(|d| d.powi(-4)));
        check("width", self.width, self.n.zip(d).map(|(n, d)| (n as f64).powf(-4.0 / d)));
        check("e_bound", self.e_bound, d.map(|d| d.powi(-4)));
        let centre_default = match self.experiment {
            Experiment::Centres => self.rho_or_default().zip(d).map(|(rho, d)| rho.powf(-d / 4.0).ceil()),
            _ => d.map(|d| d.powf(d)),
        };
        check("M", self.centres.map(|m| m as f64), centre_default);
        check("xi_max", self.xi_max.map(|x| x as f64), self.rho_or_default().map(|r| r.powi(-3).floor()));
        check("tolerance", self.tolerance, Some(0.01));
        check("separation", self.separation, Some(10.0));
        check("c1", self.c1, Some(2048.0));
        let c1 = self.c1.unwrap_or(2048.0);
        check("vol_min", self.vol_min, d.map(|d| d.powf(-c1 * d)));
        check("sum_fraction", self.sum_fraction, Some(0.5));
        check("diag_min", self.diag_min, Some(FormSampler::DEFAULT_DIAG_MIN));
        out
    }

    /// Rejects overrides without `toy_ack`, naming the first overridden field.
    pub fn validate(&self) -> Result<()> {
        if !self.toy_ack {
            if let Some(o) = self.overrides().first() {
                return field_err(
                    &o.field,
                    format!("{} overrides the formula default {}; set toy_ack to acknowledge a toy run", o.value, o.default),
                );
            }
        }
        for (name, v) in [("rho", self.rho), ("width", self.width), ("radius", self.radius), ("Q", self.q), ("L", self.l)] {
            if let Some(v) = v {
                if !(v > 0.0) || !v.is_finite() {
                    return field_err(name, "must be positive and finite");
                }
            }
        }
        for (name, v) in [("N", self.n), ("D", self.dim), ("M", self.centres), ("s", self.s), ("m", self.m)] {
            if v == Some(0) {
                return field_err(name, "must be positive");
            }
        }
        if self.r == Some(0) {
            return field_err("r", "must be positive");
        }
        Ok(())
    }
}
