//! Experiment configuration (JSON).
//!
//! ```json
//! {
//!   "name": "p1",
//!   "profile": { "kind": "builtin", "name": "p1" },
//!   "discretization": 0.005,
//!   "wavelet": { "kind": "builtin", "name": "gaussian", "center": 0.5, "width": 0.05, "amplitude": 1.0 },
//!   "noise": { "level": 0.0, "seed": 0 },
//!   "recording": { "t_max": 8.0, "dt": 0.001 },
//!   "methods": ["refined", "classical"],
//!   "output_dir": "out/p1"
//! }
//! ```
//!
//! Profile kinds: `builtin` (`p1`..`p4`), `constant`, `piecewise-constant`,
//! `piecewise-linear`, `ramp`, `exponential`, `gaussian-bump`, `blocky`,
//! `oscillatory`. Wavelet kinds: `builtin` (`delta`, `gaussian`,
//! `dgaussian`, `d2gaussian`) and `csv` (two columns `t,value` on a uniform
//! grid).

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use impedance_core::BuiltinWavelet;

use crate::suite::BuiltinProfile;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] impedance_core::Error),
}

pub(crate) fn invalid(message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(message.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    Builtin {
        name: BuiltinProfile,
    },
    Constant {
        value: f64,
        slab_left: f64,
        slab_right: f64,
    },
    /// `values[i]` holds on `[interfaces[i-1], interfaces[i])`.
    PiecewiseConstant {
        interfaces: Vec<f64>,
        values: Vec<f64>,
    },
    PiecewiseLinear {
        knots: Vec<(f64, f64)>,
    },
    Ramp {
        slab_left: f64,
        slab_right: f64,
        zeta_minus: f64,
        zeta_plus: f64,
    },
    Exponential {
        slab_left: f64,
        slab_right: f64,
        zeta_minus: f64,
        rate: f64,
    },
    GaussianBump {
        slab_left: f64,
        slab_right: f64,
        background: f64,
        peak: f64,
        center: f64,
        width: f64,
    },
    Blocky {
        slab_left: f64,
        slab_right: f64,
        zeta_minus: f64,
        layers: Vec<f64>,
        zeta_plus: f64,
    },
    Oscillatory {
        slab_left: f64,
        slab_right: f64,
        base: f64,
        amplitude: f64,
        cycles: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WaveletSpec {
    Builtin {
        name: WaveletName,
        #[serde(default = "default_center")]
        center: f64,
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Csv {
        path: PathBuf,
    },
}

fn default_center() -> f64 {
    0.5
}
fn default_width() -> f64 {
    0.05
}
fn default_amplitude() -> f64 {
    1.0
}

impl WaveletSpec {
    pub fn builtin(kind: BuiltinWavelet) -> Self {
        Self::Builtin {
            name: WaveletName(kind),
            center: default_center(),
            width: default_width(),
            amplitude: default_amplitude(),
        }
    }
}

/// Serde wrapper for [`BuiltinWavelet`] using its lowercase name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct WaveletName(pub BuiltinWavelet);

impl TryFrom<String> for WaveletName {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse::<BuiltinWavelet>().map(Self).map_err(|e| e.to_string())
    }
}

impl From<WaveletName> for String {
    fn from(w: WaveletName) -> String {
        w.0.name().to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    /// Standard deviation as a fraction of the clean trace's peak.
    pub level: f64,
    pub seed: u64,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        Self { level: 0.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecordingSpec {
    pub t_max: f64,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Refined,
    Classical,
    Modified,
    PressureRefined,
    PressureClassical,
}

impl MethodName {
    pub const ALL: [MethodName; 5] = [
        Self::Refined,
        Self::Classical,
        Self::Modified,
        Self::PressureRefined,
        Self::PressureClassical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Refined => "refined",
            Self::Classical => "classical",
            Self::Modified => "modified",
            Self::PressureRefined => "pressure-refined",
            Self::PressureClassical => "pressure-classical",
        }
    }

    pub fn is_pressure(self) -> bool {
        matches!(self, Self::PressureRefined | Self::PressureClassical)
    }
}

impl fmt::Display for MethodName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodName {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub profile: ProfileSpec,
    /// Largest layer thickness (one-way time) of the step approximation.
    pub discretization: f64,
    pub wavelet: WaveletSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub recording: RecordingSpec,
    pub methods: Vec<MethodName>,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }
}
