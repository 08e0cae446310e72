//! Built-in impedance profiles and default experiments.
//!
//! All four profiles share one geometry: `ζ_- = 1` above `x_- = 1.5`, a slab
//! of width `0.3` and the default Gaussian source (support inside `[0, 1]`)
//! ahead of the slab.
//!
//! * `p1`: three equal blocks `1.5, 2, 3` between `1` and `4`.
//! * `p2`: smooth rise to about `2` and back down to `1.1`.
//! * `p3`: low-contrast sinusoid, eight cycles of ±10%.
//! * `p4`: linear ramp `1 → 2` over the first half, then a jump to `3`.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use impedance_core::{BuiltinWavelet, ImpedanceProfile};

use crate::config::{invalid, ConfigError, ExperimentConfig, MethodName, NoiseSpec, RecordingSpec, ProfileSpec, WaveletSpec};

pub const SLAB_LEFT: f64 = 1.5;
pub const SLAB_WIDTH: f64 = 0.3;
pub const SLAB_RIGHT: f64 = SLAB_LEFT + SLAB_WIDTH;
pub const DISCRETIZATION: f64 = 0.005;
pub const DT: f64 = 1e-3;
pub const T_MAX: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinProfile {
    P1,
    P2,
    P3,
    P4,
}

impl BuiltinProfile {
    pub const ALL: [BuiltinProfile; 4] = [Self::P1, Self::P2, Self::P3, Self::P4];

    pub fn name(self) -> &'static str {
        match self {
            Self::P1 => "p1",
            Self::P2 => "p2",
            Self::P3 => "p3",
            Self::P4 => "p4",
        }
    }

    pub fn profile(self) -> ImpedanceProfile {
        let (l, r, w) = (SLAB_LEFT, SLAB_RIGHT, SLAB_WIDTH);
        let built = match self {
            Self::P1 => ImpedanceProfile::blocky(l, r, 1.0, &[1.5, 2.0, 3.0], 4.0),
            Self::P2 => ImpedanceProfile::new(
                move |x| {
                    let s = (x - l) / w;
                    1.0 + (PI * s).sin().powi(2) + 0.1 * s
                },
                l,
                r,
                1.0,
                1.1,
            ),
            Self::P3 => ImpedanceProfile::oscillatory(l, r, 1.0, 0.1, 8.0),
            Self::P4 => ImpedanceProfile::new(
                move |x| {
                    let s = (x - l) / w;
                    if s < 0.5 {
                        1.0 + 2.0 * s
                    } else {
                        3.0
                    }
                },
                l,
                r,
                1.0,
                3.0,
            ),
        };
        built.expect("built-in profile parameters are valid")
    }

    /// Default experiment: this profile, `wavelet`, the refined and
    /// classical estimates (modified instead of refined for zero-mean
    /// sources).
    pub fn experiment(self, wavelet: BuiltinWavelet) -> ExperimentConfig {
        let first = if matches!(wavelet, BuiltinWavelet::Delta | BuiltinWavelet::Gaussian) {
            MethodName::Refined
        } else {
            MethodName::Modified
        };
        ExperimentConfig {
            name: format!("{}-{}", self.name(), wavelet.name()),
            profile: ProfileSpec::Builtin { name: self },
            discretization: DISCRETIZATION,
            wavelet: WaveletSpec::builtin(wavelet),
            noise: NoiseSpec::default(),
            recording: RecordingSpec { t_max: T_MAX, dt: DT },
            methods: vec![first, MethodName::Classical],
            output_dir: PathBuf::from("out").join(format!("{}-{}", self.name(), wavelet.name())),
        }
    }
}

impl fmt::Display for BuiltinProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinProfile {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s.to_ascii_lowercase())
            .ok_or_else(|| invalid(format!("unknown built-in profile `{s}` (expected p1..p4)")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_match_their_descriptions() {
        let p1 = BuiltinProfile::P1.profile();
        assert_eq!(p1.zeta_plus() / p1.zeta_minus(), 4.0);
        let p4 = BuiltinProfile::P4.profile();
        assert_eq!(p4.zeta_plus() / p4.zeta_minus(), 3.0);
        let p2 = BuiltinProfile::P2.profile();
        assert!((p2.eval(SLAB_LEFT + 0.5 * SLAB_WIDTH) - 2.05).abs() < 1e-12);
        let p3 = BuiltinProfile::P3.profile();
        let stack = p3.discretize(DISCRETIZATION).unwrap();
        assert!(stack.len() > 40);
        assert!(stack.reflectivities().iter().all(|r| r.abs() < 0.05));
        for p in BuiltinProfile::ALL {
            let prof = p.profile();
            assert_eq!(prof.slab_left(), SLAB_LEFT);
            assert_eq!(prof.slab_right(), SLAB_RIGHT);
            assert_eq!(prof.eval(0.0), 1.0);
            assert!((prof.eval(SLAB_RIGHT) - prof.zeta_plus()).abs() < 1e-12);
        }
    }

    #[test]
    fn names_round_trip() {
        for p in BuiltinProfile::ALL {
            assert_eq!(p.name().parse::<BuiltinProfile>().unwrap(), p);
        }
        assert!("p5".parse::<BuiltinProfile>().is_err());
    }
}
