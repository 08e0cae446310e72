//! Experiment assembly, forward simulation and inversion.

use impedance_core::forward::{DeltaTrain, SampledTrace, TimeGrid};
use impedance_core::transforms::{event_midpoint_grid, trace_half_grid, Accumulable};
use impedance_core::wavelets::DEFAULT_MOMENT_TOL;
use impedance_core::{
    add_noise, classical_estimate, convolve, greens_function, modified_transform, pressure_classical,
    pressure_refined, refined_transform, to_pressure, ImpedanceEstimate, ImpedanceProfile, LayerStack, Wavelet,
    WaveletParams,
};
use log::info;

use crate::config::{invalid, ConfigError, ExperimentConfig, MethodName, ProfileSpec, WaveletSpec};
use crate::error::Result;
use crate::output::read_wavelet;

/// Minimum number of recording samples across the wavelet's main lobe.
pub const MIN_LOBE_SAMPLES: f64 = 8.0;

/// Far-side margin beyond the slab and the source support, as a fraction
/// of `x_+`.
pub const FAR_MARGIN: f64 = 0.25;

pub fn build_profile(spec: &ProfileSpec) -> std::result::Result<ImpedanceProfile, ConfigError> {
    let p = match spec {
        ProfileSpec::Builtin { name } => return Ok(name.profile()),
        ProfileSpec::Constant {
            value,
            slab_left,
            slab_right,
        } => ImpedanceProfile::constant(*value, *slab_left, *slab_right),
        ProfileSpec::PiecewiseConstant { interfaces, values } => {
            ImpedanceProfile::piecewise_constant(interfaces, values)
        }
        ProfileSpec::PiecewiseLinear { knots } => ImpedanceProfile::piecewise_linear(knots),
        ProfileSpec::Ramp {
            slab_left,
            slab_right,
            zeta_minus,
            zeta_plus,
        } => ImpedanceProfile::ramp(*slab_left, *slab_right, *zeta_minus, *zeta_plus),
        ProfileSpec::Exponential {
            slab_left,
            slab_right,
            zeta_minus,
            rate,
        } => ImpedanceProfile::exponential(*slab_left, *slab_right, *zeta_minus, *rate),
        ProfileSpec::GaussianBump {
            slab_left,
            slab_right,
            background,
            peak,
            center,
            width,
        } => ImpedanceProfile::gaussian_bump(*slab_left, *slab_right, *background, *peak, *center, *width),
        ProfileSpec::Blocky {
            slab_left,
            slab_right,
            zeta_minus,
            layers,
            zeta_plus,
        } => ImpedanceProfile::blocky(*slab_left, *slab_right, *zeta_minus, layers, *zeta_plus),
        ProfileSpec::Oscillatory {
            slab_left,
            slab_right,
            base,
            amplitude,
            cycles,
        } => ImpedanceProfile::oscillatory(*slab_left, *slab_right, *base, *amplitude, *cycles),
    };
    Ok(p?)
}

pub fn build_wavelet(spec: &WaveletSpec, dt: f64) -> Result<Wavelet> {
    match spec {
        WaveletSpec::Builtin {
            name,
            center,
            width,
            amplitude,
        } => {
            let params = WaveletParams {
                center: *center,
                width: *width,
                amplitude: *amplitude,
            };
            Ok(Wavelet::builtin(name.0, params, dt)?)
        }
        WaveletSpec::Csv { path } => read_wavelet(path),
    }
}

/// Width in seconds of the contiguous region around the peak where
/// `|W| >= max |W| / 2`.
pub fn main_lobe_width(w: &Wavelet) -> f64 {
    let s = w.samples();
    let Some((peak, &top)) = s
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    else {
        return 0.0;
    };
    let half = 0.5 * top.abs();
    let left = s[..peak].iter().rev().take_while(|v| v.abs() >= half).count();
    let right = s[peak + 1..].iter().take_while(|v| v.abs() >= half).count();
    (left + right + 1) as f64 * w.dt()
}

/// Order `k` of the first non-vanishing source moment and the matching
/// effective area (`∫W` for `k = 0`, `∫ s^k W / k!` otherwise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceMoment {
    pub order: u32,
    pub area: f64,
}

/// A validated experiment ready to run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub profile: ImpedanceProfile,
    pub stack: LayerStack,
    pub wavelet: Wavelet,
    pub source: SourceMoment,
}

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        let profile = build_profile(&config.profile)?;
        let rec = config.recording;
        if !(rec.dt.is_finite() && rec.dt > 0.0) {
            return Err(invalid(format!("recording.dt must be > 0, got {}", rec.dt)).into());
        }
        if !(config.discretization.is_finite() && config.discretization > 0.0) {
            return Err(invalid(format!("discretization must be > 0, got {}", config.discretization)).into());
        }
        let x_plus = profile.slab_right();
        if !(rec.t_max > 2.0 * x_plus) {
            return Err(invalid(format!(
                "recording.t_max = {} must exceed the slab two-way time 2 x_+ = {}",
                rec.t_max,
                2.0 * x_plus
            ))
            .into());
        }
        let noise = config.noise;
        if !(noise.level.is_finite() && noise.level >= 0.0) {
            return Err(invalid(format!("noise.level must be >= 0, got {}", noise.level)).into());
        }
        if config.methods.is_empty() {
            return Err(invalid("methods must list at least one method").into());
        }

        let wavelet = build_wavelet(&config.wavelet, rec.dt)?;
        let source = if wavelet.is_delta() {
            if noise.level > 0.0 {
                return Err(invalid("noise needs a sampled source; the delta source yields exact impulse data").into());
            }
            SourceMoment {
                order: 0,
                area: wavelet.delta_weight(),
            }
        } else {
            let lobe = main_lobe_width(&wavelet);
            if lobe / rec.dt < MIN_LOBE_SAMPLES * (1.0 - 1e-9) {
                return Err(invalid(format!(
                    "recording.dt = {} leaves {:.1} samples across the source main lobe ({lobe} s); need at least {MIN_LOBE_SAMPLES}",
                    rec.dt,
                    lobe / rec.dt
                ))
                .into());
            }
            let first = wavelet.first_nonzero_moment(DEFAULT_MOMENT_TOL)?;
            SourceMoment {
                order: first.order,
                area: if first.order == 0 { first.moment } else { first.virtual_area() },
            }
        };
        let stack = profile.discretize(config.discretization)?;
        let first_reflector = stack.first_interface().unwrap_or(profile.slab_left());
        let support_end = if wavelet.is_delta() { 0.0 } else { wavelet.end() };
        if !(support_end < first_reflector) {
            return Err(invalid(format!(
                "source support ends at {support_end}, not left of the first reflector at {first_reflector}; shift the wavelet earlier"
            ))
            .into());
        }
        if config.methods.contains(&MethodName::Modified) && source.order == 0 {
            return Err(invalid("method `modified` needs a zero-mean source; use `refined` instead").into());
        }

        Ok(Self {
            config,
            profile,
            stack,
            wavelet,
            source,
        })
    }

    /// `x_+ + support + 0.25 x_+`: where far-side recovery is judged.
    pub fn far_point(&self) -> f64 {
        let x_plus = self.profile.slab_right();
        let support = if self.wavelet.is_delta() { 0.0 } else { self.wavelet.support_width() };
        x_plus + support + FAR_MARGIN * x_plus
    }

    pub fn needs_pressure(&self) -> bool {
        self.config.methods.iter().any(|m| m.is_pressure())
    }

    pub fn simulate(&self) -> Result<Simulation> {
        let rec = self.config.recording;
        let greens = greens_function(&self.stack, rec.t_max)?;
        let velocity = self.record(&greens)?;
        let pressure = if self.needs_pressure() {
            Some(self.record(&to_pressure(&greens))?)
        } else {
            None
        };
        Ok(Simulation {
            greens,
            velocity,
            pressure,
        })
    }

    fn record(&self, response: &DeltaTrain) -> Result<Recorded> {
        if self.wavelet.is_delta() {
            return Ok(Recorded::Impulses(response.scaled(self.wavelet.delta_weight())));
        }
        let rec = self.config.recording;
        let grid = TimeGrid::spanning(0.0, rec.dt, rec.t_max)?;
        let clean = convolve(response, &self.wavelet, &grid)?;
        let noisy = if self.config.noise.level > 0.0 {
            Some(add_noise(&clean, self.config.noise.level, self.config.noise.seed)?)
        } else {
            None
        };
        Ok(Recorded::Sampled { clean, noisy })
    }

    /// Runs one method on recorded data (`data` is pressure data for the
    /// pressure methods).
    pub fn apply(&self, method: MethodName, data: &Observed, grid: &[f64]) -> Result<MethodRun> {
        let c = self.profile.zeta_minus();
        let area = self.source.area;
        let k = self.source.order;
        let mut notice = None;
        let mut applied = method;
        if method == MethodName::Refined && k > 0 {
            let msg = format!(
                "source has zero mean (first moment of order {k}); running `modified` in place of `refined`"
            );
            info!("{msg}");
            notice = Some(msg);
            applied = MethodName::Modified;
        }
        let effective = data.integrated(k)?;
        let estimate = match applied {
            MethodName::Modified => match data {
                Observed::Sampled(d) => modified_transform(d, &self.wavelet, c, grid)?,
                Observed::Impulses(_) => {
                    return Err(invalid("method `modified` needs sampled data from a zero-mean source").into())
                }
            },
            MethodName::Refined => effective.with(|g| refined_transform(g, area, c, grid))?,
            MethodName::Classical => effective.scaled(1.0 / area).with(|g| classical_estimate(g, c, grid))?,
            MethodName::PressureRefined => effective.with(|g| pressure_refined(g, area, c, grid))?,
            MethodName::PressureClassical => effective
                .scaled(1.0 / area)
                .with(|g| pressure_classical(g, c, grid))?,
        };
        Ok(MethodRun {
            requested: method,
            applied,
            estimate,
            notice,
        })
    }

    /// Every configured method on its default grid.
    pub fn invert(&self, velocity: &Observed, pressure: Option<&Observed>) -> Result<Vec<MethodRun>> {
        let mut runs = Vec::new();
        for &method in &self.config.methods {
            let data = if method.is_pressure() {
                pressure.ok_or_else(|| {
                    crate::error::CliError::MissingData(format!("method `{method}` needs pressure data"))
                })?
            } else {
                velocity
            };
            let grid = default_grid(data, self.config.recording.t_max);
            runs.push(self.apply(method, data, &grid)?);
        }
        Ok(runs)
    }

    /// Relative error of `estimate` against the true profile at `x`.
    pub fn relative_error(&self, estimate: f64, x: f64) -> f64 {
        let truth = self.profile.eval(x);
        (estimate - truth).abs() / truth
    }
}

/// Default estimate grid: event midpoints for impulse data, half the
/// sample times for traces.
pub fn default_grid(data: &Observed, t_max: f64) -> Vec<f64> {
    match data {
        Observed::Impulses(g) => event_midpoint_grid(g, 0.5 * t_max),
        Observed::Sampled(d) => trace_half_grid(d),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recorded {
    /// Exact data of a delta source.
    Impulses(DeltaTrain),
    Sampled {
        clean: SampledTrace,
        noisy: Option<SampledTrace>,
    },
}

impl Recorded {
    /// The data an inversion sees: noisy if noise was added.
    pub fn observed(&self) -> Observed {
        match self {
            Self::Impulses(g) => Observed::Impulses(g.clone()),
            Self::Sampled { clean, noisy } => Observed::Sampled(noisy.as_ref().unwrap_or(clean).clone()),
        }
    }

    pub fn clean(&self) -> Observed {
        match self {
            Self::Impulses(g) => Observed::Impulses(g.clone()),
            Self::Sampled { clean, .. } => Observed::Sampled(clean.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Observed {
    Impulses(DeltaTrain),
    Sampled(SampledTrace),
}

impl Observed {
    fn integrated(&self, k: u32) -> Result<Observed> {
        match self {
            _ if k == 0 => Ok(self.clone()),
            Self::Sampled(d) => Ok(Self::Sampled(d.antiderivative(k)?)),
            Self::Impulses(_) => Err(invalid("impulse data cannot come from a zero-mean source").into()),
        }
    }

    fn scaled(&self, factor: f64) -> Observed {
        match self {
            Self::Impulses(g) => Self::Impulses(g.scaled(factor)),
            Self::Sampled(d) => Self::Sampled(d.scaled(factor)),
        }
    }

    fn with<T>(&self, f: impl Fn(&dyn Accumulable) -> impedance_core::Result<T>) -> Result<T> {
        Ok(match self {
            Self::Impulses(g) => f(g)?,
            Self::Sampled(d) => f(d)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub greens: DeltaTrain,
    pub velocity: Recorded,
    pub pressure: Option<Recorded>,
}

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub requested: MethodName,
    pub applied: MethodName,
    pub estimate: ImpedanceEstimate,
    pub notice: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{NoiseSpec, RecordingSpec};
    use crate::suite::BuiltinProfile;
    use impedance_core::BuiltinWavelet;
    use std::path::PathBuf;

    fn single_interface(wavelet: BuiltinWavelet, methods: Vec<MethodName>) -> ExperimentConfig {
        ExperimentConfig {
            name: "single".into(),
            profile: ProfileSpec::PiecewiseConstant {
                interfaces: vec![1.5],
                values: vec![1.0, 3.0],
            },
            discretization: 0.01,
            wavelet: WaveletSpec::builtin(wavelet),
            noise: NoiseSpec::default(),
            recording: RecordingSpec { t_max: 6.0, dt: 1e-3 },
            methods,
            output_dir: PathBuf::from("unused"),
        }
    }

    #[test]
    fn delta_single_interface_is_exact() {
        let exp = Experiment::new(single_interface(
            BuiltinWavelet::Delta,
            vec![MethodName::Refined, MethodName::Classical, MethodName::PressureRefined],
        ))
        .unwrap();
        let sim = exp.simulate().unwrap();
        assert_eq!(sim.greens.events(), &[impedance_core::Event::new(3.0, -0.5)]);
        let runs = exp
            .invert(&sim.velocity.observed(), sim.pressure.as_ref().map(|p| p.observed()).as_ref())
            .unwrap();
        // default grid: x = 0.75 before the arrival, x = t_max / 2 after it
        assert_eq!(runs[0].estimate.grid, vec![0.75, 3.0]);
        let beyond = |run: &MethodRun| run.estimate.values[1];
        assert_eq!(beyond(&runs[0]), 3.0);
        assert!((beyond(&runs[1]) - std::f64::consts::E).abs() < 1e-12);
        assert_eq!(beyond(&runs[2]), 3.0);
        assert_eq!(runs[0].estimate.values[0], 1.0);
    }

    #[test]
    fn zero_mean_refined_redirects() {
        let exp = Experiment::new(single_interface(BuiltinWavelet::DGaussian, vec![MethodName::Refined])).unwrap();
        assert_eq!(exp.source.order, 1);
        let sim = exp.simulate().unwrap();
        let x = exp.far_point();
        let run = exp.apply(MethodName::Refined, &sim.velocity.observed(), &[x]).unwrap();
        assert_eq!(run.applied, MethodName::Modified);
        assert!(run.notice.is_some());
        assert!((run.estimate.values[0] - 3.0).abs() < 1e-3);
    }

    #[test]
    fn gaussian_matches_impulse_pipeline_beyond_support() {
        let exp = Experiment::new(single_interface(
            BuiltinWavelet::Gaussian,
            vec![MethodName::Refined, MethodName::PressureClassical],
        ))
        .unwrap();
        let sim = exp.simulate().unwrap();
        let x = exp.far_point();
        let run = exp.apply(MethodName::Refined, &sim.velocity.observed(), &[x]).unwrap();
        assert!((run.estimate.values[0] - 3.0).abs() < 1e-6);
        let p = sim.pressure.unwrap().observed();
        let run = exp.apply(MethodName::PressureClassical, &p, &[x]).unwrap();
        assert!((run.estimate.values[0] - std::f64::consts::E).abs() < 1e-6);
    }

    #[test]
    fn validation_messages() {
        let mut c = single_interface(BuiltinWavelet::Gaussian, vec![MethodName::Refined]);
        c.recording.t_max = 2.0;
        assert!(Experiment::new(c).unwrap_err().to_string().contains("t_max"));

        let mut c = single_interface(BuiltinWavelet::Gaussian, vec![MethodName::Refined]);
        c.recording.dt = 0.02;
        assert!(Experiment::new(c).unwrap_err().to_string().contains("main lobe"));

        let mut c = single_interface(BuiltinWavelet::Gaussian, vec![MethodName::Refined]);
        c.wavelet = WaveletSpec::Builtin {
            name: crate::config::WaveletName(BuiltinWavelet::Gaussian),
            center: 1.4,
            width: 0.05,
            amplitude: 1.0,
        };
        assert!(Experiment::new(c).unwrap_err().to_string().contains("support"));

        let c = single_interface(BuiltinWavelet::Gaussian, vec![MethodName::Modified]);
        assert!(Experiment::new(c).unwrap_err().to_string().contains("zero-mean"));

        let mut c = single_interface(BuiltinWavelet::Delta, vec![MethodName::Refined]);
        c.noise.level = 0.1;
        assert!(Experiment::new(c).is_err());
    }

    #[test]
    fn builtin_experiments_validate() {
        for p in BuiltinProfile::ALL {
            for w in [BuiltinWavelet::Delta, BuiltinWavelet::Gaussian, BuiltinWavelet::DGaussian, BuiltinWavelet::D2Gaussian] {
                let exp = Experiment::new(p.experiment(w)).unwrap();
                assert!(2.0 * exp.far_point() < exp.config.recording.t_max);
            }
        }
    }
}
