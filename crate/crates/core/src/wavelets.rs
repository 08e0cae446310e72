//! Source waveforms, their moments, and the virtual wavelet used for
//! zero-mean sources.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{factorial, repeated_cumulative_trapezoid, trapezoid};

/// Highest moment order searched by [`Wavelet::first_nonzero_moment`].
pub const DEFAULT_MAX_MOMENT: u32 = 4;

/// Relative zero-test tolerance for moments.
pub const DEFAULT_MOMENT_TOL: f64 = 1e-6;

/// Relative cutoff below which built-in wavelets are truncated.
const TRUNCATION: f64 = 1e-12;

/// A compactly supported source waveform sampled on a uniform grid, or the
/// ideal impulse.
///
/// Sample `i` sits at `start + i * dt`; the waveform is zero outside the
/// sampled window and linearly interpolated inside it. The impulse is kept
/// symbolic and never sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavelet {
    samples: Vec<f64>,
    start: f64,
    dt: f64,
    is_delta: bool,
}

impl Wavelet {
    /// The unit impulse at the origin.
    pub fn delta() -> Self {
        Self {
            samples: Vec::new(),
            start: 0.0,
            dt: 1.0,
            is_delta: true,
        }
    }

    pub fn sampled(samples: Vec<f64>, start: f64, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        if !start.is_finite() {
            return Err(invalid("start", "must be finite"));
        }
        if samples.is_empty() {
            return Err(invalid("samples", "wavelet needs at least one sample"));
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(invalid("samples", "non-finite sample"));
        }
        Ok(Self {
            samples,
            start,
            dt,
            is_delta: false,
        })
    }

    /// Builds a wavelet from `(t, value)` pairs on a uniform grid.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        if pairs.len() < 2 {
            return Err(invalid("pairs", "need at least two samples"));
        }
        let start = pairs[0].0;
        let dt = pairs[1].0 - pairs[0].0;
        for (i, &(t, _)) in pairs.iter().enumerate() {
            let expected = start + i as f64 * dt;
            if (t - expected).abs() > 1e-6 * dt {
                return Err(invalid(
                    "pairs",
                    format!("sample {i} at t = {t} is off the uniform grid (expected {expected})"),
                ));
            }
        }
        Self::sampled(pairs.iter().map(|p| p.1).collect(), start, dt)
    }

    /// Samples one of the built-in waveforms with spacing `dt`.
    pub fn builtin(kind: BuiltinWavelet, params: WaveletParams, dt: f64) -> Result<Self> {
        if kind == BuiltinWavelet::Delta {
            return Ok(Self::delta().scaled(params.amplitude));
        }
        if !(params.width.is_finite() && params.width > 0.0) {
            return Err(invalid("width", format!("must be > 0, got {}", params.width)));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        let sigma = params.width;
        let half = (10.0 * sigma / dt).ceil() as i64;
        let norm = params.amplitude / (sigma * (2.0 * PI).sqrt());
        let eval = |s: f64| {
            let u = (s - params.center) / sigma;
            let g = norm * (-0.5 * u * u).exp();
            match kind {
                BuiltinWavelet::Gaussian => g,
                BuiltinWavelet::DGaussian => -u / sigma * g,
                BuiltinWavelet::D2Gaussian => (u * u - 1.0) / (sigma * sigma) * g,
                BuiltinWavelet::Delta => unreachable!(),
            }
        };
        let times: Vec<f64> = (-half..=half).map(|i| params.center + i as f64 * dt).collect();
        let values: Vec<f64> = times.iter().map(|&s| eval(s)).collect();
        let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let keep = |v: &f64| v.abs() >= TRUNCATION * peak;
        let first = values.iter().position(keep).unwrap_or(0);
        let last = values.iter().rposition(keep).unwrap_or(values.len() - 1);
        Self::sampled(values[first..=last].to_vec(), times[first], dt)
    }

    pub fn is_delta(&self) -> bool {
        self.is_delta
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of the last sample.
    pub fn end(&self) -> f64 {
        if self.is_delta {
            self.start
        } else {
            self.start + (self.samples.len() - 1) as f64 * self.dt
        }
    }

    /// Width of the sampled window (zero for the impulse).
    pub fn support_width(&self) -> f64 {
        self.end() - self.start
    }

    /// Impulse weight for the delta wavelet (1 for the plain impulse).
    pub fn delta_weight(&self) -> f64 {
        if self.is_delta {
            self.samples.first().copied().unwrap_or(1.0)
        } else {
            0.0
        }
    }

    /// Linearly interpolated value; zero outside the window.
    pub fn value_at(&self, t: f64) -> f64 {
        if self.is_delta {
            return 0.0;
        }
        let pos = (t - self.start) / self.dt;
        if pos < 0.0 {
            return 0.0;
        }
        let i = pos.floor() as usize;
        let last = self.samples.len() - 1;
        if i > last {
            return 0.0;
        }
        if i == last {
            return if pos == last as f64 { self.samples[last] } else { 0.0 };
        }
        let frac = pos - i as f64;
        self.samples[i] + frac * (self.samples[i + 1] - self.samples[i])
    }

    /// `W(-x)`.
    pub fn reversed(&self) -> Self {
        if self.is_delta {
            return self.clone();
        }
        let mut samples = self.samples.clone();
        samples.reverse();
        Self {
            samples,
            start: -self.end(),
            dt: self.dt,
            is_delta: false,
        }
    }

    /// `x -> factor * W(x)`.
    pub fn scaled(&self, factor: f64) -> Self {
        if self.is_delta {
            return Self {
                samples: vec![self.delta_weight() * factor],
                ..self.clone()
            };
        }
        Self {
            samples: self.samples.iter().map(|s| s * factor).collect(),
            ..self.clone()
        }
    }

    /// `x -> b W(b x)`, the area-preserving dilation.
    pub fn dilated(&self, b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(invalid("b", format!("must be > 0, got {b}")));
        }
        if self.is_delta {
            return Ok(self.clone());
        }
        Ok(Self {
            samples: self.samples.iter().map(|s| b * s).collect(),
            start: self.start / b,
            dt: self.dt / b,
            is_delta: false,
        })
    }

    pub fn l1_norm(&self) -> f64 {
        if self.is_delta {
            return self.delta_weight().abs();
        }
        let abs: Vec<f64> = self.samples.iter().map(|s| s.abs()).collect();
        trapezoid(&abs, self.dt)
    }

    /// `∫ s^k W(s) ds` by the trapezoid rule on the sample grid.
    pub fn moment(&self, k: u32) -> f64 {
        if self.is_delta {
            return if k == 0 { self.delta_weight() } else { 0.0 };
        }
        let weighted: Vec<f64> = self
            .samples
            .iter()
            .enumerate()
            .map(|(i, &w)| (self.start + i as f64 * self.dt).powi(k as i32) * w)
            .collect();
        trapezoid(&weighted, self.dt)
    }

    /// Smallest `k <= DEFAULT_MAX_MOMENT` whose moment is non-zero relative to
    /// `tol * ||W||_1 * width^k`.
    pub fn first_nonzero_moment(&self, tol: f64) -> Result<FirstMoment> {
        self.first_nonzero_moment_up_to(tol, DEFAULT_MAX_MOMENT)
    }

    pub fn first_nonzero_moment_up_to(&self, tol: f64, k_max: u32) -> Result<FirstMoment> {
        let norm = self.l1_norm();
        if norm == 0.0 {
            return Err(Error::UnusableWavelet { k_max });
        }
        let width = self.support_width();
        for k in 0..=k_max {
            let m = self.moment(k);
            if m.abs() > tol * norm * width.powi(k as i32) {
                return Ok(FirstMoment { order: k, moment: m });
            }
        }
        Err(Error::UnusableWavelet { k_max })
    }

    /// `V(x) = -∫_{-∞}^x (s - x)^{k-1} / (k-1)! W(s) ds`, sampled on the same grid.
    ///
    /// `V = (-1)^k W^{(-k)}` where `W^{(-k)}` is the k-fold antiderivative.
    /// When the first `k` moments vanish, `V` is supported on the window of `W`.
    pub fn virtual_wavelet(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::NonZeroMeanWavelet);
        }
        if self.is_delta {
            return Err(Error::DeltaWavelet);
        }
        let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
        let samples = repeated_cumulative_trapezoid(&self.samples, self.dt, k)
            .into_iter()
            .map(|v| sign * v)
            .collect();
        Self::sampled(samples, self.start, self.dt)
    }
}

/// Order and value of the first non-vanishing moment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstMoment {
    pub order: u32,
    /// `∫ s^k W(s) ds`, without the factorial.
    pub moment: f64,
}

impl FirstMoment {
    /// `v = moment / k!`, the area of the virtual wavelet.
    pub fn virtual_area(&self) -> f64 {
        self.moment / factorial(self.order)
    }
}

/// Built-in source waveforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuiltinWavelet {
    Delta,
    /// Gaussian bump with the given area.
    Gaussian,
    /// First derivative of the Gaussian bump (zero mean).
    DGaussian,
    /// Second derivative of the Gaussian bump (zero mean and zero first moment).
    D2Gaussian,
}

impl BuiltinWavelet {
    pub fn name(self) -> &'static str {
        match self {
            Self::Delta => "delta",
            Self::Gaussian => "gaussian",
            Self::DGaussian => "dgaussian",
            Self::D2Gaussian => "d2gaussian",
        }
    }
}

impl fmt::Display for BuiltinWavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinWavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(Self::Delta),
            "gaussian" => Ok(Self::Gaussian),
            "dgaussian" => Ok(Self::DGaussian),
            "d2gaussian" => Ok(Self::D2Gaussian),
            other => Err(invalid("wavelet", format!("unknown built-in wavelet `{other}`"))),
        }
    }
}

/// Shape parameters: `center` and `width` (standard deviation) in seconds,
/// `amplitude` is the area of the underlying Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveletParams {
    pub center: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl Default for WaveletParams {
    fn default() -> Self {
        Self {
            center: 0.5,
            width: 0.05,
            amplitude: 1.0,
        }
    }
}
