use thiserror::Error;

/// Errors raised by the modeling and inversion routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("impedance must be strictly positive, found {value} at x = {position}")]
    NonPositiveImpedance { position: f64, value: f64 },

    #[error("reflectivity {value} at interface {index} has magnitude >= 1")]
    ReflectivityOutOfRange { index: usize, value: f64 },

    #[error("recording time {t_max} does not reach the last primary at {required}")]
    RecordingTooShort { t_max: f64, required: f64 },

    #[error("delta wavelet cannot be sampled; use the delta train directly")]
    DeltaWavelet,

    #[error("no non-vanishing moment of order <= {k_max}; wavelet is unusable")]
    UnusableWavelet { k_max: u32 },

    #[error("wavelet has non-zero mean (k = 0); use the refined transform with w = integral of the wavelet")]
    NonZeroMeanWavelet,

    #[error("wavelet area w = 0; use the zero-mean (modified) transform")]
    ZeroWaveletArea,

    #[error("oracle guard exceeded: {0}")]
    OracleGuard(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
