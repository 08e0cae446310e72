//! Plane-wave reflection from layered acoustic media and impedance recovery.
//!
//! * [`media`]: impedance profiles in one-way travel time and their step
//!   discretization ([`LayerStack`]).
//! * [`wavelets`]: source waveforms, moments and virtual wavelets.
//! * [`forward`]: the exact reflection Green's function of a step medium as a
//!   delta train, recorded data, noise, pressure conversion.
//! * [`transforms`]: accumulation-based impedance estimates (refined,
//!   classical, zero-mean, pressure) and diagnostics.
//! * [`oracle`]: brute-force ray enumeration used to validate [`forward`].

// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod forward;
pub mod media;
pub mod oracle;
pub mod quadrature;
pub mod transforms;
pub mod wavelets;

pub use error::{Error, Result};
pub use forward::{
    add_noise, convolve, greens_function, greens_function_with, to_pressure, total_reflection, DeltaTrain, Event,
    ForwardOptions, SampledTrace, TimeGrid,
};
pub use media::{FiniteDifference, ImpedanceProfile, LayerStack};
pub use transforms::{
    accumulate, classical_estimate, energy_lag, modified_transform, pressure_classical, pressure_refined,
    refined_transform, ImpedanceEstimate, Method,
};
pub use wavelets::{BuiltinWavelet, Wavelet, WaveletParams};
