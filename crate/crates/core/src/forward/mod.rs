//! Exact forward modeling: the reflection Green's function of a step medium
//! as a delta train, recorded data by convolution with the reversed source,
//! noise injection and pressure conversion.

mod propagation;
mod trace;
mod train;

pub use propagation::{event_response, lattice_response, Lattice};
pub use trace::{SampledTrace, TimeGrid};
pub use train::{to_pressure, DeltaTrain, Event};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Error, Result};
use crate::media::LayerStack;
use crate::wavelets::Wavelet;

/// Which propagation engine to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Engine {
    /// Lattice when the interfaces are commensurate within budget, event queue otherwise.
    #[default]
    Auto,
    Lattice,
    EventQueue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForwardOptions {
    /// Output events below `prune_tol * max |a|` are dropped; the event
    /// engine also discards packets below `prune_tol`.
    pub prune_tol: f64,
    pub engine: Engine,
    /// Largest `q` tried when searching for a lattice unit `min_gap / q`.
    pub max_subdivision: u32,
    /// Lattice work limit, in layer-steps.
    pub lattice_budget: usize,
    /// Event-queue work limit, in processed packets.
    pub max_packets: usize,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self {
            prune_tol: 1e-14,
            engine: Engine::Auto,
            max_subdivision: 64,
            lattice_budget: 2_000_000_000,
            max_packets: 50_000_000,
        }
    }
}

/// Reflection Green's function `G_ζ` on `(0, t_max]` with default options.
pub fn greens_function(stack: &LayerStack, t_max: f64) -> Result<DeltaTrain> {
    greens_function_with(stack, t_max, &ForwardOptions::default())
}

pub fn greens_function_with(stack: &LayerStack, t_max: f64, options: &ForwardOptions) -> Result<DeltaTrain> {
    let reflectivities = stack.reflectivities();
    for (index, &value) in reflectivities.iter().enumerate() {
        if !(value.abs() < 1.0) {
            return Err(Error::ReflectivityOutOfRange { index, value });
        }
    }
    let Some(last) = stack.last_interface() else {
        return Ok(DeltaTrain::empty());
    };
    if !(t_max >= 2.0 * last) {
        return Err(Error::RecordingTooShort {
            t_max,
            required: 2.0 * last,
        });
    }
    let interfaces = stack.interfaces();

    let lattice = match options.engine {
        Engine::EventQueue => None,
        Engine::Lattice | Engine::Auto => Lattice::detect(interfaces, options.max_subdivision)
            .filter(|l| (t_max / l.unit) * interfaces.len() as f64 <= options.lattice_budget as f64),
    };
    let raw = match (lattice, options.engine) {
        (Some(lattice), _) => lattice_response(&lattice, &reflectivities, t_max),
        (None, Engine::Lattice) => {
            return Err(invalid(
                "engine",
                "interfaces are not commensurate within the lattice budget",
            ))
        }
        (None, _) => event_response(interfaces, &reflectivities, t_max, options.prune_tol, options.max_packets)?,
    };
    let peak = raw.iter().fold(0.0_f64, |m, e| m.max(e.amplitude.abs()));
    let threshold = options.prune_tol * peak;
    // Event-engine arrivals along different paths can differ in the last bits.
    DeltaTrain::from_events(raw, 1e-12, threshold)
}

/// `tanh(Σ artanh r_j)`, the integral of the Green's function.
pub fn total_reflection(reflectivities: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for (index, &value) in reflectivities.iter().enumerate() {
        if !(value.abs() < 1.0) {
            return Err(Error::ReflectivityOutOfRange { index, value });
        }
        sum += value.atanh();
    }
    Ok(sum.tanh())
}

/// Recorded data `D = W̃ * G`, i.e. `D(t) = Σ a_i W(t_i - t)`, on `grid`.
pub fn convolve(g: &DeltaTrain, wavelet: &Wavelet, grid: &TimeGrid) -> Result<SampledTrace> {
    if wavelet.is_delta() {
        return Err(Error::DeltaWavelet);
    }
    let mut trace = SampledTrace::zeros(grid);
    let samples = trace.samples_mut();
    for e in g.iter() {
        // W(t_i - t) != 0 only for t in [t_i - end, t_i - start]
        let lo = ((e.time - wavelet.end() - grid.start) / grid.dt).ceil().max(0.0);
        let hi = ((e.time - wavelet.start() - grid.start) / grid.dt).floor();
        if hi < 0.0 || lo >= grid.len as f64 {
            continue;
        }
        let hi = (hi as usize).min(grid.len - 1);
        let lo = lo as usize;
        for (i, s) in samples[lo..=hi].iter_mut().enumerate() {
            *s += e.amplitude * wavelet.value_at(e.time - grid.time(lo + i));
        }
    }
    Ok(trace)
}

/// Standard deviation used by [`add_noise`]: `level * max |trace|`.
pub fn noise_sigma(trace: &SampledTrace, level: f64) -> f64 {
    level * trace.max_abs()
}

/// Adds i.i.d. zero-mean Gaussian noise with standard deviation
/// `level * max |trace|`, deterministic in `seed`.
pub fn add_noise(trace: &SampledTrace, level: f64, seed: u64) -> Result<SampledTrace> {
    if !(level.is_finite() && level >= 0.0) {
        return Err(invalid("level", format!("must be >= 0, got {level}")));
    }
    let sigma = noise_sigma(trace, level);
    if sigma == 0.0 {
        return Ok(trace.clone());
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| invalid("level", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = trace
        .samples()
        .iter()
        .map(|s| s + normal.sample(&mut rng))
        .collect();
    SampledTrace::new(samples, trace.start(), trace.dt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavelets::{BuiltinWavelet, WaveletParams};
    use approx::assert_relative_eq;

    #[test]
    fn single_interface_response() {
        let stack = LayerStack::new(vec![1.0], vec![1.0, 3.0]).unwrap();
        let g = greens_function(&stack, 10.0).unwrap();
        assert_eq!(g.events(), &[Event::new(2.0, -0.5)]);
    }

    #[test]
    fn two_interface_multiples_follow_geometric_sequence() {
        let stack = LayerStack::from_reflectivities(&[2.0, 2.0], &[0.5, 0.5], 1.0).unwrap();
        let g = greens_function(&stack, 40.0).unwrap();
        let (r1, r2) = (0.5_f64, 0.5_f64);
        assert_eq!(g.events()[0].time, 2.0);
        assert_relative_eq!(g.events()[0].amplitude, 0.5, max_relative = 1e-15);
        let expected = [0.375, -0.09375, 0.0234375];
        for (m, e) in g.events()[1..4].iter().enumerate() {
            assert_relative_eq!(e.time, 4.0 + 2.0 * m as f64, max_relative = 1e-14);
            assert_relative_eq!(e.amplitude, expected[m], max_relative = 1e-14);
            let closed = (1.0 - r1 * r1) * r2 * (-r1 * r2).powi(m as i32);
            assert_relative_eq!(e.amplitude, closed, max_relative = 1e-14);
        }
    }

    #[test]
    fn homogeneous_medium_is_silent() {
        let stack = LayerStack::homogeneous(2.0).unwrap();
        assert!(greens_function(&stack, 5.0).unwrap().is_empty());
    }

    #[test]
    fn recording_must_reach_last_primary() {
        let stack = LayerStack::new(vec![1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            greens_function(&stack, 3.9),
            Err(Error::RecordingTooShort { .. })
        ));
    }

    #[test]
    fn engines_agree_and_auto_falls_back() {
        let stack = LayerStack::new(vec![0.5, 0.75, 1.25], vec![1.0, 2.0, 0.8, 1.5]).unwrap();
        let lat = greens_function_with(&stack, 12.0, &ForwardOptions { engine: Engine::Lattice, ..Default::default() }).unwrap();
        let evq = greens_function_with(&stack, 12.0, &ForwardOptions { engine: Engine::EventQueue, ..Default::default() }).unwrap();
        assert_eq!(lat.len(), evq.len());
        for (a, b) in lat.iter().zip(evq.iter()) {
            assert_relative_eq!(a.time, b.time, max_relative = 1e-12);
            assert_relative_eq!(a.amplitude, b.amplitude, max_relative = 1e-10);
        }
        let odd = LayerStack::new(vec![1.0, 1.0 + std::f64::consts::PI / 7.0], vec![1.0, 2.0, 1.5]).unwrap();
        assert!(greens_function_with(&odd, 8.0, &ForwardOptions { engine: Engine::Lattice, max_subdivision: 8, ..Default::default() }).is_err());
        assert!(!greens_function(&odd, 8.0).unwrap().is_empty());
    }

    #[test]
    fn total_reflection_examples() {
        assert_relative_eq!(total_reflection(&[0.5, 0.5]).unwrap(), 0.8, max_relative = 1e-15);
        assert!(total_reflection(&[0.3, -0.3]).unwrap().abs() < 1e-15);
        assert_eq!(total_reflection(&[]).unwrap(), 0.0);
        assert!(total_reflection(&[1.0]).is_err());
    }

    #[test]
    fn convolution_examples() {
        let grid = TimeGrid::spanning(0.0, 1e-3, 4.0).unwrap();
        let w = Wavelet::builtin(BuiltinWavelet::Gaussian, WaveletParams::default(), 1e-3).unwrap();
        let empty = convolve(&DeltaTrain::empty(), &w, &grid).unwrap();
        assert!(empty.samples().iter().all(|&s| s == 0.0));

        let g = DeltaTrain::from_pairs(&[(2.0, -0.5)]).unwrap();
        let d = convolve(&g, &w, &grid).unwrap();
        assert_relative_eq!(d.integral(), -0.5, max_relative = 1e-9);

        let narrow = Wavelet::builtin(BuiltinWavelet::Gaussian, WaveletParams { center: 0.0, width: 0.01, amplitude: 1.0 }, 1e-3).unwrap();
        let two = DeltaTrain::from_pairs(&[(1.0, 0.4), (3.0, -0.2)]).unwrap();
        let d = convolve(&two, &narrow, &grid).unwrap();
        let p1 = d.samples()[1000];
        let p2 = d.samples()[3000];
        assert_relative_eq!(p1 / p2, -2.0, max_relative = 1e-12);
        assert!(matches!(convolve(&two, &Wavelet::delta(), &grid), Err(Error::DeltaWavelet)));
    }

    #[test]
    fn noise_examples() {
        let grid = TimeGrid::new(0.0, 1e-3, 20_000).unwrap();
        let mut clean = SampledTrace::zeros(&grid);
        clean.samples_mut()[10] = 1.0;
        assert_eq!(add_noise(&clean, 0.0, 3).unwrap(), clean);
        let a = add_noise(&clean, 0.1, 42).unwrap();
        let b = add_noise(&clean, 0.1, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_noise(&clean, 0.1, 43).unwrap());
        let diffs: Vec<f64> = a.samples().iter().zip(clean.samples()).map(|(x, y)| x - y).collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64;
        assert!((var.sqrt() - 0.1).abs() < 0.005);
        assert!(add_noise(&clean, -0.1, 1).is_err());
    }
}
