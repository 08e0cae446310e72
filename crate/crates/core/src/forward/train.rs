use crate::error::{invalid, Result};
use crate::forward::trace::{SampledTrace, TimeGrid};

/// A single impulse `amplitude * δ(t - time)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub amplitude: f64,
}

impl Event {
    pub fn new(time: f64, amplitude: f64) -> Self {
        Self { time, amplitude }
    }
}

/// Finite sorted train of impulses at strictly increasing positive times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeltaTrain {
    events: Vec<Event>,
}

impl DeltaTrain {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts, merges arrivals whose times differ by at most
    /// `merge_tol * max(1, t)`, and drops merged amplitudes with magnitude
    /// below `prune_tol` (exact zeros are always dropped).
    pub fn from_events<I>(events: I, merge_tol: f64, prune_tol: f64) -> Result<Self>
    where
        I: IntoIterator<Item = Event>,
    {
        let mut raw: Vec<Event> = events.into_iter().collect();
        for e in &raw {
            if !(e.time.is_finite() && e.time > 0.0) {
                return Err(invalid("events", format!("event time must be > 0, got {}", e.time)));
            }
            if !e.amplitude.is_finite() {
                return Err(invalid("events", format!("non-finite amplitude at t = {}", e.time)));
            }
        }
        raw.sort_by(|a, b| a.time.total_cmp(&b.time));
        let mut merged: Vec<Event> = Vec::with_capacity(raw.len());
        for e in raw {
            match merged.last_mut() {
                Some(last) if e.time - last.time <= merge_tol * last.time.max(1.0) => {
                    last.amplitude += e.amplitude;
                }
                _ => merged.push(e),
            }
        }
        merged.retain(|e| e.amplitude != 0.0 && e.amplitude.abs() >= prune_tol);
        Ok(Self { events: merged })
    }

    /// Exact `(time, amplitude)` pairs; coincident times are summed.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::from_events(pairs.iter().map(|&(t, a)| Event::new(t, a)), 0.0, 0.0)
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.events.iter()
    }

    /// `Σ a_i`, the integral of the train.
    pub fn total(&self) -> f64 {
        self.events.iter().map(|e| e.amplitude).sum()
    }

    pub fn max_abs_amplitude(&self) -> f64 {
        self.events.iter().fold(0.0, |m, e| m.max(e.amplitude.abs()))
    }

    /// Every amplitude negated.
    pub fn negated(&self) -> Self {
        Self {
            events: self
                .events
                .iter()
                .map(|e| Event::new(e.time, -e.amplitude))
                .collect(),
        }
    }

    /// Amplitudes multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            events: self
                .events
                .iter()
                .map(|e| Event::new(e.time, factor * e.amplitude))
                .filter(|e| e.amplitude != 0.0)
                .collect(),
        }
    }

    /// Events with `time <= t_max`.
    pub fn truncated(&self, t_max: f64) -> Self {
        let end = self.events.partition_point(|e| e.time <= t_max);
        Self {
            events: self.events[..end].to_vec(),
        }
    }

    /// Running sum `Σ_{t_i <= t} a_i`; atoms at exactly `t` are included.
    pub fn accumulation_at(&self, t: f64) -> f64 {
        let end = self.events.partition_point(|e| e.time <= t);
        self.events[..end].iter().map(|e| e.amplitude).sum()
    }

    /// `D^{(-k)}(t) = Σ_{t_i <= t} a_i (t - t_i)^{k-1} / (k-1)!` on `grid`.
    pub fn antiderivative(&self, k: u32, grid: &TimeGrid) -> Result<SampledTrace> {
        if k == 0 {
            return Err(invalid("k", "k must be >= 1; pass the train itself for k = 0"));
        }
        let norm = crate::quadrature::factorial(k - 1);
        let samples = grid
            .times()
            .map(|t| {
                self.events
                    .iter()
                    .take_while(|e| e.time <= t)
                    .map(|e| e.amplitude * (t - e.time).powi(k as i32 - 1) / norm)
                    .sum()
            })
            .collect();
        SampledTrace::new(samples, grid.start, grid.dt)
    }
}

/// Pressure-equation Green's function of the same medium: `K = -G`.
pub fn to_pressure(g: &DeltaTrain) -> DeltaTrain {
    g.negated()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merging_and_pruning() {
        let t = DeltaTrain::from_events(
            [Event::new(2.0, 1.0), Event::new(1.0, 0.5), Event::new(2.0, -1.0), Event::new(3.0, 1e-15)],
            0.0,
            1e-14,
        )
        .unwrap();
        assert_eq!(t.events(), &[Event::new(1.0, 0.5)]);
        assert!(DeltaTrain::from_pairs(&[(0.0, 1.0)]).is_err());
        assert!(DeltaTrain::from_pairs(&[(-1.0, 1.0)]).is_err());
    }

    #[test]
    fn pressure_conversion() {
        let g = DeltaTrain::from_pairs(&[(2.0, -0.5)]).unwrap();
        assert_eq!(to_pressure(&g).events(), &[Event::new(2.0, 0.5)]);
        assert!(to_pressure(&DeltaTrain::empty()).is_empty());
        let h = DeltaTrain::from_pairs(&[(1.0, 0.3), (2.5, -0.1)]).unwrap();
        assert_eq!(to_pressure(&to_pressure(&h)), h);
    }

    #[test]
    fn antiderivatives_of_a_single_impulse() {
        let g = DeltaTrain::from_pairs(&[(2.0, 1.0)]).unwrap();
        let grid = TimeGrid::new(0.0, 0.5, 9).unwrap();
        let step = g.antiderivative(1, &grid).unwrap();
        assert_eq!(step.samples(), &[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        let ramp = g.antiderivative(2, &grid).unwrap();
        for (t, v) in grid.times().zip(ramp.samples()) {
            assert_eq!(*v, (t - 2.0).max(0.0));
        }
        assert!(g.antiderivative(0, &grid).is_err());
    }

    #[test]
    fn accumulation_includes_endpoint_atom() {
        let g = DeltaTrain::from_pairs(&[(2.0, -0.5), (3.0, 0.25)]).unwrap();
        assert_eq!(g.accumulation_at(1.999), 0.0);
        assert_eq!(g.accumulation_at(2.0), -0.5);
        assert_eq!(g.accumulation_at(3.5), -0.25);
        assert_eq!(g.truncated(2.5).len(), 1);
    }
}
