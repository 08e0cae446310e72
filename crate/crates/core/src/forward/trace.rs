use crate::error::{invalid, Result};
use crate::quadrature::{cumulative_trapezoid, repeated_cumulative_trapezoid, trapezoid};

/// Uniform time grid `start + i * dt`, `i < len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub dt: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(start: f64, dt: f64, len: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        if !start.is_finite() {
            return Err(invalid("start", "must be finite"));
        }
        Ok(Self { start, dt, len })
    }

    /// Grid covering `[start, t_max]`.
    pub fn spanning(start: f64, dt: f64, t_max: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("must be > 0, got {dt}")));
        }
        if !(t_max >= start) {
            return Err(invalid("t_max", format!("must be >= start = {start}, got {t_max}")));
        }
        let len = ((t_max - start) / dt * (1.0 + 1e-12)).floor() as usize + 1;
        Self::new(start, dt, len)
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |i| self.time(i))
    }

    pub fn end(&self) -> f64 {
        self.time(self.len.saturating_sub(1))
    }
}

/// Uniformly sampled real time series, taken as zero before `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrace {
    samples: Vec<f64>,
    start: f64,
    dt: f64,
}

impl SampledTrace {
    pub fn new(samples: Vec<f64>, start: f64, dt: f64) -> Result<Self> {
        TimeGrid::new(start, dt, samples.len())?;
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(invalid("samples", format!("non-finite sample at index {i}")));
        }
        Ok(Self { samples, start, dt })
    }

    pub fn zeros(grid: &TimeGrid) -> Self {
        Self {
            samples: vec![0.0; grid.len],
            start: grid.start,
            dt: grid.dt,
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            start: self.start,
            dt: self.dt,
            len: self.samples.len(),
        }
    }

    pub fn time(&self, i: usize) -> f64 {
        self.start + i as f64 * self.dt
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, s| m.max(s.abs()))
    }

    /// Trapezoid integral over the whole record.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.samples, self.dt)
    }

    /// Every sample negated.
    pub fn negated(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|s| -s).collect(),
            ..self.clone()
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|s| factor * s).collect(),
            ..self.clone()
        }
    }

    /// Running trapezoid integrals at the sample times.
    pub fn cumulative(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.samples, self.dt)
    }

    /// `k`-fold antiderivative by repeated cumulative trapezoid integration.
    pub fn antiderivative(&self, k: u32) -> Result<SampledTrace> {
        if k == 0 {
            return Err(invalid("k", "k must be >= 1; pass the trace itself for k = 0"));
        }
        Ok(Self {
            samples: repeated_cumulative_trapezoid(&self.samples, self.dt, k),
            start: self.start,
            dt: self.dt,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spanning_includes_endpoint() {
        let g = TimeGrid::spanning(0.0, 0.1, 1.0).unwrap();
        assert_eq!(g.len, 11);
        assert!((g.end() - 1.0).abs() < 1e-12);
        assert!(TimeGrid::spanning(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn zero_trace_antiderivative_is_zero() {
        let z = SampledTrace::zeros(&TimeGrid::new(0.0, 0.01, 50).unwrap());
        for k in 1..4 {
            assert!(z.antiderivative(k).unwrap().samples().iter().all(|&s| s == 0.0));
        }
        assert!(z.antiderivative(0).is_err());
    }

    #[test]
    fn rejects_non_finite_samples() {
        assert!(SampledTrace::new(vec![0.0, f64::NAN], 0.0, 1.0).is_err());
    }
}
