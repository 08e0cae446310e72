//! Impedance recovery from reflection data.
//!
//! Every estimate is a function of the accumulation `A(x) = ∫_{-∞}^{2x} g`,
//! the running integral of the data up to two-way time `2x`:
//!
//! * refined: `c (w - A) / (w + A)`
//! * classical: `c exp(-2A)`
//! * pressure variants: the same maps applied to `-g`.
//!
//! For zero-mean sources the data is integrated `k` times first and the
//! refined map is applied with `w = v`, the area of the virtual wavelet.

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::forward::{DeltaTrain, SampledTrace};
use crate::media::{FiniteDifference, ImpedanceProfile};
use crate::wavelets::{Wavelet, DEFAULT_MOMENT_TOL};

/// `|w + A| <= SINGULAR_TOL * |w|` marks a sample invalid.
pub const SINGULAR_TOL: f64 = 1e-12;

/// Signals whose running integral can be evaluated at arbitrary times.
pub trait Accumulable {
    /// `∫_{-∞}^{t} g` for each `t` in the increasing slice `times`.
    fn accumulate_at(&self, times: &[f64]) -> Vec<f64>;
}

impl Accumulable for DeltaTrain {
    /// Exact partial sums; an atom at exactly `t` is included.
    fn accumulate_at(&self, times: &[f64]) -> Vec<f64> {
        let mut prefix = Vec::with_capacity(self.len() + 1);
        let mut acc = 0.0;
        prefix.push(0.0);
        for e in self.iter() {
            acc += e.amplitude;
            prefix.push(acc);
        }
        let events = self.events();
        times
            .iter()
            .map(|&t| prefix[events.partition_point(|e| e.time <= t)])
            .collect()
    }
}

impl Accumulable for SampledTrace {
    /// Cumulative trapezoid, closed with a linearly interpolated partial panel.
    fn accumulate_at(&self, times: &[f64]) -> Vec<f64> {
        let cumulative = self.cumulative();
        let samples = self.samples();
        let n = samples.len();
        times
            .iter()
            .map(|&t| {
                if n == 0 || t <= self.start() {
                    return 0.0;
                }
                let pos = (t - self.start()) / self.dt();
                let i = pos.floor() as usize;
                if i >= n - 1 {
                    return cumulative[n - 1];
                }
                let frac = pos - i as f64;
                let end_value = samples[i] + frac * (samples[i + 1] - samples[i]);
                cumulative[i] + 0.5 * frac * self.dt() * (samples[i] + end_value)
            })
            .collect()
    }
}

/// `A(x)` sampled on a position grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AccumulationCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(invalid("grid", "positions must be finite"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid", "positions must be strictly increasing"));
    }
    Ok(())
}

fn check_scale(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(invalid("c", format!("must be > 0, got {c}")))
    }
}

/// `A(x) = ∫_{-∞}^{2x} g` on `grid`.
pub fn accumulate<G: Accumulable + ?Sized>(g: &G, grid: &[f64]) -> Result<AccumulationCurve> {
    check_grid(grid)?;
    let times: Vec<f64> = grid.iter().map(|x| 2.0 * x).collect();
    Ok(AccumulationCurve {
        grid: grid.to_vec(),
        values: g.accumulate_at(&times),
    })
}

/// Recovery formula tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Refined,
    Classical,
    RefinedZeroMean,
    PressureRefined,
    PressureClassical,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Refined => "refined",
            Self::Classical => "classical",
            Self::RefinedZeroMean => "refined-zero-mean",
            Self::PressureRefined => "pressure-refined",
            Self::PressureClassical => "pressure-classical",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters an estimate was computed with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateParams {
    /// Wavelet area `w` (or virtual area `v`); `None` for classical estimates.
    pub w: Option<f64>,
    /// Left impedance `c = ζ_-`.
    pub c: f64,
    /// Number of data integrations for zero-mean sources.
    pub k: Option<u32>,
}

/// Estimated impedance on a position grid. Samples with a singular
/// denominator carry `valid = false` and value `0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpedanceEstimate {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub valid: Vec<bool>,
    pub method: Method,
    pub params: EstimateParams,
}

impl ImpedanceEstimate {
    pub fn all_valid(&self) -> bool {
        self.valid.iter().all(|&v| v)
    }

    /// Linear interpolation at `x`, clamped to the grid ends.
    pub fn value_at(&self, x: f64) -> f64 {
        let i = self.grid.partition_point(|&g| g <= x);
        if i == 0 {
            return self.values[0];
        }
        if i == self.grid.len() {
            return self.values[self.values.len() - 1];
        }
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        let (v0, v1) = (self.values[i - 1], self.values[i]);
        v0 + (v1 - v0) * (x - x0) / (x1 - x0)
    }
}

fn mobius(accumulation: &[f64], w: f64, c: f64) -> (Vec<f64>, Vec<bool>) {
    accumulation
        .iter()
        .map(|&a| {
            let denominator = w + a;
            if denominator.abs() <= SINGULAR_TOL * w.abs() {
                (0.0, false)
            } else {
                (c * (w - a) / denominator, true)
            }
        })
        .unzip()
}

fn refined_from_accumulation(
    curve: AccumulationCurve,
    w: f64,
    c: f64,
    method: Method,
    k: Option<u32>,
) -> Result<ImpedanceEstimate> {
    if w == 0.0 || !w.is_finite() {
        return Err(Error::ZeroWaveletArea);
    }
    check_scale(c)?;
    let (values, valid) = mobius(&curve.values, w, c);
    Ok(ImpedanceEstimate {
        grid: curve.grid,
        values,
        valid,
        method,
        params: EstimateParams { w: Some(w), c, k },
    })
}

/// Refined impedance transform `c (w - A(x)) / (w + A(x))`.
pub fn refined_transform<G: Accumulable + ?Sized>(g: &G, w: f64, c: f64, grid: &[f64]) -> Result<ImpedanceEstimate> {
    refined_from_accumulation(accumulate(g, grid)?, w, c, Method::Refined, None)
}

/// Classical single-scattering estimate `c exp(-2 A(x))`.
///
/// Meant for impulse responses or deconvolved data; raw data with a source
/// of area `w != 1` is not rescaled.
pub fn classical_estimate<G: Accumulable + ?Sized>(g: &G, c: f64, grid: &[f64]) -> Result<ImpedanceEstimate> {
    check_scale(c)?;
    let curve = accumulate(g, grid)?;
    Ok(ImpedanceEstimate {
        values: curve.values.iter().map(|a| c * (-2.0 * a).exp()).collect(),
        valid: vec![true; curve.grid.len()],
        grid: curve.grid,
        method: Method::Classical,
        params: EstimateParams { w: None, c, k: None },
    })
}

/// Refined transform for zero-mean sources: integrates the data `k` times,
/// `k` being the order of the first non-vanishing source moment, and uses
/// `v = ∫ s^k W / k!` as the wavelet area.
pub fn modified_transform(d: &SampledTrace, source: &Wavelet, c: f64, grid: &[f64]) -> Result<ImpedanceEstimate> {
    modified_transform_with_tol(d, source, c, grid, DEFAULT_MOMENT_TOL)
}

pub fn modified_transform_with_tol(
    d: &SampledTrace,
    source: &Wavelet,
    c: f64,
    grid: &[f64],
    moment_tol: f64,
) -> Result<ImpedanceEstimate> {
    if source.is_delta() {
        return Err(Error::NonZeroMeanWavelet);
    }
    let first = source.first_nonzero_moment(moment_tol)?;
    if first.order == 0 {
        return Err(Error::NonZeroMeanWavelet);
    }
    let integrated = d.antiderivative(first.order)?;
    refined_from_accumulation(
        accumulate(&integrated, grid)?,
        first.virtual_area(),
        c,
        Method::RefinedZeroMean,
        Some(first.order),
    )
}

/// Pressure-data transform `c (w + A_f) / (w - A_f)`, i.e. the refined
/// transform of `-f`.
pub fn pressure_refined<G: Accumulable + ?Sized>(f: &G, w: f64, c: f64, grid: &[f64]) -> Result<ImpedanceEstimate> {
    let mut curve = accumulate(f, grid)?;
    for a in &mut curve.values {
        *a = -*a;
    }
    refined_from_accumulation(curve, w, c, Method::PressureRefined, None)
}

/// Pressure-data classical estimate `c exp(2 A_f)`.
pub fn pressure_classical<G: Accumulable + ?Sized>(f: &G, c: f64, grid: &[f64]) -> Result<ImpedanceEstimate> {
    check_scale(c)?;
    let curve = accumulate(f, grid)?;
    Ok(ImpedanceEstimate {
        values: curve.values.iter().map(|a| c * (-2.0 * -a).exp()).collect(),
        valid: vec![true; curve.grid.len()],
        grid: curve.grid,
        method: Method::PressureClassical,
        params: EstimateParams { w: None, c, k: None },
    })
}

/// Energy lag `|(ζ_- - ζ(x)) / (ζ_- + ζ(x)) - A(x)|` with `A` from the
/// impulse response `g`.
pub fn energy_lag(profile: &ImpedanceProfile, g: &DeltaTrain, grid: &[f64]) -> Result<Vec<f64>> {
    let curve = accumulate(g, grid)?;
    let zm = profile.zeta_minus();
    Ok(grid
        .iter()
        .zip(&curve.values)
        .map(|(&x, &a)| {
            let z = profile.eval(x);
            ((zm - z) / (zm + z) - a).abs()
        })
        .collect())
}

/// Smooth-medium approximations of the Green's function.
#[derive(Debug, Clone, PartialEq)]
pub struct GreensApproximations {
    pub times: Vec<f64>,
    /// `R_ζ(t) = -ζ'(t/2) / (4 ζ(t/2))`.
    pub single_scattering: Vec<f64>,
    /// `-ζ_- ζ'(t/2) / (ζ_- + ζ(t/2))^2`.
    pub refined: Vec<f64>,
    /// Samples whose finite difference straddles a jump.
    pub suspect: Vec<bool>,
}

pub fn greens_approximations(profile: &ImpedanceProfile, times: &[f64], fd: &FiniteDifference) -> GreensApproximations {
    let zm = profile.zeta_minus();
    let mut out = GreensApproximations {
        times: times.to_vec(),
        single_scattering: Vec::with_capacity(times.len()),
        refined: Vec::with_capacity(times.len()),
        suspect: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let x = 0.5 * t;
        let (slope, suspect) = fd.derivative(profile, x);
        let z = profile.eval(x);
        out.single_scattering.push(-slope / (4.0 * z));
        out.refined.push(-zm * slope / ((zm + z) * (zm + z)));
        out.suspect.push(suspect);
    }
    out
}

/// Default grid for delta-train data: `t/4` before the first arrival,
/// midpoints between consecutive arrivals (in `x = t/2`), and `x_max` at
/// the end when it lies beyond the last arrival.
pub fn event_midpoint_grid(g: &DeltaTrain, x_max: f64) -> Vec<f64> {
    let halves: Vec<f64> = g.iter().map(|e| 0.5 * e.time).collect();
    let mut grid = Vec::with_capacity(halves.len() + 1);
    if let Some(&first) = halves.first() {
        grid.push(0.5 * first);
    }
    for w in halves.windows(2) {
        grid.push(0.5 * (w[0] + w[1]));
    }
    match halves.last() {
        Some(&last) if x_max > last => grid.push(x_max),
        None if x_max > 0.0 => grid.push(x_max),
        _ => {}
    }
    grid
}

/// Default grid for sampled data: `x = t / 2` at each sample time.
pub fn trace_half_grid(trace: &SampledTrace) -> Vec<f64> {
    (0..trace.len()).map(|i| 0.5 * trace.time(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::TimeGrid;
    use approx::assert_relative_eq;

    fn single() -> DeltaTrain {
        DeltaTrain::from_pairs(&[(2.0, -0.5)]).unwrap()
    }

    #[test]
    fn accumulation_examples() {
        let a = accumulate(&DeltaTrain::empty(), &[0.5, 1.0, 5.0]).unwrap();
        assert!(a.values.iter().all(|&v| v == 0.0));
        assert_eq!(accumulate(&single(), &[1.5]).unwrap().values, vec![-0.5]);
        assert!(accumulate(&single(), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn sampled_accumulation_interpolates_the_last_panel() {
        let trace = SampledTrace::new(vec![1.0, 1.0, 3.0], 0.0, 1.0).unwrap();
        // ∫_0^1.5 with linear data: 1 + 0.5 * (1 + 2) / 2
        let a = trace.accumulate_at(&[-1.0, 0.0, 1.5, 10.0]);
        assert_eq!(a, vec![0.0, 0.0, 1.75, 3.0]);
    }

    #[test]
    fn refined_on_zero_data_is_constant() {
        let est = refined_transform(&DeltaTrain::empty(), 2.0, 1.7, &[0.1, 1.0, 3.0]).unwrap();
        assert_eq!(est.values, vec![1.7; 3]);
        assert!(est.all_valid());
    }

    #[test]
    fn single_interface_recovery() {
        let est = refined_transform(&single(), 1.0, 1.0, &[0.5, 0.999, 1.0, 1.5, 4.0]).unwrap();
        assert_eq!(est.values, vec![1.0, 1.0, 3.0, 3.0, 3.0]);
        let cl = classical_estimate(&single(), 1.0, &[0.5, 1.5]).unwrap();
        assert_eq!(cl.values[0], 1.0);
        assert_relative_eq!(cl.values[1], std::f64::consts::E, max_relative = 1e-15);
        assert_relative_eq!((3.0 - cl.values[1]) / 3.0, 0.0939, epsilon = 1e-4);
    }

    #[test]
    fn refined_errors_and_singularities() {
        assert!(matches!(refined_transform(&single(), 0.0, 1.0, &[1.0]), Err(Error::ZeroWaveletArea)));
        assert!(refined_transform(&single(), 1.0, 0.0, &[1.0]).is_err());
        let est = refined_transform(&single(), 0.5, 1.0, &[0.5, 1.5]).unwrap();
        assert_eq!(est.valid, vec![true, false]);
        assert_eq!(est.values[1], 0.0);
    }

    #[test]
    fn classical_matches_refined_to_second_order() {
        for &a in &[-0.05, -0.01, 0.0, 0.02, 0.05] {
            let g = DeltaTrain::from_pairs(&[(1.0, a)]).unwrap_or_default();
            let r = refined_transform(&g, 1.0, 2.0, &[1.0]).unwrap().values[0];
            let c = classical_estimate(&g, 2.0, &[1.0]).unwrap().values[0];
            assert!((r - c).abs() <= 2.01 * 2.0 * f64::abs(a).powi(3) + 1e-16);
        }
    }

    #[test]
    fn pressure_variants() {
        let grid = [0.5, 1.5, 3.0];
        let k = single().negated();
        assert_eq!(pressure_refined(&DeltaTrain::empty(), 1.0, 2.0, &grid).unwrap().values, vec![2.0; 3]);
        let p = pressure_refined(&k, 1.0, 1.0, &grid).unwrap();
        let v = refined_transform(&single(), 1.0, 1.0, &grid).unwrap();
        assert_eq!(p.values, v.values);
        assert_eq!(p.values[2], 3.0);
        let pr = pressure_refined(&single(), 1.0, 1.0, &grid).unwrap();
        let neg = refined_transform(&single().negated(), 1.0, 1.0, &grid).unwrap();
        assert_eq!(pr.values, neg.values);

        assert_eq!(pressure_classical(&DeltaTrain::empty(), 2.0, &grid).unwrap().values, vec![2.0; 3]);
        let pc = pressure_classical(&k, 1.0, &grid).unwrap();
        let vc = classical_estimate(&single(), 1.0, &grid).unwrap();
        assert_eq!(pc.values, vc.values);
        assert_relative_eq!(pc.values[2], std::f64::consts::E);
    }

    #[test]
    fn energy_lag_single_interface() {
        let profile = ImpedanceProfile::piecewise_constant(&[1.0], &[1.0, 3.0]).unwrap();
        let lag = energy_lag(&profile, &single(), &[0.2, 0.9, 1.0, 1.01, 10.0]).unwrap();
        assert_eq!(lag, vec![0.0; 5]);
    }

    #[test]
    fn greens_approximation_identities() {
        let fd = FiniteDifference::default();
        let c = ImpedanceProfile::constant(2.0, 1.0, 2.0).unwrap();
        let ga = greens_approximations(&c, &[1.0, 3.0, 5.0], &fd);
        assert!(ga.single_scattering.iter().chain(&ga.refined).all(|&v| v == 0.0));

        let e = ImpedanceProfile::exponential(1.0, 2.0, 1.0, 4.0).unwrap();
        let ga = greens_approximations(&e, &[2.5, 3.0, 3.5], &fd);
        for v in &ga.single_scattering {
            assert_relative_eq!(*v, 1.0, max_relative = 1e-7);
        }
        // where ζ(t/2) = ζ_- the two coincide
        let bump = ImpedanceProfile::oscillatory(1.0, 2.0, 1.0, 0.2, 1.0).unwrap();
        let ga = greens_approximations(&bump, &[3.0], &fd);
        assert_relative_eq!(ga.single_scattering[0], ga.refined[0], max_relative = 1e-6);
    }

    #[test]
    fn modified_transform_requires_zero_mean() {
        let grid = TimeGrid::new(0.0, 1e-3, 100).unwrap();
        let d = SampledTrace::zeros(&grid);
        let g = Wavelet::builtin(crate::wavelets::BuiltinWavelet::Gaussian, Default::default(), 1e-3).unwrap();
        assert!(matches!(modified_transform(&d, &g, 1.0, &[0.1]), Err(Error::NonZeroMeanWavelet)));
        let dg = Wavelet::builtin(crate::wavelets::BuiltinWavelet::DGaussian, Default::default(), 1e-3).unwrap();
        let est = modified_transform(&d, &dg, 1.3, &[0.01, 0.02]).unwrap();
        assert_eq!(est.values, vec![1.3, 1.3]);
        assert_eq!(est.params.k, Some(1));
        assert_eq!(est.method, Method::RefinedZeroMean);
    }

    #[test]
    fn default_grids() {
        let g = DeltaTrain::from_pairs(&[(2.0, 0.1), (3.0, 0.2)]).unwrap();
        assert_eq!(event_midpoint_grid(&g, 4.0), vec![0.5, 1.25, 4.0]);
        let tr = SampledTrace::new(vec![0.0; 3], 0.0, 0.5).unwrap();
        assert_eq!(trace_half_grid(&tr), vec![0.0, 0.25, 0.5]);
    }
}
