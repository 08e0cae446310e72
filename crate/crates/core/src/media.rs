//! Impedance profiles as functions of one-way travel time, their step-function
//! discretization, and interface reflectivities.
//!
//! Positions are one-way travel times in seconds; impedance is in arbitrary
//! positive units. A profile is constant (`zeta_minus`) left of the slab and
//! constant (`zeta_plus`) from the right slab edge onward.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, Error, Result};

/// Pointwise impedance evaluator used inside the slab.
pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A regulated positive impedance profile, constant outside `[slab_left, slab_right)`.
#[derive(Clone)]
pub struct ImpedanceProfile {
    evaluator: Evaluator,
    /// Exact stack of a profile built from a step table.
    steps: Option<LayerStack>,
    slab_left: f64,
    slab_right: f64,
    zeta_minus: f64,
    zeta_plus: f64,
}

impl fmt::Debug for ImpedanceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ImpedanceProfile")
            .field("slab_left", &self.slab_left)
            .field("slab_right", &self.slab_right)
            .field("zeta_minus", &self.zeta_minus)
            .field("zeta_plus", &self.zeta_plus)
            .finish_non_exhaustive()
    }
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

impl ImpedanceProfile {
    /// Builds a profile from an evaluator that is consulted only on the slab.
    pub fn new<F>(
        evaluator: F,
        slab_left: f64,
        slab_right: f64,
        zeta_minus: f64,
        zeta_plus: f64,
    ) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        check_positive("slab_left", slab_left)?;
        if !(slab_right.is_finite() && slab_right > slab_left) {
            return Err(invalid(
                "slab_right",
                format!("must exceed slab_left = {slab_left}, got {slab_right}"),
            ));
        }
        check_positive("zeta_minus", zeta_minus)?;
        check_positive("zeta_plus", zeta_plus)?;
        Ok(Self {
            evaluator: Arc::new(evaluator),
            steps: None,
            slab_left,
            slab_right,
            zeta_minus,
            zeta_plus,
        })
    }

    pub fn constant(value: f64, slab_left: f64, slab_right: f64) -> Result<Self> {
        Self::new(move |_| value, slab_left, slab_right, value, value)
    }

    /// Linear ramp from `zeta_minus` at `slab_left` to `zeta_plus` at `slab_right`.
    pub fn ramp(slab_left: f64, slab_right: f64, zeta_minus: f64, zeta_plus: f64) -> Result<Self> {
        let width = slab_right - slab_left;
        Self::new(
            move |x| zeta_minus + (zeta_plus - zeta_minus) * (x - slab_left) / width,
            slab_left,
            slab_right,
            zeta_minus,
            zeta_plus,
        )
    }

    /// `zeta_minus * exp(-rate * (x - slab_left))` on the slab.
    pub fn exponential(slab_left: f64, slab_right: f64, zeta_minus: f64, rate: f64) -> Result<Self> {
        let zeta_plus = zeta_minus * (-rate * (slab_right - slab_left)).exp();
        Self::new(
            move |x| zeta_minus * (-rate * (x - slab_left)).exp(),
            slab_left,
            slab_right,
            zeta_minus,
            zeta_plus,
        )
    }

    /// Gaussian bump of height `peak - background` on a constant background.
    pub fn gaussian_bump(
        slab_left: f64,
        slab_right: f64,
        background: f64,
        peak: f64,
        center: f64,
        width: f64,
    ) -> Result<Self> {
        check_positive("width", width)?;
        Self::new(
            move |x| background + (peak - background) * (-0.5 * ((x - center) / width).powi(2)).exp(),
            slab_left,
            slab_right,
            background,
            background,
        )
    }

    /// `base * (1 + amplitude * sin(2 pi cycles (x - slab_left) / width))`.
    ///
    /// Continuous at both slab edges when `cycles` is an integer.
    pub fn oscillatory(
        slab_left: f64,
        slab_right: f64,
        base: f64,
        amplitude: f64,
        cycles: f64,
    ) -> Result<Self> {
        let width = slab_right - slab_left;
        let zeta_plus = base * (1.0 + amplitude * (2.0 * PI * cycles).sin());
        Self::new(
            move |x| base * (1.0 + amplitude * (2.0 * PI * cycles * (x - slab_left) / width).sin()),
            slab_left,
            slab_right,
            base,
            zeta_plus,
        )
    }

    /// Equal-thickness layers filling the slab.
    pub fn blocky(
        slab_left: f64,
        slab_right: f64,
        zeta_minus: f64,
        layers: &[f64],
        zeta_plus: f64,
    ) -> Result<Self> {
        if layers.is_empty() {
            return Err(invalid("layers", "at least one layer is required"));
        }
        let width = (slab_right - slab_left) / layers.len() as f64;
        let interfaces: Vec<f64> = (0..=layers.len())
            .map(|i| slab_left + i as f64 * width)
            .collect();
        let mut values = Vec::with_capacity(layers.len() + 2);
        values.push(zeta_minus);
        values.extend_from_slice(layers);
        values.push(zeta_plus);
        Self::piecewise_constant(&interfaces, &values)
    }

    /// Piecewise-constant profile; `values[i]` holds on `[interfaces[i-1], interfaces[i])`.
    pub fn piecewise_constant(interfaces: &[f64], values: &[f64]) -> Result<Self> {
        let stack = LayerStack::new(interfaces.to_vec(), values.to_vec())?;
        if stack.len() < 2 {
            return stack.to_profile();
        }
        let slab_left = interfaces[0];
        let slab_right = interfaces[interfaces.len() - 1];
        let zeta_minus = stack.zeta_minus();
        let zeta_plus = stack.zeta_plus();
        let steps = stack.clone();
        let mut profile = Self::new(
            move |x| stack.value_at(x),
            slab_left,
            slab_right,
            zeta_minus,
            zeta_plus,
        )?;
        profile.steps = Some(steps);
        Ok(profile)
    }

    /// Piecewise-linear interpolation through `(x, zeta)` knots; the slab spans
    /// the first to the last knot.
    pub fn piecewise_linear(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(invalid("knots", "need at least two knots"));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(invalid("knots", "knot positions must be strictly increasing"));
        }
        for &(x, z) in knots {
            if !(z.is_finite() && z > 0.0) {
                return Err(Error::NonPositiveImpedance { position: x, value: z });
            }
        }
        let knots = knots.to_vec();
        let (slab_left, zeta_minus) = knots[0];
        let (slab_right, zeta_plus) = knots[knots.len() - 1];
        let table = knots.clone();
        Self::new(
            move |x| {
                let i = table.partition_point(|k| k.0 <= x);
                if i == 0 {
                    return table[0].1;
                }
                if i == table.len() {
                    return table[table.len() - 1].1;
                }
                let (x0, z0) = table[i - 1];
                let (x1, z1) = table[i];
                z0 + (z1 - z0) * (x - x0) / (x1 - x0)
            },
            slab_left,
            slab_right,
            zeta_minus,
            zeta_plus,
        )
    }

    pub fn slab_left(&self) -> f64 {
        self.slab_left
    }

    pub fn slab_right(&self) -> f64 {
        self.slab_right
    }

    pub fn zeta_minus(&self) -> f64 {
        self.zeta_minus
    }

    pub fn zeta_plus(&self) -> f64 {
        self.zeta_plus
    }

    /// Impedance at one-way time `x`.
    pub fn eval(&self, x: f64) -> f64 {
        if x < self.slab_left {
            self.zeta_minus
        } else if x >= self.slab_right {
            self.zeta_plus
        } else {
            (self.evaluator)(x)
        }
    }

    /// The profile `x -> a * zeta(b x)`.
    pub fn scale_dilate(&self, a: f64, b: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        let inner = self.evaluator.clone();
        Ok(Self {
            evaluator: Arc::new(move |x| a * inner(b * x)),
            steps: self.steps.as_ref().map(|s| s.scale_dilate(a, b)).transpose()?,
            slab_left: self.slab_left / b,
            slab_right: self.slab_right / b,
            zeta_minus: a * self.zeta_minus,
            zeta_plus: a * self.zeta_plus,
        })
    }

    /// Step-function approximation on the even partition of the slab with
    /// spacing at most `max_spacing`.
    ///
    /// Jumps sit at partition midpoints. The piece left of the first midpoint
    /// takes `zeta_minus`, the piece right of the last takes `zeta_plus`, and
    /// interior pieces take the profile value at the partition point they
    /// contain. Jumps of zero height are dropped.
    ///
    /// Profiles built from a step table (`piecewise_constant`, `blocky`, a
    /// stack's `to_profile`) return that table unchanged, jumps in place.
    pub fn discretize(&self, max_spacing: f64) -> Result<LayerStack> {
        check_positive("max_spacing", max_spacing)?;
        if let Some(steps) = &self.steps {
            return Ok(steps.without_zero_jumps());
        }
        let width = self.slab_right - self.slab_left;
        let ratio = width / max_spacing;
        // Guard against `ratio` landing a hair above an integer through rounding.
        let cells = ((ratio * (1.0 - 1e-12)).ceil() as usize).max(1);
        let spacing = width / cells as f64;

        let mut interfaces = Vec::with_capacity(cells);
        let mut values = Vec::with_capacity(cells + 1);
        values.push(self.zeta_minus);
        for j in 0..cells {
            let midpoint = self.slab_left + (j as f64 + 0.5) * spacing;
            let next = if j + 1 == cells {
                self.zeta_plus
            } else {
                let x = self.slab_left + (j + 1) as f64 * spacing;
                let z = self.eval(x);
                if !(z.is_finite() && z > 0.0) {
                    return Err(Error::NonPositiveImpedance { position: x, value: z });
                }
                z
            };
            if next != *values.last().unwrap() {
                interfaces.push(midpoint);
                values.push(next);
            }
        }
        LayerStack::new(interfaces, values)
    }

    /// Single-scattering reflectivity rate `-zeta'(t/2) / (4 zeta(t/2))`, with the
    /// derivative taken by a symmetric difference.
    pub fn reflectivity_function(&self, t: f64, fd: &FiniteDifference) -> ReflectivitySample {
        let x = 0.5 * t;
        let (slope, suspect) = fd.derivative(self, x);
        ReflectivitySample {
            value: -slope / (4.0 * self.eval(x)),
            suspect,
        }
    }
}

/// Symmetric finite-difference settings for profile derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDifference {
    /// Half-width `h` of the stencil `(zeta(x+h) - zeta(x-h)) / 2h`.
    pub step: f64,
    /// Samples whose relative change `|zeta(x+h) - zeta(x-h)| / zeta(x)` exceeds
    /// this value are flagged as straddling a jump.
    pub jump_threshold: f64,
}

impl Default for FiniteDifference {
    fn default() -> Self {
        Self {
            step: 1e-4,
            jump_threshold: 0.05,
        }
    }
}

impl FiniteDifference {
    /// Stencil tied to a discretization spacing: `h = spacing / 10`.
    pub fn for_spacing(spacing: f64) -> Self {
        Self {
            step: spacing / 10.0,
            ..Self::default()
        }
    }

    /// Returns `(zeta'(x), suspect)`.
    pub fn derivative(&self, profile: &ImpedanceProfile, x: f64) -> (f64, bool) {
        let h = self.step;
        let diff = profile.eval(x + h) - profile.eval(x - h);
        let suspect = diff.abs() > self.jump_threshold * profile.eval(x);
        (diff / (2.0 * h), suspect)
    }
}

/// A finite-difference based sample with a flag raised near discontinuities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectivitySample {
    pub value: f64,
    pub suspect: bool,
}

/// Step impedance: interface positions `x_1 < ... < x_n` and the `n + 1`
/// constant values between them.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerStack {
    interfaces: Vec<f64>,
    values: Vec<f64>,
}

impl LayerStack {
    pub fn new(interfaces: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != interfaces.len() + 1 {
            return Err(invalid(
                "values",
                format!(
                    "expected {} values for {} interfaces, got {}",
                    interfaces.len() + 1,
                    interfaces.len(),
                    values.len()
                ),
            ));
        }
        if let Some(&first) = interfaces.first() {
            if !(first.is_finite() && first > 0.0) {
                return Err(invalid("interfaces", format!("first interface must be > 0, got {first}")));
            }
        }
        if interfaces.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(invalid("interfaces", "positions must be strictly increasing"));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v > 0.0) {
                let position = if i == 0 { 0.0 } else { interfaces[i - 1] };
                return Err(Error::NonPositiveImpedance { position, value: v });
            }
        }
        Ok(Self { interfaces, values })
    }

    /// A medium without interfaces.
    pub fn homogeneous(value: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![value])
    }

    /// Rebuilds a stack from two-way layer times `tau_j = 2 (x_j - x_{j-1})`
    /// (with `x_0 = 0`), reflectivities and the left impedance.
    pub fn from_reflectivities(two_way_times: &[f64], reflectivities: &[f64], zeta_minus: f64) -> Result<Self> {
        if two_way_times.len() != reflectivities.len() {
            return Err(invalid("reflectivities", "length must match two_way_times"));
        }
        let mut interfaces = Vec::with_capacity(two_way_times.len());
        let mut values = Vec::with_capacity(two_way_times.len() + 1);
        values.push(zeta_minus);
        let mut x = 0.0;
        for (j, (&tau, &r)) in two_way_times.iter().zip(reflectivities).enumerate() {
            if !(tau > 0.0) {
                return Err(invalid("two_way_times", format!("tau_{} = {tau} must be > 0", j + 1)));
            }
            if !(r.abs() < 1.0) {
                return Err(Error::ReflectivityOutOfRange { index: j, value: r });
            }
            x += 0.5 * tau;
            interfaces.push(x);
            let above = values[j];
            values.push(above * (1.0 - r) / (1.0 + r));
        }
        Self::new(interfaces, values)
    }

    pub fn interfaces(&self) -> &[f64] {
        &self.interfaces
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.interfaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interfaces.is_empty()
    }

    pub fn zeta_minus(&self) -> f64 {
        self.values[0]
    }

    pub fn zeta_plus(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn first_interface(&self) -> Option<f64> {
        self.interfaces.first().copied()
    }

    pub fn last_interface(&self) -> Option<f64> {
        self.interfaces.last().copied()
    }

    /// Two-way inter-interface times `tau_j`.
    pub fn two_way_times(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.interfaces
            .iter()
            .map(|&x| {
                let tau = 2.0 * (x - prev);
                prev = x;
                tau
            })
            .collect()
    }

    /// Reflectivities `(zeta(x_j-) - zeta(x_j+)) / (zeta(x_j-) + zeta(x_j+))`.
    pub fn reflectivities(&self) -> Vec<f64> {
        self.values
            .windows(2)
            .map(|w| (w[0] - w[1]) / (w[0] + w[1]))
            .collect()
    }

    /// Impedance at `x`; each jump is right-continuous.
    pub fn value_at(&self, x: f64) -> f64 {
        self.values[self.interfaces.partition_point(|&xi| xi <= x)]
    }

    /// The stack of `x -> a * zeta(b x)`: same reflectivities, positions divided by `b`.
    pub fn scale_dilate(&self, a: f64, b: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        Self::new(
            self.interfaces.iter().map(|x| x / b).collect(),
            self.values.iter().map(|v| a * v).collect(),
        )
    }

    /// Removes interfaces across which the impedance does not change.
    pub fn without_zero_jumps(&self) -> Self {
        let mut interfaces = Vec::with_capacity(self.interfaces.len());
        let mut values = vec![self.values[0]];
        for (x, &v) in self.interfaces.iter().zip(&self.values[1..]) {
            if v != *values.last().unwrap() {
                interfaces.push(*x);
                values.push(v);
            }
        }
        Self { interfaces, values }
    }

    /// The stack as a profile. The slab spans the first to the last interface;
    /// a single interface at `x_1` gets the slab `[x_1 / 2, x_1]`.
    pub fn to_profile(&self) -> Result<ImpedanceProfile> {
        let (first, last) = match (self.first_interface(), self.last_interface()) {
            (Some(first), Some(last)) => (first, last),
            _ => return Err(invalid("stack", "a homogeneous stack has no slab")),
        };
        let slab_left = if self.len() == 1 { 0.5 * first } else { first };
        let zeta_minus = self.zeta_minus();
        let zeta_plus = self.zeta_plus();
        let stack = self.clone();
        let mut profile = ImpedanceProfile::new(move |x| stack.value_at(x), slab_left, last, zeta_minus, zeta_plus)?;
        profile.steps = Some(self.clone());
        Ok(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn step_profiles_discretize_to_their_table() {
        let p = ImpedanceProfile::piecewise_constant(&[1.5], &[1.0, 3.0]).unwrap();
        let stack = p.discretize(0.01).unwrap();
        assert_eq!(stack.interfaces(), &[1.5]);
        assert_eq!(stack.values(), &[1.0, 3.0]);
        let p = ImpedanceProfile::blocky(1.0, 1.3, 1.0, &[2.0, 2.0], 4.0).unwrap();
        let stack = p.scale_dilate(2.0, 2.0).unwrap().discretize(0.01).unwrap();
        assert_eq!(stack.values(), &[2.0, 4.0, 8.0]);
        assert_relative_eq!(stack.interfaces()[0], 0.5, max_relative = 1e-15);
        assert_relative_eq!(stack.interfaces()[1], 0.65, max_relative = 1e-15);
    }

    #[test]
    fn constant_profile_discretizes_to_empty_stack() {
        let p = ImpedanceProfile::constant(2.5, 1.0, 3.0).unwrap();
        let stack = p.discretize(0.1).unwrap();
        assert!(stack.is_empty());
        assert_eq!(stack.values(), &[2.5]);
    }

    #[test]
    fn ramp_discretization_matches_hand_evaluation() {
        // zeta = 1 + (x - 1) on [1, 2]
        let p = ImpedanceProfile::ramp(1.0, 2.0, 1.0, 2.0).unwrap();
        let stack = p.discretize(0.25).unwrap();
        assert_eq!(stack.interfaces(), &[1.125, 1.375, 1.625, 1.875]);
        assert_eq!(stack.values(), &[1.0, 1.25, 1.5, 1.75, 2.0]);
        let r = stack.reflectivities();
        let expected = [-0.25 / 2.25, -0.25 / 2.75, -0.25 / 3.25, -0.25 / 3.75];
        for (a, b) in r.iter().zip(expected) {
            assert_relative_eq!(*a, b, max_relative = 1e-15);
        }
    }

    #[test]
    fn step_profile_on_midpoints_is_a_fixed_point() {
        let values = [1.0, 2.0, 0.5];
        let p = ImpedanceProfile::new(
            move |x| if x < 1.125 { values[0] } else if x < 1.625 { values[1] } else { values[2] },
            1.0,
            2.0,
            1.0,
            0.5,
        )
        .unwrap();
        let stack = p.discretize(0.25).unwrap();
        assert_eq!(stack.interfaces(), &[1.125, 1.625]);
        assert_eq!(stack.values(), &values);
        let again = stack.to_profile().unwrap();
        for x in [0.5, 1.124, 1.125, 1.3, 1.624, 1.625, 1.9, 3.0] {
            assert_eq!(again.eval(x), p.eval(x));
        }
    }

    #[test]
    fn discretize_rejects_bad_inputs() {
        let p = ImpedanceProfile::ramp(1.0, 2.0, 1.0, 2.0).unwrap();
        assert!(matches!(p.discretize(0.0), Err(Error::InvalidParameter { .. })));
        assert!(matches!(p.discretize(-1.0), Err(Error::InvalidParameter { .. })));
        let bad = ImpedanceProfile::new(|x| 1.5 - x, 1.0, 2.0, 1.0, 1.0).unwrap();
        assert!(matches!(bad.discretize(0.1), Err(Error::NonPositiveImpedance { .. })));
    }

    #[test]
    fn profile_invariants_are_enforced() {
        assert!(ImpedanceProfile::constant(1.0, 0.0, 1.0).is_err());
        assert!(ImpedanceProfile::constant(1.0, 2.0, 1.0).is_err());
        assert!(ImpedanceProfile::constant(-1.0, 1.0, 2.0).is_err());
        let p = ImpedanceProfile::new(|x| 10.0 + x, 1.0, 2.0, 3.0, 4.0).unwrap();
        assert_eq!(p.eval(0.999), 3.0);
        assert_eq!(p.eval(2.0), 4.0);
        assert_eq!(p.eval(1.5), 11.5);
    }

    #[test]
    fn reflectivity_function_examples() {
        let fd = FiniteDifference::default();
        let c = ImpedanceProfile::constant(3.0, 1.0, 2.0).unwrap();
        assert_eq!(c.reflectivity_function(3.0, &fd).value, 0.0);

        let e = ImpedanceProfile::exponential(1.0, 2.0, 1.0, 4.0).unwrap();
        for t in [2.2, 3.0, 3.8] {
            let s = e.reflectivity_function(t, &fd);
            assert_relative_eq!(s.value, 1.0, max_relative = 1e-7);
            assert!(!s.suspect);
        }

        let ramp = ImpedanceProfile::new(|x| 1.0 + x, 0.5, 3.0, 1.5, 4.0).unwrap();
        assert_relative_eq!(ramp.reflectivity_function(2.0, &fd).value, -0.125, max_relative = 1e-9);
    }

    #[test]
    fn reflectivity_function_flags_jumps() {
        let p = ImpedanceProfile::piecewise_constant(&[1.0, 2.0], &[1.0, 3.0, 1.0]).unwrap();
        let s = p.reflectivity_function(2.0 * 1.5, &FiniteDifference::default());
        assert!(!s.suspect);
        let s = p.reflectivity_function(2.0 * 2.0, &FiniteDifference::default());
        assert!(s.suspect);
        assert!(s.value.abs() > 1e3);
    }

    #[test]
    fn scale_dilate_examples() {
        let p = ImpedanceProfile::piecewise_constant(&[0.5, 1.0], &[1.0, 1.0, 3.0]).unwrap();
        let id = p.scale_dilate(1.0, 1.0).unwrap();
        for x in [0.1, 0.7, 1.0, 2.0] {
            assert_eq!(id.eval(x), p.eval(x));
        }
        let stack = LayerStack::new(vec![1.0], vec![1.0, 3.0]).unwrap();
        let scaled = stack.scale_dilate(2.0, 4.0).unwrap();
        assert_eq!(scaled.interfaces(), &[0.25]);
        assert_eq!(scaled.values(), &[2.0, 6.0]);
        assert_eq!(scaled.reflectivities(), vec![-0.5]);
        assert_eq!(stack.reflectivities(), vec![-0.5]);

        let q = p.scale_dilate(2.0, 4.0).unwrap();
        assert_eq!(q.slab_right(), 0.25);
        assert_eq!(q.eval(0.3), 6.0);
        assert_eq!(q.zeta_minus(), 2.0);
    }

    #[test]
    fn stack_validation() {
        assert!(LayerStack::new(vec![1.0], vec![1.0]).is_err());
        assert!(LayerStack::new(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(LayerStack::new(vec![1.0, 1.0], vec![1.0, 2.0, 3.0]).is_err());
        assert!(LayerStack::new(vec![1.0], vec![1.0, 0.0]).is_err());
        assert!(LayerStack::from_reflectivities(&[1.0], &[1.0], 1.0).is_err());
    }

    #[test]
    fn two_way_times_and_roundtrip() {
        let s = LayerStack::new(vec![0.5, 1.25, 2.0], vec![1.0, 2.0, 0.7, 4.0]).unwrap();
        assert_eq!(s.two_way_times(), vec![1.0, 1.5, 1.5]);
        let back = LayerStack::from_reflectivities(&s.two_way_times(), &s.reflectivities(), 1.0).unwrap();
        for (a, b) in back.values().iter().zip(s.values()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
        assert_eq!(back.interfaces(), s.interfaces());
    }

    #[test]
    fn zero_jumps_are_removed() {
        let s = LayerStack::new(vec![1.0, 2.0, 3.0], vec![1.0, 1.0, 2.0, 2.0]).unwrap();
        let t = s.without_zero_jumps();
        assert_eq!(t.interfaces(), &[2.0]);
        assert_eq!(t.values(), &[1.0, 2.0]);
    }
}
