//! Forward-model verification: propagation engine against ray enumeration,
//! and the amplitude sum against its closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use impedance_core::forward::{DeltaTrain, Event};
use impedance_core::oracle::{bounce_horizon, compare, enumerate_rays, MAX_ORACLE_INTERFACES};
use impedance_core::{greens_function, total_reflection, LayerStack};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub max_bounces: u32,
    pub time_tol: f64,
    /// Relative amplitude tolerance for matched events.
    pub amp_tol: f64,
    pub sum_tol: f64,
    /// Recording length for the sum check, in multiples of `2 x_n`.
    pub sum_length: f64,
    /// Multiplies one engine amplitude by `1.001` before comparing.
    pub corrupt: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            max_bounces: 12,
            time_tol: 1e-9,
            amp_tol: 1e-12,
            sum_tol: 1e-8,
            sum_length: 200.0,
            corrupt: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleSection {
    pub max_bounces: u32,
    pub horizon: f64,
    pub matched: usize,
    pub max_abs_discrepancy: f64,
    pub max_rel_discrepancy: f64,
    pub unmatched: usize,
    pub significant_unmatched: usize,
    pub amp_tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SumSection {
    pub closed_form: f64,
    pub total_reflection: f64,
    pub truncated_sum: f64,
    pub t_max: f64,
    pub error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub interfaces: Vec<f64>,
    pub values: Vec<f64>,
    pub reflectivities: Vec<f64>,
    pub corrupted_event: Option<usize>,
    pub oracle: OracleSection,
    pub sum: SumSection,
    pub passed: bool,
}

/// Stack with `layers` interfaces on a `0.1` grid (gaps of 1 to 5 units)
/// and impedances uniform in `[0.2, 5]`.
pub fn random_stack(layers: usize, seed: u64) -> LayerStack {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = 0.0;
    let interfaces = (0..layers)
        .map(|_| {
            x += 0.1 * f64::from(rng.gen_range(1..=5u32));
            x
        })
        .collect();
    let values = (0..=layers).map(|_| rng.gen_range(0.2..5.0)).collect();
    LayerStack::new(interfaces, values).expect("generated stack is valid")
}

fn corrupt(g: &DeltaTrain, index: usize) -> Result<DeltaTrain> {
    let events = g.iter().enumerate().map(|(i, e)| {
        if i == index {
            Event::new(e.time, e.amplitude * 1.001)
        } else {
            *e
        }
    });
    Ok(DeltaTrain::from_events(events, 0.0, 0.0)?)
}

pub fn verify_stack(stack: &LayerStack, options: &VerifyOptions) -> Result<VerifyReport> {
    if stack.len() > MAX_ORACLE_INTERFACES {
        return Err(crate::config::invalid(format!(
            "ray enumeration handles at most {MAX_ORACLE_INTERFACES} interfaces, the stack has {}",
            stack.len()
        ))
        .into());
    }
    let r = stack.reflectivities();
    let closed_form = (stack.zeta_minus() - stack.zeta_plus()) / (stack.zeta_minus() + stack.zeta_plus());
    let total = total_reflection(&r)?;

    let Some(last) = stack.last_interface() else {
        let sum = SumSection {
            closed_form,
            total_reflection: total,
            truncated_sum: 0.0,
            t_max: 0.0,
            error: (total - closed_form).abs(),
            tolerance: options.sum_tol,
            passed: total == 0.0 && closed_form == 0.0,
        };
        let oracle = OracleSection {
            max_bounces: options.max_bounces,
            horizon: f64::INFINITY,
            matched: 0,
            max_abs_discrepancy: 0.0,
            max_rel_discrepancy: 0.0,
            unmatched: 0,
            significant_unmatched: 0,
            amp_tol: options.amp_tol,
            passed: true,
        };
        return Ok(VerifyReport {
            interfaces: vec![],
            values: stack.values().to_vec(),
            reflectivities: r,
            corrupted_event: options.corrupt,
            passed: sum.passed,
            oracle,
            sum,
        });
    };

    let horizon = bounce_horizon(stack, options.max_bounces);
    let cut = if horizon.is_finite() { horizon * (1.0 - 1e-12) } else { 2.0 * last + 1.0 };
    let mut engine = greens_function(stack, cut.max(2.0 * last))?.truncated(cut);
    if let Some(i) = options.corrupt {
        engine = corrupt(&engine, i)?;
    }
    let rays = enumerate_rays(stack, options.max_bounces, cut)?;
    let cmp = compare(&engine, &rays, options.time_tol, options.amp_tol);
    let oracle = OracleSection {
        max_bounces: options.max_bounces,
        horizon,
        matched: cmp.matched,
        max_abs_discrepancy: cmp.max_abs_discrepancy,
        max_rel_discrepancy: cmp.max_rel_discrepancy,
        unmatched: cmp.unmatched_left.len() + cmp.unmatched_right.len(),
        significant_unmatched: cmp.significant_unmatched,
        amp_tol: options.amp_tol,
        passed: cmp.passed(),
    };

    let t_max = options.sum_length * 2.0 * last;
    let truncated_sum = greens_function(stack, t_max)?.total();
    let error = (truncated_sum - closed_form).abs().max((total - closed_form).abs());
    let sum = SumSection {
        closed_form,
        total_reflection: total,
        truncated_sum,
        t_max,
        error,
        tolerance: options.sum_tol,
        passed: error <= options.sum_tol,
    };
    Ok(VerifyReport {
        interfaces: stack.interfaces().to_vec(),
        values: stack.values().to_vec(),
        reflectivities: r,
        corrupted_event: options.corrupt,
        passed: oracle.passed && sum.passed,
        oracle,
        sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_interface_passes() {
        let stack = LayerStack::new(vec![1.0], vec![1.0, 3.0]).unwrap();
        let report = verify_stack(&stack, &VerifyOptions::default()).unwrap();
        assert!(report.passed, "{report:?}");
        assert_eq!(report.oracle.matched, 1);
        assert_eq!(report.sum.truncated_sum, -0.5);
    }

    #[test]
    fn random_three_layers_pass() {
        let stack = random_stack(3, 7);
        let report = verify_stack(&stack, &VerifyOptions::default()).unwrap();
        assert!(report.passed, "{report:?}");
        assert!(report.oracle.max_rel_discrepancy < 1e-12);
        assert!(report.oracle.matched >= 3, "{report:#?}");
    }

    #[test]
    fn corrupted_amplitude_fails() {
        let stack = random_stack(3, 7);
        let options = VerifyOptions {
            corrupt: Some(1),
            ..Default::default()
        };
        let report = verify_stack(&stack, &options).unwrap();
        assert!(!report.oracle.passed);
        assert!(!report.passed);
    }

    #[test]
    fn large_stacks_are_refused() {
        let stack = random_stack(7, 1);
        assert!(verify_stack(&stack, &VerifyOptions::default()).is_err());
    }
}
