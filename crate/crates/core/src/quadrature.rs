//! Trapezoid-rule helpers on uniform grids.

/// Composite trapezoid rule.
pub fn trapezoid(samples: &[f64], dt: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let interior: f64 = samples[1..n - 1].iter().sum();
            dt * (interior + 0.5 * (samples[0] + samples[n - 1]))
        }
    }
}

/// Running trapezoid integral; `out[0] = 0`.
pub fn cumulative_trapezoid(samples: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    if let Some(&first) = samples.first() {
        out.push(0.0);
        let mut prev = first;
        for &s in &samples[1..] {
            acc += 0.5 * dt * (prev + s);
            out.push(acc);
            prev = s;
        }
    }
    out
}

/// `k`-fold running trapezoid integral.
pub fn repeated_cumulative_trapezoid(samples: &[f64], dt: f64, k: u32) -> Vec<f64> {
    let mut out = samples.to_vec();
    for _ in 0..k {
        out = cumulative_trapezoid(&out, dt);
    }
    out
}

pub(crate) fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trapezoid_is_exact_for_linear() {
        let dt = 0.1;
        let y: Vec<f64> = (0..11).map(|i| 2.0 * i as f64 * dt + 1.0).collect();
        assert_abs_diff_eq!(trapezoid(&y, dt), 2.0, epsilon = 1e-14);
        let c = cumulative_trapezoid(&y, dt);
        assert_eq!(c[0], 0.0);
        assert_abs_diff_eq!(c[5], 0.25 + 0.5, epsilon = 1e-14);
    }

    #[test]
    fn repeated_integration_of_constant_is_polynomial() {
        let dt = 0.01;
        let y = vec![1.0; 101];
        let c = repeated_cumulative_trapezoid(&y, dt, 2);
        // t^2 / 2 at t = 1, up to O(dt^2)
        assert_abs_diff_eq!(c[100], 0.5, epsilon = 1e-4);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(trapezoid(&[], 1.0), 0.0);
        assert_eq!(trapezoid(&[3.0], 1.0), 0.0);
        assert!(cumulative_trapezoid(&[], 1.0).is_empty());
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(4), 24.0);
    }
}
