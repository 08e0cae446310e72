//! Brute-force ray enumeration for small stacks.
//!
//! Every path that leaves `x = 0` downward and returns upward is followed
//! through its sequence of reflections and transmissions; the amplitude is the
//! product of the per-encounter coefficients. This is independent of the
//! lattice and event engines in [`crate::forward`] and serves as their ground
//! truth.

use crate::error::{Error, Result};
use crate::forward::{DeltaTrain, Event};
use crate::media::LayerStack;

pub const MAX_ORACLE_INTERFACES: usize = 6;
pub const MAX_ORACLE_BOUNCES: u32 = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Action {
    Reflect,
    Transmit,
}

/// One interface encounter: the wave arrives travelling `incoming` and is
/// reflected or transmitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encounter {
    pub interface: usize,
    pub incoming: Direction,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayPath {
    pub encounters: Vec<Encounter>,
    pub amplitude: f64,
    pub time: f64,
}

impl RayPath {
    pub fn reflections(&self) -> usize {
        self.encounters.iter().filter(|e| e.action == Action::Reflect).count()
    }
}

struct Walker<'a, F: FnMut(&[Encounter], f64, f64)> {
    thickness: Vec<f64>,
    depth: &'a [f64],
    r: Vec<f64>,
    max_bounces: u32,
    t_max: f64,
    path: Vec<Encounter>,
    emit: F,
}

impl<F: FnMut(&[Encounter], f64, f64)> Walker<'_, F> {
    fn arrive(&mut self, i: usize, incoming: Direction, amp: f64, time: f64, bounces: u32) {
        if time + self.depth[i] > self.t_max {
            return;
        }
        let n = self.r.len();
        let r = self.r[i];
        let (reflected, transmitted) = match incoming {
            Direction::Down => (r * amp, (1.0 + r) * amp),
            Direction::Up => (-r * amp, (1.0 - r) * amp),
        };
        let out_dir_reflected = match incoming {
            Direction::Down => Direction::Up,
            Direction::Up => Direction::Down,
        };
        if bounces < self.max_bounces {
            self.path.push(Encounter { interface: i, incoming, action: Action::Reflect });
            self.leave(i, out_dir_reflected, reflected, time, bounces + 1);
            self.path.pop();
        }
        let can_transmit = match incoming {
            Direction::Down => i + 1 < n,
            Direction::Up => true,
        };
        if can_transmit {
            self.path.push(Encounter { interface: i, incoming, action: Action::Transmit });
            self.leave(i, incoming, transmitted, time, bounces);
            self.path.pop();
        }
    }

    fn leave(&mut self, i: usize, dir: Direction, amp: f64, time: f64, bounces: u32) {
        match dir {
            Direction::Up if i == 0 => {
                let t = time + self.thickness[0];
                if t <= self.t_max {
                    (self.emit)(&self.path, amp, t);
                }
            }
            Direction::Up => self.arrive(i - 1, Direction::Up, amp, time + self.thickness[i], bounces),
            // A down-going ray with no reflections left can never return.
            Direction::Down if bounces >= self.max_bounces => {}
            Direction::Down => {
                if i + 1 < self.r.len() {
                    self.arrive(i + 1, Direction::Down, amp, time + self.thickness[i + 1], bounces);
                }
            }
        }
    }
}

fn walk<F: FnMut(&[Encounter], f64, f64)>(stack: &LayerStack, max_bounces: u32, t_max: f64, emit: F) -> Result<()> {
    if stack.len() > MAX_ORACLE_INTERFACES {
        return Err(Error::OracleGuard(format!(
            "{} interfaces exceed the limit of {MAX_ORACLE_INTERFACES}",
            stack.len()
        )));
    }
    if max_bounces > MAX_ORACLE_BOUNCES {
        return Err(Error::OracleGuard(format!(
            "{max_bounces} bounces exceed the limit of {MAX_ORACLE_BOUNCES}"
        )));
    }
    if stack.is_empty() {
        return Ok(());
    }
    let depth = stack.interfaces();
    let thickness: Vec<f64> = stack.two_way_times().iter().map(|t| 0.5 * t).collect();
    let mut walker = Walker {
        thickness,
        depth,
        r: stack.reflectivities(),
        max_bounces,
        t_max,
        path: Vec::new(),
        emit,
    };
    walker.arrive(0, Direction::Down, 1.0, depth[0], 0);
    Ok(())
}

/// All rays with at most `max_bounces` reflections arriving by `t_max`,
/// coincident arrivals summed.
pub fn enumerate_rays(stack: &LayerStack, max_bounces: u32, t_max: f64) -> Result<DeltaTrain> {
    let mut events = Vec::new();
    walk(stack, max_bounces, t_max, |_, amp, t| events.push(Event::new(t, amp)))?;
    DeltaTrain::from_events(events, 1e-12, 0.0)
}

/// Like [`enumerate_rays`] but keeps every individual path.
pub fn enumerate_paths(stack: &LayerStack, max_bounces: u32, t_max: f64) -> Result<Vec<RayPath>> {
    let mut paths = Vec::new();
    walk(stack, max_bounces, t_max, |enc, amp, t| {
        paths.push(RayPath {
            encounters: enc.to_vec(),
            amplitude: amp,
            time: t,
        })
    })?;
    Ok(paths)
}

/// Earliest time at which a ray with more than `max_bounces` reflections can
/// arrive: `2 x_1 + (R - 1) h_min`, `R` the next odd count and `h_min` the
/// thinnest layer below the first interface. Infinite for a single interface.
pub fn bounce_horizon(stack: &LayerStack, max_bounces: u32) -> f64 {
    let Some(first) = stack.first_interface() else {
        return f64::INFINITY;
    };
    let h_min = stack.two_way_times()[1..]
        .iter()
        .map(|t| 0.5 * t)
        .fold(f64::INFINITY, f64::min);
    let next_odd = if max_bounces.is_multiple_of(2) { max_bounces + 1 } else { max_bounces + 2 };
    2.0 * first + f64::from(next_odd - 1) * h_min
}

/// Result of matching two delta trains event by event.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub matched: usize,
    pub max_abs_discrepancy: f64,
    /// `max |a - b| / max(|a|, |b|)` over matched pairs.
    pub max_rel_discrepancy: f64,
    pub unmatched_left: Vec<Event>,
    pub unmatched_right: Vec<Event>,
    /// Unmatched events with `|a| >= amp_tol`.
    pub significant_unmatched: usize,
    pub sum_difference: f64,
    pub amp_tol: f64,
}

impl ComparisonReport {
    /// Every matched pair agrees to `amp_tol` relative and no unmatched
    /// event reaches `amp_tol` in magnitude.
    pub fn passed(&self) -> bool {
        self.significant_unmatched == 0 && self.max_rel_discrepancy <= self.amp_tol
    }
}

/// Matches events whose times differ by at most `time_tol`.
pub fn compare(a: &DeltaTrain, b: &DeltaTrain, time_tol: f64, amp_tol: f64) -> ComparisonReport {
    let (ea, eb) = (a.events(), b.events());
    let mut report = ComparisonReport {
        matched: 0,
        max_abs_discrepancy: 0.0,
        max_rel_discrepancy: 0.0,
        unmatched_left: Vec::new(),
        unmatched_right: Vec::new(),
        significant_unmatched: 0,
        sum_difference: a.total() - b.total(),
        amp_tol,
    };
    let (mut i, mut j) = (0, 0);
    while i < ea.len() || j < eb.len() {
        match (ea.get(i), eb.get(j)) {
            (Some(x), Some(y)) if (x.time - y.time).abs() <= time_tol => {
                let diff = (x.amplitude - y.amplitude).abs();
                let scale = x.amplitude.abs().max(y.amplitude.abs());
                report.matched += 1;
                report.max_abs_discrepancy = report.max_abs_discrepancy.max(diff);
                if scale > 0.0 {
                    report.max_rel_discrepancy = report.max_rel_discrepancy.max(diff / scale);
                }
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x.time < y.time => {
                report.unmatched_left.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                report.unmatched_right.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                report.unmatched_left.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                report.unmatched_right.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    report.significant_unmatched = report
        .unmatched_left
        .iter()
        .chain(&report.unmatched_right)
        .filter(|e| e.amplitude.abs() >= amp_tol)
        .count();
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_interface_has_one_ray() {
        let stack = LayerStack::new(vec![1.0], vec![1.0, 3.0]).unwrap();
        let paths = enumerate_paths(&stack, 14, 100.0).unwrap();
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].time, 2.0);
        assert_eq!(paths[0].amplitude, -0.5);
        assert_eq!(paths[0].reflections(), 1);
        assert_eq!(bounce_horizon(&stack, 12), f64::INFINITY);
    }

    #[test]
    fn empty_stack_has_no_rays() {
        let stack = LayerStack::homogeneous(1.0).unwrap();
        assert!(enumerate_rays(&stack, 5, 10.0).unwrap().is_empty());
    }

    #[test]
    fn two_interfaces_bounce_limit_five() {
        let stack = LayerStack::from_reflectivities(&[2.0, 2.0], &[0.5, 0.5], 1.0).unwrap();
        let train = enumerate_rays(&stack, 5, 100.0).unwrap();
        // primaries plus the first two internal multiples
        assert_eq!(train.len(), 4);
        let expected = [(2.0, 0.5), (4.0, 0.375), (6.0, -0.09375), (8.0, 0.0234375)];
        for (e, (t, a)) in train.iter().zip(expected) {
            assert_relative_eq!(e.time, t);
            assert_relative_eq!(e.amplitude, a, max_relative = 1e-15);
        }
    }

    #[test]
    fn guards() {
        let many = LayerStack::new((1..=7).map(f64::from).collect(), (0..8).map(|i| 1.0 + f64::from(i)).collect()).unwrap();
        assert!(matches!(enumerate_rays(&many, 3, 20.0), Err(Error::OracleGuard(_))));
        let stack = LayerStack::new(vec![1.0], vec![1.0, 3.0]).unwrap();
        assert!(matches!(enumerate_rays(&stack, 15, 20.0), Err(Error::OracleGuard(_))));
    }

    #[test]
    fn compare_reports() {
        let a = DeltaTrain::from_pairs(&[(1.0, 0.3), (2.0, -0.2)]).unwrap();
        let same = compare(&a, &a, 1e-12, 1e-12);
        assert!(same.passed());
        assert_eq!(same.matched, 2);
        assert_eq!(same.max_abs_discrepancy, 0.0);

        let b = DeltaTrain::from_pairs(&[(1.0, 0.3), (2.0, -0.2), (3.0, 1e-15)]).unwrap();
        let r = compare(&a, &b, 1e-12, 1e-12);
        assert_eq!(r.unmatched_right.len(), 1);
        assert_eq!(r.significant_unmatched, 0);
        assert!(r.passed());

        let c = DeltaTrain::from_pairs(&[(1.0, 0.3), (2.0, -0.25)]).unwrap();
        let r = compare(&a, &c, 1e-12, 1e-12);
        assert!(!r.passed());
        assert_relative_eq!(r.max_rel_discrepancy, 0.2, max_relative = 1e-12);
    }
}
