//! Interface-scattering propagation of an impulse through a layer stack.
//!
//! Scattering at interface `j` with reflectivity `r_j`: a down-going wave
//! reflects with `r_j` and transmits with `1 + r_j`; an up-going wave reflects
//! with `-r_j` and transmits with `1 - r_j`. Up-going waves crossing `x = 0`
//! are recorded.

use std::collections::BTreeMap;

use crate::error::{invalid, Result};
use crate::forward::train::Event;

/// Waves weaker than this are flushed to zero inside the lattice to keep the
/// arithmetic out of the subnormal range.
const FLUSH: f64 = 1e-200;

/// Relative tolerance for recognising interface positions as lattice multiples.
const LATTICE_TOL: f64 = 1e-9;

/// Commensurate layer geometry: every interface sits at an integer multiple
/// of `unit` (one-way time).
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub unit: f64,
    /// Layer delays in units; layer 0 spans `[0, x_1]`.
    pub delays: Vec<usize>,
}

impl Lattice {
    /// Finds the coarsest unit `min_gap / q`, `q <= max_subdivision`, that
    /// divides every layer thickness.
    pub fn detect(interfaces: &[f64], max_subdivision: u32) -> Option<Self> {
        let mut prev = 0.0;
        let gaps: Vec<f64> = interfaces
            .iter()
            .map(|&x| {
                let g = x - prev;
                prev = x;
                g
            })
            .collect();
        let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
        if gaps.is_empty() || !(min_gap > 0.0) {
            return None;
        }
        'search: for q in 1..=max_subdivision {
            let unit = min_gap / f64::from(q);
            let mut delays = Vec::with_capacity(gaps.len());
            for &g in &gaps {
                let ratio = g / unit;
                let m = ratio.round();
                if (ratio - m).abs() > LATTICE_TOL * ratio.max(1.0) || m < 1.0 {
                    continue 'search;
                }
                delays.push(m as usize);
            }
            let total: usize = delays.iter().sum();
            let last = *interfaces.last().unwrap();
            return Some(Self {
                unit: last / total as f64,
                delays,
            });
        }
        None
    }
}

/// Delay-line lattice: each layer is a pair of ring buffers whose length is
/// the layer delay in units, updated one unit of one-way time per step.
pub fn lattice_response(lattice: &Lattice, reflectivities: &[f64], t_max: f64) -> Vec<Event> {
    let n = reflectivities.len();
    debug_assert_eq!(lattice.delays.len(), n);
    let steps = (t_max / lattice.unit * (1.0 + 1e-12)).floor() as usize;
    let mut down: Vec<Vec<f64>> = lattice.delays.iter().map(|&d| vec![0.0; d]).collect();
    let mut up: Vec<Vec<f64>> = lattice.delays.iter().map(|&d| vec![0.0; d]).collect();
    let mut down_arrivals = vec![0.0; n];
    let mut up_arrivals = vec![0.0; n];
    let mut out = Vec::new();

    for s in 0..=steps {
        for l in 0..n {
            let slot = s % lattice.delays[l];
            down_arrivals[l] = down[l][slot];
            up_arrivals[l] = up[l][slot];
        }
        if up_arrivals[0] != 0.0 {
            out.push(Event::new(s as f64 * lattice.unit, up_arrivals[0]));
        }
        for i in 0..n {
            let r = reflectivities[i];
            let from_above = down_arrivals[i];
            let from_below = if i + 1 < n { up_arrivals[i + 1] } else { 0.0 };
            let mut up_out = r * from_above + (1.0 - r) * from_below;
            if up_out.abs() < FLUSH {
                up_out = 0.0;
            }
            up[i][s % lattice.delays[i]] = up_out;
            if i + 1 < n {
                let mut down_out = (1.0 + r) * from_above - r * from_below;
                if down_out.abs() < FLUSH {
                    down_out = 0.0;
                }
                down[i + 1][s % lattice.delays[i + 1]] = down_out;
            }
        }
        down[0][s % lattice.delays[0]] = if s == 0 { 1.0 } else { 0.0 };
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct PacketKey {
    tick: i64,
    interface: usize,
    from_below: bool,
}

/// Time-ordered event simulation for arbitrary layer thicknesses.
///
/// Packets meeting the same interface from the same side within one time
/// quantum are merged. Packets weaker than `prune_tol` (relative to the unit
/// source) or unable to return to the surface by `t_max` are discarded.
pub fn event_response(
    interfaces: &[f64],
    reflectivities: &[f64],
    t_max: f64,
    prune_tol: f64,
    max_packets: usize,
) -> Result<Vec<Event>> {
    let n = interfaces.len();
    let mut thickness = Vec::with_capacity(n);
    let mut prev = 0.0;
    for &x in interfaces {
        thickness.push(x - prev);
        prev = x;
    }
    let quantum = 1e-12 * t_max.max(1.0);
    let slack = 1e-9 * t_max.max(1.0);
    let mut queue: BTreeMap<PacketKey, (f64, f64)> = BTreeMap::new();
    let mut out = Vec::new();
    let mut processed = 0usize;

    let push = |queue: &mut BTreeMap<PacketKey, (f64, f64)>, time: f64, interface: usize, from_below: bool, amp: f64| {
        if amp.abs() < prune_tol || time + interfaces[interface] > t_max + slack {
            return;
        }
        let key = PacketKey {
            tick: (time / quantum).round() as i64,
            interface,
            from_below,
        };
        queue
            .entry(key)
            .and_modify(|e| e.1 += amp)
            .or_insert((time, amp));
    };

    if n > 0 {
        push(&mut queue, interfaces[0], 0, false, 1.0);
    }
    while let Some((key, (time, amp))) = queue.pop_first() {
        processed += 1;
        if processed > max_packets {
            return Err(invalid(
                "max_packets",
                format!("event simulation exceeded {max_packets} packets; raise prune_tol or lower t_max"),
            ));
        }
        let i = key.interface;
        let r = reflectivities[i];
        let (up_amp, down_amp) = if key.from_below {
            ((1.0 - r) * amp, -r * amp)
        } else {
            (r * amp, (1.0 + r) * amp)
        };
        let t_up = time + thickness[i];
        if i == 0 {
            if t_up <= t_max + slack && up_amp != 0.0 {
                out.push(Event::new(t_up, up_amp));
            }
        } else {
            push(&mut queue, t_up, i - 1, true, up_amp);
        }
        if i + 1 < n {
            push(&mut queue, time + thickness[i + 1], i + 1, false, down_amp);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_detection() {
        let l = Lattice::detect(&[1.125, 1.375, 1.625], 64).unwrap();
        assert_eq!(l.delays, vec![9, 2, 2]);
        assert!((l.unit - 0.125).abs() < 1e-15);
        assert!(Lattice::detect(&[1.0, 1.0 + std::f64::consts::SQRT_2 / 100.0], 8).is_none());
        assert!(Lattice::detect(&[], 8).is_none());
    }

    #[test]
    fn lattice_and_event_engines_agree_on_two_layers() {
        let x = [1.0, 2.0];
        let r = [0.5, 0.5];
        let lattice = Lattice::detect(&x, 4).unwrap();
        let a = lattice_response(&lattice, &r, 9.0);
        let b = event_response(&x, &r, 9.0, 0.0, 1_000_000).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert!((p.time - q.time).abs() < 1e-12);
            assert!((p.amplitude - q.amplitude).abs() < 1e-15);
        }
    }
}
