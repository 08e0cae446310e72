//! CSV files and JSON metadata.
//!
//! Columns: Green's function and impulse data `t,amplitude`; traces
//! `t,value`; estimates `x,zeta_estimate,valid_flag` (`1` valid, `0`
//! singular); profiles `x,zeta,zeta_step`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use impedance_core::forward::{DeltaTrain, Event, SampledTrace};
use impedance_core::{ImpedanceEstimate, ImpedanceProfile, LayerStack, Wavelet};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

pub const GREENS_FILE: &str = "greens.csv";
pub const PROFILE_FILE: &str = "profile.csv";
pub const SIMULATE_META: &str = "simulate.json";
pub const INVERT_META: &str = "invert.json";
pub const COMPARE_META: &str = "compare.json";
pub const OVERLAY_FILE: &str = "overlay.svg";

/// Data file names for velocity (`data`) or pressure (`pressure`) records.
pub fn data_file(kind: &str, noisy: bool) -> String {
    format!("{kind}_{}.csv", if noisy { "noisy" } else { "clean" })
}

pub fn estimate_file(method: &str) -> String {
    format!("estimate_{method}.csv")
}

#[derive(Debug, Serialize, Deserialize)]
struct ImpulseRow {
    t: f64,
    amplitude: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceRow {
    t: f64,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct EstimateRow {
    x: f64,
    zeta_estimate: f64,
    valid_flag: u8,
}

#[derive(Debug, Serialize)]
struct ProfileRow {
    x: f64,
    zeta: f64,
    zeta_step: f64,
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| CliError::csv(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::csv(path, e))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| CliError::csv(path, e))
}

pub fn write_train(path: &Path, g: &DeltaTrain) -> Result<()> {
    write_rows(
        path,
        g.iter().map(|e| ImpulseRow {
            t: e.time,
            amplitude: e.amplitude,
        }),
    )
}

pub fn read_train(path: &Path) -> Result<DeltaTrain> {
    let rows: Vec<ImpulseRow> = read_rows(path)?;
    Ok(DeltaTrain::from_events(
        rows.into_iter().map(|r| Event::new(r.t, r.amplitude)),
        0.0,
        0.0,
    )?)
}

pub fn write_trace(path: &Path, d: &SampledTrace) -> Result<()> {
    write_rows(
        path,
        d.samples().iter().enumerate().map(|(i, &v)| TraceRow { t: d.time(i), value: v }),
    )
}

/// Reads a uniformly sampled `t,value` table.
pub fn read_trace(path: &Path) -> Result<SampledTrace> {
    let rows: Vec<TraceRow> = read_rows(path)?;
    let (start, dt) = uniform_grid(path, rows.iter().map(|r| r.t))?;
    Ok(SampledTrace::new(rows.iter().map(|r| r.value).collect(), start, dt)?)
}

/// Source waveform from a uniformly sampled `t,value` table.
pub fn read_wavelet(path: &Path) -> Result<Wavelet> {
    let rows: Vec<TraceRow> = read_rows(path)?;
    let (start, dt) = uniform_grid(path, rows.iter().map(|r| r.t))?;
    Ok(Wavelet::sampled(rows.iter().map(|r| r.value).collect(), start, dt)?)
}

fn uniform_grid(path: &Path, times: impl Iterator<Item = f64>) -> Result<(f64, f64)> {
    let t: Vec<f64> = times.collect();
    if t.len() < 2 {
        return Err(CliError::MissingData(format!("{}: need at least two rows", path.display())));
    }
    let start = t[0];
    let dt = (t[t.len() - 1] - start) / (t.len() - 1) as f64;
    let uneven = t
        .iter()
        .enumerate()
        .any(|(i, &ti)| (ti - (start + i as f64 * dt)).abs() > 1e-6 * dt);
    if !(dt > 0.0) || uneven {
        return Err(CliError::MissingData(format!(
            "{}: times must be uniformly spaced and increasing",
            path.display()
        )));
    }
    Ok((start, dt))
}

pub fn write_estimate(path: &Path, e: &ImpedanceEstimate) -> Result<()> {
    write_rows(
        path,
        e.grid.iter().zip(&e.values).zip(&e.valid).map(|((&x, &v), &ok)| EstimateRow {
            x,
            zeta_estimate: v,
            valid_flag: u8::from(ok),
        }),
    )
}

/// `(x, zeta, valid)` triples.
pub fn read_estimate(path: &Path) -> Result<Vec<(f64, f64, bool)>> {
    let rows: Vec<EstimateRow> = read_rows(path)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.x, r.zeta_estimate, r.valid_flag != 0))
        .collect())
}

/// True profile and its step approximation on `points` positions of `[0, x_max]`.
pub fn write_profile(path: &Path, profile: &ImpedanceProfile, stack: &LayerStack, x_max: f64, points: usize) -> Result<()> {
    let n = points.max(2);
    write_rows(
        path,
        (0..n).map(|i| {
            let x = x_max * i as f64 / (n - 1) as f64;
            ProfileRow {
                x,
                zeta: profile.eval(x),
                zeta_step: stack.value_at(x),
            }
        }),
    )
}

/// What every metadata file records to make a run repeatable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub noise_level: f64,
    pub noise_convention: String,
    pub config: ExperimentConfig,
}

impl Provenance {
    pub fn of(config: &ExperimentConfig) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: config.digest(),
            seed: config.noise.seed,
            noise_level: config.noise.level,
            noise_convention: "iid Gaussian, sigma = level * max |clean trace|".to_string(),
            config: config.clone(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("metadata serializes");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(e.into()))
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let g = DeltaTrain::from_pairs(&[(0.1 + 0.2, -1.0 / 3.0), (2.5, 1e-17)]).unwrap();
        let p = dir.path().join("g.csv");
        write_train(&p, &g).unwrap();
        assert_eq!(read_train(&p).unwrap(), g);

        let d = SampledTrace::new(vec![0.0, 0.1, -2.0 / 7.0, 3.5], 0.0, 1e-3).unwrap();
        let p = dir.path().join("d.csv");
        write_trace(&p, &d).unwrap();
        let back = read_trace(&p).unwrap();
        assert_eq!(back.samples(), d.samples());
        assert!((back.dt() - 1e-3).abs() < 1e-15);
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("t,value\n"));
    }

    #[test]
    fn uneven_trace_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.csv");
        fs::write(&p, "t,value\n0,1\n0.1,2\n0.3,3\n").unwrap();
        assert!(read_trace(&p).is_err());
    }
}
