//! Subcommand implementations. Each returns a JSON-serializable summary
//! and writes its artifacts under the experiment's output directory.

use std::path::{Path, PathBuf};

use log::info;
use serde::Serialize;

use impedance_core::BuiltinWavelet;

use crate::config::{invalid, ExperimentConfig, MethodName, WaveletSpec};
use crate::error::{CliError, Result};
use crate::output::{
    data_file, ensure_dir, estimate_file, read_estimate, read_trace, read_train, write_estimate, write_json,
    write_profile, write_trace, write_train, Provenance, COMPARE_META, GREENS_FILE, INVERT_META, OVERLAY_FILE,
    PROFILE_FILE, SIMULATE_META,
};
use crate::pipeline::{default_grid, Experiment, Observed, Recorded};
use crate::plot::{line_plot, Series, PALETTE};
use crate::suite::BuiltinProfile;
use crate::verify::{random_stack, verify_stack, VerifyOptions, VerifyReport};

const PROFILE_POINTS: usize = 2001;
const PLOT_POINTS: usize = 2001;
const VELOCITY: &str = "data";
const PRESSURE: &str = "pressure";

/// Command-line adjustments applied on top of a config file or a built-in
/// experiment.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub profile: Option<BuiltinProfile>,
    pub wavelet: Option<BuiltinWavelet>,
    pub noise: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Loads `--config`, or builds the built-in experiment for `--profile`
    /// (gaussian source unless `--wavelet` says otherwise), then applies the
    /// remaining flags.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = match (&self.config, self.profile) {
            (Some(path), _) => {
                let mut c = ExperimentConfig::load(path)?;
                if let Some(p) = self.profile {
                    c.profile = crate::config::ProfileSpec::Builtin { name: p };
                }
                if let Some(w) = self.wavelet {
                    c.wavelet = WaveletSpec::builtin(w);
                }
                c
            }
            (None, Some(p)) => p.experiment(self.wavelet.unwrap_or(BuiltinWavelet::Gaussian)),
            (None, None) => return Err(invalid("pass --config <path> or --profile <p1|p2|p3|p4>").into()),
        };
        if let Some(level) = self.noise {
            config.noise.level = level;
        }
        if let Some(seed) = self.seed {
            config.noise.seed = seed;
        }
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        Ok(config)
    }
}

#[derive(Debug, Serialize)]
pub struct SimulateSummary {
    pub provenance: Provenance,
    pub interfaces: usize,
    pub events: usize,
    pub total_reflection: f64,
    pub files: Vec<String>,
}

fn write_recorded(dir: &Path, kind: &str, rec: &Recorded, files: &mut Vec<String>) -> Result<()> {
    match rec {
        Recorded::Impulses(g) => {
            let name = data_file(kind, false);
            write_train(&dir.join(&name), g)?;
            files.push(name);
        }
        Recorded::Sampled { clean, noisy } => {
            let name = data_file(kind, false);
            write_trace(&dir.join(&name), clean)?;
            files.push(name);
            if let Some(noisy) = noisy {
                let name = data_file(kind, true);
                write_trace(&dir.join(&name), noisy)?;
                files.push(name);
            }
        }
    }
    Ok(())
}

pub fn simulate(config: &ExperimentConfig) -> Result<SimulateSummary> {
    let exp = Experiment::new(config.clone())?;
    let dir = ensure_dir(&config.output_dir)?;
    let sim = exp.simulate()?;
    let mut files = Vec::new();

    let x_max = 0.5 * config.recording.t_max;
    write_profile(&dir.join(PROFILE_FILE), &exp.profile, &exp.stack, x_max, PROFILE_POINTS)?;
    files.push(PROFILE_FILE.to_string());
    write_train(&dir.join(GREENS_FILE), &sim.greens)?;
    files.push(GREENS_FILE.to_string());
    write_recorded(&dir, VELOCITY, &sim.velocity, &mut files)?;
    if let Some(p) = &sim.pressure {
        write_recorded(&dir, PRESSURE, p, &mut files)?;
    }

    let summary = SimulateSummary {
        provenance: Provenance::of(config),
        interfaces: exp.stack.len(),
        events: sim.greens.len(),
        total_reflection: sim.greens.total(),
        files,
    };
    write_json(&dir.join(SIMULATE_META), &summary)?;
    info!("simulated {} into {}", config.name, dir.display());
    Ok(summary)
}

fn load_observed(exp: &Experiment, kind: &str) -> Result<Observed> {
    let dir = &exp.config.output_dir;
    let noisy = exp.config.noise.level > 0.0 && !exp.wavelet.is_delta();
    let path = dir.join(data_file(kind, noisy));
    if !path.exists() {
        return Err(CliError::MissingData(format!(
            "{} not found; run `simulate` with the same config first",
            path.display()
        )));
    }
    Ok(if exp.wavelet.is_delta() {
        Observed::Impulses(read_train(&path)?)
    } else {
        Observed::Sampled(read_trace(&path)?)
    })
}

#[derive(Debug, Serialize)]
pub struct MethodSummary {
    pub requested: MethodName,
    pub applied: MethodName,
    pub notice: Option<String>,
    /// Left impedance the estimate is anchored to.
    pub c: f64,
    /// Wavelet area or virtual area, absent for classical estimates.
    pub w: Option<f64>,
    /// Number of data integrations (zero-mean sources).
    pub k: Option<u32>,
    pub file: String,
    pub samples: usize,
    pub invalid_samples: usize,
    pub far_point: f64,
    pub far_value: f64,
    pub far_truth: f64,
    pub far_relative_error: f64,
}

#[derive(Debug, Serialize)]
pub struct InvertSummary {
    pub provenance: Provenance,
    pub source_moment_order: u32,
    pub source_area: f64,
    pub methods: Vec<MethodSummary>,
    pub overlay: String,
}

fn uniform_points(x_max: f64) -> Vec<f64> {
    (0..PLOT_POINTS)
        .map(|i| x_max * i as f64 / (PLOT_POINTS - 1) as f64)
        .collect()
}

pub fn invert(config: &ExperimentConfig) -> Result<InvertSummary> {
    let exp = Experiment::new(config.clone())?;
    let dir = ensure_dir(&config.output_dir)?;
    let velocity = load_observed(&exp, VELOCITY)?;
    let pressure = if exp.needs_pressure() {
        Some(load_observed(&exp, PRESSURE)?)
    } else {
        None
    };

    let far = exp.far_point();
    let x_plot = (far + 0.5 * exp.profile.slab_right()).min(0.5 * config.recording.t_max);
    let plot_grid = uniform_points(x_plot);
    let mut series = vec![Series {
        label: "true impedance".into(),
        color: "black".into(),
        dashed: false,
        points: plot_grid.iter().map(|&x| (x, exp.profile.eval(x))).collect(),
    }];

    let mut methods = Vec::new();
    for (i, &method) in config.methods.iter().enumerate() {
        let data = if method.is_pressure() {
            pressure.as_ref().expect("pressure data loaded")
        } else {
            &velocity
        };
        let grid = default_grid(data, config.recording.t_max);
        let run = exp.apply(method, data, &grid)?;
        let file = estimate_file(method.name());
        write_estimate(&dir.join(&file), &run.estimate)?;

        let far_run = exp.apply(method, data, &[far])?;
        let far_value = far_run.estimate.values[0];
        let dense = exp.apply(method, data, &plot_grid)?;
        series.push(Series {
            label: if run.applied == method {
                method.name().to_string()
            } else {
                format!("{} (as {})", method, run.applied)
            },
            color: PALETTE[i % PALETTE.len()].into(),
            dashed: matches!(method, MethodName::Classical | MethodName::PressureClassical),
            points: dense
                .estimate
                .grid
                .iter()
                .zip(&dense.estimate.values)
                .zip(&dense.estimate.valid)
                .map(|((&x, &v), &ok)| (x, if ok { v } else { f64::NAN }))
                .collect(),
        });

        let params = run.estimate.params;
        methods.push(MethodSummary {
            requested: method,
            applied: run.applied,
            notice: run.notice,
            c: params.c,
            w: params.w,
            k: params.k,
            file,
            samples: run.estimate.grid.len(),
            invalid_samples: run.estimate.valid.iter().filter(|&&ok| !ok).count(),
            far_point: far,
            far_value,
            far_truth: exp.profile.eval(far),
            far_relative_error: exp.relative_error(far_value, far),
        });
    }

    let provenance = Provenance::of(config);
    let svg = line_plot(
        &format!("{}: impedance estimates", config.name),
        "one-way time x",
        "impedance",
        &series,
        &format!("config_sha256={} seed={}", provenance.config_sha256, provenance.seed),
    );
    let overlay = dir.join(OVERLAY_FILE);
    std::fs::write(&overlay, svg).map_err(|e| CliError::io(&overlay, e))?;

    let summary = InvertSummary {
        provenance,
        source_moment_order: exp.source.order,
        source_area: exp.source.area,
        methods,
        overlay: OVERLAY_FILE.to_string(),
    };
    write_json(&dir.join(INVERT_META), &summary)?;
    Ok(summary)
}

#[derive(Debug, Serialize)]
pub struct MethodComparison {
    pub method: MethodName,
    pub file: String,
    /// Over valid samples in `[0, x_+]`.
    pub median_relative_error: f64,
    pub max_relative_error: f64,
    pub far_point: f64,
    pub far_value: f64,
    pub far_relative_error: f64,
}

#[derive(Debug, Serialize)]
pub struct CompareSummary {
    pub provenance: Provenance,
    pub slab_right: f64,
    pub methods: Vec<MethodComparison>,
}

pub fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Compares estimate files written by `invert` with the true profile.
pub fn compare(config: &ExperimentConfig) -> Result<CompareSummary> {
    let exp = Experiment::new(config.clone())?;
    let dir = &config.output_dir;
    let x_plus = exp.profile.slab_right();
    let far = exp.far_point();
    let mut methods = Vec::new();
    for &method in &config.methods {
        let file = estimate_file(method.name());
        let path = dir.join(&file);
        if !path.exists() {
            return Err(CliError::MissingData(format!(
                "{} not found; run `invert` with the same config first",
                path.display()
            )));
        }
        let rows = read_estimate(&path)?;
        let errors: Vec<f64> = rows
            .iter()
            .filter(|(x, _, ok)| *ok && *x <= x_plus)
            .map(|&(x, v, _)| exp.relative_error(v, x))
            .collect();
        let max_relative_error = errors.iter().copied().fold(0.0, f64::max);
        let far_value = interpolate(&rows, far);
        methods.push(MethodComparison {
            method,
            file,
            median_relative_error: median(errors),
            max_relative_error,
            far_point: far,
            far_value,
            far_relative_error: exp.relative_error(far_value, far),
        });
    }
    let summary = CompareSummary {
        provenance: Provenance::of(config),
        slab_right: x_plus,
        methods,
    };
    write_json(&dir.join(COMPARE_META), &summary)?;
    Ok(summary)
}

fn interpolate(rows: &[(f64, f64, bool)], x: f64) -> f64 {
    let i = rows.partition_point(|r| r.0 <= x);
    match i {
        0 => rows.first().map_or(f64::NAN, |r| r.1),
        _ if i == rows.len() => rows[i - 1].1,
        _ => {
            let (x0, v0, _) = rows[i - 1];
            let (x1, v1, _) = rows[i];
            v0 + (v1 - v0) * (x - x0) / (x1 - x0)
        }
    }
}

/// Stack source for `verify`.
#[derive(Debug, Clone)]
pub enum VerifyTarget {
    Config(ExperimentConfig),
    Random { layers: usize, seed: u64 },
}

/// Runs the oracle and sum checks. A failed check is returned as a report
/// with `passed = false`; the caller decides the exit status.
pub fn verify(target: &VerifyTarget, options: &VerifyOptions) -> Result<VerifyReport> {
    let stack = match target {
        VerifyTarget::Config(config) => {
            let exp = Experiment::new(config.clone())?;
            exp.stack.without_zero_jumps()
        }
        VerifyTarget::Random { layers, seed } => random_stack(*layers, *seed),
    };
    verify_stack(&stack, options)
}

#[derive(Debug, Serialize)]
pub struct FigureRun {
    pub name: String,
    pub output_dir: PathBuf,
    pub methods: Vec<MethodComparison>,
}

/// Default noise levels for the noisy figure variants.
pub const GAUSSIAN_NOISE: f64 = 0.10;
pub const ZERO_MEAN_NOISE: f64 = 0.05;

/// The built-in suite: every profile with gaussian and dgaussian sources,
/// noiseless and noisy.
pub fn suite_configs(root: &Path, seed: u64) -> Vec<ExperimentConfig> {
    let mut configs = Vec::new();
    for p in BuiltinProfile::ALL {
        for (w, level) in [
            (BuiltinWavelet::Gaussian, GAUSSIAN_NOISE),
            (BuiltinWavelet::DGaussian, ZERO_MEAN_NOISE),
        ] {
            let clean = p.experiment(w);
            let mut noisy = clean.clone();
            noisy.name = format!("{}-noisy", clean.name);
            noisy.noise.level = level;
            noisy.noise.seed = seed;
            for mut c in [clean, noisy] {
                c.output_dir = root.join(&c.name);
                configs.push(c);
            }
        }
    }
    configs
}

pub fn reproduce_figures(root: &Path, seed: u64) -> Result<Vec<FigureRun>> {
    ensure_dir(root)?;
    let mut runs = Vec::new();
    for config in suite_configs(root, seed) {
        simulate(&config)?;
        invert(&config)?;
        let cmp = compare(&config)?;
        runs.push(FigureRun {
            name: config.name.clone(),
            output_dir: config.output_dir.clone(),
            methods: cmp.methods,
        });
    }
    write_json(&root.join("suite.json"), &runs)?;
    Ok(runs)
}
