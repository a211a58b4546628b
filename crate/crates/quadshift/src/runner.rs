//! Scenario runner and verification harness: executes pipelines and writes
//! machine-readable artifacts (CSV series, JSON reports).
//!
//! Numeric CSV cells carry 17 significant digits; identical configs produce
//! bit-identical artifacts on the same platform (`summary.json` additionally
//! records the wall-clock runtime, the one intentionally non-reproducible
//! field).

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::classical::{integrate_shift, ShiftState};
use crate::error::{Error, Result};
use crate::model::{Representation, WaveFunction};
use crate::moments::{centered_moment, covariance, MomentAxis};
use crate::propagator::{evolve, SeriesRecord};
use crate::scenario::{Scenario, Tolerances, SCHEMA_VERSION};
use crate::transform::theorem_residual;

/// Residuals at or below this level are treated as arithmetic noise when
/// estimating convergence orders.
pub const ARITHMETIC_FLOOR: f64 = 1e-11;

fn fmt(v: f64) -> String {
    format!("{:.16e}", v)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::config("<serialize>", e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

fn write_series_csv(path: &Path, series: &[SeriesRecord]) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "t,norm,mean_x,mean_p,var_x,cov,var_p,leak")?;
    for r in series {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            fmt(r.t),
            fmt(r.norm),
            fmt(r.mean_x),
            fmt(r.mean_p),
            fmt(r.var_x),
            fmt(r.cov),
            fmt(r.var_p),
            fmt(r.leak)
        )?;
    }
    Ok(())
}

fn write_snapshot_csv(dir: &Path, wf: &WaveFunction) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("psi_{}.csv", wf.t));
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "x,re,im")?;
    for (j, a) in wf.amplitudes.iter().enumerate() {
        writeln!(w, "{},{},{}", fmt(wf.grid.position(j)), fmt(a.re), fmt(a.im))?;
    }
    Ok(())
}

/// Contents of `summary.json`: the resolved scenario echoed back (defaults
/// included), the runtime, and the final observable record.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub scenario: Scenario,
    pub runtime_seconds: f64,
    #[serde(rename = "final")]
    pub final_record: SeriesRecord,
}

/// Propagates the scenario and writes `series.csv`, `snapshots/psi_<t>.csv`,
/// and `summary.json` into `out_dir`.
pub fn run(scenario: &Scenario, out_dir: &Path) -> Result<Summary> {
    let started = Instant::now();
    fs::create_dir_all(out_dir)?;
    let evolution = evolve(scenario)?;
    if scenario.outputs.series {
        write_series_csv(&out_dir.join("series.csv"), &evolution.series)?;
    }
    for wf in &evolution.snapshots {
        write_snapshot_csv(&out_dir.join("snapshots"), wf)?;
    }
    let summary = Summary {
        schema: SCHEMA_VERSION,
        scenario: scenario.clone(),
        runtime_seconds: started.elapsed().as_secs_f64(),
        final_record: *evolution.series.last().expect("series never empty"),
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(summary)
}

/// Shift and residual data at one sampled time.
#[derive(Debug, Clone, Serialize)]
pub struct VerifySample {
    pub t: f64,
    pub norm: f64,
    pub leak: f64,
    pub shift: ShiftState,
    pub position_residual: Option<f64>,
    pub momentum_residual: Option<f64>,
    /// Centered position-moment deltas, orders 2..=6.
    pub x_moment_deltas: Vec<f64>,
    /// Centered momentum-moment deltas, orders 2..=6.
    pub p_moment_deltas: Vec<f64>,
    pub cov_delta: f64,
    pub moment_delta_max: f64,
}

/// Full verification report; `pass` is reproducible from the recorded
/// samples and tolerances alone.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub tolerances: Tolerances,
    pub corrupt_beta: Option<f64>,
    pub max_position_residual: Option<f64>,
    pub max_momentum_residual: Option<f64>,
    pub max_moment_delta: f64,
    pub max_norm_drift: f64,
    pub pass: bool,
    pub samples: Vec<VerifySample>,
}

/// Step indices at which the series and stride snapshots are recorded.
fn stride_indices(nsteps: usize, stride: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..=nsteps).filter(|k| k % stride == 0).collect();
    if *idx.last().unwrap() != nsteps {
        idx.push(nsteps);
    }
    idx
}

fn scenario_with_stride_snapshots(scenario: &Scenario) -> Scenario {
    let nsteps = scenario.step_count();
    let mut sc = scenario.clone();
    sc.outputs.snapshots =
        stride_indices(nsteps, scenario.time.output_stride).iter().map(|&k| sc.step_time(k)).collect();
    sc
}

/// Runs the three-way comparison: (A) evolve under the full generator,
/// (B) evolve under the stripped generator, (C) integrate the classical
/// shift; then reports the transform residual in both representations and
/// the centered-moment deltas at every output stride.
///
/// `corrupt_beta` (debug) adds the given action to `beta` before applying
/// the transform; `gamma` is recomputed so the accumulator identity stays
/// intact.
pub fn verify(
    scenario: &Scenario,
    out_dir: &Path,
    corrupt_beta: Option<f64>,
) -> Result<VerifyReport> {
    if !scenario.coefficients.has_linear_terms() {
        return Err(Error::config("coefficients", "verify requires linear terms (f or g nonzero)"));
    }
    let started = Instant::now();
    fs::create_dir_all(out_dir)?;
    let params = scenario.params;

    let full_sc = scenario_with_stride_snapshots(scenario);
    let mut reduced_sc = full_sc.clone();
    reduced_sc.coefficients = scenario.coefficients.strip_linear();

    let full = evolve(&full_sc)?;
    let reduced = evolve(&reduced_sc)?;
    let shifts = integrate_shift(
        &scenario.coefficients,
        (scenario.time.t0, scenario.time.t_end),
        scenario.time.dt,
    )?;

    let nsteps = scenario.step_count();
    let indices = stride_indices(nsteps, scenario.time.output_stride);
    assert_eq!(full.snapshots.len(), indices.len());
    assert_eq!(reduced.snapshots.len(), indices.len());

    let orders = 2..=6u32;
    let mut samples = Vec::with_capacity(indices.len());
    for (i, &k) in indices.iter().enumerate() {
        let mut shift = shifts[k];
        if let Some(extra) = corrupt_beta {
            shift.beta += extra;
            shift.gamma = shift.p_bar * shift.x_bar - shift.beta;
        }
        let wf_full = &full.snapshots[i];
        let wf_red = &reduced.snapshots[i];
        let position_residual = if scenario.outputs.verify_position {
            Some(
                theorem_residual(wf_full, wf_red, &shift, &params, Representation::Position)?
                    .l2_residual,
            )
        } else {
            None
        };
        let momentum_residual = if scenario.outputs.verify_momentum {
            Some(
                theorem_residual(wf_full, wf_red, &shift, &params, Representation::Momentum)?
                    .l2_residual,
            )
        } else {
            None
        };
        let mut x_moment_deltas = Vec::with_capacity(5);
        let mut p_moment_deltas = Vec::with_capacity(5);
        for n in orders.clone() {
            x_moment_deltas.push(
                (centered_moment(wf_full, MomentAxis::Position, n, &params)?
                    - centered_moment(wf_red, MomentAxis::Position, n, &params)?)
                .abs(),
            );
            p_moment_deltas.push(
                (centered_moment(wf_full, MomentAxis::Momentum, n, &params)?
                    - centered_moment(wf_red, MomentAxis::Momentum, n, &params)?)
                .abs(),
            );
        }
        let cov_delta = (covariance(wf_full, &params) - covariance(wf_red, &params)).abs();
        let moment_delta_max = x_moment_deltas
            .iter()
            .chain(&p_moment_deltas)
            .chain(std::iter::once(&cov_delta))
            .cloned()
            .fold(0.0_f64, f64::max);
        samples.push(VerifySample {
            t: full.series[i].t,
            norm: full.series[i].norm,
            leak: full.series[i].leak,
            shift,
            position_residual,
            momentum_residual,
            x_moment_deltas,
            p_moment_deltas,
            cov_delta,
            moment_delta_max,
        });
    }

    let max_opt = |get: &dyn Fn(&VerifySample) -> Option<f64>| -> Option<f64> {
        let mut m: Option<f64> = None;
        for s in &samples {
            if let Some(v) = get(s) {
                m = Some(m.map_or(v, |cur| cur.max(v)));
            }
        }
        m
    };
    let max_position_residual = max_opt(&|s| s.position_residual);
    let max_momentum_residual = max_opt(&|s| s.momentum_residual);
    let max_moment_delta = samples.iter().map(|s| s.moment_delta_max).fold(0.0_f64, f64::max);
    let max_norm_drift =
        samples.iter().map(|s| (s.norm - 1.0).abs()).fold(0.0_f64, f64::max);

    let tol = scenario.tolerances;
    let pass = max_position_residual.map_or(true, |r| r <= tol.residual)
        && max_momentum_residual.map_or(true, |r| r <= tol.residual)
        && max_moment_delta <= tol.moment_delta
        && max_norm_drift <= tol.norm_drift;

    let report = VerifyReport {
        schema: SCHEMA_VERSION,
        tolerances: tol,
        corrupt_beta,
        max_position_residual,
        max_momentum_residual,
        max_moment_delta,
        max_norm_drift,
        pass,
        samples,
    };
    write_json(&out_dir.join("verify.json"), &report)?;
    if scenario.outputs.series {
        write_series_csv(&out_dir.join("series.csv"), &full.series)?;
    }
    let summary = Summary {
        schema: SCHEMA_VERSION,
        scenario: scenario.clone(),
        runtime_seconds: started.elapsed().as_secs_f64(),
        final_record: *full.series.last().expect("series never empty"),
    };
    write_json(&out_dir.join("summary.json"), &summary)?;
    Ok(report)
}

/// Maximum position-space residual over the stride samples; the inner loop
/// of `convergence`.
fn max_position_residual(scenario: &Scenario) -> Result<f64> {
    let params = scenario.params;
    let full_sc = scenario_with_stride_snapshots(scenario);
    let mut reduced_sc = full_sc.clone();
    reduced_sc.coefficients = scenario.coefficients.strip_linear();
    let full = evolve(&full_sc)?;
    let reduced = evolve(&reduced_sc)?;
    let shifts = integrate_shift(
        &scenario.coefficients,
        (scenario.time.t0, scenario.time.t_end),
        scenario.time.dt,
    )?;
    let indices = stride_indices(scenario.step_count(), scenario.time.output_stride);
    let mut max = 0.0_f64;
    for (i, &k) in indices.iter().enumerate() {
        let r = theorem_residual(
            &full.snapshots[i],
            &reduced.snapshots[i],
            &shifts[k],
            &params,
            Representation::Position,
        )?;
        max = max.max(r.l2_residual);
    }
    Ok(max)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub level: usize,
    pub dt: f64,
    pub residual: f64,
    /// Observed order `log2(e_{k-1}/e_k)`, empty for the first level,
    /// "floor" when either residual sits at the arithmetic floor.
    pub order: String,
}

/// Reruns the verification residual halving `dt` per level (grid fixed) and
/// reports the observed order; writes `convergence.csv`.
pub fn convergence(scenario: &Scenario, levels: usize, out_dir: &Path) -> Result<Vec<ConvergenceRow>> {
    if levels < 3 {
        return Err(Error::config("levels", "convergence needs at least 3 levels"));
    }
    if !scenario.coefficients.has_linear_terms() {
        return Err(Error::config("coefficients", "verify requires linear terms (f or g nonzero)"));
    }
    fs::create_dir_all(out_dir)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(levels);
    for level in 0..levels {
        let factor = 1 << level;
        let mut sc = scenario.clone();
        sc.time.dt = scenario.time.dt / factor as f64;
        sc.time.output_stride = scenario.time.output_stride * factor;
        let residual = max_position_residual(&sc)?;
        let order = if level == 0 {
            String::new()
        } else {
            let prev = rows[level - 1].residual;
            if prev <= ARITHMETIC_FLOOR || residual <= ARITHMETIC_FLOOR {
                "floor".to_string()
            } else {
                format!("{:.6}", (prev / residual).log2())
            }
        };
        rows.push(ConvergenceRow { level, dt: sc.time.dt, residual, order });
    }
    let mut w = BufWriter::new(fs::File::create(out_dir.join("convergence.csv"))?);
    writeln!(w, "level,dt,residual,order")?;
    for r in &rows {
        writeln!(w, "{},{},{},{}", r.level, fmt(r.dt), fmt(r.residual), r.order)?;
    }
    Ok(rows)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideEntry {
    name: String,
    patch: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub name: String,
    pub dir: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema: u32,
    pub entries: Vec<ManifestEntry>,
}

/// RFC 7386-style merge: objects merge recursively, null removes, anything
/// else replaces.
fn merge_patch(target: &mut Value, patch: &Value) {
    match patch {
        Value::Object(entries) => {
            if !target.is_object() {
                *target = Value::Object(Default::default());
            }
            let map = target.as_object_mut().unwrap();
            for (key, val) in entries {
                if val.is_null() {
                    map.remove(key);
                } else {
                    merge_patch(map.entry(key.clone()).or_insert(Value::Null), val);
                }
            }
        }
        other => *target = other.clone(),
    }
}

/// Runs every patched copy of the template scenario in its own directory
/// under `out_dir`; failures are recorded in `manifest.json` without
/// aborting the sweep. Scenarios execute concurrently; each is deterministic
/// regardless of scheduling.
pub fn sweep(template_path: &Path, overrides_path: &Path, out_dir: &Path) -> Result<Manifest> {
    let template: Value = serde_json::from_str(&fs::read_to_string(template_path)?)
        .map_err(|e| Error::config("<template>", e.to_string()))?;
    let overrides: Vec<OverrideEntry> =
        serde_json::from_str(&fs::read_to_string(overrides_path)?)
            .map_err(|e| Error::config("<overrides>", e.to_string()))?;

    // pre-flight: names must be unique, non-empty, and path-safe
    for (i, entry) in overrides.iter().enumerate() {
        if entry.name.is_empty() || entry.name.contains(['/', '\\', '\0']) {
            return Err(Error::config(
                format!("overrides[{i}].name"),
                "must be a non-empty path-safe name",
            ));
        }
    }
    for (i, a) in overrides.iter().enumerate() {
        for b in overrides.iter().skip(i + 1) {
            if a.name == b.name {
                return Err(Error::config(
                    "overrides",
                    format!("duplicate output name `{}`", a.name),
                ));
            }
        }
    }

    fs::create_dir_all(out_dir)?;
    let entries: Vec<ManifestEntry> = overrides
        .par_iter()
        .map(|entry| {
            let mut patched = template.clone();
            merge_patch(&mut patched, &entry.patch);
            let dir = out_dir.join(&entry.name);
            let outcome = Scenario::from_json_value(patched).and_then(|sc| run(&sc, &dir));
            match outcome {
                Ok(_) => ManifestEntry {
                    name: entry.name.clone(),
                    dir: entry.name.clone(),
                    status: "ok".into(),
                    error: None,
                },
                Err(e) => ManifestEntry {
                    name: entry.name.clone(),
                    dir: entry.name.clone(),
                    status: "failed".into(),
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let manifest = Manifest { schema: SCHEMA_VERSION, entries };
    write_json(&out_dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
