//! Scenario configuration: the JSON-backed unit of work for the runner.
//!
//! A scenario bundles grid, time window, coefficients, initial packet,
//! physical constants, output selection, and tolerances. The JSON document
//! carries a versioned `schema: 1` field; coefficient functions are
//! `{"segments": [{"t_start", "poly": [c0..c3], "sin": [{"amp", "omega",
//! "phase"}]}]}`. Every omitted optional resolves to a documented default and
//! the resolved scenario is echoed verbatim into `summary.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    CoefficientFunction, CoefficientSet, GaussianPacketSpec, Grid, PhysicalParams,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Time window and sampling cadence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default)]
    pub t0: f64,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "one")]
    pub output_stride: usize,
}

fn one() -> usize {
    1
}

/// Output selection flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// Write the per-stride observable series.
    pub series: bool,
    /// Wavefunction snapshot times; each must coincide with a step time.
    pub snapshots: Vec<f64>,
    /// Check the position-space residual in `verify`.
    pub verify_position: bool,
    /// Check the momentum-space residual in `verify`.
    pub verify_momentum: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { series: true, snapshots: Vec::new(), verify_position: true, verify_momentum: true }
    }
}

/// Pass/fail thresholds for `verify`, overridable per config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub residual: f64,
    pub moment_delta: f64,
    pub norm_drift: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { residual: 1e-4, moment_delta: 1e-8, norm_drift: 1e-9 }
    }
}

/// A fully resolved, validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub grid: Grid,
    pub time: TimeSpec,
    pub coefficients: CoefficientSet,
    pub packet: GaussianPacketSpec,
    pub params: PhysicalParams,
    pub outputs: OutputSpec,
    pub tolerances: Tolerances,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientsConfig {
    a: Option<CoefficientFunction>,
    #[serde(default)]
    b: Option<CoefficientFunction>,
    #[serde(default)]
    c: Option<CoefficientFunction>,
    #[serde(default)]
    f: Option<CoefficientFunction>,
    #[serde(default)]
    g: Option<CoefficientFunction>,
    #[serde(default)]
    t0: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioConfig {
    schema: u32,
    grid: Grid,
    time: TimeSpec,
    coefficients: CoefficientsConfig,
    packet: GaussianPacketSpec,
    #[serde(default)]
    params: Option<PhysicalParams>,
    #[serde(default)]
    outputs: Option<OutputSpec>,
    #[serde(default)]
    tolerances: Option<Tolerances>,
}

impl Scenario {
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let cfg: ScenarioConfig = serde_json::from_value(value)
            .map_err(|e| Error::config("<config>", e.to_string()))?;
        Self::resolve(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            serde_json::from_str(text).map_err(|e| Error::config("<config>", e.to_string()))?;
        Self::resolve(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    fn resolve(cfg: ScenarioConfig) -> Result<Self> {
        if cfg.schema != SCHEMA_VERSION {
            return Err(Error::config(
                "schema",
                format!("unsupported schema {} (expected {SCHEMA_VERSION})", cfg.schema),
            ));
        }
        let t0 = cfg.time.t0;
        let coeff_t0 = cfg.coefficients.t0.unwrap_or(t0);
        let coefficients = CoefficientSet {
            a: cfg
                .coefficients
                .a
                .ok_or_else(|| Error::config("coefficients.a", "kinetic coefficient required"))?,
            b: cfg.coefficients.b.unwrap_or_else(CoefficientFunction::zero),
            c: cfg.coefficients.c.unwrap_or_else(CoefficientFunction::zero),
            f: cfg.coefficients.f.unwrap_or_else(CoefficientFunction::zero),
            g: cfg.coefficients.g.unwrap_or_else(CoefficientFunction::zero),
            t0: coeff_t0,
        };
        let scenario = Scenario {
            grid: cfg.grid,
            time: cfg.time,
            coefficients,
            packet: cfg.packet,
            params: cfg.params.unwrap_or_default(),
            outputs: cfg.outputs.unwrap_or_default(),
            tolerances: cfg.tolerances.unwrap_or_default(),
        };
        scenario.validate()?;
        Ok(scenario)
    }

    /// Number of propagation steps (full steps of `dt` plus a final partial
    /// step when the window is not an exact multiple).
    pub fn step_count(&self) -> usize {
        let span = self.time.t_end - self.time.t0;
        let full = (span / self.time.dt).floor() as usize;
        let rem = span - full as f64 * self.time.dt;
        if rem > 1e-12 * self.time.dt.max(1.0) {
            full + 1
        } else {
            full
        }
    }

    /// The time after `k` steps; the final step lands on `t_end` exactly.
    pub fn step_time(&self, k: usize) -> f64 {
        let t = self.time.t0 + k as f64 * self.time.dt;
        t.min(self.time.t_end)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.params.validate()?;
        self.packet.validate()?;
        let t = &self.time;
        if !(t.dt > 0.0) || !t.dt.is_finite() {
            return Err(Error::config("time.dt", "must be positive and finite"));
        }
        if !(t.t_end > t.t0) {
            return Err(Error::config("time.t_end", "must exceed time.t0"));
        }
        if t.output_stride < 1 {
            return Err(Error::config("time.output_stride", "must be at least 1"));
        }
        if (self.coefficients.t0 - t.t0).abs() > 1e-12 {
            return Err(Error::config(
                "coefficients.t0",
                "must match time.t0 (the shift trajectory starts at the turn-on time)",
            ));
        }
        for (name, cf) in [
            ("coefficients.a", &self.coefficients.a),
            ("coefficients.b", &self.coefficients.b),
            ("coefficients.c", &self.coefficients.c),
            ("coefficients.f", &self.coefficients.f),
            ("coefficients.g", &self.coefficients.g),
        ] {
            CoefficientFunction::new(cf.segments().to_vec())
                .map_err(|e| match e {
                    Error::Config { field, message } => {
                        Error::config(format!("{name}.{field}"), message)
                    }
                    other => other,
                })?;
        }
        // kinetic coefficient must stay positive over the window (sampled,
        // including step midpoints)
        let samples = 2 * self.step_count() + 1;
        for i in 0..=samples {
            let tau = t.t0 + (t.t_end - t.t0) * i as f64 / samples as f64;
            if self.coefficients.a.eval(tau) <= 0.0 {
                return Err(Error::config(
                    "coefficients.a",
                    format!("must be positive over the window (a({tau}) <= 0)"),
                ));
            }
        }
        for (i, &ts) in self.outputs.snapshots.iter().enumerate() {
            if ts < t.t0 - 1e-12 || ts > t.t_end + 1e-12 {
                return Err(Error::config(
                    format!("outputs.snapshots[{i}]"),
                    "snapshot time outside the time window",
                ));
            }
            let k = (ts - t.t0) / t.dt;
            let aligned = (k - k.round()).abs() * t.dt <= 1e-9 * ts.abs().max(1.0)
                || (ts - t.t_end).abs() <= 1e-12;
            if !aligned {
                return Err(Error::config(
                    format!("outputs.snapshots[{i}]"),
                    "snapshot time must coincide with a step time",
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> serde_json::Value {
        serde_json::json!({
            "schema": 1,
            "grid": {"x_min": -20.0, "x_max": 20.0, "n": 256},
            "time": {"t_end": 1.0, "dt": 1e-3, "output_stride": 10},
            "coefficients": {
                "a": {"segments": [{"t_start": 0.0, "poly": [1.0]}]},
                "g": {"segments": [{"t_start": 0.0, "poly": [0.5]}]}
            },
            "packet": {"x0": 0.0, "p0": 0.0, "sigma": 1.0}
        })
    }

    #[test]
    fn parses_with_defaults() {
        let s = Scenario::from_json_value(base_config()).unwrap();
        assert_eq!(s.params.hbar, 1.0);
        assert_eq!(s.tolerances.residual, 1e-4);
        assert!(s.outputs.series);
        assert_eq!(s.time.t0, 0.0);
        assert_eq!(s.coefficients.t0, 0.0);
        assert!(s.coefficients.b.is_zero());
        assert_eq!(s.step_count(), 1000);
    }

    #[test]
    fn rejects_non_power_of_two_grid() {
        let mut cfg = base_config();
        cfg["grid"]["n"] = serde_json::json!(100);
        match Scenario::from_json_value(cfg) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "grid.n"),
            other => panic!("expected grid.n config error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields() {
        let mut cfg = base_config();
        cfg["grid"]["x_mid"] = serde_json::json!(0.0);
        assert!(matches!(Scenario::from_json_value(cfg), Err(Error::Config { .. })));
    }

    #[test]
    fn rejects_nonpositive_kinetic_coefficient() {
        let mut cfg = base_config();
        cfg["coefficients"]["a"] =
            serde_json::json!({"segments": [{"t_start": 0.0, "poly": [1.0, -2.0]}]});
        match Scenario::from_json_value(cfg) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "coefficients.a"),
            other => panic!("expected coefficients.a error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_misaligned_snapshot() {
        let mut cfg = base_config();
        cfg["outputs"] = serde_json::json!({"snapshots": [0.50037]});
        assert!(matches!(Scenario::from_json_value(cfg), Err(Error::Config { .. })));
        let mut cfg = base_config();
        cfg["outputs"] = serde_json::json!({"snapshots": [0.5]});
        assert!(Scenario::from_json_value(cfg).is_ok());
    }

    #[test]
    fn echo_round_trips() {
        let s = Scenario::from_json_value(base_config()).unwrap();
        let echoed = serde_json::to_value(&s).unwrap();
        // the echoed document records every resolved default
        assert_eq!(echoed["params"]["hbar"], 1.0);
        assert_eq!(echoed["tolerances"]["moment_delta"], 1e-8);
        assert_eq!(echoed["coefficients"]["b"]["segments"][0]["poly"][0], 0.0);
    }
}
