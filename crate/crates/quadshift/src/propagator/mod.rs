//! Norm-preserving propagation of a position-space wave function under the
//! full quadratic generator with time-dependent coefficients.
//!
//! Every term of the generator fits a tridiagonal stencil, so one Hermitian
//! tridiagonal Crank-Nicolson (Cayley) solve per step covers all five
//! coefficients with O(n) work: kinetic `a/2 p^2` by the 3-point second
//! difference, `c/2 x^2` and `g x` on the diagonal, `f p` by the central
//! first difference, and the mixed `b/2 (px + xp)` by the symmetrized
//! stencil `-i hbar b (x_j + x_{j+1}) / (4 dx)` on the upper off-diagonal.
//! Boundaries are Dirichlet with an explicit leak monitor; leaking runs are
//! rejected, not damped.

mod tridiag;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    make_packet, CoefficientSet, Grid, PhysicalParams, Representation, WaveFunction,
};
use crate::moments::{covariance, spectral_momentum_mean_var, MomentState};
use crate::scenario::Scenario;
pub use tridiag::solve_tridiagonal;

/// Mass fraction in the outer margins beyond which a run is rejected.
pub const LEAK_LIMIT: f64 = 1e-6;

/// Hermitian tridiagonal discretization of the generator at a fixed time:
/// real diagonal, `off_lower[j] = conj(off_upper[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<Complex64>,
    pub off_upper: Vec<Complex64>,
    pub off_lower: Vec<Complex64>,
    pub t: f64,
}

impl TridiagonalOperator {
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.diag.len();
        assert_eq!(v.len(), n);
        (0..n)
            .map(|j| {
                let mut acc = self.diag[j] * v[j];
                if j > 0 {
                    acc += self.off_lower[j - 1] * v[j - 1];
                }
                if j < n - 1 {
                    acc += self.off_upper[j] * v[j + 1];
                }
                acc
            })
            .collect()
    }
}

/// Assembles the generator on the grid at time `t` with Dirichlet
/// boundaries. Hermitian by construction.
pub fn build_generator(
    coeffs: &CoefficientSet,
    grid: &Grid,
    t: f64,
    params: &PhysicalParams,
) -> TridiagonalOperator {
    let hbar = params.hbar;
    let dx = grid.dx();
    let n = grid.n;
    let (a, b, c) = (coeffs.a.eval(t), coeffs.b.eval(t), coeffs.c.eval(t));
    let (f, g) = (coeffs.f.eval(t), coeffs.g.eval(t));
    let kinetic = a * hbar * hbar / (dx * dx);
    let mut diag = Vec::with_capacity(n);
    let mut off_upper = Vec::with_capacity(n - 1);
    for j in 0..n {
        let x = grid.position(j);
        diag.push(Complex64::new(kinetic + 0.5 * c * x * x + g * x, 0.0));
        if j < n - 1 {
            let x_next = grid.position(j + 1);
            off_upper.push(Complex64::new(
                -0.5 * kinetic,
                -hbar * f / (2.0 * dx) - hbar * b * (x + x_next) / (4.0 * dx),
            ));
        }
    }
    let off_lower: Vec<Complex64> = off_upper.iter().map(|u| u.conj()).collect();
    TridiagonalOperator { diag, off_upper, off_lower, t }
}

/// One Crank-Nicolson step: solves
/// `(1 + i dt H(t + dt/2) / 2 hbar) psi' = (1 - i dt H(t + dt/2) / 2 hbar) psi`
/// by tridiagonal elimination. The Cayley form is exactly unitary for the
/// Hermitian generator, so the norm is preserved to solver precision.
pub fn cn_step(
    psi: &WaveFunction,
    coeffs: &CoefficientSet,
    dt: f64,
    params: &PhysicalParams,
) -> Result<WaveFunction> {
    assert_eq!(psi.representation, Representation::Position);
    assert!(dt != 0.0 && dt.is_finite(), "dt must be nonzero and finite");
    let h = build_generator(coeffs, &psi.grid, psi.t + 0.5 * dt, params);
    let lambda = Complex64::new(0.0, dt / (2.0 * params.hbar));
    let h_psi = h.apply(&psi.amplitudes);
    let rhs: Vec<Complex64> =
        psi.amplitudes.iter().zip(&h_psi).map(|(p, hp)| p - lambda * hp).collect();
    let diag: Vec<Complex64> = h.diag.iter().map(|d| 1.0 + lambda * d).collect();
    let upper: Vec<Complex64> = h.off_upper.iter().map(|u| lambda * u).collect();
    let lower: Vec<Complex64> = h.off_lower.iter().map(|l| lambda * l).collect();
    let amplitudes = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    Ok(WaveFunction { amplitudes, t: psi.t + dt, ..psi.clone() })
}

/// Probability mass in the outer 5% of cells on each side.
pub fn boundary_leak(psi: &WaveFunction) -> f64 {
    assert_eq!(psi.representation, Representation::Position);
    let n = psi.grid.n;
    let margin = (n / 20).max(1);
    let dx = psi.grid.dx();
    let left: f64 = psi.amplitudes[..margin].iter().map(|a| a.norm_sqr()).sum();
    let right: f64 = psi.amplitudes[n - margin..].iter().map(|a| a.norm_sqr()).sum();
    (left + right) * dx
}

/// One row of the observable series.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeriesRecord {
    pub t: f64,
    pub norm: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub var_x: f64,
    pub cov: f64,
    pub var_p: f64,
    pub leak: f64,
}

impl SeriesRecord {
    pub fn moments(&self) -> MomentState {
        MomentState::new(self.var_x, self.cov, self.var_p)
    }
}

/// Result of propagating a scenario: per-stride observables and the
/// wave functions retained at the requested snapshot times.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: Vec<SeriesRecord>,
    pub snapshots: Vec<WaveFunction>,
}

fn observe(psi: &WaveFunction, params: &PhysicalParams) -> Result<SeriesRecord> {
    let hbar = params.hbar;
    let dx = psi.grid.dx();
    let norm = psi.norm(hbar);
    let mean_x: f64 = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| psi.grid.position(j) * a.norm_sqr() * dx)
        .sum();
    let var_x: f64 = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| {
            let d = psi.grid.position(j) - mean_x;
            d * d * a.norm_sqr() * dx
        })
        .sum();
    let (mean_p, var_p) = spectral_momentum_mean_var(psi, params);
    let cov = covariance(psi, params);
    let leak = boundary_leak(psi);
    if leak > LEAK_LIMIT {
        return Err(Error::BoundaryLeak { leak, t: psi.t });
    }
    Ok(SeriesRecord { t: psi.t, norm, mean_x, mean_p, var_x, cov, var_p, leak })
}

/// Propagates the scenario over its time window, recording observables at
/// every output stride (plus the initial and final step) and retaining
/// snapshots at the configured times.
pub fn evolve(scenario: &Scenario) -> Result<Evolution> {
    let params = scenario.params;
    let mut psi = make_packet(&scenario.packet, &scenario.grid, &params)?;
    psi.t = scenario.time.t0;

    let nsteps = scenario.step_count();
    let stride = scenario.time.output_stride;
    let mut snapshot_times = scenario.outputs.snapshots.clone();
    snapshot_times.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let matches_snapshot = |t: f64| {
        snapshot_times.iter().any(|&ts| (ts - t).abs() <= 1e-9 * ts.abs().max(1.0))
    };

    let mut series = Vec::with_capacity(nsteps / stride + 2);
    let mut snapshots = Vec::new();
    series.push(observe(&psi, &params)?);
    if matches_snapshot(psi.t) {
        snapshots.push(psi.clone());
    }
    for k in 0..nsteps {
        let t_next = scenario.step_time(k + 1);
        let h = t_next - psi.t;
        psi = cn_step(&psi, &scenario.coefficients, h, &params)?;
        psi.t = t_next; // keep step times exact, no accumulation drift
        if (k + 1) % stride == 0 || k + 1 == nsteps {
            series.push(observe(&psi, &params)?);
        }
        if matches_snapshot(psi.t) {
            snapshots.push(psi.clone());
        }
    }
    Ok(Evolution { series, snapshots })
}
