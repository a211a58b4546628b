//! Centered moments of lattice wave functions and the closed second-moment
//! ODE system, which never sees the linear coefficients.
//!
//! Covariance convention: `cov = <P X + X P>/2` (half-symmetrized), the
//! convention under which `d var_x = 2 a cov + 2 b var_x`,
//! `d cov = a var_p - c var_x`, `d var_p = -2 b var_p - 2 c cov` close
//! exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{dft, idft};
use crate::model::{CoefficientFunction, PhysicalParams, Representation, WaveFunction};
use crate::transform::{to_momentum, to_position};

/// Second central moments of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentState {
    pub var_x: f64,
    pub cov: f64,
    pub var_p: f64,
}

impl MomentState {
    pub fn new(var_x: f64, cov: f64, var_p: f64) -> Self {
        Self { var_x, cov, var_p }
    }

    /// `var_x var_p - cov^2`; conserved by the second-moment flow and at
    /// least `hbar^2/4` for pure states.
    pub fn symplectic_invariant(&self) -> f64 {
        self.var_x * self.var_p - self.cov * self.cov
    }
}

/// `var_x var_p - cov^2`.
pub fn symplectic_invariant(m: &MomentState) -> f64 {
    m.symplectic_invariant()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentAxis {
    Position,
    Momentum,
}

/// Minimum momentum width, in lattice spacings, for momentum-side extraction.
const MIN_MOMENTUM_RESOLUTION: f64 = 4.0;

fn lattice_moment(values: &[f64], density: &[f64], order: u32) -> f64 {
    let mean: f64 = values.iter().zip(density).map(|(v, d)| v * d).sum();
    values.iter().zip(density).map(|(v, d)| (v - mean).powi(order as i32) * d).sum()
}

/// `<(x - <x>)^n>` or `<(p - <p>)^n>` by lattice quadrature of the density
/// in the requested representation.
///
/// Momentum extraction requires the packet to span at least 4 momentum
/// lattice spacings (`UnderResolved` otherwise).
pub fn centered_moment(
    psi: &WaveFunction,
    axis: MomentAxis,
    order: u32,
    params: &PhysicalParams,
) -> Result<f64> {
    assert!(order >= 1, "moment order must be at least 1");
    let hbar = params.hbar;
    match axis {
        MomentAxis::Position => {
            let converted;
            let wf = if psi.representation == Representation::Position {
                psi
            } else {
                converted = to_position(psi, params);
                &converted
            };
            let xs = wf.grid.positions();
            let density = wf.density(hbar);
            Ok(lattice_moment(&xs, &density, order))
        }
        MomentAxis::Momentum => {
            let converted;
            let wf = if psi.representation == Representation::Momentum {
                psi
            } else {
                converted = to_momentum(psi, params);
                &converted
            };
            let ps = wf.grid.momenta(hbar);
            let density = wf.density(hbar);
            let width = lattice_moment(&ps, &density, 2).sqrt();
            let limit = MIN_MOMENTUM_RESOLUTION * wf.grid.dp(hbar);
            if width < limit {
                return Err(Error::UnderResolved { width, limit });
            }
            Ok(lattice_moment(&ps, &density, order))
        }
    }
}

/// `<p>` and `<(p - <p>)^2>` by spectral application of the momentum
/// operator in position representation. Equal to the momentum-lattice
/// quadrature by Parseval, but usable on packets of any lattice width, so
/// the propagator's per-stride records need no resolution gate.
pub(crate) fn spectral_momentum_mean_var(
    psi: &WaveFunction,
    params: &PhysicalParams,
) -> (f64, f64) {
    assert_eq!(psi.representation, Representation::Position);
    let hbar = params.hbar;
    let grid = psi.grid;
    let dx = grid.dx();
    let mut chi = psi.amplitudes.clone();
    dft(&mut chi);
    for (k, a) in chi.iter_mut().enumerate() {
        *a *= grid.momentum(k, hbar);
    }
    idft(&mut chi);
    let mean: f64 = psi.amplitudes.iter().zip(&chi).map(|(a, c)| (a.conj() * c).re * dx).sum();
    let var: f64 =
        psi.amplitudes.iter().zip(&chi).map(|(a, c)| (c - mean * a).norm_sqr() * dx).sum();
    (mean, var)
}

/// Half-symmetrized covariance `<(X P + P X)>/2` with `X = x - <x>`,
/// `P = p - <p>`; the momentum operator is applied spectrally. The
/// symmetrized expectation is real to 1e-10 (asserted); the imaginary part
/// is discarded.
pub fn covariance(psi: &WaveFunction, params: &PhysicalParams) -> f64 {
    assert_eq!(psi.representation, Representation::Position);
    let hbar = params.hbar;
    let grid = psi.grid;
    let dx = grid.dx();
    // chi = p-hat psi
    let mut chi = psi.amplitudes.clone();
    dft(&mut chi);
    for (k, a) in chi.iter_mut().enumerate() {
        *a *= grid.momentum(k, hbar);
    }
    idft(&mut chi);
    let mean_x: f64 = psi
        .amplitudes
        .iter()
        .enumerate()
        .map(|(j, a)| grid.position(j) * a.norm_sqr() * dx)
        .sum();
    let mean_p: f64 = psi
        .amplitudes
        .iter()
        .zip(&chi)
        .map(|(a, c)| (a.conj() * c).re * dx)
        .sum();
    let mut xp = Complex64::new(0.0, 0.0);
    let mut px = Complex64::new(0.0, 0.0);
    for (j, (a, c)) in psi.amplitudes.iter().zip(&chi).enumerate() {
        let xdev = grid.position(j) - mean_x;
        let pdev_psi = c - mean_p * a;
        xp += (xdev * a).conj() * pdev_psi * dx;
        px += pdev_psi.conj() * (xdev * a) * dx;
    }
    let sym = 0.5 * (xp + px);
    assert!(sym.im.abs() <= 1e-10, "symmetrized covariance not real: {}", sym.im);
    sym.re
}

/// RK4 solution of the closed second-moment system. Only the quadratic
/// coefficients enter; the linear terms cannot influence this flow by
/// construction.
pub fn evolve_second_moments(
    a: &CoefficientFunction,
    b: &CoefficientFunction,
    c: &CoefficientFunction,
    init: MomentState,
    t_span: (f64, f64),
    dt: f64,
) -> Result<Vec<(f64, MomentState)>> {
    if !(init.var_x > 0.0 && init.var_p > 0.0) {
        return Err(Error::config("init", "variances must be positive"));
    }
    if !(dt > 0.0) || !(t_span.1 >= t_span.0) {
        return Err(Error::config("t_span", "need dt > 0 and t_end >= t_start"));
    }
    let rhs = |t: f64, m: &MomentState| {
        let (at, bt, ct) = (a.eval(t), b.eval(t), c.eval(t));
        MomentState {
            var_x: 2.0 * at * m.cov + 2.0 * bt * m.var_x,
            cov: at * m.var_p - ct * m.var_x,
            var_p: -2.0 * bt * m.var_p - 2.0 * ct * m.cov,
        }
    };
    let add = |m: &MomentState, k: &MomentState, s: f64| MomentState {
        var_x: m.var_x + s * k.var_x,
        cov: m.cov + s * k.cov,
        var_p: m.var_p + s * k.var_p,
    };
    let span = t_span.1 - t_span.0;
    let full = (span / dt).floor() as usize;
    let rem = span - full as f64 * dt;
    let mut steps = vec![dt; full];
    if rem > 1e-12 * dt.max(1.0) {
        steps.push(rem);
    }
    let mut m = init;
    let mut t = t_span.0;
    let mut out = vec![(t, m)];
    for h in steps {
        let k1 = rhs(t, &m);
        let k2 = rhs(t + 0.5 * h, &add(&m, &k1, 0.5 * h));
        let k3 = rhs(t + 0.5 * h, &add(&m, &k2, 0.5 * h));
        let k4 = rhs(t + h, &add(&m, &k3, h));
        m = MomentState {
            var_x: m.var_x + h / 6.0 * (k1.var_x + 2.0 * k2.var_x + 2.0 * k3.var_x + k4.var_x),
            cov: m.cov + h / 6.0 * (k1.cov + 2.0 * k2.cov + 2.0 * k3.cov + k4.cov),
            var_p: m.var_p + h / 6.0 * (k1.var_p + 2.0 * k2.var_p + 2.0 * k3.var_p + k4.var_p),
        };
        t += h;
        if ![m.var_x, m.cov, m.var_p].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFiniteState { t });
        }
        out.push((t, m));
    }
    if let Some(last) = out.last_mut() {
        last.0 = t_span.1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_packet, CoefficientFunction as Cf, GaussianPacketSpec, Grid};

    fn params() -> PhysicalParams {
        PhysicalParams::default()
    }

    fn packet(spec: GaussianPacketSpec) -> WaveFunction {
        let grid = Grid::new(-20.0, 20.0, 1024).unwrap();
        make_packet(&spec, &grid, &params()).unwrap()
    }

    #[test]
    fn gaussian_variances() {
        let wf = packet(GaussianPacketSpec::gaussian(0.0, 0.0, 1.0));
        let vx = centered_moment(&wf, MomentAxis::Position, 2, &params()).unwrap();
        let vp = centered_moment(&wf, MomentAxis::Momentum, 2, &params()).unwrap();
        assert!((vx - 0.5).abs() < 1e-10);
        assert!((vp - 0.5).abs() < 1e-10);
    }

    #[test]
    fn odd_moment_of_symmetric_packet_vanishes() {
        let wf = packet(GaussianPacketSpec::gaussian(0.0, 0.0, 1.0));
        let m3 = centered_moment(&wf, MomentAxis::Position, 3, &params()).unwrap();
        assert!(m3.abs() < 1e-10);
    }

    #[test]
    fn gaussian_fourth_moment() {
        // 3 (sigma^2/2)^2 = 0.75 at sigma = 1
        let wf = packet(GaussianPacketSpec::gaussian(0.0, 0.0, 1.0));
        let m4 = centered_moment(&wf, MomentAxis::Position, 4, &params()).unwrap();
        assert!((m4 - 0.75).abs() < 1e-9);
    }

    #[test]
    fn covariance_of_plain_and_boosted_gaussian_is_zero() {
        for p0 in [0.0, 3.0] {
            let wf = packet(GaussianPacketSpec::gaussian(0.0, p0, 1.0));
            assert!(covariance(&wf, &params()).abs() < 1e-10);
        }
    }

    #[test]
    fn covariance_of_chirped_gaussian() {
        // cov = chirp * sigma^2
        let wf = packet(GaussianPacketSpec { x0: 0.0, p0: 0.0, sigma: 1.0, hermite_n: 0, chirp: 0.5 });
        assert!((covariance(&wf, &params()) - 0.5).abs() < 1e-8);
    }

    #[test]
    fn under_resolved_packet_is_rejected() {
        // sigma = 2.5 on this grid leaves < 4 momentum spacings of width
        let wf = packet(GaussianPacketSpec::gaussian(0.0, 0.0, 2.5));
        let r = centered_moment(&wf, MomentAxis::Momentum, 2, &params());
        assert!(matches!(r, Err(Error::UnderResolved { .. })));
    }

    #[test]
    fn free_spreading_moments() {
        let series = evolve_second_moments(
            &Cf::constant(1.0),
            &Cf::zero(),
            &Cf::zero(),
            MomentState::new(0.5, 0.0, 0.5),
            (0.0, 1.0),
            1e-3,
        )
        .unwrap();
        let (t, m) = series.last().unwrap();
        assert_eq!(*t, 1.0);
        assert!((m.var_x - 1.0).abs() < 1e-12);
        assert!((m.cov - 0.5).abs() < 1e-12);
        assert!((m.var_p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn matched_oscillator_is_a_fixed_point() {
        let series = evolve_second_moments(
            &Cf::constant(1.0),
            &Cf::zero(),
            &Cf::constant(1.0),
            MomentState::new(0.5, 0.0, 0.5),
            (0.0, 3.0),
            1e-3,
        )
        .unwrap();
        for (_, m) in series {
            assert!((m.var_x - 0.5).abs() < 1e-10);
            assert!(m.cov.abs() < 1e-10);
            assert!((m.var_p - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn symplectic_invariant_values() {
        assert_eq!(symplectic_invariant(&MomentState::new(0.5, 0.0, 0.5)), 0.25);
        assert_eq!(symplectic_invariant(&MomentState::new(1.0, 0.5, 0.5)), 0.25);
        assert_eq!(symplectic_invariant(&MomentState::new(2.0, 0.0, 1.0)), 2.0);
    }

    #[test]
    fn invariant_is_conserved_along_the_flow() {
        let series = evolve_second_moments(
            &Cf::offset_sinusoid(1.0, 0.3, 0.9, 0.1),
            &Cf::sinusoid(0.2, 1.3, 0.0),
            &Cf::offset_sinusoid(0.7, 0.4, 1.1, 0.6),
            MomentState::new(0.8, 0.1, 0.4),
            (0.0, 4.0),
            1e-3,
        )
        .unwrap();
        let initial = series[0].1.symplectic_invariant();
        for (_, m) in &series {
            let rel = (m.symplectic_invariant() - initial).abs() / initial;
            assert!(rel < 1e-9, "relative drift {rel}");
        }
    }

    #[test]
    fn robertson_schroedinger_for_extracted_states() {
        for spec in [
            GaussianPacketSpec::gaussian(0.0, 0.0, 1.0),
            GaussianPacketSpec { x0: 1.0, p0: -2.0, sigma: 0.8, hermite_n: 2, chirp: 0.3 },
        ] {
            let wf = packet(spec);
            let m = MomentState::new(
                centered_moment(&wf, MomentAxis::Position, 2, &params()).unwrap(),
                covariance(&wf, &params()),
                centered_moment(&wf, MomentAxis::Momentum, 2, &params()).unwrap(),
            );
            assert!(m.symplectic_invariant() >= 0.25 - 1e-9);
        }
    }
}
