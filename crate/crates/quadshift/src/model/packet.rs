//! Gaussian and Hermite-Gaussian initial wave packets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;
use super::wavefunction::{Representation, WaveFunction};
use super::PhysicalParams;
use crate::error::{Error, Result};

/// Parameters of a Hermite-Gaussian packet
/// `psi(x) ~ H_n(u) exp(-u^2/2 + i chirp (x-x0)^2/hbar + i p0 (x-x0)/hbar)`
/// with `u = (x-x0)/sigma`.
///
/// Width convention: the order-0 packet has position variance `sigma^2/2`.
/// `hermite_n` is limited to 10, the documented numerical range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianPacketSpec {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
    #[serde(default)]
    pub hermite_n: u32,
    #[serde(default)]
    pub chirp: f64,
}

impl GaussianPacketSpec {
    pub fn gaussian(x0: f64, p0: f64, sigma: f64) -> Self {
        Self { x0, p0, sigma, hermite_n: 0, chirp: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::config("packet.sigma", "must be positive and finite"));
        }
        if self.hermite_n > 10 {
            return Err(Error::config("packet.hermite_n", "supported range is 0..=10"));
        }
        if ![self.x0, self.p0, self.chirp].iter().all(|v| v.is_finite()) {
            return Err(Error::config("packet", "x0, p0, chirp must be finite"));
        }
        Ok(())
    }

    /// Half-width the grid must leave on each side of `x0`.
    pub fn support_radius(&self) -> f64 {
        6.0 * self.sigma * (2.0 * self.hermite_n as f64 + 1.0).sqrt()
    }
}

/// Physicists' Hermite polynomial `H_n(u)` by the three-term recurrence.
fn hermite(n: u32, u: f64) -> f64 {
    let mut h0 = 1.0;
    if n == 0 {
        return h0;
    }
    let mut h1 = 2.0 * u;
    for k in 1..n {
        let h2 = 2.0 * u * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Builds the normalized packet on the grid.
///
/// Errors with `PacketTooWide` when the support radius
/// `6 sigma sqrt(2 n + 1)` does not fit between `x0` and both grid edges.
pub fn make_packet(
    spec: &GaussianPacketSpec,
    grid: &Grid,
    params: &PhysicalParams,
) -> Result<WaveFunction> {
    spec.validate()?;
    grid.validate()?;
    let required = spec.support_radius();
    let available = (spec.x0 - grid.x_min).min(grid.x_max - spec.x0);
    if available < required {
        return Err(Error::PacketTooWide { required, available });
    }
    let hbar = params.hbar;
    let amplitudes: Vec<Complex64> = (0..grid.n)
        .map(|j| {
            let x = grid.position(j);
            let d = x - spec.x0;
            let u = d / spec.sigma;
            let envelope = hermite(spec.hermite_n, u) * (-0.5 * u * u).exp();
            let phase = (spec.chirp * d * d + spec.p0 * d) / hbar;
            Complex64::from_polar(1.0, phase) * envelope
        })
        .collect();
    let mut wf = WaveFunction {
        amplitudes,
        representation: Representation::Position,
        t: 0.0,
        grid: *grid,
    };
    wf.normalize(hbar);
    Ok(wf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var_x(wf: &WaveFunction) -> f64 {
        let dx = wf.grid.dx();
        let mean: f64 = wf
            .amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| wf.grid.position(j) * a.norm_sqr() * dx)
            .sum();
        wf.amplitudes
            .iter()
            .enumerate()
            .map(|(j, a)| {
                let d = wf.grid.position(j) - mean;
                d * d * a.norm_sqr() * dx
            })
            .sum()
    }

    #[test]
    fn unit_gaussian_has_half_variance() {
        let grid = Grid::new(-20.0, 20.0, 1024).unwrap();
        let params = PhysicalParams::default();
        let wf = make_packet(&GaussianPacketSpec::gaussian(0.0, 0.0, 1.0), &grid, &params).unwrap();
        assert!((wf.norm(1.0) - 1.0).abs() < 1e-12);
        assert!((var_x(&wf) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn boost_leaves_density_untouched() {
        let grid = Grid::new(-20.0, 20.0, 1024).unwrap();
        let params = PhysicalParams::default();
        let rest = make_packet(&GaussianPacketSpec::gaussian(0.0, 0.0, 1.0), &grid, &params).unwrap();
        let boosted =
            make_packet(&GaussianPacketSpec::gaussian(0.0, 3.0, 1.0), &grid, &params).unwrap();
        for (a, b) in rest.amplitudes.iter().zip(&boosted.amplitudes) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_one_variance() {
        // Hermite-Gaussian variance (2n+1) sigma^2 / 2
        let grid = Grid::new(-20.0, 20.0, 1024).unwrap();
        let params = PhysicalParams::default();
        let spec = GaussianPacketSpec { x0: 0.0, p0: 0.0, sigma: 1.0, hermite_n: 1, chirp: 0.0 };
        let wf = make_packet(&spec, &grid, &params).unwrap();
        assert!((var_x(&wf) - 1.5).abs() < 1e-10);
    }

    #[test]
    fn too_wide_is_rejected() {
        let grid = Grid::new(-20.0, 20.0, 1024).unwrap();
        let params = PhysicalParams::default();
        let spec = GaussianPacketSpec::gaussian(19.0, 0.0, 1.0);
        match make_packet(&spec, &grid, &params) {
            Err(Error::PacketTooWide { required, available }) => {
                assert_eq!(required, 6.0);
                assert_eq!(available, 1.0);
            }
            other => panic!("expected PacketTooWide, got {other:?}"),
        }
    }

    #[test]
    fn hermite_matches_explicit_low_orders() {
        for &u in &[-1.7, 0.0, 0.4, 2.3] {
            assert_eq!(hermite(0, u), 1.0);
            assert_eq!(hermite(1, u), 2.0 * u);
            assert!((hermite(2, u) - (4.0 * u * u - 2.0)).abs() < 1e-12);
            assert!((hermite(3, u) - (8.0 * u * u * u - 12.0 * u)).abs() < 1e-11);
        }
    }
}
