//! Uniform position lattice and the matching momentum lattice.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid of `n` points `x_j = x_min + j dx`, `dx = (x_max - x_min)/n`.
///
/// The momentum lattice is `p_k = 2 pi hbar k / (n dx)` for
/// `k in [-n/2, n/2)`, stored in FFT index order, covering
/// `[-pi hbar/dx, pi hbar/dx)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

impl Grid {
    /// `n` must be a power of two with `n >= 64` and the span positive.
    pub fn new(x_min: f64, x_max: f64, n: usize) -> Result<Self> {
        let g = Self { x_min, x_max, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.n.is_power_of_two() || self.n < 64 {
            return Err(Error::config("grid.n", format!("{} is not a power of two >= 64", self.n)));
        }
        if !(self.x_max > self.x_min) || !self.x_min.is_finite() || !self.x_max.is_finite() {
            return Err(Error::config("grid.x_max", "need finite x_max > x_min"));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n as f64
    }

    pub fn span(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn position(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.position(j)).collect()
    }

    /// Momentum lattice spacing `2 pi hbar / (n dx)`.
    pub fn dp(&self, hbar: f64) -> f64 {
        2.0 * std::f64::consts::PI * hbar / (self.n as f64 * self.dx())
    }

    /// Momentum at FFT index `k`: nonnegative frequencies first, then negative.
    pub fn momentum(&self, k: usize, hbar: f64) -> f64 {
        let half = self.n / 2;
        let idx = if k < half { k as f64 } else { k as f64 - self.n as f64 };
        idx * self.dp(hbar)
    }

    /// All momenta in FFT index order.
    pub fn momenta(&self, hbar: f64) -> Vec<f64> {
        (0..self.n).map(|k| self.momentum(k, hbar)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_n() {
        assert!(Grid::new(-1.0, 1.0, 100).is_err());
        assert!(Grid::new(-1.0, 1.0, 32).is_err());
        assert!(Grid::new(1.0, -1.0, 64).is_err());
        assert!(Grid::new(-1.0, 1.0, 64).is_ok());
    }

    #[test]
    fn momentum_lattice_covers_nyquist_band() {
        let g = Grid::new(-10.0, 10.0, 128).unwrap();
        let p = g.momenta(1.0);
        let pmax = p.iter().cloned().fold(f64::MIN, f64::max);
        let pmin = p.iter().cloned().fold(f64::MAX, f64::min);
        let nyquist = std::f64::consts::PI / g.dx();
        assert!((pmin + nyquist).abs() < 1e-12);
        assert!((pmax - (nyquist - g.dp(1.0))).abs() < 1e-12);
        // FFT ordering: k = 0 first, most negative at index n/2
        assert_eq!(p[0], 0.0);
        assert!((p[64] + nyquist).abs() < 1e-12);
    }
}
