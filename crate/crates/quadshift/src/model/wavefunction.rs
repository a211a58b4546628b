//! Complex amplitudes on a lattice, tagged by representation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Position,
    Momentum,
}

/// A wave function sampled on the grid, normalized so that the discrete L2
/// norm `sqrt(sum |psi_j|^2 w)` is 1, with `w = dx` in position
/// representation and `w = dp` in momentum representation.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub amplitudes: Vec<Complex64>,
    pub representation: Representation,
    pub t: f64,
    pub grid: Grid,
}

impl WaveFunction {
    /// Lattice weight of the current representation (`dx` or `dp`).
    pub fn weight(&self, hbar: f64) -> f64 {
        match self.representation {
            Representation::Position => self.grid.dx(),
            Representation::Momentum => self.grid.dp(hbar),
        }
    }

    pub fn norm(&self, hbar: f64) -> f64 {
        let s: f64 = self.amplitudes.iter().map(|a| a.norm_sqr()).sum();
        (s * self.weight(hbar)).sqrt()
    }

    pub fn normalize(&mut self, hbar: f64) {
        let n = self.norm(hbar);
        if n > 0.0 {
            let inv = 1.0 / n;
            for a in &mut self.amplitudes {
                *a *= inv;
            }
        }
    }

    /// `<self|other>` with the lattice weight; both must share representation.
    pub fn inner(&self, other: &WaveFunction, hbar: f64) -> Complex64 {
        assert_eq!(self.representation, other.representation);
        assert_eq!(self.amplitudes.len(), other.amplitudes.len());
        let s: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.weight(hbar)
    }

    /// Probability density times the lattice weight at each point.
    pub fn density(&self, hbar: f64) -> Vec<f64> {
        let w = self.weight(hbar);
        self.amplitudes.iter().map(|a| a.norm_sqr() * w).collect()
    }

    /// Mean of the lattice coordinate in the current representation.
    pub fn mean_coordinate(&self, hbar: f64) -> f64 {
        let w = self.weight(hbar);
        match self.representation {
            Representation::Position => self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(j, a)| self.grid.position(j) * a.norm_sqr() * w)
                .sum(),
            Representation::Momentum => self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(k, a)| self.grid.momentum(k, hbar) * a.norm_sqr() * w)
                .sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_sets_unit_norm() {
        let grid = Grid::new(-5.0, 5.0, 64).unwrap();
        let mut wf = WaveFunction {
            amplitudes: vec![Complex64::new(1.0, 0.5); 64],
            representation: Representation::Position,
            t: 0.0,
            grid,
        };
        wf.normalize(1.0);
        assert!((wf.norm(1.0) - 1.0).abs() < 1e-14);
    }
}
