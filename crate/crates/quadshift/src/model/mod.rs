//! Shared domain types: physical constants, coefficient functions, grids,
//! wave functions, and initial packets.
//!
//! Everything here is an immutable value after construction; instances can be
//! shared or moved across threads freely.

mod coeff;
mod grid;
mod packet;
mod wavefunction;

pub use coeff::{CoefficientFunction, CoefficientSet, Segment, Sinusoid};
pub use grid::Grid;
pub use packet::{make_packet, GaussianPacketSpec};
pub use wavefunction::{Representation, WaveFunction};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants; only `hbar` is needed, default 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalParams {
    pub hbar: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self { hbar: 1.0 }
    }
}

impl PhysicalParams {
    pub fn new(hbar: f64) -> Result<Self> {
        let p = Self { hbar };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::config("params.hbar", "must be positive and finite"));
        }
        Ok(())
    }
}
