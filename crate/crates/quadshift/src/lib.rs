//! 1D quantum dynamics under arbitrary time-dependent quadratic generators
//! `H = a/2 p^2 + b/2 (px + xp) + c/2 x^2 + f p + g x`, built around one
//! fact: the linear terms `f p + g x` only translate the wave function along
//! the classical shift trajectory and multiply it by a position-linear
//! phase. The crate propagates wave packets (Crank-Nicolson), integrates the
//! classical shift and its phase accumulators, applies the reduction
//! transform, and measures how far direct evolution deviates from the
//! transformed linear-term-free evolution.
//!
//! Entry points:
//! - [`model`]: grids, coefficient functions, wave functions, packets.
//! - [`classical`]: trajectories, the shift `(x_bar, p_bar)`, and the phase
//!   accumulators `beta`, `gamma`.
//! - [`propagator`]: norm-preserving Crank-Nicolson evolution.
//! - [`transform`]: the shift/phase transform and residual metrics.
//! - [`moments`]: centered moments and the closed second-moment ODEs.
//! - [`scenario`] / [`runner`]: JSON-configured runs, verification reports,
//!   convergence studies, and sweeps.
//!
//! The `examples/` directory demonstrates each capability end to end; the
//! `quadshift` binary exposes the runner as `run`, `verify`, `convergence`,
//! and `sweep` subcommands.

pub mod classical;
pub mod error;
mod fourier;
pub mod model;
pub mod moments;
pub mod propagator;
pub mod runner;
pub mod scenario;
pub mod transform;

pub use classical::{
    example1_shift, example2_shift, integrate_shift, integrate_trajectory, ClassicalState,
    ShiftState,
};
pub use error::{Error, Result};
pub use model::{
    make_packet, CoefficientFunction, CoefficientSet, GaussianPacketSpec, Grid, PhysicalParams,
    Representation, WaveFunction,
};
pub use moments::{
    centered_moment, covariance, evolve_second_moments, symplectic_invariant, MomentAxis,
    MomentState,
};
pub use propagator::{boundary_leak, build_generator, cn_step, evolve, Evolution, SeriesRecord};
pub use scenario::{OutputSpec, Scenario, TimeSpec, Tolerances};
pub use transform::{
    apply_linear_shift, invert_linear_shift, theorem_residual, to_momentum, to_position,
    ResidualReport,
};
