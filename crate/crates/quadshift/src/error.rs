//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// The packet support does not fit the grid; enlarge the grid.
    #[error("packet support needs {required} on each side of x0, grid margin is {available}")]
    PacketTooWide { required: f64, available: f64 },

    /// An integrator step produced NaN/Inf; reduce dt or check coefficients.
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    /// The differential and integral forms of the phase accumulator disagree.
    #[error("beta cross-check failed at t = {t}: |delta| = {delta:.3e} > {limit:.3e}")]
    CrossCheckFailure { t: f64, delta: f64, limit: f64 },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature on [{a}, {b}] did not reach tolerance {tol:.1e}")]
    QuadratureFailure { a: f64, b: f64, tol: f64 },

    /// A tridiagonal pivot fell below 1e-14 of its row scale.
    #[error("tridiagonal solve broke down at row {row}: |pivot| = {pivot:.3e}")]
    SolverBreakdown { row: usize, pivot: f64 },

    /// Probability mass in the outer grid margins exceeds 1e-6.
    #[error("boundary leak {leak:.3e} at t = {t}; result untrustworthy")]
    BoundaryLeak { leak: f64, t: f64 },

    /// A spectral translation larger than 25% of the span would wrap around.
    #[error("shift {shift:.4} exceeds 25% of the lattice span {span:.4}")]
    AliasedShift { shift: f64, span: f64 },

    /// The packet is too narrow in momentum for lattice moment extraction.
    #[error("momentum width {width:.3e} below 4 lattice spacings ({limit:.3e})")]
    UnderResolved { width: f64, limit: f64 },

    /// Invalid configuration; `field` names the offending entry.
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
