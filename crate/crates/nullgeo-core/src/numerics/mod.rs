//! Shared numerical kernels: adaptive quadrature, explicit adaptive ODE
//! integration with event detection, and bracketed root finding.
//!
//! All kernels are deterministic (no randomized node placement) and pure, so
//! they are safe to call concurrently.

mod ode;
mod quadrature;
mod root;

pub use ode::{ode_integrate, rk45_step, EventDirection, EventRecord, OdeEvent, Trajectory};
pub use quadrature::adaptive_quadrature;
pub use root::find_root;

use thiserror::Error;

/// Error conditions shared by the numerical kernels.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    #[error("function returned a non-finite value at {at}")]
    NonFinite { at: f64 },
    #[error("evaluation budget exceeded ({limit} steps): {context}")]
    Budget { limit: usize, context: String },
    #[error("step size collapsed to {step:.3e} at t = {at:.6e}")]
    Stiff { at: f64, step: f64 },
    #[error("no sign change on [{lo}, {hi}] (f(lo) = {flo:.3e}, f(hi) = {fhi:.3e})")]
    NoBracket { lo: f64, hi: f64, flo: f64, fhi: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Accuracy targets and an evaluation budget for the kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Tolerance {
    pub fn new(abs_tol: f64, rel_tol: f64, max_steps: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(NumericsError::InvalidTolerance(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if !(rel_tol > 0.0) {
            return Err(NumericsError::InvalidTolerance(format!(
                "rel_tol must be positive, got {rel_tol}"
            )));
        }
        if max_steps == 0 {
            return Err(NumericsError::InvalidTolerance(
                "max_steps must be at least 1".to_string(),
            ));
        }
        Ok(Self { abs_tol, rel_tol, max_steps })
    }

    /// Default target for quadrature: tight enough that quadrature results
    /// can serve as reference values for the ODE-traced route.
    pub fn quadrature() -> Self {
        Self { abs_tol: 1e-12, rel_tol: 1e-11, max_steps: 4000 }
    }

    /// Default target for ODE integration.
    pub fn ode() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-9, max_steps: 200_000 }
    }

    /// Default target for root bracketing.
    pub fn root() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-13, max_steps: 200 }
    }
}
