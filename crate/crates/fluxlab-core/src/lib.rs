//! Numerical core for simulating adiabatic flux insertion and Laughlin-state
//! growing with cavity photons.
//!
//! The crate is organized bottom-up:
//!
//! * [`quad`] — adaptive radial quadrature on `[0, inf)` for Gaussian-damped
//!   integrands.
//! * [`modes`] — Laguerre-Gauss mode functions and overlaps.
//! * [`couplings`] — light-matter coupling matrix elements between collective
//!   modes, their analytic limits, and tabulation.
//! * [`ode`] — adaptive Runge-Kutta integration of linear complex systems.
//! * [`stirap`] — single-excitation dynamics of the two-step flux-insertion
//!   protocol (dark-state transfer between angular-momentum modes).
//! * [`losses`] — non-adiabatic loss model: mixing angles, closed-form survival
//!   probabilities, a five-level brute-force oracle, and the fidelity surface.
//! * [`linalg`] — dense symmetric eigensolvers and Krylov propagators for the
//!   Fock-space dynamics.
//! * [`fqh`] — interacting bosonic Fock-space engine: pseudopotential matrix
//!   elements, Laughlin/quasi-hole states, gaps, pump overlaps.
//! * [`growing`] — the full state-growing protocol: detuning sweeps, pump
//!   pulses, chained evolution, and the analytic fidelity-scaling estimate.
//!
//! The crate is `no_std`-compatible (requires `alloc`); enable the `libm`
//! feature for float math without the standard library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod couplings;
pub mod fqh;
pub mod growing;
pub mod linalg;
pub mod losses;
pub mod modes;
pub mod ode;
pub mod quad;
pub mod stirap;

use core::fmt;

/// Errors shared across the numerical modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Adaptive quadrature exhausted its evaluation budget before reaching the
    /// requested tolerance; carries the best error estimate achieved.
    QuadratureBudget { achieved_err: f64 },
    /// Adaptive ODE stepping drove the step size below the representable
    /// minimum at the given time.
    StepSizeUnderflow { t: f64 },
    /// An input violated a documented precondition.
    InvalidInput(&'static str),
    /// Two objects that must share a truncation or dimension disagree.
    DimensionMismatch { expected: usize, found: usize },
    /// A required mode is absent from the basis.
    MissingMode { l: u32 },
    /// A basis would exceed the configured size cap.
    BasisTooLarge { dim: usize, cap: usize },
    /// An iterative eigensolver failed to converge.
    EigenFailure,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::QuadratureBudget { achieved_err } => {
                write!(f, "quadrature did not converge (best error estimate {achieved_err:e})")
            }
            Error::StepSizeUnderflow { t } => {
                write!(f, "ODE step size underflow at t = {t}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::MissingMode { l } => write!(f, "mode l = {l} missing from basis"),
            Error::BasisTooLarge { dim, cap } => {
                write!(f, "basis dimension {dim} exceeds cap {cap}")
            }
            Error::EigenFailure => write!(f, "eigensolver failed to converge"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
