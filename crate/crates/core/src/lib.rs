//! Numerical verification that the linearization of `-Δ_N U = e^U` around
//! its radial bubble has a bounded kernel of dimension exactly `N + 1`.
//!
//! * [`bubble`] — the explicit solution and its derived quantities.
//! * [`linop`] — the linearized operator, term by term.
//! * [`modes`] — the spherical-harmonic reduction to radial ODEs.
//! * [`ode_engine`] — integration of those ODEs and their asymptotics.
//! * [`verifier`] — per-mode evidence assembled into a report.

pub mod bubble;
pub mod error;
pub mod linop;
pub mod modes;
pub mod ode_engine;
pub mod quadrature;
pub mod testfn;
pub mod verifier;

pub use bubble::{BubbleParams, Dimension, SpacePoint};
pub use error::{Error, Result};
pub use verifier::{full_report, Tolerances, VerificationReport, Verdict};
