//! Pseudospectral engine for doubly dispersive nonlinear wave equations
//!
//! ```text
//! u_tt - L u_xx = B(g(u))_xx
//! ```
//!
//! on a periodic truncation of the line, where `L` and `B` are Fourier
//! multipliers. The crate provides the spectral core, exponential time
//! steppers built on the exact mode propagator, energy and norm
//! diagnostics, blow-up detection with concavity certificates, and a small
//! config-driven runner used by the `ddwave` binary.

// Validation sites write `!(x > 0.0)` on purpose: the negation classifies
// NaN as a violation, which the rewritten `x <= 0.0` would wave through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod config;
pub mod energy;
pub mod error;
pub mod exec;
pub mod initial;
pub mod oracle;
pub mod propagator;
pub mod runner;
pub mod spectral;
pub mod svg;
pub mod symbols;

pub use error::{DdError, Result};
pub use spectral::{FieldState, Grid, PhysicalField, SpectrumField, Transform};
pub use symbols::{EquationSpec, GateId, Nonlinearity, Symbol};
