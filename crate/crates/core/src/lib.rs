//! Quasiprobability estimates and their statistical uncertainties under three
//! measurement regimes: the quantum-mechanical reference, balanced homodyne
//! sampling with pattern functions, and unbalanced (displaced photon-counting)
//! detection.
//!
//! Phase-space conventions used throughout:
//!
//! * `D(β) = exp(β a† − β* a)` and `Φ(β) = Tr{ρ D(β)}`.
//! * Quadratures `x_φ = a e^{−iφ} + a† e^{iφ}`, so the vacuum variance is 1.
//! * `Φ(i b e^{iφ}) = ⟨exp(i b x_φ)⟩`: a complex argument `β` corresponds to
//!   `b = |β|` and `φ = arg β − π/2`.
//! * Two-mode covariance matrices are ordered `(x₁, p₁, x₂, p₂)`.

pub mod error;
pub mod estimators;
pub mod numerics;
pub mod observables;
mod par;
pub mod pattern;
pub mod phasespace;
pub mod simulate;

pub use error::{Error, Result};
pub use num_complex::Complex64;
