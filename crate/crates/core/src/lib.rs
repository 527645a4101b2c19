//! Reflection and transmission amplitudes of a slab `[0, L]` holding a complex
//! potential `z f(x)` and a confined nonlinearity `γ F(|ψ|)`.
//!
//! Amplitudes come from direct integration ([`direct`]), from first- and
//! second-order perturbation theory ([`born`]), or from closed forms at the
//! resonant wavenumbers `k = sK/2`. [`classify`] tests the invisibility
//! conditions on any of them.

pub mod born;
pub mod classify;
pub mod cli;
pub mod config;
pub mod direct;
pub mod error;
pub mod model;
pub mod ode;
pub mod quadrature;

pub use error::{Error, Result};

/// Scientific notation with 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}
