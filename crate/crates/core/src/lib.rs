//! Stationary states of dissipative quantum systems in a truncated
//! harmonic-oscillator basis.
//!
//! Generators have the form
//!
//! ```text
//! dρ/dt = −(i/ħ)[H, ρ] + Σ_k F_k N_k(L_H, R_H) ρ
//! ```
//!
//! where `L_H`, `R_H` are left and right multiplication by the oscillator
//! Hamiltonian. A Fock projector `|n><n|` is stationary exactly when every
//! scalar function `N_k(E_n, E_n)` vanishes. The crate builds the operators
//! and superoperators ([`fock`], [`superop`]), the concrete generators
//! ([`models`]), numerical stationarity diagnostics ([`stationary`]) and the
//! function-level fold/catastrophe analysis ([`bifurcation`]).

pub mod bifurcation;
pub mod error;
pub mod fock;
pub mod io;
pub mod models;
pub mod reproduce;
pub mod stationary;
pub mod superop;

pub use error::{Error, Result};
pub use fock::{DensityMatrix, EnergyLevel, FockSpace, OperatorMatrix};
pub use models::{LiouvillianModel, ModelKind, ModelParams};
pub use superop::{EnergyFunction, SuperOperator};

pub use num_complex::Complex64 as C64;
