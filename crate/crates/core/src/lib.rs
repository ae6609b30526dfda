//! Fast-forward (accelerated adiabatic) driving of small spin systems.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`models`]: the Landau-Zener, transverse Ising, two-spin annealing and
//!   entangler Hamiltonians, their gauge-fixed instantaneous eigenstates and
//!   finite-difference eigenvector derivatives,
//! * [`schedule`]: the velocity profile `v(t)` and the advanced parameter
//!   `R(Λ(t))`,
//! * [`cdsolver`]: the state-dependent regularization term `H̃ₙ` solved under
//!   a two-spin exchange/field ansatz, selection enumeration, the closed-form
//!   table for the annealing model and the state-independent counter-diabatic
//!   operator,
//! * [`propagator`]: fixed-step RK4 integration of `i∂ₜψ = H_FF ψ` with
//!   fidelity tracking and a residual check of the analytic fast-forward state.
//!
//! Units use `ħ = 1` throughout.

#![no_std]
// Threshold checks are written `!(x < max)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod cdsolver;
pub mod error;
pub mod linalg;
pub mod models;
pub mod pauli;
pub mod presets;
pub mod propagator;
pub mod schedule;

pub use error::{Error, Result};
pub use linalg::{HermitianMatrix, Matrix, Vector, C64};
