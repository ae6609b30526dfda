//! Regularization terms `H̃ₙ` solving `H̃ₙ C = i∂_R C − i(C†∂_R C) C`.
//!
//! The unknown operator is restricted to the ansatz in [`ansatz`]; a
//! *selection* names the coefficients left free, all others are pinned to
//! zero. Exchange symmetry of the tracked eigenvector makes some rows of the
//! 4×4 equation coincide, leaving a square system in the free coefficients.

use core::fmt;

use crate::models::EigenOptions;

mod ansatz;
mod drb;
mod enumerate;
mod fastforward;
mod reduce;
mod solve;
mod table;

pub use ansatz::{
    ansatz_matrix, ansatz_matrix_in, formal_operator, single_spin_matrix, AnsatzCoefficients, Coefficient,
    OperatorBasis, Selection, StandardBasis, COEFFICIENT_COUNT,
};
pub use drb::drb_counterdiabatic;
pub use enumerate::{candidate_selections, cluster, enumerate_solutions, enumerate_with, Enumeration, Scope};
pub use fastforward::{fast_forward_hamiltonian, CdDriver, FastForwardPoint};
pub use reduce::{reduce_system, reduce_with, rhs_vector, ReducedSystem, SystemShape};
pub use solve::{solve_selection, CdSolution, SelectionOutcome};
pub use table::{table_entries, verify_table_b, TableEntry, TableEntryReport, TableReport};

/// Numerical acceptance thresholds of the solver.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Largest accepted condition number of the reduced system.
    pub cond_max: f64,
    /// Largest accepted `|Im x| / max(1, |x|)` of a solved coefficient.
    pub imag_tol: f64,
    /// Largest accepted full-equation residual of an accepted solution.
    pub residual_max: f64,
    /// Rows expected to coincide by symmetry may differ by at most this.
    pub symmetry_tol: f64,
    /// Coefficient vectors closer than this (relative, max-norm) share a group.
    pub cluster_tol: f64,
    /// Largest accepted residual of a closed-form table entry.
    pub table_residual_max: f64,
    /// Allow the antisymmetric exchanges `D1..D3` in selections.
    pub extended_basis: bool,
    pub eigen: EigenOptions,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            cond_max: 1e10,
            imag_tol: 1e-9,
            residual_max: 1e-10,
            symmetry_tol: 1e-10,
            cluster_tol: 1e-8,
            table_residual_max: 1e-9,
            extended_basis: false,
            eigen: EigenOptions::default(),
        }
    }
}

/// How solved coefficients are turned into an operator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CoefficientMode {
    /// Coefficients must come out real; the operator is Hermitian.
    #[default]
    Real,
    /// The complex solution of the reduced system is used as is. The
    /// resulting operator satisfies the core equation exactly but is not
    /// Hermitian when the solution is complex.
    Formal,
}

impl CoefficientMode {
    pub fn name(self) -> &'static str {
        match self {
            CoefficientMode::Real => "real",
            CoefficientMode::Formal => "formal",
        }
    }
}

/// Why a selection was not accepted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rejection {
    /// Condition number at or above `cond_max` (infinite when exactly singular).
    Singular { condition: f64 },
    /// Some solved coefficient has a non-negligible imaginary part.
    NotReal { imaginary: f64 },
    /// The solution does not satisfy the full equation.
    Residual { residual: f64 },
}

impl Rejection {
    pub fn code(&self) -> &'static str {
        match self {
            Rejection::Singular { .. } => "singular",
            Rejection::NotReal { .. } => "not_real",
            Rejection::Residual { .. } => "residual",
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Singular { condition } => write!(f, "singular (condition number {condition:e})"),
            Rejection::NotReal { imaginary } => write!(f, "not_real (relative imaginary part {imaginary:e})"),
            Rejection::Residual { residual } => write!(f, "residual {residual:e} too large"),
        }
    }
}
