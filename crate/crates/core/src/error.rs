use alloc::string::String;

use crate::cdsolver::Rejection;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {what} is not finite ({value})")]
    Domain { what: &'static str, value: f64 },

    #[error("time {t} outside the fast-forward window [0, {t_ff}]")]
    Range { t: f64, t_ff: f64 },

    #[error("state {n} is degenerate at R = {r}: gap {gap:e} below {gap_min:e}")]
    Degenerate { n: usize, r: f64, gap: f64, gap_min: f64 },

    #[error("internal consistency error: {what} (mismatch {mismatch:e})")]
    Consistency { what: &'static str, mismatch: f64 },

    #[error("gauge anchor component {anchor} has magnitude {magnitude:e} at R = {r}; switch anchor")]
    GaugeInstability { anchor: usize, magnitude: f64, r: f64 },

    #[error("adiabatic phase rate has imaginary residue {residue:e}")]
    PhaseResidue { residue: f64 },

    #[error("selection has {got} unknowns but the reduced system has {expected} rows")]
    Arity { expected: usize, got: usize },

    #[error("rows {rows:?} should be degenerate but differ by {mismatch:e}")]
    SymmetryViolation { rows: (usize, usize), mismatch: f64 },

    #[error("coefficient {0} is not part of this model's regularization basis")]
    NotInBasis(&'static str),

    #[error("selection {selection} rejected at R = {r}: {reason}")]
    Rejected { selection: String, r: f64, reason: Rejection },

    #[error("norm drift {drift:e} at t = {t}; use a smaller dt")]
    StepSize { drift: f64, t: f64 },

    #[error("closed-form entry {entry} residual {residual:e} exceeds {threshold:e}")]
    TableEntry { entry: usize, residual: f64, threshold: f64 },
}
