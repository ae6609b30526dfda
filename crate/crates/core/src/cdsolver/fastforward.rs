use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, Matrix};
use crate::models::{hamiltonian, state_jet, ModelSpec};
use crate::schedule::Schedule;

use super::{reduce_with, solve_selection, CdSolution, CoefficientMode, Selection, StandardBasis, Tolerances};

/// Evaluates `H_FF = H₀(R) + v·H̃ₙ(R)` for one tracked state and selection.
#[derive(Clone, Debug, PartialEq)]
pub struct CdDriver {
    pub model: ModelSpec,
    pub n: usize,
    /// `None` drives with the bare `H₀`.
    pub selection: Option<Selection>,
    pub mode: CoefficientMode,
    pub tol: Tolerances,
    /// Below this velocity a rejected selection is tolerated and the
    /// regularization term dropped for that evaluation. The default `0`
    /// never tolerates a rejection.
    pub velocity_floor: f64,
}

/// `H_FF` at one instant together with what produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FastForwardPoint {
    pub t: f64,
    pub r: f64,
    pub v: f64,
    pub matrix: Matrix,
    /// The regularization term used, if any.
    pub solution: Option<CdSolution>,
    /// The selection was rejected below the velocity floor and dropped.
    pub skipped: bool,
}

impl CdDriver {
    pub fn new(model: ModelSpec, n: usize, selection: Option<Selection>, mode: CoefficientMode) -> Self {
        Self { model, n, selection, mode, tol: Tolerances::default(), velocity_floor: 0.0 }
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_velocity_floor(mut self, floor: f64) -> Self {
        self.velocity_floor = floor;
        self
    }

    /// Regularization term at parameter `r`.
    pub fn solve_at(&self, r: f64) -> Result<CdSolution> {
        let sel = self.selection.ok_or_else(|| Error::Config("no selection configured".into()))?;
        let jet = state_jet(&self.model, r, self.n, &self.tol.eigen)?;
        let rs = reduce_with(&StandardBasis, self.model.kind(), &jet, sel, &self.tol)?;
        solve_selection(&rs, &self.tol, self.mode).into_result()
    }

    /// `H₀(r) + v·H̃(r)`; the term is not solved at all when `v == 0`.
    pub fn evaluate(&self, t: f64, r: f64, v: f64) -> Result<FastForwardPoint> {
        let h0 = hamiltonian(&self.model, r)?.into_matrix();
        let mut point = FastForwardPoint { t, r, v, matrix: h0, solution: None, skipped: false };
        if v == 0.0 || self.selection.is_none() {
            return Ok(point);
        }
        match self.solve_at(r) {
            Ok(sol) => {
                point.matrix = h0 + sol.operator().scale_real(v);
                point.solution = Some(sol);
            }
            Err(Error::Rejected { .. }) if v.abs() < self.velocity_floor => point.skipped = true,
            Err(e) => return Err(e),
        }
        Ok(point)
    }

    /// `H_FF` at time `t`, holding the schedule at its endpoint values
    /// outside `[0, T]`.
    pub fn at_time(&self, schedule: &Schedule, t: f64) -> Result<FastForwardPoint> {
        self.evaluate(t, schedule.frozen_parameter(t), schedule.frozen_velocity(t))
    }
}

/// `H₀(R(t)) + v(t)·H̃ₙ(R(t))` for `t ∈ [0, T]`.
///
/// Complex formal solutions give a non-Hermitian operator and are refused
/// here; [`CdDriver::at_time`] returns the general matrix.
pub fn fast_forward_hamiltonian(driver: &CdDriver, schedule: &Schedule, t: f64) -> Result<HermitianMatrix> {
    let r = schedule.advanced_parameter(t)?;
    let v = schedule.velocity(t)?;
    let p = driver.evaluate(t, r, v)?;
    if p.solution.is_some_and(|s| !s.is_real()) {
        return Err(Error::Config("the formal regularization term is not Hermitian".into()));
    }
    Ok(HermitianMatrix::hermitian_part(&p.matrix))
}
