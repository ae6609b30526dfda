use crate::error::{Error, Result};
use crate::linalg::{condition_number, solve, HermitianMatrix, Matrix, C64};

use super::{
    formal_operator, AnsatzCoefficients, Coefficient, CoefficientMode, OperatorBasis, ReducedSystem, Rejection,
    Selection, StandardBasis, SystemShape, Tolerances, COEFFICIENT_COUNT,
};

/// An accepted regularization term for one selection at one parameter value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CdSolution {
    pub r: f64,
    pub n: usize,
    pub dim: usize,
    pub mode: CoefficientMode,
    /// Real parts of the coefficients; unselected ones are exactly zero.
    pub coefficients: AnsatzCoefficients,
    /// Imaginary parts (only nonzero in [`CoefficientMode::Formal`]).
    pub imaginary: [f64; COEFFICIENT_COUNT],
    /// `‖H̃C − rhs‖` over the full equation.
    pub residual: f64,
    pub condition: f64,
    /// Degeneracy class from enumeration (`0` when not clustered).
    pub group_id: usize,
}

impl CdSolution {
    pub fn selection(&self) -> Selection {
        self.coefficients.selection()
    }

    pub fn value(&self, c: Coefficient) -> C64 {
        C64::new(self.coefficients.get(c), self.imaginary[c.index()])
    }

    pub fn is_real(&self) -> bool {
        self.imaginary.iter().all(|v| *v == 0.0)
    }

    /// `H̃` in the standard basis (non-Hermitian for complex formal solutions).
    pub fn operator(&self) -> Matrix {
        self.operator_in(&StandardBasis)
    }

    pub fn operator_in(&self, basis: &dyn OperatorBasis) -> Matrix {
        let pairs: alloc::vec::Vec<(Coefficient, C64)> = self.selection().iter().map(|c| (c, self.value(c))).collect();
        formal_operator(basis, self.dim, &pairs).expect("selection was validated when solving")
    }

    /// `H̃` as a Hermitian matrix; `None` for complex formal solutions.
    pub fn hermitian(&self) -> Option<HermitianMatrix> {
        self.is_real().then(|| HermitianMatrix::hermitian_part(&self.operator()))
    }
}

/// Result of solving one selection, accepted or not, with diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelectionOutcome {
    pub selection: Selection,
    pub r: f64,
    pub n: usize,
    pub dim: usize,
    pub mode: CoefficientMode,
    pub condition: f64,
    /// Largest `|Im x| / max(1, |x|)` over the solved coefficients (NaN when singular).
    pub imaginary: f64,
    /// Full-equation residual of the candidate (NaN when singular).
    pub residual: f64,
    /// Raw solved coefficients (zero when singular).
    pub values: [C64; COEFFICIENT_COUNT],
    pub rejection: Option<Rejection>,
    pub group_id: usize,
}

impl SelectionOutcome {
    pub fn accepted(&self) -> bool {
        self.rejection.is_none()
    }

    pub fn solution(&self) -> Option<CdSolution> {
        if !self.accepted() {
            return None;
        }
        let mut re = [0.0; COEFFICIENT_COUNT];
        let mut im = [0.0; COEFFICIENT_COUNT];
        for c in self.selection.iter() {
            re[c.index()] = self.values[c.index()].re;
            if self.mode == CoefficientMode::Formal {
                im[c.index()] = self.values[c.index()].im;
            }
        }
        let pairs: alloc::vec::Vec<(Coefficient, f64)> = self.selection.iter().map(|c| (c, re[c.index()])).collect();
        Some(CdSolution {
            r: self.r,
            n: self.n,
            dim: self.dim,
            mode: self.mode,
            coefficients: AnsatzCoefficients::from_pairs(&pairs).expect("accepted values are finite"),
            imaginary: im,
            residual: self.residual,
            condition: self.condition,
            group_id: self.group_id,
        })
    }

    pub fn into_result(self) -> Result<CdSolution> {
        match self.rejection {
            None => Ok(self.solution().expect("accepted")),
            Some(reason) => Err(Error::Rejected { selection: self.selection.label(), r: self.r, reason }),
        }
    }
}

/// Solves a reduced system in the standard basis.
pub fn solve_selection(rs: &ReducedSystem, tol: &Tolerances, mode: CoefficientMode) -> SelectionOutcome {
    solve_selection_in(&StandardBasis, rs, tol, mode)
}

/// Solves a reduced system, checks regularity and realness, and recomputes
/// the residual of the full equation with operators from `basis`.
pub fn solve_selection_in(
    basis: &dyn OperatorBasis,
    rs: &ReducedSystem,
    tol: &Tolerances,
    mode: CoefficientMode,
) -> SelectionOutcome {
    let dim = rs.state.dim();
    let mut out = SelectionOutcome {
        selection: rs.selection,
        r: rs.r,
        n: rs.n,
        dim,
        mode,
        condition: condition_number(&rs.matrix),
        imaginary: f64::NAN,
        residual: f64::NAN,
        values: [C64::new(0.0, 0.0); COEFFICIENT_COUNT],
        rejection: None,
        group_id: 0,
    };
    let singular = |c: f64| Some(Rejection::Singular { condition: c });
    if !(out.condition < tol.cond_max) {
        out.rejection = singular(out.condition);
        return out;
    }
    let Some(x) = solve(&rs.matrix, &rs.rhs) else {
        out.rejection = singular(f64::INFINITY);
        return out;
    };

    // the single-spin off-diagonal unknown is a complex matrix element, so
    // only the diagonal one carries a realness constraint
    let constrained: &[Coefficient] = match rs.shape {
        SystemShape::TwoSpin => {
            for (j, c) in rs.unknowns.iter().enumerate() {
                out.values[c.index()] = x[j];
            }
            &rs.unknowns
        }
        SystemShape::SingleSpin => {
            let (h, z) = (x[0], x[1]);
            out.values[Coefficient::Bz.index()] = h * 2.0;
            out.values[Coefficient::Bx.index()] = C64::new(2.0 * z.re, 0.0);
            out.values[Coefficient::By.index()] = C64::new(-2.0 * z.im, 0.0);
            &[Coefficient::Bz]
        }
    };
    out.imaginary = constrained
        .iter()
        .map(|c| {
            let v = out.values[c.index()];
            v.im.abs() / v.norm().max(1.0)
        })
        .fold(0.0, f64::max);

    let used: alloc::vec::Vec<(Coefficient, C64)> = rs
        .selection
        .iter()
        .map(|c| {
            let v = out.values[c.index()];
            (c, if mode == CoefficientMode::Real { C64::new(v.re, 0.0) } else { v })
        })
        .collect();
    let op = match formal_operator(basis, dim, &used) {
        Ok(op) => op,
        Err(_) => {
            out.rejection = singular(f64::INFINITY);
            return out;
        }
    };
    out.residual = (op.mul_vec(&rs.state) - rs.full_rhs).norm();

    if mode == CoefficientMode::Real && !(out.imaginary <= tol.imag_tol) {
        out.rejection = Some(Rejection::NotReal { imaginary: out.imaginary });
    } else if !(out.residual < tol.residual_max) {
        out.rejection = Some(Rejection::Residual { residual: out.residual });
    }
    out
}
