use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector, C64};
use crate::models::{state_jet, ModelKind, ModelSpec, StateJet};

use super::{Coefficient, OperatorBasis, Selection, StandardBasis, Tolerances};

/// `i∂_R C − i(C†∂_R C) C` (with `ħ = 1`), orthogonal to `C`.
pub fn rhs_vector(jet: &StateJet) -> Vector {
    let i = C64::new(0.0, 1.0);
    let c = &jet.state.amplitudes;
    let z = jet.connection();
    jet.derivative.scale(i) - c.scale(i * z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemShape {
    /// Two-spin ansatz; the unknowns are the selected coefficients.
    TwoSpin,
    /// Single spin: the unknowns are `H̃₁₁` (real) and `H̃₁₂`, standing for
    /// `B̃ = (2 Re H̃₁₂, −2 Im H̃₁₂, 2 H̃₁₁)`.
    SingleSpin,
}

/// Square linear system in the free coefficients of one selection.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSystem {
    pub kind: ModelKind,
    pub shape: SystemShape,
    pub r: f64,
    pub n: usize,
    pub selection: Selection,
    /// Free coefficients; for [`SystemShape::TwoSpin`] also the column order of `matrix`.
    pub unknowns: Vec<Coefficient>,
    pub matrix: Matrix,
    pub rhs: Vector,
    /// Groups of rows of the full equation that coincide; the first row of
    /// each group is the one kept.
    pub rows: &'static [&'static [usize]],
    /// Tracked eigenvector.
    pub state: Vector,
    /// Right-hand side of the full equation.
    pub full_rhs: Vector,
}

const SINGLE: &[&[usize]] = &[&[0], &[1]];
const EXCHANGE: &[&[usize]] = &[&[0], &[1, 2], &[3]];
const EXCHANGE_AND_FLIP: &[&[usize]] = &[&[3, 0], &[1, 2]];
const UNMERGED: &[&[usize]] = &[&[0], &[1], &[2], &[3]];

fn row_groups(kind: ModelKind, selection: Selection) -> &'static [&'static [usize]] {
    if Coefficient::ANTISYMMETRIC.iter().any(|c| selection.contains(*c)) {
        // antisymmetric exchanges break the degeneracy of the exchanged rows
        return UNMERGED;
    }
    match kind {
        ModelKind::Lz => SINGLE,
        ModelKind::Tfim => EXCHANGE_AND_FLIP,
        ModelKind::Qa | ModelKind::Gen => EXCHANGE,
    }
}

/// Reduced system for state `n` of `model` at `r` in the standard basis.
pub fn reduce_system(
    model: &ModelSpec,
    r: f64,
    n: usize,
    selection: Selection,
    tol: &Tolerances,
) -> Result<ReducedSystem> {
    let jet = state_jet(model, r, n, &tol.eigen)?;
    reduce_with(&StandardBasis, model.kind(), &jet, selection, tol)
}

/// Reduced system built from a precomputed eigenstate jet.
pub fn reduce_with(
    basis: &dyn OperatorBasis,
    kind: ModelKind,
    jet: &StateJet,
    selection: Selection,
    tol: &Tolerances,
) -> Result<ReducedSystem> {
    let c = jet.state.amplitudes;
    let full_rhs = rhs_vector(jet);
    let rows = row_groups(kind, selection);

    if kind == ModelKind::Lz {
        return single_spin(jet, selection, c, full_rhs);
    }

    if let Some(d) = selection.iter().find(|c| c.is_antisymmetric()) {
        if !tol.extended_basis {
            return Err(Error::NotInBasis(d.name()));
        }
    }
    if selection.len() != rows.len() {
        return Err(Error::Arity { expected: rows.len(), got: selection.len() });
    }

    for group in rows {
        let first = group[0];
        for &row in &group[1..] {
            let mismatch = (c[row] - c[first]).norm().max((full_rhs[row] - full_rhs[first]).norm());
            let scale = c[first].norm().max(full_rhs[first].norm()).max(1.0);
            if mismatch > tol.symmetry_tol * scale {
                return Err(Error::SymmetryViolation { rows: (first, row), mismatch });
            }
        }
    }

    let unknowns = selection.to_vec();
    let m = rows.len();
    let columns: Vec<Vector> = unknowns.iter().map(|k| basis.operator(*k).mul_vec(&c)).collect();
    let matrix = Matrix::from_fn(m, |i, j| columns[j][rows[i][0]]);
    let mut rhs = Vector::zeros(m);
    for (i, group) in rows.iter().enumerate() {
        rhs[i] = full_rhs[group[0]];
    }
    Ok(ReducedSystem {
        kind,
        shape: SystemShape::TwoSpin,
        r: jet.r,
        n: jet.state.n,
        selection,
        unknowns,
        matrix,
        rhs,
        rows,
        state: c,
        full_rhs,
    })
}

fn single_spin(jet: &StateJet, selection: Selection, c: Vector, full_rhs: Vector) -> Result<ReducedSystem> {
    let field = Selection::of(&[Coefficient::Bx, Coefficient::By, Coefficient::Bz]);
    if let Some(bad) = selection.iter().find(|k| !field.contains(*k)) {
        return Err(Error::NotInBasis(bad.name()));
    }
    if selection != field {
        return Err(Error::Arity { expected: 3, got: selection.len() });
    }
    // row 1: h C₁ + z C₂ = r₁; conjugated row 2: −h C₂* + z C₁* = r₂*
    let matrix = Matrix::from_rows(&[&[c[0], c[1]], &[-c[1].conj(), c[0].conj()]]);
    let rhs = Vector::from_slice(&[full_rhs[0], full_rhs[1].conj()]);
    Ok(ReducedSystem {
        kind: ModelKind::Lz,
        shape: SystemShape::SingleSpin,
        r: jet.r,
        n: jet.state.n,
        selection,
        unknowns: selection.to_vec(),
        matrix,
        rhs,
        rows: SINGLE,
        state: c,
        full_rhs,
    })
}
