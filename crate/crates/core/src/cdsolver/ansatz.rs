//! The two-spin regularization basis and its coefficient containers.

use core::fmt;

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, Matrix, C64};
use crate::pauli::{self, Axis};

/// One coefficient of the regularization ansatz.
///
/// The first nine form the default basis
/// `J̃₁σˣσˣ + J̃₂σʸσʸ + J̃₃σᶻσᶻ + W̃₁(σˣσʸ+σʸσˣ) + W̃₂(σʸσᶻ+σᶻσʸ) + W̃₃(σᶻσˣ+σˣσᶻ) + ½(σ₁+σ₂)·B̃`.
/// `D1..D3` are the antisymmetric exchanges `σˣσʸ−σʸσˣ`, `σʸσᶻ−σᶻσʸ`,
/// `σᶻσˣ−σˣσᶻ`, only present in the extended basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coefficient {
    J1,
    J2,
    J3,
    W1,
    W2,
    W3,
    Bx,
    By,
    Bz,
    D1,
    D2,
    D3,
}

pub const COEFFICIENT_COUNT: usize = 12;

impl Coefficient {
    pub const ALL: [Coefficient; COEFFICIENT_COUNT] = [
        Coefficient::J1,
        Coefficient::J2,
        Coefficient::J3,
        Coefficient::W1,
        Coefficient::W2,
        Coefficient::W3,
        Coefficient::Bx,
        Coefficient::By,
        Coefficient::Bz,
        Coefficient::D1,
        Coefficient::D2,
        Coefficient::D3,
    ];

    /// The default (exchange-symmetric) basis.
    pub const STANDARD: [Coefficient; 9] = [
        Coefficient::J1,
        Coefficient::J2,
        Coefficient::J3,
        Coefficient::W1,
        Coefficient::W2,
        Coefficient::W3,
        Coefficient::Bx,
        Coefficient::By,
        Coefficient::Bz,
    ];

    pub const ANTISYMMETRIC: [Coefficient; 3] = [Coefficient::D1, Coefficient::D2, Coefficient::D3];

    /// Coefficients whose operators are purely imaginary in the standard basis.
    pub const IMAGINARY: [Coefficient; 3] = [Coefficient::By, Coefficient::W1, Coefficient::W2];

    /// Coefficients whose operators are real.
    pub const REAL: [Coefficient; 6] =
        [Coefficient::Bz, Coefficient::Bx, Coefficient::J1, Coefficient::J2, Coefficient::J3, Coefficient::W3];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Coefficient::J1 => "J1",
            Coefficient::J2 => "J2",
            Coefficient::J3 => "J3",
            Coefficient::W1 => "W1",
            Coefficient::W2 => "W2",
            Coefficient::W3 => "W3",
            Coefficient::Bx => "Bx",
            Coefficient::By => "By",
            Coefficient::Bz => "Bz",
            Coefficient::D1 => "D1",
            Coefficient::D2 => "D2",
            Coefficient::D3 => "D3",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(alloc::format!("unknown coefficient `{s}`")))
    }

    pub fn is_antisymmetric(self) -> bool {
        matches!(self, Coefficient::D1 | Coefficient::D2 | Coefficient::D3)
    }
}

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A set of free coefficients, ordered by [`Coefficient::index`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Selection(u16);

impl Selection {
    pub const EMPTY: Selection = Selection(0);

    pub fn of(coefficients: &[Coefficient]) -> Self {
        coefficients.iter().fold(Self::EMPTY, |s, c| s.with(*c))
    }

    pub fn with(self, c: Coefficient) -> Self {
        Selection(self.0 | (1 << c.index()))
    }

    pub fn contains(self, c: Coefficient) -> bool {
        self.0 & (1 << c.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn iter(self) -> impl Iterator<Item = Coefficient> {
        Coefficient::ALL.into_iter().filter(move |c| self.contains(*c))
    }

    pub fn to_vec(self) -> Vec<Coefficient> {
        self.iter().collect()
    }

    /// Parses `"W3,By,W1"` (commas, `+` or whitespace as separators).
    pub fn parse(s: &str) -> Result<Self> {
        let mut sel = Self::EMPTY;
        for tok in s.split(|ch: char| ch == ',' || ch == '+' || ch.is_whitespace()).filter(|t| !t.is_empty()) {
            let c = Coefficient::parse(tok)?;
            if sel.contains(c) {
                return Err(Error::Config(alloc::format!("coefficient `{c}` listed twice")));
            }
            sel = sel.with(c);
        }
        if sel.is_empty() {
            return Err(Error::Config("empty selection".into()));
        }
        Ok(sel)
    }

    pub fn label(self) -> String {
        let names: Vec<&str> = self.iter().map(Coefficient::name).collect();
        names.join("+")
    }
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, c) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            f.write_str(c.name())?;
        }
        f.write_str("}")
    }
}

/// Real ansatz coefficients; those outside `selection` are exactly zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnsatzCoefficients {
    values: [f64; COEFFICIENT_COUNT],
    selection: Selection,
}

impl AnsatzCoefficients {
    pub fn zero() -> Self {
        Self { values: [0.0; COEFFICIENT_COUNT], selection: Selection::EMPTY }
    }

    /// Builds from `(coefficient, value)` pairs; every listed coefficient is free.
    pub fn from_pairs(pairs: &[(Coefficient, f64)]) -> Result<Self> {
        let mut out = Self::zero();
        for &(c, v) in pairs {
            if !v.is_finite() {
                return Err(Error::Domain { what: c.name(), value: v });
            }
            out.values[c.index()] = v;
            out.selection = out.selection.with(c);
        }
        Ok(out)
    }

    pub fn get(&self, c: Coefficient) -> f64 {
        self.values[c.index()]
    }

    pub fn selection(&self) -> Selection {
        self.selection
    }

    pub fn values(&self) -> &[f64; COEFFICIENT_COUNT] {
        &self.values
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { values: self.values.map(|v| v * s), selection: self.selection }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Source of the operator multiplying each coefficient.
///
/// [`StandardBasis`] is the only production implementation; the trait exists
/// so verification suites can be exercised against deliberately broken bases.
pub trait OperatorBasis: Sync {
    /// Operator multiplying coefficient `c` in the two-spin basis.
    fn operator(&self, c: Coefficient) -> Matrix;

    /// Operator multiplying `c` for the single-spin model (`½σ·B̃` only).
    fn single_spin_operator(&self, c: Coefficient) -> Result<Matrix> {
        let axis = match c {
            Coefficient::Bx => Axis::X,
            Coefficient::By => Axis::Y,
            Coefficient::Bz => Axis::Z,
            other => return Err(Error::NotInBasis(other.name())),
        };
        Ok(pauli::sigma(axis).scale_real(0.5))
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StandardBasis;

impl OperatorBasis for StandardBasis {
    fn operator(&self, c: Coefficient) -> Matrix {
        use Axis::{X, Y, Z};
        match c {
            Coefficient::J1 => pauli::pair(X, X),
            Coefficient::J2 => pauli::pair(Y, Y),
            Coefficient::J3 => pauli::pair(Z, Z),
            Coefficient::W1 => pauli::symmetric_pair(X, Y),
            Coefficient::W2 => pauli::symmetric_pair(Y, Z),
            Coefficient::W3 => pauli::symmetric_pair(Z, X),
            Coefficient::Bx => pauli::total(X).scale_real(0.5),
            Coefficient::By => pauli::total(Y).scale_real(0.5),
            Coefficient::Bz => pauli::total(Z).scale_real(0.5),
            Coefficient::D1 => pauli::pair(X, Y) - pauli::pair(Y, X),
            Coefficient::D2 => pauli::pair(Y, Z) - pauli::pair(Z, Y),
            Coefficient::D3 => pauli::pair(Z, X) - pauli::pair(X, Z),
        }
    }
}

/// `Σ c·O_c` over the two-spin basis.
pub fn ansatz_matrix(c: &AnsatzCoefficients) -> HermitianMatrix {
    ansatz_matrix_in(&StandardBasis, c)
}

pub fn ansatz_matrix_in(basis: &dyn OperatorBasis, c: &AnsatzCoefficients) -> HermitianMatrix {
    let mut m = Matrix::zeros(4);
    for k in c.selection.iter() {
        m = m + basis.operator(k).scale_real(c.get(k));
    }
    HermitianMatrix::hermitian_part(&m)
}

/// `½σ·B̃` for the single-spin model.
pub fn single_spin_matrix(c: &AnsatzCoefficients) -> Result<HermitianMatrix> {
    let mut m = Matrix::zeros(2);
    for k in c.selection.iter() {
        m = m + StandardBasis.single_spin_operator(k)?.scale_real(c.get(k));
    }
    Ok(HermitianMatrix::hermitian_part(&m))
}

/// `Σ c·O_c` with complex coefficients; not Hermitian in general.
pub fn formal_operator(basis: &dyn OperatorBasis, dim: usize, coefficients: &[(Coefficient, C64)]) -> Result<Matrix> {
    let mut m = Matrix::zeros(dim);
    for &(k, v) in coefficients {
        let op = if dim == 2 { basis.single_spin_operator(k)? } else { basis.operator(k) };
        m = m + op.scale(v);
    }
    Ok(m)
}
