//! Pauli matrices and two-spin products in the basis `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`.
//!
//! Spin 1 is the left tensor factor; `σᶻ|↑⟩ = +|↑⟩`.

use crate::linalg::{Matrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn identity() -> Matrix {
    Matrix::identity(2)
}

pub fn sigma(axis: Axis) -> Matrix {
    let o = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match axis {
        Axis::X => Matrix::from_rows(&[&[o, one], &[one, o]]),
        Axis::Y => Matrix::from_rows(&[&[o, -i], &[i, o]]),
        Axis::Z => Matrix::from_rows(&[&[one, o], &[o, -one]]),
    }
}

/// `σ₁ᵃ σ₂ᵇ`
pub fn pair(a: Axis, b: Axis) -> Matrix {
    Matrix::kron(&sigma(a), &sigma(b))
}

/// `σ₁ᵃσ₂ᵇ + σ₁ᵇσ₂ᵃ`
pub fn symmetric_pair(a: Axis, b: Axis) -> Matrix {
    pair(a, b) + pair(b, a)
}

/// `σ₁ᵃ + σ₂ᵃ`
pub fn total(axis: Axis) -> Matrix {
    Matrix::kron(&sigma(axis), &identity()) + Matrix::kron(&identity(), &sigma(axis))
}

/// Exchange of the two spins.
pub fn swap() -> Matrix {
    let one = C64::new(1.0, 0.0);
    let mut m = Matrix::zeros(4);
    m[(0, 0)] = one;
    m[(1, 2)] = one;
    m[(2, 1)] = one;
    m[(3, 3)] = one;
    m
}
