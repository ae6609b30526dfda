//! Fixed-capacity dense complex linear algebra for dimensions up to 4.
//!
//! Everything here lives on the stack: the hot loops of the propagator build
//! and diagonalize a few matrices per RK4 stage.

use core::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

/// Largest Hilbert-space dimension handled by the crate (two spins).
pub const MAX_DIM: usize = 4;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vector {
    dim: usize,
    data: [C64; MAX_DIM],
}

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Self { dim, data: [ZERO; MAX_DIM] }
    }

    pub fn from_slice(values: &[C64]) -> Self {
        let mut v = Self::zeros(values.len());
        v.data[..values.len()].copy_from_slice(values);
        v
    }

    pub fn from_real(values: &[f64]) -> Self {
        let mut v = Self::zeros(values.len());
        for (dst, &x) in v.data.iter_mut().zip(values) {
            *dst = C64::new(x, 0.0);
        }
        v
    }

    /// Unit vector along basis index `k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data[..self.dim]
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data[..self.dim]
    }

    pub fn iter(&self) -> core::slice::Iter<'_, C64> {
        self.as_slice().iter()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn dot(&self, other: &Vector) -> C64 {
        debug_assert_eq!(self.dim, other.dim);
        self.iter().zip(other.iter()).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scale(&self, s: C64) -> Vector {
        let mut out = *self;
        out.as_mut_slice().iter_mut().for_each(|z| *z *= s);
        out
    }

    pub fn scale_real(&self, s: f64) -> Vector {
        self.scale(C64::new(s, 0.0))
    }

    /// `self + s·other`
    pub fn axpy(&self, s: C64, other: &Vector) -> Vector {
        let mut out = *self;
        for (a, b) in out.as_mut_slice().iter_mut().zip(other.iter()) {
            *a += s * b;
        }
        out
    }

    pub fn conj(&self) -> Vector {
        let mut out = *self;
        out.as_mut_slice().iter_mut().for_each(|z| *z = z.conj());
        out
    }
}

impl Index<usize> for Vector {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.as_slice()[i]
    }
}

impl IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.as_mut_slice()[i]
    }
}

impl Add for Vector {
    type Output = Vector;
    fn add(self, rhs: Vector) -> Vector {
        self.axpy(C64::new(1.0, 0.0), &rhs)
    }
}

impl Sub for Vector {
    type Output = Vector;
    fn sub(self, rhs: Vector) -> Vector {
        self.axpy(C64::new(-1.0, 0.0), &rhs)
    }
}

/// Dense square complex matrix of dimension `dim ≤ 4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: [[C64; MAX_DIM]; MAX_DIM],
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "dimension {dim} exceeds {MAX_DIM}");
        Self { dim, data: [[ZERO; MAX_DIM]; MAX_DIM] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { C64::new(1.0, 0.0) } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i][j] = f(i, j);
            }
        }
        m
    }

    /// Build from row-major nested slices.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let dim = rows.len();
        Self::from_fn(dim, |i, j| rows[i][j])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn column(&self, j: usize) -> Vector {
        let mut v = Vector::zeros(self.dim);
        for i in 0..self.dim {
            v[i] = self.data[i][j];
        }
        v
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        debug_assert_eq!(self.dim, v.dim());
        let mut out = Vector::zeros(self.dim);
        for i in 0..self.dim {
            out[i] = (0..self.dim).map(|j| self.data[i][j] * v[j]).sum();
        }
        out
    }

    pub fn adjoint(&self) -> Matrix {
        Self::from_fn(self.dim, |i, j| self.data[j][i].conj())
    }

    pub fn scale(&self, s: C64) -> Matrix {
        Self::from_fn(self.dim, |i, j| self.data[i][j] * s)
    }

    pub fn scale_real(&self, s: f64) -> Matrix {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i][i]).sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                m = m.max(self.data[i][j].norm());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.data[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Largest modulus of `M - M†`.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    /// Kronecker product of two 2×2 matrices.
    pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
        let (da, db) = (a.dim, b.dim);
        assert!(da * db <= MAX_DIM);
        Self::from_fn(da * db, |i, j| a.data[i / db][j / db] * b.data[i % db][j % db])
    }

    /// Principal submatrix / row-column selection.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        debug_assert_eq!(rows.len(), cols.len());
        Self::from_fn(rows.len(), |i, j| self.data[rows[i]][cols[j]])
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(i < self.dim && j < self.dim);
        &self.data[i][j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(i < self.dim && j < self.dim);
        &mut self.data[i][j]
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        debug_assert_eq!(self.dim, rhs.dim);
        Matrix::from_fn(self.dim, |i, j| self.data[i][j] + rhs.data[i][j])
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        debug_assert_eq!(self.dim, rhs.dim);
        Matrix::from_fn(self.dim, |i, j| self.data[i][j] - rhs.data[i][j])
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        debug_assert_eq!(self.dim, rhs.dim);
        Matrix::from_fn(self.dim, |i, j| (0..self.dim).map(|k| self.data[i][k] * rhs.data[k][j]).sum())
    }
}

/// A matrix that is Hermitian by construction: the lower triangle is always
/// the conjugate of the upper triangle and the diagonal is real.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HermitianMatrix(Matrix);

impl HermitianMatrix {
    /// Keeps the upper triangle (and the real part of the diagonal) of `m`.
    pub fn from_upper(m: &Matrix) -> Self {
        let mut h = *m;
        for i in 0..m.dim {
            h.data[i][i] = C64::new(m.data[i][i].re, 0.0);
            for j in (i + 1)..m.dim {
                h.data[j][i] = m.data[i][j].conj();
            }
        }
        Self(h)
    }

    /// `(M + M†)/2`.
    pub fn hermitian_part(m: &Matrix) -> Self {
        Self::from_upper(&(*m + m.adjoint()).scale_real(0.5))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(Matrix::zeros(dim))
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        self.0.mul_vec(v)
    }

    /// Sum of two Hermitian matrices with a real weight on the second.
    pub fn add_scaled(&self, s: f64, other: &HermitianMatrix) -> HermitianMatrix {
        Self::from_upper(&(self.0 + other.0.scale_real(s)))
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;
    fn index(&self, ij: (usize, usize)) -> &C64 {
        &self.0[ij]
    }
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Copy, Debug)]
pub struct Eigh {
    /// Ascending eigenvalues.
    pub values: [f64; MAX_DIM],
    /// Column `k` is the unit eigenvector of `values[k]`.
    pub vectors: Matrix,
}

impl Eigh {
    pub fn vector(&self, k: usize) -> Vector {
        self.vectors.column(k)
    }
}

/// Cyclic complex Jacobi diagonalization.
///
/// Real symmetric input stays real throughout (rotation phases are ±1), so
/// eigenvectors of real matrices come back with exactly zero imaginary parts.
pub fn eigh(h: &HermitianMatrix) -> Eigh {
    let n = h.dim();
    let mut a = h.0;
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a.data[p][q].norm_sqr();
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.data[p][q];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // e^{-iφ} with apq = |apq| e^{iφ}
                let phase = apq.conj() / mag;
                let theta = (a.data[q][q].re - a.data[p][p].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = D·P with D = diag(1, e^{-iφ}) on (p, q) and P the real rotation.
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = phase * (-s);
                let jqq = phase * c;
                for k in 0..n {
                    let (akp, akq) = (a.data[k][p], a.data[k][q]);
                    a.data[k][p] = akp * jpp + akq * jqp;
                    a.data[k][q] = akp * jpq + akq * jqq;
                    let (vkp, vkq) = (v.data[k][p], v.data[k][q]);
                    v.data[k][p] = vkp * jpp + vkq * jqp;
                    v.data[k][q] = vkp * jpq + vkq * jqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a.data[p][k], a.data[q][k]);
                    a.data[p][k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a.data[q][k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a.data[p][q] = ZERO;
                a.data[q][p] = ZERO;
                a.data[p][p].im = 0.0;
                a.data[q][q].im = 0.0;
            }
        }
    }

    let mut order = [0usize, 1, 2, 3];
    let order = &mut order[..n];
    order.sort_by(|&i, &j| a.data[i][i].re.total_cmp(&a.data[j][j].re));
    let mut values = [0.0; MAX_DIM];
    let mut vectors = Matrix::zeros(n);
    for (k, &src) in order.iter().enumerate() {
        values[k] = a.data[src][src].re;
        for i in 0..n {
            vectors.data[i][k] = v.data[i][src];
        }
    }
    Eigh { values, vectors }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
/// Returns `None` when a pivot vanishes exactly.
pub fn solve(a: &Matrix, b: &Vector) -> Option<Vector> {
    let n = a.dim;
    debug_assert_eq!(n, b.dim());
    let mut m = *a;
    let mut x = *b;
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m.data[i][col].norm().total_cmp(&m.data[j][col].norm()))?;
        if m.data[pivot][col].norm() == 0.0 {
            return None;
        }
        m.data.swap(col, pivot);
        x.data.swap(col, pivot);
        for row in (col + 1)..n {
            let f = m.data[row][col] / m.data[col][col];
            for k in col..n {
                let sub = f * m.data[col][k];
                m.data[row][k] -= sub;
            }
            let sub = f * x.data[col];
            x.data[row] -= sub;
        }
    }
    for row in (0..n).rev() {
        let mut acc = x.data[row];
        for k in (row + 1)..n {
            acc -= m.data[row][k] * x.data[k];
        }
        x.data[row] = acc / m.data[row][row];
    }
    Some(x)
}

/// Spectral (2-norm) condition number `‖A‖₂ ‖A⁻¹‖₂`.
///
/// Both norms come from the largest eigenvalue of a Gram matrix, so the result
/// stays accurate for condition numbers far beyond `1/√ε`.
pub fn condition_number(a: &Matrix) -> f64 {
    let n = a.dim;
    let mut inv = Matrix::zeros(n);
    for j in 0..n {
        let Some(col) = solve(a, &Vector::basis(n, j)) else {
            return f64::INFINITY;
        };
        for i in 0..n {
            inv.data[i][j] = col.data[i];
        }
    }
    let norm2 = |m: &Matrix| {
        let top = eigh(&HermitianMatrix::from_upper(&(m.adjoint() * *m))).values[n - 1];
        top.max(0.0).sqrt()
    };
    let c = norm2(a) * norm2(&inv);
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn jacobi_diagonalizes_complex_hermitian() {
        let m = Matrix::from_rows(&[
            &[c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.5), c(0.3, 0.0)],
            &[c(1.0, 1.0), c(-1.0, 0.0), c(0.2, 0.2), c(0.0, -0.7)],
            &[c(0.0, -0.5), c(0.2, -0.2), c(0.5, 0.0), c(1.5, 0.0)],
            &[c(0.3, 0.0), c(0.0, 0.7), c(1.5, 0.0), c(-3.0, 0.0)],
        ]);
        let h = HermitianMatrix::from_upper(&m);
        let e = eigh(&h);
        for k in 0..4 {
            let v = e.vector(k);
            let r = h.mul_vec(&v) - v.scale_real(e.values[k]);
            assert!(r.norm() < 1e-13, "residual {}", r.norm());
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = e.values.iter().sum();
        assert!((tr - h.as_matrix().trace().re).abs() < 1e-13);
    }

    #[test]
    fn real_symmetric_input_gives_real_vectors() {
        let m = Matrix::from_fn(3, |i, j| c(1.0 / (1.0 + i as f64 + j as f64), 0.0));
        let e = eigh(&HermitianMatrix::from_upper(&m));
        for k in 0..3 {
            assert!(e.vector(k).iter().all(|z| z.im == 0.0));
        }
    }

    #[test]
    fn solve_and_condition() {
        let a = Matrix::from_rows(&[&[c(4.0, 1.0), c(1.0, 0.0)], &[c(0.0, 2.0), c(3.0, 0.0)]]);
        let b = Vector::from_slice(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let x = solve(&a, &b).unwrap();
        assert!((a.mul_vec(&x) - b).norm() < 1e-15);
        let singular = Matrix::from_rows(&[&[c(1.0, 0.0), c(2.0, 0.0)], &[c(2.0, 0.0), c(4.0, 0.0)]]);
        assert!(condition_number(&singular) > 1e15);
        assert!((condition_number(&Matrix::identity(3)) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn kron_layout() {
        let sx = Matrix::from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(0.0, 0.0)]]);
        let id = Matrix::identity(2);
        let k = Matrix::kron(&sx, &id);
        // σx on the first spin flips |↑↑⟩ ↔ |↓↑⟩
        assert_eq!(k[(0, 2)], c(1.0, 0.0));
        assert_eq!(k[(0, 1)], c(0.0, 0.0));
    }
}
