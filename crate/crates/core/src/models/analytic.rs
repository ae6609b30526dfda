//! Closed-form eigen-systems.
//!
//! The annealing and entangler triplet levels are roots of a cubic written
//! through `β = ∛(√(γ₋² − γ₊³) + γ₋)`. The cube root has three branches; the
//! labelled roots only come out in the conventional order for one of them, so
//! [`Cubic::ground_branch`] picks the branch whose labelled ground root matches
//! a numerically obtained ground energy.

use crate::error::{Error, Result};
use crate::linalg::{Vector, C64};

use super::{ModelKind, ModelSpec};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// All eigenvalues of `H₀(R)` in ascending order (first `dim` entries used).
pub fn eigenvalues(model: &ModelSpec, r: f64) -> Result<[f64; 4]> {
    let v = model.values(r)?;
    let mut out = match model.kind() {
        ModelKind::Lz => {
            let q = v[0].hypot(v[1]);
            [-0.5 * q, 0.5 * q, f64::INFINITY, f64::INFINITY]
        }
        ModelKind::Tfim => {
            let (j, bx) = (v[0], v[1]);
            let rho = j.hypot(bx);
            [-rho, -j, j, rho]
        }
        ModelKind::Qa => {
            let c = Cubic::new(model, r)?;
            let [a, b, d] = c.roots(0);
            [a, b, d, v[0]]
        }
        ModelKind::Gen => {
            let c = Cubic::new(model, r)?;
            let [a, b, d] = c.roots(0);
            [a, b, d, -v[0]]
        }
    };
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Radicals of the triplet-sector cubic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cubic {
    kind: ModelKind,
    j: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    /// Principal cube root.
    pub beta: C64,
}

impl Cubic {
    pub fn new(model: &ModelSpec, r: f64) -> Result<Self> {
        let v = model.values(r)?;
        let (j, gamma_plus, gamma_minus) = match model.kind() {
            ModelKind::Qa => {
                let (j, bz, bx) = (v[0], v[1], v[2]);
                (
                    j,
                    bx * bx / 3.0 + bz * bz / 3.0 + 4.0 * j * j / 9.0,
                    bx * bx * j / 3.0 - 2.0 * bz * bz * j / 3.0 + 8.0 * j.powi(3) / 27.0,
                )
            }
            ModelKind::Gen => {
                let (j, bx, by, bz) = (v[0], v[1], v[2], v[3]);
                let z2 = 0.25 * (bx * bx + by * by);
                (
                    j,
                    bz * bz / 3.0 + 4.0 * z2 / 3.0 + 4.0 * j * j / 9.0,
                    2.0 * bz * bz * j / 3.0 - 4.0 * j * z2 / 3.0 - 8.0 * j.powi(3) / 27.0,
                )
            }
            other => return Err(Error::Config(alloc::format!("model `{other}` has no cubic"))),
        };
        let disc = C64::new(gamma_minus * gamma_minus - gamma_plus.powi(3), 0.0).sqrt();
        let beta = (disc + gamma_minus).cbrt();
        Ok(Self { kind: model.kind(), j, gamma_plus, gamma_minus, beta })
    }

    /// `β` on cube-root branch `k ∈ {0, 1, 2}`.
    pub fn beta_branch(&self, k: usize) -> C64 {
        let w = C64::from_polar(1.0, 2.0 * core::f64::consts::PI * (k % 3) as f64 / 3.0);
        self.beta * w
    }

    /// Labelled roots `(λ₂, λ₃, λ₄)` on branch `k`, with `β̄` the complex
    /// conjugate of `β`.
    pub fn labelled_roots(&self, k: usize) -> [C64; 3] {
        let b = self.beta_branch(k);
        let bb = b.conj();
        let i = C64::new(0.0, 1.0);
        let half_sqrt3_i = i * (0.5 * SQRT3);
        match self.kind {
            ModelKind::Qa => {
                let s = -self.j / 3.0;
                [s + b + bb, s - (b + bb) * 0.5 - half_sqrt3_i * (bb - b), s - (b + bb) * 0.5 + half_sqrt3_i * (bb - b)]
            }
            _ => {
                let s = self.j / 3.0;
                [
                    b + bb + s,
                    -half_sqrt3_i * (b - bb) - (b + bb) * 0.5 + s,
                    half_sqrt3_i * (b - bb) - (b + bb) * 0.5 + s,
                ]
            }
        }
    }

    /// Real parts of the labelled roots on branch `k`.
    pub fn roots(&self, k: usize) -> [f64; 3] {
        self.labelled_roots(k).map(|z| z.re)
    }

    /// Largest imaginary part among the labelled roots on branch `k`.
    pub fn max_imaginary(&self, k: usize) -> f64 {
        self.labelled_roots(k).iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }

    /// Index of the labelled root that is conventionally the ground level
    /// (`λ₃` for the annealing model, `λ₄` for the entangler).
    fn ground_label(&self) -> usize {
        match self.kind {
            ModelKind::Qa => 1,
            _ => 2,
        }
    }

    /// The branch whose labelled ground root is closest to `ground`, and the
    /// remaining mismatch.
    pub fn ground_branch(&self, ground: f64) -> (usize, f64) {
        (0..3)
            .map(|k| (k, (self.roots(k)[self.ground_label()] - ground).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three branches")
    }

    /// `Γ` entering the ground eigenvector on branch `k`.
    pub fn gamma(&self, k: usize) -> f64 {
        let b = self.beta_branch(k);
        let bb = b.conj();
        let i = C64::new(0.0, 1.0);
        let g = match self.kind {
            ModelKind::Qa => i * (0.5 * SQRT3) * (bb - b) + (b + bb) * 0.5 + self.j / 3.0,
            _ => i * (0.5 * SQRT3) * (b - bb) - (b + bb) * 0.5 + self.j / 3.0,
        };
        g.re
    }
}

/// Closed-form annealing ground state on cube-root branch `k`.
pub fn qa_ground_state(model: &ModelSpec, r: f64, k: usize) -> Result<Vector> {
    if model.kind() != ModelKind::Qa {
        return Err(Error::Config(alloc::format!("expected a qa model, got `{}`", model.kind())));
    }
    let v = model.values(r)?;
    let (j, bz, bx) = (v[0], v[1], v[2]);
    let g = Cubic::new(model, r)?.gamma(k);
    let bx2 = bx * bx;
    let c1 = -(bx2 - 2.0 * bz * j + 2.0 * j * j) / bx2 + 2.0 * bz * g / bx2 + 2.0 * g * g / bx2;
    let c2 = (bz - j) / bx + g / bx;
    let zeta = 1.0 / (c1 * c1 + 2.0 * c2 * c2 + 1.0).sqrt();
    Ok(Vector::from_real(&[zeta * c1, zeta * c2, zeta * c2, zeta]))
}

/// Closed-form entangler ground state on cube-root branch `k`, with
/// `Z = (Bₓ − iB_y)/2`.
pub fn gen_ground_state(model: &ModelSpec, r: f64, k: usize) -> Result<Vector> {
    if model.kind() != ModelKind::Gen {
        return Err(Error::Config(alloc::format!("expected a gen model, got `{}`", model.kind())));
    }
    let v = model.values(r)?;
    let (j, bx, by, bz) = (v[0], v[1], v[2], v[3]);
    let g = Cubic::new(model, r)?.gamma(k);
    let z = C64::new(0.5 * bx, -0.5 * by);
    let z2 = z.norm_sqr();
    let x = bz * g - (-bz * j + 2.0 * z2 + j * j) + g * g;
    let y = bz + g - j;
    let zeta = 1.0 / ((x / (2.0 * z2)).powi(2) + 2.0 * (y / (2.0 * z.norm())).powi(2) + 1.0).sqrt();
    let zc = z.conj();
    let c1 = C64::new(zeta * x, 0.0) / (zc * zc * 2.0);
    let c2 = C64::new(zeta * y, 0.0) / (zc * 2.0);
    Ok(Vector::from_slice(&[c1, c2, c2, C64::new(zeta, 0.0)]))
}

/// Landau-Zener eigenvectors `(upper, lower)` in the sign convention
/// `C₁ = −Δ/s±`, `C₂ = (R ∓ Q)/s±`, `s± = √(2Q(Q ∓ R))`.
pub fn lz_states(delta: f64, r: f64) -> (Vector, Vector) {
    let q = delta.hypot(r);
    let sp = (2.0 * q * (q - r)).sqrt();
    let sm = (2.0 * q * (q + r)).sqrt();
    (Vector::from_real(&[-delta / sp, (r - q) / sp]), Vector::from_real(&[-delta / sm, (r + q) / sm]))
}

/// `∂_R` of the upper Landau-Zener eigenvector of [`lz_states`].
pub fn lz_upper_derivative(delta: f64, r: f64) -> Vector {
    let q = delta.hypot(r);
    let pre = (q - r).sqrt() / (2.0 * core::f64::consts::SQRT_2 * q.powf(2.5));
    Vector::from_real(&[-delta * pre, (q + r) * pre])
}

/// Transverse Ising eigenpairs in the order `−J, J, −ρ, ρ` with `ρ = √(J² + Bₓ²)`.
pub fn tfim_states(j: f64, bx: f64) -> [(f64, Vector); 4] {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let rho = j.hypot(bx);
    let low = 2.0 * (bx * bx + j * j + j * rho).sqrt();
    let high = 2.0 * (bx * bx + j * j - j * rho).sqrt();
    [
        (-j, Vector::from_real(&[0.0, -s, s, 0.0])),
        (j, Vector::from_real(&[-s, 0.0, 0.0, s])),
        (-rho, Vector::from_real(&[bx / low, (rho + j) / low, (rho + j) / low, bx / low])),
        (rho, Vector::from_real(&[bx / high, (j - rho) / high, (j - rho) / high, bx / high])),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{hamiltonian, Coupling};

    fn qa(bx: f64) -> ModelSpec {
        ModelSpec::annealing(Coupling::constant(1.0), Coupling::constant(0.1), Coupling::constant(bx))
    }

    fn gen(bz: f64) -> ModelSpec {
        ModelSpec::entangler(
            Coupling::constant(8.0),
            Coupling::constant(1.0),
            Coupling::constant(1.0),
            Coupling::constant(bz),
        )
    }

    fn residual(model: &ModelSpec, e: f64, v: &Vector) -> f64 {
        let h = hamiltonian(model, 0.0).unwrap();
        (h.mul_vec(v) - v.scale_real(e)).norm()
    }

    #[test]
    fn cubic_roots_are_real_and_solve_the_triplet_problem() {
        for m in [qa(10.0), qa(0.3), gen(25.0), gen(0.0), gen(-3.0)] {
            let c = Cubic::new(&m, 0.0).unwrap();
            for k in 0..3 {
                assert!(c.max_imaginary(k) < 1e-10);
            }
            let h = hamiltonian(&m, 0.0).unwrap();
            for e in c.roots(0) {
                // det(H − e) vanishes at every root
                let d = crate::linalg::eigh(&h).values.iter().map(|x| (x - e).abs()).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-10, "root {e} is not an eigenvalue");
            }
        }
    }

    #[test]
    fn qa_closed_form_ground_state() {
        let m = qa(10.0);
        let c = Cubic::new(&m, 0.0).unwrap();
        let ground = eigenvalues(&m, 0.0).unwrap()[0];
        let (k, miss) = c.ground_branch(ground);
        assert!(miss < 1e-10);
        let v = qa_ground_state(&m, 0.0, k).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(residual(&m, ground, &v) < 1e-10);
        assert!((c.gamma(k) + ground).abs() < 1e-10);
    }

    #[test]
    fn gen_closed_form_ground_state() {
        for bz in [25.0, 7.0, 0.0] {
            let m = gen(bz);
            let c = Cubic::new(&m, 0.0).unwrap();
            let ground = eigenvalues(&m, 0.0).unwrap()[0];
            let (k, miss) = c.ground_branch(ground);
            assert!(miss < 1e-9);
            let v = gen_ground_state(&m, 0.0, k).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-12);
            assert!(residual(&m, ground, &v) < 1e-9, "bz={bz}");
        }
    }

    #[test]
    fn gen_singlet_sits_at_minus_j() {
        let m = gen(5.0);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let singlet = Vector::from_real(&[0.0, s, -s, 0.0]);
        assert!(residual(&m, -8.0, &singlet) < 1e-14);
    }

    #[test]
    fn lz_states_solve_the_two_level_problem() {
        let m = ModelSpec::landau_zener(1.3);
        for r in [-2.0, 0.0, 0.7] {
            let h = hamiltonian(&m, r).unwrap();
            let q = 1.3f64.hypot(r);
            let (up, lo) = lz_states(1.3, r);
            assert!((h.mul_vec(&up) - up.scale_real(0.5 * q)).norm() < 1e-14);
            assert!((h.mul_vec(&lo) + lo.scale_real(0.5 * q)).norm() < 1e-14);
            let d = 1e-6;
            let fd = (lz_states(1.3, r + d).0 - lz_states(1.3, r - d).0).scale_real(0.5 / d);
            assert!((fd - lz_upper_derivative(1.3, r)).norm() < 1e-8);
        }
    }

    #[test]
    fn tfim_states_solve_the_eigenproblem() {
        let (j, bx) = (0.7, -1.9);
        let m = ModelSpec::transverse_ising(Coupling::constant(j), Coupling::constant(bx));
        for (e, v) in tfim_states(j, bx) {
            assert!((v.norm() - 1.0).abs() < 1e-14);
            assert!(residual(&m, e, &v) < 1e-14);
        }
    }
}
