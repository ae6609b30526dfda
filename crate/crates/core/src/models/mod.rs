//! The four parametrized spin Hamiltonians.
//!
//! Every coupling is an affine function of the control parameter `R`
//! (`offset + slope·R`); constant couplings simply have zero slope.

use alloc::format;

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, Matrix};
use crate::pauli::{self, Axis};

pub mod analytic;
mod eigen;

pub use eigen::{
    adiabatic_phase_rate, eigensystem, eigenvector_derivative, state_jet, EigenOptions, EigenState, Gauge, Spectrum,
    StateJet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    /// Single spin, `½σ·B` with `B = (Δ, 0, R)`.
    Lz,
    /// `J σ₁ᶻσ₂ᶻ − ½(σ₁ˣ+σ₂ˣ) Bₓ`
    Tfim,
    /// `−J σ₁ᶻσ₂ᶻ − ½(σ₁ᶻ+σ₂ᶻ) B_z − ½(σ₁ˣ+σ₂ˣ) Bₓ`
    Qa,
    /// `J σ₁ᶻσ₂ᶻ + ½(σ₁+σ₂)·B`
    Gen,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Lz, ModelKind::Tfim, ModelKind::Qa, ModelKind::Gen];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Lz => "lz",
            ModelKind::Tfim => "tfim",
            ModelKind::Qa => "qa",
            ModelKind::Gen => "gen",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown model kind `{s}` (expected lz, tfim, qa or gen)")))
    }

    pub fn dim(self) -> usize {
        match self {
            ModelKind::Lz => 2,
            _ => 4,
        }
    }

    /// Coupling names in storage order.
    pub fn coupling_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Lz => &["delta", "bz"],
            ModelKind::Tfim => &["j", "bx"],
            ModelKind::Qa => &["j", "bz", "bx"],
            ModelKind::Gen => &["j", "bx", "by", "bz"],
        }
    }
}

impl core::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// `offset + slope·R`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub offset: f64,
    pub slope: f64,
}

impl Coupling {
    pub const fn constant(value: f64) -> Self {
        Self { offset: value, slope: 0.0 }
    }

    pub const fn affine(offset: f64, slope: f64) -> Self {
        Self { offset, slope }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.offset + self.slope * r
    }

    pub fn derivative(&self) -> f64 {
        self.slope
    }

    fn is_finite(&self) -> bool {
        self.offset.is_finite() && self.slope.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSpec {
    kind: ModelKind,
    couplings: [Coupling; 4],
}

impl ModelSpec {
    /// Builds a model from named couplings. Every coupling of `kind` must be
    /// given exactly once and be finite; unknown names are rejected.
    pub fn new(kind: ModelKind, named: &[(&str, Coupling)]) -> Result<Self> {
        let names = kind.coupling_names();
        let mut couplings = [Coupling::constant(0.0); 4];
        let mut seen = [false; 4];
        for (name, c) in named {
            let idx = names.iter().position(|n| n == name).ok_or_else(|| {
                Error::Config(format!("model `{kind}` has no coupling `{name}` (expected {names:?})"))
            })?;
            if seen[idx] {
                return Err(Error::Config(format!("coupling `{name}` given twice")));
            }
            if !c.is_finite() {
                return Err(Error::Config(format!("coupling `{name}` is not finite")));
            }
            seen[idx] = true;
            couplings[idx] = *c;
        }
        if let Some(missing) = names.iter().zip(seen).find(|(_, s)| !s) {
            return Err(Error::Config(format!("model `{kind}` is missing coupling `{}`", missing.0)));
        }
        Ok(Self { kind, couplings })
    }

    /// `½[[R, Δ], [Δ, −R]]`
    pub fn landau_zener(delta: f64) -> Self {
        Self { kind: ModelKind::Lz, couplings: [Coupling::constant(delta), Coupling::affine(0.0, 1.0), ZC, ZC] }
    }

    pub fn transverse_ising(j: Coupling, bx: Coupling) -> Self {
        Self { kind: ModelKind::Tfim, couplings: [j, bx, ZC, ZC] }
    }

    pub fn annealing(j: Coupling, bz: Coupling, bx: Coupling) -> Self {
        Self { kind: ModelKind::Qa, couplings: [j, bz, bx, ZC] }
    }

    pub fn entangler(j: Coupling, bx: Coupling, by: Coupling, bz: Coupling) -> Self {
        Self { kind: ModelKind::Gen, couplings: [j, bx, by, bz] }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn coupling(&self, name: &str) -> Option<Coupling> {
        let idx = self.kind.coupling_names().iter().position(|n| *n == name)?;
        Some(self.couplings[idx])
    }

    /// Named couplings in storage order.
    pub fn couplings(&self) -> impl Iterator<Item = (&'static str, Coupling)> + '_ {
        self.kind.coupling_names().iter().copied().zip(self.couplings.iter().copied())
    }

    /// True when no coupling depends on `R`.
    pub fn is_parameter_independent(&self) -> bool {
        self.couplings.iter().all(|c| c.slope == 0.0)
    }

    /// Coupling values at `r`, in storage order.
    pub fn values(&self, r: f64) -> Result<[f64; 4]> {
        let mut out = [0.0; 4];
        for (k, name) in self.kind.coupling_names().iter().enumerate() {
            let v = self.couplings[k].value(r);
            if !v.is_finite() {
                return Err(Error::Domain { what: name, value: v });
            }
            out[k] = v;
        }
        Ok(out)
    }
}

const ZC: Coupling = Coupling::constant(0.0);

/// `H₀(R)` in the basis `|↑⟩,|↓⟩` (lz) or `|↑↑⟩,|↑↓⟩,|↓↑⟩,|↓↓⟩`.
pub fn hamiltonian(model: &ModelSpec, r: f64) -> Result<HermitianMatrix> {
    let v = model.values(r)?;
    Ok(HermitianMatrix::from_upper(&assemble(model.kind, &v)))
}

/// `∂H₀/∂R`, constant because every coupling is affine.
pub fn hamiltonian_derivative(model: &ModelSpec) -> HermitianMatrix {
    let mut slopes = [0.0; 4];
    for (k, c) in model.couplings.iter().enumerate() {
        slopes[k] = c.slope;
    }
    HermitianMatrix::from_upper(&assemble(model.kind, &slopes))
}

fn assemble(kind: ModelKind, v: &[f64; 4]) -> Matrix {
    match kind {
        ModelKind::Lz => {
            let [delta, bz, ..] = *v;
            (pauli::sigma(Axis::Z).scale_real(bz) + pauli::sigma(Axis::X).scale_real(delta)).scale_real(0.5)
        }
        ModelKind::Tfim => {
            let [j, bx, ..] = *v;
            pauli::pair(Axis::Z, Axis::Z).scale_real(j) - pauli::total(Axis::X).scale_real(0.5 * bx)
        }
        ModelKind::Qa => {
            let [j, bz, bx, _] = *v;
            pauli::pair(Axis::Z, Axis::Z).scale_real(-j)
                - pauli::total(Axis::Z).scale_real(0.5 * bz)
                - pauli::total(Axis::X).scale_real(0.5 * bx)
        }
        ModelKind::Gen => {
            let [j, bx, by, bz] = *v;
            pauli::pair(Axis::Z, Axis::Z).scale_real(j)
                + pauli::total(Axis::X).scale_real(0.5 * bx)
                + pauli::total(Axis::Y).scale_real(0.5 * by)
                + pauli::total(Axis::Z).scale_real(0.5 * bz)
        }
    }
}

const S: f64 = core::f64::consts::FRAC_1_SQRT_2;

/// Orthonormal real bases of invariant subspaces. All two-spin models commute
/// with the spin exchange; the transverse Ising model also commutes with the
/// global flip `σ₁ˣσ₂ˣ`.
pub(crate) fn sectors(kind: ModelKind) -> &'static [&'static [[f64; 4]]] {
    const LZ: &[&[[f64; 4]]] = &[&[[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]];
    const TRIPLET_SINGLET: &[&[[f64; 4]]] =
        &[&[[1.0, 0.0, 0.0, 0.0], [0.0, S, S, 0.0], [0.0, 0.0, 0.0, 1.0]], &[[0.0, S, -S, 0.0]]];
    const FLIP_RESOLVED: &[&[[f64; 4]]] =
        &[&[[S, 0.0, 0.0, S], [0.0, S, S, 0.0]], &[[S, 0.0, 0.0, -S]], &[[0.0, S, -S, 0.0]]];
    match kind {
        ModelKind::Lz => LZ,
        ModelKind::Tfim => FLIP_RESOLVED,
        ModelKind::Qa | ModelKind::Gen => TRIPLET_SINGLET,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    fn re(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn lz_matrix_at_origin() {
        let h = hamiltonian(&ModelSpec::landau_zener(1.0), 0.0).unwrap();
        assert_eq!(h[(0, 0)], re(0.0));
        assert_eq!(h[(0, 1)], re(0.5));
        assert_eq!(h[(1, 0)], re(0.5));
        assert_eq!(h[(1, 1)], re(0.0));
    }

    #[test]
    fn tfim_with_vanishing_couplings_is_zero() {
        let m = ModelSpec::transverse_ising(Coupling::constant(0.0), Coupling::constant(0.0));
        assert_eq!(hamiltonian(&m, 3.0).unwrap().as_matrix().max_abs(), 0.0);
    }

    #[test]
    fn qa_matrix_entries() {
        let m = ModelSpec::annealing(Coupling::constant(1.0), Coupling::constant(0.1), Coupling::constant(10.0));
        let h = hamiltonian(&m, 0.0).unwrap();
        assert!((h[(0, 0)].re + 1.1).abs() < 1e-15);
        assert!((h[(3, 3)].re + 0.9).abs() < 1e-15);
        assert_eq!(h[(1, 1)], re(1.0));
        for (i, j) in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            assert_eq!(h[(i, j)], re(-5.0));
        }
        assert_eq!(h[(0, 3)], re(0.0));
        assert_eq!(h[(1, 2)], re(0.0));
    }

    #[test]
    fn gen_matrix_entries() {
        let m = ModelSpec::entangler(
            Coupling::constant(8.0),
            Coupling::constant(1.0),
            Coupling::constant(1.0),
            Coupling::affine(25.0, -1.0),
        );
        let h = hamiltonian(&m, 0.0).unwrap();
        assert_eq!(h[(0, 0)], re(33.0));
        assert_eq!(h[(0, 1)], C64::new(0.5, -0.5));
        assert_eq!(h[(1, 0)], C64::new(0.5, 0.5));
        assert_eq!(h[(1, 3)], C64::new(0.5, -0.5));
        assert_eq!(h[(1, 1)], re(-8.0));
        assert_eq!(h[(3, 3)], re(-17.0));
    }

    #[test]
    fn coupling_validation() {
        assert!(ModelKind::parse("ising").is_err());
        assert!(ModelSpec::new(ModelKind::Qa, &[("j", Coupling::constant(1.0))]).is_err());
        assert!(ModelSpec::new(
            ModelKind::Lz,
            &[("delta", Coupling::constant(1.0)), ("bz", Coupling::affine(0.0, 1.0)), ("bx", ZC)]
        )
        .is_err());
        assert!(ModelSpec::new(ModelKind::Lz, &[("delta", Coupling::constant(f64::NAN)), ("bz", ZC)]).is_err());
        let ok =
            ModelSpec::new(ModelKind::Lz, &[("bz", Coupling::affine(0.0, 1.0)), ("delta", Coupling::constant(1.0))])
                .unwrap();
        assert_eq!(ok, ModelSpec::landau_zener(1.0));
    }

    #[test]
    fn non_finite_coupling_value_is_a_domain_error() {
        let m = ModelSpec::landau_zener(1.0);
        assert!(matches!(hamiltonian(&m, f64::INFINITY), Err(Error::Domain { .. })));
    }

    #[test]
    fn sector_bases_are_orthonormal_and_complete() {
        for kind in ModelKind::ALL {
            let dim = kind.dim();
            let vecs: alloc::vec::Vec<[f64; 4]> = sectors(kind).iter().flat_map(|s| s.iter().copied()).collect();
            assert_eq!(vecs.len(), dim);
            for (a, u) in vecs.iter().enumerate() {
                for (b, w) in vecs.iter().enumerate() {
                    let d: f64 = u.iter().zip(w).map(|(x, y)| x * y).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((d - expect).abs() < 1e-15);
                }
            }
        }
    }
}
