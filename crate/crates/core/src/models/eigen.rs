use crate::error::{Error, Result};
use crate::linalg::{eigh, HermitianMatrix, Matrix, Vector, C64, MAX_DIM};

use super::{analytic, hamiltonian, sectors, ModelKind, ModelSpec};

/// Phase convention of a returned eigenvector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gauge {
    /// All amplitudes real, component `pivot` (the largest in magnitude) positive.
    RealPositive { pivot: usize },
    /// Component `anchor` real and nonnegative.
    FixedComponentPhase { anchor: usize },
}

impl Gauge {
    pub fn name(&self) -> &'static str {
        match self {
            Gauge::RealPositive { .. } => "real_positive",
            Gauge::FixedComponentPhase { .. } => "fixed_component_phase",
        }
    }
}

/// Tunables of the eigen-solver layer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    /// Smallest admissible gap between the tracked level and any other level
    /// of its symmetry sector.
    pub gap_min: f64,
    /// Smallest admissible magnitude of the phase anchor at a stencil point.
    pub anchor_min: f64,
    /// Relative finite-difference step: `h = step · max(1, |R|)`.
    pub step: f64,
    /// Largest tolerated `|Re Σ C*∂C|` in [`adiabatic_phase_rate`].
    pub phase_residue_max: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { gap_min: 1e-8, anchor_min: 1e-6, step: 1e-6, phase_residue_max: 1e-10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenState {
    /// Position in the ascending energy ordering.
    pub n: usize,
    pub energy: f64,
    pub amplitudes: Vector,
    pub gauge: Gauge,
}

/// All instantaneous eigenpairs at one parameter value, ascending in energy.
#[derive(Clone, Copy, Debug)]
pub struct Spectrum {
    r: f64,
    dim: usize,
    energies: [f64; MAX_DIM],
    vectors: [Vector; MAX_DIM],
    gauges: [Gauge; MAX_DIM],
    // (sector, rank inside the sector)
    labels: [(usize, usize); MAX_DIM],
}

impl Spectrum {
    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies[..self.dim]
    }

    pub fn state(&self, n: usize) -> EigenState {
        EigenState { n, energy: self.energies[n], amplitudes: self.vectors[n], gauge: self.gauges[n] }
    }

    pub fn states(&self) -> impl Iterator<Item = EigenState> + '_ {
        (0..self.dim).map(|n| self.state(n))
    }

    /// Index of the symmetry sector holding level `n`.
    pub fn sector(&self, n: usize) -> usize {
        self.labels[n].0
    }

    /// Distance from level `n` to the nearest other level of the same
    /// symmetry sector (`∞` if the sector is one-dimensional).
    pub fn gap(&self, n: usize) -> f64 {
        (0..self.dim)
            .filter(|&m| m != n && self.labels[m].0 == self.labels[n].0)
            .map(|m| (self.energies[m] - self.energies[n]).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Level `n`, refusing it when its gap is below `gap_min`.
    pub fn checked_state(&self, n: usize, gap_min: f64) -> Result<EigenState> {
        if n >= self.dim {
            return Err(Error::Config(alloc::format!("state index {n} out of range for dimension {}", self.dim)));
        }
        let gap = self.gap(n);
        if gap < gap_min {
            return Err(Error::Degenerate { n, r: self.r, gap, gap_min });
        }
        Ok(self.state(n))
    }

    fn find(&self, label: (usize, usize)) -> usize {
        self.labels[..self.dim].iter().position(|l| *l == label).expect("every label occurs once")
    }
}

/// Instantaneous eigen-system of `H₀(R)`, sorted by energy and gauge-fixed.
///
/// The Hamiltonian is diagonalized block by block in the symmetry sectors of
/// the model, so exchange-symmetric levels have `C₂ = C₃` exactly. Eigenvalues
/// are cross-checked against the closed forms.
pub fn eigensystem(model: &ModelSpec, r: f64) -> Result<Spectrum> {
    let h = hamiltonian(model, r)?;
    let dim = model.dim();
    let scale = h.as_matrix().frobenius_norm().max(1.0);

    let mut raw: [(f64, Vector, (usize, usize)); MAX_DIM] = [(0.0, Vector::zeros(dim), (0, 0)); MAX_DIM];
    let mut count = 0;
    for (s, basis) in sectors(model.kind()).iter().enumerate() {
        let k = basis.len();
        let lift = |col: usize| Vector::from_real(&basis[col][..dim]);
        let block = Matrix::from_fn(k, |a, b| lift(a).dot(&h.mul_vec(&lift(b))));
        let eig = eigh(&HermitianMatrix::hermitian_part(&block));
        for rank in 0..k {
            let y = eig.vector(rank);
            let mut v = Vector::zeros(dim);
            for (a, ya) in y.iter().enumerate() {
                v = v.axpy(*ya, &lift(a));
            }
            raw[count] = (eig.values[rank], v, (s, rank));
            count += 1;
        }
    }
    debug_assert_eq!(count, dim);
    raw[..dim].sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));

    let mut energies = [0.0; MAX_DIM];
    let mut vectors = [Vector::zeros(dim); MAX_DIM];
    let mut gauges = [Gauge::RealPositive { pivot: 0 }; MAX_DIM];
    let mut labels = [(0, 0); MAX_DIM];
    for (n, (e, v, label)) in raw[..dim].iter().enumerate() {
        let v = v.scale_real(1.0 / v.norm());
        let (v, g) = fix_gauge(model.kind(), &v);
        let residual = (h.mul_vec(&v) - v.scale_real(*e)).norm();
        if residual > 1e-10 * scale {
            return Err(Error::Consistency { what: "eigenpair residual", mismatch: residual });
        }
        energies[n] = *e;
        vectors[n] = v;
        gauges[n] = g;
        labels[n] = *label;
    }

    let closed = analytic::eigenvalues(model, r)?;
    let mismatch = closed[..dim].iter().zip(&energies[..dim]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if mismatch > 1e-8 * scale {
        return Err(Error::Consistency { what: "closed-form and numeric eigenvalues disagree", mismatch });
    }

    Ok(Spectrum { r, dim, energies, vectors, gauges, labels })
}

fn largest_component(v: &Vector) -> usize {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, z) in v.iter().enumerate() {
        // earlier components win near-ties so the choice is reproducible
        if z.norm() > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = z.norm();
        }
    }
    best
}

/// Component used as the phase anchor of the entangler model.
const GEN_ANCHOR: usize = 3;
/// Below this magnitude the entangler anchor falls back to the largest component.
const GEN_ANCHOR_FALLBACK: f64 = 1e-6;

fn fix_gauge(kind: ModelKind, v: &Vector) -> (Vector, Gauge) {
    match kind {
        ModelKind::Gen => {
            let anchor = if v[GEN_ANCHOR].norm() >= GEN_ANCHOR_FALLBACK { GEN_ANCHOR } else { largest_component(v) };
            (anchor_phase(v, anchor), Gauge::FixedComponentPhase { anchor })
        }
        _ => {
            let pivot = largest_component(v);
            let mut out = Vector::zeros(v.dim());
            let sign = if v[pivot].re < 0.0 { -1.0 } else { 1.0 };
            for (dst, z) in out.as_mut_slice().iter_mut().zip(v.iter()) {
                *dst = C64::new(sign * z.re, 0.0);
            }
            (out, Gauge::RealPositive { pivot })
        }
    }
}

fn anchor_phase(v: &Vector, anchor: usize) -> Vector {
    let a = v[anchor];
    let mag = a.norm();
    if mag == 0.0 {
        return *v;
    }
    let mut out = v.scale(a.conj() / mag);
    out[anchor] = C64::new(mag, 0.0);
    out
}

/// An eigenstate together with its parameter derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateJet {
    pub r: f64,
    pub state: EigenState,
    /// `∂_R C` in the gauge of `state`.
    pub derivative: Vector,
    /// Finite-difference step used.
    pub step: f64,
    /// `Re Σⱼ Cⱼ* ∂_R Cⱼ` from `(‖C₋ − C‖² − ‖C₊ − C‖²)/(4h)`, which avoids
    /// the cancellation of two overlaps close to one.
    pub connection_real: f64,
}

impl StateJet {
    /// `Σⱼ Cⱼ* ∂_R Cⱼ`
    pub fn connection(&self) -> C64 {
        self.state.amplitudes.dot(&self.derivative)
    }
}

/// Eigenstate `n` at `r` plus its central-difference derivative in a gauge
/// that is continuous across the stencil.
pub fn state_jet(model: &ModelSpec, r: f64, n: usize, opts: &EigenOptions) -> Result<StateJet> {
    let centre = eigensystem(model, r)?;
    let state = centre.checked_state(n, opts.gap_min)?;
    if model.is_parameter_independent() {
        return Ok(StateJet { r, state, derivative: Vector::zeros(model.dim()), step: 0.0, connection_real: 0.0 });
    }
    let label = centre.labels[n];
    let h = opts.step * r.abs().max(1.0);

    let side = |rs: f64| -> Result<Vector> {
        let spec = eigensystem(model, rs)?;
        let m = spec.find(label);
        spec.checked_state(m, opts.gap_min)?;
        align(&state, &spec.vectors[m], rs, opts)
    };
    let plus = side(r + h)?;
    let minus = side(r - h)?;
    let derivative = (plus - minus).scale_real(0.5 / h);
    let c = state.amplitudes;
    let connection_real = ((minus - c).norm_sqr() - (plus - c).norm_sqr()) / (4.0 * h);
    Ok(StateJet { r, state, derivative, step: h, connection_real })
}

fn align(centre: &EigenState, v: &Vector, r: f64, opts: &EigenOptions) -> Result<Vector> {
    match centre.gauge {
        Gauge::RealPositive { .. } => {
            let overlap = centre.amplitudes.dot(v).re;
            Ok(if overlap < 0.0 { v.scale_real(-1.0) } else { *v })
        }
        Gauge::FixedComponentPhase { anchor } => {
            let magnitude = v[anchor].norm();
            if magnitude < opts.anchor_min {
                return Err(Error::GaugeInstability { anchor, magnitude, r });
            }
            Ok(anchor_phase(v, anchor))
        }
    }
}

pub fn eigenvector_derivative(model: &ModelSpec, r: f64, n: usize, opts: &EigenOptions) -> Result<Vector> {
    Ok(state_jet(model, r, n, opts)?.derivative)
}

/// `i Σⱼ Cⱼ* ∂_R Cⱼ`, which is real for a normalized family.
pub fn adiabatic_phase_rate(model: &ModelSpec, r: f64, n: usize, opts: &EigenOptions) -> Result<f64> {
    let jet = state_jet(model, r, n, opts)?;
    let residue = jet.connection_real.abs();
    if residue > opts.phase_residue_max {
        return Err(Error::PhaseResidue { residue });
    }
    Ok(-jet.connection().im)
}
