use crate::error::Result;
use crate::linalg::{HermitianMatrix, Matrix, Vector, C64};
use crate::models::{state_jet, EigenOptions, ModelSpec};

fn outer(u: &Vector, v: &Vector) -> Matrix {
    Matrix::from_fn(u.dim(), |i, j| u[i] * v[j].conj())
}

/// State-independent counter-diabatic operator
/// `i Σₙ (|∂n⟩⟨n| − |n⟩⟨n|∂n⟩⟨n|)` with `∂ = ∂_R`.
pub fn drb_counterdiabatic(model: &ModelSpec, r: f64, opts: &EigenOptions) -> Result<HermitianMatrix> {
    let dim = model.dim();
    let mut acc = Matrix::zeros(dim);
    for n in 0..dim {
        let jet = state_jet(model, r, n, opts)?;
        let c = jet.state.amplitudes;
        let projector = outer(&c, &c);
        acc = acc + outer(&jet.derivative, &c) - projector.scale(jet.connection());
    }
    Ok(HermitianMatrix::hermitian_part(&acc.scale(C64::new(0.0, 1.0))))
}
