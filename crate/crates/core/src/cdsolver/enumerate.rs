use alloc::vec::Vec;

use crate::error::Result;
use crate::linalg::C64;
use crate::models::{state_jet, ModelKind, ModelSpec, StateJet};

use super::solve::solve_selection_in;
use super::{
    reduce_with, Coefficient, CoefficientMode, OperatorBasis, Selection, SelectionOutcome, StandardBasis, Tolerances,
    COEFFICIENT_COUNT,
};

/// Which selections an enumeration visits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scope {
    /// The physically motivated family of each model: for the annealing model
    /// two of the imaginary-part coefficients `{B̃y, W̃₁, W̃₂}` with one of the
    /// real-part ones; for the transverse Ising model `W̃₂` with one of
    /// `{J̃₁, J̃₂, J̃₃, B̃ₓ}`; for the entangler every triple.
    #[default]
    Canonical,
    /// Every selection of the right size from the coefficients that respect
    /// the model's symmetry.
    Exhaustive,
}

impl Scope {
    pub fn name(self) -> &'static str {
        match self {
            Scope::Canonical => "canonical",
            Scope::Exhaustive => "exhaustive",
        }
    }
}

fn subsets(pool: &[Coefficient], k: usize) -> Vec<Selection> {
    let mut out = Vec::new();
    let n = pool.len();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(Selection::of(&idx.iter().map(|&i| pool[i]).collect::<Vec<_>>()));
        let Some(pos) = (0..k).rev().find(|&p| idx[p] != p + n - k) else {
            return out;
        };
        idx[pos] += 1;
        for q in pos + 1..k {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Selections visited for `kind`, in reporting order.
pub fn candidate_selections(kind: ModelKind, scope: Scope) -> Vec<Selection> {
    use Coefficient::*;
    match (kind, scope) {
        (ModelKind::Lz, _) => alloc::vec![Selection::of(&[Bx, By, Bz])],
        (ModelKind::Tfim, Scope::Canonical) => [J1, J2, J3, Bx].iter().map(|c| Selection::of(&[W2, *c])).collect(),
        (ModelKind::Tfim, Scope::Exhaustive) => subsets(&[J1, J2, J3, W2, Bx], 2),
        (ModelKind::Qa, Scope::Canonical) => {
            let pairs = [(By, W2), (By, W1), (W1, W2)];
            pairs.iter().flat_map(|&(a, b)| Coefficient::REAL.iter().map(move |&c| Selection::of(&[a, b, c]))).collect()
        }
        (ModelKind::Qa, Scope::Exhaustive) | (ModelKind::Gen, _) => subsets(&Coefficient::STANDARD, 3),
    }
}

/// All outcomes of one enumeration at a single parameter value.
#[derive(Clone, Debug, PartialEq)]
pub struct Enumeration {
    pub r: f64,
    pub n: usize,
    pub outcomes: Vec<SelectionOutcome>,
}

impl Enumeration {
    pub fn accepted(&self) -> impl Iterator<Item = &SelectionOutcome> {
        self.outcomes.iter().filter(|o| o.accepted())
    }

    pub fn accepted_count(&self) -> usize {
        self.accepted().count()
    }

    pub fn group_count(&self) -> usize {
        self.outcomes.iter().map(|o| o.group_id).max().unwrap_or(0)
    }

    /// Accepted selections of each group, groups in id order.
    pub fn partition(&self) -> Vec<Vec<Selection>> {
        (1..=self.group_count())
            .map(|g| self.outcomes.iter().filter(|o| o.group_id == g).map(|o| o.selection).collect())
            .collect()
    }
}

/// Enumerates the selections of `scope` for state `n` at `r`.
pub fn enumerate_solutions(
    model: &ModelSpec,
    r: f64,
    n: usize,
    scope: Scope,
    tol: &Tolerances,
    mode: CoefficientMode,
) -> Result<Enumeration> {
    let jet = state_jet(model, r, n, &tol.eigen)?;
    enumerate_with(&StandardBasis, model.kind(), &jet, &candidate_selections(model.kind(), scope), tol, mode)
}

/// Solves every selection against one eigenstate jet and clusters the
/// accepted solutions.
pub fn enumerate_with(
    basis: &dyn OperatorBasis,
    kind: ModelKind,
    jet: &StateJet,
    selections: &[Selection],
    tol: &Tolerances,
    mode: CoefficientMode,
) -> Result<Enumeration> {
    let mut outcomes = Vec::with_capacity(selections.len());
    for sel in selections {
        let rs = reduce_with(basis, kind, jet, *sel, tol)?;
        outcomes.push(solve_selection_in(basis, &rs, tol, mode));
    }
    let accepted: Vec<usize> = (0..outcomes.len()).filter(|&k| outcomes[k].accepted()).collect();
    let vectors: Vec<[C64; COEFFICIENT_COUNT]> = accepted.iter().map(|&k| used_values(&outcomes[k])).collect();
    for (k, g) in accepted.iter().zip(cluster(&vectors, tol.cluster_tol)) {
        outcomes[*k].group_id = g;
    }
    Ok(Enumeration { r: jet.r, n: jet.state.n, outcomes })
}

fn used_values(o: &SelectionOutcome) -> [C64; COEFFICIENT_COUNT] {
    let mut v = [C64::new(0.0, 0.0); COEFFICIENT_COUNT];
    for c in o.selection.iter() {
        let x = o.values[c.index()];
        v[c.index()] = if o.mode == CoefficientMode::Real { C64::new(x.re, 0.0) } else { x };
    }
    v
}

/// Greedy clustering: each vector joins the first group whose representative
/// lies within `tol · max(1, ‖·‖∞)` in max-norm. Group ids start at 1.
pub fn cluster(vectors: &[[C64; COEFFICIENT_COUNT]], tol: f64) -> Vec<usize> {
    let inf = |v: &[C64; COEFFICIENT_COUNT]| v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut reps: Vec<&[C64; COEFFICIENT_COUNT]> = Vec::new();
    let mut ids = Vec::with_capacity(vectors.len());
    for v in vectors {
        let hit = reps.iter().position(|rep| {
            let d = rep.iter().zip(v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            d <= tol * inf(rep).max(inf(v)).max(1.0)
        });
        match hit {
            Some(g) => ids.push(g + 1),
            None => {
                reps.push(v);
                ids.push(reps.len());
            }
        }
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn candidate_counts() {
        assert_eq!(candidate_selections(ModelKind::Lz, Scope::Canonical).len(), 1);
        assert_eq!(candidate_selections(ModelKind::Tfim, Scope::Canonical).len(), 4);
        assert_eq!(candidate_selections(ModelKind::Tfim, Scope::Exhaustive).len(), 10);
        assert_eq!(candidate_selections(ModelKind::Qa, Scope::Canonical).len(), 18);
        assert_eq!(candidate_selections(ModelKind::Qa, Scope::Exhaustive).len(), 84);
        assert_eq!(candidate_selections(ModelKind::Gen, Scope::Canonical).len(), 84);
        let all = candidate_selections(ModelKind::Gen, Scope::Canonical);
        let mut dedup = all.clone();
        dedup.sort();
        dedup.dedup();
        assert_eq!(dedup.len(), 84);
        assert!(all.iter().all(|s| s.len() == 3));
    }

    #[test]
    fn qa_canonical_order_follows_imaginary_pairs() {
        use Coefficient::*;
        let s = candidate_selections(ModelKind::Qa, Scope::Canonical);
        assert_eq!(s[0], Selection::of(&[By, W2, Bz]));
        assert_eq!(s[5], Selection::of(&[By, W2, W3]));
        assert_eq!(s[6], Selection::of(&[By, W1, Bz]));
        assert_eq!(s[12], Selection::of(&[W1, W2, Bz]));
        assert_eq!(s[17], Selection::of(&[W1, W2, W3]));
    }

    #[test]
    fn clustering() {
        let mut a = [C64::new(0.0, 0.0); COEFFICIENT_COUNT];
        a[0] = C64::new(1.0, 0.0);
        let mut b = a;
        b[0] = C64::new(1.0 + 1e-10, 0.0);
        let mut c = a;
        c[1] = C64::new(0.5, 0.0);
        assert_eq!(cluster(&[a, c, b, c], 1e-8), [1, 2, 1, 2]);
    }
}
