//! Invariant suite behind the `verify` subcommand.

use ffspin_core::cdsolver::{
    drb_counterdiabatic, reduce_system, solve_selection, verify_table_b, CdSolution, Coefficient, CoefficientMode,
    OperatorBasis, Selection, Tolerances,
};
use ffspin_core::models::{state_jet, ModelKind, ModelSpec};
use ffspin_core::presets;
use ffspin_core::propagator::{ff_state_residual, ResidualOptions};
use ffspin_core::schedule::Schedule;
use ffspin_core::{Matrix, Result, C64};
use serde_json::{json, Value};

use crate::output::json_f64;

/// Outcome of one invariant. `value` is compared against `threshold` from
/// below, except for `drb_distinct` where it must exceed it.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub model: ModelKind,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

impl Check {
    fn below(name: &'static str, model: ModelKind, value: Result<f64>, threshold: f64) -> Self {
        match value {
            Ok(v) => Self { name, model, pass: v < threshold, value: v, threshold, detail: String::new() },
            Err(e) => Self::failed(name, model, threshold, e),
        }
    }

    fn above(name: &'static str, model: ModelKind, value: Result<f64>, threshold: f64) -> Self {
        match value {
            Ok(v) => Self { name, model, pass: v > threshold, value: v, threshold, detail: String::new() },
            Err(e) => Self::failed(name, model, threshold, e),
        }
    }

    fn failed(name: &'static str, model: ModelKind, threshold: f64, e: ffspin_core::Error) -> Self {
        Self { name, model, pass: false, value: f64::NAN, threshold, detail: e.to_string() }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "model": self.model.name(),
            "pass": self.pass,
            "value": json_f64(self.value),
            "threshold": json_f64(self.threshold),
            "detail": self.detail,
        })
    }
}

const ORACLE_TOL: f64 = 1e-10;
const POLAR_TOL: f64 = 1e-9;
const ACTION_TOL: f64 = 1e-9;
const DISTINCT_MIN: f64 = 1e-3;
const FF_RESIDUAL_MAX: f64 = 1e-6;

fn midpoints(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64)
}

fn solve(model: &ModelSpec, r: f64, n: usize, sel: &[Coefficient], mode: CoefficientMode) -> Result<CdSolution> {
    let tol = Tolerances::default();
    solve_selection(&reduce_system(model, r, n, Selection::of(sel), &tol)?, &tol, mode).into_result()
}

fn drb(model: &ModelSpec, r: f64) -> Result<Matrix> {
    Ok(*drb_counterdiabatic(model, r, &Default::default())?.as_matrix())
}

fn max_over(mut values: impl Iterator<Item = Result<f64>>) -> Result<f64> {
    values.try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

/// Five-point derivative of the polar angle of `(B_x, J)`.
fn polar_slope(model: &ModelSpec, r: f64) -> Result<f64> {
    let phi = |x: f64| model.values(x).map(|v| v[0].atan2(v[1]));
    let h = 1e-3;
    Ok((phi(r - 2.0 * h)? - 8.0 * phi(r - h)? + 8.0 * phi(r + h)? - phi(r + 2.0 * h)?) / (12.0 * h))
}

fn ff_residual(model: ModelKind, driver: &ffspin_core::cdsolver::CdDriver, schedule: &Schedule, t: f64) -> Check {
    let value = ff_state_residual(driver, schedule, t, &ResidualOptions::default());
    Check::below("ff_residual", model, value, FF_RESIDUAL_MAX)
}

fn lz_checks(basis: &dyn OperatorBasis, grid: usize) -> Vec<Check> {
    use Coefficient::*;
    let kind = ModelKind::Lz;
    let delta = 1.0;
    let m = ModelSpec::landau_zener(delta);
    let closed = max_over(midpoints(-5.0, 5.0, grid).flat_map(|r| {
        let m = &m;
        (0..2).map(move |n| {
            let h = solve(m, r, n, &[Bx, By, Bz], CoefficientMode::Real)?.operator_in(basis);
            let expect = C64::new(0.0, delta / (2.0 * (delta * delta + r * r)));
            Ok((h[(0, 1)] - expect).norm().max(h[(0, 0)].norm()).max(h[(1, 1)].norm()))
        })
    }));
    let drb_eq = max_over(midpoints(-5.0, 5.0, grid).flat_map(|r| {
        let m = &m;
        (0..2).map(move |n| {
            Ok((solve(m, r, n, &[Bx, By, Bz], CoefficientMode::Real)?.operator_in(basis) - drb(m, r)?).max_abs())
        })
    }));
    let e = presets::landau_zener();
    let schedule = Schedule::new(-2.5, 10.0, 0.5).expect("valid schedule");
    vec![
        Check::below("closed_form", kind, closed, ORACLE_TOL),
        Check::below("drb_equality", kind, drb_eq, ORACLE_TOL),
        ff_residual(kind, &e.driver, &schedule, 0.25),
    ]
}

fn tfim_checks(basis: &dyn OperatorBasis, grid: usize) -> Vec<Check> {
    use Coefficient::*;
    let kind = ModelKind::Tfim;
    let e = presets::transverse_ising();
    let m = &e.driver.model;
    let j = m.coupling("j").expect("tfim has j");
    let bx = m.coupling("bx").expect("tfim has bx");
    let solutions = |r: f64| [0, 3].map(|n| solve(m, r, n, &[W2, J3], CoefficientMode::Real));
    let closed = max_over(midpoints(0.0, 10.0, grid).flat_map(|r| {
        let (jv, bv) = (j.value(r), bx.value(r));
        let expect = (bv * j.derivative() - jv * bx.derivative()) / (4.0 * (bv * bv + jv * jv));
        solutions(r).map(move |s| Ok((s?.coefficients.get(W2) - expect).abs()))
    }));
    let polar = max_over(
        midpoints(0.0, 10.0, grid)
            .flat_map(|r| solutions(r).map(move |s| Ok((s?.coefficients.get(W2) - 0.25 * polar_slope(m, r)?).abs()))),
    );
    let drb_eq = max_over(
        midpoints(0.0, 10.0, grid)
            .flat_map(|r| solutions(r).map(move |s| Ok((s?.operator_in(basis) - drb(m, r)?).max_abs()))),
    );
    vec![
        Check::below("closed_form", kind, closed, ORACLE_TOL),
        Check::below("polar_identity", kind, polar, POLAR_TOL),
        Check::below("drb_equality", kind, drb_eq, ORACLE_TOL),
        ff_residual(kind, &e.driver, &e.schedule, 0.5 * e.schedule.t_ff()),
    ]
}

/// Action of the state-independent operator on the tracked state against
/// the solved operator's, and the max-norm distance of the two matrices.
fn drb_comparison(kind: ModelKind, basis: &dyn OperatorBasis, e: &presets::Experiment, r: f64) -> Vec<Check> {
    let sel = e.driver.selection.expect("preset has a selection").to_vec();
    let pair = || -> Result<(f64, f64)> {
        let h = solve(&e.driver.model, r, e.driver.n, &sel, e.driver.mode)?.operator_in(basis);
        let d = drb(&e.driver.model, r)?;
        let c = state_jet(&e.driver.model, r, e.driver.n, &Default::default())?.state.amplitudes;
        Ok(((d.mul_vec(&c) - h.mul_vec(&c)).norm(), (d - h).max_abs()))
    };
    let (action, distinct) = match pair() {
        Ok((a, d)) => (Ok(a), Ok(d)),
        Err(err) => (Err(err.clone()), Err(err)),
    };
    vec![
        Check::below("drb_action", kind, action, ACTION_TOL),
        Check::above("drb_distinct", kind, distinct, DISTINCT_MIN),
    ]
}

fn qa_checks(basis: &dyn OperatorBasis, grid: usize) -> Vec<Check> {
    let kind = ModelKind::Qa;
    let e = presets::annealing();
    let tol = Tolerances::default();
    let reports: Result<Vec<_>> =
        midpoints(0.0, 10.0, grid).map(|r| verify_table_b(&e.driver.model, r, &tol, basis)).collect();
    let (residual, classification) = match reports {
        Ok(reports) => {
            let mismatched = reports.iter().filter(|r| !r.classification_matches()).count();
            (Ok(reports.iter().map(|r| r.max_residual()).fold(0.0, f64::max)), Ok(mismatched as f64))
        }
        Err(err) => (Err(err.clone()), Err(err)),
    };
    let mut checks = vec![
        Check::below("table_residual", kind, residual, tol.table_residual_max),
        Check::below("table_classification", kind, classification, 0.5),
    ];
    checks.extend(drb_comparison(kind, basis, &e, 5.0));
    checks.push(ff_residual(kind, &e.driver, &e.schedule, 0.5 * e.schedule.t_ff()));
    checks
}

fn gen_checks(basis: &dyn OperatorBasis) -> Vec<Check> {
    let kind = ModelKind::Gen;
    let e = presets::entangler();
    let mut checks = drb_comparison(kind, basis, &e, 10.0);
    checks.push(ff_residual(kind, &e.driver, &e.schedule, 0.5 * e.schedule.t_ff()));
    checks
}

/// Runs every check for `models` in a fixed order, with `grid` R points per
/// sweep and operators taken from `basis`.
pub fn run_checks(models: &[ModelKind], basis: &dyn OperatorBasis, grid: usize) -> Vec<Check> {
    let mut out = Vec::new();
    for kind in ModelKind::ALL.iter().filter(|k| models.contains(k)) {
        out.extend(match kind {
            ModelKind::Lz => lz_checks(basis, grid),
            ModelKind::Tfim => tfim_checks(basis, grid),
            ModelKind::Qa => qa_checks(basis, grid),
            ModelKind::Gen => gen_checks(basis),
        });
    }
    out
}
