//! Subcommand bodies. Each returns `Ok(true)` on success and `Ok(false)` when
//! a verification bar is missed.

use std::path::Path;
use std::time::Instant;

use ffspin_core::cdsolver::{
    enumerate_solutions, reduce_system, solve_selection, verify_table_b, Coefficient, CoefficientMode, Enumeration,
    Selection, SelectionOutcome, StandardBasis, TableReport, COEFFICIENT_COUNT,
};
use ffspin_core::models::ModelKind;
use ffspin_core::propagator::{evolve, Trajectory};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{fmt_f64, json_f64, write_json, Table};
use crate::verify::{run_checks, Check};
use crate::CliError;

/// Selection to drive with: the configured one, or the first accepted in
/// enumeration order at the middle of the sweep.
pub fn resolve_selection(cfg: &RunConfig) -> Result<Option<Selection>, CliError> {
    if cfg.cd_disabled {
        return Ok(None);
    }
    if let Some(sel) = cfg.selection {
        return Ok(Some(sel));
    }
    let r = 0.5 * (cfg.schedule.r0() + cfg.schedule.r_final());
    let en = enumerate_solutions(&cfg.model, r, cfg.n, cfg.scope, &cfg.tol, cfg.mode)?;
    let first = en.accepted().next().map(|o| o.selection);
    match first {
        Some(sel) => Ok(Some(sel)),
        None => {
            let mut reasons: Vec<&str> = en.outcomes.iter().filter_map(|o| o.rejection.map(|r| r.code())).collect();
            reasons.sort_unstable();
            reasons.dedup();
            Err(CliError::NoSelection(format!(
                "none of the {} candidate selections of {} is accepted at R = {r} in {} mode (reasons: {})",
                en.outcomes.len(),
                cfg.model.kind(),
                cfg.mode.name(),
                reasons.join(", ")
            )))
        }
    }
}

fn coefficient_columns(sel: Option<Selection>, mode: CoefficientMode) -> Vec<(Coefficient, bool)> {
    let Some(sel) = sel else { return Vec::new() };
    let mut cols: Vec<(Coefficient, bool)> = sel.iter().map(|c| (c, false)).collect();
    if mode == CoefficientMode::Formal {
        cols.extend(sel.iter().map(|c| (c, true)));
    }
    cols
}

fn column_name((c, imag): (Coefficient, bool)) -> String {
    if imag {
        format!("im_{}", c.name())
    } else {
        c.name().to_owned()
    }
}

fn write_trajectory(dir: &Path, cfg: &RunConfig, sel: Option<Selection>, tr: &Trajectory) -> Result<(), CliError> {
    let dim = cfg.model.dim();
    let cols = coefficient_columns(sel, cfg.mode);
    let mut header: Vec<String> = vec!["t".into(), "R_adv".into(), "v".into()];
    for j in 1..=dim {
        header.push(format!("re_c{j}"));
        header.push(format!("im_c{j}"));
    }
    header.extend((1..=dim).map(|j| format!("pop_c{j}")));
    header.extend(["norm".into(), "fidelity".into()]);
    header.extend(cols.iter().map(|c| column_name(*c)));
    let mut traj = Table::new(&header);

    let mut cheader: Vec<String> = vec!["t".into(), "R_adv".into(), "v".into()];
    cheader.extend((1..=dim).map(|j| format!("energy_{j}")));
    cheader.extend(cols.iter().map(|c| column_name(*c)));
    let mut coeffs = Table::new(&cheader);

    for s in &tr.samples {
        let values: Vec<String> = cols
            .iter()
            .map(|&(c, imag)| fmt_f64(if imag { s.imaginary[c.index()] } else { s.coefficients.get(c) }))
            .collect();
        let mut row = vec![fmt_f64(s.t), fmt_f64(s.r), fmt_f64(s.v)];
        for z in s.psi.iter() {
            row.push(fmt_f64(z.re));
            row.push(fmt_f64(z.im));
        }
        row.extend(s.psi.iter().map(|z| fmt_f64(z.norm_sqr())));
        row.extend([fmt_f64(s.norm), fmt_f64(s.fidelity)]);
        row.extend(values.iter().cloned());
        traj.row(&row);

        let mut crow = vec![fmt_f64(s.t), fmt_f64(s.r), fmt_f64(s.v)];
        crow.extend(s.energies[..dim].iter().map(|e| fmt_f64(*e)));
        crow.extend(values);
        coeffs.row(&crow);
    }
    traj.write(&dir.join("trajectory.csv"))?;
    coeffs.write(&dir.join("coefficients.csv"))
}

/// Propagates the configured run and writes `trajectory.csv`,
/// `coefficients.csv` and `summary.json`.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<bool, CliError> {
    let sel = resolve_selection(cfg)?;
    let driver = cfg.driver(sel);
    let start = Instant::now();
    let tr = evolve(&driver, &cfg.schedule, &cfg.evolve)?;
    let runtime = start.elapsed().as_secs_f64();
    write_trajectory(dir, cfg, sel, &tr)?;

    let min_fidelity = tr.min_fidelity();
    let pass = min_fidelity >= cfg.fidelity_min;
    let summary = json!({
        "name": cfg.name,
        "model": cfg.model.kind().name(),
        "state": cfg.n,
        "selection": sel.map(|s| s.label()),
        "mode": cfg.mode.name(),
        "dt": json_f64(tr.dt),
        "steps": tr.steps,
        "samples": tr.samples.len(),
        "runtime_seconds": json_f64(runtime),
        "min_fidelity": json_f64(min_fidelity),
        "fidelity_min": json_f64(cfg.fidelity_min),
        "terminal_populations": tr.terminal_populations().into_iter().map(json_f64).collect::<Vec<_>>(),
        "max_norm_drift": json_f64(tr.max_norm_drift),
        "cd_skipped": tr.cd_skipped,
        "pass": pass,
    });
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(pass)
}

fn value_columns(mode: CoefficientMode) -> Vec<String> {
    let mut h: Vec<String> = Coefficient::ALL.iter().map(|c| c.name().to_owned()).collect();
    if mode == CoefficientMode::Formal {
        h.extend(Coefficient::ALL.iter().map(|c| format!("im_{}", c.name())));
    }
    h
}

fn value_fields(values: &[ffspin_core::C64; COEFFICIENT_COUNT], sel: Selection, mode: CoefficientMode) -> Vec<String> {
    let pick =
        |c: Coefficient, f: fn(ffspin_core::C64) -> f64| if sel.contains(c) { f(values[c.index()]) } else { 0.0 };
    let mut out: Vec<String> = Coefficient::ALL.iter().map(|&c| fmt_f64(pick(c, |z| z.re))).collect();
    if mode == CoefficientMode::Formal {
        out.extend(Coefficient::ALL.iter().map(|&c| fmt_f64(pick(c, |z| z.im))));
    }
    out
}

fn outcome_header(mode: CoefficientMode) -> Vec<String> {
    let mut h: Vec<String> =
        ["R", "selection", "mask", "accepted", "rejection", "condition", "imaginary", "residual", "group"]
            .map(String::from)
            .to_vec();
    h.extend(value_columns(mode));
    h
}

/// One row per (R, selection); coefficients of rejected selections are the
/// raw solve (zero when singular).
fn outcome_row(o: &SelectionOutcome, mode: CoefficientMode) -> Vec<String> {
    let mut row = vec![
        fmt_f64(o.r),
        o.selection.label(),
        o.selection.mask().to_string(),
        o.accepted().to_string(),
        o.rejection.map_or("", |r| r.code()).into(),
        fmt_f64(o.condition),
        fmt_f64(o.imaginary),
        fmt_f64(o.residual),
        o.group_id.to_string(),
    ];
    row.extend(value_fields(&o.values, o.selection, mode));
    row
}

/// Solves the configured selection across the R grid into `cd.csv`.
/// Returns the first rejection, if any.
pub fn solve_cd(cfg: &RunConfig, dir: &Path) -> Result<Option<String>, CliError> {
    let sel = resolve_selection(cfg)?.ok_or_else(|| CliError::Config("the regularization term is disabled".into()))?;
    let outcomes = cfg
        .r_grid()
        .par_iter()
        .map(|&r| Ok(solve_selection(&reduce_system(&cfg.model, r, cfg.n, sel, &cfg.tol)?, &cfg.tol, cfg.mode)))
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut t = Table::new(&outcome_header(cfg.mode));
    let mut first_rejection = None;
    for o in &outcomes {
        t.row(&outcome_row(o, cfg.mode));
        if let (None, Some(reason)) = (&first_rejection, o.rejection) {
            first_rejection = Some(format!("{} rejected at R = {}: {reason}", sel.label(), o.r));
        }
    }
    t.write(&dir.join("cd.csv"))?;
    Ok(first_rejection)
}

fn enumerate_grid(cfg: &RunConfig) -> Result<Vec<Enumeration>, CliError> {
    cfg.r_grid()
        .par_iter()
        .map(|&r| Ok(enumerate_solutions(&cfg.model, r, cfg.n, cfg.scope, &cfg.tol, cfg.mode)?))
        .collect()
}

/// Enumerates every candidate selection across the grid into
/// `selections.csv` and `enumeration.json`.
pub fn enumerate(cfg: &RunConfig, dir: &Path) -> Result<Value, CliError> {
    let grid = enumerate_grid(cfg)?;
    let mut t = Table::new(&outcome_header(cfg.mode));
    let mut points = Vec::new();
    for en in &grid {
        for o in &en.outcomes {
            t.row(&outcome_row(o, cfg.mode));
        }
        let groups: Vec<Vec<String>> = en.partition().iter().map(|g| g.iter().map(|s| s.label()).collect()).collect();
        points.push(json!({
            "R": json_f64(en.r),
            "candidates": en.outcomes.len(),
            "accepted": en.accepted_count(),
            "groups": en.group_count(),
            "partition": groups,
        }));
    }
    t.write(&dir.join("selections.csv"))?;
    let accepted: Vec<usize> = grid.iter().map(|e| e.accepted_count()).collect();
    let groups: Vec<usize> = grid.iter().map(|e| e.group_count()).collect();
    let summary = json!({
        "model": cfg.model.kind().name(),
        "state": cfg.n,
        "mode": cfg.mode.name(),
        "scope": cfg.scope.name(),
        "grid_points": grid.len(),
        "accepted_min": accepted.iter().min(),
        "accepted_max": accepted.iter().max(),
        "groups_min": groups.iter().min(),
        "groups_max": groups.iter().max(),
        "points": points,
    });
    write_json(&dir.join("enumeration.json"), &summary)?;
    Ok(summary)
}

/// Same-group relation of the table entries agrees with the clustering of
/// the enumeration at the same point.
fn table_matches_enumeration(report: &TableReport, en: &Enumeration) -> bool {
    let enum_group = |s: Selection| en.outcomes.iter().find(|o| o.selection == s).map_or(0, |o| o.group_id);
    let e = &report.entries;
    (0..e.len()).all(|i| {
        (0..e.len()).all(|j| (e[i].group == e[j].group) == (enum_group(e[i].selection) == enum_group(e[j].selection)))
    })
}

/// Checks every closed-form table entry across the grid into `table.csv`.
pub fn verify_table(cfg: &RunConfig, dir: &Path) -> Result<bool, CliError> {
    if cfg.model.kind() != ModelKind::Qa {
        return Err(CliError::Config(format!("verify-table needs a qa model, got {}", cfg.model.kind())));
    }
    let reports = cfg
        .r_grid()
        .par_iter()
        .map(|&r| {
            let report = verify_table_b(&cfg.model, r, &cfg.tol, &StandardBasis)?;
            let en = enumerate_solutions(
                &cfg.model,
                r,
                0,
                ffspin_core::cdsolver::Scope::Canonical,
                &cfg.tol,
                CoefficientMode::Real,
            )?;
            let consistent = table_matches_enumeration(&report, &en);
            Ok((report, consistent))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut t = Table::new(&[
        "R",
        "entry",
        "selection",
        "frame",
        "first",
        "first_value",
        "second",
        "second_value",
        "imaginary",
        "residual",
        "frame_value",
        "solver_mismatch",
        "group",
        "documented_group",
    ]);
    let mut pass = true;
    for (report, consistent) in &reports {
        pass &= report.check(cfg.tol.table_residual_max).is_ok() && report.classification_matches() && *consistent;
        for e in &report.entries {
            t.row(&[
                fmt_f64(report.r),
                e.index.to_string(),
                e.selection.label(),
                e.frame.name().into(),
                e.first.0.name().into(),
                fmt_f64(e.first.1),
                e.second.0.name().into(),
                fmt_f64(e.second.1),
                fmt_f64(e.imaginary),
                fmt_f64(e.residual),
                fmt_f64(e.frame_value),
                fmt_f64(e.solver_mismatch),
                e.group.to_string(),
                ((e.index - 1) / 6 + 1).to_string(),
            ]);
        }
    }
    t.write(&dir.join("table.csv"))?;
    Ok(pass)
}

/// Runs the invariant suite for `models` and writes `verify.json`.
pub fn verify(models: &[ModelKind], grid: usize, dir: &Path) -> Result<Vec<Check>, CliError> {
    let checks = run_checks(models, &StandardBasis, grid);
    let list: Vec<Value> = checks.iter().map(Check::to_json).collect();
    let failed = checks.iter().filter(|c| !c.pass).count();
    let summary = json!({
        "models": models.iter().map(|m| m.name()).collect::<Vec<_>>(),
        "grid_points": grid,
        "checks": list,
        "failed": failed,
        "pass": failed == 0,
    });
    write_json(&dir.join("verify.json"), &summary)?;
    Ok(checks)
}
