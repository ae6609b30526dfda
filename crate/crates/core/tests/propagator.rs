use ffspin_core::cdsolver::{CdDriver, Coefficient, CoefficientMode, Selection};
use ffspin_core::models::{eigensystem, ModelSpec};
use ffspin_core::presets;
use ffspin_core::propagator::{evolve, ff_state_residual, fidelity, EvolveOptions, ResidualOptions};
use ffspin_core::schedule::Schedule;
use ffspin_core::{Vector, C64};
use proptest::prelude::*;

fn lz_run(dt: f64) -> ffspin_core::propagator::Trajectory {
    let e = presets::landau_zener();
    evolve(&e.driver, &e.schedule, &EvolveOptions { dt: Some(dt), samples: 200, ..Default::default() }).unwrap()
}

#[test]
fn trajectory_invariants() {
    let e = presets::landau_zener();
    let tr = lz_run(e.schedule.t_ff() / 20_000.0);
    assert_eq!(tr.samples.len(), 201);
    assert_eq!(tr.samples[0].t, 0.0);
    assert_eq!(tr.last().t, e.schedule.t_ff());
    assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
    for s in &tr.samples {
        assert!((s.norm - 1.0).abs() < 1e-8);
        assert!(s.fidelity <= 1.0 + 1e-12);
        assert!(s.fidelity >= 1.0 - 1e-6, "t = {}: {}", s.t, s.fidelity);
    }
    // the regularization field is active mid-run and absent at the endpoints
    let mid = &tr.samples[100];
    assert!(mid.coefficients.get(Coefficient::By).abs() > 1e-3);
    assert_eq!(tr.samples[0].coefficients.max_abs(), 0.0);
}

#[test]
fn terminal_state_is_the_final_eigenvector() {
    let e = presets::landau_zener();
    let tr = lz_run(e.schedule.t_ff() / 20_000.0);
    let target = eigensystem(&e.driver.model, e.schedule.r_final()).unwrap().state(1).amplitudes;
    assert!((target.dot(&tr.last().psi).norm() - 1.0).abs() < 1e-9);
}

#[test]
fn fourth_order_convergence() {
    let t = presets::landau_zener().schedule.t_ff();
    let reference = lz_run(t / 40_000.0).last().psi;
    let errors: Vec<f64> =
        [200.0, 400.0, 800.0].iter().map(|n| (lz_run(t / n).last().psi - reference).norm()).collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((12.0..20.0).contains(&ratio), "{errors:?}");
    }
}

#[test]
fn bare_drive_leaves_the_eigenstate() {
    let e = presets::landau_zener();
    let bare = CdDriver::new(e.driver.model, 1, None, CoefficientMode::Real);
    let tr =
        evolve(&bare, &e.schedule, &EvolveOptions { dt: Some(e.schedule.t_ff() / 20_000.0), ..Default::default() })
            .unwrap();
    assert!(tr.min_fidelity() < 0.9);
}

#[test]
fn stationary_run_has_zero_residual_and_unit_fidelity() {
    let d = CdDriver::new(
        ModelSpec::landau_zener(1.0),
        0,
        Some(Selection::of(&[Coefficient::Bx, Coefficient::By, Coefficient::Bz])),
        CoefficientMode::Real,
    );
    let s = Schedule::new(1.0, 0.0, 0.5).unwrap();
    assert!(ff_state_residual(&d, &s, 0.25, &ResidualOptions::default()).unwrap() < 1e-9);
    let tr = evolve(&d, &s, &EvolveOptions { dt: Some(0.5 / 1000.0), samples: 200, ..Default::default() }).unwrap();
    assert!(tr.samples.iter().all(|x| (x.fidelity - 1.0).abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fidelity_is_a_bounded_overlap(re in proptest::array::uniform4(-1.0..1.0f64), im in proptest::array::uniform4(-1.0..1.0f64), r in 0.0..10.0f64) {
        let raw: Vec<C64> = re.iter().zip(im).map(|(a, b)| C64::new(*a, b)).collect();
        let v = Vector::from_slice(&raw);
        prop_assume!(v.norm() > 1e-3);
        let psi = v.scale_real(1.0 / v.norm());
        let m = presets::annealing().driver.model;
        let f = fidelity(&psi, &m, r, 0).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f));
        let phased = psi.scale(C64::from_polar(1.0, 0.7));
        prop_assert!((fidelity(&phased, &m, r, 0).unwrap() - f).abs() < 1e-14);
    }
}
