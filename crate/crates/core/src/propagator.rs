//! Fixed-step RK4 integration of `i∂ₜψ = H_FF(t) ψ` and checks of the
//! analytic fast-forward state.

use alloc::vec::Vec;

use crate::cdsolver::{AnsatzCoefficients, CdDriver, FastForwardPoint, COEFFICIENT_COUNT};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector, C64};
use crate::models::{adiabatic_phase_rate, eigensystem, ModelSpec};
use crate::schedule::Schedule;

/// Integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveOptions {
    /// Step size; `None` means `T/10⁵`. Must divide `T`.
    pub dt: Option<f64>,
    /// Number of sampled intervals (`samples + 1` rows, at least 200).
    pub samples: usize,
    /// Largest tolerated `|‖ψ‖ − 1|` before the run is aborted.
    pub drift_max: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { dt: None, samples: 1000, drift_max: 1e-6 }
    }
}

pub const DEFAULT_STEPS: usize = 100_000;
pub const MIN_SAMPLES: usize = 200;

/// One recorded instant of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub r: f64,
    pub v: f64,
    pub psi: Vector,
    pub norm: f64,
    /// `|⟨Cₙ(R)|ψ⟩|`
    pub fidelity: f64,
    /// Regularization coefficients in use (zero when none).
    pub coefficients: AnsatzCoefficients,
    /// Imaginary parts of formal coefficients.
    pub imaginary: [f64; COEFFICIENT_COUNT],
    pub energies: [f64; 4],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub dt: f64,
    pub steps: usize,
    /// Evaluations where a rejected selection was dropped below the velocity floor.
    pub cd_skipped: usize,
    pub max_norm_drift: f64,
}

impl Trajectory {
    pub fn min_fidelity(&self) -> f64 {
        self.samples.iter().map(|s| s.fidelity).fold(f64::INFINITY, f64::min)
    }

    pub fn last(&self) -> &Sample {
        self.samples.last().expect("a trajectory has at least one sample")
    }

    /// `|Cⱼ|²` of the final state.
    pub fn terminal_populations(&self) -> Vec<f64> {
        self.last().psi.iter().map(|c| c.norm_sqr()).collect()
    }
}

/// `|⟨Cₙ(r)|ψ⟩|`
pub fn fidelity(psi: &Vector, model: &ModelSpec, r: f64, n: usize) -> Result<f64> {
    let spec = eigensystem(model, r)?;
    Ok(spec.state(n).amplitudes.dot(psi).norm())
}

fn times_minus_i(h: &Matrix, psi: &Vector) -> Vector {
    h.mul_vec(psi).scale(C64::new(0.0, -1.0))
}

fn step_count(t_ff: f64, dt: Option<f64>) -> Result<usize> {
    let Some(dt) = dt else { return Ok(DEFAULT_STEPS) };
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Config(alloc::format!("dt must be positive, got {dt}")));
    }
    let n = (t_ff / dt).round();
    if n < 1.0 || (n * dt - t_ff).abs() > 1e-9 * t_ff {
        return Err(Error::Config(alloc::format!("dt = {dt} does not divide t_ff = {t_ff}")));
    }
    Ok(n as usize)
}

fn sample(driver: &CdDriver, p: &FastForwardPoint, psi: Vector) -> Result<Sample> {
    let spec = eigensystem(&driver.model, p.r)?;
    let mut energies = [0.0; 4];
    energies[..spec.dim()].copy_from_slice(spec.energies());
    let (coefficients, imaginary) = match p.solution {
        Some(s) => (s.coefficients, s.imaginary),
        None => (AnsatzCoefficients::zero(), [0.0; COEFFICIENT_COUNT]),
    };
    let norm = psi.norm();
    Ok(Sample {
        t: p.t,
        r: p.r,
        v: p.v,
        psi,
        norm,
        fidelity: spec.state(driver.n).amplitudes.dot(&psi).norm(),
        coefficients,
        imaginary,
        energies,
    })
}

/// Integrates from eigenstate `driver.n` at `R₀` over `[0, T]`.
///
/// The state is never renormalized; a drift of the norm beyond
/// `opts.drift_max` aborts with [`Error::StepSize`].
pub fn evolve(driver: &CdDriver, schedule: &Schedule, opts: &EvolveOptions) -> Result<Trajectory> {
    let t_ff = schedule.t_ff();
    let steps = step_count(t_ff, opts.dt)?;
    let intervals = opts.samples.max(MIN_SAMPLES);
    if steps < intervals {
        return Err(Error::Config(alloc::format!(
            "{steps} steps cannot be decimated to {intervals} sample intervals; use a smaller dt"
        )));
    }
    let dt = t_ff / steps as f64;
    let at = |k: usize| if k == steps { t_ff } else { k as f64 * dt };
    let is_sample = |k: usize| (k * intervals) % steps < intervals;

    let mut psi =
        eigensystem(&driver.model, schedule.r0())?.checked_state(driver.n, driver.tol.eigen.gap_min)?.amplitudes;
    let mut cd_skipped = 0;
    let mut eval = |t: f64| -> Result<FastForwardPoint> {
        let p = driver.at_time(schedule, t)?;
        cd_skipped += p.skipped as usize;
        Ok(p)
    };

    let mut here = eval(0.0)?;
    let mut samples = Vec::with_capacity(intervals + 1);
    samples.push(sample(driver, &here, psi)?);
    let mut max_norm_drift = 0.0f64;
    for k in 0..steps {
        let t = at(k);
        let mid = eval(t + 0.5 * dt)?.matrix;
        let next = eval(at(k + 1))?;
        let k1 = times_minus_i(&here.matrix, &psi);
        let k2 = times_minus_i(&mid, &psi.axpy(C64::new(0.5 * dt, 0.0), &k1));
        let k3 = times_minus_i(&mid, &psi.axpy(C64::new(0.5 * dt, 0.0), &k2));
        let k4 = times_minus_i(&next.matrix, &psi.axpy(C64::new(dt, 0.0), &k3));
        let incr = k1 + (k2 + k3).scale_real(2.0) + k4;
        psi = psi.axpy(C64::new(dt / 6.0, 0.0), &incr);

        let drift = (psi.norm() - 1.0).abs();
        max_norm_drift = max_norm_drift.max(drift);
        if drift > opts.drift_max {
            return Err(Error::StepSize { drift, t: next.t });
        }
        here = next;
        if is_sample(k + 1) {
            samples.push(sample(driver, &here, psi)?);
        }
    }
    Ok(Trajectory { samples, dt, steps, cd_skipped, max_norm_drift })
}

/// Phases of the analytic fast-forward state at one time.
#[derive(Clone, Copy, Debug)]
struct PhaseAt {
    energy: f64,
    rate: f64,
}

fn phase_integrands(driver: &CdDriver, schedule: &Schedule, t: f64) -> Result<PhaseAt> {
    let r = schedule.frozen_parameter(t);
    let v = schedule.frozen_velocity(t);
    let energy = eigensystem(&driver.model, r)?.state(driver.n).energy;
    let rate = if v == 0.0 { 0.0 } else { v * adiabatic_phase_rate(&driver.model, r, driver.n, &driver.tol.eigen)? };
    Ok(PhaseAt { energy, rate })
}

/// `(∫₀ᵗ E dt′, ξ(t))` by the trapezoid rule on `quad_steps` intervals, where
/// `ξ = ∫ v·i⟨C|∂_R C⟩ dt′`.
pub fn accumulated_phases(driver: &CdDriver, schedule: &Schedule, t: f64, quad_steps: usize) -> Result<(f64, f64)> {
    let m = quad_steps.max(1);
    let h = t / m as f64;
    let (mut theta, mut xi) = (0.0, 0.0);
    let mut prev = phase_integrands(driver, schedule, 0.0)?;
    for k in 1..=m {
        let cur = phase_integrands(driver, schedule, k as f64 * h)?;
        theta += 0.5 * h * (prev.energy + cur.energy);
        xi += 0.5 * h * (prev.rate + cur.rate);
        prev = cur;
    }
    Ok((theta, xi))
}

/// Simpson increments of `(∫E, ξ)` over `[t, t + d]`.
fn phase_increment(driver: &CdDriver, schedule: &Schedule, t: f64, d: f64) -> Result<(f64, f64)> {
    let a = phase_integrands(driver, schedule, t)?;
    let m = phase_integrands(driver, schedule, t + 0.5 * d)?;
    let b = phase_integrands(driver, schedule, t + d)?;
    Ok((d / 6.0 * (a.energy + 4.0 * m.energy + b.energy), d / 6.0 * (a.rate + 4.0 * m.rate + b.rate)))
}

/// `C(R(t′)) e^{−i∫E} e^{iξ}` given the accumulated phases.
fn ff_state(driver: &CdDriver, schedule: &Schedule, t: f64, theta: f64, xi: f64) -> Result<Vector> {
    let spec = eigensystem(&driver.model, schedule.frozen_parameter(t))?;
    Ok(spec.state(driver.n).amplitudes.scale(C64::from_polar(1.0, xi - theta)))
}

/// Settings for [`ff_state_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualOptions {
    /// Central-difference step in `t`.
    pub dt_probe: f64,
    /// Trapezoid intervals for the phases accumulated on `[0, t]`.
    pub quad_steps: usize,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { dt_probe: 1e-6, quad_steps: 1000 }
    }
}

/// `‖i∂ₜΨ_FF − H_FF Ψ_FF‖` at `t`, with `Ψ_FF` built from the instantaneous
/// eigenstate and its dynamical and adiabatic phases and `∂ₜ` a central
/// difference of step `dt_probe`.
pub fn ff_state_residual(driver: &CdDriver, schedule: &Schedule, t: f64, opts: &ResidualOptions) -> Result<f64> {
    let d = opts.dt_probe;
    if !(d > 0.0) || t - d < 0.0 || t + d > schedule.t_ff() {
        return Err(Error::Range { t, t_ff: schedule.t_ff() });
    }
    let (theta, xi) = accumulated_phases(driver, schedule, t, opts.quad_steps)?;
    let (dtp, dxp) = phase_increment(driver, schedule, t, d)?;
    let (dtm, dxm) = phase_increment(driver, schedule, t, -d)?;
    let centre = ff_state(driver, schedule, t, theta, xi)?;
    let plus = ff_state(driver, schedule, t + d, theta + dtp, xi + dxp)?;
    let minus = ff_state(driver, schedule, t - d, theta + dtm, xi + dxm)?;

    let h = driver.at_time(schedule, t)?;
    let lhs = (plus - minus).scale(C64::new(0.0, 0.5 / d));
    Ok((lhs - h.matrix.mul_vec(&centre)).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdsolver::{Coefficient, CoefficientMode, Selection};
    use crate::models::Coupling;

    fn lz_driver() -> CdDriver {
        CdDriver::new(
            ModelSpec::landau_zener(1.0),
            1,
            Some(Selection::of(&[Coefficient::Bx, Coefficient::By, Coefficient::Bz])),
            CoefficientMode::Real,
        )
    }

    #[test]
    fn stationary_schedule_only_rotates_the_phase() {
        let d = lz_driver();
        let s = Schedule::new(0.7, 0.0, 1.0).unwrap();
        let tr = evolve(&d, &s, &EvolveOptions { dt: Some(1e-3), samples: 200, ..Default::default() }).unwrap();
        let c = eigensystem(&d.model, 0.7).unwrap().state(1);
        for smp in &tr.samples {
            let expect = c.amplitudes.scale(C64::from_polar(1.0, -c.energy * smp.t));
            assert!((smp.psi - expect).norm() < 1e-10);
            assert!((smp.fidelity - 1.0).abs() < 1e-12);
        }
        assert_eq!(tr.samples.len(), 201);
        assert_eq!(tr.last().t, 1.0);
    }

    #[test]
    fn dt_must_divide_the_window() {
        let d = lz_driver();
        let s = Schedule::new(0.0, 1.0, 1.0).unwrap();
        let e = evolve(&d, &s, &EvolveOptions { dt: Some(0.3), ..Default::default() });
        assert!(matches!(e, Err(Error::Config(_))));
        let e = evolve(&d, &s, &EvolveOptions { dt: Some(0.01), ..Default::default() });
        assert!(matches!(e, Err(Error::Config(_))));
    }

    #[test]
    fn coarse_steps_trip_the_drift_check() {
        let d = lz_driver();
        let s = Schedule::new(-5.0, 10.0, 1.0).unwrap();
        let e = evolve(&d, &s, &EvolveOptions { dt: Some(1.0 / 200.0), samples: 200, drift_max: 1e-12 });
        assert!(matches!(e, Err(Error::StepSize { .. })));
    }

    #[test]
    fn fidelity_limits() {
        let m = ModelSpec::annealing(Coupling::constant(1.0), Coupling::constant(0.1), Coupling::affine(10.0, -1.0));
        let spec = eigensystem(&m, 3.0).unwrap();
        assert!((fidelity(&spec.state(0).amplitudes, &m, 3.0, 0).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&spec.state(2).amplitudes, &m, 3.0, 0).unwrap() < 1e-14);
    }

    #[test]
    fn stationary_residual_vanishes() {
        let d = lz_driver();
        let s = Schedule::new(0.3, 0.0, 0.5).unwrap();
        let r = ff_state_residual(&d, &s, 0.25, &ResidualOptions::default()).unwrap();
        assert!(r < 1e-9, "{r}");
    }

    #[test]
    fn probe_must_stay_inside_the_window() {
        let d = lz_driver();
        let s = Schedule::new(0.0, 1.0, 0.5).unwrap();
        let o = ResidualOptions { dt_probe: 1e-3, ..Default::default() };
        assert!(matches!(ff_state_residual(&d, &s, 0.0005, &o), Err(Error::Range { .. })));
    }
}
