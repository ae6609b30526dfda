//! The reference experiments as ready-made drivers and schedules.

use crate::cdsolver::{CdDriver, Coefficient, CoefficientMode, Selection};
use crate::models::{Coupling, ModelSpec};
use crate::schedule::Schedule;

/// A model, a tracked state, a selection and a schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct Experiment {
    pub name: &'static str,
    pub driver: CdDriver,
    pub schedule: Schedule,
}

/// Fraction of `v̄` below which a rejected solve near an endpoint drops the
/// regularization term instead of failing the run.
pub const VELOCITY_FLOOR_FRACTION: f64 = 1e-4;

fn experiment(name: &'static str, driver: CdDriver, schedule: Schedule) -> Experiment {
    let floor = VELOCITY_FLOOR_FRACTION * schedule.v_bar();
    Experiment { name, driver: driver.with_velocity_floor(floor), schedule }
}

/// Two-spin annealing into `|↑↑⟩`: `J = 1`, `B_z = 0.1`, `B_x = 10 − R`,
/// `v̄ = 100`, `T = 0.1`, ground state, selection `{B̃y, W̃₂, B̃z}`.
pub fn annealing() -> Experiment {
    let model = ModelSpec::annealing(Coupling::constant(1.0), Coupling::constant(0.1), Coupling::affine(10.0, -1.0));
    let sel = Selection::of(&[Coefficient::By, Coefficient::W2, Coefficient::Bz]);
    let schedule = Schedule::new(0.0, 100.0, 0.1).expect("valid schedule");
    experiment("qa", CdDriver::new(model, 0, Some(sel), CoefficientMode::Real), schedule)
}

/// `J` of the entangler preset, `4(B_x² + B_y²)`.
pub fn entangler_coupling(bx: f64, by: f64) -> f64 {
    4.0 * (bx * bx + by * by)
}

/// Entangling drive from `|↓↓⟩` towards `(|↑↓⟩ + |↓↑⟩)/√2`: `B_x = B_y = 1`,
/// `J = 8`, `B_z = 25 − R`, `v̄ = 250`, `T = 0.1`, ground state.
///
/// No selection of this model has a real solution, so the driver uses the
/// formal (complex) solution of `{W̃₃, B̃y, W̃₁}`.
pub fn entangler() -> Experiment {
    let (bx, by) = (1.0, 1.0);
    let model = ModelSpec::entangler(
        Coupling::constant(entangler_coupling(bx, by)),
        Coupling::constant(bx),
        Coupling::constant(by),
        Coupling::affine(25.0, -1.0),
    );
    let sel = Selection::of(&[Coefficient::W3, Coefficient::By, Coefficient::W1]);
    let schedule = Schedule::new(0.0, 250.0, 0.1).expect("valid schedule");
    experiment("gen", CdDriver::new(model, 0, Some(sel), CoefficientMode::Formal), schedule)
}

/// Landau-Zener sweep of the upper state: `Δ = 1`, `R: −5 → 5`, `T = 0.5`.
pub fn landau_zener() -> Experiment {
    let sel = Selection::of(&[Coefficient::Bx, Coefficient::By, Coefficient::Bz]);
    let schedule = Schedule::new(-5.0, 20.0, 0.5).expect("valid schedule");
    experiment("lz", CdDriver::new(ModelSpec::landau_zener(1.0), 1, Some(sel), CoefficientMode::Real), schedule)
}

/// Transverse Ising ground state: `J = 0.5 + 0.1R`, `B_x = 10 − R`,
/// `v̄ = 100`, `T = 0.1`, selection `{W̃₂, J̃₃}`.
pub fn transverse_ising() -> Experiment {
    let model = ModelSpec::transverse_ising(Coupling::affine(0.5, 0.1), Coupling::affine(10.0, -1.0));
    let sel = Selection::of(&[Coefficient::W2, Coefficient::J3]);
    let schedule = Schedule::new(0.0, 100.0, 0.1).expect("valid schedule");
    experiment("tfim", CdDriver::new(model, 0, Some(sel), CoefficientMode::Real), schedule)
}

pub fn by_name(name: &str) -> Option<Experiment> {
    match name {
        "qa" => Some(annealing()),
        "gen" => Some(entangler()),
        "lz" => Some(landau_zener()),
        "tfim" => Some(transverse_ising()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entangler_coupling_is_eight() {
        assert_eq!(entangler_coupling(1.0, 1.0), 8.0);
        assert_eq!(entangler().driver.model.coupling("j"), Some(Coupling::constant(8.0)));
    }

    #[test]
    fn lookup() {
        for name in ["qa", "gen", "lz", "tfim"] {
            assert_eq!(by_name(name).unwrap().name, name);
        }
        assert!(by_name("xx").is_none());
    }
}
