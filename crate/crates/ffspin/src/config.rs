//! TOML run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use ffspin_core::cdsolver::{CdDriver, CoefficientMode, Selection, Tolerances};
use ffspin_core::models::{Coupling, EigenOptions, ModelKind, ModelSpec};
use ffspin_core::presets::VELOCITY_FLOOR_FRACTION;
use ffspin_core::propagator::EvolveOptions;
use ffspin_core::schedule::Schedule;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub model: RawModel,
    pub schedule: RawSchedule,
    #[serde(default)]
    pub cd: RawCd,
    #[serde(default)]
    pub integrator: RawIntegrator,
    #[serde(default)]
    pub output: RawOutput,
    #[serde(default)]
    pub tolerances: RawTolerances,
    #[serde(default)]
    pub grid: RawGrid,
    #[serde(default)]
    pub verify: RawVerify,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub kind: String,
    #[serde(default)]
    pub n: usize,
    pub couplings: BTreeMap<String, RawCoupling>,
}

/// A number, or `{ offset, slope }` for `offset + slope·R`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum RawCoupling {
    Constant(f64),
    Affine {
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        slope: f64,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSchedule {
    #[serde(default)]
    pub r0: f64,
    pub v_bar: f64,
    pub t_ff: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCd {
    pub selection: Option<String>,
    pub mode: Option<String>,
    pub velocity_floor: Option<f64>,
    #[serde(default)]
    pub disabled: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawIntegrator {
    pub dt: Option<f64>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTolerances {
    pub cond_max: Option<f64>,
    pub imag_tol: Option<f64>,
    pub residual_max: Option<f64>,
    pub symmetry_tol: Option<f64>,
    pub cluster_tol: Option<f64>,
    pub table_residual_max: Option<f64>,
    pub gap_min: Option<f64>,
    pub anchor_min: Option<f64>,
    pub derivative_step: Option<f64>,
    pub phase_residue_max: Option<f64>,
    pub drift_max: Option<f64>,
    pub fidelity_min: Option<f64>,
    #[serde(default)]
    pub extended_basis: bool,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub points: Option<usize>,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub scope: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVerify {
    pub models: Option<Vec<String>>,
}

/// A validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub name: String,
    pub model: ModelSpec,
    pub n: usize,
    pub schedule: Schedule,
    /// `None`: use the first selection accepted in enumeration order.
    pub selection: Option<Selection>,
    pub cd_disabled: bool,
    pub mode: CoefficientMode,
    pub velocity_floor: f64,
    pub tol: Tolerances,
    pub evolve: EvolveOptions,
    pub fidelity_min: f64,
    pub out_dir: Option<PathBuf>,
    pub grid_points: usize,
    pub r_range: (f64, f64),
    pub scope: ffspin_core::cdsolver::Scope,
    pub verify_models: Vec<ModelKind>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn positive(name: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    match v {
        None => Ok(default),
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => Err(config_error(format!("tolerances.{name} must be positive, got {x}"))),
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        let name = path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
        Self::parse(&text, &name).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, name: &str) -> Result<Self, CliError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| config_error(e.to_string()))?;
        Self::from_raw(raw, name)
    }

    pub fn from_raw(raw: RawConfig, name: &str) -> Result<Self, CliError> {
        let kind = ModelKind::parse(&raw.model.kind)?;
        let named: Vec<(&str, Coupling)> = raw
            .model
            .couplings
            .iter()
            .map(|(k, c)| {
                let c = match *c {
                    RawCoupling::Constant(v) => Coupling::constant(v),
                    RawCoupling::Affine { offset, slope } => Coupling::affine(offset, slope),
                };
                (k.as_str(), c)
            })
            .collect();
        let model = ModelSpec::new(kind, &named)?;
        if raw.model.n >= kind.dim() {
            return Err(config_error(format!("model.n = {} but {} has {} levels", raw.model.n, kind, kind.dim())));
        }
        let schedule = Schedule::new(raw.schedule.r0, raw.schedule.v_bar, raw.schedule.t_ff)?;

        let selection = raw.cd.selection.as_deref().map(Selection::parse).transpose()?;
        let mode = match raw.cd.mode.as_deref() {
            None | Some("real") => CoefficientMode::Real,
            Some("formal") => CoefficientMode::Formal,
            Some(other) => return Err(config_error(format!("cd.mode must be `real` or `formal`, got `{other}`"))),
        };
        let velocity_floor = match raw.cd.velocity_floor {
            None => VELOCITY_FLOOR_FRACTION * schedule.v_bar(),
            Some(v) if v >= 0.0 && v.is_finite() => v,
            Some(v) => return Err(config_error(format!("cd.velocity_floor must be nonnegative, got {v}"))),
        };

        let t = &raw.tolerances;
        let d = Tolerances::default();
        let e = EigenOptions::default();
        let tol = Tolerances {
            cond_max: positive("cond_max", t.cond_max, d.cond_max)?,
            imag_tol: positive("imag_tol", t.imag_tol, d.imag_tol)?,
            residual_max: positive("residual_max", t.residual_max, d.residual_max)?,
            symmetry_tol: positive("symmetry_tol", t.symmetry_tol, d.symmetry_tol)?,
            cluster_tol: positive("cluster_tol", t.cluster_tol, d.cluster_tol)?,
            table_residual_max: positive("table_residual_max", t.table_residual_max, d.table_residual_max)?,
            extended_basis: t.extended_basis,
            eigen: EigenOptions {
                gap_min: positive("gap_min", t.gap_min, e.gap_min)?,
                anchor_min: positive("anchor_min", t.anchor_min, e.anchor_min)?,
                step: positive("derivative_step", t.derivative_step, e.step)?,
                phase_residue_max: positive("phase_residue_max", t.phase_residue_max, e.phase_residue_max)?,
            },
        };
        let ev = EvolveOptions::default();
        let evolve = EvolveOptions {
            dt: raw.integrator.dt,
            samples: raw.integrator.samples.unwrap_or(ev.samples),
            drift_max: positive("drift_max", t.drift_max, ev.drift_max)?,
        };
        if let Some(dt) = evolve.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(config_error(format!("integrator.dt must be positive, got {dt}")));
            }
        }
        let fidelity_min = positive("fidelity_min", t.fidelity_min, 1.0 - 1e-6)?;

        let grid_points = raw.grid.points.unwrap_or(50);
        if grid_points == 0 {
            return Err(config_error("grid.points must be at least 1"));
        }
        let r_range = (raw.grid.r_min.unwrap_or(schedule.r0()), raw.grid.r_max.unwrap_or(schedule.r_final()));
        let scope = match raw.grid.scope.as_deref() {
            None | Some("canonical") => ffspin_core::cdsolver::Scope::Canonical,
            Some("exhaustive") => ffspin_core::cdsolver::Scope::Exhaustive,
            Some(other) => {
                return Err(config_error(format!("grid.scope must be `canonical` or `exhaustive`, got `{other}`")))
            }
        };
        let verify_models = match &raw.verify.models {
            None => ModelKind::ALL.to_vec(),
            Some(names) => names.iter().map(|n| ModelKind::parse(n)).collect::<Result<_, _>>()?,
        };

        Ok(Self {
            name: name.to_owned(),
            model,
            n: raw.model.n,
            schedule,
            selection,
            cd_disabled: raw.cd.disabled,
            mode,
            velocity_floor,
            tol,
            evolve,
            fidelity_min,
            out_dir: raw.output.dir,
            grid_points,
            r_range,
            scope,
            verify_models,
        })
    }

    /// Interior midpoints of `grid_points` equal cells over the R range.
    pub fn r_grid(&self) -> Vec<f64> {
        let (lo, hi) = self.r_range;
        let n = self.grid_points;
        (0..n).map(|k| lo + (hi - lo) * (k as f64 + 0.5) / n as f64).collect()
    }

    /// The driver for a concrete selection.
    pub fn driver(&self, selection: Option<Selection>) -> CdDriver {
        let sel = if self.cd_disabled { None } else { selection };
        CdDriver::new(self.model, self.n, sel, self.mode)
            .with_tolerances(self.tol)
            .with_velocity_floor(self.velocity_floor)
    }
}
