//! Velocity profile and advanced parameter of a fast-forward run.
//!
//! `v(t) = v̄(1 − cos 2πt/T)` and `R(t) = R₀ + v̄[t − (T/2π) sin(2πt/T)]` on
//! `[0, T]`. The strict accessors reject times outside the window; the
//! `frozen_*` variants hold the terminal values (`v = 0`, `R = R₀ + v̄T`) for an
//! integrator that overruns by rounding.

use core::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    r0: f64,
    v_bar: f64,
    t_ff: f64,
}

impl Schedule {
    /// `v_bar` may be zero (a stationary run); `t_ff` must be positive.
    pub fn new(r0: f64, v_bar: f64, t_ff: f64) -> Result<Self> {
        for (what, value) in [("r0", r0), ("v_bar", v_bar), ("t_ff", t_ff)] {
            if !value.is_finite() {
                return Err(Error::Domain { what, value });
            }
        }
        if v_bar < 0.0 {
            return Err(Error::Config(alloc::format!("v_bar must be nonnegative, got {v_bar}")));
        }
        if t_ff <= 0.0 {
            return Err(Error::Config(alloc::format!("t_ff must be positive, got {t_ff}")));
        }
        Ok(Self { r0, v_bar, t_ff })
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn v_bar(&self) -> f64 {
        self.v_bar
    }

    pub fn t_ff(&self) -> f64 {
        self.t_ff
    }

    /// `R₀ + v̄T`
    pub fn r_final(&self) -> f64 {
        self.r0 + self.v_bar * self.t_ff
    }

    fn check(&self, t: f64) -> Result<()> {
        if (0.0..=self.t_ff).contains(&t) {
            Ok(())
        } else {
            Err(Error::Range { t, t_ff: self.t_ff })
        }
    }

    pub fn velocity(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.v_bar * (1.0 - (2.0 * PI * t / self.t_ff).cos()))
    }

    pub fn advanced_parameter(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        let w = 2.0 * PI / self.t_ff;
        Ok(self.r0 + self.v_bar * (t - (w * t).sin() / w))
    }

    /// Velocity, zero outside `[0, T]`.
    pub fn frozen_velocity(&self, t: f64) -> f64 {
        self.velocity(t).unwrap_or(0.0)
    }

    /// Advanced parameter, held at its endpoint values outside `[0, T]`.
    pub fn frozen_parameter(&self, t: f64) -> f64 {
        if t >= self.t_ff {
            self.r_final()
        } else if t <= 0.0 {
            self.r0
        } else {
            self.advanced_parameter(t).expect("t is inside the window")
        }
    }
}
