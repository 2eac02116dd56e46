use serde::{Deserialize, Serialize};

/// How the applied boundary temperature follows the applied displacement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RampKind {
    /// Gaussian-mollified step from `T0` to `TAppMax`.
    Smooth,
    /// Linear up to `u_tran`, then constant.
    Linear,
    /// Applied temperature stays at `T0`.
    None,
    /// Uniform temperature over the whole body, piecewise linear in time
    /// through `[t, T]` pairs; the heat equation is not solved.
    PrescribedUniform { schedule: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadProgram {
    pub u_max: f64,
    pub t_max: f64,
    pub delt: f64,
    #[serde(default)]
    pub u_tran: f64,
    #[serde(rename = "T_app_max")]
    pub t_app_max: f64,
    #[serde(rename = "T0")]
    pub t0: f64,
    pub ramp: RampKind,
}

impl LoadProgram {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.delt > 0.0 && self.delt <= self.t_max * (1.0 + 1e-12)) {
            return Err(format!("load.delt = {} must lie in (0, t_max = {}]", self.delt, self.t_max));
        }
        if !(self.u_max.is_finite() && self.t_app_max.is_finite() && self.t0.is_finite()) {
            return Err("load: u_max, T_app_max and T0 must be finite".into());
        }
        if !(self.u_tran >= 0.0 && self.u_tran <= self.u_max.abs()) {
            return Err(format!("load.u_tran = {} must lie in [0, |u_max|]", self.u_tran));
        }
        if let RampKind::PrescribedUniform { schedule } = &self.ramp {
            if schedule.is_empty() {
                return Err("load.ramp.schedule must not be empty".into());
            }
            if schedule.windows(2).any(|w| w[1][0] <= w[0][0]) {
                return Err("load.ramp.schedule times must be strictly increasing".into());
            }
        }
        Ok(())
    }

    /// Number of load steps.
    pub fn num_steps(&self) -> usize {
        (self.t_max / self.delt + 1e-9).floor() as usize
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.delt
    }

    /// Applied displacement at time `t`.
    pub fn displacement(&self, t: f64) -> f64 {
        self.u_max * t / self.t_max
    }

    /// Applied boundary temperature at time `t` (uniform body temperature in
    /// prescribed mode).
    pub fn temperature(&self, t: f64) -> f64 {
        let u = self.displacement(t);
        match &self.ramp {
            RampKind::Smooth => ramp_smooth(u, self),
            RampKind::Linear => ramp_linear(u, self),
            RampKind::None => self.t0,
            RampKind::PrescribedUniform { schedule } => schedule_value(schedule, t),
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.ramp, RampKind::PrescribedUniform { .. })
    }
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Closed form of the step `(T0 - TAppMax)` on `[-4 hS, uTran]` convolved with
/// a Gaussian of width `hS = uMax / 10`, plus `TAppMax`.
pub fn ramp_smooth(u_app: f64, prog: &LoadProgram) -> f64 {
    let hs = prog.u_max / 10.0;
    if hs == 0.0 {
        return prog.t_app_max;
    }
    let weight = normal_cdf((u_app + 4.0 * hs) / hs) - normal_cdf((u_app - prog.u_tran) / hs);
    prog.t_app_max + (prog.t0 - prog.t_app_max) * weight
}

pub fn ramp_linear(u_app: f64, prog: &LoadProgram) -> f64 {
    if prog.u_tran == 0.0 || u_app > prog.u_tran {
        prog.t_app_max
    } else {
        (prog.t_app_max - prog.t0) / prog.u_tran * u_app + prog.t0
    }
}

fn schedule_value(schedule: &[[f64; 2]], t: f64) -> f64 {
    let first = schedule[0];
    let last = schedule[schedule.len() - 1];
    if t <= first[0] {
        return first[1];
    }
    if t >= last[0] {
        return last[1];
    }
    let k = schedule.partition_point(|p| p[0] <= t);
    let (a, b) = (schedule[k - 1], schedule[k]);
    a[1] + (b[1] - a[1]) * (t - a[0]) / (b[0] - a[0])
}
