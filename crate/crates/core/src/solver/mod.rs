//! Load programs and the staggered phase-field / thermo-elastic time loop.
//!
//! Each load step runs up to `inner_max` passes of: project the history
//! field, measure the phase-field residual of the previous iterate, solve
//! the phase field, solve heat then displacement, and raise the history
//! field to the new tensile energy.

mod load;

pub use load::{ramp_linear, ramp_smooth, LoadProgram, RampKind};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fem::{CholeskySolver, Constraints, Discretization, Projector, QuadField, SolveError};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("step {step}: {stage} solve failed: {source}")]
    Solve { step: usize, stage: &'static str, source: SolveError },
    #[error("phase-field residual undefined: the linear form vanishes (fully cracked domain?)")]
    ZeroDenominator,
    #[error("{0}")]
    Setup(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StaggeredConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_inner_max")]
    pub inner_max: usize,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_inner_max() -> usize {
    10
}

impl Default for StaggeredConfig {
    fn default() -> Self {
        Self { tol: default_tol(), inner_max: default_inner_max() }
    }
}

/// A prescribed dof: `value + ramp * load`, where the load is the applied
/// displacement (mechanical dofs) or `TApp - T0` (temperature dofs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofBc {
    pub dof: usize,
    pub value: f64,
    pub ramp: f64,
}

pub struct Problem {
    pub disc: Discretization,
    /// Displacement constraints on interleaved `(u1, u2)` dofs.
    pub displacement: Vec<DofBc>,
    /// Temperature constraints on node ids.
    pub temperature: Vec<DofBc>,
    /// Boundary tag on which the reaction force is integrated.
    pub reaction_tag: Option<String>,
    /// Initial temperature of the body.
    pub initial_temperature: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub u: Vec<f64>,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    pub h: QuadField,
    pub time: f64,
    pub step: usize,
}

/// One row of the load-displacement history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub t: f64,
    pub u_app: f64,
    #[serde(rename = "T_app")]
    pub t_app: f64,
    #[serde(rename = "Fx")]
    pub fx: f64,
    #[serde(rename = "Fy")]
    pub fy: f64,
    pub inner_iters: usize,
    pub rel_err: f64,
}

/// Per-step diagnostics beyond the recorded history.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepStats {
    pub step: usize,
    pub converged: bool,
    pub s_min: f64,
    pub s_max: f64,
    pub h_max: f64,
    /// Smallest pointwise history increment over the step (never negative).
    pub h_increment_min: f64,
    pub entropy_production: Option<f64>,
}

/// `|a(s, s) - b(s)| / |b(s)|` of the phase-field forms for history `h`.
pub fn rel_err(disc: &Discretization, s: &[f64], h: &[f64]) -> Result<f64, SolverError> {
    let (a, b) = disc.phase_field_energy(s, h);
    if b == 0.0 || !b.is_finite() {
        return Err(SolverError::ZeroDenominator);
    }
    Ok(((a - b) / b).abs())
}

/// Pointwise maximum; returns the smallest increment applied.
pub fn update_history(h: &mut QuadField, psi: &QuadField) -> f64 {
    let mut min_inc = f64::INFINITY;
    for (hv, &p) in h.values.iter_mut().zip(&psi.values) {
        let new = hv.max(p);
        min_inc = min_inc.min(new - *hv);
        *hv = new;
    }
    min_inc
}

fn constraints(bcs: &[DofBc], load: f64) -> Result<Constraints, SolveError> {
    let mut c = Constraints::new();
    for bc in bcs {
        c.insert(bc.dof, bc.value + bc.ramp * load)?;
    }
    Ok(c)
}

/// Staggered solver owning the state of one run.
pub struct Staggered {
    pub problem: Problem,
    pub program: LoadProgram,
    pub config: StaggeredConfig,
    pub state: SimState,
    projector: Projector,
    pf_solver: CholeskySolver,
    heat_solver: CholeskySolver,
    elastic_solver: CholeskySolver,
}

impl Staggered {
    pub fn new(problem: Problem, program: LoadProgram, config: StaggeredConfig) -> Result<Self, SolverError> {
        program.validate().map_err(SolverError::Setup)?;
        if !(config.tol > 0.0) || config.inner_max == 0 {
            return Err(SolverError::Setup("staggered: tol must be > 0 and inner_max >= 1".into()));
        }
        let disc = &problem.disc;
        let (nn, ne) = (disc.num_nodes(), disc.num_elements());
        let t_init = if program.is_uniform() { program.temperature(0.0) } else { problem.initial_temperature };
        let state = SimState {
            u: vec![0.0; 2 * nn],
            s: vec![1.0; nn],
            t: vec![t_init; nn],
            h: QuadField::constant(ne, 0.0),
            time: 0.0,
            step: 0,
        };
        let projector = disc
            .projector()
            .map_err(|source| SolverError::Solve { step: 0, stage: "mass matrix", source })?;
        Ok(Self {
            problem,
            program,
            config,
            state,
            projector,
            pf_solver: CholeskySolver::new(),
            heat_solver: CholeskySolver::new(),
            elastic_solver: CholeskySolver::new(),
        })
    }

    /// Record for the unloaded initial state.
    pub fn initial_record(&self) -> RunRecord {
        RunRecord {
            t: 0.0,
            u_app: 0.0,
            t_app: self.state.t.first().copied().unwrap_or(self.program.t0),
            fx: 0.0,
            fy: 0.0,
            inner_iters: 0,
            rel_err: 0.0,
        }
    }

    pub fn reaction(&self) -> Result<[f64; 2], SolverError> {
        match &self.problem.reaction_tag {
            None => Ok([0.0; 2]),
            Some(tag) => {
                let st = &self.state;
                self.problem
                    .disc
                    .reaction_force(tag, &st.u, &st.s, &st.t)
                    .map_err(|e| SolverError::Setup(e.to_string()))
            }
        }
    }

    /// Advances one load step.
    pub fn step(&mut self) -> Result<(RunRecord, StepStats), SolverError> {
        let k = self.state.step + 1;
        let fail = |stage: &'static str| move |source| SolverError::Solve { step: k, stage, source };
        let time = self.program.time(k);
        let v_app = self.program.displacement(time);
        let t_app = self.program.temperature(time);
        let disc = &self.problem.disc;
        let uniform = self.program.is_uniform();

        let cu = constraints(&self.problem.displacement, v_app).map_err(fail("displacement constraint"))?;
        let ct = constraints(&self.problem.temperature, t_app - self.program.t0).map_err(fail("temperature constraint"))?;
        let t_old = self.state.t.clone();
        let h_start = self.state.h.clone();

        let mut iters = 0;
        let mut err = f64::NAN;
        let mut converged = false;
        for _ in 0..self.config.inner_max {
            iters += 1;
            let mut h_nodal = self.projector.project(disc, &self.state.h).map_err(fail("history projection"))?;
            // the L2 projection of a piecewise-constant field undershoots next
            // to steep fronts; negative history would make the system indefinite
            h_nodal.iter_mut().for_each(|v| *v = v.max(0.0));
            err = rel_err(disc, &self.state.s, &h_nodal)?;

            let pf = disc.assemble_phase_field(&h_nodal);
            self.state.s = self.pf_solver.solve(&pf).map_err(fail("phase-field"))?;

            let t_new = if uniform {
                vec![t_app; disc.num_nodes()]
            } else {
                let mut heat = disc.assemble_heat(&self.state.s, &t_old, self.program.delt);
                heat.apply_dirichlet(&ct).map_err(fail("heat"))?;
                self.heat_solver.solve(&heat).map_err(fail("heat"))?
            };

            let mut el = disc.assemble_elastic(&self.state.s, &self.state.u, &self.state.t, &t_new);
            el.apply_dirichlet(&cu).map_err(fail("displacement"))?;
            self.state.u = self.elastic_solver.solve(&el).map_err(fail("displacement"))?;
            self.state.t = t_new;

            let psi = disc.psi_plus(&self.state.u, &self.state.t);
            update_history(&mut self.state.h, &psi);

            if err < self.config.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            log::info!("step {k}: inner loop stopped after {iters} passes, RelErr = {err:.3e}");
        }
        self.state.time = time;
        self.state.step = k;

        let [fx, fy] = self.reaction()?;
        let st = &self.state;
        let h_increment_min = st
            .h
            .values
            .iter()
            .zip(&h_start.values)
            .map(|(a, b)| a - b)
            .fold(f64::INFINITY, f64::min);
        let stats = StepStats {
            step: k,
            converged,
            s_min: st.s.iter().copied().fold(f64::INFINITY, f64::min),
            s_max: st.s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            h_max: st.h.values.iter().copied().fold(0.0, f64::max),
            h_increment_min,
            entropy_production: disc.entropy_production(&st.s, &st.t),
        };
        let record = RunRecord { t: time, u_app: v_app, t_app, fx, fy, inner_iters: iters, rel_err: err };
        Ok((record, stats))
    }

    /// Runs all load steps. `observe` sees the state after every step and may
    /// abort the run by returning an error.
    pub fn run<E>(
        &mut self,
        mut observe: impl FnMut(&Self, &RunRecord, &StepStats) -> Result<(), E>,
    ) -> Result<RunOutput, RunError<E>> {
        let mut out = RunOutput { records: vec![self.initial_record()], stats: Vec::new() };
        for _ in 0..self.program.num_steps() {
            let (record, stats) = self.step().map_err(RunError::Solver)?;
            observe(self, &record, &stats).map_err(RunError::Observer)?;
            out.records.push(record);
            out.stats.push(stats);
        }
        Ok(out)
    }
}

#[derive(Debug, Error)]
pub enum RunError<E> {
    #[error(transparent)]
    Solver(SolverError),
    #[error("output: {0}")]
    Observer(E),
}

#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub stats: Vec<StepStats>,
}
