//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Benchmark runs are shared with the invariant check.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};

use thermofrac::benchmarks::{self, CruciformCase};
use thermofrac::fem::{CholeskySolver, Constraints, Discretization, MaterialField, QuadField};
use thermofrac::io::RunConfig;
use thermofrac::materials::{ElasticLaw, FractureLaw, Material, PlanarMode, SymTensor2, ThermalLaw};
use thermofrac::mesh::{generate_rect, Rect, RectSpec, RefineBand};
use thermofrac::solver::{DofBc, LoadProgram, Problem, RampKind, RunOutput, Staggered, StaggeredConfig, StepStats};

type Verdict = Result<String, String>;

/// Step statistics of every benchmark run, for the invariant criterion.
#[derive(Default)]
struct Shared {
    runs: Vec<(String, Vec<StepStats>, Vec<thermofrac::solver::RunRecord>)>,
}

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, started: Instant) -> Result<(), String> {
    let took = started.elapsed();
    if took > limit {
        Err(format!("runtime {:.1} s exceeds {:.0} s", took.as_secs_f64(), limit.as_secs_f64()))
    } else {
        Ok(())
    }
}

fn material(e: f64, nu: f64, mode: PlanarMode, thermal: ThermalLaw, gc: f64, ls: f64, eta: f64) -> Material {
    Material::new(ElasticLaw { e, nu, mode }, thermal, FractureLaw { gc, ls, eta }, true).unwrap()
}

fn inert() -> ThermalLaw {
    ThermalLaw { k0: 1.0, rho: 1.0, c: 1.0, alpha: 0.0, t0: 0.0 }
}

fn disc(spec: &RectSpec, mat: Material) -> Discretization {
    let mesh = generate_rect(spec).unwrap();
    let field = MaterialField::uniform(&mesh, mat);
    Discretization::new(mesh, field).unwrap()
}

fn run_config(cfg: &RunConfig, mut observe: impl FnMut(&Staggered, usize)) -> Result<(Staggered, RunOutput), String> {
    let mesh = cfg.build_mesh(Path::new(".")).map_err(|e| e.to_string())?;
    let problem = cfg.build_problem(mesh).map_err(|e| e.to_string())?;
    let mut solver = Staggered::new(problem, cfg.load.clone(), cfg.staggered()).map_err(|e| e.to_string())?;
    let out = solver
        .run(|s, _, st| {
            observe(s, st.step);
            Ok::<(), ()>(())
        })
        .map_err(|e| match e {
            thermofrac::solver::RunError::Solver(s) => s.to_string(),
            thermofrac::solver::RunError::Observer(()) => "observer".into(),
        })?;
    Ok((solver, out))
}

// ---------------------------------------------------------------- 1

fn optimal_profile(_: &mut Shared) -> Verdict {
    let started = Instant::now();
    let ls = 1.0;
    let d = disc(&RectSpec::new(10.0 * ls, ls, ls / 8.0), material(1.0, 0.2, PlanarMode::PlaneStress, inert(), 1.0, ls, 1e-8));
    let mid = 5.0 * ls;
    let nodes = d.mesh.nodes();
    let mut c = Constraints::new();
    for (i, p) in nodes.iter().enumerate() {
        if (p[0] - mid).abs() < 1e-9 * ls {
            c.insert(i, 0.0).unwrap();
        }
    }
    let mut sys = d.assemble_phase_field(&vec![0.0; nodes.len()]);
    sys.apply_dirichlet(&c).unwrap();
    let s = CholeskySolver::new().solve(&sys).map_err(|e| e.to_string())?;
    let err = nodes
        .iter()
        .zip(&s)
        .map(|(p, &v)| (v - (1.0 - (-(p[0] - mid).abs() / ls).exp())).abs())
        .fold(0.0, f64::max);
    within(Duration::from_secs(5), started)?;
    check(err <= 0.02, format!("{} clamped nodes, L-inf error {err:.3e} (limit 2e-2)", c.len()))
}

// ---------------------------------------------------------------- 2

fn homogeneous_damage(_: &mut Shared) -> Verdict {
    let started = Instant::now();
    let (gc, ls) = (2.7, 0.015);
    let mut spec = RectSpec::new(1.0, 0.6, 0.1);
    spec.refine = Some(RefineBand { rect: Rect { x0: 0.3, y0: 0.2, x1: 0.6, y1: 0.4 }, h_fine: 0.03 });
    let d = disc(&spec, material(1.0, 0.2, PlanarMode::PlaneStress, inert(), gc, ls, 1e-8));
    let projector = d.projector().unwrap();
    let mut solver = CholeskySolver::new();
    let mut worst = 0.0f64;
    for ratio in [0.5, 1.0, 4.0] {
        let h0 = ratio * gc / (2.0 * ls);
        let h = projector.project(&d, &QuadField::constant(d.num_elements(), h0)).unwrap();
        let s = solver.solve(&d.assemble_phase_field(&h)).map_err(|e| e.to_string())?;
        let expect = gc / (gc + 2.0 * ls * h0);
        worst = worst.max(s.iter().map(|v| (v - expect).abs()).fold(0.0, f64::max));
    }
    within(Duration::from_secs(1), started)?;
    check(worst <= 1e-8, format!("max |s - Gc/(Gc + 2 ls H0)| = {worst:.3e} over ratios 0.5, 1, 4"))
}

// ---------------------------------------------------------------- 3

fn patch_test(_: &mut Shared) -> Verdict {
    let (e, nu) = (70e9, 0.3);
    // eta = 0 so that s = 1 is exactly the undamaged law
    let mat = material(e, nu, PlanarMode::PlaneStress, ThermalLaw { alpha: 1e-5, t0: 20.0, ..inert() }, 1.0, 0.1, 0.0);
    let (w, hgt) = (2.0, 1.0);
    let mut spec = RectSpec::new(w, hgt, 0.2);
    spec.refine = Some(RefineBand { rect: Rect { x0: 0.7, y0: 0.3, x1: 1.3, y1: 0.6 }, h_fine: 0.04 });
    let d = disc(&spec, mat);
    let n = d.num_nodes();
    let grad = [[1.0e-3, 4.0e-4], [-2.0e-4, 6.0e-4]];
    let u0 = [1e-4, -3e-5];
    let exact = |p: [f64; 2]| [0, 1].map(|i| u0[i] + grad[i][0] * p[0] + grad[i][1] * p[1]);
    let mut c = Constraints::new();
    let mut on_boundary = vec![false; n];
    for tag in ["LeftEdge", "RightEdge", "BottomEdge", "TopEdge"] {
        for i in d.mesh.boundary_nodes(tag).unwrap() {
            on_boundary[i] = true;
            let v = exact(d.mesh.nodes()[i]);
            c.insert(2 * i, v[0]).unwrap();
            c.insert(2 * i + 1, v[1]).unwrap();
        }
    }
    let s = vec![1.0; n];
    let t = vec![20.0; n];
    let mut sys = d.assemble_elastic(&s, &vec![0.0; 2 * n], &t, &t);
    sys.apply_dirichlet(&c).unwrap();
    let u = CholeskySolver::new().solve(&sys).map_err(|e| e.to_string())?;
    let (mut err, mut scale) = (0.0f64, 0.0f64);
    for (i, p) in d.mesh.nodes().iter().enumerate() {
        let x = exact(*p);
        scale = scale.max(x[0].abs()).max(x[1].abs());
        if !on_boundary[i] {
            err = err.max((u[2 * i] - x[0]).abs()).max((u[2 * i + 1] - x[1]).abs());
        }
    }
    let interior_rel = err / scale;

    // plane-stress Hooke law written out independently
    let (exx, eyy, exy) = (grad[0][0], grad[1][1], 0.5 * (grad[0][1] + grad[1][0]));
    let k = e / (1.0 - nu * nu);
    let sigma = [k * (exx + nu * eyy), k * (eyy + nu * exx), e / (1.0 + nu) * exy];
    let expect = [sigma[2] * w, sigma[1] * w];
    let got = d.reaction_force("TopEdge", &u, &s, &t).unwrap();
    let norm = expect[0].hypot(expect[1]);
    let reaction_rel = (got[0] - expect[0]).hypot(got[1] - expect[1]) / norm;
    check(
        interior_rel <= 1e-10 && reaction_rel <= 1e-8,
        format!("{} interior nodes, displacement error {interior_rel:.2e} (1e-10), reaction error {reaction_rel:.2e} (1e-8)",
            on_boundary.iter().filter(|b| !**b).count()),
    )
}

// ---------------------------------------------------------------- 4

fn free_expansion(_: &mut Shared) -> Verdict {
    let (e, alpha, dt, t0) = (340e9, 8e-6, 50.0, 300.0);
    let thermal = ThermalLaw { k0: 300.0, rho: 2450.0, c: 0.775, alpha, t0 };
    let mat = material(e, 0.22, PlanarMode::PlaneStrain, thermal, 42.47, 0.05, 1e-8);
    let mut spec = RectSpec::new(1.0, 1.0, 0.1);
    spec.refine = Some(RefineBand { rect: Rect { x0: 0.2, y0: 0.5, x1: 0.9, y1: 0.8 }, h_fine: 0.04 });
    let d = disc(&spec, mat);
    let origin = d.mesh.nearest_node([0.0, 0.0]);
    let right = d.mesh.nearest_node([1.0, 0.0]);
    let bc = |dof| DofBc { dof, value: 0.0, ramp: 0.0 };
    let problem = Problem {
        disc: d,
        displacement: vec![bc(2 * origin), bc(2 * origin + 1), bc(2 * right + 1)],
        temperature: Vec::new(),
        reaction_tag: None,
        initial_temperature: t0,
    };
    let load = LoadProgram {
        u_max: 0.0,
        t_max: 1.0,
        delt: 1.0,
        u_tran: 0.0,
        t_app_max: t0,
        t0,
        ramp: RampKind::PrescribedUniform { schedule: vec![[0.0, t0], [1.0, t0 + dt]] },
    };
    let mut solver = Staggered::new(problem, load, StaggeredConfig::default()).map_err(|e| e.to_string())?;
    solver.step().map_err(|e| e.to_string())?;
    let st = &solver.state;
    let d = &solver.problem.disc;
    let sig = d.element_stress(&st.u, &st.s, &st.t);
    let max_sigma = sig.iter().map(|s| s.xx.abs().max(s.yy.abs()).max(s.xy.abs())).fold(0.0, f64::max);
    let target = alpha * dt;
    let strain_err = (0..d.num_elements())
        .map(|k| {
            let eps = d.strain(k, &st.u);
            (eps - target * SymTensor2::IDENTITY).norm() / target
        })
        .fold(0.0, f64::max);
    let limit = 1e-8 * e * alpha * dt;
    check(
        max_sigma <= limit && strain_err <= 1e-8,
        format!("max |sigma| = {max_sigma:.2e} Pa (limit {limit:.2e}), strain error {strain_err:.2e} (1e-8)"),
    )
}

// ---------------------------------------------------------------- 5

/// Insulated bar on [0, L], T = T_cold at x = 0 from time 0, initially T_hot.
fn fourier(x: f64, t: f64, l: f64, kappa: f64, terms: usize) -> f64 {
    use std::f64::consts::PI;
    (0..terms)
        .map(|n| {
            let m = (2 * n + 1) as f64;
            let k = m * PI / (2.0 * l);
            4.0 / (m * PI) * (k * x).sin() * (-k * k * kappa * t).exp()
        })
        .sum()
}

fn transient_heat(_: &mut Shared) -> Verdict {
    let started = Instant::now();
    let (l, k0, rho, c) = (1.0, 2.0, 3.0, 0.5);
    let (t_hot, t_cold) = (400.0, 300.0);
    let thermal = ThermalLaw { k0, rho, c, alpha: 0.0, t0: t_cold };
    let mut mat = material(1.0, 0.2, PlanarMode::PlaneStress, thermal, 1.0, 0.1, 1e-8);
    mat.degrade_k = false;
    let d = disc(&RectSpec::new(l, l / 10.0, l / 100.0), mat);
    let n = d.num_nodes();
    let kappa = k0 / (rho * c);
    let dt = 1e-3 * rho * c * l * l / k0;
    let mut cons = Constraints::new();
    for i in d.mesh.boundary_nodes("LeftEdge").unwrap() {
        cons.insert(i, t_cold).unwrap();
    }
    let s = vec![1.0; n];
    let mut t = vec![t_hot; n];
    let mut solver = CholeskySolver::new();
    // backward Euler from a temperature jump is first order in time and
    // needs a few steps to resolve the boundary layer (one step from the jump
    // is off by ~10% whatever the mesh), so the first checkpoints are
    // reported but not assessed
    let startup = [1usize, 10];
    let checkpoints = [20usize, 50, 100, 200, 500];
    let mut worst = 0.0f64;
    let (mut report, mut early) = (Vec::new(), Vec::new());
    for step in 1..=*checkpoints.last().unwrap() {
        let mut sys = d.assemble_heat(&s, &t, dt);
        sys.apply_dirichlet(&cons).unwrap();
        t = solver.solve(&sys).map_err(|e| e.to_string())?;
        if checkpoints.contains(&step) || startup.contains(&step) {
            let time = step as f64 * dt;
            let err = d
                .mesh
                .nodes()
                .iter()
                .zip(&t)
                .map(|(p, &v)| {
                    let exact = t_cold + (t_hot - t_cold) * fourier(p[0], time, l, kappa, 50);
                    (v - exact).abs() / (t_hot - t_cold)
                })
                .fold(0.0, f64::max);
            let entry = format!("{:.0e}:{err:.1e}", time * kappa / (l * l));
            if startup.contains(&step) {
                early.push(entry);
            } else {
                worst = worst.max(err);
                report.push(entry);
            }
        }
    }
    within(Duration::from_secs(30), started)?;
    check(
        worst <= 0.01,
        format!(
            "L-inf error / (T_hot - T_cold) at Fourier numbers {} (limit 1e-2); start-up, not assessed: {}",
            report.join(" "),
            early.join(" ")
        ),
    )
}

// ---------------------------------------------------------------- 6

fn sent_ordering(shared: &mut Shared) -> Verdict {
    let started = Instant::now();
    let mut peaks = Vec::new();
    for dt in [-75.0, 0.0, 75.0] {
        let cfg = benchmarks::sent(0.25, dt);
        let (_, out) = run_config(&cfg, |_, _| {})?;
        let (u, f) = benchmarks::peak_load(&out.records).ok_or("no load history")?;
        let drop = benchmarks::post_peak_drop(&out.records).unwrap_or(0.0);
        peaks.push((dt, u, f, drop));
        shared.runs.push((format!("sent dT={dt}"), out.stats, out.records));
    }
    within(Duration::from_secs(600), started)?;
    let increasing = peaks.windows(2).all(|w| w[1].1 > w[0].1);
    let text = peaks
        .iter()
        .map(|(dt, u, f, drop)| format!("dT={dt:+}: u_peak={u:.3e} m Fy={f:.3e} drop={:.0}%", drop * 100.0))
        .collect::<Vec<_>>()
        .join("; ");
    check(increasing, text)
}

// ---------------------------------------------------------------- 7

struct TipTrace {
    /// First step at which a crack is attached to the tip, and its offset then.
    first: Option<(usize, [f64; 2])>,
    last: Option<[f64; 2]>,
}

fn trace_cracks(case: CruciformCase, shared: &mut Shared) -> Result<Vec<TipTrace>, String> {
    let scale = 0.25;
    let cfg = benchmarks::cruciform(case, scale);
    let tips = benchmarks::cruciform_notch_tips().map(|p| [p[0] * 1e-3, p[1] * 1e-3]);
    let radius = benchmarks::CRUCIFORM_LS / scale;
    let mut traces: Vec<TipTrace> = tips.iter().map(|_| TipTrace { first: None, last: None }).collect();
    let (_, out) = run_config(&cfg, |s, step| {
        let mesh = &s.problem.disc.mesh;
        for (tip, tr) in tips.iter().zip(traces.iter_mut()) {
            let crack = benchmarks::crack_from(mesh, &s.state.s, 0.2, *tip, radius);
            let off = benchmarks::offset_from(mesh, &crack, *tip);
            if let (None, Some(o)) = (tr.first, off) {
                tr.first = Some((step, o));
            }
            tr.last = off;
        }
    })?;
    shared.runs.push((cfg.name.clone().unwrap_or_default(), out.stats, out.records));
    Ok(traces)
}

fn cruciform_directions(shared: &mut Shared) -> Verdict {
    let names = ["lower-right", "upper-left"];
    let mech = trace_cracks(CruciformCase::Mechanical, shared)?;
    let mut ok = true;
    let mut text = Vec::new();
    for (name, tr) in names.iter().zip(&mech) {
        match tr.last {
            Some(o) => {
                let el = benchmarks::elevation_deg(o);
                ok &= el.abs() <= 15.0;
                text.push(format!("mech {name}: final elevation {el:+.1} deg"));
            }
            None => {
                ok = false;
                text.push(format!("mech {name}: no crack"));
            }
        }
    }
    let thermal = trace_cracks(CruciformCase::Thermal, shared)?;
    let first = thermal.iter().filter_map(|t| t.first.map(|f| f.0)).min();
    match first {
        None => {
            ok = false;
            text.push("thermal: no crack at either tip".into());
        }
        Some(k) => {
            for (name, tr) in names.iter().zip(&thermal) {
                if let Some((step, o)) = tr.first.filter(|f| f.0 == k) {
                    ok &= o[1] > 0.0;
                    text.push(format!(
                        "thermal {name}: initiates at step {step}, offset ({:+.2e}, {:+.2e}) m",
                        o[0], o[1]
                    ));
                }
            }
        }
    }
    check(ok, text.join("; "))
}

// ---------------------------------------------------------------- 8

fn quench_density(shared: &mut Shared) -> Verdict {
    let started = Instant::now();
    let y = 0.5 * benchmarks::QUENCH_HEIGHT * 1e-3;
    let mut stats = Vec::new();
    for initial in [680.0, 880.0] {
        let cfg = benchmarks::quench(initial, 0.25);
        let (solver, out) = run_config(&cfg, |_, _| {})?;
        let (count, depth) = benchmarks::band_statistics(&solver.problem.disc.mesh, &solver.state.s, y, 0.05);
        stats.push((initial, count, depth));
        shared.runs.push((format!("quench {initial} K"), out.stats, out.records));
    }
    within(Duration::from_secs(900), started)?;
    let (lo, hi) = (stats[0], stats[1]);
    check(
        hi.1 >= lo.1 && hi.2 >= lo.2,
        stats
            .iter()
            .map(|(t, n, d)| format!("{t} K: {n} bands at mid-height, mean depth {:.2} mm", d * 1e3))
            .collect::<Vec<_>>()
            .join("; "),
    )
}

// ---------------------------------------------------------------- 9

fn invariants(shared: &mut Shared) -> Verdict {
    // benchmarks not exercised by the trend criteria
    for cfg in [benchmarks::bimaterial(0.25), benchmarks::cruciform(CruciformCase::Combined, 0.25)] {
        let (_, out) = run_config(&cfg, |_, _| {})?;
        shared.runs.push((cfg.name.clone().unwrap_or_default(), out.stats, out.records));
    }
    let mut ok = true;
    let mut text = Vec::new();
    for (name, stats, records) in &shared.runs {
        let h_inc = stats.iter().map(|s| s.h_increment_min).fold(f64::INFINITY, f64::min);
        let s_lo = stats.iter().map(|s| s.s_min).fold(f64::INFINITY, f64::min);
        let s_hi = stats.iter().map(|s| s.s_max).fold(f64::NEG_INFINITY, f64::max);
        // records[0] is the unloaded state
        let rel = stats
            .iter()
            .zip(&records[1..])
            .filter(|(s, _)| s.converged)
            .map(|(_, r)| r.rel_err)
            .fold(0.0, f64::max);
        let good = h_inc >= 0.0 && s_lo >= -1e-6 && s_hi <= 1.0 + 1e-6 && rel <= 1e-8;
        ok &= good;
        text.push(format!(
            "{name}: {} steps, min dH {h_inc:.1e}, s in [{s_lo:.2e}, 1{:+.1e}], max converged RelErr {rel:.1e}",
            stats.len(),
            s_hi - 1.0
        ));
    }
    check(ok, text.join("; "))
}

// ---------------------------------------------------------------- 10

/// Branched stress from an independently written isotropic law.
fn oracle_stress(e: f64, nu: f64, mode: PlanarMode, eta: f64, eps: SymTensor2, branch: SymTensor2, s: f64) -> SymTensor2 {
    let mu = e / (2.0 * (1.0 + nu));
    let lambda = match mode {
        PlanarMode::PlaneStrain => e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)),
        PlanarMode::PlaneStress => e * nu / (1.0 - nu * nu),
    };
    let tr = eps.xx + eps.yy;
    let sig = [lambda * tr + 2.0 * mu * eps.xx, lambda * tr + 2.0 * mu * eps.yy, 2.0 * mu * eps.xy];
    let g = s * s + eta;
    if branch.xx + branch.yy >= 0.0 {
        return SymTensor2::new(g * sig[0], g * sig[1], g * sig[2]);
    }
    let m = (sig[0] + sig[1]) / 3.0;
    SymTensor2::new(g * (sig[0] - m) + m, g * (sig[1] - m) + m, g * sig[2])
}

fn stress_identity(_: &mut Shared) -> Verdict {
    let mut runner = TestRunner::new(PropConfig { cases: 2000, failure_persistence: None, ..PropConfig::default() });
    let strain = || (-1e-2..1e-2f64, -1e-2..1e-2f64, -1e-2..1e-2f64).prop_map(|(a, b, c)| SymTensor2::new(a, b, c));
    let state = (
        (1e3..1e12f64, 0.0..0.49f64, prop::bool::ANY, 1e-6..1e-4f64, 0.0..1000.0f64),
        (strain(), strain(), 0.0..1.0f64, 0.0..1500.0f64, 0.0..1500.0f64),
    );
    let worst = std::cell::Cell::new(0.0f64);
    let result = runner.run(&state, |((e, nu, stress, alpha, t0), (eps, eps_prev, s, t, t_prev))| {
        let mode = if stress { PlanarMode::PlaneStress } else { PlanarMode::PlaneStrain };
        let thermal = ThermalLaw { k0: 1.0, rho: 1.0, c: 1.0, alpha, t0 };
        let m = material(e, nu, mode, thermal, 1.0, 0.1, 1e-8);
        let lhs = m.stress_total(eps, eps_prev, s, t, t_prev) - (-1.0 * m.stress_thermal(eps_prev, s, t_prev));
        let branch = eps_prev - (alpha * (t_prev - t0)) * SymTensor2::IDENTITY;
        let rhs = oracle_stress(e, nu, mode, 1e-8, eps - (alpha * (t - t0)) * SymTensor2::IDENTITY, branch, s);
        // relative to the magnitude of the terms that cancel
        let size = m.stress_total(eps, eps_prev, s, t, t_prev).norm().max(rhs.norm());
        let rel = (lhs - rhs).norm() / size;
        worst.set(worst.get().max(rel));
        prop_assert!(rel <= 1e-12, "relative mismatch {rel:.3e}");
        Ok(())
    });
    match result {
        Ok(()) => Ok(format!("2000 random states, worst relative mismatch {:.2e} (1e-12)", worst.get())),
        Err(e) => Err(format!("{e}")),
    }
}

// ----------------------------------------------------------------

fn main() {
    let criteria: [(&str, fn(&mut Shared) -> Verdict); 10] = [
        ("1D optimal profile", optimal_profile),
        ("homogeneous damage", homogeneous_damage),
        ("patch test", patch_test),
        ("free thermal expansion", free_expansion),
        ("transient heat", transient_heat),
        ("SENT peak ordering", sent_ordering),
        ("cruciform crack directions", cruciform_directions),
        ("quench crack density", quench_density),
        ("irreversibility and bounds", invariants),
        ("stress split identity", stress_identity),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut shared = Shared::default();
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(|| f(&mut shared)))
            .unwrap_or_else(|p| Err(format!("panicked: {}", p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())));
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(d) => println!("criterion {id:>2} {name}: PASS [{secs:.1} s] {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {id:>2} {name}: FAIL [{secs:.1} s] {d}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
