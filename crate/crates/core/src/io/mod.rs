//! Run configuration, field and history output, and run orchestration.

mod config;
mod vtk;

pub use config::{
    apply_overrides, from_value, load_config, parse_config, parse_config_with, Component, ConfigError, DisplacementBc,
    MaterialEntry, MeshSource, OutputConfig, RunConfig, TemperatureBc,
};
pub use vtk::{vtk_string, write_vtk};

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::solver::{RunError, RunOutput, RunRecord, Staggered, SolverError};

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("field `{name}` has length {len}, expected {expected}")]
    FieldLength { name: &'static str, len: usize, expected: usize },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> OutputError + '_ {
    move |source| OutputError::Io { path: path.to_path_buf(), source }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(path))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| OutputError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

pub const CSV_HEADER: &str = "t,u_app,T_app,Fx,Fy,inner_iters,rel_err";

pub fn csv_string(records: &[RunRecord]) -> Result<String, OutputError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        return Ok(format!("{CSV_HEADER}\n"));
    }
    let bytes = w.into_inner().map_err(|e| OutputError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn write_csv(records: &[RunRecord], path: &Path) -> Result<(), OutputError> {
    write_atomic(path, csv_string(records)?.as_bytes())
}

pub fn read_csv(path: &Path) -> Result<Vec<RunRecord>, OutputError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<RunRecord>, _>>()?)
}

#[derive(Debug, Serialize)]
struct MeshStats {
    nodes: usize,
    elements: usize,
    boundary_edges: usize,
    area: f64,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    program: &'static str,
    version: &'static str,
    config: &'a RunConfig,
    mesh: MeshStats,
    steps: usize,
    threads: usize,
    setup_seconds: f64,
    history: &'static str,
    summary: &'static str,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    steps: usize,
    wall_clock_seconds: f64,
    unconverged_steps: usize,
    s_min: f64,
    s_max: f64,
    stats: &'a [crate::solver::StepStats],
}

#[derive(Debug, Error)]
pub enum RunFailure {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl From<RunError<OutputError>> for RunFailure {
    fn from(e: RunError<OutputError>) -> Self {
        match e {
            RunError::Solver(s) => Self::Solver(s),
            RunError::Observer(o) => Self::Output(o),
        }
    }
}

/// Builds the problem from `cfg`, runs it and writes `manifest.json`,
/// `history.csv`, `summary.json` and VTK snapshots into `out_dir`.
pub fn run_to_dir(cfg: &RunConfig, base_dir: &Path, out_dir: &Path) -> Result<RunOutput, RunFailure> {
    let started = Instant::now();
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir)).map_err(RunFailure::Output)?;
    let mesh = cfg.build_mesh(base_dir)?;
    let stats = MeshStats {
        nodes: mesh.num_nodes(),
        elements: mesh.num_elements(),
        boundary_edges: mesh.boundary_edges().len(),
        area: mesh.total_area(),
    };
    let problem = cfg.build_problem(mesh)?;
    let mut solver = Staggered::new(problem, cfg.load.clone(), cfg.staggered())?;
    let manifest = Manifest {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        mesh: stats,
        steps: cfg.load.num_steps(),
        threads: rayon::current_num_threads(),
        setup_seconds: started.elapsed().as_secs_f64(),
        history: "history.csv",
        summary: "summary.json",
    };
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    write_atomic(&out_dir.join("manifest.json"), &json)?;

    let every = cfg.output.every;
    let vtk = cfg.output.vtk;
    let last = cfg.load.num_steps();
    let snapshot = |s: &Staggered, step: usize| -> Result<(), OutputError> {
        let st = &s.state;
        write_vtk(&s.problem.disc.mesh, &st.u, &st.s, &st.t, &out_dir.join(format!("fields_{step:05}.vtk")))
    };
    if vtk && every > 0 {
        snapshot(&solver, 0)?;
    }
    let output = solver.run(|s, rec, st| {
        log::info!(
            "step {:>5}  t = {:.4e}  u = {:.4e}  T = {:.3}  Fy = {:.5e}  iters = {}  s_min = {:.4}",
            st.step,
            rec.t,
            rec.u_app,
            rec.t_app,
            rec.fy,
            rec.inner_iters,
            st.s_min
        );
        if vtk && ((every > 0 && st.step % every == 0) || st.step == last) {
            snapshot(s, st.step)?;
        }
        Ok(())
    })?;
    write_csv(&output.records, &out_dir.join("history.csv"))?;
    let summary = Summary {
        steps: output.stats.len(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        unconverged_steps: output.stats.iter().filter(|s| !s.converged).count(),
        s_min: output.stats.iter().map(|s| s.s_min).fold(f64::INFINITY, f64::min),
        s_max: output.stats.iter().map(|s| s.s_max).fold(f64::NEG_INFINITY, f64::max),
        stats: &output.stats,
    };
    let json = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    write_atomic(&out_dir.join("summary.json"), &json)?;
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(k: usize) -> RunRecord {
        RunRecord { t: 0.1 * k as f64, u_app: 1e-7 * k as f64, t_app: 300.0 + 1.0 / 3.0, fx: -1.25e-3, fy: 2.0 / 7.0, inner_iters: k, rel_err: 1e-9 }
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("h.csv");
        let recs: Vec<RunRecord> = (0..4).map(record).collect();
        write_csv(&recs, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().count(), 5);
        assert_eq!(read_csv(&path).unwrap(), recs);
        assert_eq!(csv_string(&[]).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn vtk_rejects_bad_lengths() {
        let mesh = crate::mesh::generate_rect(&crate::mesh::RectSpec::new(1.0, 1.0, 1.0)).unwrap();
        let n = mesh.num_nodes();
        assert!(matches!(
            vtk_string(&mesh, &vec![0.0; n], &vec![0.0; n], &vec![0.0; n]),
            Err(OutputError::FieldLength { name: "u", .. })
        ));
        let text = vtk_string(&mesh, &vec![0.0; 2 * n], &vec![1.0; n], &vec![0.0; n]).unwrap();
        assert!(text.contains("POINTS 4 double") && text.contains("CELLS 2 8") && text.contains("SCALARS T double 1"));
    }
}
