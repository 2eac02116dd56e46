//! Built-in benchmark problems and crack-pattern diagnostics.
//!
//! Geometries are written in millimetres (`unit_scale = 1e-3`); material and
//! load data are SI. `scale` in (0, 1] coarsens a run: the length scale and
//! every element size are divided by it, so `h <= ls/2` keeps holding.

use crate::io::{Component, DisplacementBc, MaterialEntry, MeshSource, OutputConfig, RunConfig, TemperatureBc};
use crate::materials::{ElasticLaw, FractureLaw, PlanarMode, ThermalLaw};
use crate::mesh::{Mesh, NamedRect, Point, Polygon, Rect, RectSpec, RefineBand};
use crate::solver::{LoadProgram, RampKind, RunRecord, StaggeredConfig};

pub const EXAMPLES: [&str; 7] =
    ["cruciform-mech", "cruciform-thermal", "cruciform-combined", "sent", "bimaterial", "quench-680", "quench-880"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CruciformCase {
    Mechanical,
    Thermal,
    Combined,
}

/// Built-in configuration by name.
pub fn example(name: &str, scale: f64) -> Result<RunConfig, String> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(format!("scale = {scale} must lie in (0, 1]"));
    }
    Ok(match name {
        "cruciform-mech" => cruciform(CruciformCase::Mechanical, scale),
        "cruciform-thermal" => cruciform(CruciformCase::Thermal, scale),
        "cruciform-combined" => cruciform(CruciformCase::Combined, scale),
        "sent" => sent(scale, 50.0),
        "bimaterial" => bimaterial(scale),
        "quench-680" => quench(680.0, scale),
        "quench-880" => quench(880.0, scale),
        _ => return Err(format!("unknown example `{name}`; valid names: {}", EXAMPLES.join(", "))),
    })
}

fn material(region: Option<&str>, elastic: ElasticLaw, thermal: ThermalLaw, gc: f64, ls: f64) -> MaterialEntry {
    MaterialEntry {
        region: region.map(str::to_string),
        elastic,
        thermal,
        fracture: FractureLaw { gc, ls, eta: 1e-8 },
        degrade_k: true,
    }
}

fn ubc(tag: &str, component: Component, ramp: f64) -> DisplacementBc {
    DisplacementBc { tag: Some(tag.into()), point: None, component, value: 0.0, ramp }
}

fn upoint(point: Point, component: Component) -> DisplacementBc {
    DisplacementBc { tag: None, point: Some(point), component, value: 0.0, ramp: 0.0 }
}

fn tbc(tag: &str, value: Option<f64>, ramp: f64) -> TemperatureBc {
    TemperatureBc { tag: Some(tag.into()), point: None, value, ramp }
}

fn base(name: String, spec: RectSpec, materials: Vec<MaterialEntry>, load: LoadProgram) -> RunConfig {
    RunConfig {
        name: Some(name),
        mesh: MeshSource::Generate(spec),
        unit_scale: 1e-3,
        materials,
        displacement_bcs: Vec::new(),
        temperature_bcs: Vec::new(),
        load,
        staggered: StaggeredConfig::default(),
        initial_t: None,
        reaction_tag: None,
        output: OutputConfig { every: 10, vtk: true },
    }
}

// ---------------------------------------------------------------- SENT

pub const SENT_LS: f64 = 3.33e-6;

/// Unit square plate (mm) with a horizontal edge notch to the centre.
pub fn sent_mesh(scale: f64) -> RectSpec {
    let ls_mm = SENT_LS * 1e3 / scale;
    let h_fine = ls_mm / 2.0;
    let mut spec = RectSpec::new(1.0, 1.0, 0.05);
    spec.refine = Some(RefineBand { rect: Rect { x0: 0.0, y0: 0.42, x1: 1.0, y1: 0.58 }, h_fine });
    spec.notch = Some(Polygon::rect(Rect { x0: 0.0, y0: 0.5 - h_fine, x1: 0.5, y1: 0.5 + h_fine }));
    spec
}

/// Single edge notched plate in tension with the top edge heated (or
/// cooled) by `delta_t` along the smooth ramp; constants of the reference
/// listing.
pub fn sent(scale: f64, delta_t: f64) -> RunConfig {
    sent_with(
        scale,
        delta_t,
        ElasticLaw { e: 340e9, nu: 0.22, mode: PlanarMode::PlaneStrain },
        42.47,
    )
}

/// Same problem with the material data quoted in the SENT discussion
/// (E = 32 GPa, nu = 0.2, Gc = 3 N/m).
pub fn sent_alternate(scale: f64, delta_t: f64) -> RunConfig {
    let mut cfg = sent_with(scale, delta_t, ElasticLaw { e: 32e9, nu: 0.2, mode: PlanarMode::PlaneStrain }, 3.0);
    cfg.name = Some(format!("sent-alternate dT={delta_t}"));
    cfg
}

fn sent_thermal() -> ThermalLaw {
    ThermalLaw { k0: 300.0, rho: 2450.0, c: 0.775, alpha: 8e-6, t0: 300.0 }
}

fn sent_with(scale: f64, delta_t: f64, elastic: ElasticLaw, gc: f64) -> RunConfig {
    let u_max = 1.2e-6;
    let load = LoadProgram {
        u_max,
        t_max: 1.0,
        delt: 1e-2,
        u_tran: 0.2 * u_max,
        t_app_max: 300.0 + delta_t,
        t0: 300.0,
        ramp: RampKind::Smooth,
    };
    let mat = material(None, elastic, sent_thermal(), gc, SENT_LS / scale);
    let mut cfg = base(format!("sent dT={delta_t}"), sent_mesh(scale), vec![mat], load);
    cfg.displacement_bcs = vec![
        ubc("BottomEdge", Component::Both, 0.0),
        ubc("TopEdge", Component::U1, 0.0),
        ubc("TopEdge", Component::U2, 1.0),
    ];
    cfg.temperature_bcs = vec![tbc("BottomEdge", None, 0.0), tbc("TopEdge", None, 1.0)];
    cfg.reaction_tag = Some("TopEdge".into());
    cfg
}

// ---------------------------------------------------------------- cruciform

pub const CRUCIFORM_L: f64 = 50.0;
pub const CRUCIFORM_LS: f64 = 5e-4;
const NOTCH_ANGLE_DEG: f64 = 135.0;

/// End points of the inclined central notch, mm: `[lower-right, upper-left]`.
pub fn cruciform_notch_tips() -> [Point; 2] {
    let c = CRUCIFORM_L / 2.0;
    let half = 0.1 * CRUCIFORM_L;
    let (sin, cos) = NOTCH_ANGLE_DEG.to_radians().sin_cos();
    [[c - half * cos, c - half * sin], [c + half * cos, c + half * sin]]
}

pub fn cruciform_mesh(scale: f64) -> RectSpec {
    let l = CRUCIFORM_L;
    let h_fine = CRUCIFORM_LS * 1e3 / 4.0 / scale;
    let arm = l / 4.0;
    let mut spec = RectSpec::new(l, l, l / 20.0);
    spec.exclude = vec![
        Rect { x0: 0.0, y0: 0.0, x1: arm, y1: arm },
        Rect { x0: l - arm, y0: 0.0, x1: l, y1: arm },
        Rect { x0: 0.0, y0: l - arm, x1: arm, y1: l },
        Rect { x0: l - arm, y0: l - arm, x1: l, y1: l },
    ];
    spec.refine = Some(RefineBand { rect: Rect { x0: 0.0, y0: arm, x1: l, y1: l - arm }, h_fine });
    let [a, b] = cruciform_notch_tips();
    spec.notch = Some(Polygon::slot(a, b, 2.0 * h_fine));
    spec
}

pub fn cruciform(case: CruciformCase, scale: f64) -> RunConfig {
    // Mechanical loading steps the top edge by 3.5e-7 m; thermal loading
    // raises the top and lowers the bottom edge by 0.1 K per step; the
    // combined case does both at 1.92e-7 m and 0.06 K.
    let (name, steps, du, dt) = match case {
        CruciformCase::Mechanical => ("cruciform-mech", 97, 3.5e-7, 0.0),
        CruciformCase::Thermal => ("cruciform-thermal", 80, 0.0, 0.1),
        CruciformCase::Combined => ("cruciform-combined", 80, 1.92e-7, 0.06),
    };
    let n = steps as f64;
    // With no applied displacement the load parameter is dimensionless (0..1)
    // and only drives the temperature ramp.
    let u_max = if du > 0.0 { du * n } else { 1.0 };
    let load = LoadProgram {
        u_max,
        t_max: n,
        delt: 1.0,
        u_tran: if dt > 0.0 { u_max } else { 0.0 },
        t_app_max: dt * n,
        t0: 0.0,
        ramp: if dt > 0.0 { RampKind::Linear } else { RampKind::None },
    };
    let mat = material(
        None,
        ElasticLaw { e: 218400.0, nu: 0.2, mode: PlanarMode::PlaneStress },
        ThermalLaw { k0: 1.0, rho: 0.0, c: 1.0, alpha: 6e-4, t0: 0.0 },
        2e-4,
        CRUCIFORM_LS / scale,
    );
    let mut cfg = base(name.into(), cruciform_mesh(scale), vec![mat], load);
    // rollers: bottom edge in x2, the horizontal arm ends in x1
    cfg.displacement_bcs = vec![
        ubc("BottomEdge", Component::U2, 0.0),
        ubc("LeftEdge", Component::U1, 0.0),
        ubc("RightEdge", Component::U1, 0.0),
    ];
    if du > 0.0 {
        cfg.displacement_bcs.push(ubc("TopEdge", Component::U2, 1.0));
    }
    cfg.temperature_bcs = vec![tbc("TopEdge", None, 1.0), tbc("BottomEdge", None, -1.0)];
    if dt > 0.0 {
        cfg.temperature_bcs.extend([tbc("LeftEdge", None, 0.0), tbc("RightEdge", None, 0.0)]);
    }
    cfg.reaction_tag = Some("TopEdge".into());
    cfg
}

// ---------------------------------------------------------------- bimaterial

pub const BIMATERIAL_LS: f64 = 3e-4;

/// 150 x 30 mm beam: glass below y = 20 mm, steel above; notch 1 x 15 mm
/// rising from the glass bottom face at x = 30 mm.
pub fn bimaterial_mesh(scale: f64) -> RectSpec {
    let h_fine = BIMATERIAL_LS * 1e3 / 4.0 / scale;
    let mut spec = RectSpec::new(150.0, 30.0, 2.0);
    spec.refine = Some(RefineBand { rect: Rect { x0: 24.0, y0: 12.0, x1: 100.0, y1: 24.0 }, h_fine });
    spec.notch = Some(Polygon::rect(Rect { x0: 29.5, y0: 0.0, x1: 30.5, y1: 15.0 }));
    spec.regions = vec![
        NamedRect { name: "Glass".into(), rect: Rect { x0: 0.0, y0: 0.0, x1: 150.0, y1: 20.0 } },
        NamedRect { name: "Steel".into(), rect: Rect { x0: 0.0, y0: 20.0, x1: 150.0, y1: 30.0 } },
    ];
    spec
}

pub fn bimaterial(scale: f64) -> RunConfig {
    let steps = 60.0;
    let cooling = 0.5 * steps;
    let load = LoadProgram {
        u_max: 0.0,
        t_max: steps,
        delt: 1.0,
        u_tran: 0.0,
        t_app_max: 300.0,
        t0: 300.0,
        ramp: RampKind::PrescribedUniform { schedule: vec![[0.0, 300.0], [steps, 300.0 - cooling]] },
    };
    let ls = BIMATERIAL_LS / scale;
    let glass = material(
        Some("Glass"),
        ElasticLaw { e: 64e9, nu: 0.2, mode: PlanarMode::PlaneStress },
        ThermalLaw { k0: 1.1, rho: 2230.0, c: 830.0, alpha: 3.25e-6, t0: 300.0 },
        400.0,
        ls,
    );
    // Expansion coefficient as printed for 304 steel; the steel is not meant to crack.
    let steel = material(
        Some("Steel"),
        ElasticLaw { e: 193e9, nu: 0.29, mode: PlanarMode::PlaneStress },
        ThermalLaw { k0: 16.2, rho: 8000.0, c: 500.0, alpha: 193e-6, t0: 300.0 },
        400.0 * 1e3,
        ls,
    );
    let mut cfg = base("bimaterial".into(), bimaterial_mesh(scale), vec![glass, steel], load);
    cfg.displacement_bcs = vec![upoint([0.0, 0.0], Component::Both), upoint([150.0, 0.0], Component::U2)];
    cfg
}

// ---------------------------------------------------------------- quench

pub const QUENCH_LENGTH: f64 = 50.0;
pub const QUENCH_HEIGHT: f64 = 4.9;

pub fn quench_mesh(scale: f64) -> RectSpec {
    let ls_mm = QUENCH_LENGTH / 250.0 / scale;
    RectSpec::new(QUENCH_LENGTH, QUENCH_HEIGHT, ls_mm / 2.0)
}

/// Quarter of a slab at `initial` K quenched at its bottom and right edges
/// to 300 K; conductivity is not degraded.
pub fn quench(initial: f64, scale: f64) -> RunConfig {
    let load = LoadProgram {
        u_max: 0.0,
        t_max: 1e-4,
        delt: 1e-6,
        u_tran: 0.0,
        t_app_max: 300.0,
        t0: 300.0,
        ramp: RampKind::None,
    };
    let mut mat = material(
        None,
        ElasticLaw { e: 340e9, nu: 0.22, mode: PlanarMode::PlaneStress },
        sent_thermal(),
        42.47,
        QUENCH_LENGTH / 250.0 * 1e-3 / scale,
    );
    mat.degrade_k = false;
    let mut cfg = base(format!("quench-{initial}"), quench_mesh(scale), vec![mat], load);
    cfg.initial_t = Some(initial);
    cfg.displacement_bcs = vec![ubc("RightEdge", Component::U1, 0.0), ubc("TopEdge", Component::U2, 0.0)];
    cfg.temperature_bcs = vec![tbc("BottomEdge", Some(300.0), 0.0), tbc("RightEdge", Some(300.0), 0.0)];
    cfg
}

// ---------------------------------------------------------------- diagnostics

/// Applied displacement at the maximum of `Fy` (initial record excluded).
pub fn peak_load(records: &[RunRecord]) -> Option<(f64, f64)> {
    records
        .iter()
        .skip(1)
        .filter(|r| r.fy.is_finite())
        .max_by(|a, b| a.fy.total_cmp(&b.fy))
        .map(|r| (r.u_app, r.fy))
}

/// Largest drop of `Fy` after its peak, as a fraction of the peak.
pub fn post_peak_drop(records: &[RunRecord]) -> Option<f64> {
    let k = (1..records.len()).max_by(|&a, &b| records[a].fy.total_cmp(&records[b].fy))?;
    let peak = records[k].fy;
    if peak <= 0.0 {
        return None;
    }
    let low = records[k..].iter().map(|r| r.fy).fold(peak, f64::min);
    Some((peak - low) / peak)
}

/// Centroid of the nodes with `s < threshold` lying in the half-plane ahead
/// of `tip` along `dir`, relative to `tip`.
pub fn damage_offset(mesh: &Mesh, s: &[f64], threshold: f64, tip: Point, dir: Point) -> Option<Point> {
    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    for (p, &v) in mesh.nodes().iter().zip(s) {
        let d = [p[0] - tip[0], p[1] - tip[1]];
        if v < threshold && d[0] * dir[0] + d[1] * dir[1] >= 0.0 {
            sx += d[0];
            sy += d[1];
            n += 1;
        }
    }
    (n > 0).then(|| [sx / n as f64, sy / n as f64])
}

/// Nodes with `s < threshold` connected (through element edges) to a
/// damaged node within `radius` of `tip`; the crack grown from that tip.
pub fn crack_from(mesh: &Mesh, s: &[f64], threshold: f64, tip: Point, radius: f64) -> Vec<usize> {
    let n = mesh.num_nodes();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in mesh.elements() {
        for k in 0..3 {
            let (a, b) = (t.nodes[k], t.nodes[(k + 1) % 3]);
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let damaged = |i: usize| s[i] < threshold;
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = (0..n)
        .filter(|&i| {
            let p = mesh.nodes()[i];
            damaged(i) && (p[0] - tip[0]).hypot(p[1] - tip[1]) <= radius
        })
        .collect();
    stack.iter().for_each(|&i| seen[i] = true);
    let mut out = Vec::new();
    while let Some(i) = stack.pop() {
        out.push(i);
        for &j in &adj[i] {
            if !seen[j] && damaged(j) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Centroid of `nodes` relative to `tip`.
pub fn offset_from(mesh: &Mesh, nodes: &[usize], tip: Point) -> Option<Point> {
    if nodes.is_empty() {
        return None;
    }
    let n = nodes.len() as f64;
    let (sx, sy) = nodes.iter().fold((0.0, 0.0), |(x, y), &i| {
        let p = mesh.nodes()[i];
        (x + p[0] - tip[0], y + p[1] - tip[1])
    });
    Some([sx / n, sy / n])
}

/// Angle of `v` above the horizontal, degrees in [-90, 90].
pub fn elevation_deg(v: Point) -> f64 {
    v[1].atan2(v[0].abs()).to_degrees()
}

/// Damaged intervals `[x0, x1]` along the horizontal line at `y`, sampled
/// at `samples` points.
pub fn damage_bands(mesh: &Mesh, s: &[f64], y: f64, threshold: f64, samples: usize) -> Vec<[f64; 2]> {
    let (lo, hi) = mesh.bounding_box();
    let dx = (hi[0] - lo[0]) / (samples - 1) as f64;
    let mut bands = Vec::new();
    let mut open: Option<f64> = None;
    for k in 0..samples {
        let x = lo[0] + k as f64 * dx;
        let damaged = mesh.interpolate(s, [x, y]).is_some_and(|v| v < threshold);
        match (damaged, open) {
            (true, None) => open = Some(x),
            (false, Some(x0)) => {
                bands.push([x0, x - dx]);
                open = None;
            }
            _ => {}
        }
    }
    if let Some(x0) = open {
        bands.push([x0, hi[0]]);
    }
    bands
}

/// Depth of damage measured from the bottom face along the vertical line
/// at `x`: the top of the damaged run that starts at or contains `y_from`.
pub fn damage_depth(mesh: &Mesh, s: &[f64], x: f64, y_from: f64, threshold: f64, samples: usize) -> f64 {
    let (lo, hi) = mesh.bounding_box();
    let dy = (hi[1] - lo[1]) / (samples - 1) as f64;
    let damaged = |y: f64| mesh.interpolate(s, [x, y]).is_some_and(|v| v < threshold);
    let mut y = y_from.max(lo[1]);
    if !damaged(y) {
        return 0.0;
    }
    while y + dy <= hi[1] + 1e-12 * dy && damaged(y + dy) {
        y += dy;
    }
    y - lo[1]
}

/// Band count along the line at `y` and the mean depth of those bands.
pub fn band_statistics(mesh: &Mesh, s: &[f64], y: f64, threshold: f64) -> (usize, f64) {
    let bands = damage_bands(mesh, s, y, threshold, 2001);
    if bands.is_empty() {
        return (0, 0.0);
    }
    let depth: f64 = bands
        .iter()
        .map(|b| damage_depth(mesh, s, 0.5 * (b[0] + b[1]), y, threshold, 801))
        .sum();
    (bands.len(), depth / bands.len() as f64)
}
