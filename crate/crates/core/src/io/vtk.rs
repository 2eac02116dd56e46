use std::fmt::Write as _;
use std::path::Path;

use super::{write_atomic, OutputError};
use crate::mesh::Mesh;

/// Legacy ASCII VTK unstructured grid with point data `u` (vector), `s`, `T`.
pub fn vtk_string(mesh: &Mesh, u: &[f64], s: &[f64], t: &[f64]) -> Result<String, OutputError> {
    let n = mesh.num_nodes();
    for (name, len, want) in [("u", u.len(), 2 * n), ("s", s.len(), n), ("T", t.len(), n)] {
        if len != want {
            return Err(OutputError::FieldLength { name, len, expected: want });
        }
    }
    let ne = mesh.num_elements();
    let mut out = String::with_capacity(80 * (n + ne) + 256);
    out.push_str("# vtk DataFile Version 3.0\nthermofrac fields\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(out, "POINTS {n} double");
    for p in mesh.nodes() {
        let _ = writeln!(out, "{:.16e} {:.16e} 0", p[0], p[1]);
    }
    let _ = writeln!(out, "CELLS {ne} {}", 4 * ne);
    for tri in mesh.elements() {
        let [a, b, c] = tri.nodes;
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    let _ = writeln!(out, "CELL_TYPES {ne}");
    for _ in 0..ne {
        out.push_str("5\n");
    }
    let _ = writeln!(out, "POINT_DATA {n}");
    out.push_str("VECTORS u double\n");
    for i in 0..n {
        let _ = writeln!(out, "{:.16e} {:.16e} 0", u[2 * i], u[2 * i + 1]);
    }
    for (name, field) in [("s", s), ("T", t)] {
        let _ = writeln!(out, "SCALARS {name} double 1\nLOOKUP_TABLE default");
        for v in field {
            let _ = writeln!(out, "{v:.16e}");
        }
    }
    Ok(out)
}

pub fn write_vtk(mesh: &Mesh, u: &[f64], s: &[f64], t: &[f64], path: &Path) -> Result<(), OutputError> {
    let text = vtk_string(mesh, u, s, t)?;
    write_atomic(path, text.as_bytes())
}
