//! Gmsh MSH 2.2 ASCII reader and writer.
//!
//! Supported blocks: `$MeshFormat`, `$PhysicalNames`, `$Nodes`, `$Elements`.
//! Element type 1 (2-node line) becomes a boundary edge, type 2 (3-node
//! triangle) an element, type 15 (point) is ignored. Other blocks are skipped.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use super::{BoundaryEdge, Mesh, MeshError, PhysicalName, Point, Tri3};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self { inner: text.lines().enumerate(), last: 0 }
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            let t = l.trim();
            if !t.is_empty() {
                self.last = i + 1;
                return Some((i + 1, t));
            }
        }
        None
    }

    fn expect(&mut self, section: &'static str) -> Result<(usize, &'a str), MeshError> {
        self.next_line().ok_or(MeshError::Parse {
            line: self.last + 1,
            message: format!("unexpected end of file inside {section}"),
        })
    }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, MeshError> {
    tok.and_then(|t| t.parse().ok()).ok_or_else(|| MeshError::Parse {
        line,
        message: format!("expected {what}"),
    })
}

fn expect_end(lines: &mut Lines<'_>, end: &'static str) -> Result<(), MeshError> {
    let (line, l) = lines.expect(end)?;
    if l != end {
        return Err(MeshError::Parse { line, message: format!("expected `{end}`, found `{l}`") });
    }
    Ok(())
}

/// Reads an MSH 2.2 ASCII mesh from a buffered reader.
pub fn load_gmsh<R: BufRead>(mut reader: R) -> Result<Mesh, MeshError> {
    let mut text = String::new();
    reader.read_to_string(&mut text)?;
    parse_gmsh(&text)
}

pub fn parse_gmsh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = Lines::new(text);
    let mut seen_format = false;
    let mut names: Vec<PhysicalName> = Vec::new();
    let mut raw_nodes: Option<(HashMap<usize, usize>, Vec<Point>)> = None;
    // (line, kind, physical, node ids)
    let mut raw_elements: Option<Vec<(usize, usize, usize, Vec<usize>)>> = None;

    while let Some((line, header)) = lines.next_line() {
        match header {
            "$MeshFormat" => {
                let (line, l) = lines.expect("$MeshFormat")?;
                let mut it = l.split_whitespace();
                let version = it.next().unwrap_or("");
                let file_type: Option<u32> = it.next().and_then(|t| t.parse().ok());
                let ok_version = version.starts_with("2.2");
                if !ok_version || file_type != Some(0) {
                    return Err(MeshError::UnsupportedVersion { line, version: l.to_string() });
                }
                expect_end(&mut lines, "$EndMeshFormat")?;
                seen_format = true;
            }
            "$PhysicalNames" => {
                let (line, l) = lines.expect("$PhysicalNames")?;
                let n: usize = parse_num(Some(l), line, "physical name count")?;
                for _ in 0..n {
                    let (line, l) = lines.expect("$PhysicalNames")?;
                    let mut it = l.splitn(3, char::is_whitespace);
                    let dim = parse_num(it.next(), line, "dimension")?;
                    let id = parse_num(it.next(), line, "physical id")?;
                    let name = it
                        .next()
                        .map(|s| s.trim().trim_matches('"').to_string())
                        .ok_or(MeshError::Parse { line, message: "expected quoted name".into() })?;
                    names.push(PhysicalName { dim, id, name });
                }
                expect_end(&mut lines, "$EndPhysicalNames")?;
            }
            "$Nodes" => {
                let (line, l) = lines.expect("$Nodes")?;
                let n: usize = parse_num(Some(l), line, "node count")?;
                let mut map = HashMap::with_capacity(n);
                let mut coords = Vec::with_capacity(n);
                for _ in 0..n {
                    let (line, l) = lines.expect("$Nodes")?;
                    let mut it = l.split_whitespace();
                    let id: usize = parse_num(it.next(), line, "node id")?;
                    let x: f64 = parse_num(it.next(), line, "x coordinate")?;
                    let y: f64 = parse_num(it.next(), line, "y coordinate")?;
                    if map.insert(id, coords.len()).is_some() {
                        return Err(MeshError::Parse { line, message: format!("node {id} defined twice") });
                    }
                    coords.push([x, y]);
                }
                expect_end(&mut lines, "$EndNodes")?;
                raw_nodes = Some((map, coords));
            }
            "$Elements" => {
                let (line, l) = lines.expect("$Elements")?;
                let n: usize = parse_num(Some(l), line, "element count")?;
                let mut elems = Vec::with_capacity(n);
                for _ in 0..n {
                    let (line, l) = lines.expect("$Elements")?;
                    let toks: Vec<&str> = l.split_whitespace().collect();
                    let kind: usize = parse_num(toks.get(1).copied(), line, "element type")?;
                    let ntags: usize = parse_num(toks.get(2).copied(), line, "tag count")?;
                    let physical: usize = if ntags > 0 { parse_num(toks.get(3).copied(), line, "physical tag")? } else { 0 };
                    let nnodes = match kind {
                        1 => 2,
                        2 => 3,
                        15 => 1,
                        other => return Err(MeshError::UnsupportedElement { line, kind: other }),
                    };
                    let start = 3 + ntags;
                    if toks.len() != start + nnodes {
                        return Err(MeshError::Parse {
                            line,
                            message: format!("element type {kind} expects {nnodes} nodes"),
                        });
                    }
                    let ids = toks[start..]
                        .iter()
                        .map(|t| parse_num(Some(t), line, "node id"))
                        .collect::<Result<Vec<usize>, _>>()?;
                    if kind != 15 {
                        elems.push((line, kind, physical, ids));
                    }
                }
                expect_end(&mut lines, "$EndElements")?;
                raw_elements = Some(elems);
            }
            other if other.starts_with("$End") => {
                return Err(MeshError::Parse { line, message: format!("unmatched `{other}`") });
            }
            other if other.starts_with('$') => {
                let end = format!("$End{}", &other[1..]);
                loop {
                    let (_, l) = lines.expect("unknown section")?;
                    if l == end {
                        break;
                    }
                }
            }
            other => {
                return Err(MeshError::Parse { line, message: format!("unexpected content `{other}`") });
            }
        }
    }

    if !seen_format {
        return Err(MeshError::MissingSection("$MeshFormat"));
    }
    let (node_map, coords) = raw_nodes.ok_or(MeshError::MissingSection("$Nodes"))?;
    let raw_elements = raw_elements.ok_or(MeshError::MissingSection("$Elements"))?;

    // Resolve references, then keep only nodes used by triangles.
    let mut resolved = Vec::with_capacity(raw_elements.len());
    for (line, kind, physical, ids) in raw_elements {
        let mut idx = Vec::with_capacity(ids.len());
        for id in ids {
            match node_map.get(&id) {
                Some(&i) => idx.push(i),
                None => return Err(MeshError::DanglingNode { line, node: id }),
            }
        }
        resolved.push((line, kind, physical, idx));
    }
    let mut renumber = vec![usize::MAX; coords.len()];
    let mut nodes = Vec::new();
    for (_, kind, _, idx) in &resolved {
        if *kind == 2 {
            for &i in idx {
                if renumber[i] == usize::MAX {
                    renumber[i] = nodes.len();
                    nodes.push(coords[i]);
                }
            }
        }
    }
    let mut elements = Vec::new();
    let mut edges = Vec::new();
    for (line, kind, physical, idx) in resolved {
        let mapped: Vec<usize> = idx.iter().map(|&i| renumber[i]).collect();
        if let Some(pos) = mapped.iter().position(|&i| i == usize::MAX) {
            let original = node_map.iter().find(|(_, &v)| v == idx[pos]).map(|(&k, _)| k).unwrap_or(0);
            return Err(MeshError::DanglingNode { line, node: original });
        }
        match kind {
            1 => edges.push(BoundaryEdge { nodes: [mapped[0], mapped[1]], tag: physical }),
            _ => elements.push(Tri3 { nodes: [mapped[0], mapped[1], mapped[2]], region: physical }),
        }
    }

    // Unnamed physical groups are addressable by their numeric id.
    for (dim, ids) in [(1, edges.iter().map(|e| e.tag).collect::<Vec<_>>()), (2, elements.iter().map(|t| t.region).collect())] {
        for id in ids {
            if !names.iter().any(|n| n.dim == dim && n.id == id) {
                names.push(PhysicalName { dim, id, name: id.to_string() });
            }
        }
    }
    Mesh::new(nodes, elements, edges, names)
}

/// Serializes a mesh as MSH 2.2 ASCII (1-based node and element ids).
pub fn write_gmsh(mesh: &Mesh) -> String {
    let mut out = String::new();
    out.push_str("$MeshFormat\n2.2 0 8\n$EndMeshFormat\n");
    let _ = writeln!(out, "$PhysicalNames\n{}", mesh.names().len());
    for n in mesh.names() {
        let _ = writeln!(out, "{} {} \"{}\"", n.dim, n.id, n.name);
    }
    out.push_str("$EndPhysicalNames\n");
    let _ = writeln!(out, "$Nodes\n{}", mesh.num_nodes());
    for (i, p) in mesh.nodes().iter().enumerate() {
        let _ = writeln!(out, "{} {:e} {:e} 0", i + 1, p[0], p[1]);
    }
    out.push_str("$EndNodes\n");
    let total = mesh.boundary_edges().len() + mesh.num_elements();
    let _ = writeln!(out, "$Elements\n{total}");
    let mut id = 1;
    for e in mesh.boundary_edges() {
        let _ = writeln!(out, "{id} 1 2 {} {} {} {}", e.tag, e.tag, e.nodes[0] + 1, e.nodes[1] + 1);
        id += 1;
    }
    for t in mesh.elements() {
        let _ = writeln!(
            out,
            "{id} 2 2 {} {} {} {} {}",
            t.region,
            t.region,
            t.nodes[0] + 1,
            t.nodes[1] + 1,
            t.nodes[2] + 1
        );
        id += 1;
    }
    out.push_str("$EndElements\n");
    out
}
