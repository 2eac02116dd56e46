//! Triangle meshes: storage, validation, Gmsh I/O and structured generators.
//!
//! A [`Mesh`] is immutable once built. Elements are 3-node triangles stored
//! counter-clockwise; boundary edges carry a physical tag whose name is kept
//! in the mesh's name table together with the region (surface) names.

mod generate;
mod gmsh;

pub use generate::{generate_rect, NamedRect, Polygon, Rect, RectSpec, RefineBand, EDGE_NAMES};
pub use gmsh::{load_gmsh, parse_gmsh, write_gmsh};

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

/// Planar coordinate pair in meters.
pub type Point = [f64; 2];

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("line {line}: unsupported mesh format version `{version}` (only MSH 2.2 ASCII is supported)")]
    UnsupportedVersion { line: usize, version: String },
    #[error("missing section `{0}`")]
    MissingSection(&'static str),
    #[error("line {line}: element references undefined node {node}")]
    DanglingNode { line: usize, node: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: unsupported element type {kind}")]
    UnsupportedElement { line: usize, kind: usize },
    #[error("element {element} is degenerate (signed area {area:e})")]
    DegenerateElement { element: usize, area: f64 },
    #[error("element {element} references node {node}, but the mesh has {count} nodes")]
    InvalidNodeRef { element: usize, node: usize, count: usize },
    #[error("boundary edge ({0}, {1}) is not an edge of any element")]
    OrphanEdge(usize, usize),
    #[error("nodes {0} and {1} coincide")]
    DuplicateNode(usize, usize),
    #[error("unknown tag `{0}`")]
    UnknownTag(String),
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// 3-node triangle with its region (physical surface) id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tri3 {
    pub nodes: [usize; 3],
    pub region: usize,
}

/// Boundary segment with its physical tag id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: usize,
}

/// Entry of the physical-name table. `dim` is 1 for edge tags and 2 for
/// regions, matching Gmsh's convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhysicalName {
    pub dim: usize,
    pub id: usize,
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<Point>,
    elements: Vec<Tri3>,
    boundary_edges: Vec<BoundaryEdge>,
    names: Vec<PhysicalName>,
    /// Owning element and local edge index of each boundary edge.
    edge_owner: Vec<(usize, usize)>,
}

fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Validates and builds a mesh. Clockwise triangles are reordered to
    /// counter-clockwise.
    pub fn new(
        nodes: Vec<Point>,
        mut elements: Vec<Tri3>,
        boundary_edges: Vec<BoundaryEdge>,
        names: Vec<PhysicalName>,
    ) -> Result<Self, MeshError> {
        let count = nodes.len();
        for (i, p) in nodes.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(MeshError::Geometry(format!("node {i} has non-finite coordinates")));
            }
        }
        for (e, tri) in elements.iter_mut().enumerate() {
            for &n in &tri.nodes {
                if n >= count {
                    return Err(MeshError::InvalidNodeRef { element: e, node: n, count });
                }
            }
            let [a, b, c] = tri.nodes;
            let area = signed_area(nodes[a], nodes[b], nodes[c]);
            if area < 0.0 {
                tri.nodes.swap(1, 2);
            }
            let scale = Self::local_scale(&nodes, tri.nodes);
            if area.abs() <= 1e-14 * scale * scale {
                return Err(MeshError::DegenerateElement { element: e, area });
            }
        }

        let mut edge_map: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (e, tri) in elements.iter().enumerate() {
            for k in 0..3 {
                let a = tri.nodes[k];
                let b = tri.nodes[(k + 1) % 3];
                edge_map.entry((a.min(b), a.max(b))).or_insert((e, k));
            }
        }
        let mut edge_owner = Vec::with_capacity(boundary_edges.len());
        for edge in &boundary_edges {
            let [a, b] = edge.nodes;
            match edge_map.get(&(a.min(b), a.max(b))) {
                Some(&owner) => edge_owner.push(owner),
                None => return Err(MeshError::OrphanEdge(a, b)),
            }
        }

        let mesh = Self { nodes, elements, boundary_edges, names, edge_owner };
        mesh.check_duplicate_nodes()?;
        Ok(mesh)
    }

    fn local_scale(nodes: &[Point], tri: [usize; 3]) -> f64 {
        let mut s: f64 = 0.0;
        for k in 0..3 {
            let p = nodes[tri[k]];
            let q = nodes[tri[(k + 1) % 3]];
            s = s.max((p[0] - q[0]).hypot(p[1] - q[1]));
        }
        s
    }

    fn check_duplicate_nodes(&self) -> Result<(), MeshError> {
        if self.nodes.len() < 2 {
            return Ok(());
        }
        let (lo, hi) = self.bounding_box();
        let tol = 1e-12 * (hi[0] - lo[0]).hypot(hi[1] - lo[1]);
        let mut order: Vec<usize> = (0..self.nodes.len()).collect();
        order.sort_by(|&i, &j| self.nodes[i][0].total_cmp(&self.nodes[j][0]));
        for (k, &i) in order.iter().enumerate() {
            let p = self.nodes[i];
            for &j in &order[k + 1..] {
                let q = self.nodes[j];
                if q[0] - p[0] > tol {
                    break;
                }
                if (q[1] - p[1]).abs() <= tol {
                    return Err(MeshError::DuplicateNode(i.min(j), i.max(j)));
                }
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn elements(&self) -> &[Tri3] {
        &self.elements
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn names(&self) -> &[PhysicalName] {
        &self.names
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    /// Element owning boundary edge `i`, and the local index `k` of that edge
    /// (the edge runs from local node `k` to `k + 1`).
    pub fn edge_owner(&self, i: usize) -> (usize, usize) {
        self.edge_owner[i]
    }

    pub fn element_coords(&self, e: usize) -> [Point; 3] {
        let t = self.elements[e].nodes;
        [self.nodes[t[0]], self.nodes[t[1]], self.nodes[t[2]]]
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.element_coords(e);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    pub fn centroid(&self, e: usize) -> Point {
        let [a, b, c] = self.element_coords(e);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    fn lookup(&self, dim: usize, name: &str) -> Option<usize> {
        self.names.iter().find(|n| n.dim == dim && n.name == name).map(|n| n.id)
    }

    /// Id of a boundary (dimension-1) tag.
    pub fn tag_id(&self, name: &str) -> Result<usize, MeshError> {
        self.lookup(1, name).ok_or_else(|| MeshError::UnknownTag(name.to_string()))
    }

    /// Id of a region (dimension-2) tag.
    pub fn region_id(&self, name: &str) -> Result<usize, MeshError> {
        self.lookup(2, name).ok_or_else(|| MeshError::UnknownTag(name.to_string()))
    }

    pub fn region_name(&self, id: usize) -> Option<&str> {
        self.names.iter().find(|n| n.dim == 2 && n.id == id).map(|n| n.name.as_str())
    }

    /// Distinct region ids used by the elements, ascending.
    pub fn region_ids(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.elements.iter().map(|t| t.region).collect();
        set.into_iter().collect()
    }

    /// Indices of the boundary edges carrying `name`.
    pub fn edges_with_tag(&self, name: &str) -> Result<Vec<usize>, MeshError> {
        let id = self.tag_id(name)?;
        Ok((0..self.boundary_edges.len()).filter(|&i| self.boundary_edges[i].tag == id).collect())
    }

    /// All node ids incident to edges tagged `name`, ascending.
    pub fn boundary_nodes(&self, name: &str) -> Result<Vec<usize>, MeshError> {
        let id = self.tag_id(name)?;
        let set: BTreeSet<usize> = self
            .boundary_edges
            .iter()
            .filter(|edge| edge.tag == id)
            .flat_map(|edge| edge.nodes)
            .collect();
        Ok(set.into_iter().collect())
    }

    pub fn nearest_node(&self, p: Point) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, q) in self.nodes.iter().enumerate() {
            let d = (q[0] - p[0]).hypot(q[1] - p[1]);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Element containing `p` and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for e in 0..self.elements.len() {
            let [a, b, c] = self.element_coords(e);
            let area = signed_area(a, b, c);
            let l0 = signed_area(p, b, c) / area;
            let l1 = signed_area(a, p, c) / area;
            let l2 = 1.0 - l0 - l1;
            let worst = l0.min(l1).min(l2);
            if worst >= -1e-12 {
                return Some((e, [l0, l1, l2]));
            }
            if best.as_ref().is_none_or(|b| worst > b.2) {
                best = Some((e, [l0, l1, l2], worst));
            }
        }
        best.filter(|b| b.2 > -1e-9).map(|b| (b.0, b.1))
    }

    /// Linear interpolation of a nodal field at `p`, or `None` outside the mesh.
    pub fn interpolate(&self, field: &[f64], p: Point) -> Option<f64> {
        let (e, l) = self.locate(p)?;
        let t = self.elements[e].nodes;
        Some(l[0] * field[t[0]] + l[1] * field[t[1]] + l[2] * field[t[2]])
    }

    /// Number of elements sharing each edge, keyed by sorted node pair.
    pub fn edge_valence(&self) -> HashMap<(usize, usize), usize> {
        let mut map = HashMap::new();
        for tri in &self.elements {
            for k in 0..3 {
                let a = tri.nodes[k];
                let b = tri.nodes[(k + 1) % 3];
                *map.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        map
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_tri() -> Mesh {
        Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            vec![Tri3 { nodes: [0, 2, 1], region: 1 }],
            vec![BoundaryEdge { nodes: [0, 1], tag: 2 }],
            vec![
                PhysicalName { dim: 2, id: 1, name: "Domain".into() },
                PhysicalName { dim: 1, id: 2, name: "BottomEdge".into() },
            ],
        )
        .unwrap()
    }

    #[test]
    fn clockwise_is_reoriented() {
        let m = unit_tri();
        assert!(m.element_area(0) > 0.0);
        assert!((m.total_area() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_element_rejected() {
        let err = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
            vec![Tri3 { nodes: [0, 1, 2], region: 0 }],
            vec![],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::DegenerateElement { .. }));
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let err = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
            vec![Tri3 { nodes: [0, 1, 2], region: 0 }],
            vec![],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::DuplicateNode(1, 3)));
    }

    #[test]
    fn orphan_edge_rejected() {
        let err = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
            vec![Tri3 { nodes: [0, 1, 2], region: 0 }],
            vec![BoundaryEdge { nodes: [0, 3], tag: 0 }],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, MeshError::OrphanEdge(0, 3)));
    }

    #[test]
    fn boundary_nodes_and_unknown_tag() {
        let m = unit_tri();
        assert_eq!(m.boundary_nodes("BottomEdge").unwrap(), vec![0, 1]);
        assert!(matches!(m.boundary_nodes("Left"), Err(MeshError::UnknownTag(_))));
    }

    #[test]
    fn interpolation_is_linear() {
        let m = unit_tri();
        let f = [1.0, 3.0, 5.0];
        let v = m.interpolate(&f, [0.25, 0.25]).unwrap();
        assert!((v - (1.0 + 2.0 * 0.25 + 4.0 * 0.25)).abs() < 1e-14);
        assert!(m.interpolate(&f, [2.0, 2.0]).is_none());
    }
}
