//! Structured triangulations of rectangular domains with an optional
//! refinement band, notch and rectangular cut-outs.
//!
//! The generator lays out a tensor-product grid whose spacing is `h_fine`
//! inside the band and grows linearly with distance away from it up to `h`.
//! Every feature coordinate (band, axis-aligned notch, cut-outs, regions) is a
//! grid line, so the grid stays conforming and axis-aligned features are cut
//! exactly. Cells are split into two triangles with alternating diagonals.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{BoundaryEdge, Mesh, MeshError, PhysicalName, Point, Tri3};

/// Default boundary names, in tag-id order (ids start at 1).
pub const EDGE_NAMES: [&str; 6] = ["LeftEdge", "RightEdge", "BottomEdge", "TopEdge", "NotchEdge", "FreeEdge"];

const DOMAIN_REGION: &str = "Domain";
const REGION_BASE_ID: usize = 100;
/// Relative spacing growth per unit distance outside the refinement band.
const GRADING: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    fn scaled(&self, f: f64) -> Self {
        Self { x0: self.x0 * f, y0: self.y0 * f, x1: self.x1 * f, y1: self.y1 * f }
    }
}

/// Simple polygon given by its vertices (either orientation).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polygon(pub Vec<Point>);

impl Polygon {
    pub fn rect(r: Rect) -> Self {
        Self(vec![[r.x0, r.y0], [r.x1, r.y0], [r.x1, r.y1], [r.x0, r.y1]])
    }

    /// Thin rectangle of the given width centred on segment `a`-`b`.
    pub fn slot(a: Point, b: Point, width: f64) -> Self {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len = dx.hypot(dy);
        let (nx, ny) = (-dy / len * width / 2.0, dx / len * width / 2.0);
        Self(vec![
            [a[0] + nx, a[1] + ny],
            [b[0] + nx, b[1] + ny],
            [b[0] - nx, b[1] - ny],
            [a[0] - nx, a[1] - ny],
        ])
    }

    pub fn area(&self) -> f64 {
        let v = &self.0;
        let n = v.len();
        let twice: f64 = (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum();
        0.5 * twice.abs()
    }

    pub fn contains(&self, p: Point) -> bool {
        let v = &self.0;
        let mut inside = false;
        let mut j = v.len() - 1;
        for i in 0..v.len() {
            let (a, b) = (v[i], v[j]);
            if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
                inside = !inside;
            }
            j = i;
        }
        inside
    }

    /// The bounding rectangle, if the polygon is an axis-aligned rectangle.
    fn as_axis_rect(&self) -> Option<Rect> {
        if self.0.len() != 4 {
            return None;
        }
        let mut xs: Vec<f64> = self.0.iter().map(|p| p[0]).collect();
        let mut ys: Vec<f64> = self.0.iter().map(|p| p[1]).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        let aligned = xs[0] == xs[1] && xs[2] == xs[3] && ys[0] == ys[1] && ys[2] == ys[3];
        aligned.then(|| Rect { x0: xs[0], y0: ys[0], x1: xs[3], y1: ys[3] })
    }

    fn scaled(&self, f: f64) -> Self {
        Self(self.0.iter().map(|p| [p[0] * f, p[1] * f]).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineBand {
    pub rect: Rect,
    pub h_fine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedRect {
    pub name: String,
    pub rect: Rect,
}

/// Parameters of [`generate_rect`]. All lengths share one unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectSpec {
    pub width: f64,
    pub height: f64,
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<RefineBand>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notch: Option<Polygon>,
    /// Rectangles removed from the domain (their edges are tagged `FreeEdge`).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclude: Vec<Rect>,
    /// Named material regions; elements outside all of them belong to `Domain`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub regions: Vec<NamedRect>,
    /// Renames of the default edge tags, e.g. `{"TopEdge": "Load"}`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub edge_names: BTreeMap<String, String>,
}

impl RectSpec {
    pub fn new(width: f64, height: f64, h: f64) -> Self {
        Self {
            width,
            height,
            h,
            refine: None,
            notch: None,
            exclude: Vec::new(),
            regions: Vec::new(),
            edge_names: BTreeMap::new(),
        }
    }

    /// Copy with every length multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        Self {
            width: self.width * f,
            height: self.height * f,
            h: self.h * f,
            refine: self.refine.map(|b| RefineBand { rect: b.rect.scaled(f), h_fine: b.h_fine * f }),
            notch: self.notch.as_ref().map(|p| p.scaled(f)),
            exclude: self.exclude.iter().map(|r| r.scaled(f)).collect(),
            regions: self.regions.iter().map(|r| NamedRect { name: r.name.clone(), rect: r.rect.scaled(f) }).collect(),
            edge_names: self.edge_names.clone(),
        }
    }

    /// Area the generated mesh must cover.
    pub fn expected_area(&self) -> f64 {
        self.width * self.height
            - self.exclude.iter().map(Rect::area).sum::<f64>()
            - self.notch.as_ref().map_or(0.0, Polygon::area)
    }

    fn validate(&self) -> Result<(), MeshError> {
        let geo = |m: String| Err(MeshError::Geometry(m));
        if !(self.width > 0.0 && self.height > 0.0) {
            return geo(format!("domain {}x{} must have positive extent", self.width, self.height));
        }
        if !(self.h > 0.0) {
            return geo(format!("element size h = {} must be positive", self.h));
        }
        if self.h > self.width.min(self.height) * (1.0 + 1e-12) {
            return geo(format!("element size h = {} is larger than the domain", self.h));
        }
        if let Some(band) = &self.refine {
            if !(band.h_fine > 0.0 && band.h_fine <= self.h) {
                return geo(format!("refinement size {} must lie in (0, h]", band.h_fine));
            }
            if band.rect.x1 <= band.rect.x0 || band.rect.y1 <= band.rect.y0 {
                return geo("refinement band is empty".into());
            }
        }
        if let Some(notch) = &self.notch {
            if notch.0.len() < 3 || notch.area() <= 0.0 {
                return geo("notch polygon has zero area".into());
            }
            let inside = notch
                .0
                .iter()
                .all(|p| p[0] >= 0.0 && p[0] <= self.width && p[1] >= 0.0 && p[1] <= self.height);
            if !inside {
                return geo("notch polygon leaves the domain".into());
            }
        }
        Ok(())
    }
}

/// Spacing target at coordinate `x` given the fine interval.
fn spacing(x: f64, h: f64, fine: Option<(f64, f64, f64)>) -> f64 {
    match fine {
        None => h,
        Some((a, b, hf)) => {
            let d = if x < a { a - x } else if x > b { x - b } else { 0.0 };
            (hf + GRADING * d).min(h)
        }
    }
}

/// Grid coordinates along one axis of length `len`, hitting every breakpoint.
fn axis(len: f64, h: f64, fine: Option<(f64, f64, f64)>, breaks: &[f64]) -> Vec<f64> {
    let tol = 1e-12 * len;
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&b| b > tol && b < len - tol).collect();
    pts.push(0.0);
    pts.push(len);
    if let Some((a, b, _)) = fine {
        for v in [a, b] {
            if v > tol && v < len - tol {
                pts.push(v);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= tol);

    const SAMPLES: usize = 400;
    let mut out = vec![0.0];
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        // cumulative number of cells, trapezoidal in 1/spacing
        let dx = (q - p) / SAMPLES as f64;
        let mut cum = vec![0.0; SAMPLES + 1];
        for k in 0..SAMPLES {
            let x0 = p + k as f64 * dx;
            let f0 = 1.0 / spacing(x0, h, fine);
            let f1 = 1.0 / spacing(x0 + dx, h, fine);
            cum[k + 1] = cum[k] + 0.5 * (f0 + f1) * dx;
        }
        let total = cum[SAMPLES];
        let n = ((total - 1e-9).ceil() as usize).max(1);
        let mut k = 0;
        for i in 1..n {
            let target = total * i as f64 / n as f64;
            while cum[k + 1] < target {
                k += 1;
            }
            let frac = (target - cum[k]) / (cum[k + 1] - cum[k]);
            out.push(p + (k as f64 + frac) * dx);
        }
        out.push(q);
    }
    out
}

/// Builds the structured mesh described by `spec`.
pub fn generate_rect(spec: &RectSpec) -> Result<Mesh, MeshError> {
    spec.validate()?;
    let mut xb = Vec::new();
    let mut yb = Vec::new();
    let mut add_rect = |r: &Rect| {
        xb.extend([r.x0, r.x1]);
        yb.extend([r.y0, r.y1]);
    };
    spec.exclude.iter().for_each(&mut add_rect);
    spec.regions.iter().for_each(|r| add_rect(&r.rect));
    if let Some(rect) = spec.notch.as_ref().and_then(Polygon::as_axis_rect) {
        add_rect(&rect);
    }
    let xfine = spec.refine.map(|b| (b.rect.x0, b.rect.x1, b.h_fine));
    let yfine = spec.refine.map(|b| (b.rect.y0, b.rect.y1, b.h_fine));
    let xs = axis(spec.width, spec.h, xfine, &xb);
    let ys = axis(spec.height, spec.h, yfine, &yb);
    let (nx, ny) = (xs.len() - 1, ys.len() - 1);
    let id = |i: usize, j: usize| j * (nx + 1) + i;

    let mut grid_nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for &y in &ys {
        for &x in &xs {
            grid_nodes.push([x, y]);
        }
    }

    // Candidate triangles; `false` marks removal by the notch.
    let mut kept: Vec<[usize; 3]> = Vec::new();
    let mut notched: Vec<[usize; 3]> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let centre = [(xs[i] + xs[i + 1]) / 2.0, (ys[j] + ys[j + 1]) / 2.0];
            if spec.exclude.iter().any(|r| r.contains(centre)) {
                continue;
            }
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let pair = if (i + j) % 2 == 0 { [[a, b, c], [a, c, d]] } else { [[a, b, d], [b, c, d]] };
            for tri in pair {
                let p = tri.map(|n| grid_nodes[n]);
                let centroid = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
                if spec.notch.as_ref().is_some_and(|poly| poly.contains(centroid)) {
                    notched.push(tri);
                } else {
                    kept.push(tri);
                }
            }
        }
    }
    if kept.is_empty() {
        return Err(MeshError::Geometry("no elements left after removing notch and cut-outs".into()));
    }

    let mut edge_count: HashMap<(usize, usize), (usize, bool)> = HashMap::new();
    for tri in &kept {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            edge_count.entry((a.min(b), a.max(b))).or_insert((0, false)).0 += 1;
        }
    }
    for tri in &notched {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            if let Some(entry) = edge_count.get_mut(&(a.min(b), a.max(b))) {
                entry.1 = true;
            }
        }
    }

    // Compact nodes.
    let mut renumber = vec![usize::MAX; grid_nodes.len()];
    let mut nodes = Vec::new();
    for tri in &kept {
        for &n in tri {
            if renumber[n] == usize::MAX {
                renumber[n] = nodes.len();
                nodes.push(grid_nodes[n]);
            }
        }
    }

    let tol = 1e-12 * spec.width.max(spec.height);
    let side_of = |p: Point, q: Point| -> usize {
        if p[0].abs() <= tol && q[0].abs() <= tol {
            0
        } else if (p[0] - spec.width).abs() <= tol && (q[0] - spec.width).abs() <= tol {
            1
        } else if p[1].abs() <= tol && q[1].abs() <= tol {
            2
        } else if (p[1] - spec.height).abs() <= tol && (q[1] - spec.height).abs() <= tol {
            3
        } else {
            5
        }
    };
    let mut edges = Vec::new();
    let mut used_tags = [false; 6];
    used_tags[..4].iter_mut().for_each(|u| *u = true);
    // Walk kept triangles so edge order is deterministic.
    for tri in &kept {
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let (count, by_notch) = edge_count[&(a.min(b), a.max(b))];
            if count != 1 {
                continue;
            }
            let mut side = side_of(grid_nodes[a], grid_nodes[b]);
            if side == 5 && by_notch {
                side = 4;
            }
            used_tags[side] = true;
            edges.push(BoundaryEdge { nodes: [renumber[a], renumber[b]], tag: side + 1 });
        }
    }

    let mut names = Vec::new();
    for (k, default) in EDGE_NAMES.iter().enumerate() {
        if used_tags[k] {
            let name = spec.edge_names.get(*default).cloned().unwrap_or_else(|| default.to_string());
            names.push(PhysicalName { dim: 1, id: k + 1, name });
        }
    }

    let mut elements = Vec::with_capacity(kept.len());
    let mut region_used = vec![false; spec.regions.len() + 1];
    for tri in &kept {
        let p = tri.map(|n| grid_nodes[n]);
        let centroid = [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0];
        let slot = spec.regions.iter().position(|r| r.rect.contains(centroid)).map_or(0, |k| k + 1);
        region_used[slot] = true;
        elements.push(Tri3 { nodes: tri.map(|n| renumber[n]), region: REGION_BASE_ID + slot });
    }
    for (slot, used) in region_used.iter().enumerate() {
        if *used {
            let name = if slot == 0 { DOMAIN_REGION.to_string() } else { spec.regions[slot - 1].name.clone() };
            names.push(PhysicalName { dim: 2, id: REGION_BASE_ID + slot, name });
        }
    }

    Mesh::new(nodes, elements, edges, names)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_single_cell() {
        let m = generate_rect(&RectSpec::new(1.0, 1.0, 1.0)).unwrap();
        assert_eq!(m.num_elements(), 2);
        assert!((m.total_area() - 1.0).abs() < 1e-14);
        let bottom: Vec<Point> = m.boundary_nodes("BottomEdge").unwrap().iter().map(|&i| m.nodes()[i]).collect();
        assert_eq!(bottom.len(), 2);
        assert!(bottom.contains(&[0.0, 0.0]) && bottom.contains(&[1.0, 0.0]));
    }

    #[test]
    fn count_by_construction() {
        // 2·(1/h)² triangles for a uniform grid
        for (h, n) in [(0.5, 8), (0.25, 32), (0.1, 200)] {
            let m = generate_rect(&RectSpec::new(1.0, 1.0, h)).unwrap();
            assert_eq!(m.num_elements(), n, "h = {h}");
            assert!((m.total_area() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rectangular_notch_area() {
        let mut spec = RectSpec::new(1.0, 1.0, 0.05);
        spec.notch = Some(Polygon::rect(Rect { x0: 0.0, y0: 0.45, x1: 0.5, y1: 0.55 }));
        let m = generate_rect(&spec).unwrap();
        assert!((m.total_area() - 0.95).abs() <= 1e-10 * 0.95);
        assert!(!m.boundary_nodes("NotchEdge").unwrap().is_empty());
    }

    #[test]
    fn refined_top_row_count() {
        let mut spec = RectSpec::new(1.0, 1.0, 0.1);
        spec.refine = Some(RefineBand { rect: Rect { x0: 0.4, y0: 0.0, x1: 0.6, y1: 1.0 }, h_fine: 0.02 });
        let m = generate_rect(&spec).unwrap();
        let top = m.boundary_nodes("TopEdge").unwrap();
        let row = m.nodes().iter().filter(|p| (p[1] - 1.0).abs() < 1e-12).count();
        assert_eq!(top.len(), row);
        // the band is resolved at h_fine
        let in_band = top.iter().filter(|&&i| (0.4..=0.6).contains(&m.nodes()[i][0])).count();
        assert_eq!(in_band, 11);
    }

    #[test]
    fn invalid_parameters() {
        assert!(generate_rect(&RectSpec::new(1.0, 1.0, 2.0)).is_err());
        let mut spec = RectSpec::new(1.0, 1.0, 0.1);
        spec.notch = Some(Polygon(vec![[0.0, 0.5], [0.5, 0.5], [0.2, 0.5]]));
        assert!(matches!(generate_rect(&spec), Err(MeshError::Geometry(_))));
    }

    #[test]
    fn regions_and_exclusions() {
        let mut spec = RectSpec::new(4.0, 4.0, 0.5);
        spec.exclude = vec![Rect { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 }];
        spec.regions = vec![NamedRect { name: "Top".into(), rect: Rect { x0: 0.0, y0: 3.0, x1: 4.0, y1: 4.0 } }];
        let m = generate_rect(&spec).unwrap();
        assert!((m.total_area() - 15.0).abs() < 1e-12);
        let top = m.region_id("Top").unwrap();
        let top_area: f64 = (0..m.num_elements()).filter(|&e| m.elements()[e].region == top).map(|e| m.element_area(e)).sum();
        assert!((top_area - 4.0).abs() < 1e-12);
        assert!(!m.boundary_nodes("FreeEdge").unwrap().is_empty());
    }
}
