use thiserror::Error;

use crate::mesh::{Mesh, Point};

#[derive(Debug, Error, PartialEq)]
pub enum ShapeError {
    #[error("element {element} has non-positive area {area:e}")]
    Degenerate { element: usize, area: f64 },
    #[error("quadrature degree {0} is not supported (max 2)")]
    UnsupportedDegree(usize),
}

/// Quadrature rule on a triangle in barycentric coordinates; weights sum to 1
/// and are scaled by the element area at use.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// Edge-midpoint rule, exact for quadratics.
pub const MIDPOINTS: [[f64; 3]; 3] = [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]];
pub const NQ: usize = 3;

pub fn quad_rule(degree: usize) -> Result<QuadRule, ShapeError> {
    match degree {
        0 | 1 => Ok(QuadRule { points: vec![[1.0 / 3.0; 3]], weights: vec![1.0] }),
        2 => Ok(QuadRule { points: MIDPOINTS.to_vec(), weights: vec![1.0 / 3.0; 3] }),
        d => Err(ShapeError::UnsupportedDegree(d)),
    }
}

/// Constant gradients and area of a linear triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tri3Geom {
    pub grads: [[f64; 2]; 3],
    pub area: f64,
}

impl Tri3Geom {
    pub fn from_coords(p: [Point; 3]) -> Option<Self> {
        let [a, b, c] = p;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if !(det > 0.0) {
            return None;
        }
        let grads = [
            [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
            [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
            [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
        ];
        Some(Self { grads, area: 0.5 * det })
    }

    /// Strain-displacement matrix for engineering strain `[e11, e22, 2 e12]`,
    /// columns ordered `(u1, u2)` per local node.
    pub fn b_matrix(&self) -> [[f64; 6]; 3] {
        let mut b = [[0.0; 6]; 3];
        for (i, g) in self.grads.iter().enumerate() {
            b[0][2 * i] = g[0];
            b[1][2 * i + 1] = g[1];
            b[2][2 * i] = g[1];
            b[2][2 * i + 1] = g[0];
        }
        b
    }
}

/// Shape values at the points of `rule`, constant gradients and area.
pub fn shape_tri3(mesh: &Mesh, element: usize, rule: &QuadRule) -> Result<(Vec<[f64; 3]>, Tri3Geom), ShapeError> {
    let geom = Tri3Geom::from_coords(mesh.element_coords(element))
        .ok_or(ShapeError::Degenerate { element, area: mesh.element_area(element) })?;
    Ok((rule.points.clone(), geom))
}

/// Interpolates nodal values `v` at barycentric point `n`.
#[inline]
pub fn interp(n: &[f64; 3], v: [f64; 3]) -> f64 {
    n[0] * v[0] + n[1] * v[1] + n[2] * v[2]
}
