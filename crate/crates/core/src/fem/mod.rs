//! P1 finite elements on triangle meshes: shape functions, quadrature,
//! sparse assembly of the phase-field, heat and elastic systems, L2
//! projection and boundary reactions.

mod assembly;
mod shape;
mod sparse;

pub use assembly::{Discretization, Projector};
pub use shape::{interp, quad_rule, shape_tri3, QuadRule, ShapeError, Tri3Geom, MIDPOINTS, NQ};
pub use sparse::{solve, CholeskySolver, Constraints, Factor, LinearSystem, Pattern, SolveError, SparseMatrix};

use crate::materials::Material;
use crate::mesh::Mesh;

/// Material of every element, stored as a small table plus per-element index.
#[derive(Debug, Clone)]
pub struct MaterialField {
    materials: Vec<Material>,
    element: Vec<usize>,
}

impl MaterialField {
    pub fn uniform(mesh: &Mesh, material: Material) -> Self {
        Self { materials: vec![material], element: vec![0; mesh.num_elements()] }
    }

    /// Maps region ids to materials; every element's region must be listed.
    pub fn from_regions(mesh: &Mesh, regions: &[(usize, Material)]) -> Result<Self, String> {
        let mut element = Vec::with_capacity(mesh.num_elements());
        for (e, tri) in mesh.elements().iter().enumerate() {
            let k = regions
                .iter()
                .position(|(r, _)| *r == tri.region)
                .ok_or_else(|| format!("element {e} lies in region {} which has no material", tri.region))?;
            element.push(k);
        }
        Ok(Self { materials: regions.iter().map(|(_, m)| *m).collect(), element })
    }

    #[inline]
    pub fn of(&self, e: usize) -> &Material {
        &self.materials[self.element[e]]
    }

    pub fn materials(&self) -> &[Material] {
        &self.materials
    }
}

/// One scalar per quadrature point per element, indexed `e * NQ + q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadField {
    pub values: Vec<f64>,
}

impl QuadField {
    pub fn constant(num_elements: usize, v: f64) -> Self {
        Self { values: vec![v; num_elements * NQ] }
    }

    #[inline]
    pub fn at(&self, e: usize) -> [f64; NQ] {
        let k = e * NQ;
        [self.values[k], self.values[k + 1], self.values[k + 2]]
    }
}
