use std::sync::Arc;

use rayon::prelude::*;

use super::shape::{interp, Tri3Geom, MIDPOINTS, NQ};
use super::sparse::{CholeskySolver, Factor, LinearSystem, Pattern, SolveError, SparseMatrix};
use super::{MaterialField, QuadField, ShapeError};
use crate::materials::{elastic_strain, SymTensor2};
use crate::mesh::{Mesh, MeshError};

const W: f64 = 1.0 / 3.0;
/// Two-point Gauss abscissae on [0, 1].
const GAUSS2: [f64; 2] = [0.5 - 0.288_675_134_594_812_9, 0.5 + 0.288_675_134_594_812_9];

/// Mesh, materials, element geometry and sparsity patterns of one problem.
pub struct Discretization {
    pub mesh: Mesh,
    pub materials: MaterialField,
    pub geoms: Vec<Tri3Geom>,
    pub scalar: Arc<Pattern>,
    pub vector: Arc<Pattern>,
}

#[inline]
fn nodal<const B: usize>(field: &[f64], nodes: [usize; 3], c: usize) -> [f64; 3] {
    nodes.map(|n| field[n * B + c])
}

#[inline]
fn consistent_mass(area: f64, i: usize, j: usize) -> f64 {
    area / 12.0 * if i == j { 2.0 } else { 1.0 }
}

#[inline]
fn grad_dot(g: &Tri3Geom, i: usize, j: usize) -> f64 {
    g.grads[i][0] * g.grads[j][0] + g.grads[i][1] * g.grads[j][1]
}

/// `B^T M B` and `B^T M [1, 1, 0]` contributions of one quadrature point.
fn bt_m(b: &[[f64; 6]; 3], m: &[[f64; 3]; 3]) -> [[f64; 3]; 6] {
    let mut out = [[0.0; 3]; 6];
    for a in 0..6 {
        for j in 0..3 {
            out[a][j] = (0..3).map(|i| b[i][a] * m[i][j]).sum();
        }
    }
    out
}

impl Discretization {
    pub fn new(mesh: Mesh, materials: MaterialField) -> Result<Self, ShapeError> {
        let geoms = (0..mesh.num_elements())
            .map(|e| {
                Tri3Geom::from_coords(mesh.element_coords(e))
                    .ok_or(ShapeError::Degenerate { element: e, area: mesh.element_area(e) })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let scalar = Pattern::from_mesh(&mesh, 1);
        let vector = Pattern::from_mesh(&mesh, 2);
        Ok(Self { mesh, materials, geoms, scalar, vector })
    }

    pub fn num_nodes(&self) -> usize {
        self.mesh.num_nodes()
    }

    pub fn num_elements(&self) -> usize {
        self.mesh.num_elements()
    }

    fn nodes(&self, e: usize) -> [usize; 3] {
        self.mesh.elements()[e].nodes
    }

    /// Element strain from nodal displacements `(u1, u2)` interleaved.
    pub fn strain(&self, e: usize, u: &[f64]) -> SymTensor2 {
        let g = &self.geoms[e];
        let mut eps = [0.0; 3];
        for (i, &n) in self.nodes(e).iter().enumerate() {
            let (ux, uy) = (u[2 * n], u[2 * n + 1]);
            eps[0] += g.grads[i][0] * ux;
            eps[1] += g.grads[i][1] * uy;
            eps[2] += 0.5 * (g.grads[i][1] * ux + g.grads[i][0] * uy);
        }
        SymTensor2::new(eps[0], eps[1], eps[2])
    }

    pub fn mass_matrix(&self) -> SparseMatrix {
        let mut m = SparseMatrix::zeros(Arc::clone(&self.scalar));
        for e in 0..self.num_elements() {
            let area = self.geoms[e].area;
            let mut ke = [0.0; 9];
            for i in 0..3 {
                for j in 0..3 {
                    ke[i * 3 + j] = consistent_mass(area, i, j);
                }
            }
            m.scatter(&self.nodes(e), &ke);
        }
        m
    }

    /// Factorized mass matrix for repeated L2 projections.
    pub fn projector(&self) -> Result<Projector, SolveError> {
        let factor = CholeskySolver::new().factor(&self.mass_matrix())?;
        Ok(Projector { factor })
    }

    /// Quadrature-point values of the nodal field `v`.
    pub fn sample(&self, v: &[f64]) -> QuadField {
        let mut out = Vec::with_capacity(self.num_elements() * NQ);
        for e in 0..self.num_elements() {
            let vn = nodal::<1>(v, self.nodes(e), 0);
            out.extend(MIDPOINTS.iter().map(|n| interp(n, vn)));
        }
        QuadField { values: out }
    }

    /// The reaction term `(2H + Gc/ls) s v` is integrated with the vertex
    /// rule (row-sum lumping): with non-obtuse triangles the matrix is then an
    /// M-matrix and `0 <= s <= 1` holds exactly for `H >= 0`. The consistent
    /// form produces undershoots of a few percent next to fully broken zones.
    fn phase_field_element(&self, e: usize, h: &[f64]) -> ([f64; 9], [f64; 3]) {
        let g = &self.geoms[e];
        let f = &self.materials.of(e).fracture;
        let hn = nodal::<1>(h, self.nodes(e), 0);
        let mut ke = [0.0; 9];
        for i in 0..3 {
            for j in 0..3 {
                ke[i * 3 + j] = f.gc * f.ls * g.area * grad_dot(g, i, j);
            }
            ke[i * 3 + i] += g.area / 3.0 * (2.0 * hn[i] + f.gc / f.ls);
        }
        let fe = [f.gc / f.ls * g.area / 3.0; 3];
        (ke, fe)
    }

    /// Phase-field system for the nodal history field `h`; natural boundary
    /// conditions everywhere.
    pub fn assemble_phase_field(&self, h: &[f64]) -> LinearSystem {
        let parts: Vec<_> = (0..self.num_elements()).into_par_iter().map(|e| self.phase_field_element(e, h)).collect();
        let mut sys = LinearSystem::zeros(Arc::clone(&self.scalar));
        for (e, (ke, fe)) in parts.iter().enumerate() {
            let dofs = self.nodes(e);
            sys.a.scatter(&dofs, ke);
            for (i, &d) in dofs.iter().enumerate() {
                sys.b[d] += fe[i];
            }
        }
        sys
    }

    /// Bilinear and linear phase-field forms evaluated at `(s, s)` and `s`.
    pub fn phase_field_energy(&self, s: &[f64], h: &[f64]) -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for e in 0..self.num_elements() {
            let (ke, fe) = self.phase_field_element(e, h);
            let sn = nodal::<1>(s, self.nodes(e), 0);
            for i in 0..3 {
                b += fe[i] * sn[i];
                for j in 0..3 {
                    a += sn[i] * ke[i * 3 + j] * sn[j];
                }
            }
        }
        (a, b)
    }

    fn heat_element(&self, e: usize, s: &[f64], t_old: &[f64], dt: f64) -> ([f64; 9], [f64; 3]) {
        let g = &self.geoms[e];
        let mat = self.materials.of(e);
        let nodes = self.nodes(e);
        let sn = nodal::<1>(s, nodes, 0);
        let tn = nodal::<1>(t_old, nodes, 0);
        let k_mean: f64 = MIDPOINTS.iter().map(|n| W * mat.conductivity(interp(n, sn))).sum();
        let cap = mat.thermal.rho * mat.thermal.c / dt;
        let mut ke = [0.0; 9];
        let mut fe = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                let m = consistent_mass(g.area, i, j);
                ke[i * 3 + j] = k_mean * g.area * grad_dot(g, i, j) + cap * m;
                fe[i] += cap * m * tn[j];
            }
        }
        (ke, fe)
    }

    /// Backward-Euler heat system `(C/dt + K(s)) T = C/dt T_old`.
    pub fn assemble_heat(&self, s: &[f64], t_old: &[f64], dt: f64) -> LinearSystem {
        assert!(dt > 0.0, "time step must be positive");
        let parts: Vec<_> =
            (0..self.num_elements()).into_par_iter().map(|e| self.heat_element(e, s, t_old, dt)).collect();
        let mut sys = LinearSystem::zeros(Arc::clone(&self.scalar));
        for (e, (ke, fe)) in parts.iter().enumerate() {
            let dofs = self.nodes(e);
            sys.a.scatter(&dofs, ke);
            for (i, &d) in dofs.iter().enumerate() {
                sys.b[d] += fe[i];
            }
        }
        sys
    }

    /// Elastic element blocks at frozen branch state `(u_prev, t_prev)`:
    /// stiffness, thermal pre-stress load and the temperature coupling
    /// `K_uT` (6 x 3, acting on nodal temperatures).
    fn elastic_element(&self, e: usize, s: &[f64], u_prev: &[f64], t_prev: &[f64]) -> ([f64; 36], [f64; 6], [[f64; 3]; 6]) {
        let g = &self.geoms[e];
        let mat = self.materials.of(e);
        let nodes = self.nodes(e);
        let b = g.b_matrix();
        let sn = nodal::<1>(s, nodes, 0);
        let tp = nodal::<1>(t_prev, nodes, 0);
        let eps_prev = self.strain(e, u_prev);
        let alpha = mat.thermal.alpha;
        let mut ke = [0.0; 36];
        let mut fe = [0.0; 6];
        let mut kut = [[0.0; 3]; 6];
        for n in &MIDPOINTS {
            let w = W * g.area;
            let (sq, tq) = (interp(n, sn), interp(n, tp));
            let tensile = elastic_strain(eps_prev, tq, &mat.thermal).trace() >= 0.0;
            let m = mat.modulus(tensile, sq);
            let btm = bt_m(&b, &m);
            let sig_f = mat.stress_thermal(eps_prev, sq, tq);
            let sf = [sig_f.xx, sig_f.yy, sig_f.xy];
            for a in 0..6 {
                for c in 0..6 {
                    ke[a * 6 + c] += w * (0..3).map(|k| btm[a][k] * b[k][c]).sum::<f64>();
                }
                fe[a] -= w * (0..3).map(|k| b[k][a] * sf[k]).sum::<f64>();
                let coupling = -w * alpha * (btm[a][0] + btm[a][1]);
                for j in 0..3 {
                    kut[a][j] += coupling * n[j];
                }
            }
        }
        (ke, fe, kut)
    }

    fn vector_dofs(&self, e: usize) -> [usize; 6] {
        let [a, b, c] = self.nodes(e);
        [2 * a, 2 * a + 1, 2 * b, 2 * b + 1, 2 * c, 2 * c + 1]
    }

    /// Displacement system with the temperature `t_now` moved to the load
    /// side: `K_uu u = b_u - K_uT T`.
    pub fn assemble_elastic(&self, s: &[f64], u_prev: &[f64], t_prev: &[f64], t_now: &[f64]) -> LinearSystem {
        let parts: Vec<_> =
            (0..self.num_elements()).into_par_iter().map(|e| self.elastic_element(e, s, u_prev, t_prev)).collect();
        let mut sys = LinearSystem::zeros(Arc::clone(&self.vector));
        for (e, (ke, fe, kut)) in parts.iter().enumerate() {
            let dofs = self.vector_dofs(e);
            let tn = nodal::<1>(t_now, self.nodes(e), 0);
            sys.a.scatter(&dofs, ke);
            for (a, &d) in dofs.iter().enumerate() {
                sys.b[d] += fe[a] - (0..3).map(|j| kut[a][j] * tn[j]).sum::<f64>();
            }
        }
        sys
    }

    /// Monolithic displacement-temperature system with interleaved
    /// `(u1, u2, T)` dofs per node. It is block lower-triangular: the
    /// temperature rows do not involve displacements.
    pub fn assemble_coupled(
        &self,
        s: &[f64],
        u_prev: &[f64],
        t_prev: &[f64],
        t_old: &[f64],
        dt: f64,
        pattern: &Arc<Pattern>,
    ) -> LinearSystem {
        assert_eq!(pattern.block, 3, "coupled pattern needs three dofs per node");
        let mut sys = LinearSystem::zeros(Arc::clone(pattern));
        for e in 0..self.num_elements() {
            let nodes = self.nodes(e);
            let (ke, fe, kut) = self.elastic_element(e, s, u_prev, t_prev);
            let (kh, fh) = self.heat_element(e, s, t_old, dt);
            let udof = |a: usize| 3 * nodes[a / 2] + a % 2;
            for a in 0..6 {
                for c in 0..6 {
                    sys.a.add(udof(a), udof(c), ke[a * 6 + c]);
                }
                for j in 0..3 {
                    sys.a.add(udof(a), 3 * nodes[j] + 2, kut[a][j]);
                }
                sys.b[udof(a)] += fe[a];
            }
            for i in 0..3 {
                for j in 0..3 {
                    sys.a.add(3 * nodes[i] + 2, 3 * nodes[j] + 2, kh[i * 3 + j]);
                }
                sys.b[3 * nodes[i] + 2] += fh[i];
            }
        }
        sys
    }

    /// Tensile elastic energy at quadrature points.
    pub fn psi_plus(&self, u: &[f64], t: &[f64]) -> QuadField {
        let values = (0..self.num_elements())
            .into_par_iter()
            .flat_map_iter(|e| {
                let mat = self.materials.of(e);
                let eps = self.strain(e, u);
                let tn = nodal::<1>(t, self.nodes(e), 0);
                MIDPOINTS.map(|n| mat.psi_plus(elastic_strain(eps, interp(&n, tn), &mat.thermal)))
            })
            .collect();
        QuadField { values }
    }

    /// Physical stress at each element centroid.
    pub fn element_stress(&self, u: &[f64], s: &[f64], t: &[f64]) -> Vec<SymTensor2> {
        (0..self.num_elements())
            .map(|e| {
                let nodes = self.nodes(e);
                let c = [1.0 / 3.0; 3];
                let sq = interp(&c, nodal::<1>(s, nodes, 0));
                let tq = interp(&c, nodal::<1>(t, nodes, 0));
                self.materials.of(e).stress_at(self.strain(e, u), sq, tq)
            })
            .collect()
    }

    /// Boundary integral of the traction `sigma . n` over edges tagged `tag`.
    pub fn reaction_force(&self, tag: &str, u: &[f64], s: &[f64], t: &[f64]) -> Result<[f64; 2], MeshError> {
        let mut force = [0.0; 2];
        for i in self.mesh.edges_with_tag(tag)? {
            let (e, k) = self.mesh.edge_owner(i);
            let nodes = self.nodes(e);
            let p = self.mesh.element_coords(e);
            let (a, b) = (k, (k + 1) % 3);
            let (dx, dy) = (p[b][0] - p[a][0], p[b][1] - p[a][1]);
            let len = dx.hypot(dy);
            let normal = [dy / len, -dx / len];
            let mat = self.materials.of(e);
            let eps = self.strain(e, u);
            for xi in GAUSS2 {
                let mut n = [0.0; 3];
                n[a] = 1.0 - xi;
                n[b] = xi;
                let sq = interp(&n, nodal::<1>(s, nodes, 0));
                let tq = interp(&n, nodal::<1>(t, nodes, 0));
                let tr = mat.stress_at(eps, sq, tq).dot_vec(normal);
                force[0] += 0.5 * len * tr[0];
                force[1] += 0.5 * len * tr[1];
            }
        }
        Ok(force)
    }

    /// Discrete entropy production `int k/T |grad T|^2`; `None` when some
    /// nodal temperature is not positive.
    pub fn entropy_production(&self, s: &[f64], t: &[f64]) -> Option<f64> {
        if t.iter().any(|&v| !(v > 0.0)) {
            return None;
        }
        let mut total = 0.0;
        for e in 0..self.num_elements() {
            let g = &self.geoms[e];
            let mat = self.materials.of(e);
            let nodes = self.nodes(e);
            let sn = nodal::<1>(s, nodes, 0);
            let tn = nodal::<1>(t, nodes, 0);
            let grad = [0, 1].map(|d| (0..3).map(|i| g.grads[i][d] * tn[i]).sum::<f64>());
            let g2 = grad[0] * grad[0] + grad[1] * grad[1];
            total += MIDPOINTS
                .iter()
                .map(|n| W * g.area * mat.conductivity(interp(n, sn)) / interp(n, tn) * g2)
                .sum::<f64>();
        }
        Some(total)
    }
}

/// L2 projection of quadrature data onto continuous P1 fields.
pub struct Projector {
    factor: Factor,
}

impl Projector {
    pub fn project(&self, disc: &Discretization, q: &QuadField) -> Result<Vec<f64>, SolveError> {
        let mut b = vec![0.0; disc.num_nodes()];
        for e in 0..disc.num_elements() {
            let area = disc.geoms[e].area;
            let qe = q.at(e);
            for (k, n) in MIDPOINTS.iter().enumerate() {
                for (i, &node) in disc.nodes(e).iter().enumerate() {
                    b[node] += W * area * qe[k] * n[i];
                }
            }
        }
        self.factor.solve(&b)
    }
}
