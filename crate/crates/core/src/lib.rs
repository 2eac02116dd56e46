//! Phase-field finite-element modelling of brittle fracture under coupled
//! thermo-mechanical loading in two dimensions.
//!
//! The crate is organised bottom-up:
//!
//! - [`mesh`]: triangle meshes, Gmsh MSH 2.2 I/O and benchmark geometries
//! - [`materials`]: constitutive kernels (split stresses, tensile energy, conductivity)
//! - [`fem`]: P1 shape functions, quadrature, sparse assembly and direct solves
//! - [`solver`]: load ramps and the staggered phase-field / thermo-elastic loop
//! - [`io`]: JSON run configuration, VTK and CSV output
//! - [`benchmarks`]: built-in problem definitions and crack-pattern diagnostics

pub mod benchmarks;
pub mod fem;
pub mod io;
pub mod materials;
pub mod mesh;
pub mod solver;
