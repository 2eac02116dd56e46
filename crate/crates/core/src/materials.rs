//! Constitutive kernels: elasticity tensor, volumetric/deviatoric split,
//! branched stresses, tensile energy and degraded conductivity.
//!
//! Tensors are 2D and symmetric. [`SymTensor2`] stores tensor components
//! `(a11, a22, a12)` (not engineering shear), so the double contraction is
//! `a11 b11 + a22 b22 + 2 a12 b12`.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MaterialError {
    #[error("invalid material parameter {name} = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> MaterialError {
    MaterialError::InvalidParameter { name, value, reason }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor2 {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
}

impl SymTensor2 {
    pub const ZERO: Self = Self { xx: 0.0, yy: 0.0, xy: 0.0 };
    pub const IDENTITY: Self = Self { xx: 1.0, yy: 1.0, xy: 0.0 };

    pub const fn new(xx: f64, yy: f64, xy: f64) -> Self {
        Self { xx, yy, xy }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    pub fn ddot(&self, o: &Self) -> f64 {
        self.xx * o.xx + self.yy * o.yy + 2.0 * self.xy * o.xy
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.ddot(self).sqrt()
    }

    /// Engineering (Voigt) vector `[a11, a22, 2 a12]`.
    pub fn to_voigt(&self) -> [f64; 3] {
        [self.xx, self.yy, 2.0 * self.xy]
    }

    pub fn from_voigt(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], 0.5 * v[2])
    }

    pub fn dot_vec(&self, n: [f64; 2]) -> [f64; 2] {
        [self.xx * n[0] + self.xy * n[1], self.xy * n[0] + self.yy * n[1]]
    }
}

impl Add for SymTensor2 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.xx + o.xx, self.yy + o.yy, self.xy + o.xy)
    }
}

impl Sub for SymTensor2 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.xx - o.xx, self.yy - o.yy, self.xy - o.xy)
    }
}

impl Neg for SymTensor2 {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.xx, -self.yy, -self.xy)
    }
}

impl Mul<SymTensor2> for f64 {
    type Output = SymTensor2;
    fn mul(self, t: SymTensor2) -> SymTensor2 {
        SymTensor2::new(self * t.xx, self * t.yy, self * t.xy)
    }
}

/// Fourth-order tensor with minor and major symmetries in 2D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymTensor4 {
    pub c1111: f64,
    pub c1112: f64,
    pub c1122: f64,
    pub c1212: f64,
    pub c2212: f64,
    pub c2222: f64,
}

impl SymTensor4 {
    pub fn apply(&self, e: SymTensor2) -> SymTensor2 {
        SymTensor2::new(
            self.c1111 * e.xx + self.c1122 * e.yy + 2.0 * self.c1112 * e.xy,
            self.c1122 * e.xx + self.c2222 * e.yy + 2.0 * self.c2212 * e.xy,
            self.c1112 * e.xx + self.c2212 * e.yy + 2.0 * self.c1212 * e.xy,
        )
    }

    /// Matrix mapping engineering strain `[e11, e22, 2 e12]` to `[s11, s22, s12]`.
    pub fn voigt(&self) -> [[f64; 3]; 3] {
        [
            [self.c1111, self.c1122, self.c1112],
            [self.c1122, self.c2222, self.c2212],
            [self.c1112, self.c2212, self.c1212],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanarMode {
    PlaneStress,
    PlaneStrain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElasticLaw {
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
    pub mode: PlanarMode,
}

impl ElasticLaw {
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.e, self.nu);
        (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalLaw {
    pub k0: f64,
    pub rho: f64,
    pub c: f64,
    pub alpha: f64,
    #[serde(rename = "T0")]
    pub t0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FractureLaw {
    #[serde(rename = "Gc")]
    pub gc: f64,
    pub ls: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
}

pub const DEFAULT_ETA: f64 = 1e-8;

fn default_eta() -> f64 {
    DEFAULT_ETA
}

pub fn elastic_tensor(law: &ElasticLaw) -> Result<SymTensor4, MaterialError> {
    let (e, nu) = (law.e, law.nu);
    if !(e > 0.0 && e.is_finite()) {
        return Err(invalid("E", e, "must be positive"));
    }
    if !(nu > -1.0 && nu < 0.5) {
        return Err(invalid("nu", nu, "must lie in (-1, 0.5)"));
    }
    let (c1111, c1122) = match law.mode {
        PlanarMode::PlaneStress => (e / (1.0 - nu * nu), nu * e / (1.0 - nu * nu)),
        PlanarMode::PlaneStrain => {
            let d = 1.0 - nu - 2.0 * nu * nu;
            (e * (1.0 - nu * nu) / ((1.0 + nu) * d), nu * e / d)
        }
    };
    Ok(SymTensor4 { c1111, c1112: 0.0, c1122, c1212: e / (2.0 * (1.0 + nu)), c2212: 0.0, c2222: c1111 })
}

/// Volumetric and deviatoric parts with the 1/3 volumetric factor.
pub fn project(eps: SymTensor2) -> (SymTensor2, SymTensor2) {
    let m = eps.trace() / 3.0;
    let vol = SymTensor2::new(m, m, 0.0);
    (vol, eps - vol)
}

pub fn degradation(s: f64, eta: f64) -> f64 {
    s * s + eta
}

pub fn elastic_strain(eps: SymTensor2, t: f64, thermal: &ThermalLaw) -> SymTensor2 {
    eps - (thermal.alpha * (t - thermal.t0)) * SymTensor2::IDENTITY
}

/// Full constitutive description of one region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub elastic: ElasticLaw,
    pub thermal: ThermalLaw,
    pub fracture: FractureLaw,
    /// Degrade conductivity with the phase field.
    pub degrade_k: bool,
    pub tensor: SymTensor4,
}

impl Material {
    pub fn new(
        elastic: ElasticLaw,
        thermal: ThermalLaw,
        fracture: FractureLaw,
        degrade_k: bool,
    ) -> Result<Self, MaterialError> {
        let tensor = elastic_tensor(&elastic)?;
        let t = &thermal;
        if !(t.k0 >= 0.0 && t.k0.is_finite()) {
            return Err(invalid("k0", t.k0, "must be non-negative"));
        }
        if !(t.rho >= 0.0 && t.rho.is_finite()) {
            return Err(invalid("rho", t.rho, "must be non-negative"));
        }
        if !(t.c > 0.0 && t.c.is_finite()) {
            return Err(invalid("c", t.c, "must be positive"));
        }
        if !t.alpha.is_finite() || !t.t0.is_finite() {
            return Err(invalid("alpha", t.alpha, "must be finite"));
        }
        let f = &fracture;
        if !(f.gc > 0.0 && f.gc.is_finite()) {
            return Err(invalid("Gc", f.gc, "must be positive"));
        }
        if !(f.ls > 0.0 && f.ls.is_finite()) {
            return Err(invalid("ls", f.ls, "must be positive"));
        }
        if !(0.0..1.0).contains(&f.eta) {
            return Err(invalid("eta", f.eta, "must lie in [0, 1)"));
        }
        Ok(Self { elastic, thermal, fracture, degrade_k, tensor })
    }

    pub fn g(&self, s: f64) -> f64 {
        degradation(s, self.fracture.eta)
    }

    /// Branched stress: `tr(branch) >= 0` degrades all of `C eps`, otherwise
    /// only its deviatoric part.
    pub fn stress(&self, eps_elas: SymTensor2, branch: SymTensor2, s: f64) -> SymTensor2 {
        let sig = self.tensor.apply(eps_elas);
        let g = self.g(s);
        if branch.trace() >= 0.0 {
            g * sig
        } else {
            let (vol, dev) = project(sig);
            g * dev + vol
        }
    }

    fn branch_strain(&self, eps_prev: SymTensor2, t_prev: f64) -> SymTensor2 {
        elastic_strain(eps_prev, t_prev, &self.thermal)
    }

    /// Bilinear-side stress, using the absolute temperature in the thermal strain.
    pub fn stress_total(&self, eps: SymTensor2, eps_prev: SymTensor2, s: f64, t: f64, t_prev: f64) -> SymTensor2 {
        let arg = eps - (self.thermal.alpha * t) * SymTensor2::IDENTITY;
        self.stress(arg, self.branch_strain(eps_prev, t_prev), s)
    }

    /// Reference-temperature pre-stress `Cmod (alpha T0 I)`; the physical
    /// stress is `stress_total + stress_thermal`, so it enters the load side
    /// of the displacement system with a minus sign.
    pub fn stress_thermal(&self, eps_prev: SymTensor2, s: f64, t_prev: f64) -> SymTensor2 {
        let arg = (self.thermal.alpha * self.thermal.t0) * SymTensor2::IDENTITY;
        self.stress(arg, self.branch_strain(eps_prev, t_prev), s)
    }

    /// Physical stress at a state, branch taken from the same state.
    pub fn stress_at(&self, eps: SymTensor2, s: f64, t: f64) -> SymTensor2 {
        let e = elastic_strain(eps, t, &self.thermal);
        self.stress(e, e, s)
    }

    /// Engineering-strain modulus of the branched operator: `sigma = M [e11, e22, 2 e12]`.
    pub fn modulus(&self, tensile: bool, s: f64) -> [[f64; 3]; 3] {
        let d = self.tensor.voigt();
        let g = self.g(s);
        let mut m = [[0.0; 3]; 3];
        for j in 0..3 {
            let col = [d[0][j], d[1][j], d[2][j]];
            let out = if tensile {
                col.map(|v| g * v)
            } else {
                let mean = (col[0] + col[1]) / 3.0;
                [g * (col[0] - mean) + mean, g * (col[1] - mean) + mean, g * col[2]]
            };
            for i in 0..3 {
                m[i][j] = out[i];
            }
        }
        m
    }

    /// Tensile elastic energy driving damage.
    pub fn psi_plus(&self, eps_elas: SymTensor2) -> f64 {
        let sig = self.tensor.apply(eps_elas);
        let psi = if eps_elas.trace() >= 0.0 {
            0.5 * eps_elas.ddot(&sig)
        } else {
            0.5 * project(sig).1.ddot(&project(eps_elas).1)
        };
        psi.max(0.0)
    }

    pub fn conductivity(&self, s: f64) -> f64 {
        conductivity(s, &self.thermal, self.fracture.eta, self.degrade_k)
    }
}

pub fn conductivity(s: f64, thermal: &ThermalLaw, eta: f64, degrade: bool) -> f64 {
    if degrade {
        degradation(s, eta) * thermal.k0
    } else {
        thermal.k0
    }
}
