//! JSON run configuration.
//!
//! Lengths in the mesh section (generator parameters, Gmsh coordinates) and
//! boundary-condition points are multiplied by `unit_scale` to obtain
//! meters; every other quantity is SI.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::fem::{Discretization, MaterialField};
use crate::materials::{ElasticLaw, FractureLaw, Material, ThermalLaw};
use crate::mesh::{generate_rect, load_gmsh, Mesh, MeshError, RectSpec};
use crate::solver::{DofBc, LoadProgram, Problem, StaggeredConfig};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("invalid override `{0}` (expected key.path=value)")]
    Override(String),
    #[error("{0}")]
    Invalid(String),
    #[error("mesh: {0}")]
    Mesh(#[from] MeshError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshSource {
    /// Path to an MSH 2.2 ASCII file, relative to the config file.
    Gmsh(PathBuf),
    Generate(RectSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialEntry {
    /// Region name; omitted means every region not listed elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    pub elastic: ElasticLaw,
    pub thermal: ThermalLaw,
    pub fracture: FractureLaw,
    #[serde(default = "yes")]
    pub degrade_k: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    U1,
    U2,
    Both,
}

/// Where a condition applies: all nodes of a boundary tag, or the node
/// nearest to a point (for removing rigid-body modes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisplacementBc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 2]>,
    pub component: Component,
    /// Constant part, m.
    #[serde(default)]
    pub value: f64,
    /// Multiplier of the applied displacement.
    #[serde(default)]
    pub ramp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureBc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<[f64; 2]>,
    /// Base temperature, K; defaults to the load program's `T0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    /// Multiplier of the applied temperature rise `TApp - T0`.
    #[serde(default)]
    pub ramp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Write fields every this many steps (0: final state only).
    #[serde(default)]
    pub every: usize,
    #[serde(default = "yes")]
    pub vtk: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { every: 0, vtk: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub mesh: MeshSource,
    #[serde(default = "unit")]
    pub unit_scale: f64,
    pub materials: Vec<MaterialEntry>,
    #[serde(default)]
    pub displacement_bcs: Vec<DisplacementBc>,
    #[serde(default)]
    pub temperature_bcs: Vec<TemperatureBc>,
    pub load: LoadProgram,
    #[serde(default)]
    pub staggered: StaggeredConfig,
    /// Initial body temperature, K; defaults to `load.T0`.
    #[serde(default, rename = "initial_T", skip_serializing_if = "Option::is_none")]
    pub initial_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaction_tag: Option<String>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn unit() -> f64 {
    1.0
}

fn schema_error(err: serde_path_to_error::Error<serde_json::Error>) -> ConfigError {
    let path = err.path().to_string();
    let message = err.inner().to_string();
    // name the missing key itself, e.g. `materials[0].fracture.Gc`
    if let Some(rest) = message.strip_prefix("missing field `") {
        if let Some(field) = rest.split('`').next() {
            let full = if path == "." { field.to_string() } else { format!("{path}.{field}") };
            return ConfigError::Schema { path: full, message: "missing field".into() };
        }
    }
    ConfigError::Schema { path, message }
}

/// Applies `a.b.0.c=value` overrides to a JSON tree; values are parsed as
/// JSON when possible and taken as strings otherwise.
pub fn apply_overrides(root: &mut Value, overrides: &[String]) -> Result<(), ConfigError> {
    for ov in overrides {
        let (key, raw) = ov.split_once('=').ok_or_else(|| ConfigError::Override(ov.clone()))?;
        if key.is_empty() {
            return Err(ConfigError::Override(ov.clone()));
        }
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut *root;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            let last = i + 1 == parts.len();
            node = match node {
                Value::Array(items) => {
                    let idx: usize = part.parse().map_err(|_| ConfigError::Override(ov.clone()))?;
                    items.get_mut(idx).ok_or_else(|| ConfigError::Override(ov.clone()))?
                }
                Value::Object(map) => map.entry(part.to_string()).or_insert(Value::Null),
                other @ Value::Null => {
                    *other = Value::Object(Default::default());
                    other.as_object_mut().unwrap().entry(part.to_string()).or_insert(Value::Null)
                }
                _ => return Err(ConfigError::Override(ov.clone())),
            };
            if last {
                *node = value.clone();
            }
        }
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &[])
}

pub fn parse_config_with(text: &str, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let mut value: Value = serde_json::from_str(text)?;
    apply_overrides(&mut value, overrides)?;
    from_value(value)
}

pub fn from_value(value: Value) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(schema_error)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
    parse_config_with(&text, overrides)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.unit_scale > 0.0 && self.unit_scale.is_finite()) {
            return bad(format!("unit_scale = {} must be positive", self.unit_scale));
        }
        if self.materials.is_empty() {
            return bad("materials: at least one material is required".into());
        }
        let mut seen = BTreeSet::new();
        for (i, m) in self.materials.iter().enumerate() {
            if !seen.insert(m.region.clone()) {
                return bad(format!("materials[{i}]: region {:?} listed twice", m.region));
            }
            Material::new(m.elastic, m.thermal, m.fracture, m.degrade_k)
                .map_err(|e| ConfigError::Invalid(format!("materials[{i}]: {e}")))?;
        }
        for (i, bc) in self.displacement_bcs.iter().enumerate() {
            if bc.tag.is_some() == bc.point.is_some() {
                return bad(format!("displacement_bcs[{i}]: give exactly one of `tag` or `point`"));
            }
        }
        for (i, bc) in self.temperature_bcs.iter().enumerate() {
            if bc.tag.is_some() == bc.point.is_some() {
                return bad(format!("temperature_bcs[{i}]: give exactly one of `tag` or `point`"));
            }
        }
        self.load.validate().map_err(ConfigError::Invalid)?;
        if !(self.staggered.tol > 0.0) || self.staggered.inner_max == 0 {
            return bad("staggered: tol must be > 0 and inner_max >= 1".into());
        }
        Ok(())
    }

    /// Loads or generates the mesh, in meters.
    pub fn build_mesh(&self, base_dir: &Path) -> Result<Mesh, ConfigError> {
        match &self.mesh {
            MeshSource::Generate(spec) => Ok(generate_rect(&spec.scaled(self.unit_scale))?),
            MeshSource::Gmsh(rel) => {
                let path = base_dir.join(rel);
                let file = std::fs::File::open(&path).map_err(|source| ConfigError::Io { path: path.clone(), source })?;
                let mesh = load_gmsh(std::io::BufReader::new(file))?;
                if self.unit_scale == 1.0 {
                    return Ok(mesh);
                }
                let nodes = mesh.nodes().iter().map(|p| [p[0] * self.unit_scale, p[1] * self.unit_scale]).collect();
                Ok(Mesh::new(nodes, mesh.elements().to_vec(), mesh.boundary_edges().to_vec(), mesh.names().to_vec())?)
            }
        }
    }

    fn target_nodes(&self, mesh: &Mesh, tag: &Option<String>, point: &Option<[f64; 2]>) -> Result<Vec<usize>, ConfigError> {
        match (tag, point) {
            (Some(t), _) => Ok(mesh.boundary_nodes(t)?),
            (None, Some(p)) => Ok(vec![mesh.nearest_node([p[0] * self.unit_scale, p[1] * self.unit_scale])]),
            (None, None) => Err(ConfigError::Invalid("boundary condition without target".into())),
        }
    }

    pub fn build_problem(&self, mesh: Mesh) -> Result<Problem, ConfigError> {
        let mut regions = Vec::new();
        let default = self.materials.iter().find(|m| m.region.is_none());
        let material = |m: &MaterialEntry| {
            Material::new(m.elastic, m.thermal, m.fracture, m.degrade_k).map_err(|e| ConfigError::Invalid(e.to_string()))
        };
        for name in self.materials.iter().filter_map(|m| m.region.as_ref()) {
            if mesh.region_id(name).is_err() {
                return Err(ConfigError::Invalid(format!("material region `{name}` does not exist in the mesh")));
            }
        }
        for id in mesh.region_ids() {
            let name = mesh.region_name(id);
            let entry = self.materials.iter().find(|m| m.region.is_some() && m.region.as_deref() == name).or(default);
            match entry {
                Some(m) => regions.push((id, material(m)?)),
                None => {
                    return Err(ConfigError::Invalid(format!(
                        "region {} has no material",
                        name.map_or_else(|| id.to_string(), str::to_string)
                    )))
                }
            }
        }
        let field = MaterialField::from_regions(&mesh, &regions).map_err(ConfigError::Invalid)?;

        let mut displacement = Vec::new();
        for bc in &self.displacement_bcs {
            let comps: &[usize] = match bc.component {
                Component::U1 => &[0],
                Component::U2 => &[1],
                Component::Both => &[0, 1],
            };
            for n in self.target_nodes(&mesh, &bc.tag, &bc.point)? {
                for &c in comps {
                    displacement.push(DofBc { dof: 2 * n + c, value: bc.value, ramp: bc.ramp });
                }
            }
        }
        let mut temperature = Vec::new();
        for bc in &self.temperature_bcs {
            let value = bc.value.unwrap_or(self.load.t0);
            for n in self.target_nodes(&mesh, &bc.tag, &bc.point)? {
                temperature.push(DofBc { dof: n, value, ramp: bc.ramp });
            }
        }
        if let Some(tag) = &self.reaction_tag {
            mesh.tag_id(tag)?;
        }
        let disc = Discretization::new(mesh, field).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(Problem {
            disc,
            displacement,
            temperature,
            reaction_tag: self.reaction_tag.clone(),
            initial_temperature: self.initial_t.unwrap_or(self.load.t0),
        })
    }

    pub fn staggered(&self) -> StaggeredConfig {
        self.staggered
    }
}
