//! Run configuration: a TOML document that fully determines a run.
//!
//! See `docs/config.md` for the schema reference. Validation failures are
//! reported as [`ConfigError`] and map to exit code 2.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use magnetoforge::formulations::RegionLaws;
use magnetoforge::material::{fit_energy, load_bh_csv, EnergyLaw};
use magnetoforge::mesh::{generate_box, load_msh, GridBox, Mesh};
use magnetoforge::solver::NewtonConfig;
use magnetoforge::sources::SourceField;
use magnetoforge::MU0;
use nalgebra::Vector3;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config {path}: {source}")]
    Parse { path: PathBuf, source: Box<toml::de::Error> },
    #[error("mesh section must set exactly one of `path` or `box`")]
    MeshSource,
    #[error("mesh box size n must be >= 2, got {0}")]
    BoxSize(usize),
    #[error("inclusion fractions must satisfy 0 <= lo < hi <= 1, got lo={lo:?} hi={hi:?}")]
    InclusionRange { lo: [f64; 3], hi: [f64; 3] },
    #[error("inclusion snapped to an empty box at level n={n} (lo={lo:?} hi={hi:?})")]
    InclusionEmpty { n: usize, lo: [usize; 3], hi: [usize; 3] },
    #[error("material key {0:?} is not an integer region tag")]
    BadRegionKey(String),
    #[error("mesh region {0} has no material binding")]
    UnboundRegion(i32),
    #[error("material for region {tag}: mu_r must be positive, got {mu_r}")]
    BadMu { tag: i32, mu_r: f64 },
    #[error("material for region {tag}: {source}")]
    Material { tag: i32, source: magnetoforge::material::MaterialError },
    #[error("mesh error: {0}")]
    Mesh(#[from] magnetoforge::mesh::MeshError),
    #[error("source {index}: {source}")]
    Source { index: usize, source: magnetoforge::sources::SourceError },
    #[error("source {index}: filament_loop needs >= 4 vertices with first == last")]
    SourceShape { index: usize },
    #[error("at least one source is required")]
    NoSources,
    #[error("formulation must be one of mixed | scalar | vector | all, got {0:?}")]
    BadFormulation(String),
    #[error("polynomial degree p must be 1 or 2, got {0}")]
    BadDegree(usize),
    #[error("newton config: {0}")]
    Newton(String),
    #[error("compare section requires a generated box mesh (set [mesh] box = ...)")]
    CompareNeedsBox,
    #[error("compare: {0}")]
    Compare(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mesh: MeshSpec,
    pub materials: BTreeMap<String, MaterialSpec>,
    #[serde(default)]
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub newton: NewtonConfig,
    #[serde(default)]
    pub compare: Option<CompareSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    pub path: Option<PathBuf>,
    #[serde(rename = "box")]
    pub box_spec: Option<BoxSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSpec {
    pub n: usize,
    pub inclusion: Option<InclusionSpec>,
}

/// Axis-aligned inclusion, as fractions of the unit cube; snapped to the
/// cell grid of each mesh level by rounding.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InclusionSpec {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MaterialSpec {
    Linear { mu_r: f64 },
    BhCsv { path: PathBuf },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceSpec {
    SquareLoop { lo: f64, hi: f64, z: f64, current: f64, #[serde(default = "one")] turns: f64 },
    FilamentLoop { vertices: Vec<[f64; 3]>, current: f64, #[serde(default = "one")] turns: f64 },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    #[serde(default = "default_formulation")]
    pub formulation: String,
    #[serde(default = "default_p")]
    pub p: usize,
}

fn default_formulation() -> String {
    "all".into()
}

fn default_p() -> usize {
    1
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec { formulation: default_formulation(), p: default_p() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    pub levels: Vec<usize>,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    #[serde(default = "default_excitations")]
    pub excitations: Vec<f64>,
}

fn default_degrees() -> Vec<usize> {
    vec![1, 2]
}

fn default_excitations() -> Vec<f64> {
    vec![1.0]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_report")]
    pub report: PathBuf,
    #[serde(default = "default_compare_csv")]
    pub compare_csv: PathBuf,
    /// When set, `solve` also writes `<prefix>_b.csv` (per-element mean b)
    /// and, for scalar-potential formulations, `<prefix>_psi.csv`.
    pub fields_prefix: Option<PathBuf>,
}

fn default_report() -> PathBuf {
    "report.json".into()
}

fn default_compare_csv() -> PathBuf {
    "compare.csv".into()
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec {
            report: default_report(),
            compare_csv: default_compare_csv(),
            fields_prefix: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulationChoice {
    Mixed,
    Scalar,
    Vector,
    All,
}

impl FormulationChoice {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "mixed" => Ok(FormulationChoice::Mixed),
            "scalar" => Ok(FormulationChoice::Scalar),
            "vector" => Ok(FormulationChoice::Vector),
            "all" => Ok(FormulationChoice::All),
            other => Err(ConfigError::BadFormulation(other.to_string())),
        }
    }
}

/// A fully validated configuration with loaded materials.
pub struct Config {
    pub raw: RawConfig,
    pub config_dir: PathBuf,
    pub formulation: FormulationChoice,
    pub p: usize,
    pub newton: NewtonConfig,
    pub materials: BTreeMap<i32, EnergyLaw>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let raw: RawConfig = toml::from_str(&text)
            .map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source: Box::new(source) })?;
        let config_dir = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Config::from_raw(raw, config_dir)
    }

    pub fn from_raw(raw: RawConfig, config_dir: PathBuf) -> Result<Config, ConfigError> {
        match (&raw.mesh.path, &raw.mesh.box_spec) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => return Err(ConfigError::MeshSource),
        }
        if let Some(b) = &raw.mesh.box_spec {
            if b.n < 2 {
                return Err(ConfigError::BoxSize(b.n));
            }
            if let Some(inc) = &b.inclusion {
                let ok = inc
                    .lo
                    .iter()
                    .zip(&inc.hi)
                    .all(|(l, h)| *l >= 0.0 && l < h && *h <= 1.0);
                if !ok {
                    return Err(ConfigError::InclusionRange { lo: inc.lo, hi: inc.hi });
                }
            }
        }
        if raw.sources.is_empty() {
            return Err(ConfigError::NoSources);
        }
        for (index, s) in raw.sources.iter().enumerate() {
            if let SourceSpec::FilamentLoop { vertices, .. } = s {
                if vertices.len() < 4 || vertices.first() != vertices.last() {
                    return Err(ConfigError::SourceShape { index });
                }
            }
        }
        let formulation = FormulationChoice::parse(&raw.run.formulation)?;
        let p = raw.run.p;
        if !(1..=2).contains(&p) {
            return Err(ConfigError::BadDegree(p));
        }
        let newton = raw.newton.clone();
        newton.validate().map_err(ConfigError::Newton)?;
        if let Some(c) = &raw.compare {
            if c.levels.is_empty() {
                return Err(ConfigError::Compare("levels must be non-empty".into()));
            }
            for &l in &c.levels {
                if l < 2 {
                    return Err(ConfigError::Compare(format!("level {l} < 2")));
                }
            }
            for &d in &c.degrees {
                if !(1..=2).contains(&d) {
                    return Err(ConfigError::BadDegree(d));
                }
            }
            if c.excitations.is_empty() {
                return Err(ConfigError::Compare("excitations must be non-empty".into()));
            }
        }
        let mut materials = BTreeMap::new();
        for (key, spec) in &raw.materials {
            let tag: i32 = key
                .parse()
                .map_err(|_| ConfigError::BadRegionKey(key.clone()))?;
            let law = match spec {
                MaterialSpec::Linear { mu_r } => {
                    if *mu_r <= 0.0 {
                        return Err(ConfigError::BadMu { tag, mu_r: *mu_r });
                    }
                    EnergyLaw::Linear { mu: mu_r * MU0 }
                }
                MaterialSpec::BhCsv { path } => {
                    let full = if path.is_absolute() {
                        path.clone()
                    } else {
                        config_dir.join(path)
                    };
                    let curve = load_bh_csv(&full)
                        .map_err(|source| ConfigError::Material { tag, source })?;
                    fit_energy(&curve).map_err(|source| ConfigError::Material { tag, source })?
                }
            };
            materials.insert(tag, law);
        }
        Ok(Config { raw, config_dir, formulation, p, newton, materials })
    }

    /// Build the mesh at level `n` (box meshes) or load the configured file.
    pub fn build_mesh(&self, n_override: Option<usize>) -> Result<Mesh, ConfigError> {
        if let Some(b) = &self.raw.mesh.box_spec {
            let n = n_override.unwrap_or(b.n);
            let inclusion = match &b.inclusion {
                None => None,
                Some(inc) => {
                    let snap = |f: f64| (f * n as f64).round() as usize;
                    let lo = [snap(inc.lo[0]), snap(inc.lo[1]), snap(inc.lo[2])];
                    let hi = [snap(inc.hi[0]), snap(inc.hi[1]), snap(inc.hi[2])];
                    if lo.iter().zip(&hi).any(|(l, h)| l >= h) {
                        return Err(ConfigError::InclusionEmpty { n, lo, hi });
                    }
                    Some(GridBox { lo, hi })
                }
            };
            Ok(generate_box(n, inclusion)?)
        } else {
            let path = self.raw.mesh.path.as_ref().expect("validated");
            let full = if path.is_absolute() { path.clone() } else { self.config_dir.join(path) };
            Ok(load_msh(full)?)
        }
    }

    /// Region laws for `mesh`, failing with the name of any unbound tag.
    pub fn region_laws(&self, mesh: &Mesh) -> Result<RegionLaws, ConfigError> {
        for tag in mesh.region_tags() {
            if !self.materials.contains_key(&tag) {
                return Err(ConfigError::UnboundRegion(tag));
            }
        }
        Ok(RegionLaws::new(self.materials.clone()))
    }

    /// The impressed source field, with every current scaled by `excitation`.
    pub fn build_source(&self, excitation: f64) -> Result<SourceField, ConfigError> {
        let mut parts = Vec::new();
        for (index, s) in self.raw.sources.iter().enumerate() {
            let part = match s {
                SourceSpec::SquareLoop { lo, hi, z, current, turns } => {
                    SourceField::square_loop(*lo, *hi, *z, current * excitation, *turns)
                }
                SourceSpec::FilamentLoop { vertices, current, turns } => {
                    let verts = vertices
                        .iter()
                        .map(|v| Vector3::new(v[0], v[1], v[2]))
                        .collect();
                    SourceField::filament_loop(verts, current * excitation, *turns)
                        .map_err(|source| ConfigError::Source { index, source })?
                }
            };
            parts.push(part);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { SourceField::Sum(parts) })
    }
}
