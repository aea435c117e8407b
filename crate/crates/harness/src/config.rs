//! Experiment configuration files.

use std::path::{Path, PathBuf};

use olcb::bodies::json::BodySpec;
use olcb::orlicz::{OrliczFunction, SolverConfig, WeightFunction};
use olcb::Direction;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const SCHEMA_VERSION: u32 = 1;

/// Smallest inradius a generator may be asked to guarantee.
pub const MIN_INRADIUS_FLOOR: f64 = 0.1;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub bodies: Vec<BodySource>,
    #[serde(default = "default_phi")]
    pub phi: Vec<OrliczFunction>,
    #[serde(default = "default_omega")]
    pub omega: Vec<WeightFunction>,
    /// Directions for per-direction commands (`norm`, `steiner`, the sandwich).
    #[serde(default)]
    pub directions: DirectionSpec,
    /// Sizes of the symmetric direction grids used for centroid bodies.
    #[serde(default = "default_grid_sizes")]
    pub grid_sizes: Vec<usize>,
    #[serde(default)]
    pub trials: Trials,
    #[serde(default)]
    pub solver: SolverConfig,
    /// `verify-lemmas` campaigns to run; all of them when empty.
    #[serde(default)]
    pub campaigns: Vec<Campaign>,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_seed() -> u64 {
    1
}

fn default_phi() -> Vec<OrliczFunction> {
    vec![OrliczFunction::identity()]
}

fn default_omega() -> Vec<WeightFunction> {
    vec![WeightFunction::one()]
}

fn default_grid_sizes() -> Vec<usize> {
    vec![360]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Trials {
    /// Random `(K, u, x'_1, x'_2)` instances of the Steiner support inequality.
    pub steiner_inequality: usize,
    /// Linear maps per body in the equivariance campaign.
    pub equivariance_maps: usize,
    /// Symmetrization directions per body in the inclusion campaign.
    pub inclusion_directions: usize,
    /// Steps of the symmetrization schedule.
    pub schedule_steps: usize,
    /// Samples for the S/T map check.
    pub map_samples: usize,
}

impl Default for Trials {
    fn default() -> Self {
        Self { steiner_inequality: 100, equivariance_maps: 3, inclusion_directions: 2, schedule_steps: 50, map_samples: 100_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Campaign {
    Sandwich,
    Equivariance,
    SteinerInequality,
    Inclusion,
}

impl Campaign {
    pub const ALL: [Campaign; 4] = [Campaign::Sandwich, Campaign::Equivariance, Campaign::SteinerInequality, Campaign::Inclusion];
}

/// Output file stem inside `--out`; the experiment name by default.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub stem: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySource {
    /// A body JSON file, relative paths resolved against the config file.
    File { path: PathBuf, id: Option<String> },
    Inline { id: String, body: BodySpec },
    /// Polar angles sorted, radii uniform in `[0.3, 1]`, hulled, rejected
    /// below the inradius floor.
    RandomPolygon {
        count: usize,
        vertices: usize,
        #[serde(default = "default_floor")]
        inradius_floor: f64,
    },
    /// Random points on directions with radii in `[0.3, 1]` in 3D, hulled.
    RandomPolytope {
        count: usize,
        vertices: usize,
        #[serde(default = "default_floor")]
        inradius_floor: f64,
    },
    RegularPolygon {
        vertices: usize,
        #[serde(default = "one")]
        circumradius: f64,
        #[serde(default = "default_copies")]
        count: usize,
    },
    /// Rotated ellipses with semi-axes uniform in `[0.4, 1.5]`.
    RandomEllipse { count: usize },
    Ball {
        dim: usize,
        #[serde(default = "one")]
        radius: f64,
    },
}

fn default_floor() -> f64 {
    MIN_INRADIUS_FLOOR
}

fn one() -> f64 {
    1.0
}

fn default_copies() -> usize {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DirectionSpec {
    /// `m` equally spaced unit directions (2D) or the Fibonacci sphere (3D).
    Grid(usize),
    /// Explicit vectors; they need not be unit length but must be nonzero.
    List(Vec<Vec<f64>>),
    /// Seeded uniform random unit directions.
    Random(usize),
}

impl Default for DirectionSpec {
    fn default() -> Self {
        Self::Grid(16)
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative body paths become relative to its directory.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for b in &mut cfg.bodies {
            if let BodySource::File { path, .. } = b {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema_version {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) {
            return bad(format!("experiment name {:?} must be nonempty and use [A-Za-z0-9-_.]", self.name));
        }
        if self.bodies.is_empty() {
            return bad("no bodies configured".into());
        }
        if self.phi.is_empty() || self.omega.is_empty() {
            return bad("phi and omega lists must be nonempty".into());
        }
        for f in &self.phi {
            f.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        for w in &self.omega {
            w.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        for b in &self.bodies {
            match b {
                BodySource::RandomPolygon { vertices, inradius_floor, .. }
                | BodySource::RandomPolytope { vertices, inradius_floor, .. } => {
                    if !(*inradius_floor >= MIN_INRADIUS_FLOOR && *inradius_floor < 0.3) {
                        return bad(format!("inradius_floor {inradius_floor} must lie in [{MIN_INRADIUS_FLOOR}, 0.3)"));
                    }
                    if *vertices < 3 {
                        return bad(format!("random bodies need at least 3 vertices, got {vertices}"));
                    }
                }
                BodySource::RegularPolygon { vertices, circumradius, .. } => {
                    if *vertices < 3 || !(*circumradius > 0.0) {
                        return bad("regular polygons need >= 3 vertices and a positive circumradius".into());
                    }
                }
                BodySource::Ball { dim, radius } => {
                    if *dim == 0 || !(*radius > 0.0) {
                        return bad("balls need a positive dimension and radius".into());
                    }
                }
                _ => {}
            }
        }
        match &self.directions {
            DirectionSpec::Grid(0) | DirectionSpec::Random(0) => return bad("direction count must be positive".into()),
            DirectionSpec::List(v) => {
                if v.is_empty() {
                    return bad("direction list is empty".into());
                }
                for (i, x) in v.iter().enumerate() {
                    if Direction::normalize(x).is_err() {
                        return bad(format!("direction {i} is zero or not finite"));
                    }
                }
            }
            _ => {}
        }
        if self.grid_sizes.is_empty() {
            return bad("grid_sizes must be nonempty".into());
        }
        if self.solver.cells < 16 {
            return bad(format!("solver.cells = {} is too small", self.solver.cells));
        }
        Ok(())
    }

    pub fn stem(&self) -> &str {
        self.outputs.stem.as_deref().unwrap_or(&self.name)
    }

    pub fn campaigns(&self) -> Vec<Campaign> {
        if self.campaigns.is_empty() {
            Campaign::ALL.to_vec()
        } else {
            self.campaigns.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = ExperimentConfig::from_json(
            r#"{"schema_version": 1, "name": "sq", "bodies": [{"source": "ball", "dim": 2}]}"#,
        )
        .unwrap();
        assert_eq!(cfg.phi, vec![OrliczFunction::identity()]);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.campaigns().len(), 4);
        assert_eq!(cfg.stem(), "sq");
    }

    #[test]
    fn rejects_bad_configs() {
        let base = |extra: &str| format!(r#"{{"schema_version": 1, "name": "x", "bodies": [{{"source": "ball", "dim": 2}}]{extra}}}"#);
        assert!(ExperimentConfig::from_json(&base(r#", "directions": {"list": [[0, 0]]}"#)).is_err());
        assert!(ExperimentConfig::from_json(&base(r#", "phi": [{"family": "power", "p": 0.5}]"#)).is_err());
        assert!(ExperimentConfig::from_json(&base(r#", "colour": 3"#)).is_err());
        assert!(ExperimentConfig::from_json(&base("").replace("\"schema_version\": 1", "\"schema_version\": 7")).is_err());
        let low = r#"{"schema_version": 1, "name": "x", "bodies": [{"source": "random_polygon", "count": 2, "vertices": 6, "inradius_floor": 0.05}]}"#;
        assert!(ExperimentConfig::from_json(low).is_err());
    }
}
