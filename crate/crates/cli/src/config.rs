//! JSON run configuration.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use minsurf4::complex_fn::DEFAULT_TOL;
use minsurf4::lattice::{Lattice, Rect};
use minsurf4::minkowski::MinkVector4;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Generate,
    Graph,
    Curvature,
    Check,
    Conjugate,
    Family,
    Scan,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Graph => "graph",
            Command::Curvature => "curvature",
            Command::Check => "check",
            Command::Conjugate => "conjugate",
            Command::Family => "family",
            Command::Scan => "scan",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct WeierstrassBlock {
    pub a: String,
    pub b: String,
    pub mu: String,
    #[serde(default)]
    pub w0: [f64; 2],
    #[serde(default)]
    pub x0: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphType {
    #[default]
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GraphBlock {
    #[serde(default)]
    pub graph_type: GraphType,
    pub a: String,
    pub c: [f64; 2],
    #[serde(default)]
    pub w0: [f64; 2],
    #[serde(default)]
    pub x0: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TransportBlock {
    pub xy: Domain,
    pub pq: Domain,
    pub seed_xy: [f64; 2],
    pub seed_pq: [f64; 2],
    #[serde(default)]
    pub anchor_l3: [f64; 4],
    #[serde(default)]
    pub anchor_e3: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FamilyBlock {
    pub a: String,
    pub mu: String,
    pub thetas: Vec<f64>,
    /// P0 per θ; the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchors: Option<Vec<[f64; 4]>>,
    #[serde(default)]
    pub w0: [f64; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport: Option<TransportBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum FixtureName {
    Helicoid,
    CatenoidGraph,
    LightlikeExample,
    HyperbolicHelicoid,
    Paraboloid,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FixtureBlock {
    pub name: FixtureName,
    /// Scale of the lightlike example and the hyperbolic helicoid.
    #[serde(default = "one")]
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DataBlock {
    Weierstrass(WeierstrassBlock),
    Graph(GraphBlock),
    Family(FamilyBlock),
    Fixture(FixtureBlock),
}

impl DataBlock {
    fn kind(&self) -> &'static str {
        match self {
            DataBlock::Weierstrass(_) => "weierstrass",
            DataBlock::Graph(_) => "graph",
            DataBlock::Family(_) => "family",
            DataBlock::Fixture(_) => "fixture",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Domain {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Domain {
    pub fn rect(&self) -> Rect {
        Rect::new(self.x0, self.x1, self.y0, self.y1)
    }

    pub fn lattice(&self) -> Result<Lattice, CliError> {
        Lattice::new(self.rect(), self.nx, self.ny).map_err(|e| CliError::Config(e.to_string()))
    }

    fn validate(&self, what: &str) -> Result<(), CliError> {
        let ends = [self.x0, self.x1, self.y0, self.y1];
        if ends.iter().any(|v| !v.is_finite()) || self.x1 <= self.x0 || self.y1 <= self.y0 {
            return Err(CliError::Config(format!("{what}: rectangle must be finite with x1 > x0 and y1 > y0")));
        }
        if self.nx < 3 || self.ny < 3 {
            return Err(CliError::Config(format!(
                "{what}: resolution {}x{} is below 3 per axis",
                self.nx, self.ny
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    #[serde(rename = "xyA")]
    XyA,
    #[serde(rename = "pqB")]
    PqB,
    #[serde(rename = "first3")]
    First3,
    #[serde(rename = "last3")]
    Last3,
}

impl Projection {
    /// Components of the 4-vector used as (x, y, z) in the mesh.
    pub fn components(self) -> [usize; 3] {
        match self {
            Projection::XyA => [1, 2, 0],
            Projection::PqB => [1, 2, 3],
            Projection::First3 => [0, 1, 2],
            Projection::Last3 => [1, 2, 3],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Outputs {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obj_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<Projection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Anchor {
    pub node: [usize; 2],
    pub value: [f64; 4],
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub data: DataBlock,
    pub domain: Domain,
    /// Quadrature tolerance.
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Bound for the soft finite-difference residuals; 10·h² when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_tol: Option<f64>,
    /// Where the conjugate surface is pinned; node (0, 0) at the origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Anchor>,
    #[serde(default)]
    pub outputs: Outputs,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let allowed: &[&str] = match self.command {
            Command::Generate | Command::Curvature => &["weierstrass"],
            Command::Graph => &["graph"],
            Command::Check => &["weierstrass", "graph"],
            Command::Conjugate | Command::Scan => &["weierstrass", "fixture"],
            Command::Family => &["family"],
        };
        if !allowed.contains(&self.data.kind()) {
            return Err(CliError::Config(format!(
                "command `{}` expects a data block of kind {}, got `{}`",
                self.command.name(),
                allowed.join(" or "),
                self.data.kind()
            )));
        }
        self.domain.validate("domain")?;
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if let Some(r) = self.residual_tol {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(CliError::Config(format!("residualTol must be non-negative, got {r}")));
            }
        }
        if let Some(a) = self.anchor {
            if a.node[0] >= self.domain.nx || a.node[1] >= self.domain.ny {
                return Err(CliError::Config(format!("anchor node {:?} lies outside the lattice", a.node)));
            }
        }
        if let DataBlock::Family(f) = &self.data {
            if f.thetas.is_empty() || f.thetas.iter().any(|t| !t.is_finite()) {
                return Err(CliError::Config("family: thetas must be a non-empty list of finite angles".into()));
            }
            if let Some(anchors) = &f.anchors {
                if anchors.len() != f.thetas.len() {
                    return Err(CliError::Config(format!(
                        "family: {} anchors given for {} thetas",
                        anchors.len(),
                        f.thetas.len()
                    )));
                }
            }
            if let Some(t) = &f.transport {
                t.xy.validate("transport.xy")?;
                t.pq.validate("transport.pq")?;
            }
        }
        if let DataBlock::Fixture(f) = &self.data {
            if !(f.k > 0.0 && f.k.is_finite()) {
                return Err(CliError::Config(format!("fixture: k must be positive, got {}", f.k)));
            }
        }
        Ok(())
    }
}

pub fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub fn vector(v: [f64; 4]) -> MinkVector4 {
    MinkVector4(v)
}
