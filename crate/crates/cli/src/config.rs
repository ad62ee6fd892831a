//! Experiment configuration: the JSON grammar read by `firmlab run`.
//!
//! Parsing is strict; unknown keys anywhere are rejected.

use std::fmt;

use firmlab::{
    krasnoselskii_average, LpExponent, MapDescriptor, PiecewiseLinear1D, Point, Region, Scheme, SpaceDescriptor,
    VirtualPair, WeakMetric,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceConfig,
    pub map: MapConfig,
    pub task: Task,
    #[serde(default)]
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Axioms,
    Nonexp,
    FirmCert,
    TauScan,
    PropScan,
    Rates,
    Theorem1,
    Functional,
    Descent,
}

impl Task {
    pub const ALL: [Task; 9] = [
        Task::Axioms,
        Task::Nonexp,
        Task::FirmCert,
        Task::TauScan,
        Task::PropScan,
        Task::Rates,
        Task::Theorem1,
        Task::Functional,
        Task::Descent,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::Axioms => "axioms",
            Task::Nonexp => "nonexp",
            Task::FirmCert => "firm-cert",
            Task::TauScan => "tau-scan",
            Task::PropScan => "prop-scan",
            Task::Rates => "rates",
            Task::Theorem1 => "theorem1",
            Task::Functional => "functional",
            Task::Descent => "descent",
        }
    }

    /// Keys of [`Params`] the task reads.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Task::Axioms => &["seed", "samples", "scheme", "region", "tol"],
            Task::Nonexp => &["seed", "samples", "scheme", "region", "pairs", "tol", "lambda_grid"],
            Task::FirmCert => &["seed", "samples", "scheme", "region", "pairs", "tol", "t_min", "coefficients"],
            Task::TauScan => &["seed", "samples", "scheme", "region", "pairs", "eps_den", "threshold"],
            Task::PropScan => &["seed", "samples", "scheme", "region", "pairs", "epsilon"],
            Task::Rates => &["n", "k", "x0", "x1", "window", "tol", "search_region", "budget"],
            Task::Theorem1 => &["n", "k", "x0", "tol", "window", "search_region", "budget"],
            Task::Functional => &[
                "seed", "samples", "scheme", "region", "n", "x0", "x1", "tol", "horizons", "probes", "rho",
            ],
            Task::Descent => &["n", "x0", "tol", "horizons", "probes", "slack", "depth", "starts"],
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A coordinate list, or a bare number on one-dimensional hosts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coords {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Coords {
    pub fn to_vec(&self) -> Vec<f64> {
        match self {
            Coords::Scalar(x) => vec![*x],
            Coords::Vector(v) => v.clone(),
        }
    }

    pub fn point(&self, dim: usize, what: &str) -> Result<Point, CliError> {
        let v = self.to_vec();
        if v.len() != dim {
            return Err(CliError::Config(format!("{what}: expected {dim} coordinates, got {}", v.len())));
        }
        Ok(Point::new(v)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LpSpec {
    Number(f64),
    Text(String),
}

impl LpSpec {
    fn exponent(&self) -> Result<LpExponent, CliError> {
        let text = match self {
            LpSpec::Number(p) if *p == 1.0 => "1".to_string(),
            LpSpec::Number(p) if *p == 2.0 => "2".to_string(),
            LpSpec::Number(p) => p.to_string(),
            LpSpec::Text(s) => s.clone(),
        };
        Ok(LpExponent::parse(&text)?)
    }
}

/// Variant payload without parameters; rejects stray keys.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

// Internally tagged enums ignore `deny_unknown_fields`, so each variant wraps a strict struct.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceConfig {
    RealLineAbs(NoParams),
    AsymR(AsymRConfig),
    RnLp(RnLpConfig),
    Polyhedral(PolyhedralConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymRConfig {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RnLpConfig {
    pub p: LpSpec,
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyhedralConfig {
    pub generators: Vec<Vec<f64>>,
}

impl SpaceConfig {
    pub fn build(&self) -> Result<SpaceDescriptor, CliError> {
        Ok(match self {
            SpaceConfig::RealLineAbs(_) => SpaceDescriptor::real_line_abs(),
            SpaceConfig::AsymR(c) => SpaceDescriptor::asym_r(c.alpha, c.beta)?,
            SpaceConfig::RnLp(c) => SpaceDescriptor::rn_lp(c.p.exponent()?, c.dimension)?,
            SpaceConfig::Polyhedral(c) => SpaceDescriptor::polyhedral(c.generators.clone())?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapConfig {
    Identity(NoParams),
    AbsPlusOne(NoParams),
    ReflectExp(NoParams),
    Translation(TranslationConfig),
    Affine(AffineConfig),
    Scaling(ScalingConfig),
    PiecewiseLinear(PiecewiseLinearConfig),
    Averaged(AveragedConfig),
    VirtualPair(VirtualPairConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslationConfig {
    pub offset: Coords,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineConfig {
    pub matrix: Vec<Vec<f64>>,
    pub offset: Coords,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseLinearConfig {
    pub knots: Vec<[f64; 2]>,
    pub left_slope: f64,
    pub right_slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AveragedConfig {
    pub inner: Box<MapConfig>,
    pub lambda: f64,
}

/// Images prescribed at two points only; without `tx`, `ty` this is the
/// configuration `Tx = y`, `Ty = z_xy` on a one-dimensional host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VirtualPairConfig {
    pub x: Coords,
    pub y: Coords,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tx: Option<Coords>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ty: Option<Coords>,
}

/// A map built from configuration: a full self-map or a lone virtual pair.
pub enum BuiltMap {
    Map(MapDescriptor),
    Virtual(VirtualPair),
}

impl MapConfig {
    pub fn build(&self, space: &SpaceDescriptor) -> Result<BuiltMap, CliError> {
        if let MapConfig::VirtualPair(VirtualPairConfig { x, y, tx, ty }) = self {
            let d = space.dimension();
            let (px, py) = (x.point(d, "map.x")?, y.point(d, "map.y")?);
            let vp = match (tx, ty) {
                (Some(tx), Some(ty)) => VirtualPair::new(px, py, tx.point(d, "map.tx")?, ty.point(d, "map.ty")?)?,
                (None, None) => {
                    let norm = space.as_asym_1d().ok_or_else(|| {
                        CliError::Config("map.virtual_pair without tx/ty needs a one-dimensional host".into())
                    })?;
                    VirtualPair::nonfirm_configuration(&norm, px.x(), py.x())?
                }
                _ => return Err(CliError::Config("map.virtual_pair: give both tx and ty or neither".into())),
            };
            return Ok(BuiltMap::Virtual(vp));
        }
        self.build_map(space).map(BuiltMap::Map)
    }

    fn build_map(&self, space: &SpaceDescriptor) -> Result<MapDescriptor, CliError> {
        Ok(match self {
            MapConfig::Identity(_) => MapDescriptor::identity(space),
            MapConfig::AbsPlusOne(_) => MapDescriptor::abs_plus_one(space)?,
            MapConfig::ReflectExp(_) => MapDescriptor::reflect_exp(space)?,
            MapConfig::Translation(c) => MapDescriptor::translation(space, c.offset.to_vec())?,
            MapConfig::Affine(c) => MapDescriptor::affine(space, c.matrix.clone(), c.offset.to_vec())?,
            MapConfig::Scaling(c) => MapDescriptor::scaling(space, c.factor)?,
            MapConfig::PiecewiseLinear(c) => {
                let xs: Vec<f64> = c.knots.iter().map(|k| k[0]).collect();
                let ys: Vec<f64> = c.knots.iter().map(|k| k[1]).collect();
                let pl = PiecewiseLinear1D::from_knots(&xs, &ys, c.left_slope, c.right_slope)?;
                MapDescriptor::piecewise_linear(space, pl)?
            }
            MapConfig::Averaged(c) => krasnoselskii_average(&c.inner.build_map(space)?, c.lambda)?,
            MapConfig::VirtualPair(_) => {
                return Err(CliError::Config("map.virtual_pair cannot be nested inside another map".into()))
            }
        })
    }
}

/// A box `{lower, upper}`, or `[lo, hi]` repeated on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionSpec {
    Interval([f64; 2]),
    Box { lower: Vec<f64>, upper: Vec<f64> },
}

impl RegionSpec {
    pub fn build(&self, dim: usize) -> Result<Region, CliError> {
        let region = match self {
            RegionSpec::Interval([lo, hi]) => Region::cube(*lo, *hi, dim)?,
            RegionSpec::Box { lower, upper } => Region::new(lower.clone(), upper.clone())?,
        };
        if region.dim() != dim {
            return Err(CliError::Config(format!("region has dimension {}, the space has {dim}", region.dim())));
        }
        Ok(region)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Number of sampled points or pairs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scheme: Option<Scheme>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    /// Extra pairs checked ahead of the sampled ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<[Coords; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(alias = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(alias = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<Coords>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x1: Option<Coords>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search_region: Option<RegionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    /// Constant `[q, r, s, t]` checked alongside the certificate search.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<[f64; 4]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_den: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizons: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<Vec<Coords>>,
    /// Escape rate used by the descent bound; estimated from the orbit when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub starts: Option<Vec<Coords>>,
}

impl Params {
    /// Names of the keys that were set.
    pub fn present(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<String>,
}
