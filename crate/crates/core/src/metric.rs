use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::point::Point;
use crate::spaces::{AsymNorm1D, LpExponent, LpNorm, PolyhedralAsymNorm};

/// A weak metric: `delta(x, x) = 0` and the triangle inequality, symmetry
/// not required.
///
/// Built-in spaces are all normed, but scans and checks only rely on this
/// trait, so a finite quasi-metric or any other point set embedded in R^d
/// can be plugged in.
pub trait WeakMetric {
    fn dimension(&self) -> usize;

    /// `delta(x, y)` without dimension checks.
    fn distance(&self, x: &Point, y: &Point) -> f64;

    /// True iff `delta(x, y) == delta(y, x)` holds by construction.
    fn is_symmetric(&self) -> bool;

    fn delta(&self, x: &Point, y: &Point) -> Result<f64> {
        x.check_dim(self.dimension())?;
        y.check_dim(self.dimension())?;
        Ok(self.distance(x, y))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpaceKind {
    /// R with `|y - x|`.
    RealLineAbs,
    /// R with `max(-alpha v, beta v)`, `v = y - x`.
    AsymR(AsymNorm1D),
    /// R^d with an l^p norm.
    Lp(LpNorm),
    /// R^d with `max_i <a_i, y - x>`.
    Polyhedral(PolyhedralAsymNorm),
}

/// An immutable weak metric space on R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    dimension: usize,
    kind: SpaceKind,
}

impl SpaceDescriptor {
    pub fn real_line_abs() -> Self {
        SpaceDescriptor { dimension: 1, kind: SpaceKind::RealLineAbs }
    }

    pub fn asym_r(alpha: f64, beta: f64) -> Result<Self> {
        Ok(SpaceDescriptor { dimension: 1, kind: SpaceKind::AsymR(AsymNorm1D::new(alpha, beta)?) })
    }

    pub fn rn_lp(p: LpExponent, dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(crate::Error::usage("rn_lp needs dimension d >= 1"));
        }
        Ok(SpaceDescriptor { dimension, kind: SpaceKind::Lp(LpNorm { p }) })
    }

    pub fn polyhedral(generators: Vec<Vec<f64>>) -> Result<Self> {
        let norm = PolyhedralAsymNorm::new(generators)?;
        Ok(SpaceDescriptor { dimension: norm.dimension(), kind: SpaceKind::Polyhedral(norm) })
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        match &self.kind {
            SpaceKind::RealLineAbs => "real_line_abs".into(),
            SpaceKind::AsymR(n) => format!("asym_r({},{})", n.alpha(), n.beta()),
            SpaceKind::Lp(n) => format!("rn_lp({},{})", n.p.label(), self.dimension),
            SpaceKind::Polyhedral(n) => format!("polyhedral({} generators, d={})", n.generators().len(), self.dimension),
        }
    }

    /// The (asymmetric) norm of a displacement vector.
    pub fn norm(&self, v: &[f64]) -> f64 {
        match &self.kind {
            SpaceKind::RealLineAbs => v[0].abs(),
            SpaceKind::AsymR(n) => n.norm(v[0]),
            SpaceKind::Lp(n) => n.norm(v),
            SpaceKind::Polyhedral(n) => n.norm(v),
        }
    }

    /// Every built-in kind is a normed vector space; firmly non-expansive
    /// checks and averaged maps require this.
    pub fn is_vector_space(&self) -> bool {
        true
    }

    /// The 1-D norm parameters, with `real_line_abs` as `alpha = beta = 1`.
    pub fn as_asym_1d(&self) -> Option<AsymNorm1D> {
        match &self.kind {
            SpaceKind::RealLineAbs => Some(AsymNorm1D::symmetric()),
            SpaceKind::AsymR(n) => Some(*n),
            SpaceKind::Lp(_) if self.dimension == 1 => Some(AsymNorm1D::symmetric()),
            _ => None,
        }
    }
}

impl WeakMetric for SpaceDescriptor {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn distance(&self, x: &Point, y: &Point) -> f64 {
        match &self.kind {
            SpaceKind::RealLineAbs => (y.x() - x.x()).abs(),
            SpaceKind::AsymR(n) => n.delta(x.x(), y.x()),
            _ => self.norm(&x.to(y)),
        }
    }

    fn is_symmetric(&self) -> bool {
        match &self.kind {
            SpaceKind::RealLineAbs | SpaceKind::Lp(_) => true,
            SpaceKind::AsymR(n) => n.alpha() == n.beta(),
            SpaceKind::Polyhedral(_) => false,
        }
    }
}
