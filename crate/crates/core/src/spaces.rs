//! Built-in (asymmetric) norms on R and R^d.
//!
//! All distances follow the convention `delta(x, y) = ||y - x||`.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The asymmetric norm `||v|| = max(-alpha v, beta v)` on R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymNorm1D {
    alpha: f64,
    beta: f64,
}

impl AsymNorm1D {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0 && beta.is_finite() && beta > 0.0) {
            return Err(Error::usage(format!(
                "asym_r needs alpha > 0 and beta > 0, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Ok(AsymNorm1D { alpha, beta })
    }

    /// The absolute value, `alpha = beta = 1`.
    pub fn symmetric() -> Self {
        AsymNorm1D { alpha: 1.0, beta: 1.0 }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn norm(&self, v: f64) -> f64 {
        // max(-0 * alpha, 0 * beta) can be -0.0; normalise so delta(x, x) == +0.
        (-self.alpha * v).max(self.beta * v).max(0.0)
    }

    pub fn delta(&self, x: f64, y: f64) -> f64 {
        self.norm(y - x)
    }

    /// The point `z` on the far side of `y` with `||z - y|| = ||y - x||` and
    /// `(y - x)(z - y) < 0`.
    pub fn z_of_pair(&self, x: f64, y: f64) -> Result<f64> {
        if x == y {
            return Err(Error::Domain(format!("z_xy is undefined for x = y = {x}")));
        }
        // y > x: alpha (y - z) = beta (y - x).  y < x: beta (z - y) = alpha (x - y).
        let z = if y > x {
            y - (self.beta / self.alpha) * (y - x)
        } else {
            y + (self.alpha / self.beta) * (x - y)
        };
        Ok(z)
    }

    /// Slope interval `[lo, 1]` of linear maps that are 1-Lipschitz for this norm.
    ///
    /// For `v > 0` and slope `s < 0`, `||s v|| = -alpha s v <= beta v` gives
    /// `s >= -beta/alpha`; for `v < 0` the same computation gives
    /// `s >= -alpha/beta`. Non-negative slopes are admissible iff `s <= 1`.
    pub fn lipschitz_slope_range(&self) -> (f64, f64) {
        let ratio = (self.alpha / self.beta).min(self.beta / self.alpha);
        (-ratio, 1.0)
    }
}

/// Exponent of an `l^p` norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpExponent {
    One,
    Two,
    Infinity,
}

impl LpExponent {
    pub fn parse(p: &str) -> Result<Self> {
        match p.trim() {
            "1" => Ok(LpExponent::One),
            "2" => Ok(LpExponent::Two),
            "inf" | "infinity" | "∞" => Ok(LpExponent::Infinity),
            other => Err(Error::usage(format!("unsupported lp exponent {other:?}; expected 1, 2 or inf"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LpExponent::One => "1",
            LpExponent::Two => "2",
            LpExponent::Infinity => "inf",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpNorm {
    pub p: LpExponent,
}

impl LpNorm {
    pub fn norm(&self, v: &[f64]) -> f64 {
        match self.p {
            LpExponent::One => v.iter().map(|c| c.abs()).sum(),
            LpExponent::Two => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            LpExponent::Infinity => v.iter().fold(0.0, |m, c| m.max(c.abs())),
        }
    }
}

/// How positivity of a polyhedral asymmetric norm was established.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    /// `min { max_i <a_i, v> : ||v||_inf = 1 }`; positive iff the gauge is definite.
    pub margin: f64,
    /// The witness `v` on the unit cube attaining the margin.
    pub witness: Vec<f64>,
    pub exact: bool,
    pub method: String,
}

/// `||v|| = max_i <a_i, v>`, an asymmetric norm on R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralAsymNorm {
    generators: Vec<Vec<f64>>,
    report: PositivityReport,
}

const POSITIVITY_FLOOR: f64 = 1e-12;

impl PolyhedralAsymNorm {
    /// Validates `max_i <a_i, v> > 0` for every `v != 0`.
    ///
    /// The gauge is convex and positively homogeneous, so definiteness is
    /// equivalent to a positive minimum over the boundary of the l-infinity
    /// unit cube. On each of the 2d facets `v_j = +-1` that minimum is a small
    /// linear program; the reported margin is exact up to LP round-off.
    pub fn new(generators: Vec<Vec<f64>>) -> Result<Self> {
        let d = generators
            .first()
            .map(|g| g.len())
            .ok_or_else(|| Error::usage("polyhedral norm needs at least one generator"))?;
        if d == 0 {
            return Err(Error::usage("polyhedral generators must have dimension >= 1"));
        }
        for g in &generators {
            if g.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: g.len() });
            }
            if g.iter().any(|c| !c.is_finite()) {
                return Err(Error::usage("polyhedral generators must be finite"));
            }
        }
        let report = facet_minimum(&generators, d)?;
        if report.margin <= POSITIVITY_FLOOR {
            return Err(Error::usage(format!(
                "generators do not define a definite asymmetric norm: max_i <a_i, v> = {} at v = {:?}",
                report.margin, report.witness
            )));
        }
        Ok(PolyhedralAsymNorm { generators, report })
    }

    pub fn dimension(&self) -> usize {
        self.generators[0].len()
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn positivity(&self) -> &PositivityReport {
        &self.report
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        self.generators
            .iter()
            .map(|a| a.iter().zip(v).map(|(ai, vi)| ai * vi).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }
}

fn facet_minimum(generators: &[Vec<f64>], d: usize) -> Result<PositivityReport> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for axis in 0..d {
        for sign in [-1.0, 1.0] {
            let mut problem = Problem::new(OptimizationDirection::Minimize);
            let level = problem.add_var(1.0, (f64::NEG_INFINITY, f64::INFINITY));
            let v: Vec<_> = (0..d)
                .map(|j| {
                    let bounds = if j == axis { (sign, sign) } else { (-1.0, 1.0) };
                    problem.add_var(0.0, bounds)
                })
                .collect();
            for a in generators {
                // level - <a, v> >= 0
                let mut expr = LinearExpr::empty();
                expr.add(level, 1.0);
                for (var, coeff) in v.iter().zip(a) {
                    expr.add(*var, -coeff);
                }
                problem.add_constraint(expr, ComparisonOp::Ge, 0.0);
            }
            let solution = problem
                .solve()
                .map_err(|e| Error::usage(format!("positivity LP failed: {e}")))?;
            let value = solution.objective();
            if best.as_ref().is_none_or(|(m, _)| value < *m) {
                let witness = v.iter().map(|var| *solution.var_value(*var)).collect();
                best = Some((value, witness));
            }
        }
    }
    let (margin, witness) = best.expect("at least one facet");
    Ok(PositivityReport {
        margin,
        witness,
        exact: true,
        method: "facet LP on the l-infinity unit sphere".to_string(),
    })
}
