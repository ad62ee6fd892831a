use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::checks::argmax;
use crate::error::{Error, Result};
use crate::mappings::VirtualPair;
use crate::metric::WeakMetric;
use crate::point::Point;
use crate::sampler::Pair;

/// Slack allowed on `q + r + s + 2t <= 1` for values that are 1 in exact arithmetic.
const SUM_TOL: f64 = 4.0 * f64::EPSILON;

pub type CoefficientFn = Arc<dyn Fn(&Point, &Point) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Coefficient {
    Constant(f64),
    Function(CoefficientFn),
}

impl Coefficient {
    pub fn eval(&self, x: &Point, y: &Point) -> f64 {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Function(f) => f(x, y),
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Coefficient::Constant(c) => Some(*c),
            Coefficient::Function(_) => None,
        }
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "{c}"),
            Coefficient::Function(_) => write!(f, "<function>"),
        }
    }
}

impl Serialize for Coefficient {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Coefficient::Constant(c) => s.serialize_f64(*c),
            Coefficient::Function(_) => s.serialize_str("<function>"),
        }
    }
}

/// A firmness certificate `(q, r, s, t)` with its claimed bounds.
#[derive(Debug, Clone)]
pub struct Coefficients {
    pub q: Coefficient,
    pub r: Coefficient,
    pub s: Coefficient,
    pub t: Coefficient,
    /// Claimed infimum of `t`.
    pub t_inf: f64,
    /// Claimed supremum of `q + r + s + 2t`.
    pub sum_sup: f64,
}

impl Serialize for Coefficients {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Coefficients", 6)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("r", &self.r)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("t", &self.t)?;
        st.serialize_field("t_inf", &self.t_inf)?;
        st.serialize_field("sum_sup", &self.sum_sup)?;
        st.end()
    }
}

impl Coefficients {
    pub fn constant(q: f64, r: f64, s: f64, t: f64) -> Result<Self> {
        for (name, v) in [("q", q), ("r", r), ("s", s), ("t", t)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::usage(format!("coefficient {name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Coefficients {
            q: Coefficient::Constant(q),
            r: Coefficient::Constant(r),
            s: Coefficient::Constant(s),
            t: Coefficient::Constant(t),
            t_inf: t,
            sum_sup: q + r + s + 2.0 * t,
        })
    }

    /// Pair-dependent coefficients; the bounds are claims checked by
    /// [`check_conditions_ab`].
    pub fn functions(q: CoefficientFn, r: CoefficientFn, s: CoefficientFn, t: CoefficientFn, t_inf: f64, sum_sup: f64) -> Self {
        Coefficients {
            q: Coefficient::Function(q),
            r: Coefficient::Function(r),
            s: Coefficient::Function(s),
            t: Coefficient::Function(t),
            t_inf,
            sum_sup,
        }
    }

    pub fn eval(&self, x: &Point, y: &Point) -> [f64; 4] {
        [self.q.eval(x, y), self.r.eval(x, y), self.s.eval(x, y), self.t.eval(x, y)]
    }

    pub fn as_constants(&self) -> Option<[f64; 4]> {
        Some([self.q.constant()?, self.r.constant()?, self.s.constant()?, self.t.constant()?])
    }
}

/// Coefficients certifying that a map satisfying the firmly non-expansive
/// inequality is firm: `q = lambda/(2 - lambda)`, `r = s = 0`,
/// `t = (1 - lambda)/(2 - lambda)`.
pub fn lambda_to_coeffs(lambda: f64) -> Result<Coefficients> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::usage(format!("lambda must lie in ]0, 1[, got {lambda}")));
    }
    let denom = 2.0 - lambda;
    Coefficients::constant(lambda / denom, 0.0, 0.0, (1.0 - lambda) / denom)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AbReport {
    pub pairs_checked: usize,
    pub t_inf: f64,
    pub sum_sup: f64,
    /// Smallest evaluated `t`.
    pub min_t: f64,
    /// Largest evaluated `q + r + s + 2t`.
    pub max_sum: f64,
    pub worst_t_pair: Option<Pair>,
    pub worst_sum_pair: Option<Pair>,
    /// Negative coefficient values seen.
    pub negative_values: usize,
    pub condition_a: bool,
    pub condition_b: bool,
}

impl AbReport {
    pub fn passed(&self) -> bool {
        self.condition_a && self.condition_b
    }
}

/// Checks `t >= t_inf > 0` and `q + r + s + 2t <= sum_sup <= 1` over the pairs.
/// Constant coefficients are evaluated even when `pairs` is empty.
pub fn check_conditions_ab(coeffs: &Coefficients, pairs: &[Pair]) -> AbReport {
    let values: Vec<[f64; 4]> = match coeffs.as_constants() {
        Some(c) => vec![c],
        None => pairs.par_iter().map(|(x, y)| coeffs.eval(x, y)).collect(),
    };
    let ts: Vec<f64> = values.iter().map(|v| v[3]).collect();
    let sums: Vec<f64> = values.iter().map(|v| v[0] + v[1] + v[2] + 2.0 * v[3]).collect();
    let negative_values = values.iter().flatten().filter(|v| **v < 0.0 || v.is_nan()).count();
    let min_t = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let max_sum = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pick = |idx: Option<(usize, f64)>| {
        if coeffs.as_constants().is_some() {
            None
        } else {
            idx.map(|(i, _)| pairs[i].clone())
        }
    };
    let neg_ts: Vec<f64> = ts.iter().map(|t| -t).collect();
    AbReport {
        pairs_checked: pairs.len(),
        t_inf: coeffs.t_inf,
        sum_sup: coeffs.sum_sup,
        min_t,
        max_sum,
        worst_t_pair: pick(argmax(&neg_ts)),
        worst_sum_pair: pick(argmax(&sums)),
        negative_values,
        condition_a: coeffs.t_inf > 0.0 && min_t >= coeffs.t_inf && negative_values == 0,
        condition_b: max_sum <= coeffs.sum_sup + SUM_TOL && coeffs.sum_sup <= 1.0 + SUM_TOL,
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionCReport {
    pub pairs_checked: usize,
    /// `max [delta(Tx,Ty) - RHS]`.
    pub max_violation: f64,
    pub worst_pair: Option<Pair>,
    pub tol: f64,
    pub satisfied: bool,
}

/// Right-hand side of the firmness inequality.
pub(crate) fn condition_c_rhs<M: WeakMetric + ?Sized>(space: &M, c: [f64; 4], q: &VirtualPair) -> f64 {
    let [cq, cr, cs, ct] = c;
    cq * space.distance(&q.x, &q.y)
        + cr * space.distance(&q.x, &q.tx)
        + cs * space.distance(&q.y, &q.ty)
        + ct * (space.distance(&q.x, &q.ty) + space.distance(&q.tx, &q.y))
}

pub fn check_condition_c<M, T>(space: &M, map: &T, coeffs: &Coefficients, pairs: &[Pair], tol: f64) -> Result<ConditionCReport>
where
    M: WeakMetric + Sync + ?Sized,
    T: crate::mappings::SelfMap + Sync + ?Sized,
{
    let quads = crate::mappings::images_of(map, pairs)?;
    Ok(check_condition_c_on(space, coeffs, &quads, tol))
}

pub fn check_condition_c_on<M: WeakMetric + Sync + ?Sized>(
    space: &M,
    coeffs: &Coefficients,
    quads: &[VirtualPair],
    tol: f64,
) -> ConditionCReport {
    let gaps: Vec<f64> = quads
        .par_iter()
        .map(|q| space.distance(&q.tx, &q.ty) - condition_c_rhs(space, coeffs.eval(&q.x, &q.y), q))
        .collect();
    let best = argmax(&gaps);
    let max_violation = best.map_or(f64::NEG_INFINITY, |(_, v)| v);
    ConditionCReport {
        pairs_checked: quads.len(),
        max_violation,
        worst_pair: best.map(|(i, _)| (quads[i].x.clone(), quads[i].y.clone())),
        tol,
        satisfied: max_violation <= tol,
    }
}
