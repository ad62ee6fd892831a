//! Searching constant coefficients `(q, r, s, t)` that witness firmness on
//! a sample of pairs.
//!
//! Both routes solve the same feasibility problem
//!
//! ```text
//! maximise t  subject to
//!   q d(x,y) + r d(x,Tx) + s d(y,Ty) + t (d(x,Ty) + d(Tx,y)) >= d(Tx,Ty)   for every pair
//!   q, r, s >= 0,  t >= t_min,  q + r + s + 2t <= 1
//! ```
//!
//! once by linear programming and once by exhaustive search over a dyadic
//! grid of step `1/64`. Each row's right-hand side is relaxed by
//! `ROW_TOL * max(1, d(Tx,Ty))` so that identities that hold with equality
//! in exact arithmetic (translations, for instance) stay feasible.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::mappings::VirtualPair;
use crate::metric::WeakMetric;

use super::coefficients::Coefficients;

pub const GRID_RESOLUTION: u32 = 64;
const ROW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantCertificate {
    pub q: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

impl ConstantCertificate {
    pub fn coefficients(&self) -> Coefficients {
        Coefficients::constant(self.q.max(0.0), self.r.max(0.0), self.s.max(0.0), self.t.max(0.0))
            .expect("certificate values are finite")
    }

    fn lhs(&self, row: &Row) -> f64 {
        self.q * row.d_xy + self.r * row.d_x_tx + self.s * row.d_y_ty + self.t * row.cross
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateOutcome {
    Feasible(ConstantCertificate),
    /// No constant certificate exists on this sample; evidence of non-firmness.
    Infeasible,
}

impl CertificateOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CertificateOutcome::Feasible(_))
    }

    pub fn t(&self) -> Option<f64> {
        match self {
            CertificateOutcome::Feasible(c) => Some(c.t),
            CertificateOutcome::Infeasible => None,
        }
    }
}

struct Row {
    d_xy: f64,
    d_x_tx: f64,
    d_y_ty: f64,
    cross: f64,
    rhs: f64,
}

fn rows<M: WeakMetric + Sync + ?Sized>(space: &M, quads: &[VirtualPair]) -> Vec<Row> {
    quads
        .par_iter()
        .map(|q| {
            let d_tt = space.distance(&q.tx, &q.ty);
            Row {
                d_xy: space.distance(&q.x, &q.y),
                d_x_tx: space.distance(&q.x, &q.tx),
                d_y_ty: space.distance(&q.y, &q.ty),
                cross: space.distance(&q.x, &q.ty) + space.distance(&q.tx, &q.y),
                rhs: d_tt - ROW_TOL * d_tt.max(1.0),
            }
        })
        .collect()
}

fn check_t_min(t_min: f64) -> Result<()> {
    if !(t_min > 0.0 && t_min <= 0.5) {
        return Err(Error::usage(format!("t_min must lie in ]0, 1/2], got {t_min}")));
    }
    Ok(())
}

/// Largest `t` admitting a constant certificate, by linear programming.
pub fn certify_firm_constant<M: WeakMetric + Sync + ?Sized>(space: &M, quads: &[VirtualPair], t_min: f64) -> Result<CertificateOutcome> {
    check_t_min(t_min)?;
    let rows = rows(space, quads);
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let q = problem.add_var(0.0, (0.0, 1.0));
    let r = problem.add_var(0.0, (0.0, 1.0));
    let s = problem.add_var(0.0, (0.0, 1.0));
    let t = problem.add_var(1.0, (t_min, 0.5));
    problem.add_constraint([(q, 1.0), (r, 1.0), (s, 1.0), (t, 2.0)], ComparisonOp::Le, 1.0);
    for row in &rows {
        let mut expr = LinearExpr::empty();
        expr.add(q, row.d_xy);
        expr.add(r, row.d_x_tx);
        expr.add(s, row.d_y_ty);
        expr.add(t, row.cross);
        problem.add_constraint(expr, ComparisonOp::Ge, row.rhs);
    }
    match problem.solve() {
        Ok(sol) => Ok(CertificateOutcome::Feasible(ConstantCertificate {
            q: *sol.var_value(q),
            r: *sol.var_value(r),
            s: *sol.var_value(s),
            t: *sol.var_value(t),
        })),
        Err(minilp::Error::Infeasible) => Ok(CertificateOutcome::Infeasible),
        Err(e) => Err(Error::usage(format!("certificate LP failed: {e}"))),
    }
}

/// Largest `t` on the `1/64` grid admitting a certificate; ties broken by
/// the lexicographically smallest `(q, r, s)`.
pub fn certify_firm_constant_grid<M: WeakMetric + Sync + ?Sized>(space: &M, quads: &[VirtualPair], t_min: f64) -> Result<CertificateOutcome> {
    check_t_min(t_min)?;
    let rows = rows(space, quads);
    let n = GRID_RESOLUTION;
    let step = 1.0 / n as f64;
    let t_lo = ((t_min * n as f64).ceil() as u32).max(1);
    for t_units in (t_lo..=n / 2).rev() {
        let budget = n - 2 * t_units;
        let combos: Vec<(u32, u32, u32)> = (0..=budget)
            .flat_map(|q| (0..=budget - q).flat_map(move |r| (0..=budget - q - r).map(move |s| (q, r, s))))
            .collect();
        let found = combos.par_iter().find_first(|(q, r, s)| {
            let c = ConstantCertificate {
                q: *q as f64 * step,
                r: *r as f64 * step,
                s: *s as f64 * step,
                t: t_units as f64 * step,
            };
            rows.iter().all(|row| c.lhs(row) >= row.rhs)
        });
        if let Some((q, r, s)) = found {
            return Ok(CertificateOutcome::Feasible(ConstantCertificate {
                q: *q as f64 * step,
                r: *r as f64 * step,
                s: *s as f64 * step,
                t: t_units as f64 * step,
            }));
        }
    }
    Ok(CertificateOutcome::Infeasible)
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifyReport {
    pub pairs: usize,
    pub t_min: f64,
    pub lp: CertificateOutcome,
    pub grid: CertificateOutcome,
    /// Both routes agree on feasibility, and the grid `t` does not beat the LP `t` by more than one grid step.
    pub agree: bool,
    /// Largest violation of a sampled row by the LP certificate (before relaxation).
    pub lp_max_residual: Option<f64>,
    pub scope: &'static str,
}

pub fn certify_report<M: WeakMetric + Sync + ?Sized>(space: &M, quads: &[VirtualPair], t_min: f64) -> Result<CertifyReport> {
    let lp = certify_firm_constant(space, quads, t_min)?;
    let grid = certify_firm_constant_grid(space, quads, t_min)?;
    let agree = match (lp.t(), grid.t()) {
        (Some(lp_t), Some(grid_t)) => grid_t <= lp_t + 1.0 / GRID_RESOLUTION as f64,
        (None, None) => true,
        _ => false,
    };
    let lp_max_residual = match lp {
        CertificateOutcome::Feasible(c) => Some(
            rows(space, quads)
                .iter()
                .map(|row| (row.rhs + ROW_TOL * (row.rhs.max(1.0))) - c.lhs(row))
                .fold(f64::NEG_INFINITY, f64::max),
        ),
        CertificateOutcome::Infeasible => None,
    };
    Ok(CertifyReport {
        pairs: quads.len(),
        t_min,
        lp,
        grid,
        agree,
        lp_max_residual,
        scope: "sampled region only",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::firmness::check_condition_c_on;
    use crate::mappings::{images_of, MapDescriptor};
    use crate::metric::SpaceDescriptor;
    use crate::point::Point;
    use crate::sampler::{Region, Sampler};
    use crate::spaces::AsymNorm1D;

    fn quads(map: &MapDescriptor, lo: f64, hi: f64, n: usize) -> Vec<VirtualPair> {
        let pairs = Sampler::uniform(Region::interval(lo, hi).unwrap(), n, 21).unwrap().pairs();
        images_of(map, &pairs).unwrap()
    }

    #[test]
    fn reflect_exp_admits_t_one_half() {
        let line = SpaceDescriptor::real_line_abs();
        let t = MapDescriptor::reflect_exp(&line).unwrap();
        let qs = quads(&t, -10.0, 10.0, 2000);
        let r = certify_report(&line, &qs, 1e-3).unwrap();
        assert!(r.agree);
        assert!(r.lp.t().unwrap() >= 0.5 - 1e-9);
        assert_eq!(r.grid.t(), Some(0.5));
    }

    #[test]
    fn translation_admits_t_one_half() {
        let line = SpaceDescriptor::real_line_abs();
        let t = MapDescriptor::translation(&line, vec![0.7]).unwrap();
        let qs = quads(&t, -10.0, 10.0, 10_000);
        let lp = certify_firm_constant(&line, &qs, 1e-3).unwrap();
        assert!(lp.t().unwrap() >= 0.5 - 1e-9);
        let grid = certify_firm_constant_grid(&line, &qs, 1e-3).unwrap();
        assert_eq!(grid.t(), Some(0.5));
    }

    #[test]
    fn nonfirm_configuration_is_infeasible() {
        for (alpha, beta) in [(1.0, 1.0), (1.0, 2.0), (3.0, 0.5)] {
            let space = SpaceDescriptor::asym_r(alpha, beta).unwrap();
            let vp = VirtualPair::nonfirm_configuration(&AsymNorm1D::new(alpha, beta).unwrap(), -0.5, 2.0).unwrap();
            let r = certify_report(&space, &[vp], 1e-3).unwrap();
            assert_eq!(r.lp, CertificateOutcome::Infeasible);
            assert_eq!(r.grid, CertificateOutcome::Infeasible);
            assert!(r.agree);
        }
    }

    #[test]
    fn abs_plus_one_certificate_satisfies_condition_c() {
        let line = SpaceDescriptor::real_line_abs();
        let t = MapDescriptor::abs_plus_one(&line).unwrap();
        let qs = quads(&t, -10.0, 10.0, 5000);
        let r = certify_report(&line, &qs, 1e-3).unwrap();
        assert!(r.agree);
        let cert = match r.lp {
            CertificateOutcome::Feasible(c) => c,
            CertificateOutcome::Infeasible => panic!("abs_plus_one should be certifiable"),
        };
        let c = check_condition_c_on(&line, &cert.coefficients(), &qs, 1e-9);
        assert!(c.satisfied, "{}", c.max_violation);
    }

    #[test]
    fn single_row_instance_matches_hand_solution() {
        // Identity on (0, 1): cross = 2 and d(Tx,Ty) = 1, so t = 1/2, q = r = s = 0 is tight.
        let line = SpaceDescriptor::real_line_abs();
        let vp = VirtualPair::new(Point::scalar(0.0), Point::scalar(1.0), Point::scalar(0.0), Point::scalar(1.0)).unwrap();
        assert_eq!(certify_firm_constant_grid(&line, std::slice::from_ref(&vp), 1e-3).unwrap().t(), Some(0.5));
        assert!(certify_firm_constant(&line, &[vp], 1e-3).unwrap().t().unwrap() >= 0.5 - 1e-12);
    }

    #[test]
    fn rejects_bad_t_min() {
        let line = SpaceDescriptor::real_line_abs();
        assert!(certify_firm_constant(&line, &[], 0.0).is_err());
        assert!(certify_firm_constant_grid(&line, &[], 0.75).is_err());
    }
}
