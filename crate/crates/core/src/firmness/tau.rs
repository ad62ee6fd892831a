//! The pairwise ratio `tau` characterising firmness of non-expansive maps:
//!
//! ```text
//! M(x,y)   = max[delta(x,y), delta(x,Tx), delta(y,Ty)]
//! A(x,y)   = (delta(x,Ty) + delta(Tx,y)) / 2
//! tau(x,y) = (M - delta(Tx,Ty)) / (2 (M - A))
//! ```
//!
//! A non-expansive map is firm iff `inf tau > 0` over pairs with
//! `A < delta(Tx,Ty)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::checks::argmin;
use crate::error::Result;
use crate::mappings::{SelfMap, VirtualPair};
use crate::metric::WeakMetric;
use crate::point::Point;

/// Relative denominator guard and filter margin.
pub const DEFAULT_EPS_DEN: f64 = 1e-9;
pub const DEFAULT_TAU_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauRecord {
    pub x: Point,
    pub y: Point,
    pub m: f64,
    pub a: f64,
    pub d_tt: f64,
    /// `None` when `M - A <= eps_den * max(M, 1)`.
    pub tau: Option<f64>,
    /// `A < delta(Tx,Ty) - eps_den * M`.
    pub passes_filter: bool,
}

impl TauRecord {
    /// All four distances vanish (a fixed point paired with itself).
    pub fn is_degenerate(&self) -> bool {
        self.m == 0.0 && self.a == 0.0 && self.d_tt == 0.0
    }
}

pub fn tau_record<M: WeakMetric + ?Sized>(space: &M, quad: &VirtualPair, eps_den: f64) -> TauRecord {
    let VirtualPair { x, y, tx, ty } = quad;
    let m = space.distance(x, y).max(space.distance(x, tx)).max(space.distance(y, ty));
    let a = 0.5 * (space.distance(x, ty) + space.distance(tx, y));
    let d_tt = space.distance(tx, ty);
    let guard = eps_den * m.max(1.0);
    let tau = if m - a > guard { Some((m - d_tt) / (2.0 * (m - a))) } else { None };
    TauRecord {
        x: x.clone(),
        y: y.clone(),
        m,
        a,
        d_tt,
        tau,
        passes_filter: a < d_tt - eps_den * m,
    }
}

/// `tau` for a map at `(x, y)` with the default guard.
pub fn tau<M, T>(space: &M, map: &T, x: &Point, y: &Point) -> Result<TauRecord>
where
    M: WeakMetric + ?Sized,
    T: SelfMap + ?Sized,
{
    Ok(tau_record(space, &VirtualPair::from_map(map, x, y)?, DEFAULT_EPS_DEN))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TauScanOptions {
    pub eps_den: f64,
    /// `inf tau >= threshold` is reported as firm-consistent.
    pub threshold: f64,
    /// Tolerance of the non-expansiveness gate on the same sample.
    pub nonexpansive_tol: f64,
}

impl Default for TauScanOptions {
    fn default() -> Self {
        TauScanOptions { eps_den: DEFAULT_EPS_DEN, threshold: DEFAULT_TAU_THRESHOLD, nonexpansive_tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauVerdict {
    FirmConsistent,
    NotFirmConsistent,
    /// The map expands some sampled pair; the criterion does not apply.
    NotApplicable,
}

#[derive(Debug, Clone, Serialize)]
pub struct TauScanReport {
    pub pairs_scanned: usize,
    /// Pairs passing `A < delta(Tx,Ty)` with a defined `tau`.
    pub filtered_count: usize,
    /// Pairs passing the filter whose denominator fell under the guard.
    pub degenerate_excluded: usize,
    /// `+inf` when no pair passes.
    pub inf_tau: f64,
    pub argmin: Option<TauRecord>,
    pub max_nonexpansive_excess: f64,
    pub options: TauScanOptions,
    pub verdict: TauVerdict,
}

pub fn tau_infimum_scan<M: WeakMetric + Sync + ?Sized>(space: &M, quads: &[VirtualPair], options: TauScanOptions) -> TauScanReport {
    let records: Vec<TauRecord> = quads.par_iter().map(|q| tau_record(space, q, options.eps_den)).collect();
    let excess = quads
        .iter()
        .map(|q| space.distance(&q.tx, &q.ty) - space.distance(&q.x, &q.y))
        .fold(f64::NEG_INFINITY, f64::max);

    let mut degenerate_excluded = 0;
    let mut candidates = Vec::new();
    let mut values = Vec::new();
    for (i, r) in records.iter().enumerate() {
        if !r.passes_filter {
            continue;
        }
        match r.tau {
            Some(t) => {
                candidates.push(i);
                values.push(t);
            }
            None => degenerate_excluded += 1,
        }
    }
    let best = argmin(&values);
    let inf_tau = best.map_or(f64::INFINITY, |(_, v)| v);
    let verdict = if excess > options.nonexpansive_tol {
        TauVerdict::NotApplicable
    } else if inf_tau >= options.threshold {
        TauVerdict::FirmConsistent
    } else {
        TauVerdict::NotFirmConsistent
    };
    TauScanReport {
        pairs_scanned: quads.len(),
        filtered_count: candidates.len(),
        degenerate_excluded,
        inf_tau,
        argmin: best.map(|(i, _)| records[candidates[i]].clone()),
        max_nonexpansive_excess: excess,
        options,
        verdict,
    }
}
