//! Sampled checks of the weak-metric axioms and of non-expansiveness.
//!
//! Per-sample work runs in parallel; results are collected in sample order
//! and reduced sequentially, so reports do not depend on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::mappings::{images_of, SelfMap};
use crate::metric::WeakMetric;
use crate::point::Point;
use crate::sampler::{Pair, Sampler};

/// First index attaining the maximum.
pub(crate) fn argmax(values: &[f64]) -> Option<(usize, f64)> {
    values.iter().copied().enumerate().fold(None, |best, (i, v)| match best {
        Some((_, b)) if b >= v => best,
        _ => Some((i, v)),
    })
}

/// First index attaining the minimum.
pub(crate) fn argmin(values: &[f64]) -> Option<(usize, f64)> {
    values.iter().copied().enumerate().fold(None, |best, (i, v)| match best {
        Some((_, b)) if b <= v => best,
        _ => Some((i, v)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AxiomViolation {
    SelfDistance { point: Point, value: f64 },
    /// `delta(x, y) + delta(y, z) - delta(x, z) = slack < -tol`.
    Triangle { x: Point, y: Point, z: Point, slack: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub samples_checked: usize,
    pub triples_checked: usize,
    pub max_self_distance: f64,
    /// Minimum over ordered triples of `delta(x,y) + delta(y,z) - delta(x,z)`.
    pub worst_triangle_slack: f64,
    pub violations: Vec<AxiomViolation>,
    /// Set when there was nothing to check.
    pub empty_sample: bool,
    pub passed: bool,
}

pub fn check_weak_metric_axioms<M: WeakMetric + Sync + ?Sized>(space: &M, sampler: &Sampler, tol: f64) -> Result<AxiomReport> {
    check_weak_metric_axioms_on(space, &sampler.points(), tol)
}

/// Self-distance on every point; triangle inequality on all six orderings of
/// each block of three consecutive points.
pub fn check_weak_metric_axioms_on<M: WeakMetric + Sync + ?Sized>(space: &M, points: &[Point], tol: f64) -> Result<AxiomReport> {
    if tol < 0.0 || tol.is_nan() {
        return Err(crate::Error::usage(format!("tolerance must be >= 0, got {tol}")));
    }
    for p in points {
        p.check_dim(space.dimension())?;
    }
    let self_distances: Vec<f64> = points.par_iter().map(|p| space.distance(p, p)).collect();
    let mut violations: Vec<AxiomViolation> = self_distances
        .iter()
        .zip(points)
        .filter(|(v, _)| v.abs() > tol)
        .map(|(v, p)| AxiomViolation::SelfDistance { point: p.clone(), value: *v })
        .collect();

    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let triples: Vec<&[Point]> = points.chunks_exact(3).collect();
    let slacks: Vec<[f64; 6]> = triples
        .par_iter()
        .map(|t| {
            ORDERS.map(|[a, b, c]| {
                space.distance(&t[a], &t[b]) + space.distance(&t[b], &t[c]) - space.distance(&t[a], &t[c])
            })
        })
        .collect();
    let mut worst = f64::INFINITY;
    for (t, s) in triples.iter().zip(&slacks) {
        for (order, slack) in ORDERS.iter().zip(s) {
            worst = worst.min(*slack);
            if *slack < -tol {
                violations.push(AxiomViolation::Triangle {
                    x: t[order[0]].clone(),
                    y: t[order[1]].clone(),
                    z: t[order[2]].clone(),
                    slack: *slack,
                });
            }
        }
    }
    Ok(AxiomReport {
        samples_checked: points.len(),
        triples_checked: 6 * triples.len(),
        max_self_distance: self_distances.iter().fold(0.0, |m, v| m.max(v.abs())),
        worst_triangle_slack: worst,
        passed: violations.is_empty(),
        violations,
        empty_sample: points.is_empty(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonexpansiveReport {
    pub pairs_checked: usize,
    /// `max delta(Tx, Ty) - delta(x, y)` over the pairs.
    pub max_excess: f64,
    pub worst_pair: Option<Pair>,
    pub tol: f64,
    pub nonexpansive: bool,
}

pub fn check_nonexpansive<M, T>(space: &M, map: &T, sampler: &Sampler, tol: f64) -> Result<NonexpansiveReport>
where
    M: WeakMetric + Sync + ?Sized,
    T: SelfMap + Sync + ?Sized,
{
    check_nonexpansive_on(space, map, &sampler.pairs(), tol)
}

pub fn check_nonexpansive_on<M, T>(space: &M, map: &T, pairs: &[Pair], tol: f64) -> Result<NonexpansiveReport>
where
    M: WeakMetric + Sync + ?Sized,
    T: SelfMap + Sync + ?Sized,
{
    let quads = images_of(map, pairs)?;
    let excess: Vec<f64> = quads
        .par_iter()
        .map(|q| space.distance(&q.tx, &q.ty) - space.distance(&q.x, &q.y))
        .collect();
    let best = argmax(&excess);
    let max_excess = best.map_or(f64::NEG_INFINITY, |(_, v)| v);
    Ok(NonexpansiveReport {
        pairs_checked: pairs.len(),
        max_excess,
        worst_pair: best.map(|(i, _)| pairs[i].clone()),
        tol,
        nonexpansive: max_excess <= tol,
    })
}
