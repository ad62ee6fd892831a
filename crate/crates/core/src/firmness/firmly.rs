use rayon::prelude::*;
use serde::Serialize;

use crate::checks::argmax;
use crate::error::{Error, Result};
use crate::mappings::{images_of, SelfMap};
use crate::metric::SpaceDescriptor;
use crate::sampler::Pair;

/// `{0.05, 0.10, ..., 0.95}`.
pub fn default_lambda_grid() -> Vec<f64> {
    (1..=19).map(|i| i as f64 * 0.05).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct LambdaVerdict {
    pub lambda: f64,
    /// `max ||Tx - Ty|| - ||(1 - lambda)(Tx - Ty) + lambda (x - y)||`.
    pub max_violation: f64,
    pub worst_pair: Option<Pair>,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FirmlyNonexpansiveReport {
    pub pairs_checked: usize,
    pub tol: f64,
    pub per_lambda: Vec<LambdaVerdict>,
    /// The inequality holds at every grid value.
    pub firmly_nonexpansive: bool,
}

impl FirmlyNonexpansiveReport {
    /// Grid values at which the inequality holds on every pair.
    pub fn passing_lambdas(&self) -> Vec<f64> {
        self.per_lambda.iter().filter(|v| v.holds).map(|v| v.lambda).collect()
    }
}

/// Firmly non-expansive inequality on a normed host, one verdict per `lambda`.
pub fn check_firmly_nonexpansive<T: SelfMap + Sync + ?Sized>(
    space: &SpaceDescriptor,
    map: &T,
    lambda_grid: &[f64],
    pairs: &[Pair],
    tol: f64,
) -> Result<FirmlyNonexpansiveReport> {
    if !space.is_vector_space() {
        return Err(Error::usage("the firmly non-expansive inequality needs a normed vector-space host"));
    }
    if let Some(bad) = lambda_grid.iter().find(|l| !(**l > 0.0 && **l <= 1.0)) {
        return Err(Error::usage(format!("lambda grid values must lie in ]0, 1], got {bad}")));
    }
    let quads = images_of(map, pairs)?;
    let per_lambda = lambda_grid
        .iter()
        .map(|&lambda| {
            let gaps: Vec<f64> = quads
                .par_iter()
                .map(|q| {
                    let image_gap = q.ty.to(&q.tx);
                    let gap = q.y.to(&q.x);
                    let mix: Vec<f64> = image_gap
                        .iter()
                        .zip(&gap)
                        .map(|(u, w)| (1.0 - lambda) * u + lambda * w)
                        .collect();
                    space.norm(&image_gap) - space.norm(&mix)
                })
                .collect();
            let best = argmax(&gaps);
            let max_violation = best.map_or(f64::NEG_INFINITY, |(_, v)| v);
            LambdaVerdict {
                lambda,
                max_violation,
                worst_pair: best.map(|(i, _)| pairs[i].clone()),
                holds: max_violation <= tol,
            }
        })
        .collect::<Vec<_>>();
    Ok(FirmlyNonexpansiveReport {
        pairs_checked: pairs.len(),
        tol,
        firmly_nonexpansive: per_lambda.iter().all(|v| v.holds),
        per_lambda,
    })
}
