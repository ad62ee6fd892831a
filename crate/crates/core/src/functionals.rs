//! Metric functionals on symmetric hosts.
//!
//! `Phi(w) = h_w`, `h_w(x) = d(x, w) - d(x0, w)`, embeds `X` into 1-Lipschitz
//! functions vanishing at `x0`; metric functionals are pointwise limits of
//! such `h_w`. Along an orbit the limit is approximated by anchors
//! `w_i = T^{n_i} x0` whose values are compared on a probe set.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::{OrbitTrace, DIVERGENCE_BOUND};
use crate::error::{Error, Result};
use crate::mappings::SelfMap;
use crate::metric::{SpaceDescriptor, WeakMetric};
use crate::point::Point;
use crate::sampler::Pair;

/// Convergence is judged over this many trailing anchors.
pub const OSCILLATION_WINDOW: usize = 3;
const LAW_TOL: f64 = 1e-12;

/// Finite-horizon stand-in for a metric functional: anchor data plus lazy evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricFunctionalApprox {
    space: SpaceDescriptor,
    base: Point,
    anchors: Vec<Point>,
    /// `d(x0, w_i)`.
    offsets: Vec<f64>,
    /// Orbit indices of the anchors; empty for a single `phi` anchor.
    horizons: Vec<usize>,
    probes: Vec<Point>,
    /// Max over probes of the spread of `h_i(p)` across the trailing anchors.
    oscillation: f64,
    tol: f64,
    converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalValue {
    pub value: f64,
    /// Probe oscillation of the functional; only a bound at the probes themselves.
    pub oscillation: f64,
    pub converged: bool,
}

fn require_symmetric(space: &SpaceDescriptor) -> Result<()> {
    if space.is_symmetric() {
        Ok(())
    } else {
        Err(Error::usage(format!(
            "metric functionals need a symmetric distance; {} is asymmetric",
            space.name()
        )))
    }
}

/// The internal functional `h_w`.
pub fn phi(space: &SpaceDescriptor, x0: &Point, w: &Point) -> Result<MetricFunctionalApprox> {
    require_symmetric(space)?;
    x0.check_dim(space.dimension())?;
    w.check_dim(space.dimension())?;
    Ok(MetricFunctionalApprox {
        space: space.clone(),
        base: x0.clone(),
        offsets: vec![space.distance(x0, w)],
        anchors: vec![w.clone()],
        horizons: Vec::new(),
        probes: Vec::new(),
        oscillation: 0.0,
        tol: 0.0,
        converged: true,
    })
}

/// `count` horizons evenly spaced up to `max`, ending at `max`.
pub fn evenly_spaced_horizons(max: usize, count: usize) -> Vec<usize> {
    let count = count.clamp(1, max.max(1));
    let mut out: Vec<usize> = (1..=count).map(|i| max * i / count).collect();
    out.dedup();
    out
}

/// Anchors `T^{n_i} x0`; converged iff the probe spread over the last
/// three anchors stays below `tol`.
pub fn orbit_limit_functional<T>(
    space: &SpaceDescriptor,
    map: &T,
    x0: &Point,
    horizons: &[usize],
    probes: &[Point],
    tol: f64,
) -> Result<MetricFunctionalApprox>
where
    T: SelfMap + ?Sized,
{
    require_symmetric(space)?;
    x0.check_dim(space.dimension())?;
    if horizons.is_empty() || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::usage("horizons must be non-empty and strictly increasing"));
    }
    for p in probes {
        p.check_dim(space.dimension())?;
    }
    let mut anchors = Vec::with_capacity(horizons.len());
    let mut current = x0.clone();
    let mut n = 0;
    for &target in horizons {
        while n < target {
            n += 1;
            current = map.apply(&current).map_err(|e| match e {
                Error::Domain(_) => Error::Divergence { step: n },
                other => other,
            })?;
            if current.max_abs() > DIVERGENCE_BOUND {
                return Err(Error::Divergence { step: n });
            }
        }
        anchors.push(current.clone());
    }
    let offsets = anchors.iter().map(|w| space.distance(x0, w)).collect();
    let mut f = MetricFunctionalApprox {
        space: space.clone(),
        base: x0.clone(),
        anchors,
        offsets,
        horizons: horizons.to_vec(),
        probes: probes.to_vec(),
        oscillation: f64::INFINITY,
        tol,
        converged: false,
    };
    if f.anchors.len() >= OSCILLATION_WINDOW && !probes.is_empty() {
        let first = f.anchors.len() - OSCILLATION_WINDOW;
        let spreads: Vec<f64> = probes
            .par_iter()
            .map(|p| {
                let vals = (first..f.anchors.len()).map(|i| f.evaluate_anchor(i, p));
                let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                hi - lo
            })
            .collect();
        f.oscillation = spreads.into_iter().fold(0.0, f64::max);
        f.converged = f.oscillation < tol;
    }
    Ok(f)
}

impl MetricFunctionalApprox {
    pub fn space(&self) -> &SpaceDescriptor {
        &self.space
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn anchors(&self) -> &[Point] {
        &self.anchors
    }

    pub fn horizons(&self) -> &[usize] {
        &self.horizons
    }

    pub fn probes(&self) -> &[Point] {
        &self.probes
    }

    pub fn oscillation(&self) -> f64 {
        self.oscillation
    }

    pub fn is_converged(&self) -> bool {
        self.converged
    }

    /// `h_i(x) = d(x, w_i) - d(x0, w_i)`.
    pub fn evaluate_anchor(&self, i: usize, x: &Point) -> f64 {
        self.space.distance(x, &self.anchors[i]) - self.offsets[i]
    }

    /// Value at the largest anchor.
    pub fn evaluate(&self, x: &Point) -> f64 {
        self.evaluate_anchor(self.anchors.len() - 1, x)
    }

    pub fn evaluate_reported(&self, x: &Point) -> FunctionalValue {
        FunctionalValue { value: self.evaluate(x), oscillation: self.oscillation, converged: self.converged }
    }

    pub fn evaluate_many(&self, xs: &[Point]) -> Vec<f64> {
        xs.par_iter().map(|x| self.evaluate(x)).collect()
    }

    /// True when every point lies in the bounding box of the probes.
    pub fn probes_cover(&self, points: &[Point]) -> bool {
        if self.probes.is_empty() {
            return false;
        }
        let d = self.base.dim();
        (0..d).all(|i| {
            let (lo, hi) = self
                .probes
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[i]), hi.max(p[i])));
            points.iter().all(|p| p[i] >= lo && p[i] <= hi)
        })
    }

    /// Writes `x1..xd, h_0..h_{m-1}` with one column per anchor.
    pub fn write_csv<W: Write>(&self, points: &[Point], out: W) -> Result<()> {
        let io = |e: csv::Error| Error::usage(format!("csv export failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.base.dim()).map(|i| format!("x{i}")).collect();
        header.extend((0..self.anchors.len()).map(|i| format!("h_{i}")));
        w.write_record(&header).map_err(io)?;
        let rows: Vec<Vec<String>> = points
            .par_iter()
            .map(|p| {
                let mut rec: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
                rec.extend((0..self.anchors.len()).map(|i| self.evaluate_anchor(i, p).to_string()));
                rec
            })
            .collect();
        for rec in rows {
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::usage(format!("csv export failed: {e}")))?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LawReport {
    pub pairs_checked: usize,
    /// `max |h_i(x0)|`; zero by construction.
    pub max_base_value: f64,
    /// `max |h_i(x) - h_i(y)| - d(x, y)`.
    pub max_lipschitz_excess: f64,
    /// `max h_i(x) - d(x, x0)`.
    pub max_upper_excess: f64,
    /// `max -d(x0, x) - h_i(x)`.
    pub max_lower_excess: f64,
    pub passed: bool,
}

/// Checks `h_i(x0) = 0`, 1-Lipschitz and `-d(x0,x) <= h_i(x) <= d(x,x0)`
/// for every anchor on the given pairs.
pub fn check_functional_laws(f: &MetricFunctionalApprox, pairs: &[Pair]) -> LawReport {
    let space = &f.space;
    let x0 = &f.base;
    let rows: Vec<[f64; 4]> = pairs
        .par_iter()
        .map(|(x, y)| {
            let mut r = [0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
            for i in 0..f.anchors.len() {
                let (hx, hy) = (f.evaluate_anchor(i, x), f.evaluate_anchor(i, y));
                r[0] = r[0].max(f.evaluate_anchor(i, x0).abs());
                r[1] = r[1].max((hx - hy).abs() - space.distance(x, y));
                r[2] = r[2].max(hx - space.distance(x, x0)).max(hy - space.distance(y, x0));
                r[3] = r[3].max(-space.distance(x0, x) - hx).max(-space.distance(x0, y) - hy);
            }
            r
        })
        .collect();
    let mut m = [0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
    for r in &rows {
        for j in 0..4 {
            m[j] = m[j].max(r[j]);
        }
    }
    LawReport {
        pairs_checked: pairs.len(),
        max_base_value: m[0],
        max_lipschitz_excess: m[1],
        max_upper_excess: m[2],
        max_lower_excess: m[3],
        passed: m[0] == 0.0 && m[1] <= LAW_TOL && m[2] <= LAW_TOL && m[3] <= LAW_TOL,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FunctionalVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KarlssonReport {
    pub horizon: usize,
    pub rho_hat: f64,
    pub tol: f64,
    /// `max_n h(T^n x0) + rho_hat n - tol (n + 1)`; the bound holds when `<= 0`.
    pub max_excess: f64,
    pub worst_n: usize,
    /// `max_n |h(T^n x0) + rho_hat n|`.
    pub max_gap: f64,
    /// `-h(T^N x) / N` for the secondary orbit.
    pub secondary_rate: Option<f64>,
    pub secondary_agrees: Option<bool>,
    pub converged: bool,
    pub verdict: FunctionalVerdict,
}

/// Checks `h(T^n x0) <= -rho_hat n + tol (n + 1)` along `trace`, and that
/// `-h(T^N x)/N` is within `tol` of `rho_hat` on an optional secondary orbit.
pub fn check_karlsson_bound(
    f: &MetricFunctionalApprox,
    trace: &OrbitTrace,
    rho_hat: f64,
    tol: f64,
    secondary: Option<&OrbitTrace>,
) -> Result<KarlssonReport> {
    if trace.x0 != f.base {
        return Err(Error::usage("the orbit and the functional must share the base point"));
    }
    let values = f.evaluate_many(&trace.iterates);
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst_n = 0;
    let mut max_gap = 0.0f64;
    for (n, h) in values.iter().enumerate() {
        let excess = h + rho_hat * n as f64 - tol * (n as f64 + 1.0);
        if excess > max_excess {
            max_excess = excess;
            worst_n = n;
        }
        max_gap = max_gap.max((h + rho_hat * n as f64).abs());
    }
    let secondary_rate = secondary.map(|s| -f.evaluate(s.iterates.last().expect("trace is non-empty")) / s.horizon as f64);
    let secondary_agrees = secondary_rate.map(|r| (r - rho_hat).abs() <= tol);
    let holds = max_excess <= 0.0 && secondary_agrees.unwrap_or(true);
    let verdict = match (holds, f.converged) {
        (true, _) => FunctionalVerdict::Pass,
        (false, true) => FunctionalVerdict::Fail,
        (false, false) => FunctionalVerdict::Inconclusive,
    };
    Ok(KarlssonReport {
        horizon: trace.horizon,
        rho_hat,
        tol,
        max_excess,
        worst_n,
        max_gap,
        secondary_rate,
        secondary_agrees,
        converged: f.converged,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DescentOptions {
    pub horizon: usize,
    pub slack: f64,
    pub tol: f64,
    /// When set, also require `h(T^N x) <= -depth`.
    pub depth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescentReport {
    pub start: Point,
    pub options: DescentOptions,
    /// Indices `n` with `h(T^{n+1}x) > h(T^n x) + slack + tol`.
    pub violations: Vec<usize>,
    /// `max_n h(T^{n+1}x) - h(T^n x) - slack`.
    pub max_margin: f64,
    pub final_value: f64,
    pub depth_reached: Option<bool>,
    pub converged: bool,
    pub covered: bool,
    pub verdict: FunctionalVerdict,
}

/// Checks `h(T^{n+1} x) <= h(T^n x) + slack + tol` for `n < N`.
///
/// Inconclusive unless the functional converged on probes spanning the orbit segment.
pub fn check_monotone_descent<T>(
    f: &MetricFunctionalApprox,
    map: &T,
    x: &Point,
    opts: &DescentOptions,
) -> Result<DescentReport>
where
    T: SelfMap + ?Sized,
{
    if !(opts.slack >= 0.0) {
        return Err(Error::usage("descent slack must be non-negative"));
    }
    x.check_dim(f.space.dimension())?;
    let mut orbit = Vec::with_capacity(opts.horizon + 1);
    orbit.push(x.clone());
    for n in 1..=opts.horizon {
        let next = map.apply(&orbit[n - 1]).map_err(|e| match e {
            Error::Domain(_) => Error::Divergence { step: n },
            other => other,
        })?;
        orbit.push(next);
    }
    let h = f.evaluate_many(&orbit);
    let mut violations = Vec::new();
    let mut max_margin = f64::NEG_INFINITY;
    for n in 0..opts.horizon {
        let margin = h[n + 1] - h[n] - opts.slack;
        max_margin = max_margin.max(margin);
        if margin > opts.tol {
            violations.push(n);
        }
    }
    let final_value = h[opts.horizon];
    let depth_reached = opts.depth.map(|d| final_value <= -d);
    let covered = f.probes_cover(&orbit) || f.horizons.is_empty();
    let holds = violations.is_empty() && depth_reached.unwrap_or(true);
    let verdict = if !(f.converged && covered) {
        FunctionalVerdict::Inconclusive
    } else if holds {
        FunctionalVerdict::Pass
    } else {
        FunctionalVerdict::Fail
    };
    Ok(DescentReport {
        start: x.clone(),
        options: *opts,
        violations,
        max_margin,
        final_value,
        depth_reached,
        converged: f.converged,
        covered,
        verdict,
    })
}
