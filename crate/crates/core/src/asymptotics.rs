//! Orbits and the asymptotic quantities of a non-expansive map:
//! minimal displacement `inf_w delta(w, Tw)`, escape rate
//! `lim delta(x, T^n x)/n`, and step sizes `sigma_k = lim_n delta(T^n x, T^{n+k} x)`.
//!
//! For firm maps all of `rho_bar`, `rho`, `sigma_1` and `sigma_k / k`
//! coincide; [`verify_theorem1`] compares the estimates side by side.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::checks::argmin;
use crate::error::{Error, Result};
use crate::mappings::SelfMap;
use crate::metric::WeakMetric;
use crate::point::Point;
use crate::sampler::Region;

/// Coordinates beyond this magnitude count as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e300;
/// Slack for `sigma_k / k <= sigma_1`.
pub const INEQ1_TOL: f64 = 1e-9;
const DESCENT_FLOOR: f64 = 1e-9;
const DESCENT_MAX_EVALS: usize = 200_000;

#[derive(Debug, Clone)]
pub struct OrbitTrace {
    pub x0: Point,
    pub horizon: usize,
    pub max_k: usize,
    /// `T^n x0` for `0 <= n <= horizon`.
    pub iterates: Vec<Point>,
    /// `step_table[k - 1][n] = delta(T^n x0, T^{n+k} x0)` for `n <= horizon - k`.
    pub step_table: Vec<Vec<f64>>,
    /// `from_base[n] = delta(x0, T^n x0)`.
    pub from_base: Vec<f64>,
}

impl OrbitTrace {
    pub fn steps(&self, k: usize) -> &[f64] {
        &self.step_table[k - 1]
    }

    /// `max_{k,n} [delta(T^{n+1}x, T^{n+1+k}x) - delta(T^n x, T^{n+k}x)]`;
    /// non-positive for a non-expansive map.
    pub fn max_monotonicity_violation(&self) -> f64 {
        self.step_table
            .iter()
            .flat_map(|row| row.windows(2).map(|w| w[1] - w[0]))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes `n, x_1..x_d, step_1, from_base`; `step_1` is empty on the last row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::usage(format!("csv export failed: {e}"));
        let mut w = csv::Writer::from_writer(out);
        let d = self.x0.dim();
        let mut header = vec!["n".to_string()];
        header.extend((1..=d).map(|i| format!("x{i}")));
        header.push("step_1".into());
        header.push("from_base".into());
        w.write_record(&header).map_err(io)?;
        let steps = self.steps(1);
        for (n, p) in self.iterates.iter().enumerate() {
            let mut rec = vec![n.to_string()];
            rec.extend(p.coords().iter().map(|c| c.to_string()));
            rec.push(steps.get(n).map(|s| s.to_string()).unwrap_or_default());
            rec.push(self.from_base[n].to_string());
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::usage(format!("csv export failed: {e}")))?;
        Ok(())
    }
}

/// Iterates `T` from `x0` for `horizon` steps and tabulates
/// `delta(T^n x0, T^{n+k} x0)` for `k <= max_k`.
pub fn iterate_orbit<M, T>(space: &M, map: &T, x0: &Point, horizon: usize, max_k: usize) -> Result<OrbitTrace>
where
    M: WeakMetric + ?Sized,
    T: SelfMap + ?Sized,
{
    if max_k == 0 || horizon < max_k {
        return Err(Error::usage(format!("need horizon >= K >= 1, got horizon = {horizon}, K = {max_k}")));
    }
    x0.check_dim(space.dimension())?;
    let mut iterates = Vec::with_capacity(horizon + 1);
    iterates.push(x0.clone());
    for n in 1..=horizon {
        let next = map.apply(&iterates[n - 1]).map_err(|e| match e {
            Error::Domain(_) => Error::Divergence { step: n },
            other => other,
        })?;
        if next.max_abs() > DIVERGENCE_BOUND {
            return Err(Error::Divergence { step: n });
        }
        iterates.push(next);
    }
    let step_table = (1..=max_k)
        .map(|k| (0..=horizon - k).map(|n| space.distance(&iterates[n], &iterates[n + k])).collect())
        .collect();
    let from_base = iterates.iter().map(|p| space.distance(x0, p)).collect();
    Ok(OrbitTrace { x0: x0.clone(), horizon, max_k, iterates, step_table, from_base })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaEstimate {
    pub k: usize,
    /// Window mean of `delta(T^n x, T^{n+k} x)`.
    pub value: f64,
    /// `value / k`.
    pub per_step: f64,
    /// Max minus min over the window.
    pub cauchy_width: f64,
    pub window: usize,
    /// Last `n` in the window.
    pub window_end: usize,
}

pub fn default_window(horizon: usize) -> usize {
    (horizon / 10).max(10)
}

/// Tail estimate of `sigma_k`.
///
/// All `k` share the same window of base indices, ending at
/// `n = horizon - max_k`, so that `sigma_k <= k sigma_1` (which holds term by
/// term for non-expansive maps) survives averaging.
pub fn sigma_estimate(trace: &OrbitTrace, k: usize, window: Option<usize>) -> Result<SigmaEstimate> {
    if k == 0 || k > trace.max_k {
        return Err(Error::usage(format!("k = {k} outside 1..={} of the trace", trace.max_k)));
    }
    let window = window.unwrap_or_else(|| default_window(trace.horizon));
    let end = trace.horizon - trace.max_k;
    if window == 0 || window > end + 1 {
        return Err(Error::usage(format!(
            "window {window} exceeds the {} aligned entries of a horizon-{} trace",
            end + 1,
            trace.horizon
        )));
    }
    let tail = &trace.steps(k)[end + 1 - window..=end];
    let value = tail.iter().sum::<f64>() / window as f64;
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    Ok(SigmaEstimate { k, value, per_step: value / k as f64, cauchy_width: hi - lo, window, window_end: end })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoEstimate {
    /// `delta(x0, T^N x0) / N`.
    pub value: f64,
    /// `(n, delta(x0, T^n x0)/n)` at `n = N/4, N/2, 3N/4, N`.
    pub trend: Vec<(usize, f64)>,
}

impl RhoEstimate {
    /// Max minus min of the trend values.
    pub fn trend_spread(&self) -> f64 {
        let (lo, hi) = self.trend.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| (lo.min(*v), hi.max(*v)));
        hi - lo
    }
}

pub const MIN_RHO_HORIZON: usize = 100;

pub fn rho_estimate(trace: &OrbitTrace) -> Result<RhoEstimate> {
    let n = trace.horizon;
    if n < MIN_RHO_HORIZON {
        return Err(Error::usage(format!("escape-rate estimate needs horizon >= {MIN_RHO_HORIZON}, got {n}")));
    }
    let trend = [n / 4, n / 2, 3 * n / 4, n].iter().map(|&m| (m, trace.from_base[m] / m as f64)).collect();
    Ok(RhoEstimate { value: trace.from_base[n] / n as f64, trend })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoCrossCheck {
    pub primary: RhoEstimate,
    pub secondary: RhoEstimate,
    pub secondary_base: Point,
    pub difference: f64,
    pub agree: bool,
}

/// Escape rate from two base points; agreement within `2 tol` is expected.
pub fn rho_cross_check<M, T>(space: &M, map: &T, x0: &Point, x1: &Point, horizon: usize, tol: f64) -> Result<RhoCrossCheck>
where
    M: WeakMetric + ?Sized,
    T: SelfMap + ?Sized,
{
    let primary = rho_estimate(&iterate_orbit(space, map, x0, horizon, 1)?)?;
    let secondary = rho_estimate(&iterate_orbit(space, map, x1, horizon, 1)?)?;
    let difference = (primary.value - secondary.value).abs();
    Ok(RhoCrossCheck { primary, secondary, secondary_base: x1.clone(), difference, agree: difference <= 2.0 * tol })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinDisplacement {
    /// `min delta(w, Tw)` over evaluated `w`: an upper bound on the minimal displacement over the region.
    pub upper_bound: f64,
    pub argmin: Point,
    pub evaluations: usize,
}

/// Grid search with about `budget` nodes, then compass search from the best
/// node with steps halving from the region diameter down to `1e-9`.
pub fn min_displacement_search<M, T>(space: &M, map: &T, region: &Region, budget: usize) -> Result<MinDisplacement>
where
    M: WeakMetric + Sync + ?Sized,
    T: SelfMap + Sync + ?Sized,
{
    if budget == 0 {
        return Err(Error::usage("min-displacement search needs a budget of at least one evaluation"));
    }
    if region.dim() != space.dimension() {
        return Err(Error::DimensionMismatch { expected: space.dimension(), found: region.dim() });
    }
    let displacement = |w: &Point| map.apply(w).ok().map(|tw| space.distance(w, &tw));
    let grid = region.lattice(budget);
    let values: Vec<f64> = grid.par_iter().map(|w| displacement(w).unwrap_or(f64::INFINITY)).collect();
    let mut evaluations = grid.len();
    let (i, mut best) = argmin(&values).expect("lattice is non-empty");
    if !best.is_finite() {
        return Err(Error::Divergence { step: 1 });
    }
    let mut best_point = grid[i].clone();

    let mut step = region.diameter();
    while step >= DESCENT_FLOOR && evaluations < DESCENT_MAX_EVALS && best > 0.0 {
        let mut improved = false;
        for axis in 0..region.dim() {
            for sign in [-1.0, 1.0] {
                let mut coords = best_point.coords().to_vec();
                coords[axis] += sign * step;
                region.clamp(&mut coords);
                let candidate = Point::from_raw(coords);
                evaluations += 1;
                if let Some(v) = displacement(&candidate) {
                    if v < best {
                        best = v;
                        best_point = candidate;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(MinDisplacement { upper_bound: best, argmin: best_point, evaluations })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub relation: String,
    pub value: f64,
    pub within_tol: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub horizon: usize,
    pub max_k: usize,
    pub tol: f64,
    pub sigma: Vec<SigmaEstimate>,
    pub rho: RhoEstimate,
    pub rho_bar: MinDisplacement,
    pub search_region: Region,
    /// `|sigma_k/k - sigma_1|` for `k >= 2`, `|sigma_1 - rho|`, `|rho_bar - sigma_1|`.
    pub discrepancies: Vec<Discrepancy>,
    /// `sigma_k / k <= sigma_1 + 1e-9` for every `k`.
    pub ineq1_holds: bool,
    /// `rho_bar >= rho - tol`.
    pub rho_bar_dominates_rho: bool,
    /// `sigma_1 - rho_bar`, signed; `rho_bar` is only an upper bound so no sign is asserted.
    pub sigma1_minus_rho_bar: f64,
    pub trend_spread: f64,
    pub trend_stable: bool,
    pub max_monotonicity_violation: f64,
    pub unconditional_hold: bool,
    pub verdict: Verdict,
}

impl Theorem1Report {
    /// The four estimates `sigma_k/k` (all k), `sigma_1`, `rho`, `rho_bar`.
    pub fn quantities(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.sigma.iter().map(|s| s.per_step).collect();
        v.push(self.rho.value);
        v.push(self.rho_bar.upper_bound);
        v
    }
}

/// Bounding box of the orbit.
pub fn orbit_region(trace: &OrbitTrace) -> Region {
    let d = trace.x0.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in &trace.iterates {
        for (i, c) in p.coords().iter().enumerate() {
            lo[i] = lo[i].min(*c);
            hi[i] = hi[i].max(*c);
        }
    }
    Region::new(lo, hi).expect("orbit coordinates are finite")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem1Options {
    pub horizon: usize,
    pub max_k: usize,
    pub tol: f64,
    /// Defaults to the orbit's bounding box.
    pub region: Option<Region>,
    pub budget: usize,
    pub window: Option<usize>,
}

impl Default for Theorem1Options {
    fn default() -> Self {
        Theorem1Options { horizon: 10_000, max_k: 5, tol: 1e-6, region: None, budget: 1000, window: None }
    }
}

pub fn verify_theorem1<M, T>(space: &M, map: &T, x0: &Point, opts: &Theorem1Options) -> Result<(Theorem1Report, OrbitTrace)>
where
    M: WeakMetric + Sync + ?Sized,
    T: SelfMap + Sync + ?Sized,
{
    let trace = iterate_orbit(space, map, x0, opts.horizon, opts.max_k)?;
    let sigma = (1..=opts.max_k)
        .map(|k| sigma_estimate(&trace, k, opts.window))
        .collect::<Result<Vec<_>>>()?;
    let rho = rho_estimate(&trace)?;
    let region = opts.region.clone().unwrap_or_else(|| orbit_region(&trace));
    let rho_bar = min_displacement_search(space, map, &region, opts.budget)?;

    let tol = opts.tol;
    let s1 = sigma[0].value;
    let mut discrepancies: Vec<Discrepancy> = sigma[1..]
        .iter()
        .map(|s| (format!("|sigma_{}/{} - sigma_1|", s.k, s.k), (s.per_step - s1).abs()))
        .chain([
            ("|sigma_1 - rho|".to_string(), (s1 - rho.value).abs()),
            ("|rho_bar - sigma_1|".to_string(), (rho_bar.upper_bound - s1).abs()),
        ])
        .map(|(relation, value)| Discrepancy { relation, value, within_tol: value <= tol })
        .collect();
    discrepancies.shrink_to_fit();

    let ineq1_holds = sigma.iter().all(|s| s.per_step <= s1 + INEQ1_TOL);
    let rho_bar_dominates_rho = rho_bar.upper_bound >= rho.value - tol;
    let trend_spread = rho.trend_spread();
    let trend_stable = trend_spread <= tol;
    let unconditional_hold = ineq1_holds && rho_bar_dominates_rho;
    let pass = discrepancies.iter().all(|d| d.within_tol) && trend_stable && unconditional_hold;
    let report = Theorem1Report {
        horizon: opts.horizon,
        max_k: opts.max_k,
        tol,
        sigma1_minus_rho_bar: s1 - rho_bar.upper_bound,
        max_monotonicity_violation: trace.max_monotonicity_violation(),
        sigma,
        rho,
        rho_bar,
        search_region: region,
        discrepancies,
        ineq1_holds,
        rho_bar_dominates_rho,
        trend_spread,
        trend_stable,
        unconditional_hold,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
    };
    Ok((report, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mappings::MapDescriptor;
    use crate::metric::SpaceDescriptor;
    use crate::spaces::LpExponent;

    fn line() -> SpaceDescriptor {
        SpaceDescriptor::real_line_abs()
    }

    /// Independent scalar iteration of reflect_exp.
    fn reflect_exp_orbit(x0: f64, n: usize) -> Vec<f64> {
        let mut xs = vec![x0];
        for _ in 0..n {
            let x = *xs.last().unwrap();
            xs.push(if x < 0.0 { 1.0 - x } else { x + (-x).exp() });
        }
        xs
    }

    #[test]
    fn abs_plus_one_orbit() {
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        let trace = iterate_orbit(&line(), &t, &Point::scalar(-3.0), 5, 1).unwrap();
        let xs: Vec<f64> = trace.iterates.iter().map(|p| p.x()).collect();
        assert_eq!(xs, vec![-3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        assert_eq!(trace.from_base, vec![0.0, 7.0, 8.0, 9.0, 10.0, 11.0]);
    }

    #[test]
    fn translation_step_table() {
        let t = MapDescriptor::translation(&line(), vec![1.0]).unwrap();
        let trace = iterate_orbit(&line(), &t, &Point::scalar(0.0), 4, 2).unwrap();
        assert_eq!(trace.steps(1), &[1.0; 4]);
        assert_eq!(trace.steps(2), &[2.0; 3]);
    }

    #[test]
    fn identity_steps_vanish() {
        let e2 = SpaceDescriptor::rn_lp(LpExponent::Two, 2).unwrap();
        let t = MapDescriptor::identity(&e2);
        let trace = iterate_orbit(&e2, &t, &Point::new(vec![1.5, -2.0]).unwrap(), 20, 3).unwrap();
        assert!(trace.step_table.iter().flatten().all(|v| *v == 0.0));
        assert!(trace.from_base.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn bad_horizon_and_divergence() {
        let t = MapDescriptor::identity(&line());
        assert!(iterate_orbit(&line(), &t, &Point::scalar(0.0), 2, 3).is_err());
        assert!(iterate_orbit(&line(), &t, &Point::scalar(0.0), 2, 0).is_err());
        let blowup = MapDescriptor::scaling(&line(), 1e100).unwrap();
        assert_eq!(
            iterate_orbit(&line(), &blowup, &Point::scalar(1.0), 10, 1).unwrap_err(),
            Error::Divergence { step: 4 }
        );
    }

    #[test]
    fn sigma_for_abs_plus_one() {
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        let trace = iterate_orbit(&line(), &t, &Point::scalar(-3.0), 100, 3).unwrap();
        let s1 = sigma_estimate(&trace, 1, None).unwrap();
        assert_eq!((s1.value, s1.cauchy_width), (1.0, 0.0));
        assert_eq!(sigma_estimate(&trace, 3, None).unwrap().value, 3.0);
        assert!(sigma_estimate(&trace, 4, None).is_err());
        assert!(sigma_estimate(&trace, 1, Some(99)).is_err());
        let short = iterate_orbit(&line(), &t, &Point::scalar(-3.0), 5, 1).unwrap();
        assert!(sigma_estimate(&short, 1, None).is_err());
    }

    #[test]
    fn sigma_for_reflect_exp_matches_scalar_oracle() {
        let t = MapDescriptor::reflect_exp(&line()).unwrap();
        let trace = iterate_orbit(&line(), &t, &Point::scalar(0.0), 10_000, 1).unwrap();
        let s1 = sigma_estimate(&trace, 1, None).unwrap();
        let xs = reflect_exp_orbit(0.0, 10_000);
        let oracle: f64 = (9_000..10_000).map(|n| xs[n + 1] - xs[n]).sum::<f64>() / 1000.0;
        assert!((s1.value - oracle).abs() < 1e-15);
        // Frozen from the scalar oracle: steps are about 1/n.
        assert!((s1.value - 1.0530089511484065e-4).abs() < 1e-12, "{}", s1.value);
        assert!(s1.value < 1e-2);
    }

    #[test]
    fn sigma_for_translation_in_euclidean_plane() {
        let e2 = SpaceDescriptor::rn_lp(LpExponent::Two, 2).unwrap();
        let t = MapDescriptor::translation(&e2, vec![3.0, 4.0]).unwrap();
        let trace = iterate_orbit(&e2, &t, &Point::new(vec![0.0, 0.0]).unwrap(), 200, 4).unwrap();
        for k in 1..=4 {
            assert_eq!(sigma_estimate(&trace, k, None).unwrap().value, 5.0 * k as f64);
        }
    }

    #[test]
    fn rho_examples() {
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        let trace = iterate_orbit(&line(), &t, &Point::scalar(-3.0), 10_000, 1).unwrap();
        let rho = rho_estimate(&trace).unwrap();
        assert_eq!(rho.value, 1.0006);
        assert_eq!(rho.trend[0], (2500, 2506.0 / 2500.0));

        let t = MapDescriptor::reflect_exp(&line()).unwrap();
        let trace = iterate_orbit(&line(), &t, &Point::scalar(0.0), 10_000, 1).unwrap();
        let rho = rho_estimate(&trace).unwrap();
        assert!(rho.value < 1e-2);
        // Logarithmic escape shows up as a decreasing trend.
        assert!(rho.trend.windows(2).all(|w| w[1].1 < w[0].1));

        let id = MapDescriptor::identity(&line());
        let trace = iterate_orbit(&line(), &id, &Point::scalar(4.0), 100, 1).unwrap();
        assert_eq!(rho_estimate(&trace).unwrap().value, 0.0);
        let trace = iterate_orbit(&line(), &id, &Point::scalar(4.0), 99, 1).unwrap();
        assert!(rho_estimate(&trace).is_err());
    }

    #[test]
    fn rho_does_not_depend_on_base() {
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        let c = rho_cross_check(&line(), &t, &Point::scalar(-3.0), &Point::scalar(7.5), 10_000, 1e-2).unwrap();
        assert!(c.agree, "{}", c.difference);
    }

    #[test]
    fn min_displacement_examples() {
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        let r = min_displacement_search(&line(), &t, &Region::interval(-10.0, 10.0).unwrap(), 101).unwrap();
        assert_eq!(r.upper_bound, 1.0);
        assert!(r.argmin.x() >= 0.0);

        let t = MapDescriptor::reflect_exp(&line()).unwrap();
        let r = min_displacement_search(&line(), &t, &Region::interval(0.0, 40.0).unwrap(), 101).unwrap();
        assert!(r.upper_bound <= 1e-15);

        let t = MapDescriptor::scaling(&line(), 0.5).unwrap();
        let r = min_displacement_search(&line(), &t, &Region::interval(-3.0, 7.0).unwrap(), 10).unwrap();
        assert!(r.upper_bound <= 1e-9, "{}", r.upper_bound);
        assert!(r.argmin.x().abs() <= 2e-9);
    }

    #[test]
    fn theorem1_on_builtin_firm_maps() {
        let opts = Theorem1Options { tol: 1e-2, ..Theorem1Options::default() };
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        let (r, _) = verify_theorem1(&line(), &t, &Point::scalar(-3.0), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:#?}");
        assert!(r.quantities().iter().all(|q| (q - 1.0).abs() <= 1e-2));

        let t = MapDescriptor::reflect_exp(&line()).unwrap();
        let (r, _) = verify_theorem1(&line(), &t, &Point::scalar(0.0), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{r:#?}");
        assert!(r.quantities().iter().all(|q| *q <= 1e-2));

        let e2 = SpaceDescriptor::rn_lp(LpExponent::Two, 2).unwrap();
        let t = MapDescriptor::translation(&e2, vec![3.0, 4.0]).unwrap();
        let opts = Theorem1Options { horizon: 1000, tol: 1e-12, ..Theorem1Options::default() };
        let (r, _) = verify_theorem1(&e2, &t, &Point::new(vec![0.0, 0.0]).unwrap(), &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.quantities().iter().all(|q| (q - 5.0).abs() <= 1e-12));
    }

    #[test]
    fn csv_export() {
        let t = MapDescriptor::abs_plus_one(&line()).unwrap();
        let trace = iterate_orbit(&line(), &t, &Point::scalar(-3.0), 3, 1).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "n,x1,step_1,from_base\n0,-3,7,0\n1,4,1,7\n2,5,1,8\n3,6,,9\n");
    }
}
