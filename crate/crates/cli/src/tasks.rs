//! Task dispatch: one function per task, each returning a verdict, metrics and optional CSV.

use firmlab::asymptotics::{
    iterate_orbit, min_displacement_search, rho_cross_check, rho_estimate, sigma_estimate, verify_theorem1,
    Theorem1Options, Verdict as Theorem1Verdict, INEQ1_TOL,
};
use firmlab::firmness::{
    certify_report, check_condition_c_on, check_conditions_ab, check_firmly_nonexpansive, proposition_witness_scan,
    tau_infimum_scan, Coefficients, TauScanOptions, TauVerdict, DEFAULT_EPS_DEN, DEFAULT_TAU_THRESHOLD,
};
use firmlab::functionals::{
    check_functional_laws, check_karlsson_bound, check_monotone_descent, evenly_spaced_horizons,
    orbit_limit_functional, DescentOptions, FunctionalVerdict, MetricFunctionalApprox,
};
use firmlab::{
    check_nonexpansive_on, check_weak_metric_axioms, images_of, MapDescriptor, Pair, Point, Region, Sampler, Scheme,
    SpaceDescriptor, VirtualPair, WeakMetric,
};
use serde_json::{json, Value};

use crate::config::{BuiltMap, ExperimentConfig, Params, Task};
use crate::error::CliError;
use crate::report::Verdict;

pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_REGION: [f64; 2] = [-10.0, 10.0];
pub const DEFAULT_HORIZON: usize = 10_000;
pub const DEFAULT_K: usize = 5;
pub const DEFAULT_ESTIMATE_TOL: f64 = 1e-6;
pub const DEFAULT_EXACT_TOL: f64 = 1e-12;
pub const DEFAULT_BUDGET: usize = 1000;
pub const DEFAULT_T_MIN: f64 = 1e-3;
pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_FUNCTIONAL_HORIZON: usize = 1000;
pub const DEFAULT_ANCHORS: usize = 5;
pub const DEFAULT_DESCENT_TOL: f64 = 1e-9;
const MONOTONICITY_TOL: f64 = 1e-12;
const PROBES_PER_AXIS: usize = 11;

pub struct TaskOutput {
    pub verdict: Verdict,
    pub metrics: Value,
    pub csv: Option<Vec<u8>>,
    pub warnings: Vec<String>,
}

struct Ctx<'a> {
    space: SpaceDescriptor,
    map: BuiltMap,
    params: &'a Params,
    seed: u64,
    warnings: Vec<String>,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

impl Ctx<'_> {
    fn dim(&self) -> usize {
        self.space.dimension()
    }

    fn region(&self) -> Result<Region, CliError> {
        match &self.params.region {
            Some(r) => r.build(self.dim()),
            None => Ok(Region::cube(DEFAULT_REGION[0], DEFAULT_REGION[1], self.dim())?),
        }
    }

    fn sampler(&self) -> Result<Sampler, CliError> {
        let count = self.params.samples.unwrap_or(DEFAULT_SAMPLES);
        let scheme = self.params.scheme.unwrap_or(Scheme::UniformRandom);
        Ok(Sampler::new(self.region()?, count, self.seed, scheme)?)
    }

    /// Explicit pairs first, then sampled ones.
    fn pairs(&self) -> Result<Vec<Pair>, CliError> {
        let d = self.dim();
        let mut out = Vec::new();
        for (i, [x, y]) in self.params.pairs.iter().flatten().enumerate() {
            out.push((x.point(d, &format!("params.pairs[{i}][0]"))?, y.point(d, &format!("params.pairs[{i}][1]"))?));
        }
        if self.params.samples != Some(0) {
            out.extend(self.sampler()?.pairs());
        }
        Ok(out)
    }

    fn map(&self, task: Task) -> Result<&MapDescriptor, CliError> {
        match &self.map {
            BuiltMap::Map(m) => Ok(m),
            BuiltMap::Virtual(_) => Err(CliError::Config(format!(
                "task {task} needs a full map; virtual_pair only supports firm-cert, tau-scan and prop-scan"
            ))),
        }
    }

    /// Quadruples `(x, y, Tx, Ty)`: the virtual pair itself, or images of the sampled pairs.
    fn quads(&mut self) -> Result<Vec<VirtualPair>, CliError> {
        if let BuiltMap::Virtual(vp) = &self.map {
            let sampling = ["samples", "scheme", "region", "pairs", "seed"];
            let present = self.params.present();
            if present.iter().any(|k| sampling.contains(&k.as_str())) {
                self.warnings.push("sampling parameters are ignored for a virtual_pair map".into());
            }
            return Ok(vec![vp.clone()]);
        }
        let pairs = self.pairs()?;
        let map = self.map(Task::FirmCert)?;
        Ok(images_of(map, &pairs)?)
    }

    fn x0(&self) -> Result<Point, CliError> {
        match &self.params.x0 {
            Some(c) => c.point(self.dim(), "params.x0"),
            None => Ok(Point::new(vec![0.0; self.dim()])?),
        }
    }

    fn tol(&self, default: f64) -> f64 {
        self.params.tol.unwrap_or(default)
    }

    fn orbit_csv(trace: &firmlab::asymptotics::OrbitTrace) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        trace.write_csv(&mut buf)?;
        Ok(buf)
    }

    fn functional(&self, task: Task) -> Result<(MetricFunctionalApprox, Vec<Point>), CliError> {
        let map = self.map(task)?;
        let n = self.params.n.unwrap_or(DEFAULT_FUNCTIONAL_HORIZON);
        let horizons = match &self.params.horizons {
            Some(h) => h.clone(),
            None => evenly_spaced_horizons(10 * n, DEFAULT_ANCHORS),
        };
        let probes = match &self.params.probes {
            Some(ps) => ps
                .iter()
                .enumerate()
                .map(|(i, p)| p.point(self.dim(), &format!("params.probes[{i}]")))
                .collect::<Result<Vec<_>, _>>()?,
            None => {
                let budget = PROBES_PER_AXIS.saturating_pow(self.dim() as u32).min(100_000);
                self.region()?.lattice(budget)
            }
        };
        let tol = self.tol(if task == Task::Descent { DEFAULT_DESCENT_TOL } else { DEFAULT_ESTIMATE_TOL });
        let f = orbit_limit_functional(&self.space, map, &self.x0()?, &horizons, &probes, tol)?;
        Ok((f, probes))
    }
}

fn functional_summary(f: &MetricFunctionalApprox) -> Value {
    json!({
        "base": f.base(),
        "horizons": f.horizons(),
        "largest_anchor": f.anchors().last(),
        "probe_count": f.probes().len(),
        "oscillation": f.oscillation(),
        "converged": f.is_converged(),
    })
}

pub fn dispatch(config: &ExperimentConfig, seed: u64) -> Result<TaskOutput, CliError> {
    let space = config.space.build()?;
    let map = config.map.build(&space)?;
    let mut warnings: Vec<String> = config
        .params
        .present()
        .into_iter()
        .filter(|k| !config.task.params().contains(&k.as_str()))
        .map(|k| format!("parameter `{k}` is not used by task {}", config.task))
        .collect();
    let mut ctx = Ctx { space, map, params: &config.params, seed, warnings: Vec::new() };
    let mut out = match config.task {
        Task::Axioms => axioms(&mut ctx),
        Task::Nonexp => nonexp(&mut ctx),
        Task::FirmCert => firm_cert(&mut ctx),
        Task::TauScan => tau_scan(&mut ctx),
        Task::PropScan => prop_scan(&mut ctx),
        Task::Rates => rates(&mut ctx),
        Task::Theorem1 => theorem1(&mut ctx),
        Task::Functional => functional(&mut ctx),
        Task::Descent => descent(&mut ctx),
    }?;
    warnings.append(&mut ctx.warnings);
    warnings.append(&mut out.warnings);
    out.warnings = warnings;
    Ok(out)
}

fn output(verdict: Verdict, metrics: Value, csv: Option<Vec<u8>>) -> Result<TaskOutput, CliError> {
    Ok(TaskOutput { verdict, metrics, csv, warnings: Vec::new() })
}

fn pass_if(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn axioms(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let sampler = Sampler::new(
        ctx.region()?,
        ctx.params.samples.unwrap_or(DEFAULT_SAMPLES),
        ctx.seed,
        ctx.params.scheme.unwrap_or(Scheme::UniformRandom),
    )?;
    let r = check_weak_metric_axioms(&ctx.space, &sampler, ctx.tol(DEFAULT_EXACT_TOL))?;
    output(pass_if(r.passed), json!({ "seed": ctx.seed, "space": ctx.space.name(), "axioms": r }), None)
}

fn nonexp(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let map = ctx.map(Task::Nonexp)?;
    let pairs = ctx.pairs()?;
    let tol = ctx.tol(DEFAULT_EXACT_TOL);
    let r = check_nonexpansive_on(&ctx.space, map, &pairs, tol)?;
    let mut metrics = json!({ "seed": ctx.seed, "map": map.name(), "nonexpansive": r });
    let verdict = match &ctx.params.lambda_grid {
        Some(grid) => {
            let f = check_firmly_nonexpansive(&ctx.space, map, grid, &pairs, tol)?;
            let ok = f.firmly_nonexpansive;
            metrics["firmly_nonexpansive"] = to_value(&f);
            pass_if(ok)
        }
        None => pass_if(r.nonexpansive),
    };
    output(verdict, metrics, None)
}

fn firm_cert(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let quads = ctx.quads()?;
    let r = certify_report(&ctx.space, &quads, ctx.params.t_min.unwrap_or(DEFAULT_T_MIN))?;
    let mut ok = r.lp.is_feasible();
    let mut warnings = Vec::new();
    if !r.agree {
        warnings.push("LP and grid search disagree; see metrics.certificate".to_string());
    }
    let mut metrics = json!({ "certificate": r });
    if let Some([q, rr, s, t]) = ctx.params.coefficients {
        let coeffs = Coefficients::constant(q, rr, s, t)?;
        let pairs: Vec<Pair> = quads.iter().map(|v| (v.x.clone(), v.y.clone())).collect();
        let ab = check_conditions_ab(&coeffs, &pairs);
        let c = check_condition_c_on(&ctx.space, &coeffs, &quads, ctx.tol(DEFAULT_EXACT_TOL));
        ok &= ab.passed() && c.satisfied;
        metrics["coefficients"] = json!({ "values": [q, rr, s, t], "conditions_ab": ab, "condition_c": c });
    }
    let verdict = if ok { Verdict::Feasible } else { Verdict::Infeasible };
    Ok(TaskOutput { verdict, metrics, csv: None, warnings })
}

fn tau_scan(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let quads = ctx.quads()?;
    let options = TauScanOptions {
        eps_den: ctx.params.eps_den.unwrap_or(DEFAULT_EPS_DEN),
        threshold: ctx.params.threshold.unwrap_or(DEFAULT_TAU_THRESHOLD),
        ..TauScanOptions::default()
    };
    let r = tau_infimum_scan(&ctx.space, &quads, options);
    let verdict = match r.verdict {
        TauVerdict::FirmConsistent => Verdict::FirmConsistent,
        TauVerdict::NotFirmConsistent => Verdict::NotFirmConsistent,
        TauVerdict::NotApplicable => Verdict::NotApplicable,
    };
    let mut warnings = Vec::new();
    if r.filtered_count == 0 {
        warnings.push("no pair passed the filter; inf_tau is +inf (serialised as null)".to_string());
    }
    Ok(TaskOutput { verdict, metrics: json!({ "tau_scan": r }), csv: None, warnings })
}

fn prop_scan(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let quads = ctx.quads()?;
    let eps = ctx.params.epsilon.unwrap_or(DEFAULT_EPSILON);
    let w = proposition_witness_scan(&ctx.space, &quads, eps)?;
    output(pass_if(w.is_none()), json!({ "pairs_scanned": quads.len(), "epsilon": eps, "witness": w }), None)
}

fn rates(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let map = ctx.map(Task::Rates)?;
    let n = ctx.params.n.unwrap_or(DEFAULT_HORIZON);
    let k = ctx.params.k.unwrap_or(DEFAULT_K);
    let tol = ctx.tol(DEFAULT_ESTIMATE_TOL);
    let x0 = ctx.x0()?;
    let trace = iterate_orbit(&ctx.space, map, &x0, n, k)?;
    let sigma = (1..=k).map(|j| sigma_estimate(&trace, j, ctx.params.window)).collect::<Result<Vec<_>, _>>()?;
    let rho = rho_estimate(&trace)?;
    let monotonicity = trace.max_monotonicity_violation();
    let ineq1 = sigma.iter().all(|s| s.per_step <= sigma[0].value + INEQ1_TOL);
    let mut ok = monotonicity <= MONOTONICITY_TOL && ineq1;
    let mut metrics = json!({
        "sigma": sigma,
        "rho": rho,
        "max_monotonicity_violation": monotonicity,
        "ineq1_holds": ineq1,
    });
    if let Some(x1) = &ctx.params.x1 {
        let c = rho_cross_check(&ctx.space, map, &x0, &x1.point(ctx.dim(), "params.x1")?, n, tol)?;
        ok &= c.agree;
        metrics["rho_cross_check"] = to_value(&c);
    }
    if let Some(region) = &ctx.params.search_region {
        let region = region.build(ctx.dim())?;
        let r = min_displacement_search(&ctx.space, map, &region, ctx.params.budget.unwrap_or(DEFAULT_BUDGET))?;
        let dominates = r.upper_bound >= rho.value - tol;
        ok &= dominates;
        metrics["rho_bar"] = to_value(&r);
        metrics["rho_bar_dominates_rho"] = json!(dominates);
    }
    output(pass_if(ok), metrics, Some(Ctx::orbit_csv(&trace)?))
}

fn theorem1(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let map = ctx.map(Task::Theorem1)?;
    let region = match &ctx.params.search_region {
        Some(r) => Some(r.build(ctx.dim())?),
        None => None,
    };
    let opts = Theorem1Options {
        horizon: ctx.params.n.unwrap_or(DEFAULT_HORIZON),
        max_k: ctx.params.k.unwrap_or(DEFAULT_K),
        tol: ctx.tol(DEFAULT_ESTIMATE_TOL),
        region,
        budget: ctx.params.budget.unwrap_or(DEFAULT_BUDGET),
        window: ctx.params.window,
    };
    let (r, trace) = verify_theorem1(&ctx.space, map, &ctx.x0()?, &opts)?;
    let verdict = pass_if(r.verdict == Theorem1Verdict::Pass);
    output(verdict, json!({ "theorem1": r }), Some(Ctx::orbit_csv(&trace)?))
}

fn functional_verdict(v: FunctionalVerdict) -> Verdict {
    match v {
        FunctionalVerdict::Pass => Verdict::Pass,
        FunctionalVerdict::Fail => Verdict::Fail,
        FunctionalVerdict::Inconclusive => Verdict::Inconclusive,
    }
}

fn probe_csv(f: &MetricFunctionalApprox, probes: &[Point]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    f.write_csv(probes, &mut buf)?;
    Ok(buf)
}

fn functional(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let (f, probes) = ctx.functional(Task::Functional)?;
    let map = ctx.map(Task::Functional)?;
    let laws = check_functional_laws(&f, &ctx.sampler()?.pairs());
    let n = ctx.params.n.unwrap_or(DEFAULT_FUNCTIONAL_HORIZON);
    let trace = iterate_orbit(&ctx.space, map, f.base(), n, 1)?;
    let rho_hat = match ctx.params.rho {
        Some(r) => r,
        None => rho_estimate(&trace)?.value,
    };
    let secondary = match &ctx.params.x1 {
        Some(x1) => Some(iterate_orbit(&ctx.space, map, &x1.point(ctx.dim(), "params.x1")?, n, 1)?),
        None => None,
    };
    let k = check_karlsson_bound(&f, &trace, rho_hat, ctx.tol(DEFAULT_ESTIMATE_TOL), secondary.as_ref())?;
    let verdict = if laws.passed { functional_verdict(k.verdict) } else { Verdict::Fail };
    let metrics = json!({
        "seed": ctx.seed,
        "functional": functional_summary(&f),
        "laws": laws,
        "karlsson": k,
    });
    output(verdict, metrics, Some(probe_csv(&f, &probes)?))
}

fn descent(ctx: &mut Ctx) -> Result<TaskOutput, CliError> {
    let (f, probes) = ctx.functional(Task::Descent)?;
    let map = ctx.map(Task::Descent)?;
    let opts = DescentOptions {
        horizon: ctx.params.n.unwrap_or(DEFAULT_FUNCTIONAL_HORIZON),
        slack: ctx.params.slack.unwrap_or(0.0),
        tol: ctx.tol(DEFAULT_DESCENT_TOL),
        depth: ctx.params.depth,
    };
    let starts = match &ctx.params.starts {
        Some(s) => s
            .iter()
            .enumerate()
            .map(|(i, p)| p.point(ctx.dim(), &format!("params.starts[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![f.base().clone()],
    };
    let reports = starts
        .iter()
        .map(|x| check_monotone_descent(&f, map, x, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let verdicts: Vec<FunctionalVerdict> = reports.iter().map(|r| r.verdict).collect();
    let verdict = if verdicts.contains(&FunctionalVerdict::Fail) {
        Verdict::Fail
    } else if verdicts.contains(&FunctionalVerdict::Inconclusive) {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    let total: usize = reports.iter().map(|r| r.violations.len()).sum();
    let metrics = json!({
        "functional": functional_summary(&f),
        "total_violations": total,
        "descent": reports,
    });
    output(verdict, metrics, Some(probe_csv(&f, &probes)?))
}
