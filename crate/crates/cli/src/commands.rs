use crate::args::{
    Command, FigureArg, FormulationArg, GenArgs, InstanceArgs, LpVerifyArgs, OracleArgs, PolicyArgs, RatioArgs,
    RunArgs,
};
use crate::exit::config;
use crate::output::{num, opt_num, sink, Csv};
use anyhow::{Context, Result};
use cuvrp::analysis::{appendix_lp, appendix_program, ratio_curves, sweep_maxima, Figure, Formulation, SweepRow};
use cuvrp::model::generate::{generate, GeneratorSpec};
use cuvrp::oracle::{brute_force_opt, plan_expected_cost, MAX_BRUTE_FORCE, MAX_JOINT_REALIZATIONS};
use cuvrp::policies::{Arm, Stream, TraceStep};
use cuvrp::{
    build_instance, lower_bound, Instance, InstanceSpec, Plan, Policy, PolicyConfig, Randomness, Realization, SplitMode,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub fn init_pool() -> Result<()> {
    let Ok(value) = std::env::var("CUVRP_THREADS") else { return Ok(()) };
    let threads: usize = value.parse().map_err(|_| config(format!("CUVRP_THREADS={value} is not a count")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("building the worker pool")?;
    Ok(())
}

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Run(a) => cmd_run(&a),
        Command::Ratio(a) => cmd_ratio(&a),
        Command::Lpverify(a) => cmd_lpverify(&a),
        Command::Oracle(a) => cmd_oracle(&a),
        Command::Gen(a) => cmd_gen(&a),
    }
}

/// Loads the instance file, or generates one; generation needs a seed.
fn resolve_instance(args: &InstanceArgs, seed: Option<u64>) -> Result<Instance> {
    if let Some(path) = &args.instance {
        let text = std::fs::read_to_string(path).map_err(|e| config(format!("reading {}: {e}", path.display())))?;
        let spec: InstanceSpec =
            serde_json::from_str(&text).map_err(|e| config(format!("parsing {}: {e}", path.display())))?;
        return Ok(build_instance(&spec)?);
    }
    let n = args.n.ok_or_else(|| config("give --instance or --n"))?;
    let seed = seed.ok_or_else(|| config("--seed is required to generate an instance"))?;
    let spec = GeneratorSpec { n, metric: args.metric.into(), demands: args.demands.into(), a: args.a, b: args.b };
    Ok(generate(&spec, &mut ChaCha8Rng::seed_from_u64(seed))?)
}

fn build_policy(args: &PolicyArgs) -> Result<Policy> {
    let base: Policy = args.policy.parse()?;
    let (l, d) = (args.lambda, args.delta);
    Ok(match base {
        Policy::Alg1 { lambda, delta } => Policy::Alg1 { lambda: l.unwrap_or(lambda), delta: d.unwrap_or(delta) },
        Policy::Alg2 { lambda, delta } => Policy::Alg2 { lambda: l.unwrap_or(lambda), delta: d.unwrap_or(delta) },
        Policy::Alg3 { lambda, delta } => Policy::Alg3 { lambda: l.unwrap_or(lambda), delta: d.unwrap_or(delta) },
        Policy::AlgS { lambda } if d.is_none() => Policy::AlgS { lambda: l.unwrap_or(lambda) },
        Policy::Alg4 { lambda } if d.is_none() => Policy::Alg4 { lambda: l.unwrap_or(lambda) },
        other if l.is_none() && d.is_none() => other,
        other => return Err(config(format!("policy {} does not take the given --lambda/--delta", other.name()))),
    })
}

fn policy_config(args: &PolicyArgs) -> PolicyConfig {
    PolicyConfig {
        alpha: args.alpha,
        shortcut_case31: args.shortcut_case31,
        gamma0: args.gamma0,
        tour_provider: args.tours.into(),
        ..PolicyConfig::default()
    }
}

fn arm_is_random(arm: &Arm) -> bool {
    match arm {
        Arm::Alg1Lambda0 | Arm::OptimalPartition => false,
        Arm::RecordThenSolve { solver } => arm_is_random(solver),
        _ => true,
    }
}

fn describe(plan: &Plan) -> String {
    plan.arms.iter().map(|a| format!("{}@{}", a.arm, num(a.probability))).collect::<Vec<_>>().join(" | ")
}

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    command: &'static str,
    args: &'a T,
    instance: Option<InstanceSpec>,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    trial: usize,
    arm: &'a str,
    #[serde(flatten)]
    step: &'a TraceStep,
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    if args.trials == 0 {
        return Err(config("--trials must be at least 1"));
    }
    let inst = resolve_instance(&args.instance, args.seed)?;
    let policy = build_policy(&args.policy)?;
    let cfg = policy_config(&args.policy);
    let plan = policy.plan(&inst, &cfg)?;
    log::info!("{} at gamma {:?} resolves to {}", policy.name(), inst.gamma(), describe(&plan));
    let randomized = !inst.is_deterministic() || plan.arms.len() > 1 || plan.arms.iter().any(|a| arm_is_random(&a.arm));
    let seed = match args.seed {
        Some(s) => s,
        None if randomized => return Err(config(format!("--seed is required: {} is randomized", policy.name()))),
        None => 0,
    };
    let tour = cfg.tour_provider.provide(&inst)?;
    let master = Randomness::new(seed);
    let known = plan.arms.iter().any(|a| a.arm.needs_known_demands());
    let tau = tour.weight / tour.alpha_certificate;
    let fixed = inst.fixed_realization();
    let runs: Vec<_> = (0..args.trials)
        .into_par_iter()
        .map(|t| {
            let task = master.task(t as u64);
            let r = fixed.clone().unwrap_or_else(|| inst.sample_realization(&mut task.stream(Stream::Demand)));
            let target = if known { inst.with_fixed_demands(&r) } else { inst.clone() };
            let run = policy.run(&target, &r, &tour, &cfg, &task)?;
            let lb = lower_bound(&inst, &r, tau).lb;
            Ok((run, lb))
        })
        .collect::<Result<_>>()?;

    let record = Record { command: "run", args, instance: Some(inst.to_spec()) };
    let columns = [
        "trial", "policy", "arm", "vehicle_cost", "cargo_cost", "total", "lb", "ratio_lb", "tours", "additional_visits",
    ];
    let mut csv = Csv::create(args.out.as_deref(), "cuvrp.run.v1", &record, &columns)?;
    for (t, (run, lb)) in runs.iter().enumerate() {
        csv.row(&[
            t.to_string(),
            policy.name(),
            run.arm.to_string(),
            num(run.cost.vehicle_cost),
            num(run.cost.cargo_cost),
            num(run.cost.total),
            num(*lb),
            num(run.cost.total / lb),
            run.itinerary.tours.len().to_string(),
            run.trace.additional_visits().to_string(),
        ])?;
    }
    csv.finish()?;
    if let Some(path) = &args.trace {
        let mut out = sink(Some(path))?;
        for (t, (run, _)) in runs.iter().enumerate() {
            let arm = run.arm.to_string();
            for step in &run.trace.steps {
                writeln!(out, "{}", serde_json::to_string(&TraceLine { trial: t, arm: &arm, step })?)?;
            }
        }
        out.flush()?;
    }
    let mean = runs.iter().map(|(r, _)| r.cost.total).sum::<f64>() / runs.len() as f64;
    log::info!("mean cost over {} trials: {}", runs.len(), num(mean));
    Ok(())
}

fn ratio_grid(args: &RatioArgs) -> Result<Vec<f64>> {
    let grid = match &args.gammas {
        Some(g) => g.clone(),
        None => {
            let (lo, hi, step) = (args.gamma_min, args.gamma_max, args.gamma_step);
            if !(step > 0.0 && lo <= hi && step.is_finite() && lo.is_finite() && hi.is_finite()) {
                return Err(config(format!("bad gamma range {lo}..{hi} step {step}")));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize;
            (0..=count).map(|i| lo + i as f64 * step).collect()
        }
    };
    if grid.is_empty() || grid.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
        return Err(config("gamma grid must contain positive finite values"));
    }
    Ok(grid)
}

fn cmd_ratio(args: &RatioArgs) -> Result<()> {
    let grid = ratio_grid(args)?;
    let figure = match args.figure {
        FigureArg::Fig2 => Figure::Fig2,
        FigureArg::Fig3 => Figure::Fig3,
        FigureArg::Fig6 => Figure::Fig6,
    };
    let rows = ratio_curves(&grid, figure, args.alpha)?;
    let record = Record { command: "ratio", args, instance: None };
    let columns = ["series", "gamma", "theta", "p", "r1", "rinf", "worst"];
    let mut csv = Csv::create(args.out.as_deref(), "cuvrp.ratio.v1", &record, &columns)?;
    for r in rows {
        csv.row(&[r.series, num(r.gamma), opt_num(r.theta), opt_num(r.p), num(r.r1), num(r.rinf), num(r.worst)])?;
    }
    csv.finish()
}

#[derive(Serialize)]
struct CaseReport {
    case: u8,
    status: cuvrp::lp::Status,
    value: Option<f64>,
    residual: f64,
    iterations: usize,
}

#[derive(Serialize)]
struct LpReport {
    gamma: f64,
    sigma: f64,
    n: usize,
    alpha: f64,
    formulation: FormulationArg,
    cases: Vec<CaseReport>,
    max: Option<f64>,
}

fn formulation(f: FormulationArg) -> Formulation {
    match f {
        FormulationArg::Rays => Formulation::Rays,
        FormulationArg::Full => Formulation::Full,
    }
}

fn dump_programs(args: &LpVerifyArgs, path: &Path) -> Result<()> {
    let mut out = sink(Some(path))?;
    for case in [1u8, 2] {
        let (program, constant) =
            appendix_program(args.gamma, args.sigma, args.n, case, args.alpha, formulation(args.formulation))?;
        writeln!(out, "# case {case}, constant {}", num(constant))?;
        writeln!(out, "{}", program.to_text())?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_lpverify(args: &LpVerifyArgs) -> Result<()> {
    if args.n == 0 || !args.n.is_multiple_of(3) {
        return Err(config(format!("N = {} must be a positive multiple of 3", args.n)));
    }
    if let Some(path) = &args.dump_lp {
        dump_programs(args, path)?;
    }
    if args.gammas.is_some() || args.sigmas.is_some() {
        return lp_sweep(args);
    }
    let form = formulation(args.formulation);
    let (first, second) = rayon::join(
        || appendix_lp(args.gamma, args.sigma, args.n, 1, args.alpha, form),
        || appendix_lp(args.gamma, args.sigma, args.n, 2, args.alpha, form),
    );
    let cases: Vec<CaseReport> = [first?, second?]
        .into_iter()
        .map(|s| CaseReport { case: s.case, status: s.status, value: s.value, residual: s.residual, iterations: s.iterations })
        .collect();
    let max = cases.iter().filter_map(|c| c.value).reduce(f64::max);
    for c in &cases {
        println!("case {}: {} ({:?})", c.case, opt_num(c.value), c.status);
    }
    println!("max: {}", opt_num(max));
    let report = LpReport {
        gamma: args.gamma,
        sigma: args.sigma,
        n: args.n,
        alpha: args.alpha,
        formulation: args.formulation,
        cases,
        max,
    };
    if let Some(path) = &args.out {
        let mut out = sink(Some(path))?;
        serde_json::to_writer_pretty(&mut out, &report)?;
        writeln!(out)?;
        out.flush()?;
    }
    Ok(())
}

fn lp_sweep(args: &LpVerifyArgs) -> Result<()> {
    let gammas = args.gammas.clone().unwrap_or_else(|| vec![args.gamma]);
    let sigmas = args.sigmas.clone().unwrap_or_else(|| vec![args.sigma]);
    let tasks: Vec<(f64, f64, u8)> =
        gammas.iter().flat_map(|&g| sigmas.iter().flat_map(move |&s| [(g, s, 1u8), (g, s, 2u8)])).collect();
    let form = formulation(args.formulation);
    let solved: Vec<_> = tasks
        .par_iter()
        .map(|&(g, s, case)| appendix_lp(g, s, args.n, case, args.alpha, form).map(|sol| (g, s, sol)))
        .collect::<Result<_, _>>()?;
    let record = Record { command: "lpverify", args, instance: None };
    let columns = ["gamma", "sigma", "case", "status", "lp_value", "residual"];
    let mut csv = Csv::create(args.out.as_deref(), "cuvrp.lpsweep.v1", &record, &columns)?;
    let mut rows = Vec::with_capacity(solved.len());
    for (g, s, sol) in solved {
        csv.row(&[num(g), num(s), sol.case.to_string(), format!("{:?}", sol.status), opt_num(sol.value), num(sol.residual)])?;
        rows.push(SweepRow { gamma: g, sigma: s, case: sol.case, lp_value: sol.value, status: sol.status });
    }
    csv.finish()?;
    for (g, s, v) in sweep_maxima(&rows) {
        log::info!("gamma {}: max {} at sigma {}", num(g), num(v), num(s));
    }
    Ok(())
}

fn joint_realizations(inst: &Instance) -> Result<Vec<(f64, Realization)>> {
    let count: f64 = inst.demand_specs().iter().map(|s| s.support().len() as f64).product();
    if count > MAX_JOINT_REALIZATIONS as f64 {
        return Err(cuvrp::oracle::OracleError::ExplosionGuard {
            what: "joint realizations",
            count,
            cap: MAX_JOINT_REALIZATIONS as f64,
        }
        .into());
    }
    let mut out = vec![(1.0, Vec::new())];
    for spec in inst.demand_specs() {
        out = out
            .into_iter()
            .flat_map(|(p, values): (f64, Vec<f64>)| {
                spec.support().into_iter().map(move |(v, q)| {
                    let mut next = values.clone();
                    next.push(v);
                    (p * q, next)
                })
            })
            .collect();
    }
    Ok(out.into_iter().filter(|(p, _)| *p > 0.0).map(|(p, v)| (p, Realization::new(v))).collect())
}

struct OracleRow {
    probability: f64,
    lb: f64,
    opt: f64,
    values: Vec<(String, f64)>,
}

fn cmd_oracle(args: &OracleArgs) -> Result<()> {
    let inst = resolve_instance(&args.instance, args.seed)?;
    if inst.n() > MAX_BRUTE_FORCE {
        return Err(cuvrp::oracle::OracleError::TooLarge {
            what: "oracle",
            size: inst.n(),
            limit: MAX_BRUTE_FORCE,
        }
        .into());
    }
    let policies: Vec<Policy> = args.policies.iter().map(|p| p.parse()).collect::<Result<_, _>>()?;
    let cfg = PolicyConfig { alpha: args.alpha, ..PolicyConfig::default() };
    let tour = cfg.tour_provider.provide(&inst)?;
    let tau = tour.weight / tour.alpha_certificate;
    let order = tour.customer_order();
    let realizations = joint_realizations(&inst)?;
    let rows: Vec<OracleRow> = realizations
        .par_iter()
        .map(|(probability, r)| -> Result<OracleRow> {
            let lb = lower_bound(&inst, r, tau).lb;
            let opt = brute_force_opt(&inst, r, SplitMode::Unsplittable)?.opt_value;
            let known = inst.with_fixed_demands(r);
            let mut values = Vec::new();
            for policy in &policies {
                let plan = policy.plan(&inst, &cfg)?;
                let target = if plan.arms.iter().any(|a| a.arm.needs_known_demands()) { &known } else { &inst };
                let plan = policy.plan(target, &cfg)?;
                values.push((describe(&plan), plan_expected_cost(&plan, target, r, &order, &cfg)?));
            }
            Ok(OracleRow { probability: *probability, lb, opt, values })
        })
        .collect::<Result<_>>()?;

    let record = Record { command: "oracle", args, instance: Some(inst.to_spec()) };
    let columns =
        ["realization", "probability", "policy", "plan", "lb", "opt", "expected_cost", "ratio_lb", "ratio_opt"];
    let mut csv = Csv::create(args.out.as_deref(), "cuvrp.oracle.v1", &record, &columns)?;
    for (i, row) in rows.iter().enumerate() {
        for (policy, (plan, value)) in args.policies.iter().zip(&row.values) {
            csv.row(&[
                i.to_string(),
                num(row.probability),
                policy.clone(),
                plan.clone(),
                num(row.lb),
                num(row.opt),
                num(*value),
                num(value / row.lb),
                num(value / row.opt),
            ])?;
        }
    }
    if rows.len() > 1 {
        let expect = |f: &dyn Fn(&OracleRow) -> f64| rows.iter().map(|r| r.probability * f(r)).sum::<f64>();
        let (lb, opt) = (expect(&|r| r.lb), expect(&|r| r.opt));
        for (k, policy) in args.policies.iter().enumerate() {
            let value = expect(&|r| r.values[k].1);
            csv.row(&[
                "expected".into(),
                "1".into(),
                policy.clone(),
                String::new(),
                num(lb),
                num(opt),
                num(value),
                num(value / lb),
                num(value / opt),
            ])?;
        }
    }
    csv.finish()
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    if args.instance.instance.is_some() {
        return Err(config("gen takes a generator spec, not --instance"));
    }
    let inst = resolve_instance(&args.instance, args.seed)?;
    let mut out = sink(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &inst.to_spec())?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
