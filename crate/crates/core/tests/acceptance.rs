//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use cuvrp::analysis::{
    appendix_lp, approx1_form, approx1_schedule_with, approx2_form, approx4_schedule_form, alg3_form,
    dispatcher_ratio, Approx4Regime, Formulation, APPROX1_THETA_HIGH,
};
use cuvrp::model::generate::{generate, DemandFamily, GeneratorSpec, MetricFamily};
use cuvrp::oracle::{
    analytic_expected_cost_alg1, analytic_expected_cost_alg2, analytic_expected_cost_algs, arm_cost_at,
    brute_force_opt, plan_expected_cost, OracleError,
};
use cuvrp::policies::{alg1_from, alg1_lambda0, Alg1Options, Arm};
use cuvrp::setcover::{cover_lp, exact_cover, WeightedSet};
use cuvrp::tsp::exact_tsp;
use cuvrp::{
    cumulative_cost, lower_bound, Extended, Instance, Policy, PolicyConfig, Realization, SplitMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::LN_2;
use std::time::Instant;

type Outcome = Result<String, String>;

fn fin(g: f64) -> Extended {
    Extended::Finite(g)
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize;
    (0..=count).map(|i| lo + i as f64 * step).collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ten_thirds() -> Outcome {
    let mut gammas: Vec<f64> = (1..=7).map(|i| 0.05 * i as f64).collect();
    gammas.push(0.375);
    let mut worst_gap = 0.0f64;
    for &g in &gammas {
        let lambda = 4.0 * g / 1.5;
        let form = approx1_form(fin(g), 1.5, lambda, 0.5, 5.0 / 6.0).map_err(|e| e.to_string())?;
        for sigma in [fin(1.0), fin(2.0), fin(10.0), Extended::Infinite] {
            let gap = (form.eval(sigma) - 10.0 / 3.0).abs();
            worst_gap = worst_gap.max(gap);
            ensure(gap <= 1e-9, || format!("gamma {g} sigma {sigma:?}: {}", form.eval(sigma)))?;
        }
    }
    Ok(format!("max deviation {worst_gap:.2e} over {} gammas", gammas.len()))
}

fn bound_3456() -> Outcome {
    let mut worst1 = 0.0f64;
    for g in grid(0.375, 1.444, 1e-3) {
        let s = approx1_schedule_with(fin(g), 1.5, APPROX1_THETA_HIGH).map_err(|e| e.to_string())?;
        let w = approx1_form(fin(g), 1.5, s.lambda, s.theta, s.p).map_err(|e| e.to_string())?.worst();
        worst1 = worst1.max(w);
    }
    ensure(worst1 <= 3.456 + 1e-6, || format!("approx1 reaches {worst1}"))?;
    let mut worst2 = 0.0f64;
    let mut gammas: Vec<Extended> = grid(1.444, 100.0, 1e-3).into_iter().map(fin).collect();
    gammas.push(Extended::Infinite);
    for g in gammas {
        worst2 = worst2.max(approx2_form(g, 1.5).map_err(|e| e.to_string())?.worst());
    }
    ensure(worst2 <= 3.456 + 1e-6, || format!("approx2 reaches {worst2}"))?;
    Ok(format!("approx1 max {worst1:.6}, approx2 max {worst2:.6}"))
}

fn limit_175() -> Outcome {
    let mut values = Vec::new();
    for alpha in [1.0, 1.25, 1.5] {
        let w = approx2_form(Extended::Infinite, alpha).map_err(|e| e.to_string())?.worst();
        ensure((w - (alpha + 1.75)).abs() <= 1e-9, || format!("alpha {alpha}: {w}"))?;
        values.push(format!("{w}"));
    }
    Ok(format!("values {}", values.join(", ")))
}

fn cuvrp_bounds() -> Outcome {
    let mut tight = 0.0f64;
    for g in grid(1e-3, 0.428, 1e-3) {
        let (_, f) = approx4_schedule_form(fin(g), 1.5, Approx4Regime::Tight).map_err(|e| e.to_string())?;
        tight = tight.max(f.worst());
    }
    ensure(tight <= 3.163 + 1e-6, || format!("tight regime reaches {tight}"))?;
    let mut detail = format!("tight max {tight:.6}");
    for alpha in [1.0, 1.25, 1.5] {
        let target = alpha + 1.0 + LN_2 - 0.029;
        let p_expected = (8.0 * alpha + 3.5) / (8.0 * alpha + 5.25);
        let mut worst = 0.0f64;
        for g in grid(1e-3, 0.285, 1e-3) {
            let (s, f) =
                approx4_schedule_form(fin(g), alpha, Approx4Regime::AlphaParametric).map_err(|e| e.to_string())?;
            ensure((s.p - p_expected).abs() <= 1e-9, || format!("alpha {alpha} gamma {g}: p = {}", s.p))?;
            worst = worst.max(f.worst());
        }
        ensure(worst <= target + 1e-6, || format!("alpha {alpha}: {worst} > {target}"))?;
        detail.push_str(&format!(", alpha {alpha} max {worst:.6} <= {target:.6}"));
    }
    Ok(detail)
}

fn appendix_certification() -> Outcome {
    let solve = |n: usize, case: u8| -> Result<f64, String> {
        let s = appendix_lp(1.444, 1.0, n, case, 1.5, Formulation::Rays).map_err(|e| e.to_string())?;
        s.value.ok_or_else(|| format!("case {case} at N={n}: status {:?}", s.status))
    };
    let (c1, c2) = (solve(300, 1)?, solve(300, 2)?);
    let v300 = c1.max(c2);
    ensure((3.403..=3.413).contains(&v300), || format!("N=300 value {v300}"))?;
    ensure((c1 - c2).abs() <= 1e-4, || format!("N=300 cases differ: {c1} vs {c2}"))?;
    let v3000 = solve(3000, 1)?.max(solve(3000, 2)?);
    ensure((3.399..=3.409).contains(&v3000), || format!("N=3000 value {v3000}"))?;
    Ok(format!("N=300 {v300:.7} (cases {c1:.7} / {c2:.7}), N=3000 {v3000:.7}"))
}

fn mixed_instance(rng: &mut ChaCha8Rng, n: usize) -> Instance {
    let metric = [MetricFamily::Euclidean, MetricFamily::Line, MetricFamily::RandomMetric][rng.gen_range(0..3)];
    let b = rng.gen_range(0.2..2.0);
    let a = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.05..3.0) };
    let spec = GeneratorSpec { n, metric, demands: DemandFamily::Mixed, a, b };
    generate(&spec, rng).expect("generator output is valid")
}

/// Midpoint grid over the initial load; returns the mean and the largest sample.
fn midpoint_grid(
    arm: &Arm,
    inst: &Instance,
    r: &Realization,
    order: &[usize],
    period: f64,
    m: usize,
    config: &PolicyConfig,
) -> Result<(f64, f64), OracleError> {
    let mut total = 0.0;
    let mut max = 0.0f64;
    for k in 0..m {
        let cost = arm_cost_at(arm, inst, r, order, (k as f64 + 0.5) * period / m as f64, config)?;
        total += cost;
        max = max.max(cost);
    }
    Ok((total / m as f64, max))
}

fn lemma_suite() -> Outcome {
    const M: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let config = PolicyConfig::default();
    let mut worst_rel = 0.0f64;
    let mut rotations = 0usize;
    for case in 0..100 {
        let n = rng.gen_range(1..=10);
        let inst = mixed_instance(&mut rng, n);
        let r = inst.fixed_realization().expect("mixed demands are fixed");
        let order = exact_tsp(&inst).map_err(|e| e.to_string())?.customer_order();
        let lambda = rng.gen_range(0.3..=1.0);
        let delta = [0.0, lambda / 3.0, rng.gen_range(0.0..=lambda / 2.0)][case % 3];
        let checks: Vec<(Arm, f64, f64)> = vec![
            (Arm::Alg1 { lambda, delta }, lambda - delta, analytic_expected_cost_alg1(&inst, &r, lambda, delta, &order)),
            (Arm::AlgS { lambda }, lambda, analytic_expected_cost_algs(&inst, &r, lambda, &order)),
            (
                Arm::Alg2 { lambda: 1.0, delta: 1.0 / 3.0 },
                2.0 / 3.0,
                analytic_expected_cost_alg2(&inst, &r, 1.0, 1.0 / 3.0, &order, config.set_cap)
                    .map_err(|e| e.to_string())?,
            ),
        ];
        for (arm, period, analytic) in checks {
            let (mean, max) = midpoint_grid(&arm, &inst, &r, &order, period, M, &config).map_err(|e| e.to_string())?;
            let tol = 5.0 * max / M as f64;
            let gap = (mean - analytic).abs();
            worst_rel = worst_rel.max(gap / tol.max(f64::MIN_POSITIVE));
            ensure(gap <= tol + 1e-12, || format!("instance {case} {arm}: grid {mean} vs analytic {analytic}"))?;
        }
        // L_{i-1} = (L_0 - c_i) mod P at every grid point.
        let period = lambda - delta;
        let options = Alg1Options { shortcut_case31: false, skip_above: None };
        for k in (0..M).step_by(97) {
            let l0 = (k as f64 + 0.5) * period / M as f64;
            let (_, trace) =
                alg1_from(&inst, &r, &order, lambda, delta, l0, options).map_err(|e| e.to_string())?;
            let mut served = 0.0;
            for step in &trace.steps {
                let expected = (l0 - served).rem_euclid(period);
                let diff = (step.load_before - expected).abs();
                let wrapped = diff.min((period - diff).abs());
                ensure(wrapped <= 1e-9, || {
                    format!("instance {case} step {}: load {} vs {expected}", step.step, step.load_before)
                })?;
                let d = r.demand(step.customer);
                if d <= lambda {
                    served += d;
                }
                rotations += 1;
            }
        }
    }
    Ok(format!("300 grid checks, worst |grid - analytic| at {:.1}% of tolerance, {rotations} rotation checks", 100.0 * worst_rel))
}

/// Deterministic demands, or two-point demands on small instances.
fn sandwich_instance(rng: &mut ChaCha8Rng, gamma: Extended) -> Instance {
    let two_point = rng.gen_bool(0.4);
    let n = if two_point { rng.gen_range(1..=5) } else { rng.gen_range(1..=8) };
    let metric = [MetricFamily::Euclidean, MetricFamily::Line, MetricFamily::RandomMetric][rng.gen_range(0..3)];
    let demands = if two_point { DemandFamily::TwoPoint } else { DemandFamily::Mixed };
    let (a, b) = match gamma {
        Extended::Infinite => (1.0, 0.0),
        Extended::Finite(g) => (g, 1.0),
    };
    generate(&GeneratorSpec { n, metric, demands, a, b }, rng).expect("generator output is valid")
}

fn joint_realizations(inst: &Instance) -> Vec<(f64, Realization)> {
    let mut out = vec![(1.0, Vec::new())];
    for spec in inst.demand_specs() {
        let mut next = Vec::new();
        for (p, values) in &out {
            for (v, q) in spec.support() {
                let mut values: Vec<f64> = values.clone();
                values.push(v);
                next.push((p * q, values));
            }
        }
        out = next;
    }
    out.into_iter().filter(|(p, _)| *p > 0.0).map(|(p, v)| (p, Realization::new(v))).collect()
}

#[derive(Default)]
struct Sandwich {
    worst_sd: f64,
    worst_split: f64,
    worst_alg3_gap: f64,
    worst_approx4_gap: f64,
    alg3_checked: usize,
    alg3_skipped: usize,
    approx4_checked: usize,
    realizations: usize,
}

fn sandwich_suite() -> Outcome {
    let buckets = [fin(0.2), fin(0.375), fin(1.0), fin(1.444), fin(5.0), Extended::Infinite];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let config = PolicyConfig { alpha: 1.0, ..PolicyConfig::default() };
    let mut stats = Sandwich::default();
    for case in 0..500 {
        let gamma = buckets[case % buckets.len()];
        let inst = sandwich_instance(&mut rng, gamma);
        let tour = exact_tsp(&inst).map_err(|e| e.to_string())?;
        let order = tour.customer_order();
        let sd_claim = dispatcher_ratio(gamma, config.alpha).map_err(|e| e.to_string())?;
        let sd_plan = Policy::Dispatch.plan(&inst, &config).map_err(|e| e.to_string())?;
        let split_plan = Policy::ApproxS.plan(&inst, &config).map_err(|e| e.to_string())?;
        for (_, r) in joint_realizations(&inst) {
            if r.total() <= 0.0 {
                continue;
            }
            stats.realizations += 1;
            let lb = lower_bound(&inst, &r, tour.weight).lb;
            let opt = brute_force_opt(&inst, &r, SplitMode::Unsplittable).map_err(|e| e.to_string())?.opt_value;
            ensure(lb <= opt + 1e-9, || format!("instance {case}: LB {lb} above OPT {opt}"))?;

            // The APPROX.2 set-cover arm is bounded by the optimum, not by LB.
            let sd_base = if sd_plan.schedule.is_none() && sd_plan.arms.len() > 1 { opt } else { lb };
            let sd = plan_expected_cost(&sd_plan, &inst, &r, &order, &config).map_err(|e| e.to_string())? / sd_base;
            ensure(sd <= 3.456 + 1e-9 && sd <= sd_claim + 1e-9, || {
                format!("instance {case} gamma {gamma:?}: dispatch ratio {sd} above {sd_claim}")
            })?;
            stats.worst_sd = stats.worst_sd.max(sd);

            let split = plan_expected_cost(&split_plan, &inst, &r, &order, &config).map_err(|e| e.to_string())? / lb;
            ensure(split <= config.alpha + 1.0 + 1e-9, || format!("instance {case}: splittable ratio {split}"))?;
            stats.worst_split = stats.worst_split.max(split);

            cuvrp_path(case, &inst, &r, &order, lb, opt, &config, &mut stats)?;
        }
    }
    Ok(format!(
        "{} realizations: dispatch max ratio {:.4}, approx-s max {:.4}, alg3 {} checked ({} beyond enumeration, max E/OPT minus bound {:.4}), approx4 {} checked (max E/LB minus bound {:.4})",
        stats.realizations,
        stats.worst_sd,
        stats.worst_split,
        stats.alg3_checked,
        stats.alg3_skipped,
        stats.worst_alg3_gap,
        stats.approx4_checked,
        stats.worst_approx4_gap
    ))
}

#[allow(clippy::too_many_arguments)]
fn cuvrp_path(
    case: usize,
    inst: &Instance,
    r: &Realization,
    order: &[usize],
    lb: f64,
    opt: f64,
    config: &PolicyConfig,
    stats: &mut Sandwich,
) -> Result<(), String> {
    let known = inst.with_fixed_demands(r);
    let plan = Policy::DispatchCuvrp.plan(&known, config).map_err(|e| e.to_string())?;
    let value = match plan_expected_cost(&plan, &known, r, order, config) {
        Ok(v) => v,
        Err(OracleError::ExplosionGuard { .. }) => {
            stats.alg3_skipped += 1;
            return Ok(());
        }
        Err(e) => return Err(e.to_string()),
    };
    let gamma = known.gamma();
    match &plan.arms[0].arm {
        Arm::Alg3 { lambda, delta } => {
            let bound = alg3_form(gamma, config.alpha, *lambda, *delta).worst();
            let ratio = value / opt;
            ensure(ratio <= bound + 1e-9, || format!("instance {case}: alg3 E/OPT {ratio} above {bound}"))?;
            stats.worst_alg3_gap = if stats.alg3_checked == 0 { ratio - bound } else { stats.worst_alg3_gap.max(ratio - bound) };
            stats.alg3_checked += 1;
        }
        Arm::Alg4 { .. } => {
            let (_, form) =
                approx4_schedule_form(gamma, config.alpha, Approx4Regime::AlphaParametric).map_err(|e| e.to_string())?;
            let ratio = value / lb;
            ensure(ratio <= form.worst() + 1e-9, || format!("instance {case}: approx4 E/LB {ratio} above {}", form.worst()))?;
            stats.worst_approx4_gap =
                if stats.approx4_checked == 0 { ratio - form.worst() } else { stats.worst_approx4_gap.max(ratio - form.worst()) };
            stats.approx4_checked += 1;
        }
        Arm::Alg1Lambda0 => {
            ensure((value - lb).abs() <= 1e-9 * lb.max(1.0), || format!("instance {case}: a=0 cost {value} vs LB {lb}"))?;
        }
        other => return Err(format!("unexpected Cu-VRP arm {other}")),
    }
    Ok(())
}

fn zero_vehicle_cost() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let n = rng.gen_range(1..=12);
        let metric = [MetricFamily::Euclidean, MetricFamily::Line, MetricFamily::RandomMetric][case % 3];
        let spec = GeneratorSpec { n, metric, demands: DemandFamily::Uniform, a: 0.0, b: rng.gen_range(0.1..5.0) };
        let inst = generate(&spec, &mut rng).map_err(|e| e.to_string())?;
        let r = inst.fixed_realization().expect("uniform demands are fixed");
        let order: Vec<usize> = inst.customers().collect();
        let (it, _) = alg1_lambda0(&inst, &r, &order).map_err(|e| e.to_string())?;
        let cost = cumulative_cost(&it, &inst).map_err(|e| e.to_string())?.total;
        let lb = lower_bound(&inst, &r, 0.0).lb;
        let gap = (cost - lb).abs() / lb;
        worst = worst.max(gap);
        ensure(gap <= 1e-12, || format!("instance {case}: cost {cost} vs LB {lb}"))?;
    }
    Ok(format!("max relative gap {worst:.2e}"))
}

fn random_set_system(rng: &mut ChaCha8Rng, u: usize) -> (Vec<usize>, Vec<WeightedSet>) {
    let universe: Vec<usize> = (1..=u).collect();
    let count = rng.gen_range(1..=12);
    let mut sets: Vec<WeightedSet> = (0..count)
        .map(|_| {
            let elements: Vec<usize> = universe.iter().copied().filter(|_| rng.gen_bool(0.35)).collect();
            WeightedSet { elements, weight: rng.gen_range(0.1..10.0) }
        })
        .filter(|s| !s.elements.is_empty())
        .collect();
    for &e in &universe {
        if !sets.iter().any(|s| s.elements.contains(&e)) {
            sets.push(WeightedSet { elements: vec![e], weight: rng.gen_range(0.1..10.0) });
        }
    }
    (universe, sets)
}

fn exhaustive_cover(universe: &[usize], sets: &[WeightedSet]) -> f64 {
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << sets.len()) {
        let chosen: Vec<&WeightedSet> = (0..sets.len()).filter(|i| mask & (1 << i) != 0).map(|i| &sets[i]).collect();
        if universe.iter().all(|e| chosen.iter().any(|s| s.elements.contains(e))) {
            best = best.min(chosen.iter().map(|s| s.weight).sum());
        }
    }
    best
}

fn set_cover_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_miss = 0.0f64;
    let mut worst_weight_ratio = 0.0f64;
    for draw in 0..200 {
        let u = 1 + draw % 10;
        let (universe, sets) = random_set_system(&mut rng, u);
        let exact = exact_cover(&universe, &sets).map_err(|e| e.to_string())?;
        let brute = exhaustive_cover(&universe, &sets);
        ensure((exact.weight - brute).abs() <= 1e-9, || format!("draw {draw}: dp {} vs exhaustive {brute}", exact.weight))?;
        let lp = cover_lp(&universe, &sets).map_err(|e| e.to_string())?;
        ensure(lp.objective <= brute + 1e-9, || format!("draw {draw}: LP {} above integral {brute}", lp.objective))?;
        for miss in lp.miss_probabilities(&universe, &sets) {
            worst_miss = worst_miss.max(miss);
            ensure(miss <= 0.5 + 1e-9, || format!("draw {draw}: miss probability {miss}"))?;
        }
        let selected = lp.expected_selected_weight(&sets);
        ensure(selected <= LN_2 * lp.objective + 1e-9, || format!("draw {draw}: {selected} above ln2 * {}", lp.objective))?;
        if lp.objective > 0.0 {
            worst_weight_ratio = worst_weight_ratio.max(selected / lp.objective);
        }
    }
    Ok(format!("max miss probability {worst_miss:.4}, max selected weight / LP {worst_weight_ratio:.4}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("10/3 identity", ten_thirds),
        ("3.456 bounds", bound_3456),
        ("alpha+1.75 limit", limit_175),
        ("Cu-VRP bounds", cuvrp_bounds),
        ("appendix LP certification", appendix_certification),
        ("lemma suite", lemma_suite),
        ("end-to-end ratio sandwich", sandwich_suite),
        ("a=0 exactness", zero_vehicle_cost),
        ("set-cover suite", set_cover_suite),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} PASS  {name} [{secs:.2}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name} [{secs:.2}s]: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
