use super::OracleError;
use crate::model::{cumulative_cost, Instance, Realization};
use crate::policies::{
    alg1_from, alg2_from, alg3_finish, alg3_setup, alg4_from, alg_s_from, Alg1Options, Arm, Plan, Policy, PolicyConfig,
    Randomness, Stream,
};
use crate::tsp::{tour_weight, TourResult};
use serde::{Deserialize, Serialize};

pub const MAX_JOINT_REALIZATIONS: usize = 100_000;
pub const MAX_ROUNDING_OUTCOMES: usize = 1 << 16;

fn closed_order(order: &[usize]) -> Vec<usize> {
    std::iter::once(0).chain(order.iter().copied()).chain(std::iter::once(0)).collect()
}

/// Expected cost of the extra depot trips caused by one customer in ALG.1,
/// averaged over the uniform normal load.
pub fn additional_visit_cost(d: f64, l: f64, a: f64, b: f64, lambda: f64, delta: f64) -> f64 {
    let p = lambda - delta;
    if d <= delta {
        a * 2.0 * d / p * l + b * ((lambda + delta) * d - d * d) / p * l
    } else if d <= lambda - delta {
        a * (4.0 * d - 2.0 * delta) / p * l + b * (d * d + p * d) / p * l
    } else if d <= lambda {
        a * (2.0 * d + 2.0 * lambda - 4.0 * delta) / p * l
            + b * (2.0 * d * d - (lambda + delta) * d + lambda * lambda - delta * delta) / p * l
    } else {
        a * 2.0 * l + b * d * l
    }
}

/// Edge terms `(a + b (lambda + delta) / 2) w(e)` plus per-customer extra trips.
pub fn analytic_expected_cost_alg1(
    instance: &Instance,
    realization: &Realization,
    lambda: f64,
    delta: f64,
    order: &[usize],
) -> f64 {
    let (a, b) = (instance.a(), instance.b());
    let edges = (a + b * (lambda + delta) / 2.0) * tour_weight(instance, &closed_order(order));
    let extra: f64 = order
        .iter()
        .map(|&v| additional_visit_cost(realization.demand(v), instance.radial(v), a, b, lambda, delta))
        .sum();
    edges + extra
}

/// As ALG.1 for customers up to `delta`; the deferred customers are served by
/// tours that do not depend on the initial load.
pub fn analytic_expected_cost_alg2(
    instance: &Instance,
    realization: &Realization,
    lambda: f64,
    delta: f64,
    order: &[usize],
    set_cap: usize,
) -> Result<f64, OracleError> {
    let (a, b) = (instance.a(), instance.b());
    let edges = (a + b * (lambda + delta) / 2.0) * tour_weight(instance, &closed_order(order));
    let small: f64 = order
        .iter()
        .filter(|&&v| realization.demand(v) <= delta)
        .map(|&v| additional_visit_cost(realization.demand(v), instance.radial(v), a, b, lambda, delta))
        .sum();
    // The deferred tours come last in every run; any initial load exposes them.
    let (itinerary, _) = alg2_from(instance, realization, order, lambda, delta, 0.0, set_cap)?;
    let deferred = order.iter().filter(|&&v| realization.demand(v) > delta).count();
    let tail = &itinerary.tours[itinerary.tours.len() - count_deferred_tours(&itinerary, realization, delta, deferred)..];
    let deferred_cost: f64 = tail.iter().map(|t| t.cost(instance).total).sum();
    Ok(edges + small + deferred_cost)
}

/// Trailing tours serving only customers above `delta`.
fn count_deferred_tours(
    itinerary: &crate::model::Itinerary,
    realization: &Realization,
    delta: f64,
    deferred: usize,
) -> usize {
    if deferred == 0 {
        return 0;
    }
    itinerary
        .tours
        .iter()
        .rev()
        .take_while(|t| {
            let stops = t.stops();
            !stops.is_empty() && stops.iter().all(|&(v, x)| x > 0.0 && realization.demand(v) > delta)
        })
        .count()
}

/// Edge terms `(a + b lambda / 2) w(e)` plus `2 a d l / lambda + b d l` per customer.
pub fn analytic_expected_cost_algs(instance: &Instance, realization: &Realization, lambda: f64, order: &[usize]) -> f64 {
    let (a, b) = (instance.a(), instance.b());
    let edges = (a + b * lambda / 2.0) * tour_weight(instance, &closed_order(order));
    let extra: f64 = order
        .iter()
        .map(|&v| {
            let (d, l) = (realization.demand(v), instance.radial(v));
            a * 2.0 * d / lambda * l + b * d * l
        })
        .sum();
    edges + extra
}

/// Period of the initial load for arms that draw one.
fn period(arm: &Arm) -> Option<f64> {
    match arm {
        Arm::Alg1 { lambda, delta } | Arm::Alg2 { lambda, delta } | Arm::Alg3 { lambda, delta } => Some(lambda - delta),
        Arm::AlgS { lambda } | Arm::Alg4 { lambda } => Some(*lambda),
        _ => None,
    }
}

/// Realized cost of an arm with a fixed initial load (and no LP rounding).
pub fn arm_cost_at(
    arm: &Arm,
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    l0: f64,
    config: &PolicyConfig,
) -> Result<f64, OracleError> {
    let options = Alg1Options { shortcut_case31: config.shortcut_case31, skip_above: None };
    let (itinerary, _) = match arm {
        Arm::Alg1 { lambda, delta } => alg1_from(instance, realization, order, *lambda, *delta, l0, options)?,
        Arm::Alg2 { lambda, delta } => alg2_from(instance, realization, order, *lambda, *delta, l0, config.set_cap)?,
        Arm::AlgS { lambda } => alg_s_from(instance, realization, order, *lambda, l0)?,
        Arm::Alg4 { lambda } => alg4_from(&instance.with_fixed_demands(realization), order, *lambda, l0)?,
        other => return Err(OracleError::Unsupported(other.to_string())),
    };
    Ok(cumulative_cost(&itinerary, instance)?.total)
}

/// Midpoint rule with `m` points over the initial load.
pub fn grid_expected_cost(
    arm: &Arm,
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    m: usize,
    config: &PolicyConfig,
) -> Result<f64, OracleError> {
    let p = period(arm).ok_or_else(|| OracleError::Unsupported(arm.to_string()))?;
    let mut total = 0.0;
    for k in 0..m {
        let l0 = (k as f64 + 0.5) * p / m as f64;
        total += arm_cost_at(arm, instance, realization, order, l0, config)?;
    }
    Ok(total / m as f64)
}

/// Initial loads at which some branch decision of a load-driven traversal
/// changes. Between consecutive points every load is an affine shift of the
/// initial one, so the realized cost is affine there.
pub fn breakpoints(period: f64, order: &[usize], demand: impl Fn(usize) -> f64, counted: impl Fn(f64) -> bool, offsets: impl Fn(f64) -> Vec<f64>) -> Vec<f64> {
    let mut cumulative = 0.0;
    let mut points = vec![0.0, period];
    let mut push = |x: f64| {
        let r = x.rem_euclid(period);
        if r.is_finite() {
            points.push(r);
        }
    };
    for &v in order {
        let d = demand(v);
        for t in offsets(d) {
            push(cumulative + t);
        }
        if counted(d) {
            cumulative += d;
        }
    }
    push(cumulative);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|x, y| (*x - *y).abs() <= 1e-13);
    points
}

fn integrate(points: &[f64], period: f64, mut f: impl FnMut(f64) -> Result<f64, OracleError>) -> Result<f64, OracleError> {
    let mut total = 0.0;
    for w in points.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        total += len / period * f(0.5 * (w[0] + w[1]))?;
    }
    Ok(total)
}

fn alg1_points(period: f64, lambda: f64, delta: f64, order: &[usize], realization: &Realization, level: f64) -> Vec<f64> {
    breakpoints(
        period,
        order,
        |v| realization.demand(v),
        |d| d <= level && d <= lambda,
        |d| vec![0.0, d, d - delta],
    )
}

/// Exact expectation over the initial load (and LP rounding for ALG.3).
pub fn exact_expected_cost(
    arm: &Arm,
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    config: &PolicyConfig,
) -> Result<f64, OracleError> {
    match arm {
        Arm::Alg1 { lambda, delta } | Arm::Alg2 { lambda, delta } => {
            let p = lambda - delta;
            let level = if matches!(arm, Arm::Alg2 { .. }) { *delta } else { *lambda };
            let points = alg1_points(p, *lambda, *delta, order, realization, level);
            integrate(&points, p, |l0| arm_cost_at(arm, instance, realization, order, l0, config))
        }
        Arm::Alg4 { lambda } => {
            let points = alg1_points(*lambda, *lambda, 0.0, order, realization, *lambda);
            integrate(&points, *lambda, |l0| arm_cost_at(arm, instance, realization, order, l0, config))
        }
        Arm::AlgS { lambda } => {
            let lam = *lambda;
            let points = breakpoints(lam, order, |v| realization.demand(v), |_| true, |d| vec![0.0, d.rem_euclid(lam)]);
            integrate(&points, lam, |l0| arm_cost_at(arm, instance, realization, order, l0, config))
        }
        Arm::Alg3 { lambda, delta } => {
            let known = instance.with_fixed_demands(realization);
            let setup = alg3_setup(&known, *lambda, *delta, config.set_cap)?;
            let probs = setup.selection_probabilities();
            let sure: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] >= 1.0).collect();
            let fractional: Vec<usize> = (0..probs.len()).filter(|&i| probs[i] > 0.0 && probs[i] < 1.0).collect();
            if fractional.len() > 16 {
                return Err(OracleError::ExplosionGuard {
                    what: "rounding outcomes",
                    count: 2f64.powi(fractional.len() as i32),
                    cap: MAX_ROUNDING_OUTCOMES as f64,
                });
            }
            let p = lambda - delta;
            let mut total = 0.0;
            for outcome in 0..(1usize << fractional.len()) {
                let mut weight = 1.0;
                let mut selected = sure.clone();
                for (bit, &i) in fractional.iter().enumerate() {
                    if outcome & (1 << bit) != 0 {
                        weight *= probs[i];
                        selected.push(i);
                    } else {
                        weight *= 1.0 - probs[i];
                    }
                }
                selected.sort_unstable();
                let covered: Vec<usize> = selected.iter().flat_map(|&i| setup.sets[i].members.clone()).collect();
                let rest: Vec<usize> = order.iter().copied().filter(|v| !covered.contains(v)).collect();
                let points = alg1_points(p, *lambda, *delta, &rest, realization, *lambda);
                let value = integrate(&points, p, |l0| {
                    let (it, _) = alg3_finish(&known, order, &setup, &selected, l0)?;
                    Ok(cumulative_cost(&it, instance)?.total)
                })?;
                total += weight * value;
            }
            Ok(total)
        }
        Arm::RecordThenSolve { solver } => {
            let walk = instance.a() * tour_weight(instance, &closed_order(order));
            let known = instance.with_fixed_demands(realization);
            Ok(walk + exact_expected_cost(solver, &known, realization, order, config)?)
        }
        Arm::Alg1Lambda0 | Arm::OptimalPartition => {
            let run = arm.run(instance, realization, order, config, &Randomness::new(0))?;
            Ok(cumulative_cost(&run.0, instance)?.total)
        }
    }
}

/// Probability-weighted exact expectation of every arm of the plan.
pub fn plan_expected_cost(
    plan: &Plan,
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    config: &PolicyConfig,
) -> Result<f64, OracleError> {
    let mut total = 0.0;
    for a in &plan.arms {
        if a.probability > 0.0 {
            total += a.probability * exact_expected_cost(&a.arm, instance, realization, order, config)?;
        }
    }
    Ok(total)
}

/// Exact expectation over the joint discrete demand distribution.
pub fn expectation_over_demands(
    policy: &Policy,
    instance: &Instance,
    tour: &TourResult,
    config: &PolicyConfig,
) -> Result<f64, OracleError> {
    let supports: Vec<Vec<(f64, f64)>> = instance.demand_specs().iter().map(|s| s.support()).collect();
    let count: f64 = supports.iter().map(|s| s.len() as f64).product();
    if count > MAX_JOINT_REALIZATIONS as f64 {
        return Err(OracleError::ExplosionGuard {
            what: "joint realizations",
            count,
            cap: MAX_JOINT_REALIZATIONS as f64,
        });
    }
    let plan = policy.plan(instance, config)?;
    let order = tour.customer_order();
    let mut index = vec![0usize; supports.len()];
    let mut total = 0.0;
    loop {
        let mut prob = 1.0;
        let values: Vec<f64> = index
            .iter()
            .zip(&supports)
            .map(|(&i, s)| {
                prob *= s[i].1;
                s[i].0
            })
            .collect();
        if prob > 0.0 {
            let r = Realization::new(values);
            total += prob * plan_expected_cost(&plan, instance, &r, &order, config)?;
        }
        let mut pos = 0;
        loop {
            if pos == index.len() {
                return Ok(total);
            }
            index[pos] += 1;
            if index[pos] < supports[pos].len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub mean: f64,
    /// `None` when a single trial leaves the spread undefined.
    pub stderr: Option<f64>,
    pub trials: usize,
}

/// Fresh demands and policy randomness per trial, from seeds derived from `seed`.
pub fn monte_carlo(
    policy: &Policy,
    instance: &Instance,
    tour: &TourResult,
    config: &PolicyConfig,
    trials: usize,
    seed: u64,
) -> Result<MonteCarlo, OracleError> {
    if trials == 0 {
        return Err(OracleError::TooLarge { what: "trials", size: 0, limit: 1 });
    }
    let master = Randomness::new(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for t in 0..trials {
        let task = master.task(t as u64);
        let realization = instance.sample_realization(&mut task.stream(Stream::Demand));
        let run = policy.run(instance, &realization, tour, config, &task)?;
        sum += run.cost.total;
        sum_sq += run.cost.total * run.cost.total;
    }
    let n = trials as f64;
    let mean = sum / n;
    let stderr = (trials > 1).then(|| ((sum_sq - n * mean * mean).max(0.0) / (n - 1.0) / n).sqrt());
    Ok(MonteCarlo { mean, stderr, trials })
}
