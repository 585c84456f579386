//! Policies for known demands: LP rounding plus ALG.1, ALG.4, record-then-solve
//! and the exact contiguous partition of a tour.

use super::alg1::{alg1_from, Alg1Options};
use super::trace::PolicyTrace;
use super::{check_integral_delta, check_load_params, PolicyError};
use crate::model::{Instance, Itinerary, Realization, Tour, TOLERANCE};
use crate::setcover::{self, FeasibleSet, FractionalCover, WeightedSet};
use rand::Rng;

fn fixed_demands(instance: &Instance, name: &'static str) -> Result<Realization, PolicyError> {
    instance.fixed_realization().ok_or(PolicyError::NotDeterministic(name))
}

/// Trims the load to the delivered total and keeps the cheaper direction.
pub fn post_optimize(tour: &Tour, instance: &Instance) -> Tour {
    let forward = tour.trimmed();
    let backward = forward.reversed();
    if backward.cost(instance).total < forward.cost(instance).total {
        backward
    } else {
        forward
    }
}

fn post_optimize_all(itinerary: Itinerary, instance: &Instance) -> Itinerary {
    Itinerary::new(itinerary.tours.iter().map(|t| post_optimize(t, instance)).collect())
}

/// Deterministic part of ALG.3: feasible sets over `{d > delta}` and the
/// optimal cover LP.
#[derive(Debug, Clone)]
pub struct Alg3Setup {
    pub lambda: f64,
    pub delta: f64,
    pub large: Vec<usize>,
    pub sets: Vec<FeasibleSet>,
    pub lp: Option<FractionalCover>,
}

impl Alg3Setup {
    pub fn selection_probabilities(&self) -> Vec<f64> {
        self.lp.as_ref().map(|c| c.selection_probabilities()).unwrap_or_default()
    }
}

pub fn alg3_setup(instance: &Instance, lambda: f64, delta: f64, set_cap: usize) -> Result<Alg3Setup, PolicyError> {
    check_integral_delta(lambda, delta)?;
    let demands = fixed_demands(instance, "alg3")?;
    let large: Vec<usize> = instance.customers().filter(|&v| demands.demand(v) > delta).collect();
    if large.is_empty() {
        return Ok(Alg3Setup { lambda, delta, large, sets: Vec::new(), lp: None });
    }
    let sets = setcover::feasible_sets_over(instance, &demands, &large, set_cap)?;
    let weighted: Vec<WeightedSet> = sets.iter().map(WeightedSet::from).collect();
    let lp = setcover::cover_lp(&large, &weighted)?;
    Ok(Alg3Setup { lambda, delta, large, sets, lp: Some(lp) })
}

/// Completes ALG.3 for a given rounding outcome and initial load.
pub fn alg3_finish(
    instance: &Instance,
    order: &[usize],
    setup: &Alg3Setup,
    selected: &[usize],
    l0: f64,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    let demands = fixed_demands(instance, "alg3")?;
    let chosen: Vec<&FeasibleSet> = selected.iter().map(|&i| &setup.sets[i]).collect();
    let (cover_tours, covered) = setcover::shortcut_selected(&chosen);
    let rest: Vec<usize> = order.iter().copied().filter(|v| !covered.contains(v)).collect();
    let (tail, mut trace) =
        alg1_from(instance, &demands, &rest, setup.lambda, setup.delta, l0, Alg1Options::default())?;
    trace.arm = "alg3".into();
    trace.notes.push(format!("rounding selected {} sets covering {} customers", chosen.len(), covered.len()));
    let mut itinerary = Itinerary::new(cover_tours);
    itinerary.extend(post_optimize_all(tail, instance));
    Ok((itinerary, trace))
}

/// ALG.3 with rounding drawn from `rounding` and the initial load from `initial`.
pub fn alg3<R1: Rng + ?Sized, R2: Rng + ?Sized>(
    instance: &Instance,
    order: &[usize],
    lambda: f64,
    delta: f64,
    set_cap: usize,
    rounding: &mut R1,
    initial: &mut R2,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    let setup = alg3_setup(instance, lambda, delta, set_cap)?;
    let selected = setup.lp.as_ref().map(|c| setcover::randomized_rounding(c, rounding)).unwrap_or_default();
    let l0 = initial.gen_range(0.0..lambda - delta);
    alg3_finish(instance, order, &setup, &selected, l0)
}

pub fn alg4<R: Rng + ?Sized>(
    instance: &Instance,
    order: &[usize],
    lambda: f64,
    rng: &mut R,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    check_load_params(lambda, 0.0)?;
    let l0 = rng.gen_range(0.0..lambda);
    alg4_from(instance, order, lambda, l0)
}

/// ALG.1(lambda, 0) with every tour post-optimized.
pub fn alg4_from(
    instance: &Instance,
    order: &[usize],
    lambda: f64,
    l0: f64,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    let demands = fixed_demands(instance, "alg4")?;
    let (itinerary, mut trace) = alg1_from(instance, &demands, order, lambda, 0.0, l0, Alg1Options::default())?;
    trace.arm = "alg4".into();
    Ok((post_optimize_all(itinerary, instance), trace))
}

/// Empty traversal of the tour recording every demand, followed by `solver`
/// on the recorded, now deterministic, instance.
pub fn record_then_solve<F>(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    solver: F,
) -> Result<(Itinerary, PolicyTrace), PolicyError>
where
    F: FnOnce(&Instance) -> Result<(Itinerary, PolicyTrace), PolicyError>,
{
    instance.check_realization(realization)?;
    let recorded = instance.with_fixed_demands(realization);
    let walk = Tour::serving(&order.iter().map(|&v| (v, 0.0)).collect::<Vec<_>>());
    let (solved, mut trace) = solver(&recorded)?;
    trace.notes.push(format!("recorded demands, then {}", trace.arm));
    trace.arm = format!("record-then-{}", trace.arm);
    let mut itinerary = if order.is_empty() { Itinerary::default() } else { Itinerary::new(vec![walk]) };
    itinerary.extend(solved);
    Ok((itinerary, trace))
}

/// Minimum cost partition of the tour order into depot-rooted tours, each
/// serving a contiguous stretch of the cumulative demand of length at most 1.
///
/// The cost is concave in the cut positions on every cell where the set of
/// touched customers is fixed, so optimal cuts lie at customer boundaries
/// shifted by whole capacities.
pub fn optimal_partition_dp(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    instance.check_realization(realization)?;
    let served: Vec<(usize, f64)> =
        order.iter().map(|&v| (v, realization.demand(v))).filter(|&(_, d)| d > 0.0).collect();
    let mut bounds = vec![0.0];
    for &(_, d) in &served {
        bounds.push(bounds.last().unwrap() + d);
    }
    let total = *bounds.last().unwrap();
    let mut trace = PolicyTrace::new("optimal-partition");
    if served.is_empty() {
        return Ok((Itinerary::default(), trace));
    }
    let mut cuts: Vec<f64> = Vec::new();
    for &c in &bounds {
        let lo = -(c.floor()) - 1.0;
        let hi = (total - c).ceil() + 1.0;
        let mut t = lo;
        while t <= hi {
            let x = c + t;
            if x >= -1e-12 && x <= total + 1e-12 {
                cuts.push(x.clamp(0.0, total));
            }
            t += 1.0;
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    *cuts.first_mut().unwrap() = 0.0;
    *cuts.last_mut().unwrap() = total;

    let segment = |from: f64, to: f64| -> Tour {
        let stops: Vec<(usize, f64)> = served
            .iter()
            .enumerate()
            .filter_map(|(k, &(v, _))| {
                let overlap = to.min(bounds[k + 1]) - from.max(bounds[k]);
                (overlap > 1e-12).then_some((v, overlap))
            })
            .collect();
        post_optimize(&Tour::serving(&stops), instance)
    };
    let m = cuts.len();
    let mut best = vec![f64::INFINITY; m];
    let mut parent = vec![usize::MAX; m];
    best[0] = 0.0;
    for k in 1..m {
        for i in (0..k).rev() {
            if cuts[k] - cuts[i] > 1.0 + TOLERANCE {
                break;
            }
            let cand = best[i] + segment(cuts[i], cuts[k]).cost(instance).total;
            if cand < best[k] {
                best[k] = cand;
                parent[k] = i;
            }
        }
    }
    let mut tours = Vec::new();
    let mut k = m - 1;
    while k != 0 {
        let i = parent[k];
        tours.push(segment(cuts[i], cuts[k]));
        k = i;
    }
    tours.reverse();
    trace.notes.push(format!("{} candidate cuts, {} tours", m, tours.len()));
    Ok((Itinerary::new(tours), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{cumulative_cost, validate_itinerary, DemandSpec, SplitMode};

    #[test]
    fn reversal_beats_heavy_last() {
        // 0.2 at distance 1, then 0.6 at distance 2: forward carries 0.8 then 0.6.
        let inst = Instance::on_line(&[1.0, 2.0], vec![DemandSpec::Fixed(0.2), DemandSpec::Fixed(0.6)], 1.0, 1.0)
            .unwrap();
        let tour = Tour::serving(&[(1, 0.2), (2, 0.6)]);
        let best = post_optimize(&tour, &inst);
        assert!(best.cost(&inst).total <= tour.cost(&inst).total);
        assert_eq!(best.cost(&inst).total, tour.cost(&inst).total.min(tour.reversed().cost(&inst).total));
    }

    #[test]
    fn partition_single_customer() {
        let inst = Instance::on_line(&[1.0], vec![DemandSpec::Fixed(0.6)], 1.0, 1.0).unwrap();
        let r = inst.fixed_realization().unwrap();
        let (it, _) = optimal_partition_dp(&inst, &r, &[1]).unwrap();
        assert_eq!(it.tours.len(), 1);
        assert!((cumulative_cost(&it, &inst).unwrap().total - 2.6).abs() < 1e-12);
    }

    #[test]
    fn partition_splits_large_totals() {
        let inst = Instance::on_line(&[1.0, 1.0, 1.0], vec![DemandSpec::Fixed(0.7); 3], 1.0, 1.0).unwrap();
        let r = inst.fixed_realization().unwrap();
        let (it, _) = optimal_partition_dp(&inst, &r, &[1, 2, 3]).unwrap();
        assert!(validate_itinerary(&it, &inst, &r, SplitMode::Splittable).is_ok());
        // Three units of distance 2 each are unavoidable: total 2.1 needs three tours.
        assert!((cumulative_cost(&it, &inst).unwrap().total - (6.0 + 2.1)).abs() < 1e-9);
    }

    #[test]
    fn record_then_solve_zero_demands() {
        let inst = Instance::on_line(&[1.0, 2.0], vec![DemandSpec::Fixed(0.0); 2], 1.0, 1.0).unwrap();
        let r = Realization::new(vec![0.0, 0.0]);
        let (it, _) = record_then_solve(&inst, &r, &[1, 2], |i| {
            let d = i.fixed_realization().unwrap();
            optimal_partition_dp(i, &d, &[1, 2])
        })
        .unwrap();
        assert!((cumulative_cost(&it, &inst).unwrap().total - 4.0).abs() < 1e-12);
    }
}
