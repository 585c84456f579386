//! Feasible-set enumeration, minimum cumulative-cost tours, weighted set cover
//! (exact, greedy, LP relaxation) and randomized rounding.

use crate::lp::{self, LinearProgram, Relation, Sense, Status};
use crate::model::{Instance, Realization, Tour};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

pub const DEFAULT_SET_CAP: usize = 1_000_000;
/// Largest set handled by [`min_cost_tour`].
pub const MAX_TOUR_SET: usize = 12;
/// Largest universe handled by [`exact_cover`].
pub const MAX_EXACT_UNIVERSE: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SetCoverError {
    #[error("feasible-set enumeration exceeded the cap of {cap} sets")]
    ExplosionGuard { cap: usize },
    #[error("set of size {size} exceeds the tour limit {limit}")]
    SetTooLarge { size: usize, limit: usize },
    #[error("universe of size {size} exceeds the exact-cover limit {limit}")]
    UniverseTooLarge { size: usize, limit: usize },
    #[error("element {element} is not covered by any set")]
    Infeasible { element: usize },
    #[error("cover LP is infeasible")]
    LpInfeasible,
    #[error(transparent)]
    Lp(#[from] lp::LpError),
}

/// A capacity-feasible customer set with its cheapest serving tour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSet {
    pub members: Vec<usize>,
    pub total_demand: f64,
    pub tour: Tour,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSet {
    pub elements: Vec<usize>,
    pub weight: f64,
}

impl From<&FeasibleSet> for WeightedSet {
    fn from(s: &FeasibleSet) -> Self {
        WeightedSet { elements: s.members.clone(), weight: s.cost }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    /// Indices into the set list.
    pub chosen: Vec<usize>,
    pub weight: f64,
    /// Approximation guarantee of the solver that produced it (1 when exact).
    pub guarantee: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FractionalCover {
    pub x: Vec<f64>,
    pub objective: f64,
}

impl FractionalCover {
    /// `min(ln2 * x_S, 1)` per set.
    pub fn selection_probabilities(&self) -> Vec<f64> {
        self.x.iter().map(|&x| (LN_2 * x).min(1.0)).collect()
    }

    /// `prod_{S containing v} (1 - min(ln2 x_S, 1))` for each element.
    pub fn miss_probabilities(&self, universe: &[usize], sets: &[WeightedSet]) -> Vec<f64> {
        let probs = self.selection_probabilities();
        universe
            .iter()
            .map(|&v| {
                sets.iter()
                    .zip(&probs)
                    .filter(|(s, _)| s.elements.contains(&v))
                    .map(|(_, p)| 1.0 - p)
                    .product()
            })
            .collect()
    }

    /// `sum w_S * min(ln2 x_S, 1)`.
    pub fn expected_selected_weight(&self, sets: &[WeightedSet]) -> f64 {
        sets.iter().zip(self.selection_probabilities()).map(|(s, p)| s.weight * p).sum()
    }
}

/// All subsets of `{v : d_v > delta}` with total demand at most 1, each with
/// its minimum-cost tour.
pub fn enumerate_feasible_sets(
    instance: &Instance,
    realization: &Realization,
    delta: f64,
    cap: usize,
) -> Result<Vec<FeasibleSet>, SetCoverError> {
    let large: Vec<usize> = instance.customers().filter(|&v| realization.demand(v) > delta).collect();
    feasible_sets_over(instance, realization, &large, cap)
}

/// Feasible subsets of an explicit candidate list.
pub fn feasible_sets_over(
    instance: &Instance,
    realization: &Realization,
    candidates: &[usize],
    cap: usize,
) -> Result<Vec<FeasibleSet>, SetCoverError> {
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    collect_subsets(realization, candidates, 0, 0.0, &mut stack, &mut subsets, cap)?;
    subsets
        .into_iter()
        .map(|members| {
            let (tour, cost) = min_cost_tour(&members, instance, realization)?;
            let total_demand = members.iter().map(|&v| realization.demand(v)).sum();
            Ok(FeasibleSet { members, total_demand, tour, cost })
        })
        .collect()
}

fn collect_subsets(
    realization: &Realization,
    candidates: &[usize],
    start: usize,
    load: f64,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> Result<(), SetCoverError> {
    for i in start..candidates.len() {
        let v = candidates[i];
        let next = load + realization.demand(v);
        if next > 1.0 + 1e-12 {
            continue;
        }
        stack.push(v);
        if out.len() >= cap {
            return Err(SetCoverError::ExplosionGuard { cap });
        }
        out.push(stack.clone());
        collect_subsets(realization, candidates, i + 1, next, stack, out, cap)?;
        stack.pop();
    }
    Ok(())
}

/// Cheapest tour serving exactly `members`, departing with their total demand.
pub fn min_cost_tour(
    members: &[usize],
    instance: &Instance,
    realization: &Realization,
) -> Result<(Tour, f64), SetCoverError> {
    let stops: Vec<(usize, f64)> = members.iter().map(|&v| (v, realization.demand(v))).collect();
    min_cost_tour_stops(&stops, instance)
}

/// Cheapest ordering of explicit `(vertex, amount)` stops.
///
/// Dynamic programming over visited subsets: the load on every edge is the
/// total minus what has been delivered, so it is a function of the subset.
pub fn min_cost_tour_stops(stops: &[(usize, f64)], instance: &Instance) -> Result<(Tour, f64), SetCoverError> {
    let k = stops.len();
    if k > MAX_TOUR_SET {
        return Err(SetCoverError::SetTooLarge { size: k, limit: MAX_TOUR_SET });
    }
    if k == 0 {
        return Ok((Tour::serving(&[]), 0.0));
    }
    let (a, b) = (instance.a(), instance.b());
    let full = (1usize << k) - 1;
    let mut served = vec![0.0; full + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        served[mask] = served[mask & (mask - 1)] + stops[low].1;
    }
    let total = served[full];
    let mut dp = vec![f64::INFINITY; (full + 1) * k];
    let mut parent = vec![usize::MAX; (full + 1) * k];
    for j in 0..k {
        dp[(1 << j) * k + j] = (a + b * total) * instance.radial(stops[j].0);
    }
    for mask in 1..=full {
        let carried = (total - served[mask]).max(0.0);
        for last in 0..k {
            let cur = dp[mask * k + last];
            if !cur.is_finite() {
                continue;
            }
            for next in 0..k {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let cand = cur + (a + b * carried) * instance.dist(stops[last].0, stops[next].0);
                if cand < dp[nm * k + next] {
                    dp[nm * k + next] = cand;
                    parent[nm * k + next] = last;
                }
            }
        }
    }
    let mut best = (f64::INFINITY, 0);
    for j in 0..k {
        let c = dp[full * k + j] + a * instance.radial(stops[j].0);
        if c < best.0 {
            best = (c, j);
        }
    }
    let mut order = Vec::with_capacity(k);
    let (mut mask, mut last) = (full, best.1);
    loop {
        order.push(last);
        let p = parent[mask * k + last];
        mask &= !(1 << last);
        if p == usize::MAX {
            break;
        }
        last = p;
    }
    order.reverse();
    let ordered: Vec<(usize, f64)> = order.iter().map(|&j| stops[j]).collect();
    let tour = Tour::serving(&ordered);
    let cost = tour.cost(instance).total;
    Ok((tour, cost))
}

fn index_universe(universe: &[usize], sets: &[WeightedSet]) -> Result<Vec<u64>, SetCoverError> {
    let position = |e: usize| universe.iter().position(|&u| u == e);
    let masks: Vec<u64> = sets
        .iter()
        .map(|s| s.elements.iter().filter_map(|&e| position(e)).fold(0u64, |m, i| m | (1 << i)))
        .collect();
    for (i, &e) in universe.iter().enumerate() {
        if !masks.iter().any(|m| m & (1 << i) != 0) {
            return Err(SetCoverError::Infeasible { element: e });
        }
    }
    Ok(masks)
}

/// Minimum-weight cover by dynamic programming over covered subsets.
pub fn exact_cover(universe: &[usize], sets: &[WeightedSet]) -> Result<Cover, SetCoverError> {
    let u = universe.len();
    if u > MAX_EXACT_UNIVERSE {
        return Err(SetCoverError::UniverseTooLarge { size: u, limit: MAX_EXACT_UNIVERSE });
    }
    let masks = index_universe(universe, sets)?;
    let full = (1usize << u) - 1;
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); u];
    for (s, &m) in masks.iter().enumerate() {
        for (e, list) in containing.iter_mut().enumerate() {
            if m & (1 << e) != 0 {
                list.push(s);
            }
        }
    }
    let mut dp = vec![f64::INFINITY; full + 1];
    let mut choice = vec![(usize::MAX, usize::MAX); full + 1];
    dp[0] = 0.0;
    for mask in 0..full {
        if !dp[mask].is_finite() {
            continue;
        }
        let e = (!mask).trailing_zeros() as usize;
        for &s in &containing[e] {
            let nm = mask | masks[s] as usize;
            let cand = dp[mask] + sets[s].weight;
            if cand < dp[nm] {
                dp[nm] = cand;
                choice[nm] = (mask, s);
            }
        }
    }
    let mut chosen = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let (prev, s) = choice[mask];
        chosen.push(s);
        mask = prev;
    }
    chosen.reverse();
    Ok(Cover { chosen, weight: dp[full], guarantee: 1.0 })
}

/// Harmonic number `H_k`.
pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|i| 1.0 / i as f64).sum()
}

/// Classic ratio greedy; guarantee `H_k` with `k` the largest set size.
pub fn greedy_cover(universe: &[usize], sets: &[WeightedSet]) -> Result<Cover, SetCoverError> {
    let mut uncovered: Vec<usize> = universe.to_vec();
    for &e in universe {
        if !sets.iter().any(|s| s.elements.contains(&e)) {
            return Err(SetCoverError::Infeasible { element: e });
        }
    }
    let mut chosen = Vec::new();
    let mut weight = 0.0;
    while !uncovered.is_empty() {
        let mut best: Option<(usize, f64)> = None;
        for (i, s) in sets.iter().enumerate() {
            let gain = s.elements.iter().filter(|e| uncovered.contains(e)).count();
            if gain == 0 {
                continue;
            }
            let price = s.weight / gain as f64;
            if best.is_none_or(|(_, p)| price < p) {
                best = Some((i, price));
            }
        }
        let (i, _) = best.expect("every element is coverable");
        uncovered.retain(|e| !sets[i].elements.contains(e));
        chosen.push(i);
        weight += sets[i].weight;
    }
    let k = sets.iter().map(|s| s.elements.len()).max().unwrap_or(1);
    Ok(Cover { chosen, weight, guarantee: harmonic(k) })
}

/// Exact cover when the universe is small enough, greedy otherwise.
pub fn solve_cover(universe: &[usize], sets: &[WeightedSet]) -> Result<Cover, SetCoverError> {
    match exact_cover(universe, sets) {
        Err(SetCoverError::UniverseTooLarge { size, .. }) => {
            let cover = greedy_cover(universe, sets)?;
            log::warn!("universe of {size} elements: greedy cover with guarantee {:.4}", cover.guarantee);
            Ok(cover)
        }
        other => other,
    }
}

/// LP relaxation: `min sum w_S x_S` with `sum_{S containing v} x_S >= 1`, `x >= 0`.
pub fn cover_lp(universe: &[usize], sets: &[WeightedSet]) -> Result<FractionalCover, SetCoverError> {
    for &e in universe {
        if !sets.iter().any(|s| s.elements.contains(&e)) {
            return Err(SetCoverError::LpInfeasible);
        }
    }
    let mut program = LinearProgram::new(Sense::Minimize, sets.iter().map(|s| s.weight).collect());
    for &e in universe {
        let row: Vec<f64> = sets.iter().map(|s| if s.elements.contains(&e) { 1.0 } else { 0.0 }).collect();
        program.add_constraint(row, Relation::Ge, 1.0);
    }
    let solution = lp::solve(&program)?;
    if solution.status != Status::Optimal {
        return Err(SetCoverError::LpInfeasible);
    }
    // Capping at 1 keeps feasibility and never raises a nonnegative objective.
    let x: Vec<f64> = solution.x.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    let objective = sets.iter().zip(&x).map(|(s, v)| s.weight * v).sum();
    Ok(FractionalCover { x, objective })
}

/// Selects each set independently with probability `min(ln2 * x_S, 1)`.
pub fn randomized_rounding<R: Rng + ?Sized>(cover: &FractionalCover, rng: &mut R) -> Vec<usize> {
    cover
        .selection_probabilities()
        .iter()
        .enumerate()
        .filter(|&(_, &p)| rng.gen::<f64>() < p)
        .map(|(i, _)| i)
        .collect()
}

/// Keeps each customer only in the first selected tour that contains it.
/// Returns the shortcut tours and the covered customers in service order.
pub fn shortcut_selected(sets: &[&FeasibleSet]) -> (Vec<Tour>, Vec<usize>) {
    let mut covered: Vec<usize> = Vec::new();
    let mut tours = Vec::new();
    for set in sets {
        let stops: Vec<(usize, f64)> =
            set.tour.stops().into_iter().filter(|(v, _)| !covered.contains(v)).collect();
        if stops.is_empty() {
            continue;
        }
        covered.extend(stops.iter().map(|s| s.0));
        tours.push(Tour::serving(&stops));
    }
    (tours, covered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DemandSpec;

    fn ws(elements: &[usize], weight: f64) -> WeightedSet {
        WeightedSet { elements: elements.to_vec(), weight }
    }

    #[test]
    fn pair_plus_singleton() {
        let sets = vec![ws(&[1], 5.0), ws(&[2], 5.0), ws(&[3], 5.0), ws(&[1, 2], 6.0)];
        let c = exact_cover(&[1, 2, 3], &sets).unwrap();
        assert_eq!(c.weight, 11.0);
        let mut chosen = c.chosen.clone();
        chosen.sort();
        assert_eq!(chosen, vec![2, 3]);
    }

    #[test]
    fn uncoverable_element() {
        let sets = vec![ws(&[1], 1.0)];
        assert_eq!(exact_cover(&[1, 2], &sets), Err(SetCoverError::Infeasible { element: 2 }));
        assert_eq!(cover_lp(&[1, 2], &sets), Err(SetCoverError::LpInfeasible));
    }

    #[test]
    fn odd_cycle_is_half_integral() {
        let sets = vec![ws(&[1, 2], 1.0), ws(&[2, 3], 1.0), ws(&[1, 3], 1.0)];
        let lp = cover_lp(&[1, 2, 3], &sets).unwrap();
        assert!((lp.objective - 1.5).abs() < 1e-9);
        assert_eq!(exact_cover(&[1, 2, 3], &sets).unwrap().weight, 2.0);
    }

    #[test]
    fn three_medium_customers() {
        let inst = Instance::on_line(&[1.0, 2.0, 3.0], vec![DemandSpec::Fixed(0.4); 3], 1.0, 1.0).unwrap();
        let r = inst.fixed_realization().unwrap();
        let sets = enumerate_feasible_sets(&inst, &r, 1.0 / 3.0, DEFAULT_SET_CAP).unwrap();
        assert_eq!(sets.len(), 6);
        assert!(sets.iter().all(|s| s.members.len() <= 2));
        let err = enumerate_feasible_sets(&inst, &r, 1.0 / 3.0, 5).unwrap_err();
        assert_eq!(err, SetCoverError::ExplosionGuard { cap: 5 });
    }

    #[test]
    fn singleton_tour_cost() {
        let inst = Instance::on_line(&[2.0], vec![DemandSpec::Fixed(0.6)], 1.0, 1.0).unwrap();
        let r = inst.fixed_realization().unwrap();
        let (tour, cost) = min_cost_tour(&[1], &inst, &r).unwrap();
        assert!((cost - 5.2).abs() < 1e-12);
        assert_eq!(tour.vertices, vec![0, 1, 0]);
    }

    #[test]
    fn heavier_first_on_a_line() {
        // Visiting the far heavy customer first wastes cargo on the near leg.
        let inst = Instance::on_line(&[1.0, 1.0], vec![DemandSpec::Fixed(0.2), DemandSpec::Fixed(0.6)], 1.0, 1.0)
            .unwrap();
        let r = inst.fixed_realization().unwrap();
        let (_, cost) = min_cost_tour(&[1, 2], &inst, &r).unwrap();
        assert!((cost - (2.0 + 0.8)).abs() < 1e-12);
    }
}
