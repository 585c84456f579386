use super::{Method, OracleError, OracleResult};
use crate::model::{cumulative_cost, Instance, Itinerary, Realization, SplitMode, Tour, TOLERANCE};
use crate::setcover::min_cost_tour_stops;

pub const MAX_BRUTE_FORCE: usize = 8;
pub const MAX_SPLIT_BRUTE_FORCE: usize = 4;
/// Resolution of split amounts in the splittable enumeration.
pub const SPLIT_GRID: f64 = 0.1;
const SPLIT_WORK_CAP: f64 = 2e7;

/// Minimum cost over all partitions into capacity-feasible tours, each
/// departing with exactly what it delivers (extra load only adds cargo cost).
///
/// Splittable mode lets every customer be split into two pieces on the
/// [`SPLIT_GRID`] grid, which yields an upper bound on the true optimum.
pub fn brute_force_opt(
    instance: &Instance,
    realization: &Realization,
    mode: SplitMode,
) -> Result<OracleResult, OracleError> {
    instance.check_realization(realization)?;
    let positive: Vec<(usize, f64)> =
        instance.customers().map(|v| (v, realization.demand(v))).filter(|&(_, d)| d > 0.0).collect();
    let (tours, method) = match mode {
        SplitMode::Unsplittable => {
            if instance.n() > MAX_BRUTE_FORCE {
                return Err(OracleError::TooLarge { what: "brute force", size: instance.n(), limit: MAX_BRUTE_FORCE });
            }
            (best_partition(&positive, instance)?.1, Method::PartitionEnumeration)
        }
        SplitMode::Splittable => {
            if instance.n() > MAX_SPLIT_BRUTE_FORCE {
                return Err(OracleError::TooLarge {
                    what: "splittable brute force",
                    size: instance.n(),
                    limit: MAX_SPLIT_BRUTE_FORCE,
                });
            }
            (best_split(&positive, instance)?, Method::FullEnumeration)
        }
    };
    let itinerary = Itinerary::new(tours);
    let opt_value = cumulative_cost(&itinerary, instance)?.total;
    Ok(OracleResult { opt_value, opt_itinerary: Some(itinerary), method })
}

/// Exact set partition of `items` by dynamic programming over subsets.
fn best_partition(items: &[(usize, f64)], instance: &Instance) -> Result<(f64, Vec<Tour>), OracleError> {
    let k = items.len();
    let full = (1usize << k) - 1;
    let mut tour_cost = vec![f64::INFINITY; full + 1];
    let mut tours: Vec<Option<Tour>> = vec![None; full + 1];
    for mask in 1..=full {
        let stops: Vec<(usize, f64)> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| items[i]).collect();
        if stops.iter().map(|s| s.1).sum::<f64>() <= 1.0 + TOLERANCE {
            let (tour, cost) = min_cost_tour_stops(&stops, instance)?;
            tour_cost[mask] = cost;
            tours[mask] = Some(tour);
        }
    }
    let mut best = vec![f64::INFINITY; full + 1];
    let mut choice = vec![0usize; full + 1];
    best[0] = 0.0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let part = sub | low;
            let cand = tour_cost[part] + best[mask ^ part];
            if cand < best[mask] {
                best[mask] = cand;
                choice[mask] = part;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut out = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let part = choice[mask];
        out.push(tours[part].clone().expect("chosen part is feasible"));
        mask ^= part;
    }
    Ok((best[full], out))
}

fn best_split(positive: &[(usize, f64)], instance: &Instance) -> Result<Vec<Tour>, OracleError> {
    let options: Vec<Vec<Vec<(usize, f64)>>> = positive
        .iter()
        .map(|&(v, d)| {
            let mut opts = vec![vec![(v, d)]];
            let mut step = 1;
            while (step as f64) * SPLIT_GRID < d - 1e-9 {
                let x = step as f64 * SPLIT_GRID;
                opts.push(vec![(v, x), (v, d - x)]);
                step += 1;
            }
            opts
        })
        .collect();
    let combos: f64 = options.iter().map(|o| o.len() as f64).product();
    let work = combos * 3f64.powi(2 * positive.len() as i32);
    if work > SPLIT_WORK_CAP {
        return Err(OracleError::ExplosionGuard { what: "splittable brute force", count: work, cap: SPLIT_WORK_CAP });
    }
    let mut best = (f64::INFINITY, Vec::new());
    let mut index = vec![0usize; options.len()];
    loop {
        let items: Vec<(usize, f64)> = index.iter().zip(&options).flat_map(|(&i, o)| o[i].clone()).collect();
        let (cost, tours) = best_partition(&items, instance)?;
        if cost < best.0 {
            best = (cost, tours);
        }
        let mut pos = 0;
        loop {
            if pos == index.len() {
                return Ok(best.1);
            }
            index[pos] += 1;
            if index[pos] < options[pos].len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{lower_bound, DemandSpec};

    #[test]
    fn two_customers_on_a_line() {
        let inst = Instance::on_line(&[1.0, 2.0], vec![DemandSpec::Fixed(0.6); 2], 1.0, 1.0).unwrap();
        let r = inst.fixed_realization().unwrap();
        let opt = brute_force_opt(&inst, &r, SplitMode::Unsplittable).unwrap();
        assert!((opt.opt_value - 7.8).abs() < 1e-12);
        assert!((lower_bound(&inst, &r, 4.0).lb - 5.8).abs() < 1e-12);
    }

    #[test]
    fn splitting_never_hurts() {
        let inst = Instance::on_line(&[1.0, 2.0], vec![DemandSpec::Fixed(0.6); 2], 1.0, 1.0).unwrap();
        let r = inst.fixed_realization().unwrap();
        let un = brute_force_opt(&inst, &r, SplitMode::Unsplittable).unwrap().opt_value;
        let sp = brute_force_opt(&inst, &r, SplitMode::Splittable).unwrap().opt_value;
        assert!(sp <= un + 1e-12);
    }

    #[test]
    fn single_customer() {
        let inst = Instance::on_line(&[1.5], vec![DemandSpec::Fixed(0.4)], 2.0, 3.0).unwrap();
        let r = inst.fixed_realization().unwrap();
        let opt = brute_force_opt(&inst, &r, SplitMode::Unsplittable).unwrap();
        assert!((opt.opt_value - (2.0 * 3.0 + 3.0 * 0.4 * 1.5)).abs() < 1e-12);
    }
}
