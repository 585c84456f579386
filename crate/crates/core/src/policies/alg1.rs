use super::trace::{PolicyTrace, StepCase, TraceStep};
use super::vehicle::{RevealedDemands, Vehicle};
use super::{check_integral_delta, check_load_params, PolicyError};
use crate::model::{Instance, Itinerary, Realization, Tour, TOLERANCE};
use crate::setcover::{self, WeightedSet};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Alg1Options {
    pub shortcut_case31: bool,
    /// Defers every customer with demand above this level (ALG.2).
    pub skip_above: Option<f64>,
}

/// Reduces `x` into `[0, period)`, absorbing rounding noise at the ends.
pub(crate) fn wrap(x: f64, period: f64) -> f64 {
    let x = if x < 0.0 && x > -1e-12 { 0.0 } else { x };
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

fn check_demand(customer: usize, d: f64) -> Result<(), PolicyError> {
    if d > 1.0 + TOLERANCE {
        return Err(PolicyError::InfeasibleDemand { customer, value: d });
    }
    Ok(())
}

/// ALG.1 draws `L_0 ~ U[0, lambda - delta)` and runs [`alg1_from`].
pub fn alg1<R: Rng + ?Sized>(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    lambda: f64,
    delta: f64,
    options: Alg1Options,
    rng: &mut R,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    check_load_params(lambda, delta)?;
    let l0 = rng.gen_range(0.0..lambda - delta);
    alg1_from(instance, realization, order, lambda, delta, l0, options)
}

/// ALG.1 along `order` with a given initial normal load.
pub fn alg1_from(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    lambda: f64,
    delta: f64,
    l0: f64,
    options: Alg1Options,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    check_load_params(lambda, delta)?;
    let period = lambda - delta;
    if !(0.0..period).contains(&l0) {
        return Err(PolicyError::InvalidParams(format!("initial load {l0} outside [0, {period})")));
    }
    instance.check_realization(realization)?;
    let mut demands = RevealedDemands::new(realization);
    let mut trace = PolicyTrace::new("alg1");
    trace.initial_load = Some(l0);
    trace.delta = delta;
    let mut vehicle = Vehicle::at_depot(l0 + delta);
    let mut load = l0;
    for (step, &v) in order.iter().enumerate() {
        vehicle.move_to(v);
        let d = demands.reveal(v, vehicle.position())?;
        check_demand(v, d)?;
        let before = load;
        let deferred = options.skip_above.is_some_and(|level| d > level);
        let (case, visits) = if deferred || d > lambda {
            trace.skipped.push(v);
            (StepCase::Skip, 0)
        } else if d <= load {
            vehicle.deliver(d);
            load -= d;
            (StepCase::Deliver, 0)
        } else if d <= load + delta {
            vehicle.deliver(d);
            vehicle.to_depot();
            load = wrap(load + period - d, period);
            vehicle.reload(load + delta);
            vehicle.move_to(v);
            (StepCase::Backup, 1)
        } else {
            vehicle.to_depot();
            vehicle.reload(d);
            vehicle.move_to(v);
            vehicle.deliver(d);
            vehicle.to_depot();
            let rounds = ((d - load) / period).ceil();
            load = wrap(load + rounds * period - d, period);
            vehicle.reload(load + delta);
            if !options.shortcut_case31 {
                vehicle.move_to(v);
            }
            (StepCase::RoundTrip, 2)
        };
        trace.steps.push(TraceStep { step, customer: v, case, load_before: before, load_after: load, visits });
    }
    let mut itinerary = vehicle.finish();
    for &v in &trace.skipped {
        let d = demands.recorded(v)?;
        if d > 0.0 {
            itinerary.tours.push(Tour::serving(&[(v, d)]));
        }
    }
    Ok((itinerary, trace))
}

/// Empty traversal recording every demand, then one dedicated tour per customer.
pub fn alg1_lambda0(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    instance.check_realization(realization)?;
    let mut demands = RevealedDemands::new(realization);
    let mut trace = PolicyTrace::new("alg1-lambda0");
    let mut vehicle = Vehicle::at_depot(0.0);
    for (step, &v) in order.iter().enumerate() {
        vehicle.move_to(v);
        let d = demands.reveal(v, vehicle.position())?;
        check_demand(v, d)?;
        trace.skipped.push(v);
        trace.steps.push(TraceStep { step, customer: v, case: StepCase::Skip, load_before: 0.0, load_after: 0.0, visits: 0 });
    }
    let mut itinerary = vehicle.finish();
    for &v in &trace.skipped {
        let d = demands.recorded(v)?;
        if d > 0.0 {
            itinerary.tours.push(Tour::serving(&[(v, d)]));
        }
    }
    Ok((itinerary, trace))
}

pub fn alg2<R: Rng + ?Sized>(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    lambda: f64,
    delta: f64,
    set_cap: usize,
    rng: &mut R,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    check_integral_delta(lambda, delta)?;
    let l0 = rng.gen_range(0.0..lambda - delta);
    alg2_from(instance, realization, order, lambda, delta, l0, set_cap)
}

/// ALG.2: customers above `delta` are deferred and served by the cheaper of
/// dedicated tours and a set-cover solution over them.
pub fn alg2_from(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    lambda: f64,
    delta: f64,
    l0: f64,
    set_cap: usize,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    check_integral_delta(lambda, delta)?;
    let options = Alg1Options { shortcut_case31: false, skip_above: Some(delta) };
    let (mut itinerary, mut trace) = alg1_from(instance, realization, order, lambda, delta, l0, options)?;
    trace.arm = "alg2".into();
    let deferred: Vec<usize> = trace.skipped.iter().copied().filter(|&v| realization.demand(v) > 0.0).collect();
    let singles_count = deferred.len();
    let first_single = itinerary.tours.len() - singles_count;
    if singles_count > 1 {
        let singles = itinerary.tours.split_off(first_single);
        let singles_cost: f64 = singles.iter().map(|t| t.cost(instance).total).sum();
        match cover_tours(instance, realization, &deferred, set_cap) {
            Ok(cover) => {
                let cover_cost: f64 = cover.iter().map(|t| t.cost(instance).total).sum();
                if cover_cost < singles_cost {
                    trace.notes.push(format!("set cover chosen: {cover_cost} < {singles_cost}"));
                    itinerary.tours.extend(cover);
                } else {
                    itinerary.tours.extend(singles);
                }
            }
            Err(e) => {
                log::warn!("alg2 falls back to dedicated tours: {e}");
                trace.notes.push(format!("set cover unavailable: {e}"));
                itinerary.tours.extend(singles);
            }
        }
    }
    Ok((itinerary, trace))
}

fn cover_tours(
    instance: &Instance,
    realization: &Realization,
    universe: &[usize],
    set_cap: usize,
) -> Result<Vec<Tour>, PolicyError> {
    let sets = setcover::feasible_sets_over(instance, realization, universe, set_cap)?;
    let weighted: Vec<WeightedSet> = sets.iter().map(WeightedSet::from).collect();
    let cover = setcover::solve_cover(universe, &weighted)?;
    let chosen: Vec<_> = cover.chosen.iter().map(|&i| &sets[i]).collect();
    Ok(setcover::shortcut_selected(&chosen).0)
}

pub fn alg_s<R: Rng + ?Sized>(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    lambda: f64,
    rng: &mut R,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    check_load_params(lambda, 0.0)?;
    let l0 = rng.gen_range(0.0..lambda);
    alg_s_from(instance, realization, order, lambda, l0)
}

/// Splittable greedy: deliver what is on board, refill to `lambda` when short.
pub fn alg_s_from(
    instance: &Instance,
    realization: &Realization,
    order: &[usize],
    lambda: f64,
    l0: f64,
) -> Result<(Itinerary, PolicyTrace), PolicyError> {
    check_load_params(lambda, 0.0)?;
    if !(0.0..lambda).contains(&l0) {
        return Err(PolicyError::InvalidParams(format!("initial load {l0} outside [0, {lambda})")));
    }
    instance.check_realization(realization)?;
    let mut demands = RevealedDemands::new(realization);
    let mut trace = PolicyTrace::new("alg-s");
    trace.initial_load = Some(l0);
    let mut vehicle = Vehicle::at_depot(l0);
    let mut load = l0;
    for (step, &v) in order.iter().enumerate() {
        vehicle.move_to(v);
        let d = demands.reveal(v, vehicle.position())?;
        let before = load;
        let mut remaining = d;
        let mut visits = 0;
        while remaining > load + 1e-12 {
            vehicle.deliver(load);
            remaining -= load;
            vehicle.to_depot();
            vehicle.reload(lambda);
            vehicle.move_to(v);
            load = lambda;
            visits += 1;
        }
        let give = remaining.min(load);
        vehicle.deliver(give);
        load = (load - give).max(0.0);
        trace.steps.push(TraceStep { step, customer: v, case: StepCase::Split, load_before: before, load_after: load, visits });
    }
    Ok((vehicle.finish(), trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{cumulative_cost, validate_itinerary, DemandSpec, SplitMode};

    fn single(l: f64, d: f64) -> (Instance, Realization) {
        let inst = Instance::on_line(&[l], vec![DemandSpec::Fixed(d)], 1.0, 1.0).unwrap();
        let r = inst.fixed_realization().unwrap();
        (inst, r)
    }

    #[test]
    fn case31_single_customer() {
        let (inst, r) = single(1.0, 0.9);
        let (it, trace) = alg1_from(&inst, &r, &[1], 1.0, 0.0, 0.5, Alg1Options::default()).unwrap();
        assert_eq!(trace.steps[0].case, StepCase::RoundTrip);
        assert_eq!(trace.steps[0].visits, 2);
        assert!((trace.steps[0].load_after - 0.6).abs() < 1e-12);
        // 0.5 out and back, 0.9 out, 0 back, 0.6 out and back.
        let cost = cumulative_cost(&it, &inst).unwrap();
        assert!((cost.vehicle_cost - 6.0).abs() < 1e-12);
        assert!((cost.cargo_cost - (0.5 + 0.5 + 0.9 + 0.6 + 0.6)).abs() < 1e-12);
        assert!(validate_itinerary(&it, &inst, &r, SplitMode::Unsplittable).is_ok());
    }

    #[test]
    fn huge_customer_gets_dedicated_tour() {
        let (inst, r) = single(1.0, 0.7);
        let (it, trace) = alg1_from(&inst, &r, &[1], 0.5, 0.0, 0.2, Alg1Options::default()).unwrap();
        assert_eq!(trace.skipped, vec![1]);
        let last = it.tours.last().unwrap();
        assert!((last.cost(&inst).total - (2.0 + 0.7)).abs() < 1e-12);
    }

    #[test]
    fn zero_demands_only_traverse() {
        let inst = Instance::on_line(&[1.0, 2.0], vec![DemandSpec::Fixed(0.0); 2], 1.0, 1.0).unwrap();
        let r = Realization::new(vec![0.0, 0.0]);
        let (it, _) = alg1_from(&inst, &r, &[1, 2], 1.0, 0.0, 0.25, Alg1Options::default()).unwrap();
        assert_eq!(it.tours.len(), 1);
        let cost = cumulative_cost(&it, &inst).unwrap();
        assert!((cost.total - (4.0 + 0.25 * 4.0)).abs() < 1e-12);
    }

    #[test]
    fn alg_s_single_refill() {
        let (inst, r) = single(1.0, 1.0);
        let (it, trace) = alg_s_from(&inst, &r, &[1], 1.0, 0.3).unwrap();
        assert_eq!(trace.steps[0].visits, 1);
        assert!(validate_itinerary(&it, &inst, &r, SplitMode::Splittable).is_ok());
    }

    #[test]
    fn premature_read_is_rejected() {
        let (_, r) = single(1.0, 0.5);
        let mut demands = RevealedDemands::new(&r);
        assert!(demands.recorded(1).is_err());
        assert!(demands.reveal(1, 0).is_err());
        assert_eq!(demands.reveal(1, 1).unwrap(), 0.5);
        assert_eq!(demands.recorded(1).unwrap(), 0.5);
    }

    #[test]
    fn infeasible_demand() {
        let inst = Instance::on_line(&[1.0], vec![DemandSpec::Fixed(1.0)], 1.0, 1.0).unwrap();
        let r = Realization::new(vec![1.5]);
        assert!(alg1_from(&inst, &r, &[1], 1.0, 0.0, 0.1, Alg1Options::default()).is_err());
    }
}
