use cuvrp::model::generate::{generate, DemandFamily, GeneratorSpec, MetricFamily};
use cuvrp::oracle::{brute_force_opt, OracleError};
use cuvrp::policies::optimal_partition_dp;
use cuvrp::tsp::{double_tree_tsp, exact_tsp, two_opt};
use cuvrp::{lower_bound, validate_itinerary, DemandSpec, Instance, SplitMode};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const METRICS: [MetricFamily; 3] = [MetricFamily::Euclidean, MetricFamily::Line, MetricFamily::RandomMetric];

fn instance(seed: u64, n: usize, metric: usize, a: f64, b: f64) -> Instance {
    let spec = GeneratorSpec { n, metric: METRICS[metric], demands: DemandFamily::Mixed, a, b };
    generate(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lower_bound_below_brute_force(seed in any::<u64>(), n in 1usize..=7, metric in 0usize..3, a in 0.0f64..3.0, b in 0.0f64..3.0) {
        prop_assume!(a > 0.0 || b > 0.0);
        let inst = instance(seed, n, metric, a, b);
        let r = inst.fixed_realization().unwrap();
        let tau = exact_tsp(&inst).unwrap().weight;
        let opt = brute_force_opt(&inst, &r, SplitMode::Unsplittable).unwrap();
        prop_assert!(lower_bound(&inst, &r, tau).lb <= opt.opt_value + 1e-9);
        let it = opt.opt_itinerary.unwrap();
        prop_assert!(validate_itinerary(&it, &inst, &r, SplitMode::Unsplittable).is_ok());
    }

    #[test]
    fn partition_dp_is_a_feasible_split_solution(seed in any::<u64>(), n in 1usize..=7, metric in 0usize..3) {
        let inst = instance(seed, n, metric, 1.0, 1.0);
        let r = inst.fixed_realization().unwrap();
        let tour = exact_tsp(&inst).unwrap();
        let (it, _) = optimal_partition_dp(&inst, &r, &tour.customer_order()).unwrap();
        prop_assert!(validate_itinerary(&it, &inst, &r, SplitMode::Splittable).is_ok());
        let dp = cuvrp::cumulative_cost(&it, &inst).unwrap().total;
        prop_assert!(lower_bound(&inst, &r, tour.weight).lb <= dp + 1e-9);
    }

    #[test]
    fn tour_heuristics_respect_their_guarantee(seed in any::<u64>(), n in 2usize..=9, metric in 0usize..3) {
        let inst = instance(seed, n, metric, 1.0, 1.0);
        let exact = exact_tsp(&inst).unwrap();
        let tree = double_tree_tsp(&inst);
        let improved = two_opt(&tree, &inst, 50);
        prop_assert!(exact.weight <= improved.weight + 1e-9);
        prop_assert!(improved.weight <= tree.weight + 1e-9);
        prop_assert!(tree.weight <= 2.0 * exact.weight + 1e-9);
    }
}

#[test]
fn splitting_helps_when_two_customers_overflow() {
    let inst = Instance::on_line(&[1.0, 1.0], vec![DemandSpec::Fixed(0.6), DemandSpec::Fixed(0.6)], 1.0, 0.0).unwrap();
    let r = inst.fixed_realization().unwrap();
    let un = brute_force_opt(&inst, &r, SplitMode::Unsplittable).unwrap().opt_value;
    let sp = brute_force_opt(&inst, &r, SplitMode::Splittable).unwrap();
    assert!((un - 4.0).abs() < 1e-12);
    assert!((sp.opt_value - 4.0).abs() < 1e-12);
    assert!(validate_itinerary(&sp.opt_itinerary.unwrap(), &inst, &r, SplitMode::Splittable).is_ok());
}

#[test]
fn brute_force_refuses_large_instances() {
    let inst = instance(1, 9, 0, 1.0, 1.0);
    let r = inst.fixed_realization().unwrap();
    assert!(matches!(
        brute_force_opt(&inst, &r, SplitMode::Unsplittable),
        Err(OracleError::TooLarge { limit: 8, .. })
    ));
}
