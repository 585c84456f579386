use cuvrp::lp::{solve, LinearProgram, Relation, Sense, Status};
use cuvrp::model::generate::{generate, DemandFamily, GeneratorSpec, MetricFamily};
use cuvrp::setcover::{
    cover_lp, enumerate_feasible_sets, exact_cover, greedy_cover, harmonic, randomized_rounding, WeightedSet,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::LN_2;

fn set_system() -> impl Strategy<Value = (Vec<usize>, Vec<WeightedSet>)> {
    (1usize..=8).prop_flat_map(|u| {
        let set = (prop::collection::vec(any::<bool>(), u), 0.1f64..10.0).prop_map(|(mask, weight)| {
            WeightedSet { elements: (1..=mask.len()).filter(|&e| mask[e - 1]).collect(), weight }
        });
        let singletons = prop::collection::vec(0.1f64..10.0, u);
        (Just(u), prop::collection::vec(set, 0..10), singletons)
    })
    .prop_map(|(u, mut sets, singles)| {
        sets.retain(|s| !s.elements.is_empty());
        sets.extend(singles.into_iter().enumerate().map(|(i, w)| WeightedSet { elements: vec![i + 1], weight: w }));
        ((1..=u).collect(), sets)
    })
}

fn covers(universe: &[usize], sets: &[WeightedSet], chosen: &[usize]) -> bool {
    universe.iter().all(|e| chosen.iter().any(|&i| sets[i].elements.contains(e)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn cover_solvers_are_ordered((universe, sets) in set_system()) {
        let exact = exact_cover(&universe, &sets).unwrap();
        let greedy = greedy_cover(&universe, &sets).unwrap();
        let lp = cover_lp(&universe, &sets).unwrap();
        prop_assert!(covers(&universe, &sets, &exact.chosen));
        prop_assert!(covers(&universe, &sets, &greedy.chosen));
        prop_assert!(lp.objective <= exact.weight + 1e-9);
        prop_assert!(exact.weight <= greedy.weight + 1e-9);
        let k = sets.iter().map(|s| s.elements.len()).max().unwrap();
        prop_assert!(greedy.weight <= harmonic(k) * exact.weight + 1e-9);
    }

    #[test]
    fn rounding_bounds_hold((universe, sets) in set_system(), seed in any::<u64>()) {
        let lp = cover_lp(&universe, &sets).unwrap();
        for &x in &lp.x {
            prop_assert!((0.0..=1.0).contains(&x));
        }
        for miss in lp.miss_probabilities(&universe, &sets) {
            prop_assert!(miss <= 0.5 + 1e-9);
        }
        prop_assert!(lp.expected_selected_weight(&sets) <= LN_2 * lp.objective + 1e-9);
        let picked = randomized_rounding(&lp, &mut ChaCha8Rng::seed_from_u64(seed));
        let probs = lp.selection_probabilities();
        for i in picked {
            prop_assert!(probs[i] > 0.0);
        }
    }

    #[test]
    fn feasible_sets_fit_the_vehicle(seed in any::<u64>(), n in 1usize..=6) {
        let spec = GeneratorSpec { n, metric: MetricFamily::Euclidean, demands: DemandFamily::Mixed, a: 1.0, b: 1.0 };
        let inst = generate(&spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let r = inst.fixed_realization().unwrap();
        let sets = enumerate_feasible_sets(&inst, &r, 0.0, 1_000_000).unwrap();
        for s in &sets {
            prop_assert!(s.total_demand <= 1.0 + 1e-9);
            prop_assert!((s.tour.delivered() - s.total_demand).abs() < 1e-9);
            prop_assert!((s.tour.cost(&inst).total - s.cost).abs() < 1e-9);
        }
        prop_assert!(sets.len() >= n);
    }

    #[test]
    fn lp_solutions_are_feasible_and_deterministic(
        c in prop::collection::vec(0.1f64..5.0, 2..6),
        rows in prop::collection::vec(prop::collection::vec(0.0f64..3.0, 6), 1..5),
        rhs in prop::collection::vec(0.5f64..4.0, 5),
    ) {
        let n = c.len();
        let mut program = LinearProgram::new(Sense::Minimize, c.clone());
        for (row, &b) in rows.iter().zip(&rhs) {
            let mut coeffs = row[..n].to_vec();
            coeffs[0] += 0.5;
            program.add_constraint(coeffs, Relation::Ge, b);
        }
        let first = solve(&program).unwrap();
        let second = solve(&program).unwrap();
        prop_assert_eq!(first.status, Status::Optimal);
        prop_assert_eq!(&first.x, &second.x);
        prop_assert!(program.max_violation(&first.x) < 1e-9);
        prop_assert!((program.evaluate(&first.x) - first.value).abs() < 1e-9);
    }
}

#[test]
fn unbounded_and_infeasible_programs_are_reported() {
    let mut unbounded = LinearProgram::new(Sense::Maximize, vec![1.0, 1.0]);
    unbounded.add_constraint(vec![1.0, -1.0], Relation::Le, 1.0);
    assert_eq!(solve(&unbounded).unwrap().status, Status::Unbounded);
    let mut infeasible = LinearProgram::new(Sense::Minimize, vec![1.0]);
    infeasible.add_constraint(vec![1.0], Relation::Le, 1.0);
    infeasible.add_constraint(vec![1.0], Relation::Ge, 2.0);
    assert_eq!(solve(&infeasible).unwrap().status, Status::Infeasible);
}
