use cuvrp::analysis::{
    appendix_lp, approx1_form, approx1_schedule_with, best_theta, p_approx1, ratio_curves, Figure, Formulation,
    RatioFamily,
};
use cuvrp::Extended;
use proptest::prelude::*;

proptest! {
    #[test]
    fn worst_dominates_every_sigma(gamma in 0.01f64..10.0, theta in 0.05f64..0.95, sigma in 0.0f64..50.0, alpha in 1.0f64..2.0) {
        let s = approx1_schedule_with(Extended::Finite(gamma), alpha, theta).unwrap();
        let form = approx1_form(Extended::Finite(gamma), alpha, s.lambda, theta, s.p).unwrap();
        prop_assert!(form.eval(Extended::Finite(sigma)) <= form.worst() + 1e-12);
        prop_assert!((0.0..=1.0).contains(&s.p));
    }

    #[test]
    fn mixing_probability_grows_with_gamma(g in 0.01f64..5.0, step in 0.01f64..5.0, theta in 0.05f64..0.95) {
        let low = p_approx1(Extended::Finite(g), 1.0, theta).unwrap();
        let high = p_approx1(Extended::Finite(g + step), 1.0, theta).unwrap();
        prop_assert!(low <= high + 1e-12);
    }
}

#[test]
fn best_theta_matches_known_points() {
    let (t, _) = best_theta(Extended::Finite(0.2), RatioFamily::Approx1, 1.5).unwrap();
    assert!((t - 0.5).abs() < 1e-12);
    let (t, _) = best_theta(Extended::Finite(1.0), RatioFamily::Approx1, 1.5).unwrap();
    assert!((t - 0.6363).abs() < 1e-12);
}

#[test]
fn figure_rows() {
    let rows = ratio_curves(&[0.2], Figure::Fig2, 1.5).unwrap();
    let row = rows.iter().find(|r| r.series == "theta_0.5").unwrap();
    assert!((row.worst - 10.0 / 3.0).abs() < 1e-9);
    let rows = ratio_curves(&[1.444], Figure::Fig3, 1.5).unwrap();
    assert!(rows.iter().map(|r| r.worst).fold(f64::INFINITY, f64::min) <= 3.456);
    assert_eq!(ratio_curves(&[0.5], Figure::Fig3, 1.5).unwrap().len(), 2);
}

#[test]
fn appendix_formulations_agree() {
    for case in [1u8, 2] {
        let rays = appendix_lp(1.444, 1.0, 30, case, 1.5, Formulation::Rays).unwrap().value.unwrap();
        let full = appendix_lp(1.444, 1.0, 30, case, 1.5, Formulation::Full).unwrap().value.unwrap();
        assert!((rays - full).abs() < 1e-7, "case {case}: {rays} vs {full}");
    }
}
