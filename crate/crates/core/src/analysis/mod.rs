//! Closed-form approximation ratios, parameter schedules and the discretized
//! moment LPs.

pub mod appendix;
mod ratio;
mod schedule;

pub use appendix::{
    appendix_lp, appendix_max, appendix_program, appendix_sweep, sweep_maxima, AppendixSolution, DiscretizedMoments,
    Formulation, SweepRow,
};
pub use ratio::{
    alg3_form, alg_s_form, approx1_form, approx2_form, approx4_form, p_approx1, p_approx4, ratio_alg_s,
    ratio_approx1, ratio_approx2, ratio_approx4, worst_ratio, FractionalLinear, APPROX2_MIN_GAMMA,
};
pub use schedule::{
    alg_s_lambda, approx1_schedule, approx1_schedule_form, approx1_schedule_with, approx4_schedule,
    approx4_schedule_form, best_theta, dispatcher_ratio, ratio_curves, Approx4Regime, CurveRow, Figure,
    RatioFamily, Schedule, APPROX1_THETA_HIGH, APPROX1_THETA_SWITCH, APPROX4_THETA_TIGHT, CUVRPSD_CROSSOVER,
    FIG6_LP_MIN_GAMMA, FIG6_LP_N, THETA_GRID,
};

use crate::lp::LpError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("theta = {0} must lie strictly between 0 and 1")]
    DegenerateTheta(f64),
    #[error("gamma = {0} outside the validity range")]
    GammaOutOfRange(f64),
    #[error("N = {0} must be a positive multiple of 3")]
    InvalidN(usize),
    #[error("LP case must be 1 or 2, got {0}")]
    InvalidCase(u8),
    #[error("both LP cases infeasible at gamma = {gamma}, sigma = {sigma}")]
    LpInfeasible { gamma: f64, sigma: f64 },
    #[error(transparent)]
    Lp(#[from] LpError),
}
