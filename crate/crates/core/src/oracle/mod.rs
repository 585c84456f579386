//! Ground truth: brute-force optima, closed-form and exact expected costs of
//! the randomized policies, grid integration and sampling.

mod brute;
mod expectation;

pub use brute::{brute_force_opt, MAX_BRUTE_FORCE, MAX_SPLIT_BRUTE_FORCE, SPLIT_GRID};
pub use expectation::{
    additional_visit_cost, analytic_expected_cost_alg1, analytic_expected_cost_alg2, analytic_expected_cost_algs,
    arm_cost_at, breakpoints, exact_expected_cost, expectation_over_demands, grid_expected_cost, monte_carlo,
    plan_expected_cost, MonteCarlo, MAX_JOINT_REALIZATIONS, MAX_ROUNDING_OUTCOMES,
};

use crate::model::{Itinerary, ModelError};
use crate::policies::PolicyError;
use crate::setcover::SetCoverError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{what}: size {size} exceeds the limit {limit}")]
    TooLarge { what: &'static str, size: usize, limit: usize },
    #[error("{what}: {count} cases exceed the cap {cap}")]
    ExplosionGuard { what: &'static str, count: f64, cap: f64 },
    #[error("policy {0} has no grid evaluator")]
    Unsupported(String),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    SetCover(#[from] SetCoverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    PartitionEnumeration,
    Grid,
    Analytic,
    FullEnumeration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub opt_value: f64,
    pub opt_itinerary: Option<Itinerary>,
    pub method: Method,
}
