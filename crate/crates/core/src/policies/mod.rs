//! Routing policies executed against a demand realization revealed on arrival.

mod alg1;
mod cuvrp;
mod plan;
mod rng;
mod trace;
mod vehicle;

pub use alg1::{alg1, alg1_from, alg1_lambda0, alg2, alg2_from, alg_s, alg_s_from, Alg1Options};
pub use cuvrp::{
    alg3, alg3_finish, alg3_setup, alg4, alg4_from, optimal_partition_dp, post_optimize, record_then_solve,
    Alg3Setup,
};
pub use plan::{Arm, Plan, PlanArm, Policy, PolicyRun};
pub use crate::analysis::Approx4Regime;
pub use rng::{derive_seed, Randomness, Stream};
pub use trace::{PolicyTrace, StepCase, TraceStep};
pub use vehicle::RevealedDemands;

use crate::analysis::AnalysisError;
use crate::model::ModelError;
use crate::setcover::SetCoverError;
use crate::tsp::{TourProvider, TspError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("customer {customer} has demand {value} above the capacity")]
    InfeasibleDemand { customer: usize, value: f64 },
    #[error("invalid policy parameters: {0}")]
    InvalidParams(String),
    #[error("demand of customer {customer} read while the vehicle is at {position}")]
    PrematureRead { customer: usize, position: usize },
    #[error("policy {0} requires deterministic demands")]
    NotDeterministic(&'static str),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tsp(#[from] TspError),
    #[error(transparent)]
    SetCover(#[from] SetCoverError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Load ceiling, backup level and mixture parameters of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub lambda: f64,
    pub delta: f64,
    pub theta: f64,
    pub p: f64,
    pub alpha: f64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams { lambda: 1.0, delta: 0.0, theta: 0.5, p: 1.0, alpha: 1.5 }
    }
}

impl PolicyParams {
    pub fn new(lambda: f64, delta: f64) -> Self {
        PolicyParams { lambda, delta, ..Default::default() }
    }

    /// `0 < lambda <= 1` and `0 <= delta <= lambda / 2`.
    pub fn validate(&self) -> Result<(), PolicyError> {
        check_load_params(self.lambda, self.delta)?;
        if !(0.0..=1.0).contains(&self.p) {
            return Err(PolicyError::InvalidParams(format!("p = {} outside [0, 1]", self.p)));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(PolicyError::InvalidParams(format!("theta = {} outside (0, 1)", self.theta)));
        }
        Ok(())
    }
}

pub(crate) fn check_load_params(lambda: f64, delta: f64) -> Result<(), PolicyError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(PolicyError::InvalidParams(format!("lambda = {lambda} outside (0, 1]")));
    }
    if !(delta >= 0.0 && delta <= lambda / 2.0 + 1e-12) {
        return Err(PolicyError::InvalidParams(format!("delta = {delta} outside [0, lambda/2]")));
    }
    Ok(())
}

/// Additionally `delta > 0` with `1/delta` integral.
pub(crate) fn check_integral_delta(lambda: f64, delta: f64) -> Result<(), PolicyError> {
    check_load_params(lambda, delta)?;
    let inv = 1.0 / delta;
    if !(delta > 0.0) || (inv - inv.round()).abs() > 1e-9 {
        return Err(PolicyError::InvalidParams(format!("1/delta = {inv} is not an integer")));
    }
    Ok(())
}

/// Backup level used by ALG.3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alg3Delta {
    /// `1/k`, lowered to the largest unit fraction not above `lambda/2`.
    Fixed(u32),
    /// `1 / ceil((1 + e') / (lambda e'))` with `e' = epsilon / (1 + alpha)`.
    Theoretical { epsilon: f64 },
}

impl Alg3Delta {
    pub fn resolve(self, lambda: f64, alpha: f64) -> f64 {
        let k = match self {
            Alg3Delta::Fixed(k) => k as f64,
            Alg3Delta::Theoretical { epsilon } => {
                let e = epsilon / (1.0 + alpha);
                ((1.0 + e) / (lambda * e)).ceil()
            }
        };
        let min_k = (2.0 / lambda - 1e-12).ceil();
        1.0 / k.max(min_k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    /// Tour guarantee assumed by the schedules.
    pub alpha: f64,
    /// Proceed directly to the next customer after Case 3.1.
    pub shortcut_case31: bool,
    pub set_cap: usize,
    /// Cu-VRP dispatch uses APPROX.4 for `gamma <= gamma0` and ALG.3 above.
    pub gamma0: f64,
    pub alg3_delta: Alg3Delta,
    pub tour_provider: TourProvider,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            alpha: 1.5,
            shortcut_case31: false,
            set_cap: crate::setcover::DEFAULT_SET_CAP,
            gamma0: 0.285,
            alg3_delta: Alg3Delta::Fixed(3),
            tour_provider: TourProvider::Exact,
        }
    }
}
