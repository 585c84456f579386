use super::alg1::{alg1, alg1_lambda0, alg2, alg_s, Alg1Options};
use super::cuvrp::{alg3, alg4, optimal_partition_dp, record_then_solve};
use super::rng::{Randomness, Stream};
use super::trace::PolicyTrace;
use super::{PolicyConfig, PolicyError};
use crate::analysis::{self, Approx4Regime, CUVRPSD_CROSSOVER};
use crate::model::{cumulative_cost, CostBreakdown, Extended, Instance, Itinerary, Realization, SplitMode};
use crate::tsp::TourResult;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A base policy with concrete parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "arm", rename_all = "kebab-case")]
pub enum Arm {
    Alg1 { lambda: f64, delta: f64 },
    Alg1Lambda0,
    Alg2 { lambda: f64, delta: f64 },
    AlgS { lambda: f64 },
    Alg3 { lambda: f64, delta: f64 },
    Alg4 { lambda: f64 },
    OptimalPartition,
    RecordThenSolve { solver: Box<Arm> },
}

impl Arm {
    pub fn split_mode(&self) -> SplitMode {
        match self {
            Arm::AlgS { .. } | Arm::OptimalPartition => SplitMode::Splittable,
            Arm::RecordThenSolve { solver } => solver.split_mode(),
            _ => SplitMode::Unsplittable,
        }
    }

    /// True when the arm reads demands in advance.
    pub fn needs_known_demands(&self) -> bool {
        matches!(self, Arm::Alg3 { .. } | Arm::Alg4 { .. } | Arm::OptimalPartition)
    }

    pub fn run(
        &self,
        instance: &Instance,
        realization: &Realization,
        order: &[usize],
        config: &PolicyConfig,
        randomness: &Randomness,
    ) -> Result<(Itinerary, PolicyTrace), PolicyError> {
        let mut initial = randomness.stream(Stream::InitialLoad);
        let options = Alg1Options { shortcut_case31: config.shortcut_case31, skip_above: None };
        let known = |name: &'static str| -> Result<(), PolicyError> {
            match instance.fixed_realization() {
                Some(fixed) if fixed == *realization => Ok(()),
                _ => Err(PolicyError::NotDeterministic(name)),
            }
        };
        match self {
            Arm::Alg1 { lambda, delta } => alg1(instance, realization, order, *lambda, *delta, options, &mut initial),
            Arm::Alg1Lambda0 => alg1_lambda0(instance, realization, order),
            Arm::Alg2 { lambda, delta } => {
                alg2(instance, realization, order, *lambda, *delta, config.set_cap, &mut initial)
            }
            Arm::AlgS { lambda } => alg_s(instance, realization, order, *lambda, &mut initial),
            Arm::Alg3 { lambda, delta } => {
                known("alg3")?;
                let mut rounding = randomness.stream(Stream::Rounding);
                alg3(instance, order, *lambda, *delta, config.set_cap, &mut rounding, &mut initial)
            }
            Arm::Alg4 { lambda } => {
                known("alg4")?;
                alg4(instance, order, *lambda, &mut initial)
            }
            Arm::OptimalPartition => {
                known("optimal-partition")?;
                optimal_partition_dp(instance, realization, order)
            }
            Arm::RecordThenSolve { solver } => record_then_solve(instance, realization, order, |recorded| {
                let fixed = recorded.fixed_realization().expect("recorded demands are fixed");
                solver.run(recorded, &fixed, order, config, randomness)
            }),
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arm::Alg1 { lambda, delta } => write!(f, "alg1({lambda}, {delta})"),
            Arm::Alg1Lambda0 => write!(f, "alg1(0)"),
            Arm::Alg2 { lambda, delta } => write!(f, "alg2({lambda}, {delta})"),
            Arm::AlgS { lambda } => write!(f, "alg-s({lambda})"),
            Arm::Alg3 { lambda, delta } => write!(f, "alg3({lambda}, {delta})"),
            Arm::Alg4 { lambda } => write!(f, "alg4({lambda})"),
            Arm::OptimalPartition => write!(f, "optimal-partition"),
            Arm::RecordThenSolve { solver } => write!(f, "record-then-{solver}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanArm {
    pub probability: f64,
    pub arm: Arm,
}

/// The arms a policy resolves to on an instance, with their probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub policy: String,
    pub arms: Vec<PlanArm>,
    pub schedule: Option<analysis::Schedule>,
}

impl Plan {
    fn single(policy: &str, arm: Arm) -> Plan {
        Plan { policy: policy.into(), arms: vec![PlanArm { probability: 1.0, arm }], schedule: None }
    }

    fn mixture(policy: &str, p: f64, first: Arm, second: Arm, schedule: Option<analysis::Schedule>) -> Plan {
        let mut arms = vec![PlanArm { probability: p, arm: first }];
        if p < 1.0 {
            arms.push(PlanArm { probability: 1.0 - p, arm: second });
        }
        Plan { policy: policy.into(), arms, schedule }
    }

    /// Index of the arm picked by a uniform draw `u` in `[0, 1)`.
    pub fn pick(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, a) in self.arms.iter().enumerate() {
            acc += a.probability;
            if u < acc {
                return i;
            }
        }
        self.arms.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum Policy {
    Alg1 { lambda: f64, delta: f64 },
    Alg1Lambda0,
    Alg2 { lambda: f64, delta: f64 },
    AlgS { lambda: f64 },
    Alg3 { lambda: f64, delta: f64 },
    Alg4 { lambda: f64 },
    Approx1,
    Approx2,
    Approx4 { regime: Approx4Regime },
    ApproxS,
    /// Unsplittable Cu-VRPSD.
    Dispatch,
    /// Unsplittable Cu-VRP with known demands.
    DispatchCuvrp,
    OptimalPartition,
    RecordThenSolve { solver: Box<Policy> },
}

impl Policy {
    pub fn name(&self) -> String {
        match self {
            Policy::Alg1 { .. } => "alg1".into(),
            Policy::Alg1Lambda0 => "alg1-lambda0".into(),
            Policy::Alg2 { .. } => "alg2".into(),
            Policy::AlgS { .. } => "alg-s".into(),
            Policy::Alg3 { .. } => "alg3".into(),
            Policy::Alg4 { .. } => "alg4".into(),
            Policy::Approx1 => "approx1".into(),
            Policy::Approx2 => "approx2".into(),
            Policy::Approx4 { .. } => "approx4".into(),
            Policy::ApproxS => "approx-s".into(),
            Policy::Dispatch => "dispatch".into(),
            Policy::DispatchCuvrp => "dispatch-cuvrp".into(),
            Policy::OptimalPartition => "optimal-partition".into(),
            Policy::RecordThenSolve { solver } => format!("record-then-{}", solver.name()),
        }
    }

    pub fn plan(&self, instance: &Instance, config: &PolicyConfig) -> Result<Plan, PolicyError> {
        let gamma = instance.gamma();
        let alpha = config.alpha;
        let name = self.name();
        let plan = match self {
            Policy::Alg1 { lambda, delta } => Plan::single(&name, Arm::Alg1 { lambda: *lambda, delta: *delta }),
            Policy::Alg1Lambda0 => Plan::single(&name, Arm::Alg1Lambda0),
            Policy::Alg2 { lambda, delta } => Plan::single(&name, Arm::Alg2 { lambda: *lambda, delta: *delta }),
            Policy::AlgS { lambda } => Plan::single(&name, Arm::AlgS { lambda: *lambda }),
            Policy::Alg3 { lambda, delta } => Plan::single(&name, Arm::Alg3 { lambda: *lambda, delta: *delta }),
            Policy::Alg4 { lambda } => Plan::single(&name, Arm::Alg4 { lambda: *lambda }),
            Policy::OptimalPartition => Plan::single(&name, Arm::OptimalPartition),
            Policy::Approx1 => approx1_plan(&name, gamma, alpha)?,
            Policy::Approx2 => approx2_plan(&name),
            Policy::Approx4 { regime } => approx4_plan(&name, gamma, alpha, *regime)?,
            Policy::ApproxS => {
                if instance.a() == 0.0 {
                    Plan::single(&name, Arm::Alg1Lambda0)
                } else {
                    Plan::single(&name, Arm::AlgS { lambda: analysis::alg_s_lambda(gamma, alpha)? })
                }
            }
            Policy::Dispatch => {
                if instance.a() == 0.0 {
                    Plan::single(&name, Arm::Alg1Lambda0)
                } else if gamma.le(CUVRPSD_CROSSOVER) {
                    approx1_plan(&name, gamma, alpha)?
                } else {
                    approx2_plan(&name)
                }
            }
            Policy::DispatchCuvrp => {
                if instance.a() == 0.0 {
                    Plan::single(&name, Arm::Alg1Lambda0)
                } else if gamma.le(config.gamma0) {
                    approx4_plan(&name, gamma, alpha, Approx4Regime::AlphaParametric)?
                } else {
                    let lambda = analysis::alg_s_lambda(gamma, alpha)?;
                    let delta = config.alg3_delta.resolve(lambda, alpha);
                    Plan::single(&name, Arm::Alg3 { lambda, delta })
                }
            }
            Policy::RecordThenSolve { solver } => {
                let mut plan = solver.plan(instance, config)?;
                plan.policy = name;
                for a in &mut plan.arms {
                    a.arm = Arm::RecordThenSolve { solver: Box::new(a.arm.clone()) };
                }
                plan
            }
        };
        Ok(plan)
    }

    /// Resolves the plan, flips the coin and runs the chosen arm along the tour.
    pub fn run(
        &self,
        instance: &Instance,
        realization: &Realization,
        tour: &TourResult,
        config: &PolicyConfig,
        randomness: &Randomness,
    ) -> Result<PolicyRun, PolicyError> {
        let plan = self.plan(instance, config)?;
        let arm_index = if plan.arms.len() > 1 { plan.pick(randomness.stream(Stream::Coin).gen()) } else { 0 };
        let arm = plan.arms[arm_index].arm.clone();
        let order = tour.customer_order();
        let (itinerary, mut trace) = arm.run(instance, realization, &order, config, randomness)?;
        if plan.arms.len() > 1 {
            trace.coin = Some(arm_index);
        }
        let cost = cumulative_cost(&itinerary, instance)?;
        log::debug!("{} ran arm {} with cost {}", plan.policy, arm, cost.total);
        Ok(PolicyRun { mode: arm.split_mode(), plan, arm_index, arm, itinerary, trace, cost })
    }
}

fn approx1_plan(name: &str, gamma: Extended, alpha: f64) -> Result<Plan, PolicyError> {
    let s = analysis::approx1_schedule(gamma, alpha)?;
    Ok(Plan::mixture(
        name,
        s.p,
        Arm::Alg1 { lambda: s.lambda, delta: 0.0 },
        Arm::Alg1 { lambda: s.theta * s.lambda, delta: 0.0 },
        Some(s),
    ))
}

fn approx2_plan(name: &str) -> Plan {
    let third = 1.0 / 3.0;
    Plan::mixture(name, 0.5, Arm::Alg1 { lambda: 1.0, delta: third }, Arm::Alg2 { lambda: 1.0, delta: third }, None)
}

fn approx4_plan(name: &str, gamma: Extended, alpha: f64, regime: Approx4Regime) -> Result<Plan, PolicyError> {
    let s = analysis::approx4_schedule(gamma, alpha, regime)?;
    Ok(Plan::mixture(name, s.p, Arm::Alg4 { lambda: s.lambda }, Arm::Alg4 { lambda: s.theta * s.lambda }, Some(s)))
}

impl FromStr for Policy {
    type Err = PolicyError;

    /// Parameter-free names; parameterized policies use their defaults
    /// (`lambda = 1`, `delta = 1/3` or 0).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let third = 1.0 / 3.0;
        Ok(match s {
            "alg1" => Policy::Alg1 { lambda: 1.0, delta: 0.0 },
            "alg1-lambda0" => Policy::Alg1Lambda0,
            "alg2" => Policy::Alg2 { lambda: 1.0, delta: third },
            "alg-s" => Policy::AlgS { lambda: 1.0 },
            "alg3" => Policy::Alg3 { lambda: 1.0, delta: third },
            "alg4" => Policy::Alg4 { lambda: 1.0 },
            "approx1" => Policy::Approx1,
            "approx2" => Policy::Approx2,
            "approx4" => Policy::Approx4 { regime: Approx4Regime::AlphaParametric },
            "approx4-tight" => Policy::Approx4 { regime: Approx4Regime::Tight },
            "approx-s" => Policy::ApproxS,
            "dispatch" => Policy::Dispatch,
            "dispatch-cuvrp" => Policy::DispatchCuvrp,
            "optimal-partition" => Policy::OptimalPartition,
            other => {
                if let Some(inner) = other.strip_prefix("record-then-") {
                    Policy::RecordThenSolve { solver: Box::new(inner.parse()?) }
                } else {
                    return Err(PolicyError::InvalidParams(format!("unknown policy {other}")));
                }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRun {
    pub plan: Plan,
    pub arm_index: usize,
    pub arm: Arm,
    pub mode: SplitMode,
    pub itinerary: Itinerary,
    pub trace: PolicyTrace,
    pub cost: CostBreakdown,
}
