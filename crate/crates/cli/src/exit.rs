//! Exit codes: 2 configuration, 3 infeasible or too large, 4 numerical breakdown.

use cuvrp::analysis::AnalysisError;
use cuvrp::lp::LpError;
use cuvrp::oracle::OracleError;
use cuvrp::setcover::SetCoverError;
use cuvrp::{ModelError, PolicyError, TspError};
use std::fmt;

pub const FAILURE: u8 = 1;
pub const CONFIG: u8 = 2;
pub const INFEASIBLE: u8 = 3;
pub const NUMERICAL: u8 = 4;

/// A bad flag combination or unreadable input.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

fn lp(e: &LpError) -> u8 {
    match e {
        LpError::NumericalBreakdown(_) => NUMERICAL,
        LpError::DimensionMismatch(_) => FAILURE,
    }
}

fn model(e: &ModelError) -> u8 {
    match e {
        ModelError::DemandOutOfRange { .. } => INFEASIBLE,
        ModelError::LoadInconsistency { .. } => FAILURE,
        _ => CONFIG,
    }
}

fn set_cover(e: &SetCoverError) -> u8 {
    match e {
        SetCoverError::Lp(e) => lp(e),
        _ => INFEASIBLE,
    }
}

fn analysis(e: &AnalysisError) -> u8 {
    match e {
        AnalysisError::Lp(e) => lp(e),
        AnalysisError::LpInfeasible { .. } => INFEASIBLE,
        _ => CONFIG,
    }
}

fn tsp(e: &TspError) -> u8 {
    match e {
        TspError::TooLarge { .. } => INFEASIBLE,
    }
}

fn policy(e: &PolicyError) -> u8 {
    match e {
        PolicyError::InfeasibleDemand { .. } => INFEASIBLE,
        PolicyError::InvalidParams(_) | PolicyError::NotDeterministic(_) => CONFIG,
        PolicyError::PrematureRead { .. } => FAILURE,
        PolicyError::Model(e) => model(e),
        PolicyError::Tsp(e) => tsp(e),
        PolicyError::SetCover(e) => set_cover(e),
        PolicyError::Analysis(e) => analysis(e),
    }
}

fn oracle(e: &OracleError) -> u8 {
    match e {
        OracleError::TooLarge { .. } | OracleError::ExplosionGuard { .. } => INFEASIBLE,
        OracleError::Unsupported(_) => CONFIG,
        OracleError::Policy(e) => policy(e),
        OracleError::Model(e) => model(e),
        OracleError::SetCover(e) => set_cover(e),
    }
}

pub fn code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return CONFIG;
        }
        let found = cause
            .downcast_ref::<OracleError>()
            .map(oracle)
            .or_else(|| cause.downcast_ref::<PolicyError>().map(policy))
            .or_else(|| cause.downcast_ref::<AnalysisError>().map(analysis))
            .or_else(|| cause.downcast_ref::<SetCoverError>().map(set_cover))
            .or_else(|| cause.downcast_ref::<ModelError>().map(model))
            .or_else(|| cause.downcast_ref::<TspError>().map(tsp))
            .or_else(|| cause.downcast_ref::<LpError>().map(lp));
        if let Some(c) = found {
            return c;
        }
    }
    FAILURE
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_errors_keep_their_class() {
        let e = anyhow::Error::new(OracleError::Policy(PolicyError::Analysis(AnalysisError::Lp(
            LpError::NumericalBreakdown("x".into()),
        ))));
        assert_eq!(code(&e), NUMERICAL);
        assert_eq!(code(&anyhow::Error::new(AnalysisError::InvalidN(301))), CONFIG);
        assert_eq!(code(&config("missing seed").context("run")), CONFIG);
        assert_eq!(code(&anyhow::anyhow!("other")), FAILURE);
    }
}
