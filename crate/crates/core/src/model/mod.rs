mod bounds;
mod extended;
pub mod generate;
mod instance;
mod itinerary;

pub use bounds::{lower_bound, DemandProfile, LowerBoundReport};
pub use extended::Extended;
pub use instance::{build_instance, DemandInput, DemandSpec, Instance, InstanceSpec, Realization};
pub use itinerary::{
    cumulative_cost, validate_itinerary, CostBreakdown, Itinerary, SplitMode, Tour,
    ValidationReport, Violation,
};

/// Absolute tolerance for metric and load checks.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("triangle inequality violated: w({i},{j}) = {direct} > w({i},{k}) + w({k},{j}) = {detour}")]
    MetricViolation {
        i: usize,
        j: usize,
        k: usize,
        direct: f64,
        detour: f64,
    },
    #[error("distance matrix is not a valid metric: {0}")]
    InvalidMatrix(String),
    #[error("demand {value} of customer {customer} outside [0, {capacity}]")]
    DemandOutOfRange {
        customer: usize,
        value: f64,
        capacity: f64,
    },
    #[error("invalid demand distribution for customer {customer}: {reason}")]
    InvalidDistribution { customer: usize, reason: String },
    #[error("cost parameters a and b are both zero")]
    BothCostParamsZero,
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("expected {expected} {what}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("tour {tour}: load inconsistency at position {position}: {detail}")]
    LoadInconsistency {
        tour: usize,
        position: usize,
        detail: String,
    },
    #[error("demand profile is undefined when eta = 0")]
    EtaZero,
}
