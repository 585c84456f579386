//! Cumulative vehicle routing with stochastic demands.
//!
//! The crate is organised around a normalized [`model::Instance`] (capacity 1),
//! policies that serve a demand [`model::Realization`] revealed on arrival, the
//! closed-form ratio analysis, and brute-force and exact-expectation oracles.

pub mod analysis;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod policies;
pub mod setcover;
pub mod tsp;

pub use model::{
    build_instance, cumulative_cost, lower_bound, validate_itinerary, CostBreakdown, DemandProfile,
    DemandSpec, Extended, Instance, InstanceSpec, Itinerary, LowerBoundReport, ModelError,
    Realization, SplitMode, Tour, ValidationReport, Violation,
};
pub use policies::{Plan, Policy, PolicyConfig, PolicyError, PolicyParams, PolicyRun, PolicyTrace, Randomness};
pub use tsp::{TourProvider, TourResult, TspError};
