//! Fixtures shared by the solver benchmarks.

use cuvrp::model::generate::{generate, DemandFamily, GeneratorSpec, MetricFamily};
use cuvrp::policies::{Randomness, Stream};
use cuvrp::Instance;

/// Seeded Euclidean instance with mixed fixed demands.
pub fn euclidean_instance(n: usize, seed: u64) -> Instance {
    let spec = GeneratorSpec { n, metric: MetricFamily::Euclidean, demands: DemandFamily::Mixed, a: 1.0, b: 1.0 };
    generate(&spec, &mut Randomness::new(seed).stream(Stream::Demand)).expect("generated instance is valid")
}
