//! Seeded random instance families.

use super::{DemandSpec, Instance, ModelError};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricFamily {
    /// Uniform points in the unit square, depot included.
    Euclidean,
    /// Points on `[0, 1]` with the depot at 0.
    Line,
    /// Random edge lengths closed under shortest paths.
    RandomMetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DemandFamily {
    /// Fixed demand uniform on `(0, 1]`.
    Uniform,
    /// Fixed demand uniform on `(0, 1/3]`.
    Small,
    /// Fixed demand uniform on `(1/3, 1]`.
    Large,
    /// Each customer independently small, medium or large.
    Mixed,
    /// Two equally likely values, one at most 1/3 and one above.
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n: usize,
    pub metric: MetricFamily,
    pub demands: DemandFamily,
    pub a: f64,
    pub b: f64,
}

pub fn generate<R: Rng + ?Sized>(spec: &GeneratorSpec, rng: &mut R) -> Result<Instance, ModelError> {
    let demands: Vec<DemandSpec> = (0..spec.n).map(|_| sample_demand(spec.demands, rng)).collect();
    match spec.metric {
        MetricFamily::Euclidean => {
            let points: Vec<[f64; 2]> = (0..=spec.n).map(|_| [rng.gen(), rng.gen()]).collect();
            let matrix = points
                .iter()
                .map(|p| points.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).collect())
                .collect();
            Ok(Instance::normalized(matrix, demands, spec.a, spec.b)?.with_points(points))
        }
        MetricFamily::Line => {
            let positions: Vec<f64> = (0..spec.n).map(|_| rng.gen()).collect();
            Instance::on_line(&positions, demands, spec.a, spec.b)
        }
        MetricFamily::RandomMetric => {
            let size = spec.n + 1;
            let mut m = vec![vec![0.0; size]; size];
            for i in 0..size {
                for j in i + 1..size {
                    let w = rng.gen_range(0.1..1.0);
                    m[i][j] = w;
                    m[j][i] = w;
                }
            }
            for k in 0..size {
                for i in 0..size {
                    for j in 0..size {
                        let via = m[i][k] + m[k][j];
                        if via < m[i][j] {
                            m[i][j] = via;
                        }
                    }
                }
            }
            Instance::normalized(m, demands, spec.a, spec.b)
        }
    }
}

fn positive_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    // (lo, hi]: 1 - U with U in [0, 1) lies in (0, 1].
    lo + (hi - lo) * (1.0 - rng.gen::<f64>())
}

fn sample_demand<R: Rng + ?Sized>(family: DemandFamily, rng: &mut R) -> DemandSpec {
    match family {
        DemandFamily::Uniform => DemandSpec::Fixed(positive_uniform(rng, 0.0, 1.0)),
        DemandFamily::Small => DemandSpec::Fixed(positive_uniform(rng, 0.0, 1.0 / 3.0)),
        DemandFamily::Large => DemandSpec::Fixed(positive_uniform(rng, 1.0 / 3.0, 1.0)),
        DemandFamily::Mixed => {
            let (lo, hi) = match rng.gen_range(0..3) {
                0 => (0.0, 1.0 / 3.0),
                1 => (1.0 / 3.0, 2.0 / 3.0),
                _ => (2.0 / 3.0, 1.0),
            };
            DemandSpec::Fixed(positive_uniform(rng, lo, hi))
        }
        DemandFamily::TwoPoint => {
            let low = positive_uniform(rng, 0.0, 1.0 / 3.0);
            let high = positive_uniform(rng, 1.0 / 3.0, 1.0);
            DemandSpec::Discrete(vec![(low, 0.5), (high, 0.5)])
        }
    }
}
