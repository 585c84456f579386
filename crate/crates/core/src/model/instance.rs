use super::{Extended, ModelError, TOLERANCE};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Distribution of one customer's demand, in units of the vehicle capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DemandSpec {
    Fixed(f64),
    /// `(value, probability)` pairs.
    Discrete(Vec<(f64, f64)>),
}

impl DemandSpec {
    pub fn support(&self) -> Vec<(f64, f64)> {
        match self {
            DemandSpec::Fixed(v) => vec![(*v, 1.0)],
            DemandSpec::Discrete(pairs) => pairs.clone(),
        }
    }

    pub fn is_fixed(&self) -> bool {
        match self {
            DemandSpec::Fixed(_) => true,
            DemandSpec::Discrete(pairs) => pairs.iter().filter(|(_, p)| *p > 0.0).count() <= 1,
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        self.support().iter().all(|&(v, p)| v == 0.0 || p == 0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.support()
            .iter()
            .filter(|(_, p)| *p > 0.0)
            .map(|(v, _)| *v)
            .fold(0.0, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.support().iter().map(|(v, p)| v * p).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            DemandSpec::Fixed(v) => *v,
            DemandSpec::Discrete(pairs) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for &(v, p) in pairs {
                    acc += p;
                    if u < acc {
                        return v;
                    }
                }
                pairs.iter().rev().find(|(_, p)| *p > 0.0).map(|(v, _)| *v).unwrap_or(0.0)
            }
        }
    }

    fn scaled(&self, factor: f64) -> DemandSpec {
        match self {
            DemandSpec::Fixed(v) => DemandSpec::Fixed(v * factor),
            DemandSpec::Discrete(pairs) => {
                DemandSpec::Discrete(pairs.iter().map(|&(v, p)| (v * factor, p)).collect())
            }
        }
    }
}

/// Demand entry of the instance JSON: a number or a `{values, probs}` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DemandInput {
    Fixed(f64),
    Discrete { values: Vec<f64>, probs: Vec<f64> },
}

/// Raw instance as read from JSON. Vertex 0 is the depot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<f64>>>,
    pub demands: Vec<DemandInput>,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "Q", default = "unit_capacity")]
    pub capacity: f64,
}

fn unit_capacity() -> f64 {
    1.0
}

/// A metric instance normalized to unit capacity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    size: usize,
    weights: Vec<f64>,
    demands: Vec<DemandSpec>,
    a: f64,
    b: f64,
    capacity: f64,
    points: Option<Vec<[f64; 2]>>,
}

/// One concrete demand vector, indexed by customer vertex `1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    values: Vec<f64>,
}

impl Realization {
    pub fn new(values: Vec<f64>) -> Self {
        Realization { values }
    }

    /// Demand of customer vertex `v >= 1`.
    pub fn demand(&self, v: usize) -> f64 {
        self.values[v - 1]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Builds an instance from its JSON form: computes Euclidean distances when
/// points are given, validates the metric, drops identically-zero customers and
/// normalizes to unit capacity.
pub fn build_instance(spec: &InstanceSpec) -> Result<Instance, ModelError> {
    let q = spec.capacity;
    if !(q.is_finite() && q > 0.0) {
        return Err(ModelError::InvalidParameter { name: "Q", value: q });
    }
    let (matrix, points) = match (&spec.points, &spec.matrix) {
        (Some(pts), None) => (euclidean_matrix(pts), Some(pts.clone())),
        (None, Some(m)) => (m.clone(), None),
        (Some(_), Some(_)) => {
            return Err(ModelError::InvalidMatrix("give either points or matrix, not both".into()))
        }
        (None, None) => return Err(ModelError::InvalidMatrix("missing points or matrix".into())),
    };
    let mut demands = Vec::with_capacity(spec.demands.len());
    for (idx, input) in spec.demands.iter().enumerate() {
        demands.push(demand_from_input(input, idx + 1)?);
    }
    let mut instance =
        Instance::from_matrix(matrix, demands, spec.a, spec.b * q, q).map_err(|e| match e {
            ModelError::DemandOutOfRange { customer, value, .. } => ModelError::DemandOutOfRange {
                customer,
                value,
                capacity: q,
            },
            other => other,
        })?;
    if let Some(pts) = points {
        instance.points = Some(pts);
    }
    Ok(instance.without_zero_customers())
}

fn demand_from_input(input: &DemandInput, customer: usize) -> Result<DemandSpec, ModelError> {
    match input {
        DemandInput::Fixed(v) => Ok(DemandSpec::Fixed(*v)),
        DemandInput::Discrete { values, probs } => {
            if values.len() != probs.len() || values.is_empty() {
                return Err(ModelError::InvalidDistribution {
                    customer,
                    reason: format!("{} values but {} probabilities", values.len(), probs.len()),
                });
            }
            Ok(DemandSpec::Discrete(values.iter().copied().zip(probs.iter().copied()).collect()))
        }
    }
}

fn euclidean_matrix(points: &[[f64; 2]]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| points.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).collect())
        .collect()
}

impl Instance {
    /// Builds an instance from a full `(n+1) x (n+1)` matrix and demand specs
    /// given in raw units with capacity `capacity`; `b` must already be scaled
    /// by the capacity. Zero-demand customers are kept.
    pub fn from_matrix(
        matrix: Vec<Vec<f64>>,
        demands: Vec<DemandSpec>,
        a: f64,
        b: f64,
        capacity: f64,
    ) -> Result<Instance, ModelError> {
        let size = matrix.len();
        if size == 0 {
            return Err(ModelError::InvalidMatrix("matrix must contain the depot".into()));
        }
        if demands.len() + 1 != size {
            return Err(ModelError::DimensionMismatch {
                what: "demand entries",
                expected: size - 1,
                found: demands.len(),
            });
        }
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != size {
                return Err(ModelError::DimensionMismatch {
                    what: "matrix columns",
                    expected: size,
                    found: row.len(),
                });
            }
            for (j, &w) in row.iter().enumerate() {
                if !w.is_finite() || w < 0.0 {
                    return Err(ModelError::InvalidMatrix(format!("w({i},{j}) = {w}")));
                }
                if (w - matrix[j][i]).abs() > TOLERANCE {
                    return Err(ModelError::InvalidMatrix(format!("w({i},{j}) != w({j},{i})")));
                }
            }
            if row[i] != 0.0 {
                return Err(ModelError::InvalidMatrix(format!("w({i},{i}) = {}", row[i])));
            }
        }
        for i in 0..size {
            for j in 0..size {
                for k in 0..size {
                    let detour = matrix[i][k] + matrix[k][j];
                    if matrix[i][j] > detour + TOLERANCE {
                        return Err(ModelError::MetricViolation {
                            i,
                            j,
                            k,
                            direct: matrix[i][j],
                            detour,
                        });
                    }
                }
            }
        }
        if !(a.is_finite() && a >= 0.0) {
            return Err(ModelError::InvalidParameter { name: "a", value: a });
        }
        if !(b.is_finite() && b >= 0.0) {
            return Err(ModelError::InvalidParameter { name: "b", value: b });
        }
        if a == 0.0 && b == 0.0 {
            return Err(ModelError::BothCostParamsZero);
        }
        let mut normalized = Vec::with_capacity(demands.len());
        for (idx, spec) in demands.iter().enumerate() {
            let customer = idx + 1;
            for (v, p) in spec.support() {
                if !(v.is_finite() && (0.0..=capacity).contains(&v)) {
                    return Err(ModelError::DemandOutOfRange { customer, value: v, capacity });
                }
                if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                    return Err(ModelError::InvalidDistribution {
                        customer,
                        reason: format!("probability {p}"),
                    });
                }
            }
            if let DemandSpec::Discrete(pairs) = spec {
                let total: f64 = pairs.iter().map(|(_, p)| p).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(ModelError::InvalidDistribution {
                        customer,
                        reason: format!("probabilities sum to {total}"),
                    });
                }
            }
            normalized.push(spec.scaled(1.0 / capacity));
        }
        Ok(Instance {
            size,
            weights: matrix.into_iter().flatten().collect(),
            demands: normalized,
            a,
            b,
            capacity,
            points: None,
        })
    }

    /// Convenience constructor for already-normalized data (capacity 1).
    pub fn normalized(
        matrix: Vec<Vec<f64>>,
        demands: Vec<DemandSpec>,
        a: f64,
        b: f64,
    ) -> Result<Instance, ModelError> {
        Instance::from_matrix(matrix, demands, a, b, 1.0)
    }

    /// Instance on the real line with the depot at 0 and customers at `positions`.
    pub fn on_line(
        positions: &[f64],
        demands: Vec<DemandSpec>,
        a: f64,
        b: f64,
    ) -> Result<Instance, ModelError> {
        let coords: Vec<f64> = std::iter::once(0.0).chain(positions.iter().copied()).collect();
        let matrix = coords.iter().map(|x| coords.iter().map(|y| (x - y).abs()).collect()).collect();
        Instance::normalized(matrix, demands, a, b)
    }

    pub(crate) fn with_points(mut self, points: Vec<[f64; 2]>) -> Self {
        self.points = Some(points);
        self
    }

    fn without_zero_customers(self) -> Instance {
        let keep: Vec<usize> = (1..self.size)
            .filter(|&v| {
                let zero = self.demands[v - 1].is_identically_zero();
                if zero {
                    log::warn!("dropping customer {v}: demand is identically zero");
                }
                !zero
            })
            .collect();
        if keep.len() + 1 == self.size {
            return self;
        }
        let vertices: Vec<usize> = std::iter::once(0).chain(keep.iter().copied()).collect();
        let size = vertices.len();
        let mut weights = Vec::with_capacity(size * size);
        for &i in &vertices {
            for &j in &vertices {
                weights.push(self.dist(i, j));
            }
        }
        Instance {
            size,
            weights,
            demands: keep.iter().map(|&v| self.demands[v - 1].clone()).collect(),
            a: self.a,
            b: self.b,
            capacity: self.capacity,
            points: self.points.map(|pts| vertices.iter().map(|&v| pts[v]).collect()),
        }
    }

    /// Number of customers.
    pub fn n(&self) -> usize {
        self.size - 1
    }

    pub fn customers(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.size + j]
    }

    /// Distance from the depot, `l_i = w(v_0, v_i)`.
    pub fn radial(&self, v: usize) -> f64 {
        self.dist(0, v)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// Per-unit cargo coefficient after normalization.
    pub fn b(&self) -> f64 {
        self.b
    }

    /// Original capacity before normalization.
    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn gamma(&self) -> Extended {
        Extended::ratio(self.a, self.b)
    }

    pub fn demand_spec(&self, v: usize) -> &DemandSpec {
        &self.demands[v - 1]
    }

    pub fn demand_specs(&self) -> &[DemandSpec] {
        &self.demands
    }

    pub fn points(&self) -> Option<&[[f64; 2]]> {
        self.points.as_deref()
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.weights.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    pub fn is_deterministic(&self) -> bool {
        self.demands.iter().all(DemandSpec::is_fixed)
    }

    /// The realization of a deterministic instance.
    pub fn fixed_realization(&self) -> Option<Realization> {
        if !self.is_deterministic() {
            return None;
        }
        Some(Realization::new(self.demands.iter().map(DemandSpec::max_value).collect()))
    }

    pub fn sample_realization<R: Rng + ?Sized>(&self, rng: &mut R) -> Realization {
        Realization::new(self.demands.iter().map(|d| d.sample(rng)).collect())
    }

    /// Same metric and costs with demands fixed to `realization`.
    pub fn with_fixed_demands(&self, realization: &Realization) -> Instance {
        Instance {
            demands: realization.values().iter().map(|&d| DemandSpec::Fixed(d)).collect(),
            ..self.clone()
        }
    }

    /// Same metric and demands with different cost coefficients (normalized units).
    pub fn with_costs(&self, a: f64, b: f64) -> Result<Instance, ModelError> {
        if a == 0.0 && b == 0.0 {
            return Err(ModelError::BothCostParamsZero);
        }
        Ok(Instance { a, b, ..self.clone() })
    }

    /// Checks that a realization is attainable under the demand specs.
    pub fn check_realization(&self, realization: &Realization) -> Result<(), ModelError> {
        if realization.len() != self.n() {
            return Err(ModelError::DimensionMismatch {
                what: "realized demands",
                expected: self.n(),
                found: realization.len(),
            });
        }
        for v in self.customers() {
            let d = realization.demand(v);
            if !(d.is_finite() && (0.0..=1.0 + TOLERANCE).contains(&d)) {
                return Err(ModelError::DemandOutOfRange { customer: v, value: d, capacity: 1.0 });
            }
        }
        Ok(())
    }

    /// JSON form in normalized units (capacity 1).
    pub fn to_spec(&self) -> InstanceSpec {
        let demands = self
            .demands
            .iter()
            .map(|d| match d {
                DemandSpec::Fixed(v) => DemandInput::Fixed(*v),
                DemandSpec::Discrete(pairs) => DemandInput::Discrete {
                    values: pairs.iter().map(|p| p.0).collect(),
                    probs: pairs.iter().map(|p| p.1).collect(),
                },
            })
            .collect();
        let (points, matrix) = match &self.points {
            Some(p) => (Some(p.clone()), None),
            None => (None, Some(self.matrix())),
        };
        InstanceSpec { points, matrix, demands, a: self.a, b: self.b, capacity: 1.0 }
    }
}
