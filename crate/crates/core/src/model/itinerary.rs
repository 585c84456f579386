use super::{Instance, ModelError, Realization, TOLERANCE};
use serde::{Deserialize, Serialize};
use std::ops::Add;

/// A closed walk from the depot back to the depot with per-edge loads.
///
/// `loads[k]` is carried on the edge `vertices[k] -> vertices[k+1]`, and
/// `deliveries[k]` is dropped at `vertices[k]` (always 0 at the depot ends).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub vertices: Vec<usize>,
    pub loads: Vec<f64>,
    pub deliveries: Vec<f64>,
}

impl Tour {
    /// Tour that departs with exactly what it delivers along `stops`.
    pub fn serving(stops: &[(usize, f64)]) -> Tour {
        let mut vertices = Vec::with_capacity(stops.len() + 2);
        let mut deliveries = Vec::with_capacity(stops.len() + 2);
        vertices.push(0);
        deliveries.push(0.0);
        for &(v, amount) in stops {
            vertices.push(v);
            deliveries.push(amount);
        }
        vertices.push(0);
        deliveries.push(0.0);
        let mut tour = Tour { loads: vec![0.0; vertices.len() - 1], vertices, deliveries };
        tour.trim();
        tour
    }

    /// Resets loads so the vehicle departs with exactly the delivered total.
    pub fn trim(&mut self) {
        let mut remaining: f64 = self.deliveries.iter().sum();
        for k in 0..self.loads.len() {
            remaining -= self.deliveries[k];
            if remaining < 0.0 {
                remaining = 0.0;
            }
            self.loads[k] = remaining;
        }
    }

    pub fn trimmed(&self) -> Tour {
        let mut t = self.clone();
        t.trim();
        t
    }

    /// The same stops in the opposite direction, trimmed.
    pub fn reversed(&self) -> Tour {
        let stops: Vec<(usize, f64)> = self.stops().into_iter().rev().collect();
        Tour::serving(&stops)
    }

    /// Interior `(vertex, delivered)` pairs in visiting order.
    pub fn stops(&self) -> Vec<(usize, f64)> {
        let last = self.vertices.len().saturating_sub(1);
        (1..last).map(|k| (self.vertices[k], self.deliveries[k])).collect()
    }

    pub fn delivered(&self) -> f64 {
        self.deliveries.iter().sum()
    }

    pub fn load_out(&self) -> f64 {
        self.loads.first().copied().unwrap_or(0.0)
    }

    pub fn weight(&self, instance: &Instance) -> f64 {
        self.vertices.windows(2).map(|e| instance.dist(e[0], e[1])).sum()
    }

    pub fn cost(&self, instance: &Instance) -> CostBreakdown {
        let mut distance = 0.0;
        let mut load_distance = 0.0;
        for (k, e) in self.vertices.windows(2).enumerate() {
            let w = instance.dist(e[0], e[1]);
            distance += w;
            load_distance += self.loads[k] * w;
        }
        CostBreakdown::new(instance.a() * distance, instance.b() * load_distance)
    }

    fn check(&self, index: usize, instance: &Instance) -> Result<(), ModelError> {
        let fail = |position: usize, detail: String| ModelError::LoadInconsistency {
            tour: index,
            position,
            detail,
        };
        let len = self.vertices.len();
        if len < 2 || self.loads.len() != len - 1 || self.deliveries.len() != len {
            return Err(fail(0, "malformed tour arrays".into()));
        }
        if self.vertices[0] != 0 || self.vertices[len - 1] != 0 {
            return Err(fail(0, "tour must start and end at the depot".into()));
        }
        for k in 1..len - 1 {
            let v = self.vertices[k];
            if v == 0 || v > instance.n() {
                return Err(fail(k, format!("interior vertex {v} is not a customer")));
            }
            let expected = self.loads[k - 1] - self.deliveries[k];
            if (expected - self.loads[k]).abs() > TOLERANCE {
                return Err(fail(
                    k,
                    format!("load {} after delivering {} from {}", self.loads[k], self.deliveries[k], self.loads[k - 1]),
                ));
            }
        }
        if self.deliveries[0] != 0.0 || self.deliveries[len - 1] != 0.0 {
            return Err(fail(0, "deliveries at the depot".into()));
        }
        if self.deliveries.iter().chain(self.loads.iter()).any(|x| !x.is_finite() || *x < -TOLERANCE) {
            return Err(fail(0, "negative or non-finite load".into()));
        }
        Ok(())
    }
}

/// An ordered set of tours.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Itinerary {
    pub tours: Vec<Tour>,
}

impl Itinerary {
    pub fn new(tours: Vec<Tour>) -> Self {
        Itinerary { tours }
    }

    pub fn extend(&mut self, other: Itinerary) {
        self.tours.extend(other.tours);
    }

    pub fn concat(mut self, other: Itinerary) -> Itinerary {
        self.extend(other);
        self
    }

    /// Total delivered per customer vertex (index 0 unused).
    pub fn delivered_by_customer(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n + 1];
        for tour in &self.tours {
            for (v, amount) in tour.stops() {
                out[v] += amount;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub vehicle_cost: f64,
    pub cargo_cost: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(vehicle_cost: f64, cargo_cost: f64) -> Self {
        CostBreakdown { vehicle_cost, cargo_cost, total: vehicle_cost + cargo_cost }
    }
}

impl Add for CostBreakdown {
    type Output = CostBreakdown;

    fn add(self, rhs: CostBreakdown) -> CostBreakdown {
        CostBreakdown::new(self.vehicle_cost + rhs.vehicle_cost, self.cargo_cost + rhs.cargo_cost)
    }
}

/// Vehicle cost `a * sum w(e)` plus cargo cost `b * sum x_e w(e)` over all tours.
pub fn cumulative_cost(itinerary: &Itinerary, instance: &Instance) -> Result<CostBreakdown, ModelError> {
    let mut vehicle = 0.0;
    let mut cargo = 0.0;
    for (index, tour) in itinerary.tours.iter().enumerate() {
        tour.check(index, instance)?;
        let c = tour.cost(instance);
        vehicle += c.vehicle_cost;
        cargo += c.cargo_cost;
    }
    Ok(CostBreakdown::new(vehicle, cargo))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Splittable,
    Unsplittable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Violation {
    Capacity { tour: usize, edge: usize, load: f64 },
    LoadInconsistency { tour: usize, detail: String },
    UnmetDemand { customer: usize, delivered: f64, demand: f64 },
    OverDelivery { customer: usize, delivered: f64, demand: f64 },
    SplitViolation { customer: usize, tours: Vec<usize> },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks capacity, load consistency and demand satisfaction in the given mode.
pub fn validate_itinerary(
    itinerary: &Itinerary,
    instance: &Instance,
    realization: &Realization,
    mode: SplitMode,
) -> ValidationReport {
    let n = instance.n();
    let mut violations = Vec::new();
    let mut serving_tours: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    for (index, tour) in itinerary.tours.iter().enumerate() {
        if let Err(e) = tour.check(index, instance) {
            violations.push(Violation::LoadInconsistency { tour: index, detail: e.to_string() });
            continue;
        }
        for (edge, &load) in tour.loads.iter().enumerate() {
            if load > 1.0 + TOLERANCE {
                violations.push(Violation::Capacity { tour: index, edge, load });
            }
        }
        for (v, amount) in tour.stops() {
            if amount > TOLERANCE && serving_tours[v].last() != Some(&index) {
                serving_tours[v].push(index);
            }
        }
    }
    let delivered = itinerary.delivered_by_customer(n);
    for v in 1..=n.min(realization.len()) {
        let demand = realization.demand(v);
        if delivered[v] < demand - TOLERANCE {
            violations.push(Violation::UnmetDemand { customer: v, delivered: delivered[v], demand });
        } else if delivered[v] > demand + TOLERANCE {
            violations.push(Violation::OverDelivery { customer: v, delivered: delivered[v], demand });
        }
        if mode == SplitMode::Unsplittable && serving_tours[v].len() > 1 {
            violations.push(Violation::SplitViolation { customer: v, tours: serving_tours[v].clone() });
        }
    }
    ValidationReport { violations }
}
