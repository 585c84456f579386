use super::PolicyError;
use crate::model::{Itinerary, Realization, Tour};

/// Demands are readable only once the vehicle stands at the customer;
/// afterwards the recorded value stays available.
#[derive(Debug, Clone)]
pub struct RevealedDemands<'a> {
    realization: &'a Realization,
    revealed: Vec<bool>,
}

impl<'a> RevealedDemands<'a> {
    pub fn new(realization: &'a Realization) -> Self {
        RevealedDemands { realization, revealed: vec![false; realization.len() + 1] }
    }

    pub fn reveal(&mut self, customer: usize, position: usize) -> Result<f64, PolicyError> {
        if customer != position || customer == 0 || customer >= self.revealed.len() {
            return Err(PolicyError::PrematureRead { customer, position });
        }
        self.revealed[customer] = true;
        Ok(self.realization.demand(customer))
    }

    pub fn recorded(&self, customer: usize) -> Result<f64, PolicyError> {
        if self.revealed.get(customer).copied().unwrap_or(false) {
            Ok(self.realization.demand(customer))
        } else {
            Err(PolicyError::PrematureRead { customer, position: 0 })
        }
    }
}

/// Incrementally records the walk of one vehicle as depot-to-depot tours.
#[derive(Debug, Clone)]
pub(crate) struct Vehicle {
    done: Vec<Tour>,
    vertices: Vec<usize>,
    loads: Vec<f64>,
    deliveries: Vec<f64>,
    load: f64,
}

impl Vehicle {
    pub fn at_depot(load: f64) -> Self {
        Vehicle { done: Vec::new(), vertices: vec![0], loads: Vec::new(), deliveries: vec![0.0], load }
    }

    pub fn position(&self) -> usize {
        *self.vertices.last().expect("walk is never empty")
    }

    pub fn move_to(&mut self, v: usize) {
        self.loads.push(self.load);
        self.vertices.push(v);
        self.deliveries.push(0.0);
    }

    pub fn deliver(&mut self, amount: f64) {
        *self.deliveries.last_mut().expect("at a vertex") += amount;
        self.load = (self.load - amount).max(0.0);
    }

    /// Travels to the depot, closing the current tour.
    pub fn to_depot(&mut self) {
        self.move_to(0);
        let tour = Tour {
            vertices: std::mem::replace(&mut self.vertices, vec![0]),
            loads: std::mem::take(&mut self.loads),
            deliveries: std::mem::replace(&mut self.deliveries, vec![0.0]),
        };
        self.done.push(tour);
    }

    /// Sets the load at the depot.
    pub fn reload(&mut self, load: f64) {
        debug_assert_eq!(self.position(), 0);
        self.load = load;
    }

    pub fn finish(mut self) -> Itinerary {
        if self.position() != 0 || self.vertices.len() > 1 {
            self.to_depot();
        }
        Itinerary::new(self.done)
    }
}
