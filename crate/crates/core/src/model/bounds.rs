use super::{Extended, Instance, ModelError, Realization};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub tau: f64,
    pub eta: f64,
    pub gamma: Extended,
    pub sigma: Extended,
    pub lb: f64,
}

/// `LB = a * max(tau, eta) + b * eta / 2` with `eta = sum 2 d_i l_i`.
pub fn lower_bound(instance: &Instance, realization: &Realization, tau: f64) -> LowerBoundReport {
    let eta = radial_load(instance, realization);
    LowerBoundReport {
        tau,
        eta,
        gamma: instance.gamma(),
        sigma: Extended::ratio(tau, eta),
        lb: instance.a() * tau.max(eta) + instance.b() * 0.5 * eta,
    }
}

fn radial_load(instance: &Instance, realization: &Realization) -> f64 {
    instance.customers().map(|v| 2.0 * realization.demand(v) * instance.radial(v)).sum()
}

/// The finite measure `F` with `int x^t dF = sum 2 d_i^t l_i / eta` over customers
/// with positive demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    atoms: Vec<(f64, f64)>,
    eta: f64,
}

impl DemandProfile {
    pub fn new(instance: &Instance, realization: &Realization) -> Result<Self, ModelError> {
        let eta = radial_load(instance, realization);
        if eta <= 0.0 {
            return Err(ModelError::EtaZero);
        }
        let atoms = instance
            .customers()
            .map(|v| (realization.demand(v), instance.radial(v)))
            .filter(|&(d, _)| d > 0.0)
            .collect();
        Ok(DemandProfile { atoms, eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `int_{(l, r]} x^t dF`; the interval is half-open on the left.
    pub fn f_integral(&self, l: f64, r: f64, t: i32) -> f64 {
        self.atoms
            .iter()
            .filter(|&&(d, _)| l < d && d <= r)
            .map(|&(d, dist)| 2.0 * d.powi(t) * dist)
            .sum::<f64>()
            / self.eta
    }

    /// `mu = int_0^lambda x^2 dF / int_0^lambda x dF`, or `None` when the
    /// denominator vanishes.
    pub fn mu(&self, lambda: f64) -> Option<f64> {
        let first = self.f_integral(0.0, lambda, 1);
        (first > 0.0).then(|| self.f_integral(0.0, lambda, 2) / first)
    }
}
