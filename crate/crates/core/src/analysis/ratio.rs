use super::AnalysisError;
use crate::model::Extended;
use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;

/// `R(sigma) = (n0 + n1 sigma) / (d1 max(sigma, 1) + d0) + offset`.
///
/// Every ratio function of the policies has this shape once the demand
/// moments are erased, so its supremum over `sigma >= 0` is `max(R(1), R(inf))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalLinear {
    pub n0: f64,
    pub n1: f64,
    pub d0: f64,
    pub d1: f64,
    pub offset: f64,
}

impl FractionalLinear {
    pub fn constant(value: f64) -> Self {
        FractionalLinear { n0: value, n1: 0.0, d0: 1.0, d1: 0.0, offset: 0.0 }
    }

    pub fn eval(&self, sigma: Extended) -> f64 {
        match sigma {
            Extended::Infinite if self.d1 == 0.0 => {
                if self.n1 == 0.0 {
                    self.n0 / self.d0 + self.offset
                } else {
                    f64::INFINITY
                }
            }
            Extended::Infinite => self.n1 / self.d1 + self.offset,
            Extended::Finite(s) => (self.n0 + self.n1 * s) / (self.d1 * s.max(1.0) + self.d0) + self.offset,
        }
    }

    pub fn at_one(&self) -> f64 {
        self.eval(Extended::Finite(1.0))
    }

    pub fn at_infinity(&self) -> f64 {
        self.eval(Extended::Infinite)
    }

    pub fn worst(&self) -> f64 {
        self.at_one().max(self.at_infinity())
    }
}

/// `max(R(1), R(inf))`.
pub fn worst_ratio(form: &FractionalLinear) -> f64 {
    form.worst()
}

/// Builds `(gamma (alpha sigma + x) + (y sigma + z)) / (gamma max(sigma,1) + 1/2)`,
/// dividing through by gamma when it is infinite.
fn gamma_form(gamma: Extended, alpha: f64, x: f64, y: f64, z: f64, offset: f64) -> FractionalLinear {
    match gamma {
        Extended::Infinite => FractionalLinear { n0: x, n1: alpha, d0: 0.0, d1: 1.0, offset },
        Extended::Finite(g) => FractionalLinear { n0: g * x + z, n1: g * alpha + y, d0: 0.5, d1: g, offset },
    }
}

fn check_theta(theta: f64) -> Result<(), AnalysisError> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(AnalysisError::DegenerateTheta(theta))
    }
}

fn mixing_probability(gamma: Extended, lambda: f64, theta: f64, scale: f64) -> Result<f64, AnalysisError> {
    check_theta(theta)?;
    let low = theta * lambda;
    let gap = lambda - low;
    Ok(match gamma {
        Extended::Infinite => 1.0,
        Extended::Finite(g) => {
            let x = 1.0 / (scale * gap) + g / (low * gap);
            x / (1.0 / (scale * lambda) + x)
        }
    })
}

/// Probability of the `lambda` arm in APPROX.1.
pub fn p_approx1(gamma: Extended, lambda: f64, theta: f64) -> Result<f64, AnalysisError> {
    mixing_probability(gamma, lambda, theta, 2.0)
}

/// Probability of the `lambda` arm in APPROX.4.
pub fn p_approx4(gamma: Extended, lambda: f64, theta: f64) -> Result<f64, AnalysisError> {
    mixing_probability(gamma, lambda, theta, 4.0)
}

fn travel_terms(alpha: f64, lambda: f64, theta: f64, p: f64) -> (f64, f64) {
    let low = theta * lambda;
    let x = p * 2.0 / lambda + (1.0 - p) * (2.0 * lambda - low) / (low * (lambda - low));
    let y = (p * lambda + (1.0 - p) * low) / 2.0 * alpha;
    (x, y)
}

/// APPROX.1: mixture of ALG.1(lambda, 0) and ALG.1(theta lambda, 0).
pub fn approx1_form(gamma: Extended, alpha: f64, lambda: f64, theta: f64, p: f64) -> Result<FractionalLinear, AnalysisError> {
    check_theta(theta)?;
    let low = theta * lambda;
    let (x, y) = travel_terms(alpha, lambda, theta, p);
    let z = p / 2.0 + (1.0 - p) * 0.5 * (2.0 * lambda - low) / (lambda - low);
    Ok(gamma_form(gamma, alpha, x, y, z, 0.0))
}

pub fn ratio_approx1(
    sigma: Extended,
    gamma: Extended,
    alpha: f64,
    lambda: f64,
    theta: f64,
    p: f64,
) -> Result<f64, AnalysisError> {
    Ok(approx1_form(gamma, alpha, lambda, theta, p)?.eval(sigma))
}

/// APPROX.4: mixture of ALG.4(lambda) and ALG.4(theta lambda).
pub fn approx4_form(gamma: Extended, alpha: f64, lambda: f64, theta: f64, p: f64) -> Result<FractionalLinear, AnalysisError> {
    check_theta(theta)?;
    let low = theta * lambda;
    let (x, y) = travel_terms(alpha, lambda, theta, p);
    let z = p / 2.0 + (1.0 - p) * 0.25 * (3.0 * lambda - 2.0 * low) / (lambda - low);
    Ok(gamma_form(gamma, alpha, x, y, z, 0.0))
}

pub fn ratio_approx4(
    sigma: Extended,
    gamma: Extended,
    alpha: f64,
    lambda: f64,
    theta: f64,
    p: f64,
) -> Result<f64, AnalysisError> {
    Ok(approx4_form(gamma, alpha, lambda, theta, p)?.eval(sigma))
}

/// Smallest gamma for which the APPROX.2 bound is stated.
pub const APPROX2_MIN_GAMMA: f64 = 1.0 / 6.0;

/// APPROX.2: fair coin between ALG.1(1, 1/3) and ALG.2(1, 1/3).
pub fn approx2_form(gamma: Extended, alpha: f64) -> Result<FractionalLinear, AnalysisError> {
    match gamma {
        Extended::Infinite => Ok(gamma_form(gamma, alpha, 1.5, 0.0, 0.0, 0.25)),
        Extended::Finite(g) if g < APPROX2_MIN_GAMMA - 1e-12 => Err(AnalysisError::GammaOutOfRange(g)),
        Extended::Finite(g) => {
            let offset = (6.0 * g - 1.0) / (24.0 * g + 4.0);
            Ok(gamma_form(gamma, alpha, 1.5, 2.0 / 3.0 * alpha, 1.0, offset))
        }
    }
}

pub fn ratio_approx2(sigma: Extended, gamma: Extended, alpha: f64) -> Result<f64, AnalysisError> {
    Ok(approx2_form(gamma, alpha)?.eval(sigma))
}

/// ALG.S with load ceiling `lambda` (splittable).
pub fn alg_s_form(gamma: Extended, alpha: f64, lambda: f64) -> FractionalLinear {
    match gamma {
        Extended::Infinite => gamma_form(gamma, alpha, 1.0 / lambda, 0.0, 0.0, 0.0),
        Extended::Finite(_) => gamma_form(gamma, alpha, 1.0 / lambda, lambda / 2.0 * alpha, 0.5, 0.0),
    }
}

pub fn ratio_alg_s(sigma: Extended, gamma: Extended, alpha: f64, lambda: f64) -> f64 {
    alg_s_form(gamma, alpha, lambda).eval(sigma)
}

/// ALG.3 bound relative to OPT: `ln2` from the rounded cover plus the ALG.1
/// part relative to LB, which never exceeds OPT.
pub fn alg3_form(gamma: Extended, alpha: f64, lambda: f64, delta: f64) -> FractionalLinear {
    let gap = lambda - delta;
    gamma_form(gamma, alpha, 1.0 / gap, lambda / 2.0 * alpha, lambda / 2.0 / gap, LN_2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_form() {
        let c = FractionalLinear::constant(2.5);
        assert_eq!(c.worst(), 2.5);
        assert_eq!(c.at_infinity(), 2.5);
    }

    #[test]
    fn theta_degenerate() {
        assert!(p_approx1(Extended::Finite(1.0), 1.0, 0.0).is_err());
        assert!(p_approx1(Extended::Finite(1.0), 1.0, 1.0).is_err());
    }

    #[test]
    fn p_tends_to_one_as_theta_grows() {
        let p = p_approx1(Extended::Finite(1.0), 1.0, 0.9999).unwrap();
        assert!(p > 0.999);
    }

    #[test]
    fn approx2_below_range() {
        assert_eq!(ratio_approx2(Extended::Finite(1.0), Extended::Finite(0.1), 1.5), Err(AnalysisError::GammaOutOfRange(0.1)));
    }
}
