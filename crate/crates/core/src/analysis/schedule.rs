use super::ratio::{approx1_form, approx2_form, approx4_form, p_approx1, p_approx4, FractionalLinear, APPROX2_MIN_GAMMA};
use super::AnalysisError;
use crate::model::Extended;
use serde::{Deserialize, Serialize};

/// APPROX.1 switches from `theta = 0.5` to `theta = 0.6677` above this gamma.
pub const APPROX1_THETA_SWITCH: f64 = 0.375;
pub const APPROX1_THETA_HIGH: f64 = 0.6677;
/// Cu-VRPSD dispatch uses APPROX.1 up to this gamma and APPROX.2 above.
pub const CUVRPSD_CROSSOVER: f64 = 1.444;
pub const APPROX4_THETA_TIGHT: f64 = 0.5043;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub lambda: f64,
    pub theta: f64,
    pub p: f64,
}

fn scaled_lambda(gamma: Extended, factor: f64, alpha: f64) -> f64 {
    match gamma {
        Extended::Infinite => 1.0,
        Extended::Finite(g) => (factor * g / alpha).min(1.0),
    }
}

fn check_positive(gamma: Extended) -> Result<(), AnalysisError> {
    match gamma {
        Extended::Finite(g) if !(g > 0.0) => Err(AnalysisError::GammaOutOfRange(g)),
        _ => Ok(()),
    }
}

/// `lambda = min(1, 4 gamma / alpha)`, with `theta` given.
pub fn approx1_schedule_with(gamma: Extended, alpha: f64, theta: f64) -> Result<Schedule, AnalysisError> {
    check_positive(gamma)?;
    let lambda = scaled_lambda(gamma, 4.0, alpha);
    Ok(Schedule { lambda, theta, p: p_approx1(gamma, lambda, theta)? })
}

/// `theta = 0.5` up to gamma 0.375, then 0.6677.
pub fn approx1_schedule(gamma: Extended, alpha: f64) -> Result<Schedule, AnalysisError> {
    let theta = if gamma.le(APPROX1_THETA_SWITCH) { 0.5 } else { APPROX1_THETA_HIGH };
    approx1_schedule_with(gamma, alpha, theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Approx4Regime {
    /// `theta = 0.5043`, bound 3.163 for alpha = 1.5 and gamma <= 0.428.
    Tight,
    /// `theta = 0.5`, bound `alpha + 1 + ln2 - 0.029` for gamma <= 0.285.
    AlphaParametric,
}

impl Approx4Regime {
    pub fn theta(self) -> f64 {
        match self {
            Approx4Regime::Tight => APPROX4_THETA_TIGHT,
            Approx4Regime::AlphaParametric => 0.5,
        }
    }
}

/// `lambda = min(1, 3.5 gamma / alpha)`.
pub fn approx4_schedule(gamma: Extended, alpha: f64, regime: Approx4Regime) -> Result<Schedule, AnalysisError> {
    check_positive(gamma)?;
    let lambda = scaled_lambda(gamma, 3.5, alpha);
    let theta = regime.theta();
    Ok(Schedule { lambda, theta, p: p_approx4(gamma, lambda, theta)? })
}

/// ALG.S ceiling `min(1, 2 gamma / alpha)`; also the ALG.3 ceiling.
pub fn alg_s_lambda(gamma: Extended, alpha: f64) -> Result<f64, AnalysisError> {
    check_positive(gamma)?;
    Ok(scaled_lambda(gamma, 2.0, alpha))
}

pub fn approx1_schedule_form(gamma: Extended, alpha: f64) -> Result<(Schedule, FractionalLinear), AnalysisError> {
    let s = approx1_schedule(gamma, alpha)?;
    Ok((s, approx1_form(gamma, alpha, s.lambda, s.theta, s.p)?))
}

pub fn approx4_schedule_form(
    gamma: Extended,
    alpha: f64,
    regime: Approx4Regime,
) -> Result<(Schedule, FractionalLinear), AnalysisError> {
    let s = approx4_schedule(gamma, alpha, regime)?;
    Ok((s, approx4_form(gamma, alpha, s.lambda, s.theta, s.p)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RatioFamily {
    Approx1,
    Approx4,
}

/// Size of the theta grid `{i / 10000}`.
pub const THETA_GRID: u32 = 10_000;

/// Grid minimiser of the worst ratio over `theta`; ties go to the smaller theta.
pub fn best_theta(gamma: Extended, family: RatioFamily, alpha: f64) -> Result<(f64, f64), AnalysisError> {
    check_positive(gamma)?;
    let mut best = (f64::NAN, f64::INFINITY);
    for i in 1..THETA_GRID {
        let theta = i as f64 / THETA_GRID as f64;
        let value = match family {
            RatioFamily::Approx1 => {
                let s = approx1_schedule_with(gamma, alpha, theta)?;
                approx1_form(gamma, alpha, s.lambda, theta, s.p)?.worst()
            }
            RatioFamily::Approx4 => {
                let lambda = scaled_lambda(gamma, 3.5, alpha);
                let p = p_approx4(gamma, lambda, theta)?;
                approx4_form(gamma, alpha, lambda, theta, p)?.worst()
            }
        };
        if value < best.1 - 1e-12 {
            best = (theta, value);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig3,
    Fig6,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub series: String,
    pub gamma: f64,
    pub theta: Option<f64>,
    pub p: Option<f64>,
    pub r1: f64,
    pub rinf: f64,
    pub worst: f64,
}

impl CurveRow {
    fn from_form(series: &str, gamma: f64, theta: Option<f64>, p: Option<f64>, form: &FractionalLinear) -> Self {
        CurveRow {
            series: series.into(),
            gamma,
            theta,
            p,
            r1: form.at_one(),
            rinf: form.at_infinity(),
            worst: form.worst(),
        }
    }
}

/// Smallest gamma of the LP series in Figure 6.
pub const FIG6_LP_MIN_GAMMA: f64 = 0.6;
pub const FIG6_LP_N: usize = 300;

/// Rows are grouped by series and ordered by the grid within each series.
pub fn ratio_curves(grid: &[f64], figure: Figure, alpha: f64) -> Result<Vec<CurveRow>, AnalysisError> {
    let mut rows = Vec::new();
    match figure {
        Figure::Fig2 => {
            for &g in grid {
                let s = approx1_schedule_with(Extended::Finite(g), alpha, 0.5)?;
                let f = approx1_form(Extended::Finite(g), alpha, s.lambda, s.theta, s.p)?;
                rows.push(CurveRow::from_form("theta_0.5", g, Some(0.5), Some(s.p), &f));
            }
            for &g in grid {
                let gamma = Extended::Finite(g);
                let p = p_approx1(gamma, 1.0, APPROX1_THETA_HIGH)?;
                let f = approx1_form(gamma, alpha, 1.0, APPROX1_THETA_HIGH, p)?;
                rows.push(CurveRow::from_form("theta_0.6677", g, Some(APPROX1_THETA_HIGH), Some(p), &f));
            }
            for &g in grid {
                let gamma = Extended::Finite(g);
                let (theta, _) = best_theta(gamma, RatioFamily::Approx1, alpha)?;
                let s = approx1_schedule_with(gamma, alpha, theta)?;
                let f = approx1_form(gamma, alpha, s.lambda, theta, s.p)?;
                rows.push(CurveRow::from_form("best_theta", g, Some(theta), Some(s.p), &f));
            }
        }
        Figure::Fig3 | Figure::Fig6 => {
            for &g in grid {
                let (s, f) = approx1_schedule_form(Extended::Finite(g), alpha)?;
                rows.push(CurveRow::from_form("approx1", g, Some(s.theta), Some(s.p), &f));
            }
            for &g in grid.iter().filter(|&&g| g >= APPROX2_MIN_GAMMA) {
                let f = approx2_form(Extended::Finite(g), alpha)?;
                rows.push(CurveRow::from_form("approx2", g, None, Some(0.5), &f));
            }
            if figure == Figure::Fig6 {
                for &g in grid.iter().filter(|&&g| g >= FIG6_LP_MIN_GAMMA) {
                    let r = super::appendix::appendix_max(g, 1.0, FIG6_LP_N, alpha)?;
                    rows.push(CurveRow {
                        series: "lp".into(),
                        gamma: g,
                        theta: None,
                        p: Some(0.5),
                        r1: r,
                        rinf: f64::NAN,
                        worst: r,
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Worst ratio of the Cu-VRPSD dispatcher at `gamma`.
pub fn dispatcher_ratio(gamma: Extended, alpha: f64) -> Result<f64, AnalysisError> {
    if gamma.le(CUVRPSD_CROSSOVER) {
        Ok(approx1_schedule_form(gamma, alpha)?.1.worst())
    } else {
        Ok(approx2_form(gamma, alpha)?.worst())
    }
}
