//! Discretized moment LPs bounding the APPROX.2 ratio.
//!
//! The unknowns are the moments `r^i_j = int_0^{j/N} x^i dF` for `i = 0, 1, 2`.
//! Working with the increments `u^i_j = r^i_j - r^i_{j-1}`, the constraints for
//! a fixed `j` say that `(u^0, u^1, u^2)` lies in the cone spanned by
//! `(1, a, a c)` with `a, c in {(j-1)/N, j/N}`. Writing every increment as a
//! combination of these four rays leaves a program with two rows, which is the
//! default [`Formulation::Rays`]; [`Formulation::Full`] keeps the sandwich rows.

use super::AnalysisError;
use crate::lp::{self, LinearProgram, Relation, Sense, Status};
use crate::model::DemandProfile;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formulation {
    Rays,
    Full,
}

/// Moments `r[i][j]` for `i in 0..3`, `j in 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedMoments {
    pub n: usize,
    pub r: [Vec<f64>; 3],
}

impl DiscretizedMoments {
    /// Prefix sums of per-interval increments (`u[i][j-1]` is the increment on `((j-1)/N, j/N]`).
    pub fn from_increments(u: &[Vec<f64>; 3]) -> Self {
        let n = u[0].len();
        let r = std::array::from_fn(|i| {
            let mut acc = vec![0.0; n + 1];
            for j in 0..n {
                acc[j + 1] = acc[j] + u[i][j];
            }
            acc
        });
        DiscretizedMoments { n, r }
    }

    pub fn from_profile(profile: &DemandProfile, n: usize) -> Self {
        let r = std::array::from_fn(|i| (0..=n).map(|j| profile.f_integral(0.0, j as f64 / n as f64, i as i32)).collect());
        DiscretizedMoments { n, r }
    }

    fn increment(&self, i: usize, j: usize) -> f64 {
        self.r[i][j] - self.r[i][j - 1]
    }

    /// Largest violation of monotonicity, `r^1_N = 1` and the moment sandwich.
    pub fn max_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = (self.r[1][n] - 1.0).abs();
        for j in 1..=n {
            let lo = (j - 1) as f64 / n as f64;
            let hi = j as f64 / n as f64;
            worst = worst.max(-self.increment(0, j));
            for i in 1..3 {
                let prev = self.increment(i - 1, j);
                let cur = self.increment(i, j);
                worst = worst.max(lo * prev - cur).max(cur - hi * prev);
            }
        }
        worst.max(0.0)
    }
}

/// Linear coefficients of the LP objective and side condition on the increments.
struct Coefficients {
    objective: [Vec<f64>; 3],
    side: [Vec<f64>; 3],
    constant: f64,
    rhs: f64,
}

fn coefficients(n: usize, gamma: f64, sigma: f64, alpha: f64, case: u8) -> Coefficients {
    let denom = gamma * sigma.max(1.0) + 0.5;
    let (t1, t2) = (n / 3, 2 * n / 3);
    let zero = || [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let (mut a, mut b, mut side) = (zero(), zero(), zero());
    let add = |m: &mut [Vec<f64>; 3], i: usize, lo: usize, hi: usize, c: f64| {
        for v in &mut m[i][lo..hi] {
            *v += c;
        }
    };
    // ALG.1(1, 1/3) arm.
    add(&mut a, 1, 0, t1, 1.5 * gamma);
    add(&mut a, 1, t1, t2, 3.0 * gamma);
    add(&mut a, 0, t1, t2, -0.5 * gamma);
    add(&mut a, 1, t2, n, 1.5 * gamma);
    add(&mut a, 0, t2, n, 0.5 * gamma);
    add(&mut a, 2, 0, t1, -0.75);
    add(&mut a, 1, 0, t1, 1.0);
    add(&mut a, 2, t1, t2, 0.75);
    add(&mut a, 1, t1, t2, 0.5);
    add(&mut a, 2, t2, n, 1.5);
    add(&mut a, 1, t2, n, -1.0);
    add(&mut a, 0, t2, n, 2.0 / 3.0);
    // ALG.2(1, 1/3) arm; the deferred customers enter through the side condition.
    add(&mut b, 1, 0, t1, 1.5 * gamma);
    add(&mut b, 2, 0, t1, -0.75);
    add(&mut b, 1, 0, t1, 1.0);
    add(&mut side, 1, t1, n, 0.5);
    add(&mut side, 0, t1, n, gamma);
    let travel = gamma * alpha * sigma + 2.0 / 3.0 * alpha * sigma;
    let mut extra = 0.0;
    if case == 1 {
        for i in 0..3 {
            for j in 0..n {
                b[i][j] += side[i][j];
            }
        }
    } else {
        extra = 1.0;
    }
    let objective = std::array::from_fn(|i| (0..n).map(|j| 0.5 * (a[i][j] + b[i][j]) / denom).collect());
    Coefficients { objective, side, constant: 0.5 * (2.0 * travel) / denom + 0.5 * extra, rhs: denom }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppendixSolution {
    pub case: u8,
    pub status: Status,
    pub value: Option<f64>,
    pub moments: Option<DiscretizedMoments>,
    /// Largest moment-constraint violation of the returned solution.
    pub residual: f64,
    pub iterations: usize,
}

fn check_n(n: usize) -> Result<(), AnalysisError> {
    if n == 0 || !n.is_multiple_of(3) {
        return Err(AnalysisError::InvalidN(n));
    }
    Ok(())
}

/// Builds the program for one case; variables are ray weights or increments.
pub fn appendix_program(
    gamma: f64,
    sigma: f64,
    n: usize,
    case: u8,
    alpha: f64,
    formulation: Formulation,
) -> Result<(LinearProgram, f64), AnalysisError> {
    check_n(n)?;
    if case != 1 && case != 2 {
        return Err(AnalysisError::InvalidCase(case));
    }
    let c = coefficients(n, gamma, sigma, alpha, case);
    let side_relation = if case == 1 { Relation::Le } else { Relation::Ge };
    let program = match formulation {
        Formulation::Rays => {
            let mut objective = Vec::with_capacity(4 * n);
            let mut normal = Vec::with_capacity(4 * n);
            let mut side = Vec::with_capacity(4 * n);
            for j in 0..n {
                for (first, second) in rays(j, n) {
                    let ray = [1.0, first, first * second];
                    objective.push((0..3).map(|i| c.objective[i][j] * ray[i]).sum());
                    normal.push(first);
                    side.push((0..3).map(|i| c.side[i][j] * ray[i]).sum());
                }
            }
            let mut program = LinearProgram::new(Sense::Maximize, objective);
            program.add_constraint(normal, Relation::Eq, 1.0);
            program.add_constraint(side, side_relation, c.rhs);
            program
        }
        Formulation::Full => {
            let idx = |i: usize, j: usize| i * n + j;
            let objective: Vec<f64> = (0..3).flat_map(|i| c.objective[i].clone()).collect();
            let mut program = LinearProgram::new(Sense::Maximize, objective);
            for i in 1..3 {
                for j in 0..n {
                    let lo = j as f64 / n as f64;
                    let hi = (j + 1) as f64 / n as f64;
                    program.add_sparse(&[(idx(i - 1, j), lo), (idx(i, j), -1.0)], Relation::Le, 0.0);
                    program.add_sparse(&[(idx(i, j), 1.0), (idx(i - 1, j), -hi)], Relation::Le, 0.0);
                }
            }
            let side: Vec<f64> = (0..3).flat_map(|i| c.side[i].clone()).collect();
            program.add_constraint(side, side_relation, c.rhs);
            let normal: Vec<(usize, f64)> = (0..n).map(|j| (idx(1, j), 1.0)).collect();
            program.add_sparse(&normal, Relation::Eq, 1.0);
            program
        }
    };
    Ok((program, c.constant))
}

fn rays(j: usize, n: usize) -> [(f64, f64); 4] {
    let lo = j as f64 / n as f64;
    let hi = (j + 1) as f64 / n as f64;
    [(lo, lo), (lo, hi), (hi, lo), (hi, hi)]
}

pub fn appendix_lp(
    gamma: f64,
    sigma: f64,
    n: usize,
    case: u8,
    alpha: f64,
    formulation: Formulation,
) -> Result<AppendixSolution, AnalysisError> {
    let (program, constant) = appendix_program(gamma, sigma, n, case, alpha, formulation)?;
    let solution = lp::solve(&program)?;
    if solution.status != Status::Optimal {
        return Ok(AppendixSolution {
            case,
            status: solution.status,
            value: None,
            moments: None,
            residual: f64::NAN,
            iterations: solution.iterations,
        });
    }
    let mut u: [Vec<f64>; 3] = std::array::from_fn(|_| vec![0.0; n]);
    match formulation {
        Formulation::Rays => {
            for j in 0..n {
                for (k, (first, second)) in rays(j, n).into_iter().enumerate() {
                    let w = solution.x[4 * j + k];
                    u[0][j] += w;
                    u[1][j] += first * w;
                    u[2][j] += first * second * w;
                }
            }
        }
        Formulation::Full => {
            for i in 0..3 {
                u[i].copy_from_slice(&solution.x[i * n..(i + 1) * n]);
            }
        }
    }
    let moments = DiscretizedMoments::from_increments(&u);
    let residual = moments.max_residual().max(program.max_violation(&solution.x));
    Ok(AppendixSolution {
        case,
        status: Status::Optimal,
        value: Some(solution.value + constant),
        moments: Some(moments),
        residual,
        iterations: solution.iterations,
    })
}

/// Larger of the two case values.
pub fn appendix_max(gamma: f64, sigma: f64, n: usize, alpha: f64) -> Result<f64, AnalysisError> {
    let mut best: Option<f64> = None;
    for case in [1, 2] {
        if let Some(v) = appendix_lp(gamma, sigma, n, case, alpha, Formulation::Rays)?.value {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best.ok_or(AnalysisError::LpInfeasible { gamma, sigma })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub sigma: f64,
    pub case: u8,
    pub lp_value: Option<f64>,
    pub status: Status,
}

/// Both cases at every grid point, in grid order.
pub fn appendix_sweep(gammas: &[f64], sigmas: &[f64], n: usize, alpha: f64) -> Result<Vec<SweepRow>, AnalysisError> {
    let mut rows = Vec::new();
    for &gamma in gammas {
        for &sigma in sigmas {
            for case in [1, 2] {
                let s = appendix_lp(gamma, sigma, n, case, alpha, Formulation::Rays)?;
                rows.push(SweepRow { gamma, sigma, case, lp_value: s.value, status: s.status });
            }
        }
    }
    Ok(rows)
}

/// Per gamma: the sigma attaining the largest value over both cases.
pub fn sweep_maxima(rows: &[SweepRow]) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for row in rows {
        let Some(v) = row.lp_value else { continue };
        match out.iter_mut().find(|e| e.0 == row.gamma) {
            Some(e) if v > e.2 + 1e-12 => *e = (row.gamma, row.sigma, v),
            Some(_) => {}
            None => out.push((row.gamma, row.sigma, v)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_n_not_multiple_of_three() {
        assert_eq!(appendix_lp(1.444, 1.0, 301, 1, 1.5, Formulation::Rays), Err(AnalysisError::InvalidN(301)));
    }

    #[test]
    fn formulations_agree_on_small_n() {
        for &(g, s) in &[(1.444, 1.0), (0.8, 2.0), (3.0, 1.2)] {
            for case in [1, 2] {
                let a = appendix_lp(g, s, 6, case, 1.5, Formulation::Rays).unwrap();
                let b = appendix_lp(g, s, 6, case, 1.5, Formulation::Full).unwrap();
                assert_eq!(a.status, b.status);
                if let (Some(x), Some(y)) = (a.value, b.value) {
                    assert!((x - y).abs() < 1e-9, "{g} {s} {case}: {x} vs {y}");
                    assert!(a.residual < 1e-8 && b.residual < 1e-8);
                }
            }
        }
    }
}
