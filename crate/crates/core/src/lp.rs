//! Dense two-phase simplex with Bland's rule.

use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `sense c.x` subject to rows and per-variable bounds (default `[0, inf)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: Status,
    /// Objective value in the program's own sense; `NaN` unless optimal.
    pub value: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub feasibility_tol: f64,
    pub pivot_tol: f64,
    pub cost_tol: f64,
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { feasibility_tol: 1e-8, pivot_tol: 1e-11, cost_tol: 1e-9, max_iterations: None }
    }
}

impl LinearProgram {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram { sense, objective, constraints: Vec::new(), bounds: vec![(0.0, f64::INFINITY); n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn add_sparse(&mut self, terms: &[(usize, f64)], relation: Relation, rhs: f64) -> &mut Self {
        let mut coeffs = vec![0.0; self.num_vars()];
        for &(j, c) in terms {
            coeffs[j] += c;
        }
        self.add_constraint(coeffs, relation, rhs)
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.bounds[var] = (lower, upper);
        self
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of any row or bound at `x`, each scaled by `1 + |rhs|`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.constraints {
            let lhs: f64 = row.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
            let v = match row.relation {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(v / (1.0 + row.rhs.abs()));
        }
        for (&(lo, hi), &v) in self.bounds.iter().zip(x) {
            worst = worst.max((lo - v) / (1.0 + lo.abs().min(1e300))).max((v - hi) / (1.0 + hi.abs().min(1e300)));
        }
        worst
    }

    fn check_dimensions(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch(format!("{} bounds for {n} variables", self.bounds.len())));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coeffs.len() != n {
                return Err(LpError::DimensionMismatch(format!(
                    "row {i} has {} coefficients, expected {n}",
                    row.coeffs.len()
                )));
            }
            if !row.rhs.is_finite() || row.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(LpError::DimensionMismatch(format!("row {i} has non-finite entries")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::DimensionMismatch("non-finite objective".into()));
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(LpError::DimensionMismatch(format!("bad bounds for variable {j}")));
            }
        }
        Ok(())
    }

    /// Plain-text dump: one line per objective, row and non-default bound.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        writeln!(f, "vars {}", self.num_vars())?;
        writeln!(f, "{sense} {}", join(&self.objective))?;
        for row in &self.constraints {
            let rel = match row.relation {
                Relation::Le => "<=",
                Relation::Ge => ">=",
                Relation::Eq => "=",
            };
            let mut terms = String::new();
            for (j, c) in row.coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0) {
                let _ = write!(terms, " {j}:{c:e}");
            }
            writeln!(f, "row{terms} {rel} {:e}", row.rhs)?;
        }
        for (j, &(lo, hi)) in self.bounds.iter().enumerate() {
            if lo != 0.0 || hi != f64::INFINITY {
                writeln!(f, "bound {j} {lo:e} {hi:e}")?;
            }
        }
        Ok(())
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(|c| format!("{c:e}")).collect::<Vec<_>>().join(" ")
}

/// How an original variable is expressed through nonnegative tableau columns.
#[derive(Debug, Clone, Copy)]
enum Mapping {
    /// `x = offset + sign * y_col`
    Shifted { col: usize, offset: f64, sign: f64 },
    /// `x = y_pos - y_neg`
    Free { pos: usize, neg: usize },
}

struct Tableau {
    rows: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Phase-one and phase-two reduced-cost rows, with `-objective` in the last slot.
    phase_one: Vec<f64>,
    phase_two: Vec<f64>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.data[r * w + c];
        let (before, rest) = self.data.split_at_mut(r * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[c] = 1.0;
        let eliminate = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for (x, &y) in row.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
                row[c] = 0.0;
            }
        };
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            eliminate(row);
        }
        eliminate(&mut self.phase_one);
        eliminate(&mut self.phase_two);
        self.basis[r] = c;
    }
}

enum Outcome {
    Optimal,
    Unbounded,
}

pub fn solve(lp: &LinearProgram) -> Result<Solution, LpError> {
    solve_with(lp, &SolverOptions::default())
}

pub fn solve_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<Solution, LpError> {
    lp.check_dimensions()?;
    let n = lp.num_vars();

    let mut mapping = Vec::with_capacity(n);
    let mut cols = 0usize;
    let mut upper_rows: Vec<(usize, f64)> = Vec::new();
    for &(lo, hi) in &lp.bounds {
        if lo.is_finite() {
            mapping.push(Mapping::Shifted { col: cols, offset: lo, sign: 1.0 });
            if hi.is_finite() {
                upper_rows.push((cols, hi - lo));
            }
            cols += 1;
        } else if hi.is_finite() {
            mapping.push(Mapping::Shifted { col: cols, offset: hi, sign: -1.0 });
            cols += 1;
        } else {
            mapping.push(Mapping::Free { pos: cols, neg: cols + 1 });
            cols += 2;
        }
    }
    let structural = cols;

    // Rows over structural columns with nonnegative right-hand sides.
    let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::new();
    for row in &lp.constraints {
        let mut coeffs = vec![0.0; structural];
        let mut rhs = row.rhs;
        for (j, &a) in row.coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match mapping[j] {
                Mapping::Shifted { col, offset, sign } => {
                    coeffs[col] += a * sign;
                    rhs -= a * offset;
                }
                Mapping::Free { pos, neg } => {
                    coeffs[pos] += a;
                    coeffs[neg] -= a;
                }
            }
        }
        rows.push((coeffs, row.relation, rhs));
    }
    for &(col, ub) in &upper_rows {
        let mut coeffs = vec![0.0; structural];
        coeffs[col] = 1.0;
        rows.push((coeffs, Relation::Le, ub));
    }
    for row in rows.iter_mut() {
        if row.2 < 0.0 {
            for c in row.0.iter_mut() {
                *c = -*c;
            }
            row.2 = -row.2;
            row.1 = match row.1 {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.1 != Relation::Eq).count();
    let art_count = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let art_start = structural + slack_count;
    let total = art_start + art_count;
    let width = total + 1;
    let mut tab = Tableau {
        rows: m,
        width,
        data: vec![0.0; m * width],
        basis: vec![0; m],
        phase_one: vec![0.0; width],
        phase_two: vec![0.0; width],
    };
    let (mut next_slack, mut next_art) = (structural, art_start);
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        let base = i * width;
        tab.data[base..base + structural].copy_from_slice(coeffs);
        tab.data[base + width - 1] = *rhs;
        match rel {
            Relation::Le => {
                tab.data[base + next_slack] = 1.0;
                tab.basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                tab.data[base + next_slack] = -1.0;
                next_slack += 1;
                tab.data[base + next_art] = 1.0;
                tab.basis[i] = next_art;
                next_art += 1;
            }
            Relation::Eq => {
                tab.data[base + next_art] = 1.0;
                tab.basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    // Phase-two costs in minimization form over structural columns.
    let sign = if lp.sense == Sense::Maximize { -1.0 } else { 1.0 };
    for (j, &c) in lp.objective.iter().enumerate() {
        match mapping[j] {
            Mapping::Shifted { col, sign: s, .. } => tab.phase_two[col] += sign * c * s,
            Mapping::Free { pos, neg } => {
                tab.phase_two[pos] += sign * c;
                tab.phase_two[neg] -= sign * c;
            }
        }
    }
    for c in art_start..total {
        tab.phase_one[c] = 1.0;
    }
    for i in 0..m {
        if tab.basis[i] >= art_start {
            for c in 0..width {
                tab.phase_one[c] -= tab.data[i * width + c];
            }
        }
    }

    let limit = opts.max_iterations.unwrap_or(200 * (m + total) + 10_000);
    let mut iterations = 0usize;

    if art_count > 0 {
        match run_phase(&mut tab, true, total, opts, limit, &mut iterations)? {
            Outcome::Optimal => {}
            Outcome::Unbounded => {
                return Err(LpError::NumericalBreakdown("phase one reported unbounded".into()))
            }
        }
        let infeasibility = -tab.phase_one[width - 1];
        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if infeasibility > opts.feasibility_tol * scale {
            return Ok(Solution { status: Status::Infeasible, value: f64::NAN, x: Vec::new(), iterations });
        }
        for i in 0..m {
            if tab.basis[i] < art_start {
                continue;
            }
            let replacement = (0..art_start)
                .filter(|&c| tab.at(i, c).abs() > 1e-9)
                .max_by(|&x, &y| tab.at(i, x).abs().total_cmp(&tab.at(i, y).abs()).then(y.cmp(&x)));
            if let Some(c) = replacement {
                tab.pivot(i, c);
                iterations += 1;
            }
        }
    }

    match run_phase(&mut tab, false, art_start, opts, limit, &mut iterations)? {
        Outcome::Unbounded => {
            let value = if lp.sense == Sense::Maximize { f64::INFINITY } else { f64::NEG_INFINITY };
            return Ok(Solution { status: Status::Unbounded, value, x: Vec::new(), iterations });
        }
        Outcome::Optimal => {}
    }

    let mut y = vec![0.0; total];
    for i in 0..m {
        y[tab.basis[i]] = tab.rhs(i).max(0.0);
    }
    let x: Vec<f64> = mapping
        .iter()
        .map(|mp| match *mp {
            Mapping::Shifted { col, offset, sign } => offset + sign * y[col],
            Mapping::Free { pos, neg } => y[pos] - y[neg],
        })
        .collect();
    let residual = lp.max_violation(&x);
    if residual > opts.feasibility_tol {
        return Err(LpError::NumericalBreakdown(format!("primal residual {residual:e} after {iterations} pivots")));
    }
    Ok(Solution { status: Status::Optimal, value: lp.evaluate(&x), x, iterations })
}

/// Runs simplex pivots with Bland's rule on columns `0..allowed`.
fn run_phase(
    tab: &mut Tableau,
    phase_one: bool,
    allowed: usize,
    opts: &SolverOptions,
    limit: usize,
    iterations: &mut usize,
) -> Result<Outcome, LpError> {
    loop {
        let costs = if phase_one { &tab.phase_one } else { &tab.phase_two };
        let Some(enter) = (0..allowed).find(|&c| costs[c] < -opts.cost_tol) else {
            return Ok(Outcome::Optimal);
        };
        let mut leave: Option<(usize, f64)> = None;
        let mut largest: f64 = 0.0;
        for r in 0..tab.rows {
            let a = tab.at(r, enter);
            largest = largest.max(a);
            if a <= opts.pivot_tol {
                continue;
            }
            let ratio = tab.rhs(r).max(0.0) / a;
            leave = match leave {
                None => Some((r, ratio)),
                Some((br, best)) => {
                    let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                    if ratio < best && !tie || tie && tab.basis[r] < tab.basis[br] {
                        Some((r, ratio))
                    } else {
                        Some((br, best))
                    }
                }
            };
        }
        let Some((row, _)) = leave else {
            if largest > 1e-14 {
                return Err(LpError::NumericalBreakdown(format!(
                    "entering column {enter} has only pivots below {:e}",
                    opts.pivot_tol
                )));
            }
            return Ok(Outcome::Unbounded);
        };
        tab.pivot(row, enter);
        *iterations += 1;
        if *iterations > limit {
            return Err(LpError::NumericalBreakdown(format!("iteration limit {limit} reached")));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_maximum() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, 3.0);
        let s = solve(&lp).unwrap();
        assert_eq!(s.status, Status::Optimal);
        assert!((s.value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn covering_minimum() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Ge, 1.0);
        let s = solve(&lp).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_integral_triangle_cover() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0; 3]);
        lp.add_constraint(vec![1.0, 0.0, 1.0], Relation::Ge, 1.0);
        lp.add_constraint(vec![1.0, 1.0, 0.0], Relation::Ge, 1.0);
        lp.add_constraint(vec![0.0, 1.0, 1.0], Relation::Ge, 1.0);
        let s = solve(&lp).unwrap();
        assert!((s.value - 1.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::Ge, 2.0).add_constraint(vec![1.0], Relation::Le, 1.0);
        assert_eq!(solve(&lp).unwrap().status, Status::Infeasible);
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, -1.0]);
        lp.add_constraint(vec![1.0, -1.0], Relation::Ge, -1.0);
        assert_eq!(solve(&lp).unwrap().status, Status::Unbounded);
    }

    #[test]
    fn free_and_bounded_variables() {
        // min x - y with x in [-2, 5], y free, x + y = 1, y <= 4
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, -1.0]);
        lp.set_bounds(0, -2.0, 5.0).set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add_constraint(vec![0.0, 1.0], Relation::Le, 4.0);
        let s = solve(&lp).unwrap();
        assert!((s.value + 5.0).abs() < 1e-12, "{s:?}");
        assert!((s.x[0] + 2.0).abs() < 1e-12 && (s.x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let mut lp = LinearProgram::new(Sense::Minimize, vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0], Relation::Ge, 1.0);
        assert!(matches!(solve(&lp), Err(LpError::DimensionMismatch(_))));
    }

    #[test]
    fn text_dump_lists_rows() {
        let mut lp = LinearProgram::new(Sense::Maximize, vec![1.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Le, 4.0).set_bounds(1, 0.0, 3.0);
        let text = lp.to_text();
        assert!(text.contains("max 1e0 2e0"));
        assert!(text.contains("row 0:1e0 1:1e0 <= 4e0"));
        assert!(text.contains("bound 1 0e0 3e0"));
    }
}
