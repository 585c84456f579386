//! TSP tour providers. Every policy starts from a tour `v0, v1, .., vn, v0`.

use crate::model::Instance;
use serde::{Deserialize, Serialize};

/// Largest customer count accepted by [`exact_tsp`].
pub const EXACT_TSP_LIMIT: usize = 15;

pub const DEFAULT_TWO_OPT_PASSES: usize = 50;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TspError {
    #[error("exact TSP limited to {limit} customers, instance has {n}")]
    TooLarge { n: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TourResult {
    /// Closed tour starting and ending at the depot.
    pub tour: Vec<usize>,
    pub weight: f64,
    /// Guarantee of the provider: 1 for exact, 2 for double tree.
    pub alpha_certificate: f64,
    /// `weight / tau` when the optimum is known.
    pub realized_ratio: Option<f64>,
}

impl TourResult {
    fn new(tour: Vec<usize>, instance: &Instance, alpha: f64) -> Self {
        let weight = tour_weight(instance, &tour);
        TourResult { tour, weight, alpha_certificate: alpha, realized_ratio: None }
    }

    /// Customers in visiting order, without the depot.
    pub fn customer_order(&self) -> Vec<usize> {
        self.tour[1..self.tour.len() - 1].to_vec()
    }

    /// Records `weight / tau` against a known optimum.
    pub fn certify(mut self, tau: f64) -> Self {
        self.realized_ratio = Some(if tau > 0.0 { self.weight / tau } else { 1.0 });
        self
    }
}

pub fn tour_weight(instance: &Instance, tour: &[usize]) -> f64 {
    tour.windows(2).map(|e| instance.dist(e[0], e[1])).sum()
}

/// True when `tour` is `0, perm(1..=n), 0`.
pub fn is_valid_tour(tour: &[usize], n: usize) -> bool {
    if tour.len() != n + 2 || tour[0] != 0 || tour[n + 1] != 0 {
        return false;
    }
    let mut seen = vec![false; n + 1];
    for &v in &tour[1..=n] {
        if v == 0 || v > n || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    true
}

/// Held-Karp over subsets of customers.
pub fn exact_tsp(instance: &Instance) -> Result<TourResult, TspError> {
    let n = instance.n();
    if n > EXACT_TSP_LIMIT {
        return Err(TspError::TooLarge { n, limit: EXACT_TSP_LIMIT });
    }
    if n == 0 {
        return Ok(TourResult::new(vec![0, 0], instance, 1.0).certify(0.0));
    }
    let full = (1usize << n) - 1;
    let mut dp = vec![f64::INFINITY; (full + 1) * n];
    let mut parent = vec![usize::MAX; (full + 1) * n];
    for j in 0..n {
        dp[(1 << j) * n + j] = instance.dist(0, j + 1);
    }
    for mask in 1..=full {
        for last in 0..n {
            let cur = dp[mask * n + last];
            if mask & (1 << last) == 0 || !cur.is_finite() {
                continue;
            }
            for next in 0..n {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let cand = cur + instance.dist(last + 1, next + 1);
                if cand < dp[nm * n + next] {
                    dp[nm * n + next] = cand;
                    parent[nm * n + next] = last;
                }
            }
        }
    }
    let (mut last, mut best) = (0, f64::INFINITY);
    for j in 0..n {
        let c = dp[full * n + j] + instance.dist(j + 1, 0);
        if c < best {
            best = c;
            last = j;
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    loop {
        order.push(last + 1);
        let p = parent[mask * n + last];
        mask &= !(1 << last);
        if p == usize::MAX {
            break;
        }
        last = p;
    }
    order.reverse();
    let tour: Vec<usize> = std::iter::once(0).chain(order).chain(std::iter::once(0)).collect();
    let result = TourResult::new(tour, instance, 1.0);
    let w = result.weight;
    Ok(result.certify(w))
}

/// Preorder walk of a minimum spanning tree rooted at the depot.
pub fn double_tree_tsp(instance: &Instance) -> TourResult {
    let size = instance.n() + 1;
    let mut in_tree = vec![false; size];
    let mut best = vec![f64::INFINITY; size];
    let mut parent = vec![0usize; size];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); size];
    best[0] = 0.0;
    for _ in 0..size {
        let u = (0..size)
            .filter(|&v| !in_tree[v])
            .min_by(|&x, &y| best[x].total_cmp(&best[y]).then(x.cmp(&y)))
            .expect("vertex left");
        in_tree[u] = true;
        if u != 0 {
            children[parent[u]].push(u);
        }
        for v in 0..size {
            if !in_tree[v] && instance.dist(u, v) < best[v] {
                best[v] = instance.dist(u, v);
                parent[v] = u;
            }
        }
    }
    let mut tour = Vec::with_capacity(size + 1);
    let mut stack = vec![0usize];
    while let Some(u) = stack.pop() {
        tour.push(u);
        for &c in children[u].iter().rev() {
            stack.push(c);
        }
    }
    tour.push(0);
    TourResult::new(tour, instance, 2.0)
}

/// First-improvement 2-opt on the closed tour; never increases the weight.
pub fn two_opt(start: &TourResult, instance: &Instance, max_passes: usize) -> TourResult {
    let mut tour = start.tour.clone();
    let m = tour.len();
    for _ in 0..max_passes {
        let mut improved = false;
        for i in 0..m.saturating_sub(3) {
            for j in i + 2..m - 1 {
                let (a, b, c, d) = (tour[i], tour[i + 1], tour[j], tour[j + 1]);
                let delta = instance.dist(a, c) + instance.dist(b, d)
                    - instance.dist(a, b)
                    - instance.dist(c, d);
                if delta < -1e-12 {
                    tour[i + 1..=j].reverse();
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let result = TourResult::new(tour, instance, start.alpha_certificate);
    if result.weight > start.weight {
        return start.clone();
    }
    result
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum TourProvider {
    #[default]
    Exact,
    DoubleTree,
    DoubleTreeTwoOpt,
}

impl TourProvider {
    pub fn provide(self, instance: &Instance) -> Result<TourResult, TspError> {
        match self {
            TourProvider::Exact => exact_tsp(instance),
            TourProvider::DoubleTree => Ok(double_tree_tsp(instance)),
            TourProvider::DoubleTreeTwoOpt => {
                Ok(two_opt(&double_tree_tsp(instance), instance, DEFAULT_TWO_OPT_PASSES))
            }
        }
    }
}

/// Shortcut of a closed tour onto the customers satisfying `keep`.
pub fn restrict_order(order: &[usize], keep: impl Fn(usize) -> bool) -> Vec<usize> {
    order.iter().copied().filter(|&v| keep(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DemandSpec;

    fn line(pos: &[f64]) -> Instance {
        Instance::on_line(pos, vec![DemandSpec::Fixed(0.1); pos.len()], 1.0, 1.0).unwrap()
    }

    #[test]
    fn exact_on_line_instance() {
        let inst = line(&[1.0, 2.0]);
        let t = exact_tsp(&inst).unwrap();
        assert_eq!(t.weight, 4.0);
        assert!(is_valid_tour(&t.tour, 2));
    }

    #[test]
    fn single_customer_and_limits() {
        let inst = line(&[1.5]);
        assert_eq!(exact_tsp(&inst).unwrap().weight, 3.0);
        assert_eq!(double_tree_tsp(&inst).weight, 3.0);
        let big = line(&(1..=16).map(|i| i as f64).collect::<Vec<_>>());
        assert_eq!(exact_tsp(&big), Err(TspError::TooLarge { n: 16, limit: 15 }));
    }

    #[test]
    fn two_opt_uncrosses_square() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let m: Vec<Vec<f64>> = pts
            .iter()
            .map(|p| pts.iter().map(|q| ((p[0] - q[0]) as f64).hypot(p[1] - q[1])).collect())
            .collect();
        let inst = Instance::normalized(m, vec![DemandSpec::Fixed(0.1); 3], 1.0, 1.0).unwrap();
        let crossing = TourResult::new(vec![0, 3, 1, 2, 0], &inst, 2.0);
        let fixed = two_opt(&crossing, &inst, 50);
        assert!(fixed.weight < crossing.weight - 1e-9);
        assert!((fixed.weight - 4.0).abs() < 1e-12);
        let again = two_opt(&fixed, &inst, 50);
        assert_eq!(again.tour, fixed.tour);
    }
}
