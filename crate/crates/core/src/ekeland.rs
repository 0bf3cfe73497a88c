//! Ekeland variational principle, exact on finite metric spaces.
//!
//! On a finite space the classical improving-point iteration terminates and
//! all three conclusions hold exactly: the returned point dominates the
//! distance-penalized objective everywhere.

use crate::vecn::{dist, norm, sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvpError {
    #[error("precondition violated: f(x) >= inf f + eps")]
    PreconditionViolated,
    #[error("invalid metric: {0}")]
    MetricInvalid(String),
    #[error("iteration exceeded the step cap")]
    StepCapExceeded,
}

/// Finite metric space given by its distance matrix.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    n: usize,
    metric: Vec<f64>,
}

impl FiniteMetricSpace {
    pub fn new(n: usize, metric: Vec<f64>) -> Result<Self, EvpError> {
        if metric.len() != n * n {
            return Err(EvpError::MetricInvalid("matrix size mismatch".into()));
        }
        let tau = 1e-9;
        let at = |i: usize, j: usize| metric[i * n + j];
        for i in 0..n {
            if at(i, i).abs() > tau {
                return Err(EvpError::MetricInvalid("nonzero diagonal".into()));
            }
            for j in 0..n {
                if at(i, j) < 0.0 || (at(i, j) - at(j, i)).abs() > tau {
                    return Err(EvpError::MetricInvalid("not symmetric nonnegative".into()));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if at(i, j) > at(i, k) + at(k, j) + tau {
                        return Err(EvpError::MetricInvalid("triangle inequality fails".into()));
                    }
                }
            }
        }
        Ok(FiniteMetricSpace { n, metric })
    }

    /// Euclidean distance matrix of a point cloud.
    pub fn from_points(pts: &[Vec<f64>]) -> Self {
        let n = pts.len();
        let mut metric = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                metric[i * n + j] = dist(&pts[i], &pts[j]);
            }
        }
        FiniteMetricSpace { n, metric }
    }

    /// Shortest-path (min-plus) completion of a symmetric nonnegative
    /// matrix into a metric.
    pub fn metricize(n: usize, mut m: Vec<f64>) -> Result<Self, EvpError> {
        if m.len() != n * n {
            return Err(EvpError::MetricInvalid("matrix size mismatch".into()));
        }
        for i in 0..n {
            m[i * n + i] = 0.0;
            for j in 0..i {
                let v = 0.5 * (m[i * n + j].abs() + m[j * n + i].abs());
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = m[i * n + k] + m[k * n + j];
                    if via < m[i * n + j] {
                        m[i * n + j] = via;
                    }
                }
            }
        }
        FiniteMetricSpace::new(n, m)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.metric[i * self.n + j]
    }
}

/// Exact EVP search: returns `xhat` with `d(xhat, x) < lam`,
/// `f(xhat) <= f(x)`, and `f(u) + (eps/lam) d(u, xhat) >= f(xhat)` for all
/// `u` in the space. Ties in the improving-point selection break by lowest
/// index.
pub fn evp_search(
    space: &FiniteMetricSpace,
    f: &[f64],
    x: usize,
    eps: f64,
    lam: f64,
) -> Result<usize, EvpError> {
    assert_eq!(f.len(), space.len());
    assert!(eps > 0.0 && lam > 0.0);
    let inf = f.iter().copied().fold(f64::INFINITY, f64::min);
    if !(f[x] < inf + eps - 1e-12 * (1.0 + inf.abs())) {
        return Err(EvpError::PreconditionViolated);
    }
    let kappa = eps / lam;
    let mut cur = x;
    for _ in 0..space.len().max(64) {
        let mut best = cur;
        let mut best_v = f[cur];
        for u in 0..space.len() {
            let v = f[u] + kappa * space.d(u, cur);
            if v < best_v || (v == best_v && u < best) {
                best_v = v;
                best = u;
            }
        }
        if best == cur {
            return Ok(cur);
        }
        cur = best;
    }
    Err(EvpError::StepCapExceeded)
}

/// Check the three EVP conclusions exactly; used by tests and the
/// separation pipeline's self-verification.
pub fn evp_conclusions_hold(
    space: &FiniteMetricSpace,
    f: &[f64],
    x: usize,
    xhat: usize,
    eps: f64,
    lam: f64,
) -> bool {
    let kappa = eps / lam;
    if space.d(xhat, x) >= lam {
        return false;
    }
    if f[xhat] > f[x] {
        return false;
    }
    (0..space.len()).all(|u| f[u] + kappa * space.d(u, xhat) >= f[xhat] - 1e-12)
}

/// Product of factor grids with the gamma-weighted maximum metric
/// max(|u_1 - v_1|, ..., |u_{n-1} - v_{n-1}|, gamma |u_n - v_n|).
#[derive(Debug, Clone)]
pub struct WeightedProductGrid {
    pub factors: Vec<Vec<Vec<f64>>>,
    pub gamma: f64,
}

impl WeightedProductGrid {
    pub fn new(factors: Vec<Vec<Vec<f64>>>, gamma: f64) -> Self {
        assert!(gamma > 0.0);
        assert!(factors.iter().all(|f| !f.is_empty()));
        WeightedProductGrid { factors, gamma }
    }

    pub fn len(&self) -> usize {
        self.factors.iter().map(|f| f.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.iter().any(|f| f.is_empty())
    }

    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.factors.len()];
        for (k, f) in self.factors.iter().enumerate() {
            idx[k] = flat % f.len();
            flat /= f.len();
        }
        idx
    }

    pub fn tuple<'a>(&'a self, idx: &[usize]) -> Vec<&'a [f64]> {
        idx.iter()
            .enumerate()
            .map(|(k, &i)| self.factors[k][i].as_slice())
            .collect()
    }

    pub fn weighted_dist(&self, a: &[usize], b: &[usize]) -> f64 {
        let n = self.factors.len();
        let mut m: f64 = 0.0;
        for k in 0..n {
            let d = dist(&self.factors[k][a[k]], &self.factors[k][b[k]]);
            m = m.max(if k + 1 == n { self.gamma * d } else { d });
        }
        m
    }

    /// The dual norm of the weighted maximum norm:
    /// sum_{i<=n-1} |u*_i| + |u*_n| / gamma.
    pub fn dual_norm(&self, parts: &[Vec<f64>]) -> f64 {
        let n = parts.len();
        parts
            .iter()
            .enumerate()
            .map(|(k, p)| if k + 1 == n { norm(p) / self.gamma } else { norm(p) })
            .sum()
    }
}

/// EVP on a weighted product grid without materializing the metric matrix.
pub fn evp_product(
    grid: &WeightedProductGrid,
    objective: &dyn Fn(&[&[f64]]) -> f64,
    start: &[usize],
    eps: f64,
    lam: f64,
) -> Result<Vec<usize>, EvpError> {
    let total = grid.len();
    let f_at = |idx: &[usize]| objective(&grid.tuple(idx));
    let mut inf = f64::INFINITY;
    for flat in 0..total {
        inf = inf.min(f_at(&grid.decode(flat)));
    }
    let f_start = f_at(start);
    if !(f_start < inf + eps - 1e-12 * (1.0 + inf.abs())) {
        return Err(EvpError::PreconditionViolated);
    }
    let kappa = eps / lam;
    let mut cur = start.to_vec();
    let mut f_cur = f_start;
    let cap = 100_000usize;
    for _ in 0..cap {
        let mut best = cur.clone();
        let mut best_v = f_cur;
        for flat in 0..total {
            let idx = grid.decode(flat);
            let v = f_at(&idx) + kappa * grid.weighted_dist(&idx, &cur);
            if v < best_v {
                best_v = v;
                best = idx;
            }
        }
        if best == cur {
            return Ok(cur);
        }
        f_cur = f_at(&best);
        cur = best;
    }
    Err(EvpError::StepCapExceeded)
}

/// Verify the product-grid EVP conclusions exactly.
pub fn evp_product_conclusions_hold(
    grid: &WeightedProductGrid,
    objective: &dyn Fn(&[&[f64]]) -> f64,
    start: &[usize],
    xhat: &[usize],
    eps: f64,
    lam: f64,
) -> bool {
    let f_at = |idx: &[usize]| objective(&grid.tuple(idx));
    if grid.weighted_dist(xhat, start) >= lam {
        return false;
    }
    let f_hat = f_at(xhat);
    if f_hat > f_at(start) {
        return false;
    }
    let kappa = eps / lam;
    (0..grid.len()).all(|flat| {
        let idx = grid.decode(flat);
        f_at(&idx) + kappa * grid.weighted_dist(&idx, xhat) >= f_hat - 1e-12
    })
}

/// max_{i <= n-1} |u_i - u_n| on a tuple of factor points.
pub fn maxdist_objective(parts: &[&[f64]]) -> f64 {
    let n = parts.len();
    let last = parts[n - 1];
    parts[..n - 1]
        .iter()
        .map(|p| norm(&sub(p, last)))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn global_minimizer_is_valid_fixed_point() {
        let sp = FiniteMetricSpace::from_points(&[vec![0.0], vec![1.0], vec![2.0]]);
        let f = vec![0.1, 0.5, 0.9];
        let xhat = evp_search(&sp, &f, 0, 1.0, 1.0).unwrap();
        assert_eq!(xhat, 0);
        assert!(evp_conclusions_hold(&sp, &f, 0, xhat, 1.0, 1.0));
    }

    #[test]
    fn three_point_chain_lands_on_middle() {
        // Unit-gap metric on {0,1,2}, f = (1, 0.5, 0.2), eps = 0.9, lam = 2.
        let sp = FiniteMetricSpace::from_points(&[vec![0.0], vec![1.0], vec![2.0]]);
        let f = vec![1.0, 0.5, 0.2];
        let xhat = evp_search(&sp, &f, 0, 0.9, 2.0).unwrap();
        assert_eq!(xhat, 1);
        assert!(evp_conclusions_hold(&sp, &f, 0, xhat, 0.9, 2.0));
    }

    #[test]
    fn tight_lambda_keeps_start() {
        // f = (1, 0.95), d(0,1) = 1, eps = 0.1, lam = 0.5: moving to 1 is
        // excluded by the distance bound; 0 dominates.
        let sp = FiniteMetricSpace::from_points(&[vec![0.0], vec![1.0]]);
        let f = vec![1.0, 0.95];
        let xhat = evp_search(&sp, &f, 0, 0.1, 0.5).unwrap();
        assert_eq!(xhat, 0);
        assert!(evp_conclusions_hold(&sp, &f, 0, xhat, 0.1, 0.5));
    }

    #[test]
    fn precondition_violation_detected() {
        let sp = FiniteMetricSpace::from_points(&[vec![0.0], vec![1.0]]);
        let f = vec![1.0, 0.0];
        assert_eq!(
            evp_search(&sp, &f, 0, 1.0, 1.0),
            Err(EvpError::PreconditionViolated)
        );
    }

    #[test]
    fn metricize_produces_valid_metric() {
        let m = vec![0.0, 5.0, 1.0, 5.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let sp = FiniteMetricSpace::metricize(3, m).unwrap();
        // 0 -> 2 -> 1 shortcut: d(0,1) = 2.
        assert!((sp.d(0, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn product_grid_evp_on_halflines() {
        let g1: Vec<Vec<f64>> = (0..21).map(|k| vec![-1.0 + k as f64 * 0.05]).collect();
        let g2: Vec<Vec<f64>> = (0..21).map(|k| vec![0.5 + k as f64 * 0.05]).collect();
        let grid = WeightedProductGrid::new(vec![g1, g2], 1.0);
        let start = vec![20, 0]; // (0.0, 0.5): already optimal (f = 0.5)
        let xhat = evp_product(&grid, &maxdist_objective, &start, 0.1, 0.05).unwrap();
        assert!(evp_product_conclusions_hold(
            &grid,
            &maxdist_objective,
            &start,
            &xhat,
            0.1,
            0.05
        ));
        let t = grid.tuple(&xhat);
        assert!((t[0][0] - 0.0).abs() < 1e-12);
        assert!((t[1][0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn weighted_metric_scales_last_factor() {
        let grid = WeightedProductGrid::new(
            vec![vec![vec![0.0], vec![1.0]], vec![vec![0.0], vec![1.0]]],
            2.0,
        );
        assert!((grid.weighted_dist(&[0, 0], &[1, 0]) - 1.0).abs() < 1e-12);
        assert!((grid.weighted_dist(&[0, 0], &[0, 1]) - 2.0).abs() < 1e-12);
        assert!((grid.dual_norm(&[vec![1.0], vec![1.0]]) - 1.5).abs() < 1e-12);
    }
}
