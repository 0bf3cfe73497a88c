//! The min-max-distance engine behind every non-intersection test.
//!
//! `min_max_distance` approximates `inf_{u in region} max_i d(u, S_i)` by a
//! multistart grid sweep followed by compass-search descent. The objective
//! is 1-Lipschitz, so the grid value overshoots the infimum by at most the
//! grid covering radius; descent only improves on that.

use super::{GeometryError, SetExpr};
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use crate::verdict::Emptiness;

#[derive(Debug, Clone)]
pub struct MinMaxResult {
    pub value: f64,
    pub argmin: Vec<f64>,
    /// Finest grid step used along any axis.
    pub grid_step: f64,
}

/// Iterator-free multi-index grid over a box, `n` points per axis
/// (endpoints included; `n == 1` yields the box center).
pub fn grid_points(lo: &[f64], hi: &[f64], n: usize) -> Vec<Vec<f64>> {
    let d = lo.len();
    let n = n.max(1);
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let p: Vec<f64> = (0..d)
            .map(|k| {
                if n == 1 || lo[k] == hi[k] {
                    0.5 * (lo[k] + hi[k])
                } else {
                    lo[k] + (hi[k] - lo[k]) * idx[k] as f64 / (n - 1) as f64
                }
            })
            .collect();
        out.push(p);
        let mut k = 0;
        loop {
            if k == d {
                return out;
            }
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Points of `set` inside `[lo, hi]`: grid members plus projections of grid
/// points onto the set (boundary coverage), deduplicated.
pub fn sample_set_in_box(
    set: &SetExpr,
    lo: &[f64],
    hi: &[f64],
    n: usize,
    cfg: &ToleranceConfig,
) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let tol = cfg.tau_geom;
    let mut push = |q: Vec<f64>| {
        if q.iter()
            .zip(lo.iter().zip(hi))
            .all(|(x, (l, h))| *x >= l - tol && *x <= h + tol)
            && !out.iter().any(|o| dist(o, &q) <= 1e-12)
        {
            out.push(q);
        }
    };
    for g in grid_points(lo, hi, n) {
        if set.contains_tau(&g, cfg.tau_geom) {
            push(g.clone());
        }
        if let Some(q) = super::projection_of(set, &g) {
            push(q);
        }
    }
    out
}

/// Infimum of `u -> max_i d(u, sets[i])` over `region`.
///
/// The region must be bounded (have a bounding box); the search grid runs
/// over the box filtered by region membership, then compass descent
/// (projected into the region) polishes the best candidates.
pub fn min_max_distance(
    sets: &[SetExpr],
    region: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<MinMaxResult, GeometryError> {
    let d = region.dim();
    for s in sets {
        if s.dim() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
    }
    let (lo, hi) = region.bounding_box().ok_or(GeometryError::UnboundedRegion)?;
    let objective = |u: &[f64]| -> f64 {
        sets.iter()
            .map(|s| super::projection_of(s, u).map_or(f64::INFINITY, |q| dist(&q, u)))
            .fold(0.0, f64::max)
    };
    let in_region = |u: &[f64]| region.contains_tau(u, 1e-12);

    let mut best_v = f64::INFINITY;
    let mut best_u: Option<Vec<f64>> = None;
    let mut grid_step = hi
        .iter()
        .zip(&lo)
        .map(|(h, l)| h - l)
        .fold(0.0_f64, f64::max);

    // Seed candidates: region-projected set projections of the box center.
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let mut seeds: Vec<Vec<f64>> = Vec::new();
    if let Some(c) = super::projection_of(region, &center) {
        seeds.push(c.clone());
        for s in sets {
            if let Some(q) = super::projection_of(s, &c) {
                if let Some(rq) = super::projection_of(region, &q) {
                    seeds.push(rq);
                }
            }
        }
    }
    for s in &seeds {
        if in_region(s) {
            let v = objective(s);
            if v < best_v {
                best_v = v;
                best_u = Some(s.clone());
            }
        }
    }

    for &n in &cfg.grid {
        grid_step = hi
            .iter()
            .zip(&lo)
            .map(|(h, l)| (h - l) / (n.max(2) - 1) as f64)
            .fold(0.0_f64, f64::max);
        for g in grid_points(&lo, &hi, n) {
            if !in_region(&g) {
                continue;
            }
            let v = objective(&g);
            if v < best_v {
                best_v = v;
                best_u = Some(g);
            }
        }
        // Early exit: a certified-nonempty value needs no refinement.
        if best_v <= cfg.tau_geom * 0.5 {
            break;
        }
    }

    let mut u = match best_u {
        Some(u) => u,
        None => super::projection_of(region, &center).ok_or(GeometryError::UnboundedRegion)?,
    };
    best_v = objective(&u);

    // Compass descent, projected into the region. Full hypercube moves, not
    // just axis moves: the max objective has diagonal ridges where
    // coordinate descent stalls.
    let mut h = grid_step.max(1e-9);
    let floor = 1e-11 * (1.0 + norm(&u));
    while h > floor {
        let mut improved = false;
        let mut moves: Vec<Vec<f64>> = Vec::new();
        let mut step_idx = vec![0usize; d];
        loop {
            if step_idx.iter().any(|&s| s != 1) {
                let c: Vec<f64> = (0..d)
                    .map(|k| u[k] + (step_idx[k] as f64 - 1.0) * h)
                    .collect();
                moves.push(c);
            }
            let mut k = 0;
            loop {
                if k == d {
                    break;
                }
                step_idx[k] += 1;
                if step_idx[k] < 3 {
                    break;
                }
                step_idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        // Pulls toward each set's projection and toward their midpoint
        // (the midpoint move descends where one-set pulls trade off).
        let projs: Vec<Vec<f64>> = sets
            .iter()
            .filter_map(|s| super::projection_of(s, &u))
            .collect();
        for q in &projs {
            let dir = sub(q, &u);
            if norm(&dir) > 0.0 {
                moves.push(axpy(&u, (h / norm(&dir)).min(1.0), &dir));
            }
        }
        if !projs.is_empty() {
            let mut mid = zeros(d);
            for q in &projs {
                mid = add(&mid, q);
            }
            mid = scale(&mid, 1.0 / projs.len() as f64);
            let dir = sub(&mid, &u);
            if norm(&dir) > 0.0 {
                moves.push(axpy(&u, (h / norm(&dir)).min(1.0), &dir));
                moves.push(mid);
            }
        }
        for cand in moves {
            let cand = match super::projection_of(region, &cand) {
                Some(c) => c,
                None => continue,
            };
            let v = objective(&cand);
            if v < best_v - 1e-15 {
                best_v = v;
                u = cand;
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }

    Ok(MinMaxResult {
        value: best_v,
        argmin: u,
        grid_step,
    })
}

/// Three-valued emptiness decision at a given scale: `scale` should be the
/// radius of the ball (or half-diameter of the region) being tested, so the
/// margins are honest relative to the region size.
pub fn classify_emptiness(value: f64, scale: f64, cfg: &ToleranceConfig) -> Emptiness {
    if value > cfg.margin_at(scale) {
        Emptiness::Empty
    } else if value < cfg.tau_geom_at(scale) {
        Emptiness::Nonempty
    } else {
        Emptiness::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn separated_halflines_gap() {
        let sets = vec![SetExpr::halfline_le(0.0), SetExpr::halfline_ge(1.0)];
        let region = SetExpr::interval(-2.0, 2.0);
        let r = min_max_distance(&sets, &region, &cfg()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-6, "value {}", r.value);
        assert!((r.argmin[0] - 0.5).abs() < 1e-6, "argmin {:?}", r.argmin);
    }

    #[test]
    fn shared_point_gives_zero() {
        let sets = vec![SetExpr::halfline_le(0.0), SetExpr::halfline_ge(0.0)];
        let region = SetExpr::interval(-1.0, 1.0);
        let r = min_max_distance(&sets, &region, &cfg()).unwrap();
        assert!(r.value < 1e-9);
        assert_eq!(
            classify_emptiness(r.value, 1.0, &cfg()),
            Emptiness::Nonempty
        );
    }

    #[test]
    fn small_ball_region_endpoint() {
        let sets = vec![SetExpr::halfline_le(-0.1), SetExpr::halfline_ge(0.1)];
        let region = SetExpr::ball(vec![0.0], 0.05);
        let r = min_max_distance(&sets, &region, &cfg()).unwrap();
        assert!((r.value - 0.1).abs() < 1e-6, "value {}", r.value);
        assert!(r.argmin[0].abs() < 1e-6);
        assert_eq!(classify_emptiness(r.value, 0.05, &cfg()), Emptiness::Empty);
    }

    #[test]
    fn unbounded_region_is_an_error() {
        let sets = vec![SetExpr::halfline_le(0.0)];
        let region = SetExpr::halfline_le(0.0);
        assert!(matches!(
            min_max_distance(&sets, &region, &cfg()),
            Err(GeometryError::UnboundedRegion)
        ));
    }

    #[test]
    fn grid_lower_bound_invariant() {
        // Engine value is never worse than the brute-force grid minimum.
        let sets = vec![
            SetExpr::ball(vec![0.6, 0.0], 0.2),
            SetExpr::Halfspace { a: vec![0.0, 1.0], b: -0.4 },
        ];
        let region = SetExpr::Box { lo: vec![-1.0, -1.0], hi: vec![1.0, 1.0] };
        let r = min_max_distance(&sets, &region, &cfg()).unwrap();
        let mut brute = f64::INFINITY;
        for g in grid_points(&[-1.0, -1.0], &[1.0, 1.0], 64) {
            let v = sets
                .iter()
                .map(|s| s.distance(&g).unwrap().0)
                .fold(0.0_f64, f64::max);
            brute = brute.min(v);
        }
        assert!(r.value <= brute + 1e-12);
        assert!(r.value >= brute - r.grid_step);
    }
}
