//! Polyhedral cone algebra: double description and exact projection.
//!
//! Cones here are small (dimension <= 4, at most a dozen rays), so the
//! double-description sweep keeps every combined ray and prunes conic
//! redundancy afterwards by the projection test.

use crate::vecn::*;

const RAY_TOL: f64 = 1e-10;

fn dedup_rays(rays: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for r in rays {
        if let Some(u) = unit(&r) {
            if !out.iter().any(|o| dist(o, &u) <= 1e-9) {
                out.push(u);
            }
        }
    }
    out
}

/// Generators of the cone {v : <n_i, v> <= 0 for all i} in R^dim.
///
/// Starts from the generator set of the whole space and cuts one halfspace
/// at a time, combining positive-side with negative-side rays on the cut
/// hyperplane.
pub fn generators_from_halfspaces(dim: usize, normals: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut rays: Vec<Vec<f64>> = Vec::new();
    for k in 0..dim {
        let mut e = zeros(dim);
        e[k] = 1.0;
        rays.push(e.clone());
        e[k] = -1.0;
        rays.push(e);
    }
    for n in normals {
        if norm(n) <= RAY_TOL {
            continue;
        }
        let mut keep: Vec<Vec<f64>> = Vec::new();
        let mut pos: Vec<Vec<f64>> = Vec::new();
        let mut negz: Vec<Vec<f64>> = Vec::new();
        for r in rays {
            let s = dot(n, &r);
            if s <= RAY_TOL {
                keep.push(r.clone());
            }
            if s > RAY_TOL {
                pos.push(r);
            } else if s < -RAY_TOL {
                negz.push(r);
            }
        }
        for p in &pos {
            for q in &negz {
                // <n, c> = 0 by construction; c in cone(p, q).
                let c = axpy(&scale(q, dot(n, p)), -dot(n, q), p);
                if norm(&c) > RAY_TOL {
                    keep.push(c);
                }
            }
        }
        rays = dedup_rays(keep);
    }
    prune_redundant(rays)
}

/// Drop rays that already lie in the cone of the remaining rays.
pub fn prune_redundant(rays: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut rays = dedup_rays(rays);
    let mut k = 0;
    while k < rays.len() {
        let mut rest = rays.clone();
        let r = rest.remove(k);
        if !rest.is_empty() && cone_distance(&rest, &r) <= 1e-9 {
            rays.remove(k);
        } else {
            k += 1;
        }
    }
    rays
}

/// Exact Euclidean projection of `x` onto cone(generators) by active-subset
/// enumeration (nonnegative least squares on every subset of size <= dim).
pub fn project_onto_cone(generators: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let d = x.len();
    if generators.is_empty() {
        return zeros(d);
    }
    let m = generators.len();
    let mut best = zeros(d);
    let mut best_d = norm(x);
    let max_mask: u32 = 1 << m.min(16);
    for mask in 1..max_mask {
        let idx: Vec<usize> = (0..m.min(16)).filter(|k| mask >> k & 1 == 1).collect();
        if idx.len() > d {
            continue;
        }
        let k = idx.len();
        let mut gram = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                gram[i][j] = dot(&generators[gi], &generators[gj]);
            }
            rhs[i] = dot(&generators[gi], x);
        }
        let Some(lam) = solve(gram, rhs, 1e-12) else {
            continue;
        };
        if lam.iter().any(|&l| l < -1e-10) {
            continue;
        }
        let mut q = zeros(d);
        for (i, &gi) in idx.iter().enumerate() {
            q = axpy(&q, lam[i].max(0.0), &generators[gi]);
        }
        let dq = dist(&q, x);
        if dq < best_d {
            best_d = dq;
            best = q;
        }
    }
    best
}

/// d(x, cone(generators)).
pub fn cone_distance(generators: &[Vec<f64>], x: &[f64]) -> f64 {
    dist(&project_onto_cone(generators, x), x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfplane_cone_has_lineality() {
        // {v in R^2 : v_y <= 0}: rays (+-1, 0) and (0, -1).
        let gens = generators_from_halfspaces(2, &[vec![0.0, 1.0]]);
        assert_eq!(gens.len(), 3);
        assert!(cone_distance(&gens, &[1.0, -1.0]) < 1e-9);
        assert!(cone_distance(&gens, &[0.0, 1.0]) > 0.9);
    }

    #[test]
    fn wedge_cone_from_two_halfspaces() {
        // {v : v_x <= 0, v_y <= 0} = third quadrant.
        let gens = generators_from_halfspaces(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(gens.len(), 2);
        assert!(cone_distance(&gens, &[-1.0, -2.0]) < 1e-9);
        let d = cone_distance(&gens, &[1.0, 0.0]);
        assert!((d - 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_cone_from_opposing_halfspaces() {
        let gens = generators_from_halfspaces(1, &[vec![1.0], vec![-1.0]]);
        assert!(gens.is_empty());
        assert!((cone_distance(&gens, &[2.0]) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn projection_onto_ray() {
        let gens = vec![vec![1.0, 0.0]];
        let p = project_onto_cone(&gens, &[2.0, 1.0]);
        assert!((p[0] - 2.0).abs() < 1e-12 && p[1].abs() < 1e-12);
        let q = project_onto_cone(&gens, &[-2.0, 1.0]);
        assert!(norm(&q) < 1e-12);
    }

    #[test]
    fn prune_removes_interior_ray() {
        let rays = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let pruned = prune_redundant(rays);
        assert_eq!(pruned.len(), 2);
    }
}
