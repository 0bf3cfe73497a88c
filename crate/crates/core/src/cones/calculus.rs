//! Subdifferentials via epigraph normal cones, and coderivative slices of
//! graph normal cones.

use super::{normal_cone, ConeError, Flavor};
use crate::geometry::{PiecewiseFn, SetExpr, SetValuedMap, Side};
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use serde::{Deserialize, Serialize};

/// Closed convex subset of the line: the subdifferential of a function of
/// one variable. May be empty (Frechet subdifferential at a concave kink).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubdiffSet {
    pub lo: f64,
    pub hi: f64,
    pub empty: bool,
}

impl SubdiffSet {
    pub fn empty() -> Self {
        SubdiffSet { lo: f64::NAN, hi: f64::NAN, empty: true }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        SubdiffSet { lo, hi, empty: false }
    }

    pub fn contains(&self, s: f64, tol: f64) -> bool {
        !self.empty && s >= self.lo - tol && s <= self.hi + tol
    }

    pub fn is_singleton(&self, tol: f64) -> bool {
        !self.empty && self.lo.is_finite() && self.hi.is_finite() && self.hi - self.lo <= tol
    }
}

/// Subdifferential of a piecewise polynomial at `x`, computed through the
/// normal cone to the epigraph: the slice {s : (s, -1) in N_epi(x, f(x))}.
pub fn subdifferential(
    f: &PiecewiseFn,
    x: f64,
    flavor: Flavor,
    cfg: &ToleranceConfig,
) -> Result<SubdiffSet, ConeError> {
    if !f.in_domain(x, cfg.tau_geom) {
        return Err(ConeError::OutsideDomain);
    }
    let epi = SetExpr::EpiRegion { f: f.clone(), side: Side::Above };
    let y = f.eval_lsc(x);
    let cone = normal_cone(&epi, &[x, y], flavor, cfg)?;
    // Interval slice: extreme points come from single generators with
    // negative second component; recession from horizontal generators.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut any = false;
    for g in &cone.generators {
        if g[1] < -1e-12 {
            let s = g[0] / (-g[1]);
            lo = lo.min(s);
            hi = hi.max(s);
            any = true;
        }
    }
    if !any {
        return Ok(SubdiffSet::empty());
    }
    for g in &cone.generators {
        if g[1].abs() <= 1e-12 {
            if g[0] > 0.0 {
                hi = f64::INFINITY;
            } else if g[0] < 0.0 {
                lo = f64::NEG_INFINITY;
            }
        }
    }
    Ok(SubdiffSet::interval(lo, hi))
}

/// Polyhedral slice of a graph normal cone: extreme points plus recession
/// rays in the domain dual space. The empty slice is a legal value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoderivativeSlice {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub rays: Vec<Vec<f64>>,
}

impl CoderivativeSlice {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Representative elements: extreme points plus ray extensions at the
    /// given scales.
    pub fn candidates(&self, ray_scales: &[f64]) -> Vec<Vec<f64>> {
        let mut out = self.points.clone();
        for p in &self.points {
            for r in &self.rays {
                for &s in ray_scales {
                    out.push(axpy(p, s, r));
                }
            }
        }
        out
    }

    /// Distance from `z` to the slice, estimated over candidates with a
    /// line-search along each ray.
    pub fn distance(&self, z: &[f64]) -> f64 {
        if self.is_empty() {
            return f64::INFINITY;
        }
        let mut best = f64::INFINITY;
        for p in &self.points {
            best = best.min(dist(p, z));
            for r in &self.rays {
                // Project z - p on the ray direction.
                let t = dot(&sub(z, p), r).max(0.0);
                best = best.min(dist(&axpy(p, t, r), z));
            }
        }
        best
    }
}

/// Nonnegative solutions of `sum_j lambda_j b_j = target` supported on small
/// subsets: extreme points of the feasible polyhedron.
fn basic_solutions(bs: &[Vec<f64>], target: &[f64], max_support: usize) -> Vec<Vec<f64>> {
    let m = bs.len();
    let dy = target.len();
    let mut sols: Vec<Vec<f64>> = Vec::new();
    if norm(target) <= 1e-12 {
        sols.push(vec![0.0; m]);
    }
    let masks: u32 = 1 << m.min(16);
    for mask in 1..masks {
        let idx: Vec<usize> = (0..m.min(16)).filter(|k| mask >> k & 1 == 1).collect();
        if idx.len() > max_support {
            continue;
        }
        let k = idx.len();
        // Least squares M lambda = target via normal equations.
        let mut gram = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                gram[i][j] = dot(&bs[gi], &bs[gj]);
            }
            rhs[i] = dot(&bs[gi], target);
        }
        let Some(lam) = solve(gram, rhs, 1e-12) else { continue };
        if lam.iter().any(|&l| l < -1e-10) {
            continue;
        }
        // Verify the residual in the original dy-dimensional system.
        let mut acc = vec![0.0; dy];
        for (i, &gi) in idx.iter().enumerate() {
            acc = axpy(&acc, lam[i].max(0.0), &bs[gi]);
        }
        if dist(&acc, target) > 1e-9 * (1.0 + norm(target)) {
            continue;
        }
        let mut full = vec![0.0; m];
        for (i, &gi) in idx.iter().enumerate() {
            full[gi] = lam[i].max(0.0);
        }
        sols.push(full);
    }
    sols
}

/// Nonnegative nontrivial solutions of `sum_j nu_j b_j = 0` on supports of
/// size <= 3 (recession rays of the feasible polyhedron).
fn homogeneous_rays(bs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = bs.len();
    let mut rays: Vec<Vec<f64>> = Vec::new();
    let mut push = |nu: Vec<f64>| {
        if nu.iter().all(|&x| x >= -1e-12) && nu.iter().any(|&x| x > 1e-10) {
            let mut v = nu.clone();
            let n = norm(&v);
            for x in v.iter_mut() {
                *x = (*x / n).max(0.0);
            }
            if !rays.iter().any(|r: &Vec<f64>| dist(r, &v) <= 1e-9) {
                rays.push(v);
            }
        }
    };
    for j in 0..m {
        if norm(&bs[j]) <= 1e-12 {
            let mut nu = vec![0.0; m];
            nu[j] = 1.0;
            push(nu);
        }
    }
    for j in 0..m {
        for k in j + 1..m {
            // nu_j b_j + nu_k b_k = 0 with nu >= 0: anti-parallel pair.
            let (nj, nk) = (norm(&bs[j]), norm(&bs[k]));
            if nj <= 1e-12 || nk <= 1e-12 {
                continue;
            }
            if dist(&scale(&bs[j], 1.0 / nj), &scale(&bs[k], -1.0 / nk)) <= 1e-9 {
                let mut nu = vec![0.0; m];
                nu[j] = 1.0 / nj;
                nu[k] = 1.0 / nk;
                push(nu);
            }
        }
    }
    // Triples only matter in two-dimensional image spaces.
    if bs.first().map_or(0, |b| b.len()) == 2 {
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    let rows = [
                        [bs[a][0], bs[b][0], bs[c][0]],
                        [bs[a][1], bs[b][1], bs[c][1]],
                    ];
                    // Cross product of the two rows spans the nullspace.
                    let nu3 = [
                        rows[0][1] * rows[1][2] - rows[0][2] * rows[1][1],
                        rows[0][2] * rows[1][0] - rows[0][0] * rows[1][2],
                        rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0],
                    ];
                    for sgn in [1.0, -1.0] {
                        let mut nu = vec![0.0; m];
                        nu[a] = sgn * nu3[0];
                        nu[b] = sgn * nu3[1];
                        nu[c] = sgn * nu3[2];
                        push(nu);
                    }
                }
            }
        }
    }
    rays
}

/// Coderivative slice D*F(x, y)(ystar) = {x* : (x*, -ystar) in N_gph(x, y)}.
pub fn coderivative(
    map: &SetValuedMap,
    x: &[f64],
    y: &[f64],
    ystar: &[f64],
    flavor: Flavor,
    cfg: &ToleranceConfig,
) -> Result<CoderivativeSlice, ConeError> {
    let mut p = x.to_vec();
    p.extend_from_slice(y);
    if !map.graph.contains_tau(&p, cfg.tau_geom) {
        return Err(ConeError::OutsideGraph);
    }
    let cone = normal_cone(&map.graph, &p, flavor, cfg)?;
    let dx = map.dom_dim;
    let dy = map.cod_dim;
    let a_parts: Vec<Vec<f64>> = cone.generators.iter().map(|g| g[..dx].to_vec()).collect();
    let b_parts: Vec<Vec<f64>> = cone.generators.iter().map(|g| g[dx..].to_vec()).collect();
    let target = neg(ystar);
    let sols = basic_solutions(&b_parts, &target, dy);
    let mut points: Vec<Vec<f64>> = Vec::new();
    for lam in sols {
        let mut xs = vec![0.0; dx];
        for (j, &l) in lam.iter().enumerate() {
            xs = axpy(&xs, l, &a_parts[j]);
        }
        if !points.iter().any(|q| dist(q, &xs) <= 1e-10) {
            points.push(xs);
        }
    }
    let mut rays: Vec<Vec<f64>> = Vec::new();
    if !points.is_empty() {
        for nu in homogeneous_rays(&b_parts) {
            let mut xs = vec![0.0; dx];
            for (j, &l) in nu.iter().enumerate() {
                xs = axpy(&xs, l, &a_parts[j]);
            }
            if norm(&xs) > 1e-10 {
                let u = unit(&xs).unwrap();
                if !rays.iter().any(|r| dist(r, &u) <= 1e-9) {
                    rays.push(u);
                }
            }
        }
    }
    Ok(CoderivativeSlice { dim: dx, points, rays })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn f4_map() -> SetValuedMap {
        let f = PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        SetValuedMap::new(1, 1, SetExpr::EpiRegion { f, side: Side::Above }).unwrap()
    }

    #[test]
    fn abs_subdifferential_at_zero() {
        let fabs = PiecewiseFn::new(vec![0.0], vec![vec![0.0, -1.0], vec![0.0, 1.0]]).unwrap();
        let s = subdifferential(&fabs, 0.0, Flavor::Convex, &cfg()).unwrap();
        assert!((s.lo + 1.0).abs() < 1e-9 && (s.hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn smooth_square_subdifferential() {
        let fsq = PiecewiseFn::new(vec![], vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let s = subdifferential(&fsq, 1.0, Flavor::Frechet, &cfg()).unwrap();
        assert!(s.is_singleton(1e-9));
        assert!((s.lo - 2.0).abs() < 1e-9);
    }

    #[test]
    fn indicator_subdifferential_matches_normal_cone() {
        // Indicator of (-inf, 0]: constant 0 on the domain.
        let ind = PiecewiseFn::with_domain(vec![], vec![vec![0.0]], f64::NEG_INFINITY, 0.0)
            .unwrap();
        let s = subdifferential(&ind, 0.0, Flavor::Frechet, &cfg()).unwrap();
        assert!((s.lo - 0.0).abs() < 1e-9);
        assert!(s.hi.is_infinite());
    }

    #[test]
    fn concave_kink_frechet_subdiff_is_empty() {
        let s = subdifferential(
            &PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap(),
            0.0,
            Flavor::Frechet,
            &cfg(),
        )
        .unwrap();
        assert!(s.empty);
    }

    #[test]
    fn f4_coderivative_at_parabola_point() {
        let m = f4_map();
        let s = coderivative(&m, &[0.25], &[-0.0625], &[1.0], Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!((s.points[0][0] + 0.5).abs() < 1e-9, "points {:?}", s.points);
        assert!(s.rays.is_empty());
    }

    #[test]
    fn constant_map_coderivative_slices() {
        // F1(x) = [0, inf): graph is the halfplane y >= 0.
        let f1 = SetValuedMap::new(
            1,
            1,
            SetExpr::Halfspace { a: vec![0.0, -1.0], b: 0.0 },
        )
        .unwrap();
        let s = coderivative(&f1, &[0.0], &[0.0], &[1.0], Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!(norm(&s.points[0]) < 1e-10);
        let s = coderivative(&f1, &[0.0], &[0.0], &[-1.0], Flavor::Frechet, &cfg()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn identity_map_coderivative() {
        // Graph {(t, t)}.
        let f = PiecewiseFn::new(vec![], vec![vec![0.0, 1.0]]).unwrap();
        let idm = SetValuedMap::from_piecewise(f);
        let s = coderivative(&idm, &[0.3], &[0.3], &[2.0], Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(s.points.len(), 1);
        assert!((s.points[0][0] - 2.0).abs() < 1e-9);
    }
}
