//! Euclidean projections onto symbolic sets.
//!
//! Closed forms for halfspaces, balls, boxes and small polyhedra (active-set
//! enumeration, exact up to 8 faces); piecewise-curve regions via dense
//! 1-D sampling with local polish; composites by recursion. Intersections
//! fall back to cyclic projections with a pull-toward-the-query polish, the
//! one approximate case, and the min-max-distance engine never relies on it.

use super::{PiecewiseFn, SetExpr, Side};
use crate::vecn::*;

/// Nearest (or near-nearest, for raw intersections) point of `set` to `p`;
/// `None` for the empty set.
pub fn projection_of(set: &SetExpr, p: &[f64]) -> Option<Vec<f64>> {
    match set {
        SetExpr::Halfspace { a, b } => {
            let slack = dot(a, p) - b;
            if slack <= 0.0 {
                Some(p.to_vec())
            } else {
                Some(axpy(p, -slack / dot(a, a), a))
            }
        }
        SetExpr::ClosedBall { center, r } => {
            let d = dist(center, p);
            if d <= *r {
                Some(p.to_vec())
            } else {
                Some(axpy(center, r / d, &sub(p, center)))
            }
        }
        SetExpr::Box { lo, hi } => Some(
            p.iter()
                .zip(lo.iter().zip(hi))
                .map(|(x, (l, h))| x.max(*l).min(*h))
                .collect(),
        ),
        SetExpr::Singleton { p: q } => Some(q.clone()),
        SetExpr::FinitePoints { pts } => pts
            .iter()
            .min_by(|a, b| dist(a, p).total_cmp(&dist(b, p)))
            .cloned(),
        SetExpr::Polyhedron { halfspaces } => project_polyhedron(halfspaces, p),
        SetExpr::EpiRegion { f, side } => Some(project_epi(f, *side, p)),
        SetExpr::GraphOf { f, swapped } => {
            let q = if *swapped { vec![p[1], p[0]] } else { p.to_vec() };
            let r = project_curve(f, &q);
            Some(if *swapped { vec![r[1], r[0]] } else { r })
        }
        SetExpr::Translate { inner, shift } => {
            projection_of(inner, &sub(p, shift)).map(|q| add(&q, shift))
        }
        SetExpr::Product { factors } => {
            let mut out = Vec::with_capacity(p.len());
            let mut off = 0;
            for f in factors {
                let d = f.dim();
                out.extend(projection_of(f, &p[off..off + d])?);
                off += d;
            }
            Some(out)
        }
        SetExpr::Cylinder { inner, coords, .. } => {
            let sel: Vec<f64> = coords.iter().map(|&c| p[c]).collect();
            let q = projection_of(inner, &sel)?;
            let mut out = p.to_vec();
            for (k, &c) in coords.iter().enumerate() {
                out[c] = q[k];
            }
            Some(out)
        }
        SetExpr::UnionFinite { children } => children
            .iter()
            .filter_map(|c| projection_of(c, p))
            .min_by(|a, b| dist(a, p).total_cmp(&dist(b, p))),
        SetExpr::Intersect { children } => project_intersection(children, p),
        SetExpr::Empty { .. } => None,
    }
}

/// Exact projection onto a small polyhedron: enumerate active-face subsets,
/// solve the equality-constrained least squares for each, keep the best
/// feasible candidate.
fn project_polyhedron(halfspaces: &[(Vec<f64>, f64)], p: &[f64]) -> Option<Vec<f64>> {
    let feas_tau = 1e-9;
    let feasible = |q: &[f64]| {
        halfspaces
            .iter()
            .all(|(a, b)| (dot(a, q) - b) / norm(a) <= feas_tau)
    };
    if feasible(p) {
        return Some(p.to_vec());
    }
    let d = p.len();
    let m = halfspaces.len();
    let mut best: Option<Vec<f64>> = None;
    let mut consider = |q: Vec<f64>| {
        if feasible(&q) && best.as_ref().map_or(true, |b| dist(&q, p) < dist(b, p)) {
            best = Some(q);
        }
    };
    // Subsets of active faces of size 1..=d.
    for mask in 1u32..(1 << m) {
        let idx: Vec<usize> = (0..m).filter(|k| mask >> k & 1 == 1).collect();
        if idx.is_empty() || idx.len() > d {
            continue;
        }
        // q = p - A^T (A A^T)^{-1} (A p - b)
        let k = idx.len();
        let mut gram = vec![vec![0.0; k]; k];
        let mut rhs = vec![0.0; k];
        for (i, &fi) in idx.iter().enumerate() {
            for (j, &fj) in idx.iter().enumerate() {
                gram[i][j] = dot(&halfspaces[fi].0, &halfspaces[fj].0);
            }
            rhs[i] = dot(&halfspaces[fi].0, p) - halfspaces[fi].1;
        }
        if let Some(lam) = solve(gram, rhs, 1e-12) {
            let mut q = p.to_vec();
            for (i, &fi) in idx.iter().enumerate() {
                q = axpy(&q, -lam[i], &halfspaces[fi].0);
            }
            consider(q);
        }
    }
    best
}

/// Dense 1-D minimization of `h` over `[a, b]` followed by golden-section
/// polish around the best brackets.
fn minimize_1d(h: &dyn Fn(f64) -> f64, a: f64, b: f64, samples: usize) -> (f64, f64) {
    let n = samples.max(8);
    let mut best_t = a;
    let mut best_v = h(a);
    for k in 0..=n {
        let t = a + (b - a) * k as f64 / n as f64;
        let v = h(t);
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }
    let step = (b - a) / n as f64;
    let (mut lo, mut hi) = ((best_t - step).max(a), (best_t + step).min(b));
    let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
    for _ in 0..80 {
        let m1 = lo + phi * (hi - lo);
        let m2 = hi - phi * (hi - lo);
        if h(m1) <= h(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let t = 0.5 * (lo + hi);
    let v = h(t);
    if v < best_v {
        (t, v)
    } else {
        (best_t, best_v)
    }
}

/// Candidate parameter windows for curve projections: the query's own
/// abscissa widened by the current distance bound, clipped per piece.
fn piece_windows(f: &PiecewiseFn, center: f64, radius: f64) -> Vec<(f64, f64)> {
    let lo = f.lo.max(center - radius);
    let hi = f.hi.min(center + radius);
    if !(lo <= hi) {
        // Window misses the domain: fall back to the nearest domain endpoint.
        let t = if center < f.lo { f.lo } else { f.hi };
        if t.is_finite() {
            return vec![(t, t)];
        }
        return vec![];
    }
    let mut cuts = vec![lo];
    for &b in &f.breakpoints {
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    cuts.push(hi);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

fn nearest_of(cands: Vec<Vec<f64>>, p: &[f64]) -> Option<Vec<f64>> {
    cands
        .into_iter()
        .min_by(|a, b| dist(a, p).total_cmp(&dist(b, p)))
}

fn project_epi(f: &PiecewiseFn, side: Side, p: &[f64]) -> Vec<f64> {
    let (px, py) = (p[0], p[1]);
    let sgn = match side {
        Side::Above => 1.0,
        Side::Below => -1.0,
    };
    // Inside (at or beyond the curve within the domain): identity.
    if f.in_domain(px, 0.0) {
        let boundary = match side {
            Side::Above => f.eval_lsc(px),
            Side::Below => f.eval_usc(px),
        };
        if sgn * (py - boundary) >= 0.0 {
            return p.to_vec();
        }
    }
    let mut cands: Vec<Vec<f64>> = Vec::new();
    // Vertical drop (or nearest domain endpoint) as the anchor candidate.
    if f.in_domain(px, 0.0) {
        let boundary = match side {
            Side::Above => f.eval_lsc(px),
            Side::Below => f.eval_usc(px),
        };
        cands.push(vec![px, boundary]);
    } else {
        let t = if px < f.lo { f.lo } else { f.hi };
        if t.is_finite() {
            let (l, r) = f.side_values(t);
            let v = match side {
                Side::Above => l.min(r).max(py),
                Side::Below => l.max(r).min(py),
            };
            cands.push(vec![t, v]);
        }
    }
    let radius = cands
        .iter()
        .map(|q| dist(q, p))
        .fold(f64::INFINITY, f64::min)
        .min(1e6);
    for (a, b) in piece_windows(f, px, radius + 1e-12) {
        for side_val in 0..2 {
            let h = |t: f64| {
                let (l, r) = f.side_values(t);
                let v = if side_val == 0 { l } else { r };
                // Best feasible second coordinate at parameter t.
                let y = if sgn > 0.0 { v.max(py) } else { v.min(py) };
                (t - px) * (t - px) + (y - py) * (y - py)
            };
            let (t, _) = minimize_1d(&h, a, b, 96);
            let (l, r) = f.side_values(t);
            let v = if side_val == 0 { l } else { r };
            let y = if sgn > 0.0 { v.max(py) } else { v.min(py) };
            cands.push(vec![t, y]);
        }
    }
    nearest_of(cands, p).unwrap_or_else(|| p.to_vec())
}

fn project_curve(f: &PiecewiseFn, p: &[f64]) -> Vec<f64> {
    let (px, py) = (p[0], p[1]);
    let mut cands: Vec<Vec<f64>> = Vec::new();
    // Anchor: the curve point straight above/below the query (or at the
    // nearest domain endpoint).
    let t0 = px.clamp(f.lo, f.hi);
    if t0.is_finite() {
        let (l, r) = f.side_values(t0);
        cands.push(vec![t0, l]);
        cands.push(vec![t0, r]);
    }
    let radius = cands
        .iter()
        .map(|q| dist(q, p))
        .fold(f64::INFINITY, f64::min)
        .min(1e6);
    for (a, b) in piece_windows(f, px, radius + 1e-12) {
        for side_val in 0..2 {
            let h = |t: f64| {
                let (l, r) = f.side_values(t);
                let v = if side_val == 0 { l } else { r };
                (t - px) * (t - px) + (v - py) * (v - py)
            };
            let (t, _) = minimize_1d(&h, a, b, 96);
            let (l, r) = f.side_values(t);
            let v = if side_val == 0 { l } else { r };
            cands.push(vec![t, v]);
        }
    }
    nearest_of(cands, p).unwrap_or_else(|| p.to_vec())
}

/// Approximate projection onto an intersection: cyclic projections to land
/// in the set, then a bisection pull back toward the query point.
fn project_intersection(children: &[SetExpr], p: &[f64]) -> Option<Vec<f64>> {
    let tau = 1e-8;
    let in_all = |q: &[f64]| children.iter().all(|c| c.contains_tau(q, tau));
    if in_all(p) {
        return Some(p.to_vec());
    }
    let converge = |start: &[f64]| -> Option<Vec<f64>> {
        let mut u = start.to_vec();
        for _ in 0..200 {
            let mut moved = 0.0;
            for c in children {
                let q = projection_of(c, &u)?;
                moved += dist(&q, &u);
                u = q;
            }
            if moved <= 1e-12 {
                break;
            }
        }
        in_all(&u).then_some(u)
    };
    let mut u = converge(p)?;
    // Pull toward p along the segment while staying in the set.
    for _ in 0..40 {
        let mid = axpy(&u, 0.5, &sub(p, &u));
        match converge(&mid) {
            Some(q) if dist(&q, p) < dist(&u, p) - 1e-14 => u = q,
            _ => break,
        }
    }
    Some(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SetExpr;

    #[test]
    fn halfline_distance_and_projection() {
        let s = SetExpr::halfline_le(0.0);
        let (d, proj) = s.distance(&[1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!((proj.unwrap()[0] - 0.0).abs() < 1e-12);
    }

    #[test]
    fn empty_distance_is_infinite() {
        let s = SetExpr::Empty { dim: 2 };
        let (d, proj) = s.distance(&[0.0, 0.0]).unwrap();
        assert!(d.is_infinite());
        assert!(proj.is_none());
    }

    #[test]
    fn distance_to_parabola_epigraph() {
        // gph F3 = {y >= -x^2}; d((0,-1)) = sqrt(3)/2.
        let f = PiecewiseFn::new(vec![], vec![vec![0.0, 0.0, -1.0]]).unwrap();
        let s = SetExpr::EpiRegion { f, side: Side::Above };
        let (d, proj) = s.distance(&[0.0, -1.0]).unwrap();
        assert!((d - 3.0_f64.sqrt() / 2.0).abs() < 1e-6, "d = {d}");
        let q = proj.unwrap();
        assert!((q[1] + q[0] * q[0]).abs() < 1e-6);
    }

    #[test]
    fn polyhedron_projection_corner() {
        // Quadrant x <= 0, y <= 0; project (1, 2) onto the corner.
        let s = SetExpr::Polyhedron {
            halfspaces: vec![(vec![1.0, 0.0], 0.0), (vec![0.0, 1.0], 0.0)],
        };
        let (d, proj) = s.distance(&[1.0, 2.0]).unwrap();
        let q = proj.unwrap();
        assert!(norm(&q) < 1e-9);
        assert!((d - 5.0_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn intersection_projection_box_halfspace() {
        let s = SetExpr::Intersect {
            children: vec![
                SetExpr::Box { lo: vec![-1.0, -1.0], hi: vec![1.0, 1.0] },
                SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 },
            ],
        };
        let (d, proj) = s.distance(&[0.5, 2.0]).unwrap();
        let q = proj.unwrap();
        assert!((q[0] - 0.5).abs() < 1e-6 && q[1].abs() < 1e-6, "q = {q:?}");
        assert!((d - 2.0).abs() < 1e-6);
    }

    #[test]
    fn curve_projection_inverse_parabola() {
        // {(y^2, y)}: nearest point to (0, 0) is (0, 0) itself.
        let f = PiecewiseFn::new(vec![], vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let s = SetExpr::GraphOf { f, swapped: true };
        let (d, _) = s.distance(&[0.0, 0.0]).unwrap();
        assert!(d < 1e-9);
        let (d2, _) = s.distance(&[-1.0, 0.0]).unwrap();
        assert!((d2 - 1.0).abs() < 1e-6);
    }
}
