//! Structural one-dimensional slices of graphs.
//!
//! For a set-valued map with one-dimensional image space, `F(x)` is the
//! slice `{v : (x, v) in gph F}`. The corpus builds graphs from shapes whose
//! slices are exactly representable as finite unions of closed intervals,
//! which keeps image distances d(y, F(x)) exact instead of grid-limited.

use super::{PiecewiseFn, SetExpr, Side};
use crate::vecn::{dist, dot};

/// Finite union of disjoint closed intervals on the line, sorted by lower
/// end. Unbounded ends are +-inf; singletons are zero-length intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet {
    pub parts: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { parts: vec![] }
    }

    pub fn all() -> Self {
        IntervalSet {
            parts: vec![(f64::NEG_INFINITY, f64::INFINITY)],
        }
    }

    pub fn single(lo: f64, hi: f64) -> Self {
        if lo <= hi {
            IntervalSet { parts: vec![(lo, hi)] }
        } else {
            Self::empty()
        }
    }

    pub fn point(v: f64) -> Self {
        Self::single(v, v)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    fn normalize(mut parts: Vec<(f64, f64)>) -> Self {
        parts.retain(|(a, b)| a <= b);
        parts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (a, b) in parts {
            match out.last_mut() {
                Some((_, pb)) if a <= *pb + 1e-12 => *pb = pb.max(b),
                _ => out.push((a, b)),
            }
        }
        IntervalSet { parts: out }
    }

    pub fn union(sets: Vec<IntervalSet>) -> Self {
        Self::normalize(sets.into_iter().flat_map(|s| s.parts).collect())
    }

    pub fn intersect(&self, other: &IntervalSet) -> Self {
        let mut parts = Vec::new();
        for &(a, b) in &self.parts {
            for &(c, d) in &other.parts {
                let lo = a.max(c);
                let hi = b.min(d);
                if lo <= hi {
                    parts.push((lo, hi));
                }
            }
        }
        Self::normalize(parts)
    }

    pub fn shift(&self, s: f64) -> Self {
        IntervalSet {
            parts: self.parts.iter().map(|(a, b)| (a + s, b + s)).collect(),
        }
    }

    pub fn distance(&self, y: f64) -> f64 {
        self.parts
            .iter()
            .map(|&(a, b)| {
                if y < a {
                    a - y
                } else if y > b {
                    y - b
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, y: f64, tau: f64) -> bool {
        self.distance(y) <= tau
    }

    /// Deterministic sample of the slice inside `[wlo, whi]`: interval
    /// endpoints plus an `n`-point fill.
    pub fn sample(&self, wlo: f64, whi: f64, n: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for &(a, b) in &self.parts {
            let lo = a.max(wlo);
            let hi = b.min(whi);
            if lo > hi {
                continue;
            }
            out.push(lo);
            if hi > lo {
                out.push(hi);
                let m = n.max(2);
                for k in 1..m {
                    out.push(lo + (hi - lo) * k as f64 / m as f64);
                }
            }
        }
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup_by(|a, b| (*a - *b).abs() <= 1e-14);
        out
    }
}

/// Interval representation of a one-dimensional `SetExpr`, clipped to the
/// probe `window`; `None` when the shape is not interval-representable.
pub fn intervals_of_1d(set: &SetExpr, window: (f64, f64)) -> Option<IntervalSet> {
    let clip = IntervalSet::single(window.0, window.1);
    let raw = match set {
        SetExpr::Halfspace { a, b } => {
            let a0 = a[0];
            if a0 > 0.0 {
                IntervalSet::single(f64::NEG_INFINITY, b / a0)
            } else if a0 < 0.0 {
                IntervalSet::single(b / a0, f64::INFINITY)
            } else {
                return None;
            }
        }
        SetExpr::ClosedBall { center, r } => IntervalSet::single(center[0] - r, center[0] + r),
        SetExpr::Box { lo, hi } => IntervalSet::single(lo[0], hi[0]),
        SetExpr::Singleton { p } => IntervalSet::point(p[0]),
        SetExpr::FinitePoints { pts } => {
            IntervalSet::union(pts.iter().map(|p| IntervalSet::point(p[0])).collect())
        }
        SetExpr::Polyhedron { halfspaces } => {
            let mut acc = IntervalSet::all();
            for (a, b) in halfspaces {
                let hs = SetExpr::Halfspace { a: a.clone(), b: *b };
                acc = acc.intersect(&intervals_of_1d(&hs, window)?);
            }
            acc
        }
        SetExpr::Translate { inner, shift } => {
            let w = (window.0 - shift[0], window.1 - shift[0]);
            intervals_of_1d(inner, w)?.shift(shift[0])
        }
        SetExpr::Intersect { children } => {
            let mut acc = IntervalSet::all();
            for c in children {
                acc = acc.intersect(&intervals_of_1d(c, window)?);
            }
            acc
        }
        SetExpr::UnionFinite { children } => IntervalSet::union(
            children
                .iter()
                .map(|c| intervals_of_1d(c, window))
                .collect::<Option<Vec<_>>>()?,
        ),
        SetExpr::Empty { .. } => IntervalSet::empty(),
        _ => return None,
    };
    Some(raw.intersect(&clip))
}

/// Roots of `f(t) = x` within the window, by dense sign sampling and
/// bisection per piece.
fn curve_level_set(f: &PiecewiseFn, x: f64, window: (f64, f64)) -> IntervalSet {
    let lo = f.lo.max(window.0);
    let hi = f.hi.min(window.1);
    if !(lo <= hi) {
        return IntervalSet::empty();
    }
    let mut cuts = vec![lo];
    for &b in &f.breakpoints {
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    cuts.push(hi);
    let mut roots: Vec<f64> = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        for side in 0..2 {
            let g = |t: f64| {
                let (l, r) = f.side_values(t);
                (if side == 0 { l } else { r }) - x
            };
            let n = 256;
            let mut prev_t = a;
            let mut prev_v = g(a);
            if prev_v.abs() <= 1e-12 {
                roots.push(a);
            }
            for k in 1..=n {
                let t = a + (b - a) * k as f64 / n as f64;
                let v = g(t);
                if v.abs() <= 1e-12 {
                    roots.push(t);
                } else if prev_v * v < 0.0 {
                    let (mut ta, mut tb) = (prev_t, t);
                    for _ in 0..80 {
                        let tm = 0.5 * (ta + tb);
                        if g(ta) * g(tm) <= 0.0 {
                            tb = tm;
                        } else {
                            ta = tm;
                        }
                    }
                    roots.push(0.5 * (ta + tb));
                }
                prev_t = t;
                prev_v = v;
            }
        }
    }
    IntervalSet::union(roots.into_iter().map(IntervalSet::point).collect())
}

/// The slice `{v : (x, v) in graph}` for a graph in R^{dx+1}, clipped to
/// `window`. `None` when the structure admits no exact slice.
pub fn slice_at(graph: &SetExpr, x: &[f64], window: (f64, f64)) -> Option<IntervalSet> {
    let dx = graph.dim().checked_sub(1)?;
    if x.len() != dx {
        return None;
    }
    let out = match graph {
        SetExpr::EpiRegion { f, side } => {
            if !f.in_domain(x[0], 1e-12) {
                IntervalSet::empty()
            } else {
                match side {
                    Side::Above => IntervalSet::single(f.eval_lsc(x[0]), f64::INFINITY),
                    Side::Below => IntervalSet::single(f64::NEG_INFINITY, f.eval_usc(x[0])),
                }
            }
        }
        SetExpr::GraphOf { f, swapped: false } => {
            if !f.in_domain(x[0], 1e-12) {
                IntervalSet::empty()
            } else {
                let (l, r) = f.side_values(x[0]);
                IntervalSet::union(vec![IntervalSet::point(l), IntervalSet::point(r)])
            }
        }
        SetExpr::GraphOf { f, swapped: true } => curve_level_set(f, x[0], window),
        SetExpr::Halfspace { a, b } => {
            let head = dot(&a[..dx], x);
            let av = a[dx];
            if av.abs() > 1e-12 {
                let bound = (b - head) / av;
                if av > 0.0 {
                    IntervalSet::single(f64::NEG_INFINITY, bound)
                } else {
                    IntervalSet::single(bound, f64::INFINITY)
                }
            } else if head <= *b {
                IntervalSet::all()
            } else {
                IntervalSet::empty()
            }
        }
        SetExpr::ClosedBall { center, r } => {
            let d2 = r * r - dist(&center[..dx], x).powi(2);
            if d2 < 0.0 {
                IntervalSet::empty()
            } else {
                IntervalSet::single(center[dx] - d2.sqrt(), center[dx] + d2.sqrt())
            }
        }
        SetExpr::Box { lo, hi } => {
            if x.iter()
                .zip(lo[..dx].iter().zip(&hi[..dx]))
                .all(|(v, (l, h))| v >= l && v <= h)
            {
                IntervalSet::single(lo[dx], hi[dx])
            } else {
                IntervalSet::empty()
            }
        }
        SetExpr::Singleton { p } => {
            if dist(&p[..dx], x) <= 1e-12 {
                IntervalSet::point(p[dx])
            } else {
                IntervalSet::empty()
            }
        }
        SetExpr::FinitePoints { pts } => IntervalSet::union(
            pts.iter()
                .filter(|p| dist(&p[..dx], x) <= 1e-12)
                .map(|p| IntervalSet::point(p[dx]))
                .collect(),
        ),
        SetExpr::Polyhedron { halfspaces } => {
            let mut acc = IntervalSet::all();
            for (a, b) in halfspaces {
                let hs = SetExpr::Halfspace { a: a.clone(), b: *b };
                acc = acc.intersect(&slice_at(&hs, x, window)?);
            }
            acc
        }
        SetExpr::Translate { inner, shift } => {
            let xin = crate::vecn::sub(x, &shift[..dx]);
            let w = (window.0 - shift[dx], window.1 - shift[dx]);
            slice_at(inner, &xin, w)?.shift(shift[dx])
        }
        SetExpr::Product { factors } => {
            // Only the pattern (X-set) x (1-D value set) is sliceable.
            if factors.len() == 2 && factors[0].dim() == dx && factors[1].dim() == 1 {
                if factors[0].contains_tau(x, 1e-12) {
                    intervals_of_1d(&factors[1], window)?
                } else {
                    IntervalSet::empty()
                }
            } else {
                return None;
            }
        }
        SetExpr::Cylinder { inner, coords, ambient } => {
            // Sliceable when the value coordinate is the cylinder's own
            // last selected coordinate; free value coordinate means no
            // constraint.
            let val = ambient - 1;
            if coords.contains(&val) {
                if *coords.last().unwrap() != val {
                    return None;
                }
                let sel: Vec<f64> = coords[..coords.len() - 1].iter().map(|&c| x[c]).collect();
                slice_at(inner, &sel, window)?
            } else {
                let sel: Vec<f64> = coords.iter().map(|&c| x[c]).collect();
                if inner.contains_tau(&sel, 1e-12) {
                    IntervalSet::all()
                } else {
                    IntervalSet::empty()
                }
            }
        }
        SetExpr::Intersect { children } => {
            let mut acc = IntervalSet::all();
            for c in children {
                acc = acc.intersect(&slice_at(c, x, window)?);
            }
            acc
        }
        SetExpr::UnionFinite { children } => IntervalSet::union(
            children
                .iter()
                .map(|c| slice_at(c, x, window))
                .collect::<Option<Vec<_>>>()?,
        ),
        SetExpr::Empty { .. } => IntervalSet::empty(),
    };
    Some(out.intersect(&IntervalSet::single(window.0, window.1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PiecewiseFn;

    const W: (f64, f64) = (-10.0, 10.0);

    #[test]
    fn epigraph_slice_is_halfline() {
        let f = PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        let g = SetExpr::EpiRegion { f, side: Side::Above };
        let s = slice_at(&g, &[0.5], W).unwrap();
        assert_eq!(s.parts, vec![(-0.25, 10.0)]);
        assert!((s.distance(-1.0) - 0.75).abs() < 1e-12);
    }

    #[test]
    fn swapped_curve_slice_finds_both_roots() {
        // {(t^2, t)}: slice at x = 4 is {-2, 2}.
        let f = PiecewiseFn::new(vec![], vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let g = SetExpr::GraphOf { f, swapped: true };
        let s = slice_at(&g, &[4.0], W).unwrap();
        assert_eq!(s.parts.len(), 2);
        assert!((s.parts[0].0 + 2.0).abs() < 1e-9);
        assert!((s.parts[1].0 - 2.0).abs() < 1e-9);
        // Empty slice for negative x.
        assert!(slice_at(&g, &[-1.0], W).unwrap().is_empty());
    }

    #[test]
    fn translate_and_intersect_slices() {
        let band = SetExpr::Intersect {
            children: vec![
                SetExpr::Halfspace { a: vec![0.0, 1.0], b: 2.0 },
                SetExpr::Halfspace { a: vec![0.0, -1.0], b: 0.0 },
            ],
        };
        let shifted = band.translate(vec![0.0, 1.0]);
        let s = slice_at(&shifted, &[0.3], W).unwrap();
        assert_eq!(s.parts, vec![(1.0, 3.0)]);
    }
}
