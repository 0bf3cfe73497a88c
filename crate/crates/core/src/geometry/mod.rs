//! Closed-set algebra over R^n (n <= 4).
//!
//! Every [`SetExpr`] value denotes a closed subset of its ambient space.
//! Open sets from the underlying theory (open balls, strict level sets) are
//! represented by their closures; the callers compensate with strict-margin
//! comparisons, which is sound for every emptiness certificate produced
//! here: emptiness of the closure implies emptiness of the open set.

mod dist;
mod minmax;
mod slice;

pub use dist::projection_of;
pub use minmax::{
    classify_emptiness, grid_points, min_max_distance, sample_set_in_box, MinMaxResult,
};
pub use slice::{intervals_of_1d, slice_at, IntervalSet};

use crate::tol::ToleranceConfig;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MAX_DIM: usize = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("region is unbounded; supply a bounding box")]
    UnboundedRegion,
    #[error("invalid construction: {0}")]
    Invalid(String),
}

/// A point of the ambient space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self, GeometryError> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(GeometryError::Invalid(format!(
                "ambient dimension must be 1..={MAX_DIM}, got {}",
                coords.len()
            )));
        }
        if !crate::vecn::is_finite(&coords) {
            return Err(GeometryError::Invalid("coordinates must be finite".into()));
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Piecewise polynomial function of one variable, degree <= 4.
///
/// `pieces[k]` (ascending coefficients) applies on the k-th interval cut by
/// the sorted interior `breakpoints`; the domain may be further clipped to
/// `[lo, hi]` (infinite ends allowed). Evaluation at a breakpoint is
/// lower-semicontinuous (the smaller one-sided value), so epigraphs of these
/// functions are closed; hypographs use the upper-semicontinuous evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFn {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
    pub lo: f64,
    pub hi: f64,
    /// Continuity at each breakpoint, determined at construction within
    /// tau_num.
    pub continuous: Vec<bool>,
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck)
}

fn poly_derive(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &ck)| k as f64 * ck)
        .collect()
}

impl PiecewiseFn {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        Self::with_domain(breakpoints, pieces, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn with_domain(
        breakpoints: Vec<f64>,
        pieces: Vec<Vec<f64>>,
        lo: f64,
        hi: f64,
    ) -> Result<Self, GeometryError> {
        if pieces.len() != breakpoints.len() + 1 {
            return Err(GeometryError::Invalid(format!(
                "need {} pieces for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                pieces.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeometryError::Invalid(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        if pieces.iter().any(|p| p.is_empty() || p.len() > 5) {
            return Err(GeometryError::Invalid(
                "piece degree must be 0..=4 with at least one coefficient".into(),
            ));
        }
        if !(lo < hi) {
            return Err(GeometryError::Invalid("domain must satisfy lo < hi".into()));
        }
        let tau = 1e-9;
        let continuous = breakpoints
            .iter()
            .enumerate()
            .map(|(k, &b)| (poly_eval(&pieces[k], b) - poly_eval(&pieces[k + 1], b)).abs() <= tau)
            .collect();
        Ok(PiecewiseFn {
            breakpoints,
            pieces,
            lo,
            hi,
            continuous,
        })
    }

    /// Constant function.
    pub fn constant(c: f64) -> Self {
        PiecewiseFn::new(vec![], vec![vec![c]]).unwrap()
    }

    pub fn in_domain(&self, x: f64, tau: f64) -> bool {
        x >= self.lo - tau && x <= self.hi + tau
    }

    /// Piece index to the left of `x` (the piece governing `x` away from
    /// breakpoints).
    fn left_piece(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < x)
    }

    /// Piece index to the right of `x`; differs from [`Self::left_piece`]
    /// exactly when `x` is a breakpoint.
    fn right_piece(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    /// One-sided values at `x` (left, right); equal away from breakpoints.
    pub fn side_values(&self, x: f64) -> (f64, f64) {
        let l = poly_eval(&self.pieces[self.left_piece(x)], x);
        let ri = self.right_piece(x);
        if ri == self.left_piece(x) {
            (l, l)
        } else {
            (l, poly_eval(&self.pieces[ri], x))
        }
    }

    /// Lower-semicontinuous evaluation (closure of the epigraph).
    pub fn eval_lsc(&self, x: f64) -> f64 {
        let (l, r) = self.side_values(x);
        l.min(r)
    }

    /// Upper-semicontinuous evaluation (closure of the hypograph).
    pub fn eval_usc(&self, x: f64) -> f64 {
        let (l, r) = self.side_values(x);
        l.max(r)
    }

    /// One-sided derivatives at `x`: (left, right).
    pub fn one_sided_derivatives(&self, x: f64) -> (f64, f64) {
        let dl = poly_eval(&poly_derive(&self.pieces[self.left_piece(x)]), x);
        let dr = poly_eval(&poly_derive(&self.pieces[self.right_piece(x)]), x);
        (dl, dr)
    }

    /// True when `x` is an interior breakpoint of the domain.
    pub fn is_breakpoint(&self, x: f64, tau: f64) -> Option<usize> {
        self.breakpoints.iter().position(|&b| (b - x).abs() <= tau)
    }

    pub fn piece_eval(&self, k: usize, x: f64) -> f64 {
        poly_eval(&self.pieces[k], x)
    }

    pub fn n_pieces(&self) -> usize {
        self.pieces.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// {(x, y) : y >= f(x)}
    Above,
    /// {(x, y) : y <= f(x)}
    Below,
}

/// Symbolic closed subset of R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SetExpr {
    /// {u : <a, u> <= b}, a != 0.
    Halfspace { a: Vec<f64>, b: f64 },
    ClosedBall { center: Vec<f64>, r: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Singleton { p: Vec<f64> },
    FinitePoints { pts: Vec<Vec<f64>> },
    /// Intersection of finitely many halfspaces.
    Polyhedron { halfspaces: Vec<(Vec<f64>, f64)> },
    /// Epigraph (side Above) or hypograph (side Below) of a piecewise
    /// polynomial curve; ambient dimension 2, first coordinate is the curve
    /// parameter.
    EpiRegion { f: PiecewiseFn, side: Side },
    /// The curve {(t, f(t))} itself; `swapped` flips to {(f(t), t)}.
    GraphOf { f: PiecewiseFn, swapped: bool },
    /// inner + shift (pointwise translation).
    Translate { inner: Box<SetExpr>, shift: Vec<f64> },
    Product { factors: Vec<SetExpr> },
    /// {u in R^ambient : (u[coords[0]], ..., u[coords[k-1]]) in inner}; the
    /// remaining coordinates are free. Expresses constraints on
    /// non-adjacent coordinates (the multi-mapping embeddings).
    Cylinder {
        inner: Box<SetExpr>,
        coords: Vec<usize>,
        ambient: usize,
    },
    Intersect { children: Vec<SetExpr> },
    UnionFinite { children: Vec<SetExpr> },
    Empty { dim: usize },
}

/// Symbolic transform applied by [`transform`]. `Translate { a }` builds the
/// set `S - a`, matching the translation convention of the underlying
/// variational definitions.
#[derive(Debug, Clone)]
pub enum TransformOp {
    Translate { a: Vec<f64> },
    ProductWith(SetExpr),
    IntersectWith(SetExpr),
}

impl SetExpr {
    pub fn dim(&self) -> usize {
        match self {
            SetExpr::Halfspace { a, .. } => a.len(),
            SetExpr::ClosedBall { center, .. } => center.len(),
            SetExpr::Box { lo, .. } => lo.len(),
            SetExpr::Singleton { p } => p.len(),
            SetExpr::FinitePoints { pts } => pts.first().map_or(0, |p| p.len()),
            SetExpr::Polyhedron { halfspaces } => halfspaces.first().map_or(0, |(a, _)| a.len()),
            SetExpr::EpiRegion { .. } | SetExpr::GraphOf { .. } => 2,
            SetExpr::Translate { inner, .. } => inner.dim(),
            SetExpr::Product { factors } => factors.iter().map(|f| f.dim()).sum(),
            SetExpr::Cylinder { ambient, .. } => *ambient,
            SetExpr::Intersect { children } | SetExpr::UnionFinite { children } => {
                children.first().map_or(0, |c| c.dim())
            }
            SetExpr::Empty { dim } => *dim,
        }
    }

    /// Structural validation: closedness is by construction, but dimensions
    /// must agree and normals must be nonzero.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let d = self.dim();
        if d == 0 || d > MAX_DIM {
            return Err(GeometryError::Invalid(format!(
                "ambient dimension must be 1..={MAX_DIM}, got {d}"
            )));
        }
        match self {
            SetExpr::Halfspace { a, .. } => {
                if crate::vecn::norm(a) <= 0.0 {
                    return Err(GeometryError::Invalid("halfspace normal is zero".into()));
                }
            }
            SetExpr::ClosedBall { r, .. } => {
                if *r < 0.0 {
                    return Err(GeometryError::Invalid("ball radius is negative".into()));
                }
            }
            SetExpr::Box { lo, hi } => {
                if lo.len() != hi.len() || lo.iter().zip(hi).any(|(l, h)| l > h) {
                    return Err(GeometryError::Invalid("box bounds inconsistent".into()));
                }
            }
            SetExpr::FinitePoints { pts } => {
                if pts.is_empty() || pts.iter().any(|p| p.len() != d) {
                    return Err(GeometryError::Invalid(
                        "finite point list empty or dimension-inconsistent".into(),
                    ));
                }
            }
            SetExpr::Polyhedron { halfspaces } => {
                if halfspaces.is_empty() {
                    return Err(GeometryError::Invalid("polyhedron needs halfspaces".into()));
                }
                for (a, _) in halfspaces {
                    if a.len() != d || crate::vecn::norm(a) <= 0.0 {
                        return Err(GeometryError::Invalid(
                            "polyhedron halfspace normal zero or dimension-inconsistent".into(),
                        ));
                    }
                }
            }
            SetExpr::Translate { inner, shift } => {
                if shift.len() != inner.dim() {
                    return Err(GeometryError::DimensionMismatch {
                        expected: inner.dim(),
                        got: shift.len(),
                    });
                }
                inner.validate()?;
            }
            SetExpr::Product { factors } => {
                for f in factors {
                    f.validate()?;
                }
            }
            SetExpr::Cylinder { inner, coords, ambient } => {
                if coords.len() != inner.dim()
                    || coords.iter().any(|&c| c >= *ambient)
                    || coords.windows(2).any(|w| w[1] <= w[0])
                {
                    return Err(GeometryError::Invalid(
                        "cylinder coordinates must be strictly increasing and in range".into(),
                    ));
                }
                inner.validate()?;
            }
            SetExpr::Intersect { children } | SetExpr::UnionFinite { children } => {
                if children.is_empty() {
                    return Err(GeometryError::Invalid(
                        "intersection/union needs at least one child".into(),
                    ));
                }
                for c in children {
                    c.validate()?;
                    if c.dim() != d {
                        return Err(GeometryError::DimensionMismatch {
                            expected: d,
                            got: c.dim(),
                        });
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Membership within `cfg.tau_geom`; exact for primitives.
    pub fn contains(&self, p: &[f64], cfg: &ToleranceConfig) -> Result<bool, GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(self.contains_tau(p, cfg.tau_geom))
    }

    pub(crate) fn contains_tau(&self, p: &[f64], tau: f64) -> bool {
        use crate::vecn::*;
        match self {
            SetExpr::Halfspace { a, b } => (dot(a, p) - b) / norm(a) <= tau,
            SetExpr::ClosedBall { center, r } => dist(center, p) <= r + tau,
            SetExpr::Box { lo, hi } => p
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(x, (l, h))| *x >= l - tau && *x <= h + tau),
            SetExpr::Singleton { p: q } => dist(p, q) <= tau,
            SetExpr::FinitePoints { pts } => pts.iter().any(|q| dist(p, q) <= tau),
            SetExpr::Polyhedron { halfspaces } => halfspaces
                .iter()
                .all(|(a, b)| (dot(a, p) - b) / norm(a) <= tau),
            SetExpr::EpiRegion { f, side } => {
                if !f.in_domain(p[0], tau) {
                    return false;
                }
                match side {
                    Side::Above => p[1] >= f.eval_lsc(p[0]) - tau,
                    Side::Below => p[1] <= f.eval_usc(p[0]) + tau,
                }
            }
            SetExpr::GraphOf { f, swapped } => {
                let (t, v) = if *swapped { (p[1], p[0]) } else { (p[0], p[1]) };
                if !f.in_domain(t, tau) {
                    return false;
                }
                let (l, r) = f.side_values(t);
                (v - l).abs() <= tau || (v - r).abs() <= tau
            }
            SetExpr::Translate { inner, shift } => {
                inner.contains_tau(&crate::vecn::sub(p, shift), tau)
            }
            SetExpr::Product { factors } => {
                let mut off = 0;
                factors.iter().all(|f| {
                    let d = f.dim();
                    let ok = f.contains_tau(&p[off..off + d], tau);
                    off += d;
                    ok
                })
            }
            SetExpr::Cylinder { inner, coords, .. } => {
                let sel: Vec<f64> = coords.iter().map(|&c| p[c]).collect();
                inner.contains_tau(&sel, tau)
            }
            SetExpr::Intersect { children } => children.iter().all(|c| c.contains_tau(p, tau)),
            SetExpr::UnionFinite { children } => children.iter().any(|c| c.contains_tau(p, tau)),
            SetExpr::Empty { .. } => false,
        }
    }

    /// Distance from `p` to the set with (near-)attaining projection.
    /// Returns `(+inf, None)` for the empty set.
    pub fn distance(&self, p: &[f64]) -> Result<(f64, Option<Vec<f64>>), GeometryError> {
        if p.len() != self.dim() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim(),
                got: p.len(),
            });
        }
        Ok(match projection_of(self, p) {
            Some(q) => (crate::vecn::dist(p, &q), Some(q)),
            None => (f64::INFINITY, None),
        })
    }

    /// Axis-aligned bounding box when the set is bounded.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match self {
            SetExpr::Halfspace { .. } | SetExpr::EpiRegion { .. } => None,
            SetExpr::ClosedBall { center, r } => Some((
                center.iter().map(|c| c - r).collect(),
                center.iter().map(|c| c + r).collect(),
            )),
            SetExpr::Box { lo, hi } => Some((lo.clone(), hi.clone())),
            SetExpr::Singleton { p } => Some((p.clone(), p.clone())),
            SetExpr::FinitePoints { pts } => {
                let d = pts[0].len();
                let mut lo = vec![f64::INFINITY; d];
                let mut hi = vec![f64::NEG_INFINITY; d];
                for p in pts {
                    for k in 0..d {
                        lo[k] = lo[k].min(p[k]);
                        hi[k] = hi[k].max(p[k]);
                    }
                }
                Some((lo, hi))
            }
            SetExpr::Polyhedron { .. } => None,
            SetExpr::GraphOf { f, swapped } => {
                if !(f.lo.is_finite() && f.hi.is_finite()) {
                    return None;
                }
                // Polynomial range over a closed interval via dense sampling.
                let mut vmin = f64::INFINITY;
                let mut vmax = f64::NEG_INFINITY;
                let n = 256;
                for k in 0..=n {
                    let t = f.lo + (f.hi - f.lo) * k as f64 / n as f64;
                    let (l, r) = f.side_values(t);
                    vmin = vmin.min(l.min(r));
                    vmax = vmax.max(l.max(r));
                }
                let (lo, hi) = if *swapped {
                    (vec![vmin, f.lo], vec![vmax, f.hi])
                } else {
                    (vec![f.lo, vmin], vec![f.hi, vmax])
                };
                Some((lo, hi))
            }
            SetExpr::Translate { inner, shift } => inner.bounding_box().map(|(lo, hi)| {
                (crate::vecn::add(&lo, shift), crate::vecn::add(&hi, shift))
            }),
            SetExpr::Product { factors } => {
                let mut lo = Vec::new();
                let mut hi = Vec::new();
                for f in factors {
                    let (l, h) = f.bounding_box()?;
                    lo.extend(l);
                    hi.extend(h);
                }
                Some((lo, hi))
            }
            SetExpr::Cylinder { .. } => None,
            SetExpr::Intersect { children } => {
                // Intersection is bounded as soon as one child is.
                let mut best: Option<(Vec<f64>, Vec<f64>)> = None;
                for c in children {
                    if let Some((l, h)) = c.bounding_box() {
                        best = Some(match best {
                            None => (l, h),
                            Some((bl, bh)) => (
                                bl.iter().zip(&l).map(|(a, b)| a.max(*b)).collect(),
                                bh.iter().zip(&h).map(|(a, b)| a.min(*b)).collect(),
                            ),
                        });
                    }
                }
                best
            }
            SetExpr::UnionFinite { children } => {
                let mut lo: Option<Vec<f64>> = None;
                let mut hi: Option<Vec<f64>> = None;
                for c in children {
                    let (l, h) = c.bounding_box()?;
                    lo = Some(match lo {
                        None => l,
                        Some(bl) => bl.iter().zip(&l).map(|(a, b)| a.min(*b)).collect(),
                    });
                    hi = Some(match hi {
                        None => h,
                        Some(bh) => bh.iter().zip(&h).map(|(a, b)| a.max(*b)).collect(),
                    });
                }
                Some((lo?, hi?))
            }
            SetExpr::Empty { dim } => Some((vec![0.0; *dim], vec![0.0; *dim])),
        }
    }

    /// Convenience constructors used throughout the corpus.
    pub fn halfline_le(b: f64) -> SetExpr {
        SetExpr::Halfspace { a: vec![1.0], b }
    }

    pub fn halfline_ge(b: f64) -> SetExpr {
        SetExpr::Halfspace { a: vec![-1.0], b: -b }
    }

    pub fn interval(lo: f64, hi: f64) -> SetExpr {
        SetExpr::Box { lo: vec![lo], hi: vec![hi] }
    }

    pub fn ball(center: Vec<f64>, r: f64) -> SetExpr {
        SetExpr::ClosedBall { center, r }
    }

    pub fn translate(self, shift: Vec<f64>) -> SetExpr {
        SetExpr::Translate { inner: Box::new(self), shift }
    }

    pub fn product(factors: Vec<SetExpr>) -> SetExpr {
        SetExpr::Product { factors }
    }
}

/// Symbolic set transform; the denotation equals the set-theoretic
/// operation. `Translate { a }` yields `S - a`.
pub fn transform(set: &SetExpr, op: TransformOp) -> Result<SetExpr, GeometryError> {
    let out = match op {
        TransformOp::Translate { a } => {
            if a.len() != set.dim() {
                return Err(GeometryError::DimensionMismatch {
                    expected: set.dim(),
                    got: a.len(),
                });
            }
            SetExpr::Translate {
                inner: Box::new(set.clone()),
                shift: crate::vecn::neg(&a),
            }
        }
        TransformOp::ProductWith(other) => SetExpr::Product {
            factors: vec![set.clone(), other],
        },
        TransformOp::IntersectWith(other) => {
            if other.dim() != set.dim() {
                return Err(GeometryError::DimensionMismatch {
                    expected: set.dim(),
                    got: other.dim(),
                });
            }
            SetExpr::Intersect {
                children: vec![set.clone(), other],
            }
        }
    };
    out.validate()?;
    Ok(out)
}

/// Set-valued map F: R^dx => R^dy represented by its graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetValuedMap {
    pub dom_dim: usize,
    pub cod_dim: usize,
    pub graph: SetExpr,
}

impl SetValuedMap {
    pub fn new(dom_dim: usize, cod_dim: usize, graph: SetExpr) -> Result<Self, GeometryError> {
        if graph.dim() != dom_dim + cod_dim {
            return Err(GeometryError::DimensionMismatch {
                expected: dom_dim + cod_dim,
                got: graph.dim(),
            });
        }
        graph.validate()?;
        Ok(SetValuedMap {
            dom_dim,
            cod_dim,
            graph,
        })
    }

    /// Map defined by a single-valued piecewise function: F(x) = {f(x)}.
    pub fn from_piecewise(f: PiecewiseFn) -> Self {
        SetValuedMap {
            dom_dim: 1,
            cod_dim: 1,
            graph: SetExpr::GraphOf { f, swapped: false },
        }
    }

    pub fn graph_contains(&self, x: &[f64], y: &[f64], cfg: &ToleranceConfig) -> bool {
        let mut p = x.to_vec();
        p.extend_from_slice(y);
        self.graph.contains_tau(&p, cfg.tau_geom)
    }

    /// The value set F(x) as intervals, clipped to `window`; exact for the
    /// structured graph class (one-dimensional image space only).
    pub fn value_set(&self, x: &[f64], window: (f64, f64)) -> Option<IntervalSet> {
        if self.cod_dim != 1 {
            return None;
        }
        slice_at(&self.graph, x, window)
    }

    /// d(y, F(x)) for a one-dimensional image space: exact via the interval
    /// slice when the structure allows, else a projection-based estimate.
    /// `+inf` when F(x) is empty.
    pub fn image_distance(&self, x: &[f64], y: f64, window: (f64, f64)) -> f64 {
        if let Some(s) = self.value_set(x, window) {
            return s.distance(y);
        }
        // Fallback: probe the graph near (x, y) and accept the candidate if
        // its domain part pins x.
        let mut p = x.to_vec();
        p.push(y);
        match projection_of(&self.graph, &p) {
            Some(q) if crate::vecn::dist(&q[..self.dom_dim], x) <= 1e-6 => {
                (q[self.dom_dim] - y).abs()
            }
            _ => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn halfline_boundary_membership() {
        let s = SetExpr::halfline_le(0.0);
        assert!(s.contains(&[0.0], &cfg()).unwrap());
        assert!(s.contains(&[-3.0], &cfg()).unwrap());
        assert!(!s.contains(&[0.5], &cfg()).unwrap());
    }

    #[test]
    fn piecewise_f2_membership() {
        // x+1 for x < -1, 0 for x >= -1; epigraph region.
        let f = PiecewiseFn::new(vec![-1.0], vec![vec![1.0, 1.0], vec![0.0]]).unwrap();
        let g2 = SetExpr::EpiRegion { f, side: Side::Above };
        assert!(g2.contains(&[1.0, 0.5], &cfg()).unwrap());
        assert!(g2.contains(&[-2.0, -1.0], &cfg()).unwrap());
        assert!(!g2.contains(&[-2.0, -1.5], &cfg()).unwrap());
    }

    #[test]
    fn graph_f4_contains_parabola_point() {
        // x for x < 0, -x^2 for x >= 0.
        let f = PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        let g4 = SetExpr::EpiRegion { f, side: Side::Above };
        assert!(g4.contains(&[0.25, -0.0625], &cfg()).unwrap());
        assert!(g4.contains(&[-1.0, -1.0], &cfg()).unwrap());
        assert!(g4.contains(&[1.0, -1.0], &cfg()).unwrap());
        assert!(!g4.contains(&[1.0, -1.5], &cfg()).unwrap());
    }

    #[test]
    fn translate_matches_paper_convention() {
        let s = SetExpr::halfline_le(0.0);
        let t = transform(&s, TransformOp::Translate { a: vec![0.5] }).unwrap();
        // Omega - a = (-inf, -0.5]
        assert!(t.contains(&[-0.5], &cfg()).unwrap());
        assert!(!t.contains(&[-0.2], &cfg()).unwrap());
    }

    #[test]
    fn product_membership_splits_coordinates() {
        let s = transform(
            &SetExpr::halfline_le(0.0),
            TransformOp::ProductWith(SetExpr::halfline_ge(0.0)),
        )
        .unwrap();
        assert!(s.contains(&[-1.0, 2.0], &cfg()).unwrap());
        assert!(!s.contains(&[1.0, 2.0], &cfg()).unwrap());
    }

    #[test]
    fn union_of_epiregions_for_f4_contains_both_branches() {
        let left = PiecewiseFn::with_domain(vec![], vec![vec![0.0, 1.0]], f64::NEG_INFINITY, 0.0)
            .unwrap();
        let right =
            PiecewiseFn::with_domain(vec![], vec![vec![0.0, 0.0, -1.0]], 0.0, f64::INFINITY)
                .unwrap();
        let u = SetExpr::UnionFinite {
            children: vec![
                SetExpr::EpiRegion { f: left, side: Side::Above },
                SetExpr::EpiRegion { f: right, side: Side::Above },
            ],
        };
        assert!(u.contains(&[-1.0, -1.0], &cfg()).unwrap());
        assert!(u.contains(&[1.0, -1.0], &cfg()).unwrap());
        assert!(!u.contains(&[-1.0, -1.5], &cfg()).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = SetExpr::halfline_le(0.0);
        assert!(matches!(
            s.contains(&[0.0, 0.0], &cfg()),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }
}
