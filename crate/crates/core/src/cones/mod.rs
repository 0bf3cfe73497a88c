//! Normal cones, tangent cones, subdifferentials, coderivatives and
//! Aubin-property estimates for the structured set class.
//!
//! Structured computations are exact: every cone is produced in polyhedral
//! generator + halfspace form. The sampling oracle in [`numeric`] is
//! advisory cross-validation only; where no closed form exists the
//! computation refuses (`UnsupportedStructure`) instead of silently
//! sampling.

mod aubin;
mod calculus;
mod dd;
mod numeric;

pub use aubin::{aubin_dual_bound, aubin_estimate, AubinEstimate};
pub use calculus::{coderivative, subdifferential, CoderivativeSlice, SubdiffSet};
pub use dd::{cone_distance, generators_from_halfspaces, project_onto_cone, prune_redundant};
pub use numeric::{normal_membership_numeric, MembershipStatus};

use crate::geometry::{GeometryError, PiecewiseFn, SetExpr, Side};
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("point lies outside the set")]
    OutsideSet,
    #[error("point lies outside the function domain")]
    OutsideDomain,
    #[error("point lies outside the graph")]
    OutsideGraph,
    #[error("no closed-form cone for this structure: {0}")]
    UnsupportedStructure(String),
    #[error("no set points found near the base point at the smallest sampling radius")]
    DegenerateScale,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    Frechet,
    Clarke,
    Convex,
}

/// Finitely generated closed convex cone with dual descriptions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeDesc {
    pub dim: usize,
    /// Unit generators; empty list is the zero cone.
    pub generators: Vec<Vec<f64>>,
    /// Halfspace normals: cone = {v : <h, v> <= 0 for all h}. Empty list
    /// with spanning generators is the whole space.
    pub halfspaces: Vec<Vec<f64>>,
    pub exact: bool,
    pub flavor: Flavor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConeStatus {
    Inside,
    Outside,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConeMembershipVerdict {
    pub status: ConeStatus,
    pub distance: f64,
}

impl ConeDesc {
    pub fn from_generators(dim: usize, gens: Vec<Vec<f64>>, flavor: Flavor) -> Self {
        let generators = dd::prune_redundant(gens);
        // Halfspaces of cone(G) are the generators of its polar.
        let halfspaces = dd::generators_from_halfspaces(dim, &generators);
        ConeDesc {
            dim,
            generators,
            halfspaces,
            exact: true,
            flavor,
        }
    }

    pub fn from_halfspaces(dim: usize, halfspaces: Vec<Vec<f64>>, flavor: Flavor) -> Self {
        let generators = dd::generators_from_halfspaces(dim, &halfspaces);
        let halfspaces = dd::prune_redundant(halfspaces);
        ConeDesc {
            dim,
            generators,
            halfspaces,
            exact: true,
            flavor,
        }
    }

    /// Polar of the cone generated by `rays` — the normal-cone recipe.
    pub fn polar_of_rays(dim: usize, rays: Vec<Vec<f64>>, flavor: Flavor) -> Self {
        Self::from_halfspaces(dim, rays, flavor)
    }

    pub fn zero(dim: usize, flavor: Flavor) -> Self {
        let mut hs = Vec::new();
        for k in 0..dim {
            let mut e = zeros(dim);
            e[k] = 1.0;
            hs.push(e.clone());
            e[k] = -1.0;
            hs.push(e);
        }
        ConeDesc {
            dim,
            generators: vec![],
            halfspaces: hs,
            exact: true,
            flavor,
        }
    }

    pub fn whole_space(dim: usize, flavor: Flavor) -> Self {
        let mut gens = Vec::new();
        for k in 0..dim {
            let mut e = zeros(dim);
            e[k] = 1.0;
            gens.push(e.clone());
            e[k] = -1.0;
            gens.push(e);
        }
        ConeDesc {
            dim,
            generators: gens,
            halfspaces: vec![],
            exact: true,
            flavor,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn distance(&self, v: &[f64]) -> f64 {
        dd::cone_distance(&self.generators, v)
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        dd::project_onto_cone(&self.generators, v)
    }

    /// Projection onto the cone intersected with the centered ball of
    /// radius `m` (radial clip of the cone projection).
    pub fn project_capped(&self, v: &[f64], m: f64) -> Vec<f64> {
        let q = self.project(v);
        let n = norm(&q);
        if n > m {
            scale(&q, m / n)
        } else {
            q
        }
    }

    pub fn membership(&self, v: &[f64], cfg: &ToleranceConfig) -> ConeMembershipVerdict {
        let d = self.distance(v);
        let scale_ref = norm(v).max(1e-12);
        let status = if d <= cfg.tau_geom * scale_ref {
            ConeStatus::Inside
        } else {
            ConeStatus::Outside
        };
        ConeMembershipVerdict { status, distance: d }
    }

    /// Generator-wise containment: every generator of `other` lies in self.
    pub fn contains_cone(&self, other: &ConeDesc, tol: f64) -> bool {
        other.generators.iter().all(|g| self.distance(g) <= tol)
    }

    /// Discrepancy of unit-sphere sections, measured over generators both
    /// ways; exact for two-dimensional cones, a sound equality check in
    /// higher dimensions when combined with mutual containment.
    pub fn section_hausdorff(&self, other: &ConeDesc) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return 0.0,
            (true, false) | (false, true) => return f64::INFINITY,
            _ => {}
        }
        let a_to_b = self
            .generators
            .iter()
            .map(|g| other.distance(g))
            .fold(0.0_f64, f64::max);
        let b_to_a = other
            .generators
            .iter()
            .map(|g| self.distance(g))
            .fold(0.0_f64, f64::max);
        a_to_b.max(b_to_a)
    }

    /// Product cone with embedded generators and halfspaces.
    pub fn product(cones: &[ConeDesc], flavor: Flavor) -> Self {
        let dim: usize = cones.iter().map(|c| c.dim).sum();
        let mut generators = Vec::new();
        let mut halfspaces = Vec::new();
        let mut off = 0;
        for c in cones {
            for g in &c.generators {
                let mut v = zeros(dim);
                v[off..off + c.dim].copy_from_slice(g);
                generators.push(v);
            }
            for h in &c.halfspaces {
                let mut v = zeros(dim);
                v[off..off + c.dim].copy_from_slice(h);
                halfspaces.push(v);
            }
            off += c.dim;
        }
        ConeDesc {
            dim,
            generators,
            halfspaces,
            exact: cones.iter().all(|c| c.exact),
            flavor,
        }
    }

    pub fn intersect(&self, other: &ConeDesc, flavor: Flavor) -> Self {
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.iter().cloned());
        Self::from_halfspaces(self.dim, hs, flavor)
    }

    /// Coordinate swap (x, y) -> (y, x) for two-dimensional cones.
    fn swap_2d(mut self) -> Self {
        for g in self.generators.iter_mut().chain(self.halfspaces.iter_mut()) {
            g.swap(0, 1);
        }
        self
    }
}

/// Syntactic convexity of the structured class (sound, not complete).
pub fn is_convex(set: &SetExpr) -> bool {
    match set {
        SetExpr::Halfspace { .. }
        | SetExpr::ClosedBall { .. }
        | SetExpr::Box { .. }
        | SetExpr::Singleton { .. }
        | SetExpr::Polyhedron { .. }
        | SetExpr::Empty { .. } => true,
        SetExpr::FinitePoints { pts } => pts.len() == 1,
        SetExpr::EpiRegion { f, side } => piecewise_convexity(f, *side),
        SetExpr::GraphOf { f, .. } => {
            // A curve is convex as a set only when it is a single affine piece.
            f.pieces.len() == 1 && f.pieces[0].len() <= 2
        }
        SetExpr::Translate { inner, .. } => is_convex(inner),
        SetExpr::Product { factors } => factors.iter().all(is_convex),
        SetExpr::Cylinder { inner, .. } => is_convex(inner),
        SetExpr::Intersect { children } => children.iter().all(is_convex),
        SetExpr::UnionFinite { children } => children.len() == 1 && is_convex(&children[0]),
    }
}

/// Epigraph convex iff f convex (side Above); hypograph iff f concave.
fn piecewise_convexity(f: &PiecewiseFn, side: Side) -> bool {
    let sgn = match side {
        Side::Above => 1.0,
        Side::Below => -1.0,
    };
    for (k, piece) in f.pieces.iter().enumerate() {
        let (a, b) = piece_range(f, k);
        let degree = piece.iter().rposition(|c| *c != 0.0).unwrap_or(0);
        if degree >= 3 && !(a.is_finite() && b.is_finite()) {
            // Cubic/quartic tails flip curvature somewhere; stay out of the
            // convex subclass.
            return false;
        }
        let (lo, hi) = (a.max(-1e3), b.min(1e3));
        let n = 32;
        for i in 0..=n {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            if sgn * second_derivative(piece, t) < -1e-9 {
                return false;
            }
        }
    }
    for (k, &bp) in f.breakpoints.iter().enumerate() {
        if !f.continuous[k] {
            return false;
        }
        let (dl, dr) = f.one_sided_derivatives(bp);
        if sgn * (dr - dl) < -1e-9 {
            return false;
        }
    }
    true
}

fn second_derivative(piece: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &c) in piece.iter().enumerate().skip(2) {
        acc += c * (k * (k - 1)) as f64 * t.powi(k as i32 - 2);
    }
    acc
}

fn piece_range(f: &PiecewiseFn, k: usize) -> (f64, f64) {
    let lo = if k == 0 { f.lo } else { f.breakpoints[k - 1] };
    let hi = if k == f.breakpoints.len() {
        f.hi
    } else {
        f.breakpoints[k]
    };
    (lo, hi)
}

const BP_TOL: f64 = 1e-9;

/// Tangent rays (generating rays of the contingent or Clarke tangent cone)
/// of an epigraph/hypograph region at a boundary point.
fn epi_tangent_rays(
    f: &PiecewiseFn,
    side: Side,
    p: &[f64],
    clarke: bool,
    tau: f64,
) -> Result<Vec<Vec<f64>>, ConeError> {
    let (x, y) = (p[0], p[1]);
    let vertical = match side {
        Side::Above => vec![0.0, 1.0],
        Side::Below => vec![0.0, -1.0],
    };
    let at_lo = f.lo.is_finite() && (x - f.lo).abs() <= BP_TOL;
    let at_hi = f.hi.is_finite() && (x - f.hi).abs() <= BP_TOL;
    let boundary_val = match side {
        Side::Above => f.eval_lsc(x),
        Side::Below => f.eval_usc(x),
    };
    let on_curve = (y - boundary_val).abs() <= tau;
    let mut rays = vec![vertical];
    if !on_curve {
        // Domain wall only (or interior, handled by the caller).
        rays.push(vec![0.0, -1.0]);
        rays.push(vec![0.0, 1.0]);
        if !at_lo {
            rays.push(vec![-1.0, 0.0]);
        }
        if !at_hi {
            rays.push(vec![1.0, 0.0]);
        }
        return Ok(rays);
    }
    if let Some(k) = f.is_breakpoint(x, BP_TOL) {
        if !f.continuous[k] {
            return Err(ConeError::UnsupportedStructure(
                "cone at a discontinuous breakpoint".into(),
            ));
        }
    }
    let (dl, dr) = f.one_sided_derivatives(x);
    let (right_slope, left_slope) = if clarke {
        match side {
            // Clarke tangent cone of the epigraph is the epigraph of the
            // Clarke directional derivative: slopes max/min of the one-sided
            // derivatives; hypograph mirrors.
            Side::Above => (dl.max(dr), dl.min(dr)),
            Side::Below => (dl.min(dr), dl.max(dr)),
        }
    } else {
        (dr, dl)
    };
    if !at_hi {
        rays.push(vec![1.0, right_slope]);
    }
    if !at_lo {
        rays.push(vec![-1.0, -left_slope]);
    }
    Ok(rays)
}

/// Tangent rays of a curve {(t, f(t))} at a point on it.
fn curve_tangent_rays(
    f: &PiecewiseFn,
    p: &[f64],
    clarke: bool,
    tau: f64,
) -> Result<Vec<Vec<f64>>, ConeError> {
    let (x, y) = (p[0], p[1]);
    let at_lo = f.lo.is_finite() && (x - f.lo).abs() <= BP_TOL;
    let at_hi = f.hi.is_finite() && (x - f.hi).abs() <= BP_TOL;
    let (vl, vr) = f.side_values(x);
    let (dl, dr) = f.one_sided_derivatives(x);
    let on_left = !at_lo && (y - vl).abs() <= tau;
    let on_right = !at_hi && (y - vr).abs() <= tau;
    if !on_left && !on_right {
        return Err(ConeError::OutsideGraph);
    }
    let kink = f.is_breakpoint(x, BP_TOL).is_some();
    let mut rays = Vec::new();
    if kink && on_left && on_right {
        if clarke {
            // Two distinct branch directions collapse the Clarke tangent
            // cone to {0}.
            if (dl - dr).abs() <= 1e-9 {
                rays.push(vec![1.0, dr]);
                rays.push(vec![-1.0, -dl]);
            }
            return Ok(rays);
        }
        rays.push(vec![1.0, dr]);
        rays.push(vec![-1.0, -dl]);
        return Ok(rays);
    }
    if on_left && on_right {
        // Smooth interior point.
        rays.push(vec![1.0, dr]);
        rays.push(vec![-1.0, -dl]);
    } else if on_right {
        // Left endpoint of the right branch (domain endpoint or jump).
        rays.push(vec![1.0, dr]);
    } else {
        rays.push(vec![-1.0, -dl]);
    }
    Ok(rays)
}

/// Normal cone to a structured set at a point of it.
///
/// Supports convex polyhedra, balls, boxes, epigraph/hypograph regions and
/// graphs of piecewise-C^2 curves, finite unions at shared points, products
/// and translates. The fallback is an explicit `UnsupportedStructure`, never
/// silent sampling.
pub fn normal_cone(
    set: &SetExpr,
    p: &[f64],
    flavor: Flavor,
    cfg: &ToleranceConfig,
) -> Result<ConeDesc, ConeError> {
    if p.len() != set.dim() {
        return Err(ConeError::Geometry(GeometryError::DimensionMismatch {
            expected: set.dim(),
            got: p.len(),
        }));
    }
    if !set.contains_tau(p, cfg.tau_geom) {
        return Err(ConeError::OutsideSet);
    }
    if flavor == Flavor::Convex && !is_convex(set) {
        return Err(ConeError::UnsupportedStructure(
            "convex normal cone requested for a set outside the convex subclass".into(),
        ));
    }
    structured_cone(set, p, flavor, cfg)
}

fn structured_cone(
    set: &SetExpr,
    p: &[f64],
    flavor: Flavor,
    cfg: &ToleranceConfig,
) -> Result<ConeDesc, ConeError> {
    let tau = cfg.tau_geom;
    let d = set.dim();
    match set {
        SetExpr::Halfspace { a, b } => {
            if ((dot(a, p) - b) / norm(a)).abs() <= tau {
                Ok(ConeDesc::from_generators(d, vec![a.clone()], flavor))
            } else {
                Ok(ConeDesc::zero(d, flavor))
            }
        }
        SetExpr::ClosedBall { center, r } => {
            if *r <= tau {
                return Ok(ConeDesc::whole_space(d, flavor));
            }
            let dc = dist(center, p);
            if (dc - r).abs() <= tau {
                Ok(ConeDesc::from_generators(
                    d,
                    vec![sub(p, center)],
                    flavor,
                ))
            } else {
                Ok(ConeDesc::zero(d, flavor))
            }
        }
        SetExpr::Box { lo, hi } => {
            let mut gens = Vec::new();
            for k in 0..d {
                let mut e = zeros(d);
                if (p[k] - hi[k]).abs() <= tau {
                    e[k] = 1.0;
                    gens.push(e.clone());
                }
                if (p[k] - lo[k]).abs() <= tau {
                    e[k] = -1.0;
                    gens.push(e);
                }
            }
            Ok(ConeDesc::from_generators(d, gens, flavor))
        }
        SetExpr::Singleton { .. } | SetExpr::FinitePoints { .. } => {
            // Isolated points: every dual vector is normal.
            Ok(ConeDesc::whole_space(d, flavor))
        }
        SetExpr::Polyhedron { halfspaces } => {
            let gens = halfspaces
                .iter()
                .filter(|(a, b)| ((dot(a, p) - b) / norm(a)).abs() <= tau)
                .map(|(a, _)| a.clone())
                .collect();
            Ok(ConeDesc::from_generators(d, gens, flavor))
        }
        SetExpr::EpiRegion { f, side } => {
            if !f.in_domain(p[0], tau) {
                return Err(ConeError::OutsideSet);
            }
            let boundary_val = match side {
                Side::Above => f.eval_lsc(p[0]),
                Side::Below => f.eval_usc(p[0]),
            };
            let at_wall = (f.lo.is_finite() && (p[0] - f.lo).abs() <= BP_TOL)
                || (f.hi.is_finite() && (p[0] - f.hi).abs() <= BP_TOL);
            if (p[1] - boundary_val).abs() > tau && !at_wall {
                // Points on the vertical jump wall of a discontinuous
                // breakpoint are boundary points without a closed form.
                if let Some(k) = f.is_breakpoint(p[0], BP_TOL) {
                    if !f.continuous[k] {
                        let (l, r) = f.side_values(p[0]);
                        if p[1] <= l.max(r) + tau && p[1] >= l.min(r) - tau {
                            return Err(ConeError::UnsupportedStructure(
                                "cone on the jump wall of a discontinuous breakpoint".into(),
                            ));
                        }
                    }
                }
                return Ok(ConeDesc::zero(2, flavor));
            }
            match flavor {
                Flavor::Frechet | Flavor::Convex => {
                    let rays = epi_tangent_rays(f, *side, p, false, tau)?;
                    Ok(ConeDesc::polar_of_rays(2, rays, flavor))
                }
                Flavor::Clarke => {
                    let rays = epi_tangent_rays(f, *side, p, true, tau)?;
                    Ok(ConeDesc::polar_of_rays(2, rays, flavor))
                }
            }
        }
        SetExpr::GraphOf { f, swapped } => {
            let q = if *swapped { vec![p[1], p[0]] } else { p.to_vec() };
            let clarke = flavor == Flavor::Clarke;
            let rays = curve_tangent_rays(f, &q, clarke, tau)?;
            let cone = ConeDesc::polar_of_rays(2, rays, flavor);
            Ok(if *swapped { cone.swap_2d() } else { cone })
        }
        SetExpr::Translate { inner, shift } => {
            structured_cone(inner, &sub(p, shift), flavor, cfg)
        }
        SetExpr::Product { factors } => {
            let mut cones = Vec::new();
            let mut off = 0;
            for fac in factors {
                let fd = fac.dim();
                cones.push(structured_cone(fac, &p[off..off + fd], flavor, cfg)?);
                off += fd;
            }
            Ok(ConeDesc::product(&cones, flavor))
        }
        SetExpr::Cylinder { inner, coords, ambient } => {
            let sel: Vec<f64> = coords.iter().map(|&c| p[c]).collect();
            let base = structured_cone(inner, &sel, flavor, cfg)?;
            let embed = |vs: &[Vec<f64>]| -> Vec<Vec<f64>> {
                vs.iter()
                    .map(|v| {
                        let mut out = zeros(*ambient);
                        for (k, &c) in coords.iter().enumerate() {
                            out[c] = v[k];
                        }
                        out
                    })
                    .collect()
            };
            // Free coordinates contribute the whole-line tangents, i.e.
            // normals vanish there; halfspaces additionally pin them.
            let mut halfspaces = embed(&base.halfspaces);
            for k in 0..*ambient {
                if !coords.contains(&k) {
                    let mut e = zeros(*ambient);
                    e[k] = 1.0;
                    halfspaces.push(e.clone());
                    e[k] = -1.0;
                    halfspaces.push(e);
                }
            }
            Ok(ConeDesc {
                dim: *ambient,
                generators: embed(&base.generators),
                halfspaces,
                exact: base.exact,
                flavor,
            })
        }
        SetExpr::UnionFinite { children } => {
            let holding: Vec<&SetExpr> = children
                .iter()
                .filter(|c| c.contains_tau(p, tau))
                .collect();
            if holding.is_empty() {
                return Err(ConeError::OutsideSet);
            }
            if holding.len() == 1 {
                return structured_cone(holding[0], p, flavor, cfg);
            }
            match flavor {
                Flavor::Frechet => {
                    // Frechet cone of a union at a shared point is the
                    // intersection of the branch cones.
                    let mut acc: Option<ConeDesc> = None;
                    for c in holding {
                        let cone = structured_cone(c, p, flavor, cfg)?;
                        acc = Some(match acc {
                            None => cone,
                            Some(a) => a.intersect(&cone, flavor),
                        });
                    }
                    Ok(acc.unwrap())
                }
                Flavor::Clarke | Flavor::Convex => {
                    // Only sound when the branch cones agree.
                    let cones = holding
                        .iter()
                        .map(|c| structured_cone(c, p, flavor, cfg))
                        .collect::<Result<Vec<_>, _>>()?;
                    let first = &cones[0];
                    if cones.iter().all(|c| {
                        first.contains_cone(c, 1e-9) && c.contains_cone(first, 1e-9)
                    }) {
                        Ok(cones.into_iter().next().unwrap())
                    } else {
                        Err(ConeError::UnsupportedStructure(
                            "Clarke cone of a union with disagreeing branches".into(),
                        ))
                    }
                }
            }
        }
        SetExpr::Intersect { children } => {
            match merge_polyhedral(children) {
                Some(poly) => structured_cone(&poly, p, flavor, cfg),
                None => Err(ConeError::UnsupportedStructure(
                    "intersection outside the polyhedral subclass".into(),
                )),
            }
        }
        SetExpr::Empty { .. } => Err(ConeError::OutsideSet),
    }
}

/// Merge an intersection of halfspaces/boxes/polyhedra (possibly translated)
/// into a single polyhedron.
fn merge_polyhedral(children: &[SetExpr]) -> Option<SetExpr> {
    let mut hs: Vec<(Vec<f64>, f64)> = Vec::new();
    for c in children {
        collect_halfspaces(c, &mut hs)?;
    }
    Some(SetExpr::Polyhedron { halfspaces: hs })
}

fn collect_halfspaces(set: &SetExpr, out: &mut Vec<(Vec<f64>, f64)>) -> Option<()> {
    match set {
        SetExpr::Halfspace { a, b } => {
            out.push((a.clone(), *b));
            Some(())
        }
        SetExpr::Polyhedron { halfspaces } => {
            out.extend(halfspaces.iter().cloned());
            Some(())
        }
        SetExpr::Box { lo, hi } => {
            let d = lo.len();
            for k in 0..d {
                if hi[k].is_finite() {
                    let mut e = zeros(d);
                    e[k] = 1.0;
                    out.push((e, hi[k]));
                }
                if lo[k].is_finite() {
                    let mut e = zeros(d);
                    e[k] = -1.0;
                    out.push((e, -lo[k]));
                }
            }
            Some(())
        }
        SetExpr::Translate { inner, shift } => {
            let mut tmp = Vec::new();
            collect_halfspaces(inner, &mut tmp)?;
            for (a, b) in tmp {
                let nb = b + dot(&a, shift);
                out.push((a, nb));
            }
            Some(())
        }
        SetExpr::Intersect { children } => {
            for c in children {
                collect_halfspaces(c, out)?;
            }
            Some(())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn f4() -> PiecewiseFn {
        PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap()
    }

    #[test]
    fn halfline_convex_cone_is_positive_ray() {
        let s = SetExpr::halfline_le(0.0);
        let c = normal_cone(&s, &[0.0], Flavor::Convex, &cfg()).unwrap();
        assert_eq!(c.generators.len(), 1);
        assert!((c.generators[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn interior_point_gives_zero_cone() {
        let s = SetExpr::interval(-2.0, 2.0);
        let c = normal_cone(&s, &[0.3], Flavor::Frechet, &cfg()).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn f4_smooth_point_frechet_ray() {
        let g4 = SetExpr::EpiRegion { f: f4(), side: Side::Above };
        let c = normal_cone(&g4, &[0.25, -0.0625], Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(c.generators.len(), 1);
        let g = &c.generators[0];
        let expect = unit(&[-0.5, -1.0]).unwrap();
        assert!(dist(g, &expect) < 1e-9, "generator {g:?}");
    }

    #[test]
    fn f4_kink_frechet_zero_clarke_wedge() {
        let g4 = SetExpr::EpiRegion { f: f4(), side: Side::Above };
        let cf = normal_cone(&g4, &[0.0, 0.0], Flavor::Frechet, &cfg()).unwrap();
        assert!(cf.is_zero(), "Frechet cone at the concave kink is zero");
        let cc = normal_cone(&g4, &[0.0, 0.0], Flavor::Clarke, &cfg()).unwrap();
        assert_eq!(cc.generators.len(), 2);
        assert!(cc.distance(&unit(&[1.0, -1.0]).unwrap()) < 1e-9);
        assert!(cc.distance(&unit(&[0.0, -1.0]).unwrap()) < 1e-9);
        assert!(cc.contains_cone(&cf, 1e-9));
    }

    #[test]
    fn abs_kink_frechet_wedge() {
        let fabs = PiecewiseFn::new(vec![0.0], vec![vec![0.0, -1.0], vec![0.0, 1.0]]).unwrap();
        let epi = SetExpr::EpiRegion { f: fabs, side: Side::Above };
        let c = normal_cone(&epi, &[0.0, 0.0], Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(c.generators.len(), 2);
        assert!(c.distance(&unit(&[1.0, -1.0]).unwrap()) < 1e-9);
        assert!(c.distance(&unit(&[-1.0, -1.0]).unwrap()) < 1e-9);
        assert!(c.distance(&[0.0, 1.0]) > 0.5);
    }

    #[test]
    fn product_cone_is_product_of_factor_cones() {
        let s = SetExpr::product(vec![SetExpr::halfline_le(0.0), SetExpr::halfline_ge(0.0)]);
        let c = normal_cone(&s, &[0.0, 0.0], Flavor::Frechet, &cfg()).unwrap();
        assert!(c.distance(&unit(&[1.0, 0.0]).unwrap()) < 1e-9);
        assert!(c.distance(&unit(&[0.0, -1.0]).unwrap()) < 1e-9);
        assert!(c.distance(&unit(&[0.0, 1.0]).unwrap()) > 0.5);
    }

    #[test]
    fn union_frechet_is_intersection_of_branches() {
        // Union of {y <= 0} and {x <= 0} at the origin: Frechet cone is the
        // intersection of the two rays, i.e. {0}.
        let u = SetExpr::UnionFinite {
            children: vec![
                SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 },
                SetExpr::Halfspace { a: vec![1.0, 0.0], b: 0.0 },
            ],
        };
        let c = normal_cone(&u, &[0.0, 0.0], Flavor::Frechet, &cfg()).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn singleton_cone_is_whole_space() {
        let s = SetExpr::Singleton { p: vec![0.5, -0.5] };
        let c = normal_cone(&s, &[0.5, -0.5], Flavor::Frechet, &cfg()).unwrap();
        assert!(c.distance(&unit(&[3.0, 4.0]).unwrap()) < 1e-9);
    }

    #[test]
    fn outside_point_is_rejected() {
        let s = SetExpr::halfline_le(0.0);
        assert!(matches!(
            normal_cone(&s, &[1.0], Flavor::Frechet, &cfg()),
            Err(ConeError::OutsideSet)
        ));
    }

    #[test]
    fn inverse_parabola_curve_normals() {
        // {(y^2, y)} at (0,0): tangent is vertical, normals span the x-axis.
        let f = PiecewiseFn::new(vec![], vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let s = SetExpr::GraphOf { f, swapped: true };
        let c = normal_cone(&s, &[0.0, 0.0], Flavor::Frechet, &cfg()).unwrap();
        assert!(c.distance(&[1.0, 0.0]) < 1e-9);
        assert!(c.distance(&[-1.0, 0.0]) < 1e-9);
        assert!(c.distance(&[0.0, 1.0]) > 0.5);
    }

    #[test]
    fn convex_flavor_rejected_on_nonconvex() {
        let g4 = SetExpr::EpiRegion { f: f4(), side: Side::Above };
        assert!(matches!(
            normal_cone(&g4, &[0.0, 0.0], Flavor::Convex, &cfg()),
            Err(ConeError::UnsupportedStructure(_))
        ));
    }
}
