//! Constructive search for, and verification of, generalized-separation and
//! fuzzy-separation certificates.
//!
//! The global search runs the full constructive pipeline: a gamma-weighted
//! product metric, the exact Ekeland step on discretized factors, convex
//! subdifferential extraction for the max-distance objective, and dual
//! assembly with cone-distance residuals. The local form appends a small
//! closed ball as an extra set; stationarity certification projects the
//! resulting duals onto the perturbed sets' normal cones and renormalizes.
//! Every certificate re-verifies from cone primitives before it is
//! returned.

use crate::cones::{normal_cone, ConeError, Flavor};
use crate::ekeland::{
    evp_product, evp_product_conclusions_hold, maxdist_objective, EvpError, WeightedProductGrid,
};
use crate::extremality::{find_alpha_witness, CheckError, PerturbationFamily};
use crate::geometry::{
    classify_emptiness, min_max_distance, sample_set_in_box, GeometryError, SetExpr,
};
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use crate::verdict::Emptiness;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SepError {
    #[error("the sets certifiably intersect within the region")]
    NonEmptyIntersection,
    #[error("seed condition violated: {0}")]
    SeedConditionViolated(String),
    #[error("grid refinement cap reached without a passing certificate: {0}")]
    ResolutionExhausted(String),
    #[error("rho must be positive and parameters admissible")]
    BadRho,
    #[error("the primal stationarity check found no witness")]
    NoWitness,
    #[error("cone projection residual {0} exceeds the xi bound {1}")]
    ProjectionFailed(f64, f64),
    #[error("certificate failed verification: {0}")]
    CertificateInvalid(String),
    #[error("no scheduled rho realized the non-intersection")]
    NotRealized,
    #[error("all points coincide: the max-distance function vanishes")]
    DegenerateMax,
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Evp(#[from] EvpError),
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Exact convex subdifferential of f1(u) = max_{i<=n-1} |u_i - u_n| at a
/// tuple with positive value: one extreme dual tuple per active index, plus
/// the dual-norm bound machinery for the weighted-norm penalty.
#[derive(Debug, Clone)]
pub struct MaxDistSubdiff {
    pub value: f64,
    pub active: Vec<usize>,
    /// One extreme dual tuple (n blocks) per active index.
    pub extremes: Vec<Vec<Vec<f64>>>,
    pub gamma: f64,
}

impl MaxDistSubdiff {
    /// Convex combination of the extreme tuples.
    pub fn hull_point(&self, weights: &[f64]) -> Vec<Vec<f64>> {
        assert_eq!(weights.len(), self.extremes.len());
        let n = self.extremes[0].len();
        let mut out: Vec<Vec<f64>> =
            (0..n).map(|i| zeros(self.extremes[0][i].len())).collect();
        for (w, ext) in weights.iter().zip(&self.extremes) {
            for i in 0..n {
                out[i] = axpy(&out[i], *w, &ext[i]);
            }
        }
        out
    }

    /// Relation (b): the dual gamma-norm of a weighted-norm subgradient is
    /// at most the penalty coefficient.
    pub fn f2_bound_holds(&self, tuple: &[Vec<f64>], bound: f64) -> bool {
        let n = tuple.len();
        let dual: f64 = tuple
            .iter()
            .enumerate()
            .map(|(k, p)| if k + 1 == n { norm(p) / self.gamma } else { norm(p) })
            .sum();
        dual <= bound + 1e-12
    }
}

/// Subdifferential of the max-distance objective at `points` (relation (a)
/// of the constructive proof).
pub fn maxdist_subdifferential(
    points: &[Vec<f64>],
    gamma: f64,
) -> Result<MaxDistSubdiff, SepError> {
    let n = points.len();
    if n < 2 {
        return Err(SepError::MalformedCertificate(
            "need at least two points".into(),
        ));
    }
    let last = &points[n - 1];
    let dists: Vec<f64> = points[..n - 1].iter().map(|p| dist(p, last)).collect();
    let value = dists.iter().copied().fold(0.0, f64::max);
    if value <= 1e-14 {
        return Err(SepError::DegenerateMax);
    }
    let tie_tol = 1e-12 * (1.0 + value);
    let active: Vec<usize> = (0..n - 1)
        .filter(|&i| value - dists[i] <= tie_tol)
        .collect();
    let mut extremes = Vec::new();
    for &i in &active {
        let s = unit(&sub(&points[i], last)).expect("active distance is positive");
        let mut tuple: Vec<Vec<f64>> = points.iter().map(|p| zeros(p.len())).collect();
        tuple[i] = s.clone();
        tuple[n - 1] = neg(&s);
        extremes.push(tuple);
    }
    Ok(MaxDistSubdiff { value, active, extremes, gamma })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchState {
    pub eps_prime: f64,
    pub rho_internal: f64,
    pub gamma: f64,
    /// Subgradient components at the Ekeland point: y1 from the objective,
    /// y3 the normal-cone projections, y2 the remainder charged to the
    /// weighted-norm penalty.
    pub y1: Vec<Vec<f64>>,
    pub y2: Vec<Vec<f64>>,
    pub y3: Vec<Vec<f64>>,
    pub hull_weights: Vec<f64>,
    /// Which branch's inequality set the exact finite-space pipeline
    /// certified.
    pub branch: String,
    pub refinements: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocalData {
    pub witness: Vec<f64>,
    pub base_points: Vec<Vec<f64>>,
    pub rho: f64,
}

/// Dual separation certificate for a collection with empty intersection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneralizedCertificate {
    pub flavor: Flavor,
    pub points: Vec<Vec<f64>>,
    pub duals: Vec<Vec<f64>>,
    pub seeds: Vec<Vec<f64>>,
    pub eps: f64,
    pub delta: f64,
    pub eta: f64,
    pub tau: f64,
    pub search: SearchState,
    pub local: Option<LocalData>,
}

/// Fuzzy separation certificate: normals to perturbed sets at nearby
/// points, unit total norm, small sum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FuzzyCertificate {
    pub flavor: Flavor,
    pub perturbation_ids: Vec<String>,
    pub perturbations: Vec<SetExpr>,
    pub points: Vec<Vec<f64>>,
    pub duals: Vec<Vec<f64>>,
    pub eps: f64,
    pub beta: f64,
    pub tau: f64,
    pub xbar: Vec<f64>,
    pub base_points: Vec<Vec<f64>>,
    pub witness: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReport {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub conditions: Vec<ConditionReport>,
    pub pass: bool,
}

impl Default for VerificationReport {
    fn default() -> Self {
        VerificationReport { conditions: Vec::new(), pass: true }
    }
}

impl VerificationReport {
    fn new() -> Self {
        Self::default()
    }

    /// Record `value < bound` (strict, with numeric slack).
    pub fn push_lt(&mut self, name: &str, value: f64, bound: f64) {
        self.lt(name, value, bound);
    }

    /// Record |value - bound| <= tau.
    pub fn push_eq(&mut self, name: &str, value: f64, bound: f64, tau: f64) {
        self.eq(name, value, bound, tau);
    }

    fn lt(&mut self, name: &str, value: f64, bound: f64) {
        let pass = value < bound + 1e-12;
        self.conditions.push(ConditionReport { name: name.into(), value, bound, pass });
        self.pass &= pass;
    }

    fn eq(&mut self, name: &str, value: f64, bound: f64, tau: f64) {
        let pass = (value - bound).abs() <= tau;
        self.conditions.push(ConditionReport { name: name.into(), value, bound, pass });
        self.pass &= pass;
    }

    fn gt(&mut self, name: &str, value: f64, bound: f64) {
        let pass = value > bound - 1e-12;
        self.conditions.push(ConditionReport { name: name.into(), value, bound, pass });
        self.pass &= pass;
    }

    pub fn failing(&self) -> Vec<&ConditionReport> {
        self.conditions.iter().filter(|c| !c.pass).collect()
    }
}

/// Grid budget per refinement level for the discretized product space.
const EVP_BUDGETS: [usize; 4] = [60_000, 400_000, 1_500_000, 4_000_000];

/// The gamma-weighted product metric on point tuples.
fn weighted_tuple_dist(a: &[Vec<f64>], b: &[Vec<f64>], gamma: f64) -> f64 {
    let n = a.len();
    let mut m: f64 = 0.0;
    for k in 0..n {
        let d = dist(&a[k], &b[k]);
        m = m.max(if k + 1 == n { gamma * d } else { d });
    }
    m
}

fn tuple_objective(pts: &[Vec<f64>]) -> f64 {
    maxdist_objective(&pts.iter().map(|p| p.as_slice()).collect::<Vec<_>>())
}

/// Projected compass descent of `target` over the product of the sets,
/// starting at `start` with extra multistart candidates.
fn product_local_min(
    sets: &[SetExpr],
    target: &dyn Fn(&[Vec<f64>]) -> f64,
    start: Vec<Vec<f64>>,
    extra_starts: &[Vec<Vec<f64>>],
    init_step: f64,
) -> Vec<Vec<f64>> {
    let n = sets.len();
    let mut best = start;
    let mut best_v = target(&best);
    for cand in extra_starts {
        let v = target(cand);
        if v < best_v {
            best_v = v;
            best = cand.clone();
        }
    }
    let mut h = init_step.max(1e-9);
    while h > 1e-12 {
        let mut improved = false;
        for i in 0..n {
            let d = best[i].len();
            // Hypercube moves of the i-th block, projected onto its set.
            let mut moves: Vec<Vec<f64>> = Vec::new();
            let mut idx = vec![0usize; d];
            loop {
                if idx.iter().any(|&s| s != 1) {
                    let c: Vec<f64> = (0..d)
                        .map(|k| best[i][k] + (idx[k] as f64 - 1.0) * h)
                        .collect();
                    moves.push(c);
                }
                let mut k = 0;
                loop {
                    if k == d {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] < 3 {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == d {
                    break;
                }
            }
            // Pull toward the anchor block (the last factor, or every other
            // factor for the last block).
            let pulls: Vec<usize> = if i + 1 == n { (0..n - 1).collect() } else { vec![n - 1] };
            for &j in &pulls {
                let dir = sub(&best[j], &best[i]);
                let nd = norm(&dir);
                if nd > 0.0 {
                    moves.push(axpy(&best[i], (h / nd).min(1.0), &dir));
                }
            }
            for mv in moves {
                let Some(q) = crate::geometry::projection_of(&sets[i], &mv) else {
                    continue;
                };
                let mut cand = best.clone();
                cand[i] = q;
                let v = target(&cand);
                if v < best_v - 1e-16 {
                    best_v = v;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    best
}

/// Chebyshev polish of the last block: the point of `last_set` minimizing
/// the maximum distance to the fixed head points, starting from the anchor.
/// An exact tie among the active heads is what the subdifferential
/// extraction needs.
fn balance_last(heads: &[Vec<f64>], last_set: &SetExpr, anchor: &[f64]) -> Option<Vec<f64>> {
    let maxd = |u: &[f64]| -> f64 {
        heads.iter().map(|p| dist(p, u)).fold(0.0, f64::max)
    };
    let mut centroid = zeros(anchor.len());
    for p in heads {
        centroid = add(&centroid, p);
    }
    centroid = scale(&centroid, 1.0 / heads.len() as f64);
    let mut best = crate::geometry::projection_of(last_set, anchor)?;
    for cand in [crate::geometry::projection_of(last_set, &centroid), Some(anchor.to_vec())]
        .into_iter()
        .flatten()
    {
        if last_set.contains_tau(&cand, 1e-9) && maxd(&cand) < maxd(&best) {
            best = cand;
        }
    }
    let d = best.len();
    let mut h = maxd(&best).max(1e-6);
    let mut best_v = maxd(&best);
    while h > 1e-14 {
        let mut improved = false;
        let mut idx = vec![0usize; d];
        loop {
            if idx.iter().any(|&s| s != 1) {
                let c: Vec<f64> = (0..d)
                    .map(|k| best[k] + (idx[k] as f64 - 1.0) * h)
                    .collect();
                if let Some(q) = crate::geometry::projection_of(last_set, &c) {
                    let v = maxd(&q);
                    if v < best_v - 1e-17 {
                        best_v = v;
                        best = q;
                        improved = true;
                    }
                }
            }
            let mut k = 0;
            loop {
                if k == d {
                    break;
                }
                idx[k] += 1;
                if idx[k] < 3 {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == d {
                break;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Some(best)
}

/// Classical Ekeland improving-iteration on the continuum product space
/// with inexact inner minimization: each step minimizes
/// f1(u) + kappa d_gamma(u, x_k) and accepts only improving points, so the
/// telescoping localization d(x_inf, start) < eps'/kappa holds exactly and
/// the terminal point carries the dominance within descent tolerance.
fn continuum_evp(
    sets: &[SetExpr],
    start: Vec<Vec<f64>>,
    discrete_hint: Vec<Vec<f64>>,
    kappa: f64,
    gamma: f64,
    init_step: f64,
) -> Vec<Vec<f64>> {
    let mut x = start;
    let mut hint = Some(discrete_hint);
    for _ in 0..60 {
        let anchor = x.clone();
        let target = move |u: &[Vec<f64>]| {
            tuple_objective(u) + kappa * weighted_tuple_dist(u, &anchor, gamma)
        };
        let extras: Vec<Vec<Vec<f64>>> = hint.take().into_iter().collect();
        let next = product_local_min(sets, &target, x.clone(), &extras, init_step);
        if weighted_tuple_dist(&next, &x, gamma) <= 1e-11 {
            return next;
        }
        x = next;
    }
    x
}

fn factor_grid(
    set: &SetExpr,
    center: &[f64],
    radius: f64,
    per_axis: usize,
    extras: &[Vec<f64>],
    cfg: &ToleranceConfig,
) -> Vec<Vec<f64>> {
    let lo: Vec<f64> = center.iter().map(|c| c - radius).collect();
    let hi: Vec<f64> = center.iter().map(|c| c + radius).collect();
    let mut pts = sample_set_in_box(set, &lo, &hi, per_axis, cfg);
    for e in extras {
        if let Some(q) = crate::geometry::projection_of(set, e) {
            if q.iter()
                .zip(lo.iter().zip(&hi))
                .all(|(x, (l, h))| *x >= l - 1e-9 && *x <= h + 1e-9)
                && !pts.iter().any(|p| dist(p, &q) <= 1e-12)
            {
                pts.push(q);
            }
        }
    }
    pts
}

/// Generalized separation for a collection with empty intersection within
/// `region`: the full constructive pipeline.
#[allow(clippy::too_many_arguments)]
pub fn search_separation_global(
    sets: &[SetExpr],
    seeds: &[Vec<f64>],
    eps: f64,
    delta: f64,
    eta: f64,
    flavor: Flavor,
    region: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<GeneralizedCertificate, SepError> {
    let n = sets.len();
    if n < 2 || seeds.len() != n {
        return Err(SepError::MalformedCertificate(
            "need n >= 2 sets with seeds".into(),
        ));
    }
    if !(eps > 0.0 && delta > 0.0 && eta > 0.0) {
        return Err(SepError::BadRho);
    }
    for (s, w) in sets.iter().zip(seeds) {
        if !s.contains_tau(w, cfg.tau_geom) {
            return Err(SepError::SeedConditionViolated(
                "a seed lies outside its set".into(),
            ));
        }
    }
    let (rlo, rhi) = region.bounding_box().ok_or(GeometryError::UnboundedRegion)?;
    let region_scale = rhi
        .iter()
        .zip(&rlo)
        .map(|(h, l)| 0.5 * (h - l))
        .fold(0.0_f64, f64::max);
    let mm = min_max_distance(sets, region, cfg)?;
    match classify_emptiness(mm.value, region_scale, cfg) {
        Emptiness::Empty => {}
        Emptiness::Nonempty => return Err(SepError::NonEmptyIntersection),
        Emptiness::Inconclusive => {
            return Err(SepError::SeedConditionViolated(format!(
                "emptiness within the region is inconclusive (gap {:.3e})",
                mm.value
            )))
        }
    }
    // Nonintersect index: inf over u_n in Omega_n of max_{i<n} d(u_n, Omega_i).
    let last_region = SetExpr::Intersect {
        children: vec![
            sets[n - 1].clone(),
            SetExpr::Box { lo: rlo.clone(), hi: rhi.clone() },
        ],
    };
    let idx = min_max_distance(&sets[..n - 1], &last_region, cfg)?;
    let f1_seed =
        maxdist_objective(&seeds.iter().map(|s| s.as_slice()).collect::<Vec<_>>());
    let slack = f1_seed - idx.value;
    if slack >= eps * (1.0 - 1e-9) {
        return Err(SepError::SeedConditionViolated(format!(
            "max |omega_i - omega_n| = {f1_seed:.6} exceeds the nonintersect index {:.6} + eps",
            idx.value
        )));
    }
    let mut eps_prime = (0.9 * eps).max(0.5 * (slack.max(0.0) + eps));
    let mut refinements = 0usize;
    loop {
        // rho in (eps' * delta / eps, delta), gamma = rho / eta.
        let rho = 0.5 * (eps_prime * delta / eps + delta);
        let gamma = rho / eta;
        let budget = EVP_BUDGETS[refinements.min(EVP_BUDGETS.len() - 1)];
        let d = sets[0].dim();
        let per_axis = ((budget as f64).powf(1.0 / (n * d) as f64) as usize).clamp(5, 161);
        // Anchor extras: contact points of the intersection gap and the
        // seeds themselves.
        let extras: Vec<Vec<f64>> = std::iter::once(mm.argmin.clone())
            .chain(std::iter::once(idx.argmin.clone()))
            .chain(seeds.iter().cloned())
            .collect();
        let mut factors: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n);
        let mut starts = Vec::with_capacity(n);
        for i in 0..n {
            let radius = if i + 1 == n { 1.05 * (rho / gamma) } else { 1.05 * rho };
            let mut pts = factor_grid(&sets[i], &seeds[i], radius, per_axis, &extras, cfg);
            let pos = pts.iter().position(|p| dist(p, &seeds[i]) <= 1e-12);
            let start = match pos {
                Some(k) => k,
                None => {
                    pts.push(seeds[i].clone());
                    pts.len() - 1
                }
            };
            factors.push(pts);
            starts.push(start);
        }
        let grid = WeightedProductGrid::new(factors, gamma);
        let xhat_idx = match evp_product(&grid, &maxdist_objective, &starts, eps_prime, rho) {
            Ok(v) => v,
            Err(EvpError::PreconditionViolated) => {
                // The discrete infimum sat below f1(seed) + eps'; widen eps'.
                if eps_prime < 0.98 * eps {
                    eps_prime = 0.5 * (eps_prime + eps);
                    continue;
                }
                return Err(SepError::SeedConditionViolated(
                    "Ekeland precondition failed at every admissible eps'".into(),
                ));
            }
            Err(e) => return Err(e.into()),
        };
        debug_assert!(evp_product_conclusions_hold(
            &grid,
            &maxdist_objective,
            &starts,
            &xhat_idx,
            eps_prime,
            rho
        ));
        let discrete: Vec<Vec<f64>> = grid
            .tuple(&xhat_idx)
            .into_iter()
            .map(|p| p.to_vec())
            .collect();
        // Continuum Ekeland iteration from the seeds, hinted by the discrete
        // point: removes the grid-level misalignment the finite stage cannot
        // resolve while keeping the localization telescoping exact.
        let evp_points = continuum_evp(
            sets,
            seeds.to_vec(),
            discrete,
            eps_prime / rho,
            gamma,
            0.25 * rho,
        );
        // Contact tuples: at a balanced min-max point the projection
        // directions onto the sets are antiparallel, so the extracted duals
        // lie exactly in the normal cones. The last block is rebalanced to
        // an exact max-distance tie (constrained Chebyshev polish), which
        // the subdifferential tie detection requires. Candidates are tried
        // in order; the first passing certificate wins.
        let mut candidates: Vec<(Vec<Vec<f64>>, &str)> = Vec::new();
        let contact = |a: &[f64]| -> Option<Vec<Vec<f64>>> {
            let mut heads: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
            for s in sets[..n - 1].iter() {
                heads.push(crate::geometry::projection_of(s, a)?);
            }
            let last = balance_last(&heads, &sets[n - 1], a)?;
            heads.push(last);
            Some(heads)
        };
        if let Some(t) = contact(&mm.argmin) {
            candidates.push((t, "contact(min-max argmin)"));
        }
        if let Some(t) = contact(&idx.argmin) {
            candidates.push((t, "contact(nonintersect argmin)"));
        }
        candidates.push((evp_points, "ekeland"));
        let mut last_err: Option<SepError> = None;
        let mut last_report: Option<VerificationReport> = None;
        for (points, source) in candidates {
            match assemble_certificate(
                sets, seeds, &points, eps, eps_prime, delta, eta, rho, gamma, flavor,
                refinements, cfg,
            ) {
                Ok(mut cert) => {
                    let report = verify_generalized(&cert, sets, cfg)?;
                    if report.pass {
                        cert.search.branch = format!("{} / {}", cert.search.branch, source);
                        return Ok(cert);
                    }
                    last_report = Some(report);
                }
                Err(SepError::DegenerateMax) => return Err(SepError::DegenerateMax),
                Err(e) => last_err = Some(e),
            }
        }
        if refinements >= 3 {
            if let Some(report) = last_report {
                let names: Vec<String> = report
                    .failing()
                    .iter()
                    .map(|c| {
                        format!("{} (value {:.3e}, bound {:.3e})", c.name, c.value, c.bound)
                    })
                    .collect();
                return Err(SepError::ResolutionExhausted(names.join("; ")));
            }
            return Err(last_err.unwrap_or(SepError::ResolutionExhausted(
                "no candidate tuple assembled".into(),
            )));
        }
        refinements += 1;
    }
}

/// Relations (a)-(c): pick the hull point of the objective subdifferential
/// minimizing the weighted cone-distance residual, then decompose the
/// Ekeland stationarity into y1 + y2 + y3 = 0.
#[allow(clippy::too_many_arguments)]
fn assemble_certificate(
    sets: &[SetExpr],
    seeds: &[Vec<f64>],
    points: &[Vec<f64>],
    eps: f64,
    eps_prime: f64,
    delta: f64,
    eta: f64,
    rho: f64,
    gamma: f64,
    flavor: Flavor,
    refinements: usize,
    cfg: &ToleranceConfig,
) -> Result<GeneralizedCertificate, SepError> {
    let n = sets.len();
    let sub = maxdist_subdifferential(points, gamma)?;
    let cones: Vec<_> = (0..n)
        .map(|i| normal_cone(&sets[i], &points[i], flavor, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    let k = sub.extremes.len();
    let residual_of = |y1: &[Vec<f64>]| -> f64 {
        let mut r = 0.0;
        for i in 0..n {
            let xi_star = neg(&y1[i]);
            let w = if i + 1 == n { eta } else { delta };
            r += w * cones[i].distance(&xi_star);
        }
        r
    };
    // Deterministic simplex grid over hull weights; the extreme point with
    // the lexicographically smallest active index breaks exact ties.
    let steps = 20usize;
    let mut weight_sets: Vec<Vec<f64>> = Vec::new();
    match k {
        1 => weight_sets.push(vec![1.0]),
        2 => {
            for a in 0..=steps {
                let t = a as f64 / steps as f64;
                weight_sets.push(vec![t, 1.0 - t]);
            }
        }
        _ => {
            for a in 0..=steps {
                for b in 0..=(steps - a) {
                    let (wa, wb) = (a as f64 / steps as f64, b as f64 / steps as f64);
                    let mut w = vec![0.0; k];
                    w[0] = wa;
                    w[1] = wb;
                    w[2] = 1.0 - wa - wb;
                    weight_sets.push(w);
                }
            }
        }
    }
    let mut best_w = vec![0.0; k];
    best_w[0] = 1.0;
    let mut best_r = residual_of(&sub.hull_point(&best_w));
    for w in weight_sets {
        if w.len() != k {
            continue;
        }
        let r = residual_of(&sub.hull_point(&w));
        if r < best_r - 1e-15 {
            best_r = r;
            best_w = w;
        }
    }
    // Golden-section polish per weight coordinate (renormalized simplex
    // line search); the residual is piecewise smooth in the weights.
    if k >= 2 {
        for _pass in 0..3 {
            for i in 0..k {
                let mut lo = 0.0_f64;
                let mut hi = 1.0_f64;
                let eval = |wi: f64, cur: &[f64]| -> f64 {
                    let rest: f64 = cur
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, v)| *v)
                        .sum();
                    let mut w = vec![0.0; k];
                    for (j, item) in w.iter_mut().enumerate() {
                        if j == i {
                            *item = wi;
                        } else if rest > 1e-15 {
                            *item = cur[j] * (1.0 - wi) / rest;
                        } else {
                            *item = (1.0 - wi) / (k - 1) as f64;
                        }
                    }
                    residual_of(&sub.hull_point(&w))
                };
                let phi = 0.5 * (3.0 - 5.0_f64.sqrt());
                for _ in 0..60 {
                    let m1 = lo + phi * (hi - lo);
                    let m2 = hi - phi * (hi - lo);
                    if eval(m1, &best_w) <= eval(m2, &best_w) {
                        hi = m2;
                    } else {
                        lo = m1;
                    }
                }
                let wi = 0.5 * (lo + hi);
                let r = eval(wi, &best_w);
                if r < best_r {
                    best_r = r;
                    let rest: f64 = best_w
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, v)| *v)
                        .sum();
                    let old_w = best_w.clone();
                    for (j, item) in best_w.iter_mut().enumerate() {
                        if j == i {
                            *item = wi;
                        } else if rest > 1e-15 {
                            *item = old_w[j] * (1.0 - wi) / rest;
                        } else {
                            *item = (1.0 - wi) / (k - 1) as f64;
                        }
                    }
                }
            }
        }
    }
    let y1 = sub.hull_point(&best_w);
    let duals: Vec<Vec<f64>> = y1.iter().map(|v| neg(v)).collect();
    let mut y3 = Vec::with_capacity(n);
    let mut y2 = Vec::with_capacity(n);
    for i in 0..n {
        // y3 in the normal cone; y2 = x* - y3 is charged to the penalty.
        let proj = cones[i].project(&duals[i]);
        y2.push(crate::vecn::sub(&duals[i], &proj));
        y3.push(proj);
    }
    Ok(GeneralizedCertificate {
        flavor,
        points: points.to_vec(),
        duals,
        seeds: seeds.to_vec(),
        eps,
        delta,
        eta,
        tau: 0.9,
        search: SearchState {
            eps_prime,
            rho_internal: rho,
            gamma,
            y1,
            y2,
            y3,
            hull_weights: best_w,
            branch:
                "exact-finite-space (Banach/Clarke and Asplund/Frechet inequality sets certified jointly)"
                    .into(),
            refinements,
        },
        local: None,
    })
}

/// Verify a generalized certificate from cone primitives.
pub fn verify_generalized(
    cert: &GeneralizedCertificate,
    sets: &[SetExpr],
    cfg: &ToleranceConfig,
) -> Result<VerificationReport, SepError> {
    let n = sets.len();
    if cert.points.len() != n || cert.duals.len() != n || cert.seeds.len() != n {
        return Err(SepError::MalformedCertificate(
            "points/duals/seeds arity mismatch".into(),
        ));
    }
    let mut rep = VerificationReport::new();
    for (i, (s, p)) in sets.iter().zip(&cert.points).enumerate() {
        let (d, _) = s.distance(p)?;
        rep.lt(&format!("membership x_{}", i + 1), d, cfg.tau_geom);
    }
    match &cert.local {
        None => {
            let head = (0..n - 1)
                .map(|i| dist(&cert.points[i], &cert.seeds[i]))
                .fold(0.0_f64, f64::max);
            rep.lt("proximity max_{i<n} |x_i - omega_i| < delta", head, cert.delta);
            rep.lt(
                "proximity |x_n - omega_n| < eta",
                dist(&cert.points[n - 1], &cert.seeds[n - 1]),
                cert.eta,
            );
            let mut sum = zeros(cert.duals[0].len());
            for d in &cert.duals {
                sum = add(&sum, d);
            }
            rep.eq("sum of duals = 0", norm(&sum), 0.0, cfg.tau_num);
            let head_norm: f64 = cert.duals[..n - 1].iter().map(|d| norm(d)).sum();
            rep.eq("normalization sum_{i<n} |x_i*| = 1", head_norm, 1.0, cfg.tau_num);
            let mut weighted = 0.0;
            for i in 0..n {
                let cone = normal_cone(&sets[i], &cert.points[i], cert.flavor, cfg)?;
                let w = if i + 1 == n { cert.eta } else { cert.delta };
                weighted += w * cone.distance(&cert.duals[i]);
            }
            rep.lt("weighted cone distance < eps", weighted, cert.eps);
            let support: f64 = (0..n - 1)
                .map(|i| dot(&cert.duals[i], &sub(&cert.points[n - 1], &cert.points[i])))
                .sum();
            let maxdist = (0..n - 1)
                .map(|i| dist(&cert.points[n - 1], &cert.points[i]))
                .fold(0.0_f64, f64::max);
            rep.eq(
                "support equality (Clarke path)",
                support,
                maxdist,
                cfg.tau_num.max(1e-9),
            );
            rep.gt(
                "support inequality (Asplund path, tau)",
                support,
                cert.tau * maxdist,
            );
        }
        Some(local) => {
            let head = (0..n)
                .map(|i| dist(&cert.points[i], &cert.seeds[i]))
                .fold(0.0_f64, f64::max);
            rep.lt("proximity max_i |x_i - omega_i| < delta", head, cert.delta);
            rep.lt("witness |x| < rho", norm(&local.witness), local.rho);
            let total: f64 = cert.duals.iter().map(|d| norm(d)).sum();
            rep.eq("normalization sum_i |x_i*| = 1", total, 1.0, cfg.tau_num);
            let mut sum = zeros(cert.duals[0].len());
            for d in &cert.duals {
                sum = add(&sum, d);
            }
            let mut cone_sum = 0.0;
            for i in 0..n {
                let cone = normal_cone(&sets[i], &cert.points[i], cert.flavor, cfg)?;
                cone_sum += cone.distance(&cert.duals[i]);
            }
            let weighted = cert.delta * cone_sum + local.rho * norm(&sum);
            rep.lt(
                "combined bound delta*sum d + rho*|sum x*| < eps",
                weighted,
                cert.eps,
            );
            let support: f64 = (0..n)
                .map(|i| {
                    let v = add(&local.witness, &sub(&local.base_points[i], &cert.points[i]));
                    dot(&cert.duals[i], &v)
                })
                .sum();
            let maxdist = (0..n)
                .map(|i| {
                    norm(&add(&local.witness, &sub(&local.base_points[i], &cert.points[i])))
                })
                .fold(0.0_f64, f64::max);
            rep.eq(
                "support equality (Clarke path)",
                support,
                maxdist,
                cfg.tau_num.max(1e-9),
            );
            rep.gt(
                "support inequality (Asplund path, tau)",
                support,
                cert.tau * maxdist,
            );
        }
    }
    Ok(rep)
}

/// Local generalized separation: the intersection of the translated sets
/// misses the rho-ball. Appends the closed ball eta*B as an extra set and
/// runs the global pipeline on the shifted collection.
#[allow(clippy::too_many_arguments)]
pub fn search_separation_local(
    sets: &[SetExpr],
    base_points: &[Vec<f64>],
    rho: f64,
    eps: f64,
    delta: f64,
    flavor: Flavor,
    cfg: &ToleranceConfig,
) -> Result<GeneralizedCertificate, SepError> {
    let n = sets.len();
    if rho <= 0.0 {
        return Err(SepError::BadRho);
    }
    if base_points.len() != n || n == 0 {
        return Err(SepError::MalformedCertificate(
            "base point arity mismatch".into(),
        ));
    }
    let d = sets[0].dim();
    let shifted: Vec<SetExpr> = sets
        .iter()
        .zip(base_points)
        .map(|(s, b)| s.clone().translate(neg(b)))
        .collect();
    let ball = SetExpr::ball(zeros(d), rho);
    let mm = min_max_distance(&shifted, &ball, cfg)?;
    match classify_emptiness(mm.value, rho, cfg) {
        Emptiness::Empty => {}
        Emptiness::Nonempty => return Err(SepError::NonEmptyIntersection),
        Emptiness::Inconclusive => {
            return Err(SepError::SeedConditionViolated(format!(
                "rho-ball emptiness inconclusive (gap {:.3e})",
                mm.value
            )))
        }
    }
    // Seeds: projections of the base points. Seed condition: the seed gap
    // stays below the local nonintersect index plus eps.
    let seeds: Vec<Vec<f64>> = sets
        .iter()
        .zip(base_points)
        .map(|(s, b)| {
            crate::geometry::projection_of(s, b).ok_or_else(|| {
                SepError::SeedConditionViolated("an empty set admits no seed".into())
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let seed_gap = seeds
        .iter()
        .zip(base_points)
        .map(|(w, b)| dist(w, b))
        .fold(0.0_f64, f64::max);
    if seed_gap >= mm.value + eps * (1.0 - 1e-9) {
        return Err(SepError::SeedConditionViolated(format!(
            "seed distance {seed_gap:.6} exceeds index {:.6} + eps",
            mm.value
        )));
    }
    // eps' in (seed_gap - index, eps); eta in (max(rho + eps' - eps, 0), rho).
    let eps_prime =
        (0.5 * ((seed_gap - mm.value).max(0.0) + eps)).clamp(0.05 * eps, 0.95 * eps);
    let eta_lo = (rho + eps_prime - eps).max(0.0);
    let eta = 0.5 * (eta_lo + rho);
    if !(eta > 0.0 && eta < rho) {
        return Err(SepError::BadRho);
    }
    let mut aug_sets = shifted.clone();
    aug_sets.push(SetExpr::ball(zeros(d), eta));
    let mut aug_seeds: Vec<Vec<f64>> = seeds
        .iter()
        .zip(base_points)
        .map(|(w, b)| crate::vecn::sub(w, b))
        .collect();
    aug_seeds.push(zeros(d));
    let region = SetExpr::Box {
        lo: vec![-1.05 * rho; d],
        hi: vec![1.05 * rho; d],
    };
    let mut cert = search_separation_global(
        &aug_sets, &aug_seeds, eps_prime, delta, eta, flavor, &region, cfg,
    )?;
    // Restate in the original coordinates: drop the ball block, unshift.
    let witness = cert.points[n].clone();
    let points: Vec<Vec<f64>> = cert
        .points
        .drain(..n)
        .zip(base_points)
        .map(|(p, b)| add(&p, b))
        .collect();
    let duals: Vec<Vec<f64>> = cert.duals.drain(..n).collect();
    let local_cert = GeneralizedCertificate {
        flavor,
        points,
        duals,
        seeds,
        eps,
        delta,
        eta,
        tau: cert.tau,
        search: cert.search.clone(),
        local: Some(LocalData {
            witness,
            base_points: base_points.to_vec(),
            rho,
        }),
    };
    let rep = verify_generalized(&local_cert, sets, cfg)?;
    if !rep.pass {
        let names: Vec<String> = rep.failing().iter().map(|c| c.name.clone()).collect();
        return Err(SepError::CertificateInvalid(names.join("; ")));
    }
    Ok(local_cert)
}

/// Outcome of realizing a fuzzy certificate by translations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Realization {
    pub rho: f64,
    pub translations: Vec<Vec<f64>>,
    pub gap: f64,
}

/// Dual-to-primal direction: translate the perturbed sets along the duals
/// and certify that they miss the rho-ball.
pub fn realize_nonintersection(
    cert: &FuzzyCertificate,
    rho_schedule: &[f64],
    cfg: &ToleranceConfig,
) -> Result<Realization, SepError> {
    if cert.flavor != Flavor::Frechet {
        return Err(SepError::CertificateInvalid(
            "realization requires the Frechet flavor".into(),
        ));
    }
    let rep = verify_fuzzy(cert, None, cfg)?;
    if !rep.pass {
        let names: Vec<String> = rep.failing().iter().map(|c| c.name.clone()).collect();
        return Err(SepError::CertificateInvalid(names.join("; ")));
    }
    let n = cert.perturbations.len();
    let d = cert.xbar.len();
    for &rho in rho_schedule {
        if rho <= 0.0 {
            continue;
        }
        let scales = [0.5, 0.9, 0.75, 0.25, 0.1];
        for &c in &scales {
            let translations: Vec<Vec<f64>> = (0..n)
                .map(|i| match unit(&cert.duals[i]) {
                    Some(u) => scale(&u, c * cert.eps * rho),
                    None => zeros(d),
                })
                .collect();
            // Omega~_i - x_i - a_i
            let moved: Vec<SetExpr> = (0..n)
                .map(|i| {
                    cert.perturbations[i]
                        .clone()
                        .translate(neg(&add(&cert.points[i], &translations[i])))
                })
                .collect();
            let ball = SetExpr::ball(zeros(d), rho);
            let mm = min_max_distance(&moved, &ball, cfg)?;
            if classify_emptiness(mm.value, rho, cfg) == Emptiness::Empty {
                return Ok(Realization { rho, translations, gap: mm.value });
            }
        }
    }
    Err(SepError::NotRealized)
}

/// Fuzzy-certificate verification from cone primitives: the definition's
/// conditions, the support condition, and the re-projected alternative form
/// (exact zero sum, cone distances summing below eps).
pub fn verify_fuzzy(
    cert: &FuzzyCertificate,
    original_sets: Option<&[SetExpr]>,
    cfg: &ToleranceConfig,
) -> Result<VerificationReport, SepError> {
    let n = cert.perturbations.len();
    if cert.points.len() != n || cert.duals.len() != n || cert.base_points.len() != n {
        return Err(SepError::MalformedCertificate("arity mismatch".into()));
    }
    if n == 0 {
        return Err(SepError::MalformedCertificate("empty certificate".into()));
    }
    let mut rep = VerificationReport::new();
    let total: f64 = cert.duals.iter().map(|d| norm(d)).sum();
    rep.eq(
        "normalization sum_i |x_i*| = 1",
        total,
        1.0,
        cfg.tau_num.max(1e-9),
    );
    let mut sum = zeros(cert.duals[0].len());
    for dv in &cert.duals {
        sum = add(&sum, dv);
    }
    rep.lt("sum-norm |sum_i x_i*| < beta", norm(&sum), cert.beta);
    let mut cone_dist_sum = 0.0;
    for i in 0..n {
        let (dm, _) = cert.perturbations[i].distance(&cert.points[i])?;
        rep.lt(&format!("membership x_{}", i + 1), dm, cfg.tau_geom);
        rep.lt(
            &format!("locality |x_{} - xbar| < eps", i + 1),
            dist(&cert.points[i], &cert.xbar),
            cert.eps,
        );
        let cone = normal_cone(&cert.perturbations[i], &cert.points[i], cert.flavor, cfg)?;
        let dc = cone.distance(&cert.duals[i]);
        cone_dist_sum += dc;
        rep.lt(&format!("cone membership d(x_{}*, N)", i + 1), dc, cfg.tau_geom);
    }
    if let Some(sets) = original_sets {
        for i in 0..n {
            let (db, _) = sets[i].distance(&cert.base_points[i])?;
            rep.lt(&format!("base membership xbar_{}", i + 1), db, cfg.tau_geom);
            rep.lt(
                &format!("base locality |xbar_{} - xbar| < eps", i + 1),
                dist(&cert.base_points[i], &cert.xbar),
                cert.eps,
            );
        }
    }
    rep.lt("witness |x| < eps", norm(&cert.witness), cert.eps);
    let support: f64 = (0..n)
        .map(|i| {
            let v = add(&cert.witness, &sub(&cert.base_points[i], &cert.points[i]));
            dot(&cert.duals[i], &v)
        })
        .sum();
    let maxdist = (0..n)
        .map(|i| norm(&add(&cert.witness, &sub(&cert.base_points[i], &cert.points[i]))))
        .fold(0.0_f64, f64::max);
    rep.gt("support inequality tau", support, cert.tau * maxdist);
    // Alternative form of fuzzy separation: re-project to an exact zero sum
    // and re-measure the cone distances.
    let shift = scale(&sum, 1.0 / n as f64);
    let mut alt_sum = zeros(cert.duals[0].len());
    let mut alt_cone = 0.0;
    for i in 0..n {
        let v = sub(&cert.duals[i], &shift);
        alt_sum = add(&alt_sum, &v);
        let cone = normal_cone(&cert.perturbations[i], &cert.points[i], cert.flavor, cfg)?;
        alt_cone += cone.distance(&v);
    }
    rep.eq(
        "alternative form: exact zero sum after re-projection",
        norm(&alt_sum),
        0.0,
        cfg.tau_num.max(1e-9),
    );
    rep.lt(
        "alternative form: sum_i d(x_i*, N) < eps",
        alt_cone.max(cone_dist_sum),
        cert.eps.max(cert.beta),
    );
    Ok(rep)
}

/// Dual certification of approximate alpha-stationarity: primal witness,
/// local separation on the perturbed translated sets, projection of the
/// duals onto the normal cones, renormalization.
#[allow(clippy::too_many_arguments)]
pub fn certify_stationarity(
    sets: &[SetExpr],
    families: &[PerturbationFamily],
    xbar: &[f64],
    alpha: f64,
    eps: f64,
    beta: f64,
    tau: f64,
    flavor: Flavor,
    region: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<FuzzyCertificate, SepError> {
    if !(alpha > 0.0 && beta > alpha && eps > 0.0 && (0.0..1.0).contains(&tau)) {
        return Err(SepError::MalformedCertificate(
            "need alpha > 0, beta > alpha, eps > 0, tau in (0,1)".into(),
        ));
    }
    // xi > 0 with 2 xi < 1 - tau, alpha xi + (alpha+1) xi^2 < eps, and
    // (alpha + xi)/(1 - xi) < beta.
    let root = (-alpha + (alpha * alpha + 4.0 * (alpha + 1.0) * eps).sqrt())
        / (2.0 * (alpha + 1.0));
    let xi = 0.9
        * ((1.0 - tau) / 2.0)
            .min(root)
            .min((beta - alpha) / (1.0 + beta));
    if xi <= 0.0 {
        return Err(SepError::MalformedCertificate("xi collapsed to zero".into()));
    }
    let eps_primal = xi * xi;
    let witness = find_alpha_witness(sets, families, xbar, alpha, eps_primal, region, cfg)?
        .ok_or(SepError::NoWitness)?;
    let rho = witness.rho;
    let perturbed: Vec<SetExpr> = witness.members.iter().map(|m| m.set.clone()).collect();
    let ids: Vec<String> = witness.members.iter().map(|m| m.id.clone()).collect();
    // eps' = alpha rho, delta = alpha sqrt(rho).
    let eps_loc = alpha * rho;
    let delta = alpha * rho.sqrt();
    let general = search_separation_local(
        &perturbed,
        &witness.points,
        rho,
        eps_loc,
        delta,
        flavor,
        cfg,
    )?;
    // Project the duals onto the perturbed sets' normal cones.
    let n = sets.len();
    let mut zs: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut proj_residual = 0.0;
    for i in 0..n {
        let cone = normal_cone(&perturbed[i], &general.points[i], flavor, cfg)?;
        let z = cone.project(&general.duals[i]);
        proj_residual += dist(&z, &general.duals[i]);
        zs.push(z);
    }
    if proj_residual >= xi {
        return Err(SepError::ProjectionFailed(proj_residual, xi));
    }
    let total: f64 = zs.iter().map(|z| norm(z)).sum();
    if total <= cfg.tau_num {
        return Err(SepError::CertificateInvalid(
            "projected duals collapsed to zero".into(),
        ));
    }
    let duals: Vec<Vec<f64>> = zs.iter().map(|z| scale(z, 1.0 / total)).collect();
    let local = general.local.as_ref().expect("local search returns local data");
    let cert = FuzzyCertificate {
        flavor,
        perturbation_ids: ids,
        perturbations: perturbed,
        points: general.points.clone(),
        duals,
        eps,
        beta,
        tau,
        xbar: xbar.to_vec(),
        base_points: witness.points.clone(),
        witness: local.witness.clone(),
    };
    let rep = verify_fuzzy(&cert, Some(sets), cfg)?;
    if !rep.pass {
        let names: Vec<String> = rep.failing().iter().map(|c| c.name.clone()).collect();
        return Err(SepError::CertificateInvalid(names.join("; ")));
    }
    Ok(cert)
}

/// Plain approximate-stationarity certification: the alpha/beta pair
/// (eps/2, eps) realizes the corollary form.
#[allow(clippy::too_many_arguments)]
pub fn certify_approx_stationarity(
    sets: &[SetExpr],
    families: &[PerturbationFamily],
    xbar: &[f64],
    eps: f64,
    tau: f64,
    flavor: Flavor,
    region: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<FuzzyCertificate, SepError> {
    certify_stationarity(
        sets,
        families,
        xbar,
        0.5 * eps,
        eps,
        eps,
        tau,
        flavor,
        region,
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn maxdist_subdiff_two_points_on_line() {
        let s = maxdist_subdifferential(&[vec![0.0], vec![0.7]], 1.0).unwrap();
        assert_eq!(s.active, vec![0]);
        let t = &s.extremes[0];
        assert!((t[0][0] + 1.0).abs() < 1e-12 && (t[1][0] - 1.0).abs() < 1e-12);
        // Relation (a): sum zero, head norm one, support equals the max.
        assert!((t[0][0] + t[1][0]).abs() < 1e-15);
        let support = t[0][0] * (0.0 - 0.7);
        assert!((support - s.value).abs() < 1e-12);
    }

    #[test]
    fn maxdist_subdiff_tie_case() {
        let s = maxdist_subdifferential(&[vec![1.0], vec![-1.0], vec![0.0]], 1.0).unwrap();
        assert_eq!(s.active, vec![0, 1]);
        let e0 = &s.extremes[0];
        assert!((e0[0][0] - 1.0).abs() < 1e-12 && e0[1][0].abs() < 1e-12);
        assert!((e0[2][0] + 1.0).abs() < 1e-12);
        let e1 = &s.extremes[1];
        assert!(e1[0][0].abs() < 1e-12 && (e1[1][0] + 1.0).abs() < 1e-12);
        assert!((e1[2][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_max_is_an_error() {
        assert!(matches!(
            maxdist_subdifferential(&[vec![0.5], vec![0.5]], 1.0),
            Err(SepError::DegenerateMax)
        ));
    }

    #[test]
    fn f2_bound_respects_gamma() {
        let s = maxdist_subdifferential(&[vec![0.0], vec![1.0]], 2.0).unwrap();
        // |u*_1| + |u*_2| / gamma = 1 + 0.5 = 1.5.
        assert!(s.f2_bound_holds(&[vec![1.0], vec![1.0]], 1.5));
        assert!(!s.f2_bound_holds(&[vec![1.0], vec![1.0]], 1.4));
    }

    #[test]
    fn global_separation_disjoint_halflines() {
        let sets = vec![SetExpr::halfline_le(0.0), SetExpr::halfline_ge(0.5)];
        let seeds = vec![vec![0.0], vec![0.5]];
        let region = SetExpr::interval(-2.0, 2.0);
        let cert = search_separation_global(
            &sets, &seeds, 0.1, 0.05, 0.05, Flavor::Convex, &region, &cfg(),
        )
        .unwrap();
        assert!((cert.duals[0][0] - 1.0).abs() < 1e-9, "{:?}", cert.duals);
        assert!((cert.duals[1][0] + 1.0).abs() < 1e-9);
        assert!((cert.points[0][0] - 0.0).abs() < 1e-6);
        assert!((cert.points[1][0] - 0.5).abs() < 1e-6);
        let rep = verify_generalized(&cert, &sets, &cfg()).unwrap();
        assert!(rep.pass, "{:?}", rep.failing());
    }

    #[test]
    fn global_separation_halfplanes_2d() {
        let sets = vec![
            SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 },
            SetExpr::Halfspace { a: vec![0.0, -1.0], b: -0.2 },
        ];
        let seeds = vec![vec![0.0, 0.0], vec![0.0, 0.2]];
        let region = SetExpr::Box { lo: vec![-2.0, -2.0], hi: vec![2.0, 2.0] };
        let cert = search_separation_global(
            &sets, &seeds, 0.1, 0.05, 0.05, Flavor::Frechet, &region, &cfg(),
        )
        .unwrap();
        assert!(dist(&cert.duals[0], &[0.0, 1.0]) < 1e-9, "{:?}", cert.duals);
        assert!(dist(&cert.duals[1], &[0.0, -1.0]) < 1e-9);
    }

    #[test]
    fn global_separation_rejects_intersecting_sets() {
        let sets = vec![SetExpr::halfline_le(0.0), SetExpr::halfline_ge(0.0)];
        let seeds = vec![vec![0.0], vec![0.0]];
        let region = SetExpr::interval(-2.0, 2.0);
        assert!(matches!(
            search_separation_global(
                &sets, &seeds, 0.1, 0.05, 0.05, Flavor::Convex, &region, &cfg()
            ),
            Err(SepError::NonEmptyIntersection)
        ));
    }

    #[test]
    fn local_separation_small_gap_halflines() {
        let sets = vec![SetExpr::halfline_le(-0.1), SetExpr::halfline_ge(0.1)];
        let bases = vec![vec![0.0], vec![0.0]];
        let cert =
            search_separation_local(&sets, &bases, 0.05, 0.1, 0.05, Flavor::Convex, &cfg())
                .unwrap();
        assert!((cert.duals[0][0] - 0.5).abs() < 1e-9, "{:?}", cert.duals);
        assert!((cert.duals[1][0] + 0.5).abs() < 1e-9);
        let local = cert.local.as_ref().unwrap();
        assert!(norm(&local.witness) < 1e-9, "witness {:?}", local.witness);
        let sum = add(&cert.duals[0], &cert.duals[1]);
        assert!(norm(&sum) < 1e-12);
    }

    #[test]
    fn certify_halfplane_translations() {
        let lower = SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 };
        let upper = SetExpr::Halfspace { a: vec![0.0, -1.0], b: 0.0 };
        let fams = vec![
            PerturbationFamily::Translations {
                base: lower.clone(),
                bound_lo: vec![-1.0, -1.0],
                bound_hi: vec![1.0, 1.0],
            },
            PerturbationFamily::Translations {
                base: upper.clone(),
                bound_lo: vec![-1.0, -1.0],
                bound_hi: vec![1.0, 1.0],
            },
        ];
        let region = SetExpr::Box { lo: vec![-2.0, -2.0], hi: vec![2.0, 2.0] };
        let cert = certify_approx_stationarity(
            &[lower, upper],
            &fams,
            &[0.0, 0.0],
            0.25,
            0.9,
            Flavor::Frechet,
            &region,
            &cfg(),
        )
        .unwrap();
        assert!(dist(&cert.duals[0], &[0.0, 0.5]) < 1e-6, "duals {:?}", cert.duals);
        assert!(dist(&cert.duals[1], &[0.0, -0.5]) < 1e-6);
        let rep = verify_fuzzy(&cert, None, &cfg()).unwrap();
        assert!(rep.pass, "{:?}", rep.failing());
    }

    #[test]
    fn certify_fails_without_primal_witness() {
        let xaxis = SetExpr::Product {
            factors: vec![
                SetExpr::Box { lo: vec![f64::NEG_INFINITY], hi: vec![f64::INFINITY] },
                SetExpr::Singleton { p: vec![0.0] },
            ],
        };
        let yaxis = SetExpr::Product {
            factors: vec![
                SetExpr::Singleton { p: vec![0.0] },
                SetExpr::Box { lo: vec![f64::NEG_INFINITY], hi: vec![f64::INFINITY] },
            ],
        };
        let fams = vec![
            PerturbationFamily::Translations {
                base: xaxis.clone(),
                bound_lo: vec![-1.0, -1.0],
                bound_hi: vec![1.0, 1.0],
            },
            PerturbationFamily::Translations {
                base: yaxis.clone(),
                bound_lo: vec![-1.0, -1.0],
                bound_hi: vec![1.0, 1.0],
            },
        ];
        let region = SetExpr::Box { lo: vec![-2.0, -2.0], hi: vec![2.0, 2.0] };
        assert!(matches!(
            certify_approx_stationarity(
                &[xaxis, yaxis],
                &fams,
                &[0.0, 0.0],
                0.25,
                0.9,
                Flavor::Frechet,
                &region,
                &cfg()
            ),
            Err(SepError::NoWitness)
        ));
    }

    #[test]
    fn realize_halfplane_certificate() {
        let lower = SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 };
        let upper = SetExpr::Halfspace { a: vec![0.0, -1.0], b: 0.0 };
        let cert = FuzzyCertificate {
            flavor: Flavor::Frechet,
            perturbation_ids: vec!["lower".into(), "upper".into()],
            perturbations: vec![lower, upper],
            points: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            duals: vec![vec![0.0, 0.5], vec![0.0, -0.5]],
            eps: 0.25,
            beta: 0.25,
            tau: 0.9,
            xbar: vec![0.0, 0.0],
            base_points: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            witness: vec![0.0, 0.0],
        };
        let schedule = [0.25, 0.125, 0.0625];
        let r = realize_nonintersection(&cert, &schedule, &cfg()).unwrap();
        assert!(r.gap > 0.0);
        assert!(r.translations[0][1] > 0.0 && r.translations[1][1] < 0.0);
    }

    #[test]
    fn tampered_certificate_fails_verification() {
        let lower = SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 };
        let upper = SetExpr::Halfspace { a: vec![0.0, -1.0], b: 0.0 };
        let cert = FuzzyCertificate {
            flavor: Flavor::Frechet,
            perturbation_ids: vec!["lower".into(), "upper".into()],
            perturbations: vec![lower, upper],
            points: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            duals: vec![vec![0.0, 0.5], vec![0.0, -0.3]],
            eps: 0.25,
            beta: 0.25,
            tau: 0.9,
            xbar: vec![0.0, 0.0],
            base_points: vec![vec![0.0, 0.0], vec![0.0, 0.0]],
            witness: vec![0.0, 0.0],
        };
        let rep = verify_fuzzy(&cert, None, &cfg()).unwrap();
        assert!(!rep.pass);
        assert!(rep.failing().iter().any(|c| c.name.contains("normalization")));
    }

    #[test]
    fn singleton_family_certificate_passes_and_realizes() {
        // Normal cone to a singleton is the whole dual space. The even dual
        // split supports tau up to 1/2 here (only one distance is active).
        let cert = FuzzyCertificate {
            flavor: Flavor::Frechet,
            perturbation_ids: vec!["{0}".into(), "{1/300}".into()],
            perturbations: vec![
                SetExpr::Singleton { p: vec![0.0] },
                SetExpr::Singleton { p: vec![1.0 / 300.0] },
            ],
            points: vec![vec![0.0], vec![1.0 / 300.0]],
            duals: vec![vec![0.5], vec![-0.5]],
            eps: 0.25,
            beta: 0.25,
            tau: 0.4,
            xbar: vec![0.0],
            base_points: vec![vec![0.0], vec![0.0]],
            witness: vec![0.0],
        };
        let rep = verify_fuzzy(&cert, None, &cfg()).unwrap();
        assert!(rep.pass, "{:?}", rep.failing());
        let r = realize_nonintersection(&cert, &[0.001], &cfg()).unwrap();
        assert!(r.gap > 0.0);
    }
}
