//! Qualification conditions, the dual alternative, and multiplier
//! certificates for the triple model.

use super::{embed_families, embed_triple, SetoptError, Triple, TripleKind};
use crate::cones::{coderivative, normal_cone, Flavor};
use crate::extremality::PerturbationFamily;
use crate::geometry::{projection_of, SetExpr};
use crate::separation::certify_approx_stationarity;
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use crate::verdict::{ScheduleEntry, Status, Verdict};
use serde::{Deserialize, Serialize};

/// Outcome of a qualification-condition sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QcReport {
    pub verdict: Verdict,
    /// Largest scheduled eps for which no violating normalized pair was
    /// sampled.
    pub eps_found: Option<f64>,
    pub witness: Option<QcWitness>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QcWitness {
    pub graph_point: (Vec<f64>, Vec<f64>),
    pub omega_point: Vec<f64>,
    pub x1_star: Vec<f64>,
    pub x2_star: Vec<f64>,
    /// The (small) image-space argument paired with x1*.
    pub y_argument: Vec<f64>,
    pub sum_norm: f64,
}

/// Candidate (x-part, y-part) directions from a graph normal cone:
/// generators plus pairwise blends.
fn cone_candidates(gens: &[Vec<f64>], dx: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut out = Vec::new();
    let mut push = |v: Vec<f64>| {
        if norm(&v) > 1e-12 {
            let xp = v[..dx].to_vec();
            let yp = v[dx..].to_vec();
            if !out
                .iter()
                .any(|(a, b): &(Vec<f64>, Vec<f64>)| dist(a, &xp) + dist(b, &yp) <= 1e-12)
            {
                out.push((xp, yp));
            }
        }
    };
    for g in gens {
        push(g.clone());
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            for lam in [0.25, 0.5, 0.75] {
                push(axpy(&scale(&gens[i], lam), 1.0 - lam, &gens[j]));
            }
        }
    }
    out
}

fn graph_sample_points(t: &Triple, eps: f64, cfg: &ToleranceConfig) -> Vec<Vec<f64>> {
    let base = t.base_point();
    let mut pts = vec![base.clone()];
    if t.map.dom_dim == 1 && t.map.cod_dim == 1 {
        let window = (t.base_y[0] - eps, t.base_y[0] + eps);
        for k in 1..=4 {
            for s in [-1.0, 1.0] {
                let x = t.base_x[0] + s * eps * k as f64 / 4.0 * 0.9;
                if let Some(slice) = t.map.value_set(&[x], window) {
                    for v in slice.sample(window.0, window.1, 2) {
                        let p = vec![x, v];
                        if dist(&p, &base) < eps && !pts.iter().any(|q| dist(q, &p) <= 1e-12)
                        {
                            pts.push(p);
                        }
                    }
                }
            }
        }
    } else {
        // Projection probes around the base point.
        let d = base.len();
        for k in 0..d {
            for s in [-1.0, 1.0] {
                let mut p = base.clone();
                p[k] += s * 0.7 * eps;
                if let Some(q) = projection_of(&t.map.graph, &p) {
                    if dist(&q, &base) < eps && !pts.iter().any(|o| dist(o, &q) <= 1e-12) {
                        pts.push(q);
                    }
                }
            }
        }
    }
    pts.truncate(9);
    pts
}

/// Qualification condition sweep: search for normalized pairs
/// x1* in D*F(x1, y1)(eps B), x2* in N(Omega)(x2) with a small sum.
pub fn check_qc(
    t: &Triple,
    flavor: Flavor,
    extra_eps: &[f64],
    cfg: &ToleranceConfig,
) -> Result<QcReport, SetoptError> {
    t.check_base(cfg)?;
    let dx = t.map.dom_dim;
    let mut schedule: Vec<f64> = (1..=8).map(|k| 0.5_f64.powi(k)).collect();
    schedule.extend_from_slice(extra_eps);
    schedule.sort_by(|a, b| b.total_cmp(a));
    schedule.dedup();
    let mut last_witness: Option<(f64, QcWitness)> = None;
    for &eps in &schedule {
        let mut violated = false;
        let mut min_margin = f64::INFINITY;
        'sweep: for gp in graph_sample_points(t, eps, cfg) {
            let gcone = match normal_cone(&t.map.graph, &gp, flavor, cfg) {
                Ok(c) => c,
                Err(crate::cones::ConeError::UnsupportedStructure(m)) => {
                    return Err(SetoptError::UnsupportedStructure(m))
                }
                Err(e) => return Err(e.into()),
            };
            let g_cands = cone_candidates(&gcone.generators, dx);
            for x2 in super::omega_candidates(t, eps, cfg) {
                let ocone = normal_cone(&t.omega, &x2, flavor, cfg)?;
                let o_cands: Vec<Vec<f64>> = ocone
                    .generators
                    .iter()
                    .cloned()
                    .chain(
                        cone_candidates(&ocone.generators, dx)
                            .into_iter()
                            .map(|(a, _)| a),
                    )
                    .filter(|v| norm(v) > 1e-12)
                    .collect();
                for (a, b) in &g_cands {
                    let na = norm(a);
                    if na <= 1e-12 {
                        continue;
                    }
                    let ratio = norm(b) / na;
                    for w in &o_cands {
                        let what = unit(w).unwrap();
                        let ahat = scale(a, 1.0 / na);
                        for step in 1..20 {
                            let s = step as f64 / 20.0;
                            // |y*| = s * ratio must stay below eps.
                            if s * ratio >= eps * 0.999 {
                                continue;
                            }
                            let x1s = scale(&ahat, s);
                            let x2s = scale(&what, 1.0 - s);
                            let sum = norm(&add(&x1s, &x2s));
                            min_margin = min_margin.min(sum - eps);
                            if sum < eps {
                                last_witness = Some((
                                    eps,
                                    QcWitness {
                                        graph_point: (
                                            gp[..dx].to_vec(),
                                            gp[dx..].to_vec(),
                                        ),
                                        omega_point: x2.clone(),
                                        x1_star: x1s,
                                        x2_star: x2s,
                                        y_argument: scale(b, s / na),
                                        sum_norm: sum,
                                    },
                                ));
                                violated = true;
                                break 'sweep;
                            }
                        }
                    }
                }
            }
        }
        if !violated {
            let entry = ScheduleEntry {
                eps,
                rho: None,
                perturbations: vec![],
                points: vec![t.base_point()],
                value: if min_margin.is_finite() { min_margin } else { 1.0 },
            };
            let margin = if min_margin.is_finite() { min_margin } else { 1.0 };
            return Ok(QcReport {
                verdict: Verdict::holds(vec![entry], vec![margin]),
                eps_found: Some(eps),
                witness: None,
            });
        }
    }
    let (eps, w) = last_witness.expect("violated at every scheduled eps");
    let entry = ScheduleEntry {
        eps,
        rho: None,
        perturbations: vec![],
        points: vec![w.omega_point.clone()],
        value: w.sum_norm,
    };
    Ok(QcReport {
        verdict: Verdict::fails(eps, vec![entry], vec![w.sum_norm - eps]),
        eps_found: None,
        witness: Some(w),
    })
}

/// Multiplier certificate: the nondegenerate branch of the dual
/// alternative.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplierCertificate {
    pub m_bound: f64,
    pub eps: f64,
    pub flavor: Flavor,
    pub graph_points: Vec<(Vec<f64>, Vec<f64>)>,
    pub omega_point: Vec<f64>,
    pub perturbation_ids: Vec<String>,
    pub perturbations: Vec<SetExpr>,
    pub k_points: Vec<Vec<f64>>,
    pub ystars: Vec<Vec<f64>>,
    /// Residual of the coderivative inclusion actually achieved.
    pub inclusion_residual: f64,
}

/// Singular certificate: the degenerate branch with horizontal graph
/// normals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularCertificate {
    pub eps: f64,
    pub flavor: Flavor,
    pub graph_point: (Vec<f64>, Vec<f64>),
    pub omega_point: Vec<f64>,
    pub x1_star: Vec<f64>,
    pub x2_star: Vec<f64>,
    pub y_argument: Vec<f64>,
    pub sum_norm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
pub enum Alternative {
    Multiplier(MultiplierCertificate),
    Singular(SingularCertificate),
}

/// Threshold separating the two branches of the alternative: the
/// image-space dual component must stay above it for the multiplier branch.
pub const ALTERNATIVE_ALPHA: f64 = 0.1;

/// The dual alternative for an approximately stationary triple: either a
/// multiplier certificate (image-space dual bounded away from zero) or a
/// singular certificate (horizontal graph normals).
///
/// The singular branch is detected through the qualification-condition
/// sweep: a QC violation witness is exactly the data of the singular
/// certificate. When QC holds, the fuzzy-separation pipeline on the product
/// embedding produces the multiplier.
pub fn classify_alternative(
    t: &Triple,
    xi: &PerturbationFamily,
    region_x: &SetExpr,
    region_y: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<Alternative, SetoptError> {
    let primal = super::check_triple(
        TripleKind::ApproxStationary,
        t,
        xi,
        region_x,
        region_y,
        cfg,
    )?;
    if primal.status != Status::HoldsAtResolution {
        return Err(SetoptError::NotStationary);
    }
    let qc = check_qc(t, Flavor::Frechet, &[], cfg)?;
    if let Some(w) = qc.witness {
        return Ok(Alternative::Singular(SingularCertificate {
            eps: qc.verdict.failing_eps.unwrap_or(0.5_f64.powi(8)),
            flavor: Flavor::Frechet,
            graph_point: w.graph_point,
            omega_point: w.omega_point,
            x1_star: w.x1_star,
            x2_star: w.x2_star,
            y_argument: w.y_argument,
            sum_norm: w.sum_norm,
        }));
    }
    // Multiplier branch: run the embedding pipeline down the schedule and
    // keep the certificate whose image-space dual stays largest.
    let (sets, base) = embed_triple(t, cfg)?;
    let (families, catalogue) = embed_families(t, xi)?;
    let dx = t.map.dom_dim;
    let dy = t.map.cod_dim;
    let mut region_lo = region_x.bounding_box().map(|(l, _)| l).unwrap_or_default();
    let mut region_hi = region_x.bounding_box().map(|(_, h)| h).unwrap_or_default();
    let (ylo, yhi) = region_y
        .bounding_box()
        .unwrap_or((vec![-2.0; dy], vec![2.0; dy]));
    region_lo.extend(ylo);
    region_hi.extend(yhi);
    let region = SetExpr::Box { lo: region_lo, hi: region_hi };
    let mut best: Option<(f64, MultiplierCertificate)> = None;
    for k in 1..=3 {
        let eps = 0.5_f64.powi(k);
        let cert = match certify_approx_stationarity(
            &sets,
            &families,
            &base,
            eps,
            0.9,
            Flavor::Frechet,
            &region,
            cfg,
        ) {
            Ok(c) => c,
            Err(_) => continue,
        };
        // Dual blocks: (x1*, y1*) on the graph, (x2*, y2*) on Omega x Ktilde.
        let y1 = cert.duals[0][dx..].to_vec();
        let y1n = norm(&y1);
        if y1n <= ALTERNATIVE_ALPHA {
            continue;
        }
        let ystar = scale(&y1, -1.0 / y1n);
        let graph_pt = (cert.points[0][..dx].to_vec(), cert.points[0][dx..].to_vec());
        let omega_pt = cert.points[1][..dx].to_vec();
        let k_pt = cert.points[1][dx..].to_vec();
        // Recover the K-space perturbation from the catalogue or the
        // translated-base form.
        let ktilde = catalogue
            .iter()
            .find(|(id, _)| *id == cert.perturbation_ids[1])
            .map(|(_, s)| s.clone())
            .unwrap_or_else(|| recover_k_part(&cert.perturbations[1], dx, dy, &t.cone_k));
        let x1 = cert.duals[0][..dx].to_vec();
        let x2 = cert.duals[1][..dx].to_vec();
        let inclusion = norm(&add(&x1, &x2)) / y1n;
        let mc = MultiplierCertificate {
            m_bound: 1.0 / ALTERNATIVE_ALPHA,
            eps,
            flavor: Flavor::Frechet,
            graph_points: vec![graph_pt],
            omega_point: omega_pt,
            perturbation_ids: vec![cert.perturbation_ids[1].clone()],
            perturbations: vec![ktilde],
            k_points: vec![k_pt],
            ystars: vec![ystar],
            inclusion_residual: inclusion,
        };
        if best.as_ref().map_or(true, |(b, _)| y1n > *b) {
            best = Some((y1n, mc));
        }
    }
    match best {
        Some((_, mc)) => Ok(Alternative::Multiplier(mc)),
        None => Err(SetoptError::Invalid(
            "qualification condition holds but no multiplier certificate emerged; resolution exhausted"
                .into(),
        )),
    }
}

/// Extract the K-part of an embedded product/translate perturbation.
fn recover_k_part(set: &SetExpr, dx: usize, dy: usize, fallback: &SetExpr) -> SetExpr {
    match set {
        SetExpr::Product { factors } if factors.len() == 2 && factors[1].dim() == dy => {
            factors[1].clone()
        }
        SetExpr::Translate { inner, shift } => {
            let inner_k = recover_k_part(inner, dx, dy, fallback);
            inner_k.translate(shift[dx..].to_vec())
        }
        _ => fallback.clone(),
    }
}

/// Verify a multiplier certificate against the maps it certifies:
/// normalization, cone proximity of the image duals, and the coderivative
/// inclusion with the M-capped normal-cone term.
pub fn verify_multiplier(
    cert: &MultiplierCertificate,
    maps: &[crate::geometry::SetValuedMap],
    omega: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<crate::separation::VerificationReport, SetoptError> {
    use crate::separation::VerificationReport;
    if maps.len() != cert.graph_points.len()
        || maps.len() != cert.ystars.len()
        || maps.len() != cert.perturbations.len()
        || maps.len() != cert.k_points.len()
    {
        return Err(SetoptError::MalformedCertificate(
            "component arity mismatch".into(),
        ));
    }
    let mut rep = VerificationReport::default();
    let total: f64 = cert.ystars.iter().map(|y| norm(y)).sum();
    rep.push_eq(
        "normalization sum_i |y_i*| = 1",
        total,
        1.0,
        cfg.tau_num.max(1e-9),
    );
    // Cone proximity: each y_i* within eps of N(Ktilde_i)(v_i).
    for i in 0..maps.len() {
        let (dm, _) = cert.perturbations[i].distance(&cert.k_points[i])?;
        rep.push_lt(&format!("membership v_{} in Ktilde", i + 1), dm, cfg.tau_geom);
        let kcone = normal_cone(&cert.perturbations[i], &cert.k_points[i], cert.flavor, cfg)?;
        rep.push_lt(
            &format!("image dual proximity d(y_{}*, N(Ktilde)) < eps", i + 1),
            kcone.distance(&cert.ystars[i]),
            cert.eps,
        );
    }
    // Coderivative inclusion 0 in sum_i D*F_i(y_i*) + N(Omega) cap M B + eps B.
    let mut slice_cands: Vec<Vec<Vec<f64>>> = Vec::new();
    for i in 0..maps.len() {
        let s = coderivative(
            &maps[i],
            &cert.graph_points[i].0,
            &cert.graph_points[i].1,
            &cert.ystars[i],
            cert.flavor,
            cfg,
        )?;
        rep.push_eq(
            &format!("coderivative slice {} nonempty", i + 1),
            if s.is_empty() { 1.0 } else { 0.0 },
            0.0,
            0.5,
        );
        slice_cands.push(s.candidates(&[0.25, 0.5, 1.0, 2.0]));
    }
    let ocone = normal_cone(omega, &cert.omega_point, cert.flavor, cfg)?;
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; slice_cands.len()];
    if slice_cands.iter().all(|c| !c.is_empty()) {
        loop {
            let mut s_sum = zeros(cert.omega_point.len());
            for (i, &k) in idx.iter().enumerate() {
                s_sum = add(&s_sum, &slice_cands[i][k]);
            }
            // Nearest admissible normal-cone term, capped at M.
            let w = ocone.project_capped(&neg(&s_sum), cert.m_bound);
            best = best.min(norm(&add(&s_sum, &w)));
            let mut k = 0;
            loop {
                if k == idx.len() {
                    break;
                }
                idx[k] += 1;
                if idx[k] < slice_cands[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    rep.push_lt("inclusion residual < eps", best, cert.eps);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PiecewiseFn, SetValuedMap, Side};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn f4_triple() -> Triple {
        let f = PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        Triple {
            map: SetValuedMap::new(1, 1, SetExpr::EpiRegion { f, side: Side::Above }).unwrap(),
            omega: SetExpr::interval(-2.0, 2.0),
            cone_k: SetExpr::halfline_le(0.0),
            base_x: vec![0.0],
            base_y: vec![0.0],
        }
    }

    fn singular_triple() -> Triple {
        // gph F = (-inf, 0] x {0}, Omega = [0, inf) bounded for the sweeps.
        let graph = SetExpr::Product {
            factors: vec![SetExpr::halfline_le(0.0), SetExpr::Singleton { p: vec![0.0] }],
        };
        Triple {
            map: SetValuedMap::new(1, 1, graph).unwrap(),
            omega: SetExpr::interval(0.0, 2.0),
            cone_k: SetExpr::halfline_le(0.0),
            base_x: vec![0.0],
            base_y: vec![0.0],
        }
    }

    fn xi_halflines() -> PerturbationFamily {
        PerturbationFamily::Translations {
            base: SetExpr::halfline_le(0.0),
            bound_lo: vec![-4.0],
            bound_hi: vec![4.0],
        }
    }

    #[test]
    fn interior_point_satisfies_qc() {
        let t = f4_triple();
        let qc = check_qc(&t, Flavor::Frechet, &[], &cfg()).unwrap();
        assert_eq!(qc.verdict.status, Status::HoldsAtResolution, "{:?}", qc.verdict.note);
        assert!(qc.eps_found.unwrap() >= 0.4);
    }

    #[test]
    fn identity_map_qc_with_aubin_eps() {
        // F = identity has the Aubin property with modulus 1; QC holds with
        // eps = 1/(2*1+1) = 1/3.
        let idf = PiecewiseFn::new(vec![], vec![vec![0.0, 1.0]]).unwrap();
        let t = Triple {
            map: SetValuedMap::from_piecewise(idf),
            omega: SetExpr::interval(-2.0, 2.0),
            cone_k: SetExpr::halfline_le(0.0),
            base_x: vec![0.0],
            base_y: vec![0.0],
        };
        let qc = check_qc(&t, Flavor::Frechet, &[1.0 / 3.0], &cfg()).unwrap();
        assert_eq!(qc.verdict.status, Status::HoldsAtResolution);
        assert!(qc.eps_found.unwrap() >= 1.0 / 3.0 - 1e-12);
    }

    #[test]
    fn horizontal_graph_violates_qc() {
        let t = singular_triple();
        let qc = check_qc(&t, Flavor::Frechet, &[], &cfg()).unwrap();
        assert_eq!(qc.verdict.status, Status::FailsWithWitness);
        let w = qc.witness.unwrap();
        // The witness is the (0.5, -0.5) pair up to sampling.
        assert!(w.sum_norm < 0.5_f64.powi(8));
        assert!(norm(&w.y_argument) < 0.5_f64.powi(8));
        assert!((norm(&w.x1_star) + norm(&w.x2_star) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn f4_classifies_as_multiplier() {
        let t = f4_triple();
        let alt = classify_alternative(
            &t,
            &xi_halflines(),
            &SetExpr::interval(-2.0, 2.0),
            &SetExpr::interval(-2.0, 2.0),
            &cfg(),
        )
        .unwrap();
        match alt {
            Alternative::Multiplier(mc) => {
                assert_eq!(mc.ystars.len(), 1);
                // y* = +1 up to resolution.
                assert!((mc.ystars[0][0] - 1.0).abs() < 0.1, "y* = {:?}", mc.ystars);
                let rep =
                    verify_multiplier(&mc, &[t.map.clone()], &t.omega, &cfg()).unwrap();
                assert!(rep.pass, "{:?}", rep.failing());
            }
            Alternative::Singular(_) => panic!("expected the multiplier branch"),
        }
    }

    #[test]
    fn singular_instance_classifies_as_singular() {
        let t = singular_triple();
        let alt = classify_alternative(
            &t,
            &xi_halflines(),
            &SetExpr::interval(-2.0, 2.0),
            &SetExpr::interval(-2.0, 2.0),
            &cfg(),
        )
        .unwrap();
        match alt {
            Alternative::Singular(sc) => {
                assert!((norm(&sc.x1_star) + norm(&sc.x2_star) - 1.0).abs() < 1e-9);
                assert!(sc.sum_norm < sc.eps);
            }
            Alternative::Multiplier(_) => panic!("expected the singular branch"),
        }
    }

    #[test]
    fn non_stationary_triple_is_rejected() {
        // F(x) = {x} identity with K = (-inf, 0] and translations: the pair
        // behaves like crossing lines; approximate stationarity fails.
        let idf = PiecewiseFn::new(vec![], vec![vec![0.0, 1.0]]).unwrap();
        let t = Triple {
            map: SetValuedMap::from_piecewise(idf),
            omega: SetExpr::interval(-2.0, 2.0),
            cone_k: SetExpr::halfline_le(0.0),
            base_x: vec![0.0],
            base_y: vec![0.0],
        };
        let err = classify_alternative(
            &t,
            &xi_halflines(),
            &SetExpr::interval(-2.0, 2.0),
            &SetExpr::interval(-2.0, 2.0),
            &cfg(),
        );
        assert!(matches!(err, Err(SetoptError::NotStationary)));
    }

    #[test]
    fn paper_style_multiplier_verifies_directly() {
        // Hand-built certificate at t = 0.5: point (t/2, -t^2/4), Ktilde =
        // (-inf, -t], y2 = -t, y* = 1, coderivative value -t.
        let t = f4_triple();
        let tv = 0.5;
        let mc = MultiplierCertificate {
            m_bound: 10.0,
            eps: tv + 1e-6,
            flavor: Flavor::Frechet,
            graph_points: vec![(vec![tv / 2.0], vec![-tv * tv / 4.0])],
            omega_point: vec![0.0],
            perturbation_ids: vec!["K-t".into()],
            perturbations: vec![SetExpr::halfline_le(-tv)],
            k_points: vec![vec![-tv]],
            ystars: vec![vec![1.0]],
            inclusion_residual: tv,
        };
        let rep = verify_multiplier(&mc, &[t.map.clone()], &t.omega, &cfg()).unwrap();
        assert!(rep.pass, "{:?}", rep.failing());
        // Tampered normalization fails.
        let mut bad = mc.clone();
        bad.ystars = vec![vec![0.7]];
        let rep = verify_multiplier(&bad, &[t.map], &t.omega, &cfg()).unwrap();
        assert!(!rep.pass);
    }
}
