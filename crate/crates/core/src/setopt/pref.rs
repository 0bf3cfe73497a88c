//! Level-set mappings (preferences) on the image space, their local
//! regularity properties, and the induced perturbation families.

use super::SetoptError;
use crate::extremality::{FamilyMember, PerturbationFamily};
use crate::geometry::{sample_set_in_box, SetExpr};
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use serde::{Deserialize, Serialize};

/// Structured level-set mapping L: Y => Y defining "v precedes y iff
/// v in L(y)".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PreferenceMap {
    /// L(y) = {y}.
    IdentitySingleton { dim: usize },
    /// L(y) = y + C for a fixed set C; `strict` excludes the boundary of C.
    OrderCone { offset: SetExpr, strict: bool },
    /// Strict Pareto quadrant in the plane, except L(0) = {0}.
    PinnedStrictQuadrant2,
}

impl PreferenceMap {
    pub fn dim(&self) -> usize {
        match self {
            PreferenceMap::IdentitySingleton { dim } => *dim,
            PreferenceMap::OrderCone { offset, .. } => offset.dim(),
            PreferenceMap::PinnedStrictQuadrant2 => 2,
        }
    }

    /// Exact membership v in L(y).
    pub fn contains_value(&self, y: &[f64], v: &[f64], tol: f64) -> bool {
        match self {
            PreferenceMap::IdentitySingleton { .. } => dist(y, v) <= tol,
            PreferenceMap::OrderCone { offset, strict } => {
                let w = sub(v, y);
                if *strict {
                    // Strictly inside: membership with a negative margin.
                    offset.contains_tau(&w, -tol)
                } else {
                    offset.contains_tau(&w, tol)
                }
            }
            PreferenceMap::PinnedStrictQuadrant2 => {
                if norm(y) <= tol {
                    dist(v, &[0.0, 0.0]) <= tol
                } else {
                    v[0] < y[0] - tol && v[1] < y[1] - tol
                }
            }
        }
    }

    /// cl L(y) as a symbolic set.
    pub fn value_closure(&self, y: &[f64]) -> SetExpr {
        match self {
            PreferenceMap::IdentitySingleton { .. } => SetExpr::Singleton { p: y.to_vec() },
            PreferenceMap::OrderCone { offset, .. } => {
                offset.clone().translate(y.to_vec())
            }
            PreferenceMap::PinnedStrictQuadrant2 => {
                if norm(y) <= 1e-12 {
                    SetExpr::Singleton { p: vec![0.0, 0.0] }
                } else {
                    SetExpr::Box {
                        lo: vec![f64::NEG_INFINITY, f64::NEG_INFINITY],
                        hi: y.to_vec(),
                    }
                }
            }
        }
    }

    /// d(q, L(v)) (the closure distance; equal for the strict variants).
    pub fn value_distance(&self, q: &[f64], v: &[f64]) -> f64 {
        self.value_closure(v)
            .distance(q)
            .map(|(d, _)| d)
            .unwrap_or(f64::INFINITY)
    }

    /// v in L°(ybar) = L(ybar) minus {ybar}.
    pub fn lcirc_contains(&self, ybar: &[f64], v: &[f64], tol: f64) -> bool {
        self.contains_value(ybar, v, tol) && dist(v, ybar) > tol
    }

    /// v in L•_eps(y) = {v : d(y, L(v)) < eps}.
    pub fn bullet_contains(&self, y: &[f64], v: &[f64], eps: f64) -> bool {
        self.value_distance(y, v) < eps
    }

    /// Signed inside-depth of `v` in cl L(ybar): positive strictly inside,
    /// negative outside; used for strict-emptiness margins.
    pub fn inside_depth(&self, ybar: &[f64], v: &[f64]) -> f64 {
        match self {
            PreferenceMap::IdentitySingleton { .. } => -dist(v, ybar),
            PreferenceMap::OrderCone { offset, .. } => {
                let w = sub(v, ybar);
                set_depth(offset, &w)
            }
            PreferenceMap::PinnedStrictQuadrant2 => {
                if norm(ybar) <= 1e-12 {
                    -norm(v)
                } else {
                    (ybar[0] - v[0]).min(ybar[1] - v[1])
                }
            }
        }
    }
}

/// Signed depth inside a halfspace-described set (negative outside).
fn set_depth(set: &SetExpr, p: &[f64]) -> f64 {
    match set {
        SetExpr::Halfspace { a, b } => (b - dot(a, p)) / norm(a),
        SetExpr::Polyhedron { halfspaces } => halfspaces
            .iter()
            .map(|(a, b)| (b - dot(a, p)) / norm(a))
            .fold(f64::INFINITY, f64::min),
        SetExpr::Box { lo, hi } => p
            .iter()
            .zip(lo.iter().zip(hi))
            .map(|(x, (l, h))| (x - l).min(h - x))
            .fold(f64::INFINITY, f64::min),
        SetExpr::ClosedBall { center, r } => r - dist(center, p),
        SetExpr::Translate { inner, shift } => set_depth(inner, &sub(p, shift)),
        SetExpr::Intersect { children } => children
            .iter()
            .map(|c| set_depth(c, p))
            .fold(f64::INFINITY, f64::min),
        _ => {
            // Fallback: outside-distance only (depth 0 on the set).
            match set.distance(p) {
                Ok((d, _)) if d > 0.0 => -d,
                _ => 0.0,
            }
        }
    }
}

/// Bundled level-set oracles at a point: L°(y) and L•_eps(y).
pub struct LevelSets<'a> {
    pref: &'a PreferenceMap,
    y: Vec<f64>,
    eps: f64,
}

/// The two level-set constructions as membership oracles, plus the symbolic
/// closure of L(y).
pub fn level_ops<'a>(
    pref: &'a PreferenceMap,
    y: &[f64],
    eps: f64,
) -> Result<(LevelSets<'a>, SetExpr), SetoptError> {
    if y.len() != pref.dim() {
        return Err(SetoptError::DimensionMismatch);
    }
    if eps <= 0.0 {
        return Err(SetoptError::Invalid("eps must be positive".into()));
    }
    Ok((
        LevelSets { pref, y: y.to_vec(), eps },
        pref.value_closure(y),
    ))
}

impl LevelSets<'_> {
    pub fn lcirc_contains(&self, v: &[f64], tol: f64) -> bool {
        self.pref.lcirc_contains(&self.y, v, tol)
    }

    pub fn bullet_contains(&self, v: &[f64]) -> bool {
        self.pref.bullet_contains(&self.y, v, self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PropVerdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Verdicts for the six local regularity properties of a level-set
/// mapping, with the characterization-consistency flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PropertyOReport {
    pub o: [PropVerdict; 6],
    /// Named implication checks; a false flag is a consistency violation.
    pub implications: Vec<(String, bool)>,
}

fn eps_schedule() -> Vec<f64> {
    (1..=8).map(|k| 0.5_f64.powi(k)).collect()
}

/// Candidate points of L°(ybar) within radius r, sampled at several
/// scales (the characterizations pair large balls with small level
/// tolerances, so near-ybar candidates matter at every radius).
fn lcirc_samples(
    pref: &PreferenceMap,
    ybar: &[f64],
    r: f64,
    n: usize,
    cfg: &ToleranceConfig,
) -> Vec<Vec<f64>> {
    let d = ybar.len();
    let cl = pref.value_closure(ybar);
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut push = |p: Vec<f64>| {
        if pref.lcirc_contains(ybar, &p, cfg.tau_geom)
            && dist(&p, ybar) < r
            && !out.iter().any(|q| dist(q, &p) <= 1e-14)
        {
            out.push(p);
        }
    };
    for scale in [1.0, 0.3, 0.1, 0.01, 1e-3, 1e-4] {
        let rr = r * scale;
        let lo: Vec<f64> = ybar.iter().map(|c| c - rr).collect();
        let hi: Vec<f64> = ybar.iter().map(|c| c + rr).collect();
        for p in sample_set_in_box(&cl, &lo, &hi, n, cfg) {
            push(p);
        }
        // Inward-nudged candidates survive strict membership better than
        // boundary projections.
        for k in 0..d {
            for s in [-1.0, 1.0] {
                let mut p = ybar.to_vec();
                p[k] += s * 0.5 * rr;
                push(p);
            }
        }
        let mut diag = ybar.to_vec();
        for x in diag.iter_mut() {
            *x -= 0.5 * rr / (d as f64).sqrt();
        }
        push(diag);
    }
    out
}

/// Check properties O1..O6 of a level-set mapping near `ybar`, all
/// resolution-tagged, plus the characterization battery.
pub fn check_preference_properties(
    pref: &PreferenceMap,
    ybar: &[f64],
    cfg: &ToleranceConfig,
) -> Result<PropertyOReport, SetoptError> {
    if ybar.len() != pref.dim() {
        return Err(SetoptError::DimensionMismatch);
    }
    let tau = cfg.tau_geom;
    let sched = eps_schedule();
    // O1 via the finite-eps characterization: for each scheduled eps there
    // is a v in Lbullet_eps(ybar) * Lcirc(ybar) * B_eps(ybar).
    let o1_at = |eps: f64, delta: f64| -> bool {
        lcirc_samples(pref, ybar, delta, 9, cfg)
            .into_iter()
            .any(|v| pref.bullet_contains(ybar, &v, eps))
    };
    let o1 = sched.iter().all(|&e| o1_at(e, e));
    // The paired (eps, delta) characterization must agree with the single
    // eps = delta form.
    let o1_pairs = sched
        .iter()
        .all(|&e| sched.iter().all(|&dl| o1_at(e, dl)))
        == o1;
    // O2: ybar in cl Lcirc(ybar).
    let o2 = sched
        .iter()
        .all(|&r| !lcirc_samples(pref, ybar, r, 9, cfg).is_empty());
    // O3: ybar not in L(ybar).
    let o3 = !pref.contains_value(ybar, ybar, tau);
    // O4: y in cl L(y) for sampled y near ybar.
    let d = ybar.len();
    let r4 = 0.25;
    let lo: Vec<f64> = ybar.iter().map(|c| c - r4).collect();
    let hi: Vec<f64> = ybar.iter().map(|c| c + r4).collect();
    let mut o4 = true;
    for y in crate::geometry::grid_points(&lo, &hi, 7) {
        let (dcl, _) = pref.value_closure(&y).distance(&y).map_err(SetoptError::from)?;
        if dcl > tau {
            o4 = false;
            break;
        }
    }
    // O5 / O6: transitivity-style closures on sampled pairs. A violation
    // needs the hypothesis to hold solidly (y strictly accepted) and the
    // conclusion to fail by a clear margin: v outside cl L(ybar), or v
    // collapsing onto ybar itself (excluded from the punctured level set).
    let mut o5 = true;
    let mut o6 = true;
    let conclusion_fails = |v: &[f64]| -> bool {
        pref.inside_depth(ybar, v) < -10.0 * tau
            || (dist(v, ybar) <= tau && !pref.contains_value(ybar, v, tau))
    };
    for y in lcirc_samples(pref, ybar, 0.5, 7, cfg) {
        let cl = pref.value_closure(&y);
        let ylo: Vec<f64> = y.iter().map(|c| c - 0.5).collect();
        let yhi: Vec<f64> = y.iter().map(|c| c + 0.5).collect();
        for v in sample_set_in_box(&cl, &ylo, &yhi, 5, cfg) {
            if conclusion_fails(&v) {
                o5 = false;
            }
        }
    }
    for y in {
        let cl = pref.value_closure(ybar);
        let lo: Vec<f64> = ybar.iter().map(|c| c - 0.5).collect();
        let hi: Vec<f64> = ybar.iter().map(|c| c + 0.5).collect();
        sample_set_in_box(&cl, &lo, &hi, 7, cfg)
            .into_iter()
            .filter(|y| pref.contains_value(ybar, y, tau))
            .collect::<Vec<_>>()
    } {
        let cl = pref.value_closure(&y);
        let ylo: Vec<f64> = y.iter().map(|c| c - 0.5).collect();
        let yhi: Vec<f64> = y.iter().map(|c| c + 0.5).collect();
        for v in sample_set_in_box(&cl, &ylo, &yhi, 5, cfg) {
            if pref.inside_depth(ybar, &v) < -10.0 * tau && !pref.contains_value(ybar, &v, tau)
            {
                o6 = false;
            }
        }
    }
    let to_v = |b: bool| if b { PropVerdict::Holds } else { PropVerdict::Fails };
    let o = [to_v(o1), to_v(o2), to_v(o3), to_v(o4), to_v(o5), to_v(o6)];
    // Characterization battery; `implies` is violated only when the premise
    // holds and the conclusion fails.
    let implies = |a: bool, b: bool| !a || b;
    // O3 <=> L(ybar) = Lcirc(ybar): both sides reduce to ybar not in L(ybar).
    let o3_char = o3 == !pref.contains_value(ybar, ybar, tau);
    let mut implications = vec![
        ("O1 characterizations agree".to_string(), o1_pairs),
        ("O1 => O2".to_string(), implies(o1, o2)),
        ("O3 <=> L = L-circ".to_string(), o3_char),
        ("O2 & O4 => O1".to_string(), implies(o2 && o4, o1)),
        ("O3 & O4 => O2".to_string(), implies(o3 && o4, o2)),
    ];
    if o3 {
        implications.push(("under O3, O5 <=> O6".to_string(), o5 == o6));
    }
    Ok(PropertyOReport { o, implications })
}

/// The set K = L(ybar) u {ybar} and the family of closures cl L(y) for
/// sampled y in K * B_delta(ybar).
pub fn build_level_perturbations(
    pref: &PreferenceMap,
    ybar: &[f64],
    delta: f64,
    cfg: &ToleranceConfig,
) -> Result<(SetExpr, PerturbationFamily), SetoptError> {
    if delta <= 0.0 {
        return Err(SetoptError::Invalid("delta must be positive".into()));
    }
    if ybar.len() != pref.dim() {
        return Err(SetoptError::DimensionMismatch);
    }
    let k = SetExpr::UnionFinite {
        children: vec![
            pref.value_closure(ybar),
            SetExpr::Singleton { p: ybar.to_vec() },
        ],
    };
    let lo: Vec<f64> = ybar.iter().map(|c| c - delta).collect();
    let hi: Vec<f64> = ybar.iter().map(|c| c + delta).collect();
    let mut anchors: Vec<Vec<f64>> = vec![ybar.to_vec()];
    for p in sample_set_in_box(&k, &lo, &hi, 9, cfg) {
        if dist(&p, ybar) < delta && !anchors.iter().any(|a| dist(a, &p) <= 1e-12) {
            // Members come from K itself: either ybar or points of L(ybar).
            if pref.contains_value(ybar, &p, cfg.tau_geom) || dist(&p, ybar) <= cfg.tau_geom {
                anchors.push(p);
            }
        }
    }
    let members: Vec<FamilyMember> = anchors
        .iter()
        .map(|y| FamilyMember {
            id: format!(
                "clL({})",
                y.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
            ),
            set: pref.value_closure(y),
        })
        .collect();
    Ok((k, PerturbationFamily::Explicit { members }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn order_1d_strict() -> PreferenceMap {
        // L(y) = (-inf, y).
        PreferenceMap::OrderCone {
            offset: SetExpr::halfline_le(0.0),
            strict: true,
        }
    }

    #[test]
    fn identity_level_ops() {
        let pref = PreferenceMap::IdentitySingleton { dim: 1 };
        let (ls, cl) = level_ops(&pref, &[0.0], 0.25).unwrap();
        assert_eq!(cl, SetExpr::Singleton { p: vec![0.0] });
        // L-circ empty, L-bullet = the eps-ball.
        assert!(!ls.lcirc_contains(&[0.1], 1e-9));
        assert!(ls.bullet_contains(&[0.2]));
        assert!(!ls.bullet_contains(&[0.3]));
    }

    #[test]
    fn order_level_ops() {
        let pref = order_1d_strict();
        let (ls, _) = level_ops(&pref, &[0.0], 0.25).unwrap();
        // Lbullet_eps(y) = (y - eps, inf).
        assert!(ls.bullet_contains(&[5.0]));
        assert!(ls.bullet_contains(&[-0.2]));
        assert!(!ls.bullet_contains(&[-0.3]));
        assert!(ls.lcirc_contains(&[-0.5], 1e-9));
        assert!(!ls.lcirc_contains(&[0.5], 1e-9));
    }

    #[test]
    fn identity_property_pattern() {
        let pref = PreferenceMap::IdentitySingleton { dim: 1 };
        let rep = check_preference_properties(&pref, &[0.0], &cfg()).unwrap();
        assert_eq!(rep.o[3], PropVerdict::Holds, "O4");
        assert_eq!(rep.o[4], PropVerdict::Holds, "O5");
        assert_eq!(rep.o[0], PropVerdict::Fails, "O1");
        assert_eq!(rep.o[1], PropVerdict::Fails, "O2");
        assert!(rep.implications.iter().all(|(_, ok)| *ok), "{:?}", rep.implications);
    }

    #[test]
    fn pinned_quadrant_property_pattern() {
        let pref = PreferenceMap::PinnedStrictQuadrant2;
        let rep = check_preference_properties(&pref, &[0.0, 0.0], &cfg()).unwrap();
        assert_eq!(rep.o[3], PropVerdict::Holds, "O4");
        assert_eq!(rep.o[4], PropVerdict::Holds, "O5");
        assert_eq!(rep.o[0], PropVerdict::Fails, "O1");
        assert_eq!(rep.o[1], PropVerdict::Fails, "O2");
        assert!(rep.implications.iter().all(|(_, ok)| *ok), "{:?}", rep.implications);
    }

    #[test]
    fn one_dim_order_all_properties_hold() {
        let pref = order_1d_strict();
        let rep = check_preference_properties(&pref, &[0.0], &cfg()).unwrap();
        for (k, v) in rep.o.iter().enumerate() {
            assert_eq!(*v, PropVerdict::Holds, "O{}", k + 1);
        }
        assert!(rep.implications.iter().all(|(_, ok)| *ok), "{:?}", rep.implications);
    }

    #[test]
    fn level_perturbations_identity_collapse() {
        let pref = PreferenceMap::IdentitySingleton { dim: 1 };
        let (k, fam) = build_level_perturbations(&pref, &[0.0], 1.0, &cfg()).unwrap();
        assert!(k.contains_tau(&[0.0], 1e-9));
        assert!(!k.contains_tau(&[0.5], 1e-9));
        match fam {
            PerturbationFamily::Explicit { members } => {
                assert_eq!(members.len(), 1);
                assert_eq!(members[0].set, SetExpr::Singleton { p: vec![0.0] });
            }
            _ => panic!("expected explicit family"),
        }
    }

    #[test]
    fn level_perturbations_one_dim_order() {
        let pref = order_1d_strict();
        let (k, fam) = build_level_perturbations(&pref, &[0.0], 1.0, &cfg()).unwrap();
        // K = cl (-inf, 0) u {0} = (-inf, 0].
        assert!(k.contains_tau(&[-3.0], 1e-9));
        assert!(k.contains_tau(&[0.0], 1e-9));
        assert!(!k.contains_tau(&[0.2], 1e-9));
        match &fam {
            PerturbationFamily::Explicit { members } => {
                assert!(members.len() >= 3);
                for m in members {
                    // Each member is a halfline (-inf, y] with y in (-1, 0].
                    assert!(m.set.contains_tau(&[-2.0], 1e-9));
                }
            }
            _ => panic!("expected explicit family"),
        }
    }
}
