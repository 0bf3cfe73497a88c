//! Quantifier-sweep checkers for the primal properties: extremality,
//! stationarity, approximate (alpha-)stationarity, and
//! (alpha-/semi-)transversality with respect to general perturbation
//! families.
//!
//! "For any eps > 0" is semi-decided on a finite geometric schedule; every
//! verdict names the smallest certified eps. Ball-restricted emptiness uses
//! closed balls throughout, which is sound for the open-ball statements:
//! emptiness over the closed ball implies emptiness over the open one, and
//! the rho-grid absorbs the boundary cases.

use crate::geometry::{
    classify_emptiness, min_max_distance, sample_set_in_box, GeometryError, SetExpr,
};
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use crate::verdict::{Emptiness, ScheduleEntry, Verdict};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error("base point lies outside some set of the collection")]
    BasePointOutside,
    #[error("dimension mismatch between sets, families, and base point")]
    DimensionMismatch,
    #[error("each set needs a nonempty perturbation family")]
    FamilyEmpty,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// One enumerable member of a perturbation family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyMember {
    pub id: String,
    pub set: SetExpr,
}

/// An enumerable family Xi of candidate perturbations of one set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PerturbationFamily {
    /// All translates base + a with a in the bound box; enumerated
    /// scale-aware relative to the admissibility radius.
    Translations {
        base: SetExpr,
        bound_lo: Vec<f64>,
        bound_hi: Vec<f64>,
    },
    /// Declared parameter samples of a set-valued deformation; the base
    /// parameter generates the original set.
    Parametric {
        base_id: String,
        members: Vec<FamilyMember>,
    },
    Explicit { members: Vec<FamilyMember> },
}

impl PerturbationFamily {
    pub fn dim(&self) -> usize {
        match self {
            PerturbationFamily::Translations { base, .. } => base.dim(),
            PerturbationFamily::Parametric { members, .. }
            | PerturbationFamily::Explicit { members } => {
                members.first().map_or(0, |m| m.set.dim())
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            PerturbationFamily::Translations { .. } => false,
            PerturbationFamily::Parametric { members, .. }
            | PerturbationFamily::Explicit { members } => members.is_empty(),
        }
    }

    /// Members admissible for the strict bound d(anchor, member) < radius,
    /// sorted by that distance descending (larger admissible deformations
    /// first). `rho` scales the translation magnitudes.
    pub fn admissible(
        &self,
        anchor: &[f64],
        radius: f64,
        rho: f64,
        cap: usize,
    ) -> Vec<FamilyMember> {
        let mut out: Vec<(FamilyMember, f64)> = Vec::new();
        match self {
            PerturbationFamily::Translations { base, bound_lo, bound_hi } => {
                let d = base.dim();
                let mut shifts: Vec<Vec<f64>> = vec![zeros(d)];
                let mags = [
                    0.95 * radius,
                    0.9 * radius,
                    0.75 * radius,
                    0.5 * radius,
                    0.25 * radius,
                    0.1 * radius,
                    (0.5 * rho * rho).min(0.9 * radius),
                ];
                let mut dirs: Vec<Vec<f64>> = Vec::new();
                for k in 0..d {
                    let mut e = zeros(d);
                    e[k] = 1.0;
                    dirs.push(e.clone());
                    e[k] = -1.0;
                    dirs.push(e);
                }
                if d == 2 {
                    for sx in [-1.0, 1.0] {
                        for sy in [-1.0, 1.0] {
                            dirs.push(vec![sx / 2f64.sqrt(), sy / 2f64.sqrt()]);
                        }
                    }
                }
                for dir in &dirs {
                    for &m in &mags {
                        shifts.push(scale(dir, m));
                    }
                }
                for s in shifts {
                    if s.iter()
                        .zip(bound_lo.iter().zip(bound_hi))
                        .any(|(v, (l, h))| v < l || v > h)
                    {
                        continue;
                    }
                    let member = FamilyMember {
                        id: format!("translate({})", fmt_vec(&s)),
                        set: base.clone().translate(s.clone()),
                    };
                    push_admissible(&mut out, member, anchor, radius);
                }
            }
            PerturbationFamily::Parametric { members, .. }
            | PerturbationFamily::Explicit { members } => {
                for m in members {
                    push_admissible(&mut out, m.clone(), anchor, radius);
                }
            }
        }
        out.sort_by(|a, b| b.1.total_cmp(&a.1));
        out.truncate(cap);
        out.into_iter().map(|(m, _)| m).collect()
    }
}

fn push_admissible(
    out: &mut Vec<(FamilyMember, f64)>,
    member: FamilyMember,
    anchor: &[f64],
    radius: f64,
) {
    if let Ok((d, _)) = member.set.distance(anchor) {
        // Strictly inside the admissibility band, clear of the strict
        // inequality boundary.
        if d < radius * (1.0 - 1e-9) {
            out.push((member, d));
        }
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x}"))
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PropertyKind {
    /// Extremality at radius rho; `None` is the global form restricted to
    /// the declared region box.
    Extremal { rho: Option<f64> },
    Stationary,
    ApproxStationary,
    ApproxAlphaStationary { alpha: f64 },
    AlphaTransversal { alpha: f64 },
    Semitransversal { alpha: f64 },
}

/// Default geometric eps schedule 2^-1 .. 2^-8.
pub fn default_schedule() -> Vec<f64> {
    (1..=8).map(|k| 0.5_f64.powi(k)).collect()
}

fn rho_grid(eps: f64) -> Vec<f64> {
    (0..12).map(|j| eps * 0.9 * 0.55_f64.powi(j)).collect()
}

const FAMILY_CAP: usize = 18;

struct Sweep<'a> {
    sets: &'a [SetExpr],
    families: &'a [PerturbationFamily],
    xbar: &'a [f64],
    region: &'a SetExpr,
    cfg: &'a ToleranceConfig,
}

impl<'a> Sweep<'a> {
    /// Emptiness of the intersection of `perturbed` with the closed ball of
    /// radius `rho` at `center` (or the region box when rho is None).
    fn intersection_empty(
        &self,
        perturbed: &[SetExpr],
        center: &[f64],
        rho: Option<f64>,
    ) -> Result<(Emptiness, f64), GeometryError> {
        let (region, scale_ref) = match rho {
            Some(r) => (SetExpr::ball(center.to_vec(), r), r),
            None => {
                let (lo, hi) = self
                    .region
                    .bounding_box()
                    .ok_or(GeometryError::UnboundedRegion)?;
                let half = hi
                    .iter()
                    .zip(&lo)
                    .map(|(h, l)| 0.5 * (h - l))
                    .fold(0.0_f64, f64::max);
                (self.region.clone(), half)
            }
        };
        // Cheap nonemptiness probes (cyclic projections) before the full
        // grid sweep; most tuples in transversality sweeps resolve here.
        let tau_eff = self.cfg.tau_geom_at(scale_ref);
        let maxdist = |p: &[f64]| -> f64 {
            perturbed
                .iter()
                .map(|s| s.distance(p).map_or(f64::INFINITY, |(d, _)| d))
                .fold(0.0_f64, f64::max)
        };
        let strictly_in = |p: &[f64]| match rho {
            Some(r) => dist(p, center) < r * (1.0 - 1e-9),
            None => region.contains_tau(p, 0.0),
        };
        let mut probe = center.to_vec();
        for _ in 0..80 {
            if maxdist(&probe) < tau_eff && strictly_in(&probe) {
                return Ok((Emptiness::Nonempty, maxdist(&probe)));
            }
            let mut moved = 0.0;
            for s in perturbed.iter() {
                match crate::geometry::projection_of(s, &probe) {
                    Some(q) => {
                        moved += dist(&q, &probe);
                        probe = q;
                    }
                    None => break,
                }
            }
            if let Some(q) = crate::geometry::projection_of(&region, &probe) {
                moved += dist(&q, &probe);
                probe = q;
            }
            if moved <= 1e-14 {
                break;
            }
        }
        if maxdist(&probe) < tau_eff && strictly_in(&probe) {
            return Ok((Emptiness::Nonempty, maxdist(&probe)));
        }
        let r = min_max_distance(perturbed, &region, self.cfg)?;
        let strictly_inside = rho.map_or(true, |rr| {
            dist(&r.argmin, center) < rr * (1.0 - 1e-9) + self.cfg.tau_geom_at(scale_ref)
        });
        let mut verdict = classify_emptiness(r.value, scale_ref, self.cfg);
        if verdict == Emptiness::Nonempty && !strictly_inside {
            // Contact only on the sphere: not a certified interior point.
            verdict = Emptiness::Inconclusive;
        }
        Ok((verdict, r.value))
    }

    /// Candidate points x_i in Omega_i near xbar at radius eps.
    fn point_candidates(&self, i: usize, eps: f64) -> Vec<Vec<f64>> {
        let d = self.xbar.len();
        let lo: Vec<f64> = self.xbar.iter().map(|v| v - eps).collect();
        let hi: Vec<f64> = self.xbar.iter().map(|v| v + eps).collect();
        let mut pts = vec![self.xbar.to_vec()];
        for p in sample_set_in_box(&self.sets[i], &lo, &hi, 5, self.cfg) {
            if dist(&p, self.xbar) < eps * (1.0 - 1e-9) && !pts.iter().any(|q| dist(q, &p) < 1e-12)
            {
                pts.push(p);
            }
        }
        pts.truncate(6);
        pts
    }
}

/// Check extremality/stationarity-type properties of a collection of sets
/// with respect to perturbation families.
pub fn check_collection(
    kind: PropertyKind,
    sets: &[SetExpr],
    families: &[PerturbationFamily],
    xbar: &[f64],
    region: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<Verdict, CheckError> {
    validate(sets, families, xbar, cfg)?;
    match kind {
        PropertyKind::AlphaTransversal { .. } | PropertyKind::Semitransversal { .. } => {
            check_transversality(kind, sets, families, xbar, region, cfg)
        }
        _ => {
            let sweep = Sweep { sets, families, xbar, region, cfg };
            existential_sweep(kind, &sweep)
        }
    }
}

fn validate(
    sets: &[SetExpr],
    families: &[PerturbationFamily],
    xbar: &[f64],
    cfg: &ToleranceConfig,
) -> Result<(), CheckError> {
    if sets.is_empty() || sets.len() != families.len() {
        return Err(CheckError::DimensionMismatch);
    }
    let d = xbar.len();
    if sets.iter().any(|s| s.dim() != d) || families.iter().any(|f| f.dim() != d) {
        return Err(CheckError::DimensionMismatch);
    }
    if families.iter().any(|f| f.is_empty()) {
        return Err(CheckError::FamilyEmpty);
    }
    for s in sets {
        if !s.contains(xbar, cfg)? {
            return Err(CheckError::BasePointOutside);
        }
    }
    Ok(())
}

/// Properties of the form "for any eps there exist ...": search a witness
/// per scheduled eps.
fn existential_sweep(kind: PropertyKind, sw: &Sweep) -> Result<Verdict, CheckError> {
    let n = sw.sets.len();
    let mut schedule = Vec::new();
    let mut margins = Vec::new();
    let mut saw_inconclusive = false;
    for &eps in &default_schedule() {
        let mut found: Option<(ScheduleEntry, f64)> = None;
        match kind {
            PropertyKind::Extremal { rho } => {
                // Perturbations anchored at xbar with d(xbar, member) < eps.
                let cands: Vec<Vec<FamilyMember>> = (0..n)
                    .map(|i| sw.families[i].admissible(sw.xbar, eps, eps, FAMILY_CAP))
                    .collect();
                'combo: for combo in combos(&cands) {
                    let perturbed: Vec<SetExpr> =
                        combo.iter().map(|m| m.set.clone()).collect();
                    let (e, v) = sw.intersection_empty(&perturbed, sw.xbar, rho)?;
                    match e {
                        Emptiness::Empty => {
                            found = Some((
                                ScheduleEntry {
                                    eps,
                                    rho,
                                    perturbations: combo.iter().map(|m| m.id.clone()).collect(),
                                    points: vec![sw.xbar.to_vec()],
                                    value: v,
                                },
                                v - sw.cfg.margin_at(rho.unwrap_or(1.0)),
                            ));
                            break 'combo;
                        }
                        Emptiness::Inconclusive => saw_inconclusive = true,
                        Emptiness::Nonempty => {}
                    }
                }
            }
            PropertyKind::Stationary
            | PropertyKind::ApproxStationary
            | PropertyKind::ApproxAlphaStationary { .. } => {
                let alpha = match kind {
                    PropertyKind::ApproxAlphaStationary { alpha } => alpha,
                    _ => eps,
                };
                let fixed_points = matches!(kind, PropertyKind::Stationary);
                'rho: for rho in rho_grid(eps) {
                    let point_sets: Vec<Vec<Vec<f64>>> = if fixed_points {
                        vec![vec![sw.xbar.to_vec()]; n]
                    } else {
                        (0..n).map(|i| sw.point_candidates(i, eps)).collect()
                    };
                    for xs in combos(&point_sets) {
                        let cands: Vec<Vec<FamilyMember>> = (0..n)
                            .map(|i| {
                                sw.families[i].admissible(&xs[i], alpha * rho, rho, FAMILY_CAP)
                            })
                            .collect();
                        if cands.iter().any(|c| c.is_empty()) {
                            continue;
                        }
                        for combo in combos(&cands) {
                            let perturbed: Vec<SetExpr> = combo
                                .iter()
                                .zip(&xs)
                                .map(|(m, x)| m.set.clone().translate(neg(x)))
                                .collect();
                            let center = zeros(sw.xbar.len());
                            let (e, v) =
                                sw.intersection_empty(&perturbed, &center, Some(rho))?;
                            match e {
                                Emptiness::Empty => {
                                    found = Some((
                                        ScheduleEntry {
                                            eps,
                                            rho: Some(rho),
                                            perturbations: combo
                                                .iter()
                                                .map(|m| m.id.clone())
                                                .collect(),
                                            points: xs.iter().map(|x| x.to_vec()).collect(),
                                            value: v,
                                        },
                                        v - sw.cfg.margin_at(rho),
                                    ));
                                    break 'rho;
                                }
                                Emptiness::Inconclusive => saw_inconclusive = true,
                                Emptiness::Nonempty => {}
                            }
                        }
                    }
                }
            }
            _ => unreachable!("transversal kinds handled separately"),
        }
        match found {
            Some((entry, margin)) => {
                schedule.push(entry);
                margins.push(margin);
            }
            None => {
                return Ok(if saw_inconclusive {
                    Verdict::inconclusive(format!(
                        "no witness found at eps = {eps} and some emptiness checks fell in the margin band"
                    ))
                } else {
                    Verdict::fails(eps, schedule, margins)
                });
            }
        }
    }
    Ok(Verdict::holds(schedule, margins))
}

/// Transversality: "there is an eps > 0 such that for all admissible
/// tuples the intersection is nonempty". Scans the schedule from the
/// largest eps down and reports the first that survives the sweep.
pub fn check_transversality(
    kind: PropertyKind,
    sets: &[SetExpr],
    families: &[PerturbationFamily],
    xbar: &[f64],
    region: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<Verdict, CheckError> {
    validate(sets, families, xbar, cfg)?;
    let (alpha, semi) = match kind {
        PropertyKind::AlphaTransversal { alpha } => (alpha, false),
        PropertyKind::Semitransversal { alpha } => (alpha, true),
        _ => return Err(CheckError::DimensionMismatch),
    };
    let sw = Sweep { sets, families, xbar, region, cfg };
    let n = sets.len();
    let mut last_counterexample: Option<(f64, ScheduleEntry)> = None;
    let mut saw_inconclusive = false;
    for &eps in &default_schedule() {
        let mut eps_ok = true;
        let mut entries = Vec::new();
        let mut eps_margin = f64::INFINITY;
        'rho: for rho in rho_grid(eps) {
            let point_sets: Vec<Vec<Vec<f64>>> = if semi {
                vec![vec![xbar.to_vec()]; n]
            } else {
                (0..n).map(|i| sw.point_candidates(i, eps)).collect()
            };
            for xs in combos(&point_sets) {
                let cands: Vec<Vec<FamilyMember>> = (0..n)
                    .map(|i| sw.families[i].admissible(&xs[i], alpha * rho, rho, FAMILY_CAP))
                    .collect();
                if cands.iter().any(|c| c.is_empty()) {
                    // Empty quantifier domain at this radius: vacuous.
                    continue;
                }
                for combo in combos(&cands) {
                    let (perturbed, center): (Vec<SetExpr>, Vec<f64>) = if semi {
                        (combo.iter().map(|m| m.set.clone()).collect(), xbar.to_vec())
                    } else {
                        (
                            combo
                                .iter()
                                .zip(&xs)
                                .map(|(m, x)| m.set.clone().translate(neg(x)))
                                .collect(),
                            zeros(xbar.len()),
                        )
                    };
                    let (e, v) = sw.intersection_empty(&perturbed, &center, Some(rho))?;
                    let entry = ScheduleEntry {
                        eps,
                        rho: Some(rho),
                        perturbations: combo.iter().map(|m| m.id.clone()).collect(),
                        points: xs.iter().map(|x| x.to_vec()).collect(),
                        value: v,
                    };
                    match e {
                        Emptiness::Empty => {
                            last_counterexample = Some((eps, entry));
                            eps_ok = false;
                            break 'rho;
                        }
                        Emptiness::Nonempty => {
                            eps_margin = eps_margin.min(sw.cfg.tau_geom_at(rho) - v);
                            entries.push(entry);
                        }
                        Emptiness::Inconclusive => {
                            saw_inconclusive = true;
                            eps_ok = false;
                            break 'rho;
                        }
                    }
                }
            }
        }
        if eps_ok {
            entries.truncate(8);
            let m = if eps_margin.is_finite() { eps_margin } else { 0.0 };
            return Ok(Verdict::holds(entries, vec![m]).with_note(format!(
                "transversality certified with eps = {eps} (vacuous tuples skipped)"
            )));
        }
    }
    if let Some((eps, entry)) = last_counterexample {
        Ok(Verdict::fails(eps, vec![entry.clone()], vec![entry.value]))
    } else if saw_inconclusive {
        Ok(Verdict::inconclusive(
            "emptiness checks fell in the margin band at every scheduled eps",
        ))
    } else {
        Ok(Verdict::inconclusive("no decisive tuple sampled"))
    }
}

/// A concrete approximate-alpha-stationarity witness: the tuple whose
/// perturbed translated sets certifiably miss the rho-ball.
#[derive(Debug, Clone)]
pub struct AlphaWitness {
    pub eps: f64,
    pub rho: f64,
    pub points: Vec<Vec<f64>>,
    pub members: Vec<FamilyMember>,
    pub gap: f64,
}

/// Single-eps witness search for approximate alpha-stationarity; the
/// building block of dual certification.
pub fn find_alpha_witness(
    sets: &[SetExpr],
    families: &[PerturbationFamily],
    xbar: &[f64],
    alpha: f64,
    eps: f64,
    region: &SetExpr,
    cfg: &ToleranceConfig,
) -> Result<Option<AlphaWitness>, CheckError> {
    validate(sets, families, xbar, cfg)?;
    let sw = Sweep { sets, families, xbar, region, cfg };
    let n = sets.len();
    for rho in rho_grid(eps) {
        let point_sets: Vec<Vec<Vec<f64>>> =
            (0..n).map(|i| sw.point_candidates(i, eps)).collect();
        for xs in combos(&point_sets) {
            let cands: Vec<Vec<FamilyMember>> = (0..n)
                .map(|i| sw.families[i].admissible(&xs[i], alpha * rho, rho, FAMILY_CAP))
                .collect();
            if cands.iter().any(|c| c.is_empty()) {
                continue;
            }
            for combo in combos(&cands) {
                let perturbed: Vec<SetExpr> = combo
                    .iter()
                    .zip(&xs)
                    .map(|(m, x)| m.set.clone().translate(neg(x)))
                    .collect();
                let center = zeros(xbar.len());
                let (e, v) = sw.intersection_empty(&perturbed, &center, Some(rho))?;
                if e == Emptiness::Empty {
                    return Ok(Some(AlphaWitness {
                        eps,
                        rho,
                        points: xs.clone(),
                        members: combo,
                        gap: v,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// Cartesian product of candidate lists (deterministic order).
fn combos<T: Clone>(lists: &[Vec<T>]) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![vec![]];
    for list in lists {
        let mut next = Vec::with_capacity(out.len() * list.len().max(1));
        for prefix in &out {
            for item in list {
                let mut v = prefix.clone();
                v.push(item.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verdict::Status;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn translations_of(s: &SetExpr) -> PerturbationFamily {
        let d = s.dim();
        PerturbationFamily::Translations {
            base: s.clone(),
            bound_lo: vec![-1.0; d],
            bound_hi: vec![1.0; d],
        }
    }

    fn region2() -> SetExpr {
        SetExpr::Box { lo: vec![-2.0, -2.0], hi: vec![2.0, 2.0] }
    }

    #[test]
    fn halfplanes_are_extremal_with_translations() {
        let lower = SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 };
        let upper = SetExpr::Halfspace { a: vec![0.0, -1.0], b: 0.0 };
        let sets = vec![lower.clone(), upper.clone()];
        let fams = vec![translations_of(&lower), translations_of(&upper)];
        let v = check_collection(
            PropertyKind::Extremal { rho: Some(1.0) },
            &sets,
            &fams,
            &[0.0, 0.0],
            &region2(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::HoldsAtResolution, "{:?}", v.note);
        // The implication chain: stationary and approximately stationary too.
        for kind in [PropertyKind::Stationary, PropertyKind::ApproxStationary] {
            let v = check_collection(kind, &sets, &fams, &[0.0, 0.0], &region2(), &cfg()).unwrap();
            assert_eq!(v.status, Status::HoldsAtResolution, "{kind:?}");
        }
    }

    #[test]
    fn crossing_axes_are_not_approximately_stationary() {
        // x-axis and y-axis in R^2: translated lines always cross.
        let xaxis = SetExpr::Product { factors: vec![
            SetExpr::Box { lo: vec![f64::NEG_INFINITY], hi: vec![f64::INFINITY] },
            SetExpr::Singleton { p: vec![0.0] },
        ]};
        let yaxis = SetExpr::Product { factors: vec![
            SetExpr::Singleton { p: vec![0.0] },
            SetExpr::Box { lo: vec![f64::NEG_INFINITY], hi: vec![f64::INFINITY] },
        ]};
        let sets = vec![xaxis.clone(), yaxis.clone()];
        let fams = vec![translations_of(&xaxis), translations_of(&yaxis)];
        let v = check_collection(
            PropertyKind::ApproxStationary,
            &sets,
            &fams,
            &[0.0, 0.0],
            &region2(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::FailsWithWitness, "{:?}", v.note);
    }

    #[test]
    fn crossing_axes_are_transversal() {
        let xaxis = SetExpr::Product { factors: vec![
            SetExpr::Box { lo: vec![f64::NEG_INFINITY], hi: vec![f64::INFINITY] },
            SetExpr::Singleton { p: vec![0.0] },
        ]};
        let yaxis = SetExpr::Product { factors: vec![
            SetExpr::Singleton { p: vec![0.0] },
            SetExpr::Box { lo: vec![f64::NEG_INFINITY], hi: vec![f64::INFINITY] },
        ]};
        let sets = vec![xaxis.clone(), yaxis.clone()];
        let fams = vec![translations_of(&xaxis), translations_of(&yaxis)];
        let v = check_collection(
            PropertyKind::AlphaTransversal { alpha: 0.5 },
            &sets,
            &fams,
            &[0.0, 0.0],
            &region2(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::HoldsAtResolution, "{:?}", v.note);
    }

    #[test]
    fn halfplanes_fail_transversality() {
        let lower = SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 };
        let upper = SetExpr::Halfspace { a: vec![0.0, -1.0], b: 0.0 };
        let sets = vec![lower.clone(), upper.clone()];
        let fams = vec![translations_of(&lower), translations_of(&upper)];
        let v = check_collection(
            PropertyKind::AlphaTransversal { alpha: 0.5 },
            &sets,
            &fams,
            &[0.0, 0.0],
            &region2(),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::FailsWithWitness);
    }

    #[test]
    fn vacuous_family_gives_transversality() {
        // The single member is far from the base point at every radius.
        let line = SetExpr::Box { lo: vec![f64::NEG_INFINITY], hi: vec![f64::INFINITY] };
        let sets = vec![line.clone(), line.clone()];
        let far = PerturbationFamily::Explicit {
            members: vec![FamilyMember { id: "far".into(), set: SetExpr::Singleton { p: vec![5.0] } }],
        };
        let v = check_collection(
            PropertyKind::AlphaTransversal { alpha: 0.5 },
            &sets,
            &[far.clone(), far],
            &[0.0],
            &SetExpr::interval(-2.0, 2.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::HoldsAtResolution);
    }

    #[test]
    fn singleton_families_make_the_line_extremal() {
        // Omega_1 = Omega_2 = R; Xi_1 = {{0}}, Xi_2 = {{1/n}}.
        let line = SetExpr::Box { lo: vec![f64::NEG_INFINITY], hi: vec![f64::INFINITY] };
        let f1 = PerturbationFamily::Explicit {
            members: vec![FamilyMember { id: "p0".into(), set: SetExpr::Singleton { p: vec![0.0] } }],
        };
        let members: Vec<FamilyMember> = (1..=400)
            .map(|n| FamilyMember {
                id: format!("p1/{n}"),
                set: SetExpr::Singleton { p: vec![1.0 / n as f64] },
            })
            .collect();
        let f2 = PerturbationFamily::Explicit { members };
        let v = check_collection(
            PropertyKind::Extremal { rho: None },
            &[line.clone(), line],
            &[f1, f2],
            &[0.0],
            &SetExpr::interval(-2.0, 2.0),
            &cfg(),
        )
        .unwrap();
        assert_eq!(v.status, Status::HoldsAtResolution, "{:?}", v.note);
    }

    #[test]
    fn base_point_outside_rejected() {
        let s = SetExpr::halfline_le(0.0);
        let fam = translations_of(&s);
        let err = check_collection(
            PropertyKind::Stationary,
            &[s],
            &[fam],
            &[1.0],
            &SetExpr::interval(-2.0, 2.0),
            &cfg(),
        );
        assert!(matches!(err, Err(CheckError::BasePointOutside)));
    }
}
