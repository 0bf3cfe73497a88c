//! Aubin (Lipschitz-like) property: primal ratio sweep and the dual
//! normal-cone bound.

use super::{normal_cone, ConeError, Flavor};
use crate::geometry::{GeometryError, SetValuedMap};
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use crate::verdict::{ScheduleEntry, Status, Verdict};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AubinEstimate {
    pub verdict: Verdict,
    /// Smallest modulus validating the sweep at resolution (meaningful when
    /// the verdict holds).
    pub tau_hat: f64,
}

/// Default divergence cap: ratios beyond this under refinement are treated
/// as Aubin failure.
pub const AUBIN_RATIO_CAP: f64 = 1e3;

/// Sweeps x, x' in B_delta(xbar) and y in F(x') cap B_delta(ybar) over the
/// grid and reports the worst ratio d(y, F(x)) / d(x, x').
pub fn aubin_estimate(
    map: &SetValuedMap,
    xbar: &[f64],
    ybar: &[f64],
    delta: f64,
    cfg: &ToleranceConfig,
) -> Result<AubinEstimate, ConeError> {
    if map.cod_dim != 1 {
        return Err(ConeError::UnsupportedStructure(
            "Aubin sweep implemented for one-dimensional image spaces".into(),
        ));
    }
    let mut q = xbar.to_vec();
    q.extend_from_slice(ybar);
    if !map.graph.contains_tau(&q, cfg.tau_geom) {
        return Err(ConeError::OutsideGraph);
    }
    let yb = ybar[0];
    let mut schedule = Vec::new();
    let mut margins = Vec::new();
    let mut witness: Option<(Vec<f64>, Vec<f64>, f64, f64)> = None;
    let mut tau_hat: f64 = 0.0;
    for level in 0..4 {
        let d = delta * 0.5_f64.powi(level);
        let n = cfg.finest_grid().min(24);
        let xs = crate::geometry::grid_points(
            &xbar.iter().map(|v| v - d).collect::<Vec<_>>(),
            &xbar.iter().map(|v| v + d).collect::<Vec<_>>(),
            n,
        );
        let window = (yb - d, yb + d);
        let mut worst: f64 = 0.0;
        for xp in &xs {
            let Some(slice) = map.value_set(xp, window) else {
                return Err(ConeError::UnsupportedStructure(
                    "graph admits no exact slice".into(),
                ));
            };
            let ys = slice.sample(window.0, window.1, 8);
            if ys.is_empty() {
                continue;
            }
            for x in &xs {
                let dxx = dist(x, xp);
                if dxx <= 1e-12 {
                    continue;
                }
                // A wide probe window so empty slices register as +inf.
                let probe = (yb - 10.0 * delta, yb + 10.0 * delta);
                for &y in &ys {
                    let dy = map.image_distance(x, y, probe);
                    let ratio = dy / dxx;
                    if ratio > worst {
                        worst = ratio;
                        if ratio > AUBIN_RATIO_CAP {
                            witness = Some((x.clone(), xp.clone(), y, ratio));
                        }
                    }
                }
            }
        }
        schedule.push(ScheduleEntry {
            eps: d,
            rho: Some(d),
            perturbations: vec![],
            points: vec![xbar.to_vec()],
            value: worst,
        });
        margins.push(AUBIN_RATIO_CAP - worst);
        tau_hat = worst;
        if worst > AUBIN_RATIO_CAP {
            let mut v = Verdict::fails(d, schedule, margins);
            if let Some((x, xp, y, ratio)) = witness {
                v = v.with_note(format!(
                    "ratio {ratio:.3e} at x={x:?}, x'={xp:?}, y={y}"
                ));
            }
            return Ok(AubinEstimate { verdict: v, tau_hat: f64::INFINITY });
        }
    }
    Ok(AubinEstimate {
        verdict: Verdict::holds(schedule, margins),
        tau_hat: tau_hat.max(1e-12),
    })
}

/// Dual bound check of the Aubin property: |x*| <= tau |y*| for graph
/// normals near the base point.
pub fn aubin_dual_bound(
    map: &SetValuedMap,
    xbar: &[f64],
    ybar: &[f64],
    tau: f64,
    delta: f64,
    flavor: Flavor,
    cfg: &ToleranceConfig,
) -> Result<Verdict, ConeError> {
    if map.cod_dim != 1 {
        return Err(ConeError::UnsupportedStructure(
            "dual bound implemented for one-dimensional image spaces".into(),
        ));
    }
    let yb = ybar[0];
    let n = cfg.finest_grid().min(33);
    let xs = crate::geometry::grid_points(
        &xbar.iter().map(|v| v - delta).collect::<Vec<_>>(),
        &xbar.iter().map(|v| v + delta).collect::<Vec<_>>(),
        n,
    );
    let window = (yb - delta, yb + delta);
    let dx = map.dom_dim;
    let mut checked = 0usize;
    let mut skipped = 0usize;
    let mut worst_margin = f64::INFINITY;
    for x in &xs {
        let Some(slice) = map.value_set(x, window) else {
            return Err(ConeError::UnsupportedStructure(
                "graph admits no exact slice".into(),
            ));
        };
        for y in slice.sample(window.0, window.1, 6) {
            let mut p = x.clone();
            p.push(y);
            if dist(&p, &{
                let mut b = xbar.to_vec();
                b.push(yb);
                b
            }) > delta
            {
                continue;
            }
            let cone = match normal_cone(&map.graph, &p, flavor, cfg) {
                Ok(c) => c,
                Err(ConeError::UnsupportedStructure(_)) => {
                    skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            checked += 1;
            for g in &cone.generators {
                let xn = norm(&g[..dx]);
                let yn = norm(&g[dx..]);
                let margin = tau * yn + cfg.tau_geom - xn;
                worst_margin = worst_margin.min(margin);
                if margin < 0.0 {
                    let entry = ScheduleEntry {
                        eps: delta,
                        rho: Some(delta),
                        perturbations: vec![],
                        points: vec![p.clone()],
                        value: xn / yn.max(1e-300),
                    };
                    return Ok(Verdict::fails(delta, vec![entry], vec![margin]).with_note(
                        format!("normal {g:?} at {p:?} violates |x*| <= tau |y*|"),
                    ));
                }
            }
        }
    }
    if checked == 0 {
        return Ok(Verdict::inconclusive("no graph points sampled in the window"));
    }
    let entry = ScheduleEntry {
        eps: delta,
        rho: Some(delta),
        perturbations: vec![],
        points: vec![],
        value: worst_margin,
    };
    let mut v = Verdict::holds(vec![entry], vec![worst_margin]);
    if skipped > 0 {
        v = v.with_note(format!("{skipped} sampled points skipped (no closed-form cone)"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PiecewiseFn, SetExpr, Side};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn identity_map_has_modulus_one() {
        let f = PiecewiseFn::new(vec![], vec![vec![0.0, 1.0]]).unwrap();
        let m = SetValuedMap::from_piecewise(f);
        let est = aubin_estimate(&m, &[0.0], &[0.0], 0.5, &cfg()).unwrap();
        assert_eq!(est.verdict.status, Status::HoldsAtResolution);
        assert!((est.tau_hat - 1.0).abs() < 0.05, "tau_hat {}", est.tau_hat);
        let dual = aubin_dual_bound(&m, &[0.0], &[0.0], 1.0, 0.5, Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(dual.status, Status::HoldsAtResolution);
    }

    #[test]
    fn constant_map_has_modulus_zero() {
        let m = SetValuedMap::new(
            1,
            1,
            SetExpr::Halfspace { a: vec![0.0, -1.0], b: 0.0 },
        )
        .unwrap();
        let est = aubin_estimate(&m, &[0.0], &[0.0], 0.5, &cfg()).unwrap();
        assert_eq!(est.verdict.status, Status::HoldsAtResolution);
        assert!(est.tau_hat < 1e-9);
    }

    #[test]
    fn inverse_parabola_fails_aubin() {
        // Graph {(y^2, y)}: F(x) empty for x < 0.
        let f = PiecewiseFn::new(vec![], vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let m = SetValuedMap::new(1, 1, SetExpr::GraphOf { f, swapped: true }).unwrap();
        let est = aubin_estimate(&m, &[0.0], &[0.0], 0.25, &cfg()).unwrap();
        assert_eq!(est.verdict.status, Status::FailsWithWitness);
        let dual =
            aubin_dual_bound(&m, &[0.0], &[0.0], 10.0, 0.25, Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(dual.status, Status::FailsWithWitness);
    }

    #[test]
    fn f4_dual_bound_holds_near_origin() {
        let f = PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        let m = SetValuedMap::new(1, 1, SetExpr::EpiRegion { f, side: Side::Above }).unwrap();
        let v = aubin_dual_bound(&m, &[0.0], &[0.0], 1.0, 0.5, Flavor::Clarke, &cfg()).unwrap();
        assert_eq!(v.status, Status::HoldsAtResolution);
    }
}
