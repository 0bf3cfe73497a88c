//! Sampling oracles for normal-cone membership.
//!
//! The Frechet oracle estimates the limsup of <v, x - p>/|x - p| over set
//! points x -> p sampled at geometric radii. The Clarke oracle samples
//! candidate tangent directions and can only refute membership, never
//! certify it; structured cones are authoritative and this is advisory.

use super::{ConeError, ConeStatus, Flavor};
use crate::geometry::{projection_of, SetExpr};
use crate::tol::ToleranceConfig;
use crate::vecn::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct MembershipStatus {
    pub status: ConeStatus,
    /// Estimated distance to the cone: 0 when inside, otherwise the
    /// positive limsup estimate scaled by |v|.
    pub distance: f64,
    /// The empirical limsup of the normalized quotient.
    pub limsup: f64,
}

/// Deterministic per-call RNG stream.
fn stream(cfg: &ToleranceConfig, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if let Some(u) = unit(&v) {
            if norm(&v) > 0.1 {
                return u;
            }
        }
    }
}

/// Set points near `p` at distance comparable to `radius`, found by
/// projecting random probes.
fn set_points_at_radius(
    set: &SetExpr,
    p: &[f64],
    radius: f64,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for _ in 0..count {
        let dir = random_unit(rng, p.len());
        let probe = axpy(p, radius, &dir);
        if let Some(q) = projection_of(set, &probe) {
            let d = dist(&q, p);
            if d >= radius * 0.25 && d <= radius * 3.0 {
                out.push(q);
            }
        }
    }
    out
}

/// Numeric normal-cone membership test at `p` for direction `v`.
pub fn normal_membership_numeric(
    set: &SetExpr,
    p: &[f64],
    v: &[f64],
    flavor: Flavor,
    cfg: &ToleranceConfig,
) -> Result<MembershipStatus, ConeError> {
    if !set.contains_tau(p, cfg.tau_geom) {
        return Err(ConeError::OutsideSet);
    }
    let vhat = unit(v).ok_or(ConeError::UnsupportedStructure("zero test vector".into()))?;
    match flavor {
        Flavor::Frechet | Flavor::Convex => frechet_oracle(set, p, &vhat, norm(v), cfg),
        Flavor::Clarke => clarke_oracle(set, p, &vhat, norm(v), cfg),
    }
}

fn frechet_oracle(
    set: &SetExpr,
    p: &[f64],
    vhat: &[f64],
    vnorm: f64,
    cfg: &ToleranceConfig,
) -> Result<MembershipStatus, ConeError> {
    let r0 = 1.0;
    let levels = 21;
    let samples = 256;
    let mut per_level: Vec<Option<f64>> = Vec::with_capacity(levels);
    let mut rng = stream(cfg, 0x5eed_0001);
    for k in 0..levels {
        let r = r0 * 0.5_f64.powi(k as i32);
        let pts = set_points_at_radius(set, p, r, samples, &mut rng);
        if pts.is_empty() {
            per_level.push(None);
            continue;
        }
        let q = pts
            .iter()
            .map(|x| {
                let dxp = sub(x, p);
                dot(vhat, &dxp) / norm(&dxp)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        per_level.push(Some(q));
    }
    // The limsup estimate is the max over the 5 smallest radii that
    // produced samples.
    let finest: Vec<f64> = per_level
        .iter()
        .rev()
        .filter_map(|q| *q)
        .take(5)
        .collect();
    if finest.is_empty() {
        return Err(ConeError::DegenerateScale);
    }
    let limsup = finest.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Membership threshold at the oracle's own resolution: the quotient at
    // radius r carries O(r) curvature error, far below this band.
    let band = 1e-3;
    let status = if limsup <= band {
        ConeStatus::Inside
    } else {
        ConeStatus::Outside
    };
    Ok(MembershipStatus {
        status,
        distance: if status == ConeStatus::Inside {
            0.0
        } else {
            limsup * vnorm
        },
        limsup,
    })
}

fn clarke_oracle(
    set: &SetExpr,
    p: &[f64],
    vhat: &[f64],
    vnorm: f64,
    cfg: &ToleranceConfig,
) -> Result<MembershipStatus, ConeError> {
    let dim = p.len();
    let mut rng = stream(cfg, 0x5eed_0002);
    // Base points approaching p.
    let mut bases: Vec<Vec<f64>> = vec![p.to_vec()];
    for k in 1..=6 {
        let r = 0.5_f64.powi(k) * 0.25;
        bases.extend(set_points_at_radius(set, p, r, 24, &mut rng));
    }
    if bases.len() < 2 {
        return Err(ConeError::DegenerateScale);
    }
    // Candidate tangent directions.
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    if dim == 2 {
        let n = 96;
        for k in 0..n {
            let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            dirs.push(vec![a.cos(), a.sin()]);
        }
    } else {
        for _ in 0..192 {
            dirs.push(random_unit(&mut rng, dim));
        }
    }
    let t_scales = [1e-2, 1e-3, 1e-4];
    let mut worst = f64::NEG_INFINITY;
    for z in &dirs {
        // z approximately Clarke-tangent if from every sampled base point
        // and step the set stays reachable at o(t); the allowance has a
        // linear band far below the membership band plus a curvature term.
        let tangent = bases.iter().all(|x| {
            t_scales.iter().all(|&t| {
                let probe = axpy(x, t, z);
                match projection_of(set, &probe) {
                    Some(q) => dist(&q, &probe) <= 4e-3 * t + 2.0 * t * t,
                    None => false,
                }
            })
        });
        if tangent {
            worst = worst.max(dot(vhat, z));
        }
    }
    if worst == f64::NEG_INFINITY {
        // No tangent direction accepted: cannot refute.
        return Ok(MembershipStatus {
            status: ConeStatus::Inconclusive,
            distance: 0.0,
            limsup: 0.0,
        });
    }
    let band = 2e-2;
    let status = if worst <= band {
        ConeStatus::Inside
    } else {
        ConeStatus::Outside
    };
    Ok(MembershipStatus {
        status,
        distance: if status == ConeStatus::Inside {
            0.0
        } else {
            worst * vnorm
        },
        limsup: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PiecewiseFn, Side};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn halfline_frechet_inside_outside() {
        let s = SetExpr::halfline_le(0.0);
        let r = normal_membership_numeric(&s, &[0.0], &[1.0], Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(r.status, ConeStatus::Inside);
        let r = normal_membership_numeric(&s, &[0.0], &[-1.0], Flavor::Frechet, &cfg()).unwrap();
        assert_eq!(r.status, ConeStatus::Outside);
        assert!((r.distance - 1.0).abs() < 1e-2, "distance {}", r.distance);
    }

    #[test]
    fn f4_kink_rejects_diagonal() {
        let f = PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        let g4 = SetExpr::EpiRegion { f, side: Side::Above };
        let r = normal_membership_numeric(&g4, &[0.0, 0.0], &[1.0, 1.0], Flavor::Frechet, &cfg())
            .unwrap();
        assert_eq!(r.status, ConeStatus::Outside);
    }

    #[test]
    fn isolated_point_degenerates() {
        let s = SetExpr::Singleton { p: vec![0.0] };
        assert!(matches!(
            normal_membership_numeric(&s, &[0.0], &[1.0], Flavor::Frechet, &cfg()),
            Err(ConeError::DegenerateScale)
        ));
    }

    #[test]
    fn clarke_oracle_agrees_on_halfplane() {
        let s = SetExpr::Halfspace { a: vec![0.0, 1.0], b: 0.0 };
        let r = normal_membership_numeric(&s, &[0.0, 0.0], &[0.0, 1.0], Flavor::Clarke, &cfg())
            .unwrap();
        assert_eq!(r.status, ConeStatus::Inside);
        let r = normal_membership_numeric(&s, &[0.0, 0.0], &[0.0, -1.0], Flavor::Clarke, &cfg())
            .unwrap();
        assert_eq!(r.status, ConeStatus::Outside);
    }
}
