//! Resolution and tolerance configuration shared by every module.

use serde::{Deserialize, Serialize};

/// Tolerances and grid schedule for all numeric predicates.
///
/// `tau_num` guards exact-path comparisons (sums of duals, normalizations),
/// `tau_geom` guards geometric predicates (membership, cone distances), and
/// `margin` is the emptiness-certification threshold. Ball-local emptiness
/// checks rescale `margin` and `tau_geom` by the ball radius, so verdicts at
/// radius `rho` are honest relative to `rho`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ToleranceConfig {
    pub tau_num: f64,
    pub tau_geom: f64,
    pub margin: f64,
    /// Strictly refining grid schedule: points per axis for successive
    /// refinement passes.
    pub grid: Vec<usize>,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tau_num: 1e-9,
            tau_geom: 1e-6,
            margin: 1e-4,
            grid: vec![16, 32, 64],
            seed: 0,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.tau_num > 0.0 && self.tau_num <= self.tau_geom && self.tau_geom <= self.margin) {
            return Err(format!(
                "tolerances must satisfy 0 < tau_num <= tau_geom <= margin, got {} / {} / {}",
                self.tau_num, self.tau_geom, self.margin
            ));
        }
        if self.grid.is_empty() || self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err("grid schedule must be nonempty and strictly refining".into());
        }
        Ok(())
    }

    /// Finest grid resolution (points per axis).
    pub fn finest_grid(&self) -> usize {
        *self.grid.last().unwrap_or(&64)
    }

    /// Emptiness margin local to a ball of radius `rho`.
    pub fn margin_at(&self, rho: f64) -> f64 {
        self.margin * rho.min(1.0).max(1e-9)
    }

    /// Geometric tolerance local to a ball of radius `rho`.
    pub fn tau_geom_at(&self, rho: f64) -> f64 {
        self.tau_geom * rho.min(1.0).max(1e-9)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}
