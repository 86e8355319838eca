//! Per-scale node fields and their `dt/t` integrals.

use crate::error::{Error, Result};
use crate::model::ExtendedReal;

/// A nonnegative node field for every radius of a ladder (radii decreasing).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleProfile {
    pub radii: Vec<f64>,
    pub levels: Vec<Vec<f64>>,
}

impl ScaleProfile {
    /// Field for the ladder radius equal to `t`.
    pub fn level(&self, t: f64) -> Option<&[f64]> {
        self.radii
            .iter()
            .position(|&r| (r - t).abs() <= 1e-12 * t)
            .map(|i| self.levels[i].as_slice())
    }

    /// Maximum over nodes at every level.
    pub fn spatial_max(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.iter().copied().fold(0.0, f64::max)).collect()
    }

    /// `x ↦ (Σ_{t_j ≤ T} [t_j^{-s} F_j(x)]^q · ln 2)^{1/q}`, the dyadic midpoint rule for
    /// `(∫_0^T [t^{-s} F(x,t)]^q dt/t)^{1/q}`; `q = ∞` takes the maximum over levels.
    pub fn time_integral(&self, s: f64, q: ExtendedReal, t_max: ExtendedReal) -> Result<Vec<f64>> {
        let active: Vec<usize> = (0..self.radii.len())
            .filter(|&j| match t_max {
                ExtendedReal::Infinity => true,
                ExtendedReal::Finite(t) => self.radii[j] <= t * (1.0 + 1e-12),
            })
            .collect();
        if active.is_empty() {
            return Err(Error::param(format!(
                "T = {t_max} is below the finest ladder radius; the time integral is empty"
            )));
        }
        let nodes = self.levels.first().map_or(0, Vec::len);
        let ln2 = std::f64::consts::LN_2;
        let out = (0..nodes)
            .map(|x| match q {
                ExtendedReal::Infinity => active
                    .iter()
                    .map(|&j| self.radii[j].powf(-s) * self.levels[j][x])
                    .fold(0.0, f64::max),
                ExtendedReal::Finite(q) => active
                    .iter()
                    .map(|&j| (self.radii[j].powf(-s) * self.levels[j][x]).powf(q) * ln2)
                    .sum::<f64>()
                    .powf(1.0 / q),
            })
            .collect();
        Ok(out)
    }
}
