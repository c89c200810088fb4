//! Learning-rate schedules.
//!
//! The "optimal" and halving schedules are stated by the theory in terms of
//! the expected squared distance to the minimizer, a quantity no single run
//! observes. The runner feeds them the across-replica ensemble estimate once
//! per step; a schedule that needs the estimate refuses to run without one.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which ensemble statistic a schedule consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleStat {
    None,
    /// Mean of exact squared distances `E‖Wₙ - w*‖²`.
    MeanDist2,
    /// `max_i E⟨Wₙ - w*, vᵢ⟩²`, the squared V-infinity distance.
    VInfinityDist2,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Schedule {
    Constant { alpha: f64 },
    /// `αₙ = a / (n + b)`
    Harmonic { a: f64, b: f64 },
    /// Quadratic-case optimal schedule in the V-infinity norm; `sigma2` is the
    /// scale-invariant noise level with `E‖ξ‖²_{V,∞} <= σ² λ₁ λ_d`.
    OptimalQuadratic { sigma2: f64, lambda1: f64, lambda_d: f64 },
    /// Strongly convex optimal schedule; `sigma2` is scale-invariant with
    /// `E‖ξ‖² <= σ² L μ`.
    OptimalStronglyConvex { sigma2: f64, lipschitz: f64, mu: f64 },
    /// `αₙ = 2^(-rₙ)/(L+μ)` with `rₙ = max{k : dist² <= 2^(1-k) σ²}`.
    PiecewiseHalving { sigma2: f64, lipschitz: f64, mu: f64 },
    /// Constant rate used by the averaging runner (precomputed `α*`).
    AveragingConstant { alpha: f64 },
}

impl Schedule {
    pub fn needs_ensemble(&self) -> EnsembleStat {
        match self {
            Schedule::Constant { .. } | Schedule::Harmonic { .. } | Schedule::AveragingConstant { .. } => {
                EnsembleStat::None
            }
            Schedule::OptimalQuadratic { .. } => EnsembleStat::VInfinityDist2,
            Schedule::OptimalStronglyConvex { .. } | Schedule::PiecewiseHalving { .. } => {
                EnsembleStat::MeanDist2
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Schedule::Constant { .. } => "constant",
            Schedule::Harmonic { .. } => "harmonic",
            Schedule::OptimalQuadratic { .. } => "optimal-quadratic",
            Schedule::OptimalStronglyConvex { .. } => "optimal-strongly-convex",
            Schedule::PiecewiseHalving { .. } => "piecewise-halving",
            Schedule::AveragingConstant { .. } => "averaging-constant",
        }
    }

    /// Literal halving level `rₙ` for a given squared distance.
    pub fn halving_level(sigma2: f64, dist2: f64) -> u32 {
        if dist2 <= 0.0 {
            return 52; // distances at rounding level: bottom out the rate
        }
        let k = 1.0 - (dist2 / sigma2).log2();
        if k < 0.0 {
            0
        } else {
            (k.floor() as u32).min(52)
        }
    }

    /// Learning rate at step `n`. `ensemble_dist2` carries the statistic named
    /// by [`Schedule::needs_ensemble`] and must be present exactly when one is
    /// needed.
    pub fn lr(&self, n: usize, ensemble_dist2: Option<f64>) -> Result<f64> {
        if self.needs_ensemble() != EnsembleStat::None && ensemble_dist2.is_none() {
            return Err(Error::MissingEnsemble(self.name()));
        }
        let alpha = match self {
            Schedule::Constant { alpha } | Schedule::AveragingConstant { alpha } => *alpha,
            Schedule::Harmonic { a, b } => a / (n as f64 + b),
            Schedule::OptimalQuadratic { sigma2, lambda1, lambda_d } => {
                let dist2 = ensemble_dist2.unwrap();
                let kappa = lambda_d / lambda1;
                let ratio = if dist2 > 0.0 { sigma2 / dist2 } else { f64::INFINITY };
                if ratio <= (kappa - 1.0) / (2.0 * kappa) {
                    2.0 / (lambda1 + lambda_d)
                } else {
                    1.0 / (lambda_d * (1.0 / kappa + ratio))
                }
            }
            Schedule::OptimalStronglyConvex { sigma2, lipschitz, mu } => {
                let dist2 = ensemble_dist2.unwrap();
                (dist2 / (sigma2 * (lipschitz + mu))).min(2.0 / (lipschitz + mu))
            }
            Schedule::PiecewiseHalving { sigma2, lipschitz, mu } => {
                let r = Schedule::halving_level(*sigma2, ensemble_dist2.unwrap());
                2f64.powi(-(r as i32)) / (lipschitz + mu)
            }
        };
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::invalid(format!("schedule '{}' produced rate {alpha} at n={n}", self.name())));
        }
        Ok(alpha)
    }
}

/// Free-function form of [`Schedule::lr`].
pub fn schedule_lr(s: &Schedule, n: usize, ensemble_dist2: Option<f64>) -> Result<f64> {
    s.lr(n, ensemble_dist2)
}
