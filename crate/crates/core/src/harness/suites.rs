//! Named audit suites the CLI exposes. Each suite bundles the bound audits
//! for one theory area at their reference configurations.

use super::audits::{self, BoundAudit, SpanMethod};
use crate::error::Result;
use crate::optimizers::gamma_recursion;
use crate::oracles::{NoiseSpec, VarianceConvention};
use crate::problems::{Problem, SpectralQuadratic};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    All,
    Gd,
    Sgd,
    Momentum,
    Spectral,
    LowerBounds,
}

impl SuiteKind {
    pub fn parse(name: &str) -> Option<SuiteKind> {
        match name {
            "all" => Some(SuiteKind::All),
            "gd" => Some(SuiteKind::Gd),
            "sgd" => Some(SuiteKind::Sgd),
            "momentum" => Some(SuiteKind::Momentum),
            "spectral" => Some(SuiteKind::Spectral),
            "lower-bounds" => Some(SuiteKind::LowerBounds),
            _ => None,
        }
    }
}

fn kappa4_quadratic() -> Result<Problem> {
    Ok(Problem::Quadratic(SpectralQuadratic::diagonal(vec![1.0, 4.0], vec![0.0, 0.0], 0.0)?))
}

fn gd_suite(seed: u64) -> Result<Vec<BoundAudit>> {
    Ok(vec![
        audits::gd_strong_convexity_audit(100.0, 1000, seed)?,
        audits::gd_convex_chain_audit(51, 4.0, 1000)?,
        audits::diminishing_contraction_audit(0.3, 2.0, 100_000)?,
        audits::backtracking_audit(100, seed)?,
        audits::secant_audit(8, seed)?,
    ])
}

fn sgd_suite(seed: u64) -> Result<Vec<BoundAudit>> {
    let p4 = kappa4_quadratic()?;
    let scaled = NoiseSpec::isotropic(0.5, VarianceConvention::Scaled);
    let mut out = vec![
        audits::mean_estimation_audit(5, 10_000, 1e-12, seed)?,
        audits::area_convergence_check(&p4, &scaled, 1.0 / 5.0, 200, 500, seed)?,
        audits::sgd_gd_gap_check(&p4, &NoiseSpec::isotropic(0.7, VarianceConvention::Raw),
            &crate::optimizers::Schedule::Constant { alpha: 1.0 / 8.0 }, 8, 500, seed)?,
    ];
    // Averaging on the identity-Hessian quadratic with a safely bounded run.
    let avg_problem = Problem::Quadratic(SpectralQuadratic::diagonal(vec![1.0; 3], vec![0.0; 3], 0.0)?);
    out.push(audits::averaging_audit(
        &avg_problem,
        &NoiseSpec::isotropic(1.0, VarianceConvention::Raw),
        &[2.0, 0.0, 0.0],
        1000,
        6.0,
        200,
        seed,
    )?);
    // Harmonic-schedule decay exponents, healthy and deliberately small.
    let diag = Problem::Quadratic(SpectralQuadratic::diagonal(vec![1.0, 2.0], vec![0.0, 0.0], 0.0)?);
    let noise = NoiseSpec::isotropic(0.5, VarianceConvention::Raw);
    out.push(audits::diminishing_schedule_check(&diag, &noise, 1.0, 2.0, 4000, 200, seed)?);
    out.push(audits::diminishing_schedule_check(&diag, &noise, 0.25, 0.5, 4000, 200, seed)?);
    Ok(out)
}

fn momentum_suite(seed: u64) -> Result<Vec<BoundAudit>> {
    let mut out = Vec::new();
    for kappa in [4.0, 9.0, 100.0] {
        out.push(audits::hb_optimal_rate_audit(kappa, (100, 300), 0.02, seed)?);
    }
    out.push(audits::nesterov_bound_audit(100.0, 1000, seed)?);
    out.push(audits::nesterov_gamma_fixed_point_audit(100.0, 1000, seed)?);
    out.push(audits::equivalence_audit(10, 100, 1e-12, seed)?);
    out.push(audits::c_gamma_audit(0.04, 2.0, 100)?);
    out.push(audits::cg_audit(seed)?);

    // Gamma-product bounds: a strongly convex start inside the hypothesis
    // range, and the kappa_inv = 0 case via the shifted-index sequence.
    let kappa_inv = 0.04;
    let kappa0_inv: f64 = 0.5;
    let mut gamma = kappa0_inv.sqrt();
    let mut gammas = Vec::new();
    for _ in 0..1000 {
        gamma = gamma_recursion(gamma, kappa_inv);
        gammas.push(gamma);
    }
    out.push(audits::gamma_bound_check(&gammas, kappa0_inv, kappa_inv)?);

    let mut gamma = 1.0f64; // gamma_1 = 1; the tail starts at kappa0_inv = gamma_1^2 = 1
    let mut tail = Vec::new();
    for _ in 0..10_000 {
        gamma = gamma_recursion(gamma, 0.0);
        tail.push(gamma);
    }
    out.push(audits::gamma_bound_check(&tail, 1.0, 0.0)?);
    Ok(out)
}

fn spectral_suite(seed: u64) -> Result<Vec<BoundAudit>> {
    Ok(vec![
        audits::spectral_grid_audit(101, 2000, 1e-3)?,
        audits::schur_audit(1000, seed)?,
        audits::power_bound_audit(100, seed)?,
    ])
}

fn lower_bounds_suite() -> Result<Vec<BoundAudit>> {
    let mut out = Vec::new();
    for method in SpanMethod::ALL {
        out.push(audits::lower_bound_audit(method, 20, 4.0)?);
    }
    for method in SpanMethod::ALL {
        out.push(audits::lower_bound_audit_strongly_convex(method, 50, 101, 10.0, 4.0)?);
    }
    Ok(out)
}

/// Run a named suite; deterministic given `seed`.
pub fn run_suite(kind: SuiteKind, seed: u64) -> Result<Vec<BoundAudit>> {
    match kind {
        SuiteKind::Gd => gd_suite(seed),
        SuiteKind::Sgd => sgd_suite(seed),
        SuiteKind::Momentum => momentum_suite(seed),
        SuiteKind::Spectral => spectral_suite(seed),
        SuiteKind::LowerBounds => lower_bounds_suite(),
        SuiteKind::All => {
            let mut out = gd_suite(seed)?;
            out.extend(sgd_suite(seed)?);
            out.extend(momentum_suite(seed)?);
            out.extend(spectral_suite(seed)?);
            out.extend(lower_bounds_suite()?);
            Ok(out)
        }
    }
}
