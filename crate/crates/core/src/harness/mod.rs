//! Experiment runner, rate estimation and bound auditing.

pub mod audits;
pub mod config;
pub mod rate;
pub mod suites;

pub use audits::{
    area_convergence_check, averaging_audit, backtracking_audit, c_gamma, c_gamma_audit, cg_audit,
    diminishing_contraction_audit, diminishing_schedule_check, equivalence_audit,
    gamma_bound_check, gd_convex_chain_audit, gd_strong_convexity_audit, hb_optimal_rate_audit,
    lower_bound_audit, lower_bound_audit_strongly_convex, mean_estimation_audit,
    nesterov_bound_audit, nesterov_gamma_fixed_point_audit, power_bound_audit, schur_audit,
    secant_audit, sgd_gd_gap_check, spectral_grid_audit, AuditReport, BoundAudit, SpanMethod,
    MC_ENVELOPE, TRUNCATION_SLACK,
};
pub use config::{config_hash, ExperimentConfig, OptimizerSpec, ProblemSpec, RunManifest, Tolerances};
pub use rate::{estimate_decay_exponent, estimate_rate, estimate_rate_from_series};
pub use suites::{run_suite, SuiteKind};
