//! Iteration rules: deterministic gradient methods, momentum in all its
//! formulations, SGD under the paper-grade schedules, conjugate gradients,
//! secant methods, Levenberg-Marquardt and the adaptive family.

pub mod adaptive;
pub mod cg;
pub mod lm;
pub mod schedules;
pub mod secant;
pub mod sgd;
pub mod steps;
pub mod trace;

pub use adaptive::{adaptive_step, run_adaptive, AdaptiveHyper, AdaptiveState, AdaptiveVariant};
pub use cg::{cg_run, CgRun};
pub use lm::lm_step;
pub use schedules::{schedule_lr, EnsembleStat, Schedule};
pub use secant::{
    bfgs_inverse_update, dfp_inverse_update, dfp_update, lbfgs_apply, run_lbfgs, secant_update,
    CurvatureMemory, SecantKind,
};
pub use sgd::{averaged_sgd_run, sgd_run, AveragedSgd, EnsembleOptions};
pub use steps::{
    gamma_recursion, gd_step, heavy_ball_step, nesterov_dynamic_step, nesterov_general_schema_step,
    nesterov_step, run_gd, run_heavy_ball, run_heavy_ball_two_line, run_nesterov,
    run_nesterov_dynamic, run_nesterov_general, run_nesterov_optimal, DynamicNesterovState,
    GeneralSchemaState, RunOptions, DEFAULT_GRAD_TOL,
};
pub use trace::{Trace, TraceRecord};
