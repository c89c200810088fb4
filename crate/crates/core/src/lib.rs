//! A laboratory for first-order optimization methods.
//!
//! The crate bundles three things that are usually scattered across papers,
//! solvers and ad-hoc scripts:
//!
//! * [`problems`] — analytically known test objectives (rotated quadratics and
//!   the worst-case chain construction) with exact values, gradients,
//!   Hessian-vector products, minimizers and smoothness constants.
//! * [`optimizers`] / [`oracles`] / [`linesearch`] / [`spectral`] — the
//!   iteration rules themselves: deterministic gradient descent, heavy-ball
//!   and Nesterov momentum, SGD under several learning-rate schedules,
//!   conjugate gradients, secant methods, Levenberg-Marquardt and the adaptive
//!   family, plus closed-form eigenvalue analysis of the momentum iteration.
//! * [`harness`] — an experiment runner that measures empirical convergence
//!   and audits it against the closed-form rates, bounds and lower bounds the
//!   theory predicts. Every audit reports violation counts instead of eyeballed
//!   plots.
//!
//! Everything is deterministic given a seed: oracles draw from explicitly
//! split counter-based streams, replicas are ordered, and the CLI writes
//! reproducible CSV traces.

pub mod error;
pub mod harness;
pub mod linalg;
pub mod linesearch;
pub mod optimizers;
pub mod oracles;
pub mod problems;
pub mod spectral;

pub use error::{Error, Result};
