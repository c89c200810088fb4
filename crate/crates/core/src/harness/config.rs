//! Experiment configuration: JSON in, runs out.
//!
//! One JSON document describes one experiment. Unknown keys are rejected so a
//! typo never silently changes a run. The config hash is computed over the
//! canonical (key-sorted) JSON form, so reordering keys does not change it.

use crate::error::{Error, Result};
use crate::optimizers::{
    cg_run, run_adaptive, run_gd, run_heavy_ball, run_lbfgs, run_nesterov, run_nesterov_dynamic,
    run_nesterov_optimal, sgd_run, AdaptiveHyper, AdaptiveVariant, EnsembleOptions, RunOptions,
    Schedule, Trace, DEFAULT_GRAD_TOL,
};
use crate::oracles::{Oracle, Stream};
use crate::problems::{ChainProblem, Problem, SpectralQuadratic};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProblemSpec {
    Quadratic {
        eigenvalues: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        minimizer: Option<Vec<f64>>,
        #[serde(default)]
        offset: f64,
        /// Seed for a reproducible random rotation; omit for an axis-aligned
        /// quadratic.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rotation_seed: Option<u64>,
    },
    Chain {
        dim: usize,
        lipschitz: f64,
        #[serde(default)]
        strong_convexity: f64,
    },
}

impl ProblemSpec {
    pub fn build(&self) -> Result<Problem> {
        match self {
            ProblemSpec::Quadratic { eigenvalues, minimizer, offset, rotation_seed } => {
                let center = minimizer.clone().unwrap_or_else(|| vec![0.0; eigenvalues.len()]);
                let q = match rotation_seed {
                    Some(seed) => SpectralQuadratic::seeded_rotation(eigenvalues.clone(), center, *offset, *seed)?,
                    None => SpectralQuadratic::diagonal(eigenvalues.clone(), center, *offset)?,
                };
                Ok(Problem::Quadratic(q))
            }
            ProblemSpec::Chain { dim, lipschitz, strong_convexity } => {
                Ok(Problem::Chain(ChainProblem::new(*dim, *lipschitz, *strong_convexity)?))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OptimizerSpec {
    Gd { alpha: f64 },
    HeavyBall { h: f64, beta: f64 },
    Nesterov { h: f64, beta: f64 },
    NesterovDynamic { kappa0_inv: f64, kappa_inv: f64 },
    NesterovOptimal { kappa_inv: f64 },
    Sgd { schedule: Schedule },
    Cg {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tol: Option<f64>,
    },
    Lbfgs { memory: usize },
    Lm { regularization: f64, inner_tol: f64, inner_max: usize },
    Adaptive {
        variant: AdaptiveVariant,
        #[serde(default)]
        hyper: AdaptiveHyper,
    },
}

impl OptimizerSpec {
    fn is_stochastic(&self) -> bool {
        matches!(self, OptimizerSpec::Gd { .. } | OptimizerSpec::Sgd { .. } | OptimizerSpec::Adaptive { .. })
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub grad_norm: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { grad_norm: DEFAULT_GRAD_TOL }
    }
}

fn default_oracle() -> Oracle {
    Oracle::Deterministic
}

fn default_replicas() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    #[serde(default = "default_oracle")]
    pub oracle: Oracle,
    pub optimizer: OptimizerSpec,
    pub iterations: usize,
    #[serde(default = "default_replicas")]
    pub replicas: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Starting point; defaults to the minimizer shifted by one in every
    /// coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn start_point(&self, p: &Problem) -> Result<Vec<f64>> {
        match &self.w0 {
            Some(w) => {
                if w.len() != p.dim() {
                    return Err(Error::Config(format!(
                        "w0 has dimension {}, problem has {}",
                        w.len(),
                        p.dim()
                    )));
                }
                Ok(w.clone())
            }
            None => Ok(p.minimizer().iter().map(|m| m + 1.0).collect()),
        }
    }

    /// Execute the experiment; one trace per replica.
    pub fn run(&self) -> Result<Vec<Trace>> {
        let p = self.problem.build()?;
        let w0 = self.start_point(&p)?;
        let opts = RunOptions { iters: self.iterations, grad_tol: self.tolerances.grad_norm };
        let deterministic_oracle = matches!(self.oracle, Oracle::Deterministic);

        if !self.optimizer.is_stochastic() && !deterministic_oracle {
            return Err(Error::Config(format!(
                "optimizer {:?} needs the deterministic oracle",
                self.optimizer
            )));
        }
        if self.replicas > 1 && (!self.optimizer.is_stochastic() || deterministic_oracle) {
            return Err(Error::Config("replicas > 1 need a stochastic oracle".into()));
        }

        match &self.optimizer {
            OptimizerSpec::Gd { alpha } => {
                if deterministic_oracle {
                    Ok(vec![run_gd(&p, &w0, *alpha, opts)?])
                } else {
                    sgd_run(&p, &self.oracle, &Schedule::Constant { alpha: *alpha }, &w0, EnsembleOptions {
                        iters: self.iterations,
                        replicas: self.replicas,
                        seed: self.seed,
                        grad_tol: self.tolerances.grad_norm,
                    })
                }
            }
            OptimizerSpec::HeavyBall { h, beta } => Ok(vec![run_heavy_ball(&p, &w0, *h, *beta, opts)?]),
            OptimizerSpec::Nesterov { h, beta } => Ok(vec![run_nesterov(&p, &w0, *h, *beta, opts)?]),
            OptimizerSpec::NesterovDynamic { kappa0_inv, kappa_inv } => {
                Ok(vec![run_nesterov_dynamic(&p, &w0, *kappa0_inv, *kappa_inv, opts)?])
            }
            OptimizerSpec::NesterovOptimal { kappa_inv } => {
                Ok(vec![run_nesterov_optimal(&p, &w0, *kappa_inv, opts)?])
            }
            OptimizerSpec::Sgd { schedule } => sgd_run(&p, &self.oracle, schedule, &w0, EnsembleOptions {
                iters: self.iterations,
                replicas: self.replicas,
                seed: self.seed,
                grad_tol: self.tolerances.grad_norm,
            }),
            OptimizerSpec::Cg { tol } => {
                let run = cg_run(&p, &w0, self.iterations, tol.unwrap_or(self.tolerances.grad_norm))?;
                Ok(vec![run.trace])
            }
            OptimizerSpec::Lbfgs { memory } => Ok(vec![run_lbfgs(&p, &w0, *memory, opts)?]),
            OptimizerSpec::Lm { regularization, inner_tol, inner_max } => {
                let mut trace = Trace::new();
                let mut w = w0.clone();
                trace.observe(&p, &w, f64::NAN, f64::NAN, f64::NAN);
                for _ in 0..self.iterations {
                    let g = p.gradient(&w)?;
                    if crate::linalg::norm(&g) <= self.tolerances.grad_norm {
                        break;
                    }
                    let step = crate::optimizers::lm_step(&g, |v| p.hvp(v), *regularization, *inner_tol, *inner_max)?;
                    w = crate::linalg::add(&w, &step);
                    trace.observe(&p, &w, f64::NAN, f64::NAN, f64::NAN);
                }
                Ok(vec![trace])
            }
            OptimizerSpec::Adaptive { variant, hyper } => {
                let mut stream = Stream::split(self.seed, 0);
                Ok(vec![run_adaptive(
                    &p,
                    &self.oracle,
                    *variant,
                    hyper,
                    &w0,
                    self.iterations,
                    self.tolerances.grad_norm,
                    &mut stream,
                )?])
            }
        }
    }
}

/// Stable hash of a JSON document: serde_json maps are key-sorted, so the
/// compact re-serialization is canonical under key reordering.
pub fn config_hash(raw: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(raw).expect("value serializes");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    hex::encode(hasher.finalize())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub tool_version: String,
    pub outputs: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUAD_NESTEROV: &str = r#"{
        "problem": {"kind": "quadratic", "eigenvalues": [1.0, 50.0, 100.0], "rotation_seed": 7},
        "optimizer": {"kind": "nesterov-optimal", "kappa_inv": 0.01},
        "iterations": 100,
        "seed": 42
    }"#;

    #[test]
    fn parses_and_runs_a_config() {
        let cfg = ExperimentConfig::from_json(QUAD_NESTEROV).unwrap();
        let traces = cfg.run().unwrap();
        assert_eq!(traces.len(), 1);
        assert_eq!(traces[0].len(), 101);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = QUAD_NESTEROV.replace("\"seed\": 42", "\"seed\": 42, \"bogus\": 1");
        assert!(ExperimentConfig::from_json(&bad).is_err());
    }

    #[test]
    fn hash_is_stable_under_key_reordering() {
        let a: serde_json::Value = serde_json::from_str(r#"{"b": 1, "a": {"y": 2, "x": 3}}"#).unwrap();
        let b: serde_json::Value = serde_json::from_str(r#"{"a": {"x": 3, "y": 2}, "b": 1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        let c: serde_json::Value = serde_json::from_str(r#"{"a": {"x": 3, "y": 2}, "b": 2}"#).unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
    }

    #[test]
    fn replicas_need_noise() {
        let bad = QUAD_NESTEROV.replace("\"seed\": 42", "\"seed\": 42, \"replicas\": 4");
        let cfg = ExperimentConfig::from_json(&bad).unwrap();
        assert!(matches!(cfg.run(), Err(Error::Config(_))));
    }

    #[test]
    fn sgd_config_round_trip() {
        let text = r#"{
            "problem": {"kind": "quadratic", "eigenvalues": [1.0, 4.0]},
            "oracle": {"kind": "noisy", "noise": {"kind": "isotropic-gaussian", "sigma": 0.5, "convention": "raw"}},
            "optimizer": {"kind": "sgd", "schedule": {"kind": "harmonic", "a": 1.0, "b": 4.0}},
            "iterations": 50,
            "replicas": 3,
            "seed": 9
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let traces = cfg.run().unwrap();
        assert_eq!(traces.len(), 3);
        for t in traces {
            assert_eq!(t.len(), 51);
        }
    }
}
