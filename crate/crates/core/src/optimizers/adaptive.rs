//! The adaptive learning-rate family: AdaGrad, RMSProp, AdaDelta, Adam,
//! AdaMax, AMSGrad and NAdam.
//!
//! Every update is strictly coordinate-wise, so permuting the coordinates of
//! weights, gradient and state permutes the output identically.

use crate::error::{Error, Result};
use crate::linalg;
use crate::optimizers::trace::Trace;
use crate::oracles::{Oracle, Stream};
use crate::problems::Problem;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdaptiveVariant {
    AdaGrad,
    RmsProp,
    AdaDelta,
    Adam,
    AdaMax,
    AmsGrad,
    NAdam,
}

/// Hyperparameters; `gamma` is the RMSProp/AdaDelta decay, `beta1`/`beta2`
/// the Adam-family moment decays, `epsilon` the stability term.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptiveHyper {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub gamma: f64,
}

impl Default for AdaptiveHyper {
    fn default() -> Self {
        AdaptiveHyper { alpha: 0.001, beta1: 0.9, beta2: 0.999, epsilon: 1e-8, gamma: 0.9 }
    }
}

/// Per-run state; unused fields stay at zero for variants that ignore them.
#[derive(Debug, Clone)]
pub struct AdaptiveState {
    pub w: Vec<f64>,
    /// First-moment (momentum) estimate.
    pub moment1: Vec<f64>,
    /// Second-moment estimate (or the infinity-norm accumulator for AdaMax).
    pub moment2: Vec<f64>,
    /// AdaGrad's monotone sum of squared gradients.
    pub accumulated_sq: Vec<f64>,
    /// AMSGrad's running maximum of second-moment estimates.
    pub running_max: Vec<f64>,
    /// AdaDelta's decaying average of squared parameter updates.
    pub delta_rms: Vec<f64>,
    /// Completed steps.
    pub n: usize,
}

impl AdaptiveState {
    pub fn new(w0: &[f64]) -> Self {
        let d = w0.len();
        AdaptiveState {
            w: w0.to_vec(),
            moment1: vec![0.0; d],
            moment2: vec![0.0; d],
            accumulated_sq: vec![0.0; d],
            running_max: vec![0.0; d],
            delta_rms: vec![0.0; d],
            n: 0,
        }
    }
}

/// Apply one coordinate-wise update of the chosen variant to `state`.
pub fn adaptive_step(
    variant: AdaptiveVariant,
    state: &mut AdaptiveState,
    g: &[f64],
    hyper: &AdaptiveHyper,
) -> Result<()> {
    if !(hyper.epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be > 0"));
    }
    if g.len() != state.w.len() {
        return Err(Error::DimensionMismatch { expected: state.w.len(), got: g.len() });
    }
    if !linalg::all_finite(g) {
        return Err(Error::NonFinite("adaptive gradient"));
    }
    let AdaptiveHyper { alpha, beta1, beta2, epsilon, gamma } = *hyper;
    let k = state.n as i32 + 1;

    match variant {
        AdaptiveVariant::AdaGrad => {
            for i in 0..g.len() {
                state.accumulated_sq[i] += g[i] * g[i];
                state.w[i] -= alpha * g[i] / (state.accumulated_sq[i] + epsilon).sqrt();
            }
        }
        AdaptiveVariant::RmsProp => {
            for i in 0..g.len() {
                state.moment2[i] = gamma * state.moment2[i] + (1.0 - gamma) * g[i] * g[i];
                state.w[i] -= alpha * g[i] / (state.moment2[i] + epsilon).sqrt();
            }
        }
        AdaptiveVariant::AdaDelta => {
            for i in 0..g.len() {
                state.moment2[i] = gamma * state.moment2[i] + (1.0 - gamma) * g[i] * g[i];
                let step = -alpha * (state.delta_rms[i] + epsilon).sqrt()
                    / (state.moment2[i] + epsilon).sqrt()
                    * g[i];
                state.delta_rms[i] = gamma * state.delta_rms[i] + (1.0 - gamma) * step * step;
                state.w[i] += step;
            }
        }
        AdaptiveVariant::Adam => {
            let c1 = 1.0 - beta1.powi(k);
            let c2 = 1.0 - beta2.powi(k);
            for i in 0..g.len() {
                state.moment1[i] = beta1 * state.moment1[i] + (1.0 - beta1) * g[i];
                state.moment2[i] = beta2 * state.moment2[i] + (1.0 - beta2) * g[i] * g[i];
                let m_hat = state.moment1[i] / c1;
                let v_hat = state.moment2[i] / c2;
                state.w[i] -= alpha * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        AdaptiveVariant::AdaMax => {
            let c1 = 1.0 - beta1.powi(k);
            for i in 0..g.len() {
                state.moment1[i] = beta1 * state.moment1[i] + (1.0 - beta1) * g[i];
                state.moment2[i] = (beta2 * state.moment2[i]).max(g[i].abs());
                state.w[i] -= alpha / c1 * state.moment1[i] / (state.moment2[i] + epsilon);
            }
        }
        AdaptiveVariant::AmsGrad => {
            let c1 = 1.0 - beta1.powi(k);
            let c2 = 1.0 - beta2.powi(k);
            for i in 0..g.len() {
                state.moment1[i] = beta1 * state.moment1[i] + (1.0 - beta1) * g[i];
                state.moment2[i] = beta2 * state.moment2[i] + (1.0 - beta2) * g[i] * g[i];
                state.running_max[i] = state.running_max[i].max(state.moment2[i]);
                let m_hat = state.moment1[i] / c1;
                let v_hat = state.running_max[i] / c2;
                state.w[i] -= alpha * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        AdaptiveVariant::NAdam => {
            let c1_next = 1.0 - beta1.powi(k + 1);
            let c1 = 1.0 - beta1.powi(k);
            let c2 = 1.0 - beta2.powi(k);
            for i in 0..g.len() {
                state.moment1[i] = beta1 * state.moment1[i] + (1.0 - beta1) * g[i];
                state.moment2[i] = beta2 * state.moment2[i] + (1.0 - beta2) * g[i] * g[i];
                // Nesterov look-ahead on the first moment.
                let m_hat = beta1 * state.moment1[i] / c1_next + (1.0 - beta1) * g[i] / c1;
                let v_hat = state.moment2[i] / c2;
                state.w[i] -= alpha * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
    }
    state.n += 1;
    Ok(())
}

/// Drive an adaptive variant with any oracle.
pub fn run_adaptive(
    p: &Problem,
    oracle: &Oracle,
    variant: AdaptiveVariant,
    hyper: &AdaptiveHyper,
    w0: &[f64],
    iters: usize,
    grad_tol: f64,
    stream: &mut Stream,
) -> Result<Trace> {
    let mut state = AdaptiveState::new(w0);
    let mut trace = Trace::new();
    trace.observe(p, &state.w, f64::NAN, f64::NAN, f64::NAN);
    for _ in 0..iters {
        let exact = p.gradient(&state.w)?;
        if linalg::norm(&exact) <= grad_tol {
            break;
        }
        let sample = oracle.sample(p, &state.w, stream)?;
        adaptive_step(variant, &mut state, &sample.gradient, hyper)?;
        trace.observe(p, &state.w, hyper.alpha, f64::NAN, f64::NAN);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hyper() -> AdaptiveHyper {
        AdaptiveHyper { alpha: 0.1, ..AdaptiveHyper::default() }
    }

    #[test]
    fn adam_first_step_cancels_bias_correction() {
        let g = vec![0.3, -2.0, 0.0];
        let mut state = AdaptiveState::new(&[0.0, 0.0, 0.0]);
        let h = hyper();
        adaptive_step(AdaptiveVariant::Adam, &mut state, &g, &h).unwrap();
        for i in 0..3 {
            // m̂₁ = g exactly, so the update is -α g/(|g| + ε).
            let expected = -h.alpha * g[i] / (g[i].abs() + h.epsilon);
            assert_eq!(state.w[i], expected);
        }
    }

    #[test]
    fn adagrad_accumulator_is_monotone() {
        let mut state = AdaptiveState::new(&[1.0, -1.0]);
        let h = hyper();
        let mut prev = state.accumulated_sq.clone();
        let mut x = 0.0f64;
        for _ in 0..50 {
            x += 1.0;
            let g = vec![x.sin(), (x * 0.7).cos()];
            adaptive_step(AdaptiveVariant::AdaGrad, &mut state, &g, &h).unwrap();
            for (now, before) in state.accumulated_sq.iter().zip(&prev) {
                assert!(now >= before);
            }
            prev = state.accumulated_sq.clone();
        }
    }

    #[test]
    fn amsgrad_max_dominates_second_moment() {
        let mut ams = AdaptiveState::new(&[0.0; 2]);
        let h = hyper();
        let mut x = 0.0f64;
        for _ in 0..100 {
            x += 1.0;
            let g = vec![x.sin() * 2.0, 1.0 / x];
            adaptive_step(AdaptiveVariant::AmsGrad, &mut ams, &g, &h).unwrap();
            for (running, v) in ams.running_max.iter().zip(&ams.moment2) {
                assert!(running >= v);
            }
        }
    }

    #[test]
    fn epsilon_must_be_positive() {
        let mut state = AdaptiveState::new(&[0.0]);
        let mut h = hyper();
        h.epsilon = 0.0;
        assert!(adaptive_step(AdaptiveVariant::Adam, &mut state, &[1.0], &h).is_err());
    }

    #[test]
    fn step_counter_increments_by_one() {
        let mut state = AdaptiveState::new(&[0.0]);
        let h = hyper();
        for expected in 1..=10 {
            adaptive_step(AdaptiveVariant::RmsProp, &mut state, &[0.5], &h).unwrap();
            assert_eq!(state.n, expected);
        }
    }

    fn run_variant(variant: AdaptiveVariant, grads: &[Vec<f64>], w0: &[f64]) -> AdaptiveState {
        let mut state = AdaptiveState::new(w0);
        let h = hyper();
        for g in grads {
            adaptive_step(variant, &mut state, g, &h).unwrap();
        }
        state
    }

    proptest! {
        #[test]
        fn updates_are_permutation_equivariant(
            raw in proptest::collection::vec(-5.0f64..5.0, 4 * 4),
            w0 in proptest::collection::vec(-3.0f64..3.0, 4),
        ) {
            let grads: Vec<Vec<f64>> = raw.chunks(4).map(|c| c.to_vec()).collect();
            let perm = [2usize, 0, 3, 1];
            let permute = |v: &[f64]| -> Vec<f64> { perm.iter().map(|&i| v[i]).collect() };
            for variant in [
                AdaptiveVariant::AdaGrad,
                AdaptiveVariant::RmsProp,
                AdaptiveVariant::AdaDelta,
                AdaptiveVariant::Adam,
                AdaptiveVariant::AdaMax,
                AdaptiveVariant::AmsGrad,
                AdaptiveVariant::NAdam,
            ] {
                let plain = run_variant(variant, &grads, &w0);
                let permuted_inputs: Vec<Vec<f64>> = grads.iter().map(|g| permute(g)).collect();
                let permuted = run_variant(variant, &permuted_inputs, &permute(&w0));
                prop_assert_eq!(&permute(&plain.w), &permuted.w);
            }
        }
    }
}
