//! Armijo backtracking and its iteration-count bound.

use crate::error::{Error, Result};
use crate::linalg;

/// Outcome of a backtracking search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacktrackResult {
    /// Accepted learning rate.
    pub alpha: f64,
    /// Number of condition evaluations performed.
    pub tests: usize,
    /// Loss value at the accepted point.
    pub f_new: f64,
}

fn check_params(alpha0: f64, delta: f64, g: &[f64]) -> Result<f64> {
    if !(alpha0 > 0.0) || !alpha0.is_finite() {
        return Err(Error::invalid("initial step must be positive"));
    }
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::invalid("shrink factor must lie in (0, 1)"));
    }
    let g2 = linalg::norm2(g);
    if g2 == 0.0 {
        return Err(Error::invalid("backtracking needs a nonzero gradient"));
    }
    Ok(g2)
}

fn sufficient_decrease(f: &mut dyn FnMut(&[f64]) -> f64, w: &[f64], g: &[f64], f_w: f64, g2: f64, alpha: f64) -> (bool, f64) {
    let candidate = linalg::add_scaled(w, -alpha, g);
    let f_new = f(&candidate);
    // Ties count as accepted: the condition in the theory is non-strict.
    (f_new <= f_w - 0.5 * alpha * g2, f_new)
}

/// Backtracking line search: the smallest `k >= 0` such that
/// `f(w - δᵏ α₀ g) <= f(w) - (δᵏ α₀ / 2) ‖g‖²`, returning `α = δᵏ α₀` and the
/// number of condition evaluations (`k + 1`).
pub fn armijo_search(
    mut f: impl FnMut(&[f64]) -> f64,
    w: &[f64],
    g: &[f64],
    alpha0: f64,
    delta: f64,
    max_tests: usize,
) -> Result<BacktrackResult> {
    let g2 = check_params(alpha0, delta, g)?;
    let f_w = f(w);
    let mut alpha = alpha0;
    for k in 0..max_tests {
        let (ok, f_new) = sufficient_decrease(&mut f, w, g, f_w, g2, alpha);
        if ok {
            return Ok(BacktrackResult { alpha, tests: k + 1, f_new });
        }
        alpha *= delta;
    }
    Err(Error::LineSearchExhausted { max_tests })
}

/// Upper bound on the number of shrink steps `armijo_search` needs on an
/// L-smooth objective when started from the guess `L0 = 1/α₀`:
/// one test when the guess is already pessimistic, `⌈log(L/L0)/log(1/δ)⌉`
/// otherwise.
pub fn armijo_test_bound(lipschitz: f64, l0: f64, delta: f64) -> usize {
    if l0 >= lipschitz {
        return 1;
    }
    ((lipschitz / l0).ln() / (1.0 / delta).ln()).ceil() as usize
}

/// Two-way backtracking: start from the previously accepted rate, grow by
/// `1/δ` while the condition keeps holding, otherwise shrink exactly like
/// [`armijo_search`].
pub fn two_way_search(
    mut f: impl FnMut(&[f64]) -> f64,
    w: &[f64],
    g: &[f64],
    alpha_prev: f64,
    delta: f64,
    max_tests: usize,
) -> Result<BacktrackResult> {
    let g2 = check_params(alpha_prev, delta, g)?;
    let f_w = f(w);

    let (ok, f_first) = sufficient_decrease(&mut f, w, g, f_w, g2, alpha_prev);
    if !ok {
        // Shrink phase, same loop as plain backtracking.
        let mut alpha = alpha_prev * delta;
        for k in 1..max_tests {
            let (ok, f_new) = sufficient_decrease(&mut f, w, g, f_w, g2, alpha);
            if ok {
                return Ok(BacktrackResult { alpha, tests: k + 1, f_new });
            }
            alpha *= delta;
        }
        return Err(Error::LineSearchExhausted { max_tests });
    }

    // Growth phase: keep the last accepted step once a larger one fails.
    let mut accepted = BacktrackResult { alpha: alpha_prev, tests: 1, f_new: f_first };
    let mut alpha = alpha_prev / delta;
    for k in 1..max_tests {
        let (ok, f_new) = sufficient_decrease(&mut f, w, g, f_w, g2, alpha);
        if !ok {
            accepted.tests = k + 1;
            return Ok(accepted);
        }
        accepted = BacktrackResult { alpha, tests: k + 1, f_new };
        alpha /= delta;
    }
    Err(Error::LineSearchExhausted { max_tests })
}
