//! Empirical convergence-rate estimation.

use crate::error::{Error, Result};
use crate::linalg::linear_fit;
use crate::optimizers::Trace;

/// Fit `dist ~ c rⁿ` by least squares on `log(dist)` over the index window
/// `[n0, n1]` (inclusive) and return the per-step rate `r = exp(slope)`.
pub fn estimate_rate_from_series(dists: &[f64], window: (usize, usize)) -> Result<f64> {
    let (n0, n1) = window;
    if n0 >= n1 || n1 >= dists.len() {
        return Err(Error::invalid(format!(
            "fit window ({n0}, {n1}) does not fit a series of length {}",
            dists.len()
        )));
    }
    let mut xs = Vec::with_capacity(n1 - n0 + 1);
    let mut ys = Vec::with_capacity(n1 - n0 + 1);
    for (n, &d) in dists.iter().enumerate().take(n1 + 1).skip(n0) {
        if !(d > 0.0) {
            return Err(Error::invalid(format!("nonpositive distance {d} at n={n} in fit window")));
        }
        xs.push(n as f64);
        ys.push(d.ln());
    }
    let (slope, _) = linear_fit(&xs, &ys);
    Ok(slope.exp())
}

/// [`estimate_rate_from_series`] applied to a trace's distance column.
pub fn estimate_rate(trace: &Trace, window: (usize, usize)) -> Result<f64> {
    estimate_rate_from_series(&trace.dist_series(), window)
}

/// Least-squares decay exponent `p` of `series ~ c n^(-p)` over `[n0, n1]`
/// (log-log fit; returns the positive exponent for a decaying series).
pub fn estimate_decay_exponent(series: &[f64], window: (usize, usize)) -> Result<f64> {
    let (n0, n1) = window;
    if n0 < 1 || n0 >= n1 || n1 >= series.len() {
        return Err(Error::invalid("log-log window needs 1 <= n0 < n1 < len"));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (n, &v) in series.iter().enumerate().take(n1 + 1).skip(n0) {
        if !(v > 0.0) {
            return Err(Error::invalid(format!("nonpositive value {v} at n={n} in fit window")));
        }
        xs.push((n as f64).ln());
        ys.push(v.ln());
    }
    let (slope, _) = linear_fit(&xs, &ys);
    Ok(-slope)
}
