//! Levenberg-Marquardt step with a Hessian-free inner solver.
//!
//! The step `-(H + M I)⁻¹ g` is computed by linear conjugate gradients on the
//! shifted operator, so only Hessian-vector products are needed.

use crate::error::{Error, Result};
use crate::linalg;

/// Solve `(H + M I) s = -g` to relative residual `inner_tol · ‖g‖`.
pub fn lm_step(
    g: &[f64],
    mut hvp: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    regularization: f64,
    inner_tol: f64,
    inner_max: usize,
) -> Result<Vec<f64>> {
    if regularization < 0.0 {
        return Err(Error::invalid("LM regularization must be >= 0"));
    }
    let d = g.len();
    let g_norm = linalg::norm(g);
    if g_norm == 0.0 {
        return Ok(vec![0.0; d]);
    }
    let target = inner_tol * g_norm;

    let apply = |v: &[f64], hvp: &mut dyn FnMut(&[f64]) -> Result<Vec<f64>>| -> Result<Vec<f64>> {
        let mut out = hvp(v)?;
        for (o, vi) in out.iter_mut().zip(v) {
            *o += regularization * vi;
        }
        Ok(out)
    };

    let mut x = vec![0.0; d];
    let mut r = linalg::scale(g, -1.0); // residual b - A x with b = -g, x = 0
    let mut p = r.clone();
    let mut rs = linalg::norm2(&r);
    for _ in 0..inner_max {
        if rs.sqrt() <= target {
            return Ok(x);
        }
        let ap = apply(&p, &mut hvp)?;
        let pap = linalg::dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::invalid("shifted Hessian is not positive definite"));
        }
        let alpha = rs / pap;
        x = linalg::add_scaled(&x, alpha, &p);
        r = linalg::add_scaled(&r, -alpha, &ap);
        let rs_new = linalg::norm2(&r);
        p = linalg::add_scaled(&r, rs_new / rs, &p);
        rs = rs_new;
    }
    if rs.sqrt() <= target {
        return Ok(x);
    }
    Err(Error::InnerSolve { residual: rs.sqrt(), max_iters: inner_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Problem, SpectralQuadratic};

    fn quad(eigs: Vec<f64>, seed: u64) -> Problem {
        let d = eigs.len();
        Problem::Quadratic(
            SpectralQuadratic::seeded_rotation(eigs, (0..d).map(|i| i as f64 * 0.3).collect(), 0.0, seed)
                .unwrap(),
        )
    }

    #[test]
    fn unregularized_step_jumps_to_the_vertex() {
        let p = quad(vec![0.5, 2.0, 8.0], 41);
        let w = vec![3.0, -1.0, 2.5];
        let g = p.gradient(&w).unwrap();
        let step = lm_step(&g, |v| p.hvp(v), 0.0, 1e-12, 100).unwrap();
        let next = linalg::add(&w, &step);
        assert!(linalg::dist(&next, &p.minimizer()) <= 1e-8);
    }

    #[test]
    fn heavy_regularization_behaves_like_gd() {
        let p = quad(vec![0.5, 2.0, 8.0], 43);
        let w = vec![1.0, 1.0, 1.0];
        let g = p.gradient(&w).unwrap();
        let m = 1e6 * 8.0;
        let step = lm_step(&g, |v| p.hvp(v), m, 1e-10, 200).unwrap();
        let gd_like = linalg::scale(&g, -1.0 / m);
        let rel = linalg::dist(&step, &gd_like) / linalg::norm(&gd_like);
        assert!(rel <= 1e-3, "relative departure {rel}");
    }

    #[test]
    fn zero_gradient_returns_zero_step() {
        let p = quad(vec![1.0, 2.0], 47);
        let step = lm_step(&[0.0, 0.0], |v| p.hvp(v), 0.5, 1e-10, 50).unwrap();
        assert_eq!(step, vec![0.0, 0.0]);
    }

    #[test]
    fn non_convergence_reports_last_residual() {
        let p = quad(vec![1.0, 100.0, 10_000.0], 53);
        let w = vec![1.0, 1.0, 1.0];
        let g = p.gradient(&w).unwrap();
        let err = lm_step(&g, |v| p.hvp(v), 0.0, 1e-14, 1);
        match err {
            Err(Error::InnerSolve { residual, max_iters }) => {
                assert!(residual > 0.0);
                assert_eq!(max_iters, 1);
            }
            other => panic!("expected inner-solve error, got {other:?}"),
        }
    }
}
