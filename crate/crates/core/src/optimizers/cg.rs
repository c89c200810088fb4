//! Conjugate gradient descent on strictly convex quadratics.
//!
//! Directions follow the simplified Gram-Schmidt recursion
//! `d⁽ⁿ⁺¹⁾ = ∇L(wₙ) + (‖∇L(wₙ)‖²/‖∇L(wₙ₋₁)‖²) d⁽ⁿ⁾` with the exact line
//! search `αₙ = ⟨∇L(wₙ₋₁), d⁽ⁿ⁾⟩ / ⟨d⁽ⁿ⁾, H d⁽ⁿ⁾⟩`; successive directions are
//! H-orthogonal, so the method terminates in at most `d` steps.

use crate::error::{Error, Result};
use crate::linalg;
use crate::optimizers::trace::Trace;
use crate::problems::Problem;

#[derive(Debug, Clone)]
pub struct CgRun {
    pub trace: Trace,
    /// Search directions actually used, in order.
    pub directions: Vec<Vec<f64>>,
    /// Iterates, starting with the initial point.
    pub iterates: Vec<Vec<f64>>,
}

pub fn cg_run(p: &Problem, w0: &[f64], max_iters: usize, tol: f64) -> Result<CgRun> {
    if w0.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: w0.len() });
    }
    let mut trace = Trace::new();
    let mut w = w0.to_vec();
    trace.observe(p, &w, f64::NAN, f64::NAN, f64::NAN);

    let mut g = p.gradient(&w)?;
    let mut g2 = linalg::norm2(&g);
    let mut direction = g.clone();
    let mut directions = Vec::new();
    let mut iterates = vec![w.clone()];

    for _ in 0..max_iters {
        if g2.sqrt() <= tol {
            break;
        }
        let hd = p.hvp(&direction)?;
        let dhd = linalg::dot(&direction, &hd);
        if !(dhd > 0.0) {
            return Err(Error::invalid("CG needs a positive definite Hessian"));
        }
        let alpha = linalg::dot(&g, &direction) / dhd;
        directions.push(direction.clone());
        w = linalg::add_scaled(&w, -alpha, &direction);
        iterates.push(w.clone());

        let g_new = p.gradient(&w)?;
        let g2_new = linalg::norm2(&g_new);
        let fletcher_reeves = g2_new / g2;
        trace.observe(p, &w, alpha, fletcher_reeves, f64::NAN);

        direction = linalg::add_scaled(&g_new, fletcher_reeves, &direction);
        g = g_new;
        g2 = g2_new;
    }

    Ok(CgRun { trace, directions, iterates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::SpectralQuadratic;

    fn quad(eigs: Vec<f64>, seed: u64) -> Problem {
        let d = eigs.len();
        Problem::Quadratic(SpectralQuadratic::seeded_rotation(eigs, vec![0.0; d], 0.0, seed).unwrap())
    }

    #[test]
    fn two_dimensional_convergence_in_two_steps() {
        for seed in [1, 2, 3] {
            let p = quad(vec![0.5, 4.0], seed);
            let run = cg_run(&p, &[3.0, -2.0], 10, 1e-10).unwrap();
            assert!(run.trace.iterations() <= 2);
            assert!(run.trace.last().unwrap().grad_norm <= 1e-10);
        }
    }

    #[test]
    fn condition_one_converges_in_one_step() {
        let p = quad(vec![2.0, 2.0, 2.0], 5);
        let run = cg_run(&p, &[1.0, 2.0, 3.0], 10, 1e-10).unwrap();
        assert_eq!(run.trace.iterations(), 1);
        assert!(run.trace.last().unwrap().grad_norm <= 1e-10);
    }

    #[test]
    fn directions_are_pairwise_conjugate() {
        let eigs: Vec<f64> = (1..=20).map(|i| 0.5 + i as f64 * 0.4).collect();
        let p = quad(eigs, 7);
        let run = cg_run(&p, &vec![1.0; 20], 20, 1e-8).unwrap();
        assert!(run.trace.last().unwrap().grad_norm <= 1e-8);
        let h_norms: Vec<f64> = run
            .directions
            .iter()
            .map(|d| linalg::dot(d, &p.hvp(d).unwrap()).sqrt())
            .collect();
        for i in 0..run.directions.len() {
            for j in 0..i {
                let cross = linalg::dot(&run.directions[i], &p.hvp(&run.directions[j]).unwrap());
                let normalized = cross.abs() / (h_norms[i] * h_norms[j]);
                assert!(normalized <= 1e-8, "directions {i},{j}: {normalized}");
            }
        }
    }

    #[test]
    fn indefinite_problem_is_rejected() {
        let q = SpectralQuadratic::diagonal(vec![-1.0, 2.0], vec![0.0, 0.0], 0.0).unwrap();
        let p = Problem::Quadratic(q);
        // Starting along the negative-curvature direction trips the check.
        let err = cg_run(&p, &[1.0, 0.0], 5, 1e-10);
        assert!(err.is_err());
    }
}
