//! Secant (quasi-Newton) updates: BFGS, DFP and the limited-memory two-loop
//! application of the BFGS inverse.
//!
//! All updates require the curvature condition `⟨Δg, Δw⟩ > 0`; a violating
//! pair yields an explicit error so a driver can skip the update and keep its
//! previous estimate.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

fn curvature(dw: &[f64], dg: &[f64]) -> Result<f64> {
    let c = linalg::dot(dg, dw);
    if !(c > 0.0) {
        return Err(Error::CurvatureCondition(c));
    }
    Ok(c)
}

/// BFGS update of the *inverse* Hessian estimate:
/// `B' = (I - ρ s yᵀ) B (I - ρ y sᵀ) + ρ s sᵀ` with `s = Δw`, `y = Δg`,
/// `ρ = 1/⟨y, s⟩`. Satisfies `B' Δg = Δw` and preserves positive definiteness.
pub fn bfgs_inverse_update(b: &Matrix, dw: &[f64], dg: &[f64]) -> Result<Matrix> {
    let rho = 1.0 / curvature(dw, dg)?;
    let d = dw.len();
    if b.rows() != d || b.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.rows() });
    }
    // left = (I - rho s yT) B
    let mut left = b.clone();
    let ytb = b.tr_matvec(dg); // Bᵀ y = B y for symmetric B, but stay general
    left.add_outer(-rho, dw, &ytb);
    // out = left (I - rho y sT) = left - rho (left y) sT
    let ly = left.matvec(dg);
    let mut out = left;
    out.add_outer(-rho, &ly, dw);
    out.add_outer(rho, dw, dw);
    Ok(out)
}

/// DFP update of the *direct* Hessian estimate:
/// `H' = (I - ρ y sᵀ) H (I - ρ s yᵀ) + ρ y yᵀ`. Satisfies `H' Δw = Δg`.
pub fn dfp_update(h: &Matrix, dw: &[f64], dg: &[f64]) -> Result<Matrix> {
    let rho = 1.0 / curvature(dw, dg)?;
    let d = dw.len();
    if h.rows() != d || h.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: h.rows() });
    }
    let mut left = h.clone();
    let sth = h.tr_matvec(dw);
    left.add_outer(-rho, dg, &sth);
    let ls = left.matvec(dw);
    let mut out = left;
    out.add_outer(-rho, &ls, dg);
    out.add_outer(rho, dg, dg);
    Ok(out)
}

/// DFP update written directly for the inverse:
/// `B' = B - (B y yᵀ B)/⟨y, By⟩ + (s sᵀ)/⟨y, s⟩`. Satisfies `B' Δg = Δw`.
pub fn dfp_inverse_update(b: &Matrix, dw: &[f64], dg: &[f64]) -> Result<Matrix> {
    let c = curvature(dw, dg)?;
    let d = dw.len();
    if b.rows() != d || b.cols() != d {
        return Err(Error::DimensionMismatch { expected: d, got: b.rows() });
    }
    let by = b.matvec(dg);
    let yby = linalg::dot(dg, &by);
    if !(yby > 0.0) {
        return Err(Error::invalid("DFP inverse update needs positive <y, By>"));
    }
    let mut out = b.clone();
    out.add_outer(-1.0 / yby, &by, &by);
    out.add_outer(1.0 / c, dw, dw);
    Ok(out)
}

/// Which secant estimate a caller maintains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecantKind {
    /// Inverse-Hessian estimate via the BFGS recursion.
    BfgsInverse,
    /// Direct Hessian estimate via the DFP recursion.
    Dfp,
}

pub fn secant_update(kind: SecantKind, m: &Matrix, dw: &[f64], dg: &[f64]) -> Result<Matrix> {
    match kind {
        SecantKind::BfgsInverse => bfgs_inverse_update(m, dw, dg),
        SecantKind::Dfp => dfp_update(m, dw, dg),
    }
}

/// Stored curvature pairs `(Δw, Δg)`, oldest first, with bounded length.
#[derive(Debug, Clone, Default)]
pub struct CurvatureMemory {
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
    limit: usize,
}

impl CurvatureMemory {
    pub fn new(limit: usize) -> Self {
        CurvatureMemory { pairs: Vec::new(), limit }
    }

    /// Push a pair, dropping the oldest beyond the limit. Pairs violating the
    /// curvature condition are skipped and reported.
    pub fn push(&mut self, dw: Vec<f64>, dg: Vec<f64>) -> Result<()> {
        curvature(&dw, &dg)?;
        self.pairs.push((dw, dg));
        if self.limit > 0 && self.pairs.len() > self.limit {
            self.pairs.remove(0);
        }
        Ok(())
    }

    pub fn pairs(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Two-loop recursion: apply the BFGS inverse-Hessian estimate built from
/// `memory` (seeded at the identity) to `v`, in `O(len(memory) · d)` work.
/// Empty memory returns `v` unchanged.
pub fn lbfgs_apply(memory: &[(Vec<f64>, Vec<f64>)], v: &[f64]) -> Vec<f64> {
    let mut q = v.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y) in memory.iter().rev() {
        let rho = 1.0 / linalg::dot(y, s);
        let a = rho * linalg::dot(s, &q);
        q = linalg::add_scaled(&q, -a, y);
        alphas.push((a, rho));
    }
    let mut r = q; // H0 = I
    for ((s, y), (a, rho)) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * linalg::dot(y, &r);
        r = linalg::add_scaled(&r, a - b, s);
    }
    r
}

/// L-BFGS driver for quadratics: two-loop direction, exact line search via
/// Hessian-vector products, curvature-violating pairs skipped.
pub fn run_lbfgs(
    p: &crate::problems::Problem,
    w0: &[f64],
    memory_limit: usize,
    opts: crate::optimizers::steps::RunOptions,
) -> Result<crate::optimizers::trace::Trace> {
    let mut trace = crate::optimizers::trace::Trace::new();
    let mut w = w0.to_vec();
    trace.observe(p, &w, f64::NAN, f64::NAN, f64::NAN);
    let mut memory = CurvatureMemory::new(memory_limit);
    let mut g = p.gradient(&w)?;
    for _ in 0..opts.iters {
        if linalg::norm(&g) <= opts.grad_tol {
            break;
        }
        let direction = lbfgs_apply(memory.pairs(), &g);
        let hd = p.hvp(&direction)?;
        let dhd = linalg::dot(&direction, &hd);
        if !(dhd > 0.0) {
            return Err(Error::invalid("L-BFGS needs a positive definite Hessian"));
        }
        let alpha = linalg::dot(&g, &direction) / dhd;
        let w_next = linalg::add_scaled(&w, -alpha, &direction);
        let g_next = p.gradient(&w_next)?;
        let dw = linalg::sub(&w_next, &w);
        let dg = linalg::sub(&g_next, &g);
        // Keep the previous estimate when the curvature condition fails.
        let _ = memory.push(dw, dg);
        w = w_next;
        g = g_next;
        trace.observe(p, &w, alpha, f64::NAN, f64::NAN);
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_vec(rng: &mut ChaCha20Rng, d: usize) -> Vec<f64> {
        (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
    }

    /// Random SPD matrix A Aᵀ + I.
    fn random_spd(rng: &mut ChaCha20Rng, d: usize) -> Matrix {
        let a = Matrix::from_fn(d, d, |_, _| rng.random::<f64>() - 0.5);
        let mut spd = a.matmul(&a.transpose());
        for i in 0..d {
            spd[(i, i)] += 1.0;
        }
        spd
    }

    /// A curvature pair generated from an SPD model Hessian: dg = H dw.
    fn curvature_pair(rng: &mut ChaCha20Rng, d: usize) -> (Vec<f64>, Vec<f64>) {
        let h = random_spd(rng, d);
        let dw = random_vec(rng, d);
        let dg = h.matvec(&dw);
        (dw, dg)
    }

    #[test]
    fn bfgs_satisfies_the_secant_equation() {
        let mut rng = ChaCha20Rng::seed_from_u64(71);
        let d = 6;
        let (dw, dg) = curvature_pair(&mut rng, d);
        let b = bfgs_inverse_update(&Matrix::identity(d), &dw, &dg).unwrap();
        let bdg = b.matvec(&dg);
        let rel = linalg::dist(&bdg, &dw) / linalg::norm(&dw);
        assert!(rel <= 1e-12, "secant residual {rel}");
        // Symmetry comes with the formula.
        let bt = b.transpose();
        for i in 0..d {
            for j in 0..d {
                assert!((b[(i, j)] - bt[(i, j)]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn bfgs_preserves_positive_definiteness() {
        let mut rng = ChaCha20Rng::seed_from_u64(73);
        let d = 5;
        let start = random_spd(&mut rng, d);
        let (dw, dg) = curvature_pair(&mut rng, d);
        let b = bfgs_inverse_update(&start, &dw, &dg).unwrap();
        for _ in 0..100 {
            let z = random_vec(&mut rng, d);
            let quad = linalg::dot(&z, &b.matvec(&z));
            assert!(quad > 0.0, "lost positive definiteness: {quad}");
        }
    }

    #[test]
    fn dfp_direct_and_inverse_are_consistent() {
        let mut rng = ChaCha20Rng::seed_from_u64(79);
        let d = 4;
        let (dw, dg) = curvature_pair(&mut rng, d);
        let h = dfp_update(&Matrix::identity(d), &dw, &dg).unwrap();
        // Direct form satisfies H dw = dg.
        let rel = linalg::dist(&h.matvec(&dw), &dg) / linalg::norm(&dg);
        assert!(rel <= 1e-12);

        let b = dfp_inverse_update(&Matrix::identity(d), &dw, &dg).unwrap();
        let rel = linalg::dist(&b.matvec(&dg), &dw) / linalg::norm(&dw);
        assert!(rel <= 1e-12);
    }

    #[test]
    fn dfp_and_bfgs_solve_the_same_equation_but_differ() {
        let mut rng = ChaCha20Rng::seed_from_u64(83);
        let d = 5;
        let (dw, dg) = curvature_pair(&mut rng, d);
        let bfgs = bfgs_inverse_update(&Matrix::identity(d), &dw, &dg).unwrap();
        let dfp = dfp_inverse_update(&Matrix::identity(d), &dw, &dg).unwrap();
        assert!(linalg::dist(&bfgs.matvec(&dg), &dfp.matvec(&dg)) <= 1e-12);
        let mut max_entry_diff = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                max_entry_diff = max_entry_diff.max((bfgs[(i, j)] - dfp[(i, j)]).abs());
            }
        }
        assert!(max_entry_diff > 1e-6, "updates unexpectedly identical");
    }

    #[test]
    fn curvature_violation_is_an_explicit_error() {
        let d = 3;
        let dw = vec![1.0, 0.0, 0.0];
        let dg = vec![-1.0, 0.0, 0.0];
        assert!(matches!(
            bfgs_inverse_update(&Matrix::identity(d), &dw, &dg),
            Err(Error::CurvatureCondition(_))
        ));
        let mut mem = CurvatureMemory::new(4);
        assert!(mem.push(dw, dg).is_err());
        assert!(mem.is_empty());
    }

    #[test]
    fn empty_memory_is_the_identity() {
        let v = vec![1.0, -2.0, 3.0];
        assert_eq!(lbfgs_apply(&[], &v), v);
    }

    #[test]
    fn full_memory_matches_dense_bfgs() {
        let mut rng = ChaCha20Rng::seed_from_u64(89);
        let d = 6;
        // Pairs from one fixed SPD quadratic, as a driver would collect them.
        let h = random_spd(&mut rng, d);
        let mut memory = Vec::new();
        let mut dense = Matrix::identity(d);
        for _ in 0..d {
            let dw = random_vec(&mut rng, d);
            let dg = h.matvec(&dw);
            dense = bfgs_inverse_update(&dense, &dw, &dg).unwrap();
            memory.push((dw, dg));
        }
        for _ in 0..5 {
            let v = random_vec(&mut rng, d);
            let two_loop = lbfgs_apply(&memory, &v);
            let direct = dense.matvec(&v);
            let rel = linalg::dist(&two_loop, &direct) / linalg::norm(&direct);
            assert!(rel <= 1e-10, "two-loop vs dense: {rel}");
        }
    }

    #[test]
    fn truncation_equals_dense_restarted_at_the_window() {
        let mut rng = ChaCha20Rng::seed_from_u64(97);
        let d = 5;
        let h = random_spd(&mut rng, d);
        let n = 8;
        let k = 3;
        let all: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
            .map(|_| {
                let dw = random_vec(&mut rng, d);
                let dg = h.matvec(&dw);
                (dw, dg)
            })
            .collect();
        let mut mem = CurvatureMemory::new(k);
        for (dw, dg) in all.iter().cloned() {
            mem.push(dw, dg).unwrap();
        }
        assert_eq!(mem.len(), k);
        // Dense recursion seeded at identity over only the last k pairs.
        let mut dense = Matrix::identity(d);
        for (dw, dg) in &all[n - k..] {
            dense = bfgs_inverse_update(&dense, dw, dg).unwrap();
        }
        let v = random_vec(&mut rng, d);
        let rel = linalg::dist(&lbfgs_apply(mem.pairs(), &v), &dense.matvec(&v)) / linalg::norm(&v);
        assert!(rel <= 1e-10);
    }
}
