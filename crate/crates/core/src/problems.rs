//! Analytically known deterministic objectives.
//!
//! Two families cover everything the harness audits:
//!
//! * [`SpectralQuadratic`] — a quadratic defined by its Hessian spectrum, an
//!   orthonormal rotation, a minimizer and an offset. Values, gradients,
//!   Hessian-vector products and smoothness constants are all exact.
//! * [`ChainProblem`] — the worst-case "heat chain" used by the first-order
//!   complexity lower bounds, in both its convex (μ = 0) and μ-regularized
//!   strongly convex form.

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Smoothness summary of an objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveInfo {
    /// Lipschitz constant of the gradient (largest Hessian eigenvalue).
    pub lipschitz: f64,
    /// Strong-convexity constant (smallest Hessian eigenvalue).
    pub strong_convexity: f64,
    pub has_known_minimizer: bool,
    pub min_value: f64,
}

impl ObjectiveInfo {
    pub fn condition(&self) -> f64 {
        self.lipschitz / self.strong_convexity
    }
}

/// Quadratic objective `c + 1/2 (w - w*)ᵀ V Λ Vᵀ (w - w*)`.
///
/// `rotation = None` means the identity, i.e. an axis-aligned quadratic.
#[derive(Debug, Clone)]
pub struct SpectralQuadratic {
    eigenvalues: Vec<f64>,
    rotation: Option<Matrix>,
    minimizer: Vec<f64>,
    offset: f64,
}

impl SpectralQuadratic {
    pub fn new(
        eigenvalues: Vec<f64>,
        rotation: Option<Matrix>,
        minimizer: Vec<f64>,
        offset: f64,
    ) -> Result<Self> {
        let d = eigenvalues.len();
        if d == 0 {
            return Err(Error::invalid("quadratic needs at least one eigenvalue"));
        }
        if !linalg::all_finite(&eigenvalues) || !linalg::all_finite(&minimizer) || !offset.is_finite() {
            return Err(Error::NonFinite("quadratic construction"));
        }
        if eigenvalues.windows(2).any(|p| p[0] > p[1]) {
            return Err(Error::invalid("eigenvalues must be sorted ascending"));
        }
        if minimizer.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: minimizer.len() });
        }
        if let Some(v) = &rotation {
            if v.rows() != d || v.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.rows() });
            }
            let defect = v.orthonormality_defect();
            if defect > 1e-12 {
                return Err(Error::invalid(format!(
                    "rotation is not orthonormal (defect {defect:.3e} > 1e-12)"
                )));
            }
        }
        Ok(SpectralQuadratic { eigenvalues, rotation, minimizer, offset })
    }

    /// Axis-aligned quadratic (identity rotation).
    pub fn diagonal(eigenvalues: Vec<f64>, minimizer: Vec<f64>, offset: f64) -> Result<Self> {
        SpectralQuadratic::new(eigenvalues, None, minimizer, offset)
    }

    /// Quadratic with a reproducible random rotation built by orthonormalizing
    /// a ChaCha-seeded matrix with modified Gram-Schmidt.
    pub fn seeded_rotation(
        eigenvalues: Vec<f64>,
        minimizer: Vec<f64>,
        offset: f64,
        seed: u64,
    ) -> Result<Self> {
        let d = eigenvalues.len();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let raw = Matrix::from_fn(d, d, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let v = linalg::modified_gram_schmidt(&raw);
        SpectralQuadratic::new(eigenvalues, Some(v), minimizer, offset)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn rotation(&self) -> Option<&Matrix> {
        self.rotation.as_ref()
    }

    /// `i`-th eigenvector (column of V).
    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        match &self.rotation {
            Some(v) => v.column(i),
            None => {
                let mut e = vec![0.0; self.dim()];
                e[i] = 1.0;
                e
            }
        }
    }

    pub fn minimizer(&self) -> &[f64] {
        &self.minimizer
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Coordinates of `w - w*` in the eigenbasis, `Vᵀ(w - w*)`.
    pub fn eigen_coords(&self, w: &[f64]) -> Vec<f64> {
        let s = linalg::sub(w, &self.minimizer);
        match &self.rotation {
            Some(v) => v.tr_matvec(&s),
            None => s,
        }
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    pub fn eval(&self, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_dim(w)?;
        let coords = self.eigen_coords(w);
        let value = self.offset
            + 0.5
                * coords
                    .iter()
                    .zip(&self.eigenvalues)
                    .map(|(c, l)| l * c * c)
                    .sum::<f64>();
        let scaled: Vec<f64> = coords.iter().zip(&self.eigenvalues).map(|(c, l)| l * c).collect();
        let gradient = match &self.rotation {
            Some(v) => v.matvec(&scaled),
            None => scaled,
        };
        Ok((value, gradient))
    }

    /// `V Λ Vᵀ v`
    pub fn hvp(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(v)?;
        let coords = match &self.rotation {
            Some(r) => r.tr_matvec(v),
            None => v.to_vec(),
        };
        let scaled: Vec<f64> = coords.iter().zip(&self.eigenvalues).map(|(c, l)| l * c).collect();
        Ok(match &self.rotation {
            Some(r) => r.matvec(&scaled),
            None => scaled,
        })
    }

    pub fn info(&self) -> ObjectiveInfo {
        ObjectiveInfo {
            lipschitz: *self.eigenvalues.last().unwrap(),
            strong_convexity: self.eigenvalues[0],
            has_known_minimizer: true,
            min_value: self.offset,
        }
    }
}

/// The worst-case chain loss
/// `(L - μ)/8 [ (w⁽¹⁾ - 1)² + Σ (w⁽ᵏ⁾ - w⁽ᵏ⁺¹⁾)² ] + (μ/2) ‖w‖²`.
///
/// μ = 0 gives the convex chain (heat source at the first segment); μ > 0 the
/// regularized strongly convex variant. The `(L - μ)/4` internal scale is
/// computed at evaluation time from the stored constants.
#[derive(Debug, Clone, Copy)]
pub struct ChainProblem {
    dim: usize,
    lipschitz: f64,
    strong_convexity: f64,
}

impl ChainProblem {
    pub fn new(dim: usize, lipschitz: f64, strong_convexity: f64) -> Result<Self> {
        if dim < 1 {
            return Err(Error::invalid("chain needs dimension >= 1"));
        }
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return Err(Error::invalid("chain needs Lipschitz constant > 0"));
        }
        if !(0.0..=lipschitz).contains(&strong_convexity) {
            return Err(Error::invalid("chain needs 0 <= mu <= L"));
        }
        Ok(ChainProblem { dim, lipschitz, strong_convexity })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    fn scale(&self) -> f64 {
        (self.lipschitz - self.strong_convexity) / 4.0
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    pub fn eval(&self, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.check_dim(w)?;
        let d = self.dim;
        let s = self.scale();
        let mu = self.strong_convexity;

        let mut tilde = (w[0] - 1.0) * (w[0] - 1.0);
        for k in 0..d - 1 {
            let diff = w[k] - w[k + 1];
            tilde += diff * diff;
        }
        let value = 0.5 * s * tilde + 0.5 * mu * linalg::norm2(w);

        let mut g = vec![0.0; d];
        g[0] = w[0] - 1.0;
        for k in 0..d - 1 {
            let diff = w[k] - w[k + 1];
            g[k] += diff;
            g[k + 1] -= diff;
        }
        for (gi, wi) in g.iter_mut().zip(w) {
            *gi = s * *gi + mu * wi;
        }
        Ok((value, g))
    }

    /// `[s (A_G + e₁e₁ᵀ) + μ I] v` where `A_G` is the path-graph Laplacian.
    pub fn hvp(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(v)?;
        let d = self.dim;
        let s = self.scale();
        let mu = self.strong_convexity;
        let mut out = vec![0.0; d];
        out[0] = v[0];
        for k in 0..d - 1 {
            let diff = v[k] - v[k + 1];
            out[k] += diff;
            out[k + 1] -= diff;
        }
        for (oi, vi) in out.iter_mut().zip(v) {
            *oi = s * *oi + mu * vi;
        }
        Ok(out)
    }

    /// Analytic minimizer: all ones for μ = 0, the geometric sequence `qⁱ`
    /// with `q = (√κ - 1)/(√κ + 1)` for 0 < μ < L, and zero for μ = L.
    ///
    /// The geometric sequence solves the infinite-dimensional problem; at
    /// finite d the last boundary equation is unsatisfied, leaving a small
    /// residual reported by [`ChainProblem::truncation_residual`].
    pub fn minimizer(&self) -> Vec<f64> {
        let mu = self.strong_convexity;
        if mu == 0.0 {
            return vec![1.0; self.dim];
        }
        if mu == self.lipschitz {
            return vec![0.0; self.dim];
        }
        let kappa = self.lipschitz / mu;
        let sqrt_kappa = kappa.sqrt();
        let q = (sqrt_kappa - 1.0) / (sqrt_kappa + 1.0);
        (1..=self.dim).map(|i| q.powi(i as i32)).collect()
    }

    /// Gradient norm at the analytic minimizer; zero for μ ∈ {0, L}, and the
    /// finite-dimension truncation error otherwise.
    pub fn truncation_residual(&self) -> f64 {
        let w = self.minimizer();
        let (_, g) = self.eval(&w).expect("dimension matches by construction");
        linalg::norm(&g)
    }

    pub fn min_value(&self) -> f64 {
        if self.strong_convexity == 0.0 {
            0.0
        } else {
            let w = self.minimizer();
            self.eval(&w).expect("dimension matches by construction").0
        }
    }

    pub fn info(&self) -> ObjectiveInfo {
        ObjectiveInfo {
            lipschitz: self.lipschitz,
            strong_convexity: self.strong_convexity,
            has_known_minimizer: true,
            min_value: self.min_value(),
        }
    }
}

/// Equilibrium of the chain loss with a heat sink at segment `n`:
/// `ŵ⁽ⁱ⁾ = 1 - i/(n+1)` up to the sink and zero beyond, together with the sink
/// loss value `L/(8(n+1))`.
pub fn sink_minimizer(n: usize, d: usize, lipschitz: f64) -> Result<(Vec<f64>, f64)> {
    if 2 * n + 1 > d {
        return Err(Error::invalid(format!("sink index out of range: need 2n+1 <= d, got n={n}, d={d}")));
    }
    let w = (1..=d)
        .map(|i| if i <= n { 1.0 - i as f64 / (n as f64 + 1.0) } else { 0.0 })
        .collect();
    let value = lipschitz / (8.0 * (n as f64 + 1.0));
    Ok((w, value))
}

/// First-order complexity floor `L · dist0² / (16 (n+1)²)`: no span-respecting
/// method can push the loss gap below this after `n` steps.
pub fn complexity_floor(n: usize, dist0: f64, lipschitz: f64) -> Result<f64> {
    if !(dist0 > 0.0) {
        return Err(Error::invalid("complexity floor needs dist0 > 0"));
    }
    let np1 = n as f64 + 1.0;
    Ok(lipschitz * dist0 * dist0 / (16.0 * np1 * np1))
}

/// A test objective the optimizers and harness can drive.
#[derive(Debug, Clone)]
pub enum Problem {
    Quadratic(SpectralQuadratic),
    Chain(ChainProblem),
}

impl Problem {
    pub fn dim(&self) -> usize {
        match self {
            Problem::Quadratic(q) => q.dim(),
            Problem::Chain(c) => c.dim(),
        }
    }

    pub fn eval(&self, w: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self {
            Problem::Quadratic(q) => q.eval(w),
            Problem::Chain(c) => c.eval(w),
        }
    }

    pub fn value(&self, w: &[f64]) -> Result<f64> {
        Ok(self.eval(w)?.0)
    }

    pub fn gradient(&self, w: &[f64]) -> Result<Vec<f64>> {
        Ok(self.eval(w)?.1)
    }

    pub fn hvp(&self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            Problem::Quadratic(q) => q.hvp(v),
            Problem::Chain(c) => c.hvp(v),
        }
    }

    pub fn minimizer(&self) -> Vec<f64> {
        match self {
            Problem::Quadratic(q) => q.minimizer().to_vec(),
            Problem::Chain(c) => c.minimizer(),
        }
    }

    pub fn info(&self) -> ObjectiveInfo {
        match self {
            Problem::Quadratic(q) => q.info(),
            Problem::Chain(c) => c.info(),
        }
    }

    /// Eigenbasis projection of `w - w*`, available on quadratics only.
    pub fn eigen_coords(&self, w: &[f64]) -> Option<Vec<f64>> {
        match self {
            Problem::Quadratic(q) => Some(q.eigen_coords(w)),
            Problem::Chain(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist, dot, norm};

    fn central_difference(p: &Problem, w: &[f64], h: f64) -> Vec<f64> {
        (0..w.len())
            .map(|i| {
                let mut wp = w.to_vec();
                let mut wm = w.to_vec();
                wp[i] += h;
                wm[i] -= h;
                (p.value(&wp).unwrap() - p.value(&wm).unwrap()) / (2.0 * h)
            })
            .collect()
    }

    fn seeded_points(dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| (0..dim).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect())
            .collect()
    }

    #[test]
    fn diagonal_quadratic_value_and_gradient() {
        let q = SpectralQuadratic::diagonal(vec![1.0, 2.0], vec![0.0, 0.0], 0.0).unwrap();
        let (v, g) = q.eval(&[1.0, 1.0]).unwrap();
        assert_eq!(v, 1.5);
        assert_eq!(g, vec![1.0, 2.0]);
    }

    #[test]
    fn quadratic_at_minimizer() {
        let q = SpectralQuadratic::seeded_rotation(vec![0.5, 1.0, 3.0], vec![1.0, -2.0, 0.5], 7.0, 3).unwrap();
        let (v, g) = q.eval(&[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(v, 7.0);
        assert!(norm(&g) <= 1e-12);
    }

    #[test]
    fn quadratic_gradient_along_eigenvector_matches_dense_hessian() {
        let q = SpectralQuadratic::seeded_rotation(vec![0.7, 1.3, 2.1, 5.0], vec![0.2, 0.0, -1.0, 3.0], 0.0, 11).unwrap();
        let d = q.dim();
        // w - w* = v_1 must map to lambda_1 v_1.
        let v1 = q.eigenvector(0);
        let w: Vec<f64> = q.minimizer().iter().zip(&v1).map(|(m, e)| m + e).collect();
        let (_, g) = q.eval(&w).unwrap();
        let expected: Vec<f64> = v1.iter().map(|e| 0.7 * e).collect();
        assert!(dist(&g, &expected) <= 1e-12);

        // Dense oracle: assemble H = V Λ Vᵀ column by column and compare.
        let mut h = Matrix::zeros(d, d);
        for j in 0..d {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            let col = q.hvp(&e).unwrap();
            for i in 0..d {
                h[(i, j)] = col[i];
            }
        }
        for w in seeded_points(d, 5, 23) {
            let (_, g) = q.eval(&w).unwrap();
            let s = linalg::sub(&w, q.minimizer());
            assert!(dist(&g, &h.matvec(&s)) <= 1e-12);
        }
    }

    #[test]
    fn hvp_matches_gradient_identity() {
        let q = SpectralQuadratic::seeded_rotation(vec![1.0, 2.0, 4.0], vec![0.5, 0.5, 0.5], 0.0, 5).unwrap();
        assert_eq!(q.hvp(&[0.0, 0.0, 0.0]).unwrap(), vec![0.0, 0.0, 0.0]);
        for v in seeded_points(3, 5, 29) {
            let w: Vec<f64> = q.minimizer().iter().zip(&v).map(|(m, x)| m + x).collect();
            let (_, g) = q.eval(&w).unwrap();
            assert!(dist(&q.hvp(&v).unwrap(), &g) <= 1e-12);
        }
        let diag = SpectralQuadratic::diagonal(vec![2.0, 3.0], vec![0.0, 0.0], 0.0).unwrap();
        assert_eq!(diag.hvp(&[1.0, 0.0]).unwrap(), vec![2.0, 0.0]);
        assert_eq!(diag.hvp(&[0.0, 1.0]).unwrap(), vec![0.0, 3.0]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let q = SpectralQuadratic::diagonal(vec![1.0, 2.0], vec![0.0, 0.0], 0.0).unwrap();
        assert!(matches!(q.eval(&[1.0]), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(q.hvp(&[1.0, 2.0, 3.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn chain_values_at_reference_points() {
        let c = ChainProblem::new(5, 4.0, 0.0).unwrap();
        let (v, g) = c.eval(&[0.0; 5]).unwrap();
        assert_eq!(v, 4.0 / 8.0);
        assert_eq!(g[0], -4.0 / 4.0);
        assert!(g[1..].iter().all(|&x| x == 0.0));

        let (v, g) = c.eval(&[1.0; 5]).unwrap();
        assert_eq!(v, 0.0);
        assert!(g.iter().all(|&x| x == 0.0));

        let c3 = ChainProblem::new(3, 4.0, 0.0).unwrap();
        assert_eq!(c3.eval(&[1.0, 0.0, 0.0]).unwrap().0, 0.5);
    }

    #[test]
    fn chain_minimizer_cases() {
        let convex = ChainProblem::new(4, 2.0, 0.0).unwrap();
        assert_eq!(convex.minimizer(), vec![1.0; 4]);

        let degenerate = ChainProblem::new(4, 2.0, 2.0).unwrap();
        assert_eq!(degenerate.minimizer(), vec![0.0; 4]);

        // kappa = 9 gives q = 1/2.
        let strong = ChainProblem::new(4, 9.0, 1.0).unwrap();
        let w = strong.minimizer();
        assert!((w[0] - 0.5).abs() < 1e-15);
        assert!((w[1] - 0.25).abs() < 1e-15);
        assert!((w[2] - 0.125).abs() < 1e-15);

        let truncated = ChainProblem::new(40, 10.0, 1.0).unwrap();
        assert!(truncated.truncation_residual() <= 1e-10);
    }

    #[test]
    fn sink_minimizer_matches_linear_solve() {
        let (w, value) = sink_minimizer(1, 3, 4.0).unwrap();
        assert_eq!(w[0], 0.5);
        assert_eq!(w[1], 0.0);
        assert_eq!(value, 4.0 / 16.0);

        // Brute-force check: solve A_n w = e1 for n = 3 via the chain Hessian
        // restricted to the sink loss. The sink loss with n = 3 on d = 7 is the
        // quadratic 1/2 wᵀ A w - (L/4) w₁ + const on the first 3 coordinates.
        let n = 3;
        let d = 7;
        let lipschitz = 4.0;
        let (w, value) = sink_minimizer(n, d, lipschitz).unwrap();
        for (i, wi) in w.iter().enumerate().take(n) {
            assert!((wi - (1.0 - (i as f64 + 1.0) / (n as f64 + 1.0))).abs() < 1e-15);
        }
        assert!(w[n..].iter().all(|&x| x == 0.0));
        // Evaluate the sink loss directly at the returned point.
        let s = lipschitz / 8.0;
        let mut direct = (w[0] - 1.0) * (w[0] - 1.0) + w[n - 1] * w[n - 1];
        for k in 0..n - 1 {
            direct += (w[k] - w[k + 1]) * (w[k] - w[k + 1]);
        }
        assert!((s * direct - value).abs() < 1e-14);
    }

    #[test]
    fn sink_range_check() {
        assert!(sink_minimizer(3, 5, 1.0).is_err());
        assert!(sink_minimizer(2, 5, 1.0).is_ok());
    }

    #[test]
    fn complexity_floor_values() {
        assert_eq!(complexity_floor(0, 1.0, 16.0).unwrap(), 1.0);
        let f1 = complexity_floor(3, 2.0, 5.0).unwrap();
        let f2 = complexity_floor(7, 2.0, 5.0).unwrap();
        assert!((f1 / f2 - 4.0).abs() < 1e-12);
        for n in 0..20 {
            let expected = 5.0 * 4.0 / (16.0 * ((n + 1) * (n + 1)) as f64);
            assert!((complexity_floor(n, 2.0, 5.0).unwrap() - expected).abs() < 1e-15);
        }
        assert!(complexity_floor(1, 0.0, 1.0).is_err());
    }

    #[test]
    fn gradients_match_central_differences() {
        let problems = vec![
            Problem::Quadratic(SpectralQuadratic::seeded_rotation(vec![0.5, 1.5, 4.0], vec![0.3, -0.7, 1.1], 2.0, 17).unwrap()),
            Problem::Chain(ChainProblem::new(6, 4.0, 0.0).unwrap()),
            Problem::Chain(ChainProblem::new(6, 4.0, 0.5).unwrap()),
        ];
        for p in &problems {
            for w in seeded_points(p.dim(), 4, 41) {
                let g = p.gradient(&w).unwrap();
                let fd = central_difference(p, &w, 1e-5);
                for (a, b) in g.iter().zip(&fd) {
                    let scale = a.abs().max(b.abs()).max(1.0);
                    assert!((a - b).abs() / scale <= 1e-6, "gradient {a} vs fd {b}");
                }
            }
        }
    }

    #[test]
    fn convexity_and_strong_convexity_hold_on_random_pairs() {
        let problems = vec![
            Problem::Quadratic(SpectralQuadratic::seeded_rotation(vec![0.5, 1.5, 4.0], vec![0.0; 3], 0.0, 19).unwrap()),
            Problem::Chain(ChainProblem::new(5, 4.0, 0.0).unwrap()),
            Problem::Chain(ChainProblem::new(5, 4.0, 1.0).unwrap()),
        ];
        for p in &problems {
            let mu = p.info().strong_convexity;
            let points = seeded_points(p.dim(), 8, 43);
            for pair in points.chunks(2) {
                let (x, y) = (&pair[0], &pair[1]);
                let (fx, gx) = p.eval(x).unwrap();
                let fy = p.value(y).unwrap();
                for t in [0.25, 0.5, 0.75] {
                    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| t * a + (1.0 - t) * b).collect();
                    let fmid = p.value(&mid).unwrap();
                    assert!(fmid <= t * fx + (1.0 - t) * fy + 1e-12);
                }
                // strong-convexity lower bound f(y) >= f(x) + <g, y-x> + mu/2 |y-x|^2
                let lin = fx + dot(&gx, &linalg::sub(y, x)) + 0.5 * mu * linalg::dist2(x, y);
                assert!(fy >= lin - 1e-9, "strong convexity violated: {fy} < {lin}");
            }
        }
    }

    #[test]
    fn rayleigh_quotients_stay_within_bounds() {
        let problems = vec![
            Problem::Quadratic(SpectralQuadratic::seeded_rotation(vec![0.5, 1.5, 4.0], vec![0.0; 3], 0.0, 53).unwrap()),
            Problem::Chain(ChainProblem::new(7, 4.0, 0.0).unwrap()),
            Problem::Chain(ChainProblem::new(7, 4.0, 0.8).unwrap()),
        ];
        for p in &problems {
            let info = p.info();
            for v in seeded_points(p.dim(), 10, 59) {
                let quotient = dot(&v, &p.hvp(&v).unwrap()) / linalg::norm2(&v);
                assert!(quotient >= info.strong_convexity - 1e-9);
                assert!(quotient <= info.lipschitz + 1e-9);
            }
        }
    }
}
