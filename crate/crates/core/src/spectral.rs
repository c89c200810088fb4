//! Closed-form eigenvalue analysis of the 2x2 momentum iteration blocks.
//!
//! Heavy-ball momentum acts on each eigenspace of the Hessian through the
//! block `R = [[0, 1], [-β, 1 + β - hλ]]`. Everything here is exact 2x2
//! arithmetic: the eigenvalues from the quadratic formula, the stability
//! region classification, an explicit Schur decomposition, the closed-form
//! operator norm (largest singular value), and a brute-force matrix-power
//! oracle used to cross-check all of it.
//!
//! Complex arithmetic is used throughout, even for real-eigenvalue inputs;
//! real results simply carry zero imaginary parts.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Eigenvalues of the momentum block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    /// `+` branch of the quadratic formula.
    pub sigma1: Complex64,
    /// `-` branch.
    pub sigma2: Complex64,
}

impl EigenPair {
    pub fn spectral_radius(&self) -> f64 {
        self.sigma1.norm().max(self.sigma2.norm())
    }
}

/// Qualitative behaviour of the iteration at a `(β, hλ)` point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// Real eigenvalues, `hλ < 1 + β`: plain linear convergence.
    Monotonic,
    /// Real eigenvalues, `hλ >= 1 + β`: sign-flipping convergence.
    Oscillation,
    /// Complex eigenvalues: radius `√β` regardless of curvature.
    Ripples,
    /// Spectral radius at or above one.
    Divergent,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::Monotonic => "monotonic",
            Region::Oscillation => "oscillation",
            Region::Ripples => "ripples",
            Region::Divergent => "divergent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub region: Region,
    pub spectral_radius: f64,
    pub eigenpair: EigenPair,
}

/// Eigenvalues `σ = ((1 + β - hλ) ± √((1 + β - hλ)² - 4β)) / 2`.
pub fn hb_eigenvalues(beta: f64, hlambda: f64) -> EigenPair {
    let trace = Complex64::new(1.0 + beta - hlambda, 0.0);
    let disc = trace * trace - Complex64::new(4.0 * beta, 0.0);
    let root = disc.sqrt();
    EigenPair { sigma1: (trace + root) / 2.0, sigma2: (trace - root) / 2.0 }
}

/// Stability region of heavy-ball momentum at `(β, hλ)`.
pub fn classify_region(beta: f64, hlambda: f64) -> StabilityReport {
    let eigenpair = hb_eigenvalues(beta, hlambda);
    let spectral_radius = eigenpair.spectral_radius();
    let stable = 0.0 < hlambda && hlambda < 2.0 * (1.0 + beta) && beta.abs() < 1.0;
    let region = if !stable {
        Region::Divergent
    } else {
        let sqrt_beta = beta.max(0.0).sqrt();
        let complex = beta > 0.0
            && (1.0 - sqrt_beta) * (1.0 - sqrt_beta) < hlambda
            && hlambda < (1.0 + sqrt_beta) * (1.0 + sqrt_beta);
        if complex {
            Region::Ripples
        } else if hlambda < 1.0 + beta {
            Region::Monotonic
        } else {
            Region::Oscillation
        }
    };
    StabilityReport { region, spectral_radius, eigenpair }
}

type Mat2 = [[f64; 2]; 2];

fn momentum_block(beta: f64, hlambda: f64) -> Mat2 {
    [[0.0, 1.0], [-beta, 1.0 + beta - hlambda]]
}

fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Exact operator norm (largest singular value) of a real 2x2 matrix.
pub fn opnorm_2x2(a: &Mat2) -> f64 {
    let frob2 = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let disc = (frob2 * frob2 - 4.0 * det * det).max(0.0);
    (0.5 * (frob2 + disc.sqrt())).sqrt()
}

/// `ln ‖Rⁿ‖`, computed with per-step renormalization so divergent parameters
/// do not overflow.
fn log_opnorm_power(beta: f64, hlambda: f64, n: usize) -> f64 {
    let r = momentum_block(beta, hlambda);
    let mut m = [[1.0, 0.0], [0.0, 1.0]];
    let mut log_scale = 0.0;
    for _ in 0..n {
        m = mat2_mul(&r, &m);
        let s = m.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if s == 0.0 {
            return f64::NEG_INFINITY;
        }
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x /= s;
            }
        }
        log_scale += s.ln();
    }
    opnorm_2x2(&m).ln() + log_scale
}

/// Brute-force Gelfand estimate `‖Rⁿ‖^(1/n)` of the spectral radius.
pub fn spectral_radius_empirical(beta: f64, hlambda: f64, n: usize) -> Result<f64> {
    if n < 10 {
        return Err(Error::invalid("power oracle needs n >= 10"));
    }
    Ok((log_opnorm_power(beta, hlambda, n) / n as f64).exp())
}

/// `‖Rⁿ‖` itself (log-scale internally).
pub fn opnorm_power(beta: f64, hlambda: f64, n: usize) -> f64 {
    log_opnorm_power(beta, hlambda, n).exp()
}

/// Jointly optimal heavy-ball parameters for a spectrum `[λ₁, λ_d]`:
/// `√h* = 2/(√λ₁ + √λ_d)`, `β* = (1 - 2/(1+√κ))²`, rate `√β*`.
pub fn optimal_hb(lambda1: f64, lambda_d: f64) -> (f64, f64, f64) {
    let sqrt_h = 2.0 / (lambda1.sqrt() + lambda_d.sqrt());
    let h = sqrt_h * sqrt_h;
    let kappa = lambda_d / lambda1;
    let rate = 1.0 - 2.0 / (1.0 + kappa.sqrt());
    (h, rate * rate, rate)
}

/// Best momentum for a fixed learning rate:
/// `β* = max{(1 - √(hλ₁))², (1 - √(hλ_d))²}`.
pub fn optimal_beta_given_lr(h: f64, lambda1: f64, lambda_d: f64) -> f64 {
    let a = 1.0 - (h * lambda1).sqrt();
    let b = 1.0 - (h * lambda_d).sqrt();
    (a * a).max(b * b)
}

/// Nesterov momentum per-eigenspace reduction: the block equals the heavy-ball
/// block with the effective coefficient `β̃ = β(1 - hλ)`. Returns `β̃` and the
/// heavy-ball classification at `(β̃, hλ)`.
pub fn nesterov_effective(beta: f64, hlambda: f64) -> (f64, StabilityReport) {
    let beta_eff = beta * (1.0 - hlambda);
    (beta_eff, classify_region(beta_eff, hlambda))
}

/// Alternative closed form of Nesterov stability,
/// `0 < hλ < 1 + 1/(1 + 2β)` and `|1 - hλ| < 1/|β|`.
pub fn nesterov_stable_closed_form(beta: f64, hlambda: f64) -> bool {
    let first = 0.0 < hlambda && hlambda < 1.0 + 1.0 / (1.0 + 2.0 * beta);
    let second = if beta == 0.0 { true } else { (1.0 - hlambda).abs() < 1.0 / beta.abs() };
    first && second
}

type CMat2 = [[Complex64; 2]; 2];

/// Explicit 2x2 Schur decomposition `Q T Q* = R` of `R = [[0, 1], [-β, ξ]]`.
#[derive(Debug, Clone, Copy)]
pub struct SchurForm {
    /// Unitary factor, first column a normalized eigenvector of `r₁`.
    pub q: CMat2,
    /// Upper-triangular factor `Q* R Q`.
    pub t: CMat2,
}

fn cmat2_mul(a: &CMat2, b: &CMat2) -> CMat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn cmat2_adjoint(a: &CMat2) -> CMat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

impl SchurForm {
    /// `Q T Q*`, which must reproduce the input block.
    pub fn reconstruct(&self) -> CMat2 {
        cmat2_mul(&cmat2_mul(&self.q, &self.t), &cmat2_adjoint(&self.q))
    }

    /// `max |Q*Q - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = cmat2_mul(&cmat2_adjoint(&self.q), &self.q);
        let mut defect = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                defect = defect.max((g[i][j] - target).norm());
            }
        }
        defect
    }
}

/// Schur decomposition of `R = [[0, 1], [-β, ξ]]` built from the normalized
/// eigenvector of the `+` branch eigenvalue `r₁` and its orthogonal
/// complement. The branch is fixed for determinism; swapping `r₁` and `r₂`
/// would give the mirrored decomposition.
pub fn schur_2x2(beta: f64, xi: f64) -> SchurForm {
    let disc = Complex64::new(xi * xi - 4.0 * beta, 0.0).sqrt();
    let r1 = (Complex64::new(xi, 0.0) + disc) / 2.0;
    let scale = Complex64::new(1.0 / (1.0 + r1.norm_sqr()).sqrt(), 0.0);
    let q: CMat2 = [
        [scale, scale * r1.conj()],
        [scale * r1, -scale],
    ];
    let r: CMat2 = [
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        [Complex64::new(-beta, 0.0), Complex64::new(xi, 0.0)],
    ];
    let t = cmat2_mul(&cmat2_mul(&cmat2_adjoint(&q), &r), &q);
    SchurForm { q, t }
}

/// Operator-norm power bound in the complex (ripples) regime:
/// `‖Rⁿ‖ <= ρⁿ⁻¹ (ρ + n(1 + ρ²)) <= (2n+1) ρⁿ⁻¹` with `ρ = √β`.
/// Returns `(bound, actual)` with the exact norm of `Rⁿ`.
pub fn norm_power_bound(beta: f64, hlambda: f64, n: usize) -> Result<(f64, f64)> {
    if !(0.0 < beta && beta < 1.0) {
        return Err(Error::invalid("power bound needs 0 < beta < 1"));
    }
    let sqrt_beta = beta.sqrt();
    let lo = (1.0 - sqrt_beta) * (1.0 - sqrt_beta);
    let hi = (1.0 + sqrt_beta) * (1.0 + sqrt_beta);
    if !(lo <= hlambda && hlambda <= hi) {
        return Err(Error::invalid(format!(
            "({beta}, {hlambda}) is outside the complex regime [{lo}, {hi}]"
        )));
    }
    let rho = sqrt_beta;
    let bound = rho.powi(n as i32 - 1) * (rho + n as f64 * (1.0 + rho * rho));
    let actual = opnorm_power(beta, hlambda, n);
    let coarse = (2.0 * n as f64 + 1.0) * rho.powi(n as i32 - 1);
    assert!(actual <= bound * (1.0 + 1e-12), "norm {actual} exceeds bound {bound}");
    assert!(bound <= coarse * (1.0 + 1e-12), "bound {bound} exceeds coarse form {coarse}");
    Ok((bound, actual))
}

/// One row of a stability sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub beta: f64,
    pub hlambda: f64,
    pub region: Region,
    pub radius: f64,
}

/// Classify a full `(β, hλ)` grid; `nesterov` classifies the effective
/// coefficient `β̃ = β(1 - hλ)` instead.
pub fn region_sweep(
    bmin: f64,
    bmax: f64,
    hmin: f64,
    hmax: f64,
    steps: usize,
    nesterov: bool,
) -> Result<Vec<SweepRow>> {
    if steps < 2 || !(bmin < bmax) || !(hmin < hmax) {
        return Err(Error::invalid("sweep needs steps >= 2 and non-empty ranges"));
    }
    let mut rows = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        let beta = bmin + (bmax - bmin) * i as f64 / (steps - 1) as f64;
        for j in 0..steps {
            let hlambda = hmin + (hmax - hmin) * j as f64 / (steps - 1) as f64;
            let report = if nesterov {
                nesterov_effective(beta, hlambda).1
            } else {
                classify_region(beta, hlambda)
            };
            rows.push(SweepRow { beta, hlambda, region: report.region, radius: report.spectral_radius });
        }
    }
    Ok(rows)
}
