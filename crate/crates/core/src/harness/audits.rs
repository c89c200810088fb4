//! Bound audits: every closed-form rate, bound and lower bound in scope is
//! checked as an inequality over a concrete run, with violation counts rather
//! than plots.

use crate::error::{Error, Result};
use crate::linalg;
use crate::optimizers::{
    averaged_sgd_run, cg_run, gd_step, heavy_ball_step, nesterov_dynamic_step,
    nesterov_general_schema_step, run_gd, run_heavy_ball, run_nesterov_optimal, sgd_run,
    DynamicNesterovState, EnsembleOptions, GeneralSchemaState, RunOptions, Schedule,
};
use crate::oracles::{NoiseSpec, Oracle};
use crate::problems::{complexity_floor, ChainProblem, Problem, SpectralQuadratic};
use crate::spectral;
use serde::{Deserialize, Serialize};

/// Outcome of auditing one bound: per-checkpoint `(lhs, rhs)` pairs where the
/// audited inequality is `lhs <= rhs`, plus violation statistics.
#[derive(Debug, Clone)]
pub struct BoundAudit {
    pub bound_name: String,
    pub pairs: Vec<(f64, f64)>,
    pub violations: usize,
    pub max_rel_violation: f64,
}

impl BoundAudit {
    pub fn new(name: impl Into<String>) -> Self {
        BoundAudit { bound_name: name.into(), pairs: Vec::new(), violations: 0, max_rel_violation: 0.0 }
    }

    /// Record one checkpoint of the inequality `lhs <= rhs`. Violations are
    /// counted only where `rhs` is finite.
    pub fn require_le(&mut self, lhs: f64, rhs: f64) {
        self.pairs.push((lhs, rhs));
        if rhs.is_finite() && !(lhs <= rhs) {
            self.violations += 1;
            let scale = rhs.abs().max(1e-300);
            self.max_rel_violation = self.max_rel_violation.max((lhs - rhs) / scale);
        }
    }

    pub fn n_checked(&self) -> usize {
        self.pairs.len()
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    pub fn merge(&mut self, other: BoundAudit) {
        self.pairs.extend(other.pairs);
        self.violations += other.violations;
        self.max_rel_violation = self.max_rel_violation.max(other.max_rel_violation);
    }

    pub fn report(&self, seed: u64, config_hash: &str) -> AuditReport {
        AuditReport {
            bound_name: self.bound_name.clone(),
            n_checked: self.n_checked(),
            violations: self.violations,
            max_rel_violation: self.max_rel_violation,
            seed,
            config_hash: config_hash.to_string(),
        }
    }
}

/// JSON-serializable audit summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuditReport {
    pub bound_name: String,
    pub n_checked: usize,
    pub violations: usize,
    pub max_rel_violation: f64,
    pub seed: u64,
    pub config_hash: String,
}

/// Multiplicative slack for Monte-Carlo envelopes at >= 500 replicas
/// (observed relative standard error stays under 10%, plus margin).
pub const MC_ENVELOPE: f64 = 1.2;

/// Relative slack for the finite-dimensional truncation of the strongly
/// convex lower-bound construction.
pub const TRUNCATION_SLACK: f64 = 0.05;

// ---------------------------------------------------------------------------
// Deterministic GD rates
// ---------------------------------------------------------------------------

/// Strong-convexity rate: with `α = 2/(L+μ)`,
/// `‖wₙ - w*‖ <= (1 - 2/(1+κ))ⁿ ‖w₀ - w*‖` at every step, no slack.
pub fn gd_strong_convexity_audit(kappa: f64, iters: usize, seed: u64) -> Result<BoundAudit> {
    let eigenvalues = vec![1.0, 1.0 + (kappa - 1.0) * 0.3, 1.0 + (kappa - 1.0) * 0.8, kappa];
    let d = eigenvalues.len();
    let q = SpectralQuadratic::seeded_rotation(eigenvalues, vec![0.0; d], 0.0, seed)?;
    let w0: Vec<f64> = (0..d).map(|i| q.eigenvector(i)).fold(vec![0.0; d], |acc, v| linalg::add(&acc, &v));
    let p = Problem::Quadratic(q);
    let info = p.info();
    let alpha = 2.0 / (info.lipschitz + info.strong_convexity);
    let trace = run_gd(&p, &w0, alpha, RunOptions { iters, grad_tol: 0.0 })?;

    let mut audit = BoundAudit::new(format!("gd-strong-convexity-rate kappa={kappa}"));
    let rate = 1.0 - 2.0 / (1.0 + info.condition());
    let dist0 = trace.records()[0].dist_to_min;
    for r in trace.records() {
        audit.require_le(r.dist_to_min, rate.powi(r.n as i32) * dist0);
    }
    Ok(audit)
}

/// Convex rate: with `α = 1/L` on the convex chain,
/// `L(wₙ) - L* <= 2L ‖w₀ - w*‖² / (4 + n)` at every step.
pub fn gd_convex_chain_audit(dim: usize, lipschitz: f64, iters: usize) -> Result<BoundAudit> {
    let chain = ChainProblem::new(dim, lipschitz, 0.0)?;
    let p = Problem::Chain(chain);
    let w0 = vec![0.0; dim];
    let trace = run_gd(&p, &w0, 1.0 / lipschitz, RunOptions { iters, grad_tol: 0.0 })?;
    let dist0_sq = linalg::dist2(&w0, &p.minimizer());

    let mut audit = BoundAudit::new(format!("gd-convex-rate chain d={dim}"));
    for r in trace.records() {
        audit.require_le(r.loss_gap, 2.0 * lipschitz * dist0_sq / (4.0 + r.n as f64));
    }
    Ok(audit)
}

// ---------------------------------------------------------------------------
// Complexity floors
// ---------------------------------------------------------------------------

/// Span-respecting first-order methods the lower bounds apply to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpanMethod {
    Gd,
    HeavyBall,
    NesterovOptimal,
    Cg,
}

impl SpanMethod {
    pub const ALL: [SpanMethod; 4] = [SpanMethod::Gd, SpanMethod::HeavyBall, SpanMethod::NesterovOptimal, SpanMethod::Cg];

    pub fn name(&self) -> &'static str {
        match self {
            SpanMethod::Gd => "gd",
            SpanMethod::HeavyBall => "heavy-ball",
            SpanMethod::NesterovOptimal => "nesterov-optimal",
            SpanMethod::Cg => "cg",
        }
    }
}

/// Iterates (including w0) of a span-respecting method on `p`.
fn span_iterates(p: &Problem, method: SpanMethod, w0: &[f64], steps: usize) -> Result<Vec<Vec<f64>>> {
    let info = p.info();
    let lipschitz = info.lipschitz;
    let mu = info.strong_convexity;
    let mut iterates = vec![w0.to_vec()];
    match method {
        SpanMethod::Gd => {
            let alpha = if mu > 0.0 { 2.0 / (lipschitz + mu) } else { 1.0 / lipschitz };
            let mut w = w0.to_vec();
            for _ in 0..steps {
                let g = p.gradient(&w)?;
                w = gd_step(&w, &g, alpha)?;
                iterates.push(w.clone());
            }
        }
        SpanMethod::HeavyBall => {
            let (h, beta) = if mu > 0.0 {
                let (h, beta, _) = spectral::optimal_hb(mu, lipschitz);
                (h, beta)
            } else {
                (1.0 / lipschitz, 0.9)
            };
            let mut w = w0.to_vec();
            let mut w_prev = w0.to_vec();
            for _ in 0..steps {
                let g = p.gradient(&w)?;
                let next = heavy_ball_step(&w, &w_prev, &g, h, beta)?;
                w_prev = std::mem::replace(&mut w, next);
                iterates.push(w.clone());
            }
        }
        SpanMethod::NesterovOptimal => {
            // The optimal preset: one plain GD step, then the dynamic
            // recursion from gamma_1 = 1.
            let kappa_inv = mu / lipschitz;
            let g = p.gradient(w0)?;
            let w1 = gd_step(w0, &g, 1.0 / lipschitz)?;
            iterates.push(w1.clone());
            let mut state = DynamicNesterovState { w: w1, w_prev: w0.to_vec(), gamma: 1.0, n: 1, last_beta: f64::NAN };
            for _ in 1..steps {
                nesterov_dynamic_step(&mut state, |y| p.gradient(y), lipschitz, kappa_inv)?;
                iterates.push(state.w.clone());
            }
        }
        SpanMethod::Cg => {
            let run = cg_run(p, w0, steps, 0.0)?;
            iterates = run.iterates;
        }
    }
    Ok(iterates)
}

/// Convex complexity floor on the chain with `d = 2n+1`, `w₀ = 0`:
/// at every step `k <= n`,
/// `f(wₖ) - f* >= L (2k+1) / (16 (k+1)²)` (the floor of the k-step instance,
/// whose own initial distance is `2k+1`), `‖wₖ - w*‖² >= ½ ‖w₀ - w*‖²`, and
/// all components beyond index `k` are exactly zero.
pub fn lower_bound_audit(method: SpanMethod, n: usize, lipschitz: f64) -> Result<BoundAudit> {
    let dim = 2 * n + 1;
    let p = Problem::Chain(ChainProblem::new(dim, lipschitz, 0.0)?);
    let w0 = vec![0.0; dim];
    let iterates = span_iterates(&p, method, &w0, n)?;
    let minimizer = p.minimizer();
    let dist0_sq = linalg::dist2(&w0, &minimizer);

    let mut audit = BoundAudit::new(format!("complexity-floor {} n={n}", method.name()));
    for (k, w) in iterates.iter().enumerate() {
        let gap = p.value(w)? - 0.0;
        let floor = complexity_floor(k, ((2 * k + 1) as f64).sqrt(), lipschitz)?;
        audit.require_le(floor, gap);
        // The sharp sink bound as well; CG attains it exactly, so leave room
        // for rounding at equality.
        audit.require_le(lipschitz / (8.0 * (k as f64 + 1.0)) * (1.0 - 1e-9), gap);
        audit.require_le(0.5 * dist0_sq, linalg::dist2(w, &minimizer));
        // Span property: untouched components are bit-exact zeros.
        let tail_max = w[k.min(dim)..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        audit.require_le(tail_max, 0.0);
    }
    Ok(audit)
}

/// Strongly convex complexity floor, finite-d truncation of the ℓ² chain:
/// `‖wₖ - w*‖ >= (1 - 2/(1+√κ))ᵏ ‖w₀ - w*‖ (1 - slack)` with a 5% slack.
pub fn lower_bound_audit_strongly_convex(
    method: SpanMethod,
    steps: usize,
    dim: usize,
    kappa: f64,
    lipschitz: f64,
) -> Result<BoundAudit> {
    let mu = lipschitz / kappa;
    let p = Problem::Chain(ChainProblem::new(dim, lipschitz, mu)?);
    let w0 = vec![0.0; dim];
    let iterates = span_iterates(&p, method, &w0, steps)?;
    let minimizer = p.minimizer();
    let dist0 = linalg::dist(&w0, &minimizer);
    let q = 1.0 - 2.0 / (1.0 + kappa.sqrt());

    let mut audit = BoundAudit::new(format!("complexity-floor-strongly-convex {} kappa={kappa}", method.name()));
    for (k, w) in iterates.iter().enumerate() {
        let floor = q.powi(k as i32) * dist0 * (1.0 - TRUNCATION_SLACK);
        audit.require_le(floor, linalg::dist(w, &minimizer));
    }
    Ok(audit)
}

// ---------------------------------------------------------------------------
// Momentum
// ---------------------------------------------------------------------------

/// Heavy-ball optimal tuning reaches its advertised asymptotic rate:
/// the log-linear fit over `window` is within `tol_rel` of `1 - 2/(1+√κ)`.
pub fn hb_optimal_rate_audit(kappa: f64, window: (usize, usize), tol_rel: f64, seed: u64) -> Result<BoundAudit> {
    let q = SpectralQuadratic::seeded_rotation(vec![1.0, kappa], vec![0.0, 0.0], 0.0, seed)?;
    let w0 = linalg::add(&q.eigenvector(0), &q.eigenvector(1));
    let p = Problem::Quadratic(q);
    let (h, beta, rate) = spectral::optimal_hb(1.0, kappa);
    let trace = run_heavy_ball(&p, &w0, h, beta, RunOptions { iters: window.1 + 20, grad_tol: 0.0 })?;
    let fitted = super::rate::estimate_rate(&trace, window)?;

    let mut audit = BoundAudit::new(format!("heavy-ball-optimal-rate kappa={kappa}"));
    audit.require_le((fitted - rate).abs(), tol_rel * rate);
    Ok(audit)
}

/// Optimal-momentum loss bound `L(wₙ) - L* <= 2L ‖w₀ - w*‖² / n²` on a
/// quadratic of condition `kappa`, checked at every step.
pub fn nesterov_bound_audit(kappa: f64, iters: usize, seed: u64) -> Result<BoundAudit> {
    let q = SpectralQuadratic::seeded_rotation(vec![1.0, (1.0 + kappa) / 2.0, kappa], vec![0.0; 3], 0.0, seed)?;
    let d = q.dim();
    let w0: Vec<f64> = (0..d).map(|i| q.eigenvector(i)).fold(vec![0.0; d], |acc, v| linalg::add(&acc, &v));
    let p = Problem::Quadratic(q);
    let info = p.info();
    let trace = run_nesterov_optimal(&p, &w0, info.strong_convexity / info.lipschitz, RunOptions {
        iters,
        grad_tol: 0.0,
    })?;
    let dist0_sq = linalg::dist2(&w0, &p.minimizer());

    let mut audit = BoundAudit::new(format!("nesterov-optimal-loss-bound kappa={kappa}"));
    for r in trace.records().iter().skip(1) {
        let n = r.n as f64;
        audit.require_le(r.loss_gap, 2.0 * info.lipschitz * dist0_sq / (n * n));
    }
    Ok(audit)
}

/// With `κ₀ = κ` the γ sequence is constant and `Γⁿ = (1 - 1/√κ)ⁿ` to
/// relative accuracy `1e-12`.
pub fn nesterov_gamma_fixed_point_audit(kappa: f64, iters: usize, seed: u64) -> Result<BoundAudit> {
    let q = SpectralQuadratic::seeded_rotation(vec![1.0, kappa], vec![0.0, 0.0], 0.0, seed)?;
    let w0 = vec![1.0, 1.0];
    let p = Problem::Quadratic(q);
    let kappa_inv = 1.0 / kappa;
    let trace = crate::optimizers::run_nesterov_dynamic(&p, &w0, kappa_inv, kappa_inv, RunOptions {
        iters,
        grad_tol: 0.0,
    })?;
    let gammas = trace.gamma_series();

    let mut audit = BoundAudit::new(format!("nesterov-gamma-fixed-point kappa={kappa}"));
    let per_step = 1.0 - kappa_inv.sqrt();
    let mut product = 1.0;
    for gamma in &gammas[1..] {
        product *= 1.0 - gamma;
    }
    let expected = per_step.powi(gammas.len() as i32 - 1);
    audit.require_le((product - expected).abs(), 1e-12 * expected);
    Ok(audit)
}

/// Γⁿ upper bounds from the estimating-sequence analysis. `gammas` is the run
/// sequence `[γ₁, γ₂, …]` of a schedule started at `γ₀ = √(κ₀⁻¹)`.
///
/// For `κ₀⁻¹ = κ⁻¹` the product is checked against the exact geometric form;
/// otherwise `κ₀⁻¹ ∈ (κ⁻¹, 3 + κ⁻¹]` is required and both displayed bounds
/// (the sinh form where κ⁻¹ > 0, and `4/((κ₀⁻¹-κ⁻¹)(n+1)²)`) are checked,
/// along with strict monotonicity of Γⁿ.
pub fn gamma_bound_check(gammas: &[f64], kappa0_inv: f64, kappa_inv: f64) -> Result<BoundAudit> {
    let mut audit = BoundAudit::new("nesterov-gamma-products");
    if kappa0_inv == kappa_inv {
        let per_step = 1.0 - kappa_inv.sqrt();
        let mut product = 1.0;
        for (n, gamma) in gammas.iter().enumerate() {
            product *= 1.0 - gamma;
            let expected = per_step.powi(n as i32 + 1);
            audit.require_le((product - expected).abs(), 1e-12 * expected);
        }
        return Ok(audit);
    }
    if !(kappa0_inv > kappa_inv && kappa0_inv <= 3.0 + kappa_inv) {
        return Err(Error::invalid(format!(
            "gamma bound needs kappa0_inv in (kappa_inv, 3 + kappa_inv], got {kappa0_inv} vs {kappa_inv}"
        )));
    }
    let gap = kappa0_inv - kappa_inv;
    let delta = kappa_inv.sqrt() / 2.0;
    let mut product = 1.0;
    let mut prev = 1.0;
    for (idx, gamma) in gammas.iter().enumerate() {
        let n = idx as f64 + 1.0;
        product *= 1.0 - gamma;
        audit.require_le(product, 4.0 / (gap * (n + 1.0) * (n + 1.0)));
        if kappa_inv > 0.0 {
            let sinh2 = (((n + 1.0) * delta).exp() - (-(n + 1.0) * delta).exp()).powi(2);
            audit.require_le(product, 4.0 * kappa_inv / (gap * sinh2));
        }
        // Strict monotone decrease.
        audit.require_le(product, prev * (1.0 - f64::EPSILON));
        prev = product;
    }
    Ok(audit)
}

/// The loss-gap constant `c(γ₁) = 2L (1 - γ₁(1+κ⁻¹) + γ₁²)/(γ₁² - κ⁻¹)`,
/// with `c(1) = 2L` exactly.
pub fn c_gamma(gamma1: f64, kappa_inv: f64, lipschitz: f64) -> Result<f64> {
    if gamma1 == 1.0 {
        return Ok(2.0 * lipschitz);
    }
    if !(gamma1 > kappa_inv.sqrt() && gamma1 < 1.0) {
        return Err(Error::invalid(format!("c(gamma1) needs gamma1 in (sqrt(kappa_inv), 1], got {gamma1}")));
    }
    Ok(2.0 * lipschitz * (1.0 - gamma1 * (1.0 + kappa_inv) + gamma1 * gamma1)
        / (gamma1 * gamma1 - kappa_inv))
}

/// `c(γ₁)` equals `2L` at one and is strictly decreasing on a grid.
pub fn c_gamma_audit(kappa_inv: f64, lipschitz: f64, grid: usize) -> Result<BoundAudit> {
    let mut audit = BoundAudit::new(format!("c-gamma-monotone kappa_inv={kappa_inv}"));
    audit.require_le((c_gamma(1.0, kappa_inv, lipschitz)? - 2.0 * lipschitz).abs(), 0.0);
    let lo = kappa_inv.sqrt();
    let mut prev = f64::INFINITY;
    for k in 1..=grid {
        let gamma1 = lo + (1.0 - lo) * k as f64 / (grid as f64 + 1.0);
        let value = c_gamma(gamma1, kappa_inv, lipschitz)?;
        audit.require_le(value, prev * (1.0 - f64::EPSILON));
        prev = value;
    }
    // The limit point itself continues the decrease.
    audit.require_le(2.0 * lipschitz, prev);
    Ok(audit)
}

/// General schema and dynamic momentum produce the same iterates:
/// max component difference over `steps` steps stays below `tol` on each of
/// `cases` random quadratics.
pub fn equivalence_audit(cases: usize, steps: usize, tol: f64, seed: u64) -> Result<BoundAudit> {
    let mut audit = BoundAudit::new("general-schema-vs-dynamic");
    for case in 0..cases {
        let mu = if case % 2 == 0 { 0.4 + 0.1 * case as f64 } else { 0.0 };
        let lipschitz = 4.0 + case as f64;
        let eigenvalues = vec![mu.max(0.2), (mu.max(0.2) + lipschitz) / 2.0, lipschitz];
        let q = SpectralQuadratic::seeded_rotation(eigenvalues, vec![0.5; 3], 0.0, seed + case as u64)?;
        let p = Problem::Quadratic(q);
        let info = p.info();
        let lambda0 = 0.3 + 0.25 * case as f64; // anything > 0
        let w0 = vec![2.0, -1.0, 1.5];

        let mut general = GeneralSchemaState::new(&w0, lambda0)?;
        let mut dynamic = DynamicNesterovState::new(&w0, (lambda0 / info.lipschitz).sqrt())?;
        for _ in 0..steps {
            nesterov_general_schema_step(&mut general, &p, info.lipschitz, info.strong_convexity)?;
            nesterov_dynamic_step(&mut dynamic, |y| p.gradient(y), info.lipschitz, info.strong_convexity / info.lipschitz)?;
            let diff = general
                .w
                .iter()
                .zip(&dynamic.w)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            audit.require_le(diff, tol);
        }
    }
    Ok(audit)
}

// ---------------------------------------------------------------------------
// Stochastic bounds
// ---------------------------------------------------------------------------

/// SGD with `αₙ = 1/(n+1)` on the mean-estimation oracle reproduces the
/// running sample mean at every step.
pub fn mean_estimation_audit(dim: usize, steps: usize, tol: f64, seed: u64) -> Result<BoundAudit> {
    let target: Vec<f64> = (0..dim).map(|i| (i as f64 * 0.7).sin()).collect();
    let p = Problem::Quadratic(SpectralQuadratic::diagonal(vec![1.0; dim], target.clone(), 0.0)?);
    let oracle = Oracle::MeanEstimation { target: target.clone() };
    let mut stream = crate::oracles::Stream::split(seed, 0);
    let mut w = vec![5.0; dim];
    let mut sum = vec![0.0; dim];

    let mut audit = BoundAudit::new("sgd-realizes-sample-mean");
    for n in 0..steps {
        let sample = oracle.sample(&p, &w, &mut stream)?;
        // Recover the draw X = w - (w - X) and maintain the running mean.
        let x = linalg::sub(&w, &sample.gradient);
        for (s, xi) in sum.iter_mut().zip(&x) {
            *s += xi;
        }
        let alpha = 1.0 / (n as f64 + 1.0);
        w = linalg::add_scaled(&w, -alpha, &sample.gradient);
        let mean: Vec<f64> = sum.iter().map(|s| s / (n as f64 + 1.0)).collect();
        audit.require_le(linalg::dist(&w, &mean), tol);
    }
    Ok(audit)
}

/// Full convergence-to-area inequality at every checkpoint within the MC
/// envelope:
/// `E‖Wₙ-w*‖² <= σ̃²α(L+μ)/(2Lμ) + (1-2αLμ/(L+μ))ⁿ [dist0² - σ̃²α(L+μ)/(2Lμ)]`.
pub fn area_convergence_check(
    p: &Problem,
    noise: &NoiseSpec,
    alpha: f64,
    iters: usize,
    replicas: usize,
    seed: u64,
) -> Result<BoundAudit> {
    let info = p.info();
    let (lipschitz, mu) = (info.lipschitz, info.strong_convexity);
    if !(mu > 0.0) {
        return Err(Error::invalid("area convergence needs a strongly convex problem"));
    }
    if alpha > 2.0 / (lipschitz + mu) {
        return Err(Error::invalid("area convergence needs alpha <= 2/(L+mu)"));
    }
    let sigma_tilde_sq = noise.total_second_moment(&info, p.dim());
    let area = sigma_tilde_sq * alpha * (lipschitz + mu) / (2.0 * lipschitz * mu);
    let contraction = 1.0 - 2.0 * alpha * lipschitz * mu / (lipschitz + mu);

    let w0: Vec<f64> = p.minimizer().iter().map(|m| m + 1.0).collect();
    let traces = sgd_run(
        p,
        &Oracle::Noisy { noise: noise.clone() },
        &Schedule::Constant { alpha },
        &w0,
        EnsembleOptions { iters, replicas, seed, grad_tol: 0.0 },
    )?;
    let dist0_sq = linalg::dist2(&w0, &p.minimizer());

    let mut audit = BoundAudit::new("sgd-area-convergence");
    for n in 0..=iters {
        let mc: f64 = traces.iter().map(|t| t.records()[n].dist_to_min.powi(2)).sum::<f64>() / replicas as f64;
        let rhs = area + contraction.powi(n as i32) * (dist0_sq - area);
        audit.require_le(mc, MC_ENVELOPE * rhs);
    }
    Ok(audit)
}

/// Averaging-SGD rate at the horizon:
/// `E[L(W̄_N)] - L* <= envelope · ‖w₀-w*‖ √(M²+σ²) / √N`.
pub fn averaging_audit(
    p: &Problem,
    noise: &NoiseSpec,
    w0: &[f64],
    n_steps: usize,
    m_lipschitz: f64,
    replicas: usize,
    seed: u64,
) -> Result<BoundAudit> {
    let info = p.info();
    let sigma_sq = noise.total_second_moment(&info, p.dim());
    let out = averaged_sgd_run(
        p,
        &Oracle::Noisy { noise: noise.clone() },
        w0,
        n_steps,
        m_lipschitz,
        sigma_sq.sqrt(),
        replicas,
        seed,
    )?;
    let mut audit = BoundAudit::new("sgd-averaging-rate");
    // Bounded-gradient hypothesis must actually hold along the runs.
    audit.require_le(out.max_grad_norm, m_lipschitz);
    let dist0 = linalg::dist(w0, &p.minimizer());
    let bound = dist0 * (m_lipschitz * m_lipschitz + sigma_sq).sqrt() / (n_steps as f64).sqrt();
    let mc_gap: f64 = out
        .traces
        .iter()
        .map(|t| t.last().expect("nonempty trace").loss_gap)
        .sum::<f64>()
        / replicas as f64;
    audit.require_le(mc_gap, MC_ENVELOPE * bound);
    Ok(audit)
}

/// Coupled SGD/GD distance bound: shared `w₀` and rate grid, per-replica noise
/// streams; `E‖wₙ - Wₙ‖² <= ᾱ T σ̃² exp(T(ᾱL² + 2L))` at every step.
pub fn sgd_gd_gap_check(
    p: &Problem,
    noise: &NoiseSpec,
    schedule: &Schedule,
    steps: usize,
    replicas: usize,
    seed: u64,
) -> Result<BoundAudit> {
    let info = p.info();
    let w0: Vec<f64> = p.minimizer().iter().map(|m| m + 1.0).collect();
    let rates: Vec<f64> = (0..steps).map(|n| schedule.lr(n, None)).collect::<Result<_>>()?;
    let alpha_bar = rates.iter().fold(0.0f64, |m, a| m.max(*a));
    let total_time: f64 = rates.iter().sum();
    let sigma_tilde_sq = noise.total_second_moment(&info, p.dim());
    let bound = alpha_bar
        * total_time
        * sigma_tilde_sq
        * (total_time * (alpha_bar * info.lipschitz * info.lipschitz + 2.0 * info.lipschitz)).exp();

    // Deterministic GD path on the same rate grid.
    let mut gd_path = vec![w0.clone()];
    {
        let mut w = w0.clone();
        for &alpha in &rates {
            let g = p.gradient(&w)?;
            w = gd_step(&w, &g, alpha)?;
            gd_path.push(w.clone());
        }
    }

    let mut gaps = vec![0.0f64; steps + 1];
    for r in 0..replicas {
        let mut stream = crate::oracles::Stream::split(seed, r as u64);
        let mut w = w0.clone();
        for (n, &alpha) in rates.iter().enumerate() {
            let sample = crate::oracles::sample_gradient(p, &w, noise, &mut stream)?;
            w = linalg::add_scaled(&w, -alpha, &sample.gradient);
            gaps[n + 1] += linalg::dist2(&w, &gd_path[n + 1]);
        }
    }

    let mut audit = BoundAudit::new("sgd-gd-distance");
    for gap in gaps.iter() {
        audit.require_le(gap / replicas as f64, bound);
    }
    Ok(audit)
}

/// Harmonic-schedule decay exponents: with `a >= 1/(2λ₁)` the fitted exponent
/// of `E‖Wₙ-w*‖²` is at least 0.8; with a deliberately small `a` it stays
/// below `2λ₁a + 0.2`.
pub fn diminishing_schedule_check(
    p: &Problem,
    noise: &NoiseSpec,
    a: f64,
    b: f64,
    iters: usize,
    replicas: usize,
    seed: u64,
) -> Result<BoundAudit> {
    let info = p.info();
    if b < a * info.lipschitz {
        return Err(Error::invalid("harmonic schedule needs b >= a * lambda_d"));
    }
    let w0: Vec<f64> = p.minimizer().iter().map(|m| m + 1.0).collect();
    let traces = sgd_run(
        p,
        &Oracle::Noisy { noise: noise.clone() },
        &Schedule::Harmonic { a, b },
        &w0,
        EnsembleOptions { iters, replicas, seed, grad_tol: 0.0 },
    )?;
    let series: Vec<f64> = (0..=iters)
        .map(|n| traces.iter().map(|t| t.records()[n].dist_to_min.powi(2)).sum::<f64>() / replicas as f64)
        .collect();
    let exponent = super::rate::estimate_decay_exponent(&series, (iters / 2, iters))?;

    let lambda1 = info.strong_convexity;
    let mut audit = BoundAudit::new(format!("sgd-harmonic-decay a={a}"));
    if a >= 1.0 / (2.0 * lambda1) {
        audit.require_le(0.8, exponent);
    } else {
        audit.require_le(exponent, 2.0 * lambda1 * a + 0.2);
    }
    Ok(audit)
}

/// Appendix sequence lemma for `aₙ₊₁ = (1 - q aₙ) aₙ`:
/// `|n aₙ q - 1| <= 0.01` at the horizon and `aₙ <= 1/(nq + 1/a₀)` throughout.
pub fn diminishing_contraction_audit(a0: f64, q: f64, horizon: usize) -> Result<BoundAudit> {
    if !(q > 0.0 && a0 > 0.0 && a0 < 1.0 / q) {
        return Err(Error::invalid("needs q > 0 and a0 in (0, 1/q)"));
    }
    let mut audit = BoundAudit::new(format!("diminishing-contraction q={q}"));
    let mut a = a0;
    for n in 1..=horizon {
        a = (1.0 - q * a) * a;
        audit.require_le(a, 1.0 / (n as f64 * q + 1.0 / a0));
    }
    audit.require_le((horizon as f64 * a * q - 1.0).abs(), 0.01);
    Ok(audit)
}

// ---------------------------------------------------------------------------
// Spectral
// ---------------------------------------------------------------------------

/// Region classification vs. the matrix-power oracle on the full grid, plus
/// the exact ripples radius. Cells within `band` of the stability boundary
/// are excluded (membership is discontinuous there).
pub fn spectral_grid_audit(steps: usize, power_iters: usize, band: f64) -> Result<BoundAudit> {
    let mut audit = BoundAudit::new("spectral-region-grid");
    for i in 0..steps {
        let beta = -1.2 + 2.4 * i as f64 / (steps - 1) as f64;
        for j in 0..steps {
            let hlambda = 5.0 * j as f64 / (steps - 1) as f64;
            let report = spectral::classify_region(beta, hlambda);
            if (report.spectral_radius - 1.0).abs() < band {
                continue;
            }
            let formula_stable = report.spectral_radius < 1.0;
            let oracle_norm = spectral::opnorm_power(beta, hlambda, power_iters);
            let oracle_stable = oracle_norm < 1.0;
            // Agreement check: 0 when equal, 1 when not.
            audit.require_le(if formula_stable == oracle_stable { 0.0 } else { 1.0 }, 0.0);
            if report.region == spectral::Region::Ripples {
                audit.require_le((report.spectral_radius - beta.max(0.0).sqrt()).abs(), 1e-12);
            }
        }
    }
    Ok(audit)
}

/// Schur invariants on random inputs: unitarity, triangularity and
/// reconstruction to 1e-12, plus the advertised complex-case T₁₂.
pub fn schur_audit(samples: usize, seed: u64) -> Result<BoundAudit> {
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut audit = BoundAudit::new("schur-2x2");
    for _ in 0..samples {
        let beta = rng.random::<f64>() * 2.4 - 1.2;
        let xi = rng.random::<f64>() * 6.0 - 3.0;
        let schur = spectral::schur_2x2(beta, xi);
        audit.require_le(schur.unitarity_defect(), 1e-12);
        audit.require_le(schur.t[1][0].norm(), 1e-12);
        let rec = schur.reconstruct();
        let expected = [
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(-beta, 0.0), Complex64::new(xi, 0.0)],
        ];
        let mut defect = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                defect = defect.max((rec[r][c] - expected[r][c]).norm());
            }
        }
        audit.require_le(defect, 1e-12);
        if xi * xi < 4.0 * beta {
            let disc = Complex64::new(xi * xi - 4.0 * beta, 0.0).sqrt();
            let r1 = (Complex64::new(xi, 0.0) + disc) / 2.0;
            let t12 = -(Complex64::new(1.0, 0.0) + r1.conj() * r1.conj());
            audit.require_le((schur.t[0][1] - t12).norm(), 1e-12);
        }
    }
    Ok(audit)
}

/// Operator-norm power bound `‖Rⁿ‖ <= (2n+1)ρⁿ⁻¹` at complex-regime points.
pub fn power_bound_audit(max_n: usize, seed: u64) -> Result<BoundAudit> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut audit = BoundAudit::new("operator-norm-power-bound");
    for _ in 0..10 {
        let beta = 0.3 + rng.random::<f64>() * 0.65;
        let sqrt_beta = beta.sqrt();
        let lo = (1.0 - sqrt_beta) * (1.0 - sqrt_beta);
        let hi = (1.0 + sqrt_beta) * (1.0 + sqrt_beta);
        let hlambda = lo + (hi - lo) * (0.05 + 0.9 * rng.random::<f64>());
        let rho = sqrt_beta;
        for n in 1..=max_n {
            let (bound, actual) = spectral::norm_power_bound(beta, hlambda, n)?;
            audit.require_le(actual, bound);
            audit.require_le(bound, (2.0 * n as f64 + 1.0) * rho.powi(n as i32 - 1) * (1.0 + 1e-12));
        }
    }
    Ok(audit)
}

// ---------------------------------------------------------------------------
// CG / secant / backtracking
// ---------------------------------------------------------------------------

/// CG terminates and produces H-conjugate directions.
pub fn cg_audit(seed: u64) -> Result<BoundAudit> {
    let mut audit = BoundAudit::new("conjugate-gradient");
    // d = 20 SPD quadratic: gradient below 1e-8 within 20 iterations.
    let eigs: Vec<f64> = (1..=20).map(|i| 0.4 + 0.35 * i as f64).collect();
    let q = SpectralQuadratic::seeded_rotation(eigs, vec![0.0; 20], 0.0, seed)?;
    let p = Problem::Quadratic(q);
    let run = cg_run(&p, &vec![1.0; 20], 20, 1e-8)?;
    audit.require_le(run.trace.last().expect("trace nonempty").grad_norm, 1e-8);
    audit.require_le(run.trace.iterations() as f64, 20.0);
    let h_norms: Vec<f64> = run
        .directions
        .iter()
        .map(|d| linalg::dot(d, &p.hvp(d).expect("dims agree")).sqrt())
        .collect();
    for i in 0..run.directions.len() {
        for j in 0..i {
            let cross = linalg::dot(&run.directions[i], &p.hvp(&run.directions[j])?);
            audit.require_le(cross.abs() / (h_norms[i] * h_norms[j]), 1e-8);
        }
    }
    // d = 2 in two steps.
    let q2 = SpectralQuadratic::seeded_rotation(vec![1.0, 7.0], vec![0.0, 0.0], 0.0, seed + 1)?;
    let p2 = Problem::Quadratic(q2);
    let run2 = cg_run(&p2, &[2.0, -3.0], 5, 1e-10)?;
    audit.require_le(run2.trace.iterations() as f64, 2.0);
    audit.require_le(run2.trace.last().expect("trace nonempty").grad_norm, 1e-10);
    Ok(audit)
}

/// BFGS secant residuals, positive definiteness and dense/limited-memory
/// agreement.
pub fn secant_audit(updates: usize, seed: u64) -> Result<BoundAudit> {
    use crate::linalg::Matrix;
    use crate::optimizers::{bfgs_inverse_update, lbfgs_apply};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let d = 6;
    let model = {
        let a = Matrix::from_fn(d, d, |_, _| rng.random::<f64>() - 0.5);
        let mut spd = a.matmul(&a.transpose());
        for i in 0..d {
            spd[(i, i)] += 1.0;
        }
        spd
    };

    let mut audit = BoundAudit::new("bfgs-secant");
    let mut dense = Matrix::identity(d);
    let mut memory: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for _ in 0..updates {
        let dw: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let dg = model.matvec(&dw);
        dense = bfgs_inverse_update(&dense, &dw, &dg)?;
        memory.push((dw.clone(), dg.clone()));

        // Secant equation residual per update.
        let residual = linalg::dist(&dense.matvec(&dg), &dw) / linalg::norm(&dw);
        audit.require_le(residual, 1e-12);

        // Positive definiteness on 100 random probes.
        for _ in 0..100 {
            let z: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
            let quad = linalg::dot(&z, &dense.matvec(&z));
            audit.require_le(f64::MIN_POSITIVE, quad);
        }
    }
    // Full-memory two-loop equals the dense recursion.
    for _ in 0..10 {
        let v: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let rel = linalg::dist(&lbfgs_apply(&memory, &v), &dense.matvec(&v)) / linalg::norm(&v);
        audit.require_le(rel, 1e-10);
    }
    Ok(audit)
}

/// Backtracking never exceeds the iteration bound on L-smooth quadratics, and
/// the 1-d quartering case lands on α = 1/4 in 3 tests.
pub fn backtracking_audit(cases: usize, seed: u64) -> Result<BoundAudit> {
    use crate::linesearch::{armijo_search, armijo_test_bound};
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(seed);
    let mut audit = BoundAudit::new("armijo-backtracking");

    for _ in 0..cases {
        let d = 4;
        // Declared smoothness L with actual curvature at most L/2.5, which
        // guarantees acceptance at least one delta-step before the worst case.
        let lipschitz = 1.0 + rng.random::<f64>() * 9.0;
        let mut eigs: Vec<f64> = (0..d).map(|_| (0.1 + rng.random::<f64>() * 0.9) * lipschitz / 2.5).collect();
        eigs.sort_by(f64::total_cmp);
        let q = SpectralQuadratic::diagonal(eigs, vec![0.0; d], 0.0)?;
        let w: Vec<f64> = (0..d).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect();
        let (_, g) = q.eval(&w)?;
        if linalg::norm(&g) < 1e-9 {
            continue;
        }
        let alpha0 = (4.0 + rng.random::<f64>() * 60.0) / lipschitz;
        let delta = 0.5;
        let result = armijo_search(|x| q.eval(x).expect("dims agree").0, &w, &g, alpha0, delta, 256)?;
        let bound = armijo_test_bound(lipschitz, 1.0 / alpha0, delta);
        audit.require_le(result.tests as f64, bound as f64);
        // The accepted step satisfies the written inequality.
        let f_w = q.eval(&w)?.0;
        audit.require_le(result.f_new, f_w - 0.5 * result.alpha * linalg::norm2(&g));
    }

    // Pinned 1-d case: lambda = 4, alpha0 = 1, delta = 0.5.
    let f = |w: &[f64]| 0.5 * 4.0 * w[0] * w[0];
    let result = armijo_search(f, &[1.0], &[4.0], 1.0, 0.5, 64)?;
    audit.require_le((result.alpha - 0.25).abs(), 0.0);
    audit.require_le((result.tests as f64 - 3.0).abs(), 0.0);
    Ok(audit)
}
