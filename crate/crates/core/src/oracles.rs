//! Stochastic first-order oracles.
//!
//! Every oracle is immutable configuration plus an explicit [`Stream`]
//! argument. Streams are ChaCha20 counter-mode generators: the same seed
//! always reproduces the same draw sequence bit for bit, and
//! [`Stream::split`] hands out independent sub-streams (distinct ChaCha
//! stream ids under one seed), which is what the replica harness uses.

use crate::error::{Error, Result};
use crate::linalg;
use crate::problems::{ObjectiveInfo, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Seeded, splittable random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha20Rng,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    /// Independent sub-stream `index` of the generator seeded with `seed`.
    pub fn split(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Stream { rng }
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn normal_vec(&mut self, d: usize) -> Vec<f64> {
        (0..d).map(|_| self.standard_normal()).collect()
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Opaque position marker of the underlying counter.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }
}

/// Gradient noise configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    None,
    IsotropicGaussian,
    EigenspaceGaussian,
}

/// How `sigma` is interpreted.
///
/// `Raw` pins the noise second moment directly: `E‖ξ‖² = σ̃²` for isotropic
/// noise and `E⟨ξ, vᵢ⟩² = σ̃²` per eigen-direction for eigenspace noise.
/// `Scaled` is the scale-invariant convention used by the stochastic rate
/// theorems: the same moments are set to `σ² λ₁ λ_d`, so that rescaling the
/// loss rescales the noise along with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceConvention {
    Raw,
    Scaled,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub sigma: f64,
    /// Optional per-eigenspace multipliers (eigenspace noise only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_eigenspace: Option<Vec<f64>>,
    pub convention: VarianceConvention,
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec { kind: NoiseKind::None, sigma: 0.0, per_eigenspace: None, convention: VarianceConvention::Raw }
    }

    pub fn isotropic(sigma: f64, convention: VarianceConvention) -> Self {
        NoiseSpec { kind: NoiseKind::IsotropicGaussian, sigma, per_eigenspace: None, convention }
    }

    pub fn eigenspace(sigma: f64, convention: VarianceConvention) -> Self {
        NoiseSpec { kind: NoiseKind::EigenspaceGaussian, sigma, per_eigenspace: None, convention }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma < 0.0 || !self.sigma.is_finite() {
            return Err(Error::invalid("noise sigma must be finite and >= 0"));
        }
        if let Some(scales) = &self.per_eigenspace {
            if scales.iter().any(|s| *s < 0.0 || !s.is_finite()) {
                return Err(Error::invalid("per-eigenspace scales must be finite and >= 0"));
            }
        }
        Ok(())
    }

    fn base_variance(&self, info: &ObjectiveInfo) -> f64 {
        let s2 = self.sigma * self.sigma;
        match self.convention {
            VarianceConvention::Raw => s2,
            VarianceConvention::Scaled => s2 * info.strong_convexity * info.lipschitz,
        }
    }

    /// Exact `E‖ξ‖²` of the configured noise.
    pub fn total_second_moment(&self, info: &ObjectiveInfo, dim: usize) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::IsotropicGaussian => self.base_variance(info),
            NoiseKind::EigenspaceGaussian => {
                let base = self.base_variance(info);
                match &self.per_eigenspace {
                    Some(scales) => scales.iter().map(|s| base * s * s).sum(),
                    None => base * dim as f64,
                }
            }
        }
    }

    /// Exact `E‖ξ‖²_{V,∞}` (max over eigen-directions of second moments).
    pub fn v_infinity_second_moment(&self, info: &ObjectiveInfo, dim: usize) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::IsotropicGaussian => self.base_variance(info) / dim as f64,
            NoiseKind::EigenspaceGaussian => {
                let base = self.base_variance(info);
                match &self.per_eigenspace {
                    Some(scales) => scales.iter().map(|s| base * s * s).fold(0.0, f64::max),
                    None => base,
                }
            }
        }
    }

    fn draw(&self, p: &Problem, stream: &mut Stream) -> Result<Vec<f64>> {
        self.validate()?;
        let d = p.dim();
        let info = p.info();
        match self.kind {
            NoiseKind::None => Ok(vec![0.0; d]),
            NoiseKind::IsotropicGaussian => {
                let per_coord = (self.base_variance(&info) / d as f64).sqrt();
                Ok((0..d).map(|_| per_coord * stream.standard_normal()).collect())
            }
            NoiseKind::EigenspaceGaussian => {
                let q = match p {
                    Problem::Quadratic(q) => q,
                    Problem::Chain(_) => {
                        return Err(Error::invalid(
                            "eigenspace noise needs a problem with an explicit eigenbasis",
                        ))
                    }
                };
                let base = self.base_variance(&info).sqrt();
                let coords: Vec<f64> = (0..d)
                    .map(|i| {
                        let scale = self.per_eigenspace.as_ref().map_or(1.0, |s| s[i]);
                        base * scale * stream.standard_normal()
                    })
                    .collect();
                Ok(match q.rotation() {
                    Some(v) => v.matvec(&coords),
                    None => coords,
                })
            }
        }
    }
}

/// One stochastic gradient draw.
#[derive(Debug, Clone)]
pub struct GradientSample {
    pub gradient: Vec<f64>,
    pub batch_size: usize,
    pub rng_position: u128,
}

/// Unbiased gradient sample `∇L(w) + ξ`.
pub fn sample_gradient(p: &Problem, w: &[f64], noise: &NoiseSpec, stream: &mut Stream) -> Result<GradientSample> {
    let mut g = p.gradient(w)?;
    let xi = noise.draw(p, stream)?;
    for (gi, ni) in g.iter_mut().zip(&xi) {
        *gi += ni;
    }
    if !linalg::all_finite(&g) {
        return Err(Error::NonFinite("gradient sample"));
    }
    Ok(GradientSample { gradient: g, batch_size: 1, rng_position: stream.position() })
}

/// Mean-estimation oracle: returns `w - X` with `X ~ N(target, I)`.
///
/// This is the stochastic gradient of `1/2 E‖w - X‖²`, whose deterministic part
/// is the identity-Hessian quadratic centered at `target`.
pub fn mean_estimation_oracle(stream: &mut Stream, w: &[f64], target: &[f64]) -> Result<GradientSample> {
    if w.len() != target.len() {
        return Err(Error::DimensionMismatch { expected: target.len(), got: w.len() });
    }
    let x: Vec<f64> = target.iter().map(|t| t + stream.standard_normal()).collect();
    let gradient = linalg::sub(w, &x);
    Ok(GradientSample { gradient, batch_size: 1, rng_position: stream.position() })
}

/// Average of `m` independent draws; the mean is unchanged and each
/// coordinate variance shrinks by `1/m`.
pub fn batch_gradient(
    p: &Problem,
    w: &[f64],
    m: usize,
    noise: &NoiseSpec,
    stream: &mut Stream,
) -> Result<GradientSample> {
    if m < 1 {
        return Err(Error::invalid("batch size must be >= 1"));
    }
    let mut acc = vec![0.0; p.dim()];
    for _ in 0..m {
        let sample = sample_gradient(p, w, noise, stream)?;
        for (a, g) in acc.iter_mut().zip(&sample.gradient) {
            *a += g;
        }
    }
    let inv = 1.0 / m as f64;
    for a in acc.iter_mut() {
        *a *= inv;
    }
    Ok(GradientSample { gradient: acc, batch_size: m, rng_position: stream.position() })
}

/// Coordinate-descent filter: samples index `i ~ dist` and returns
/// `⟨∇L(w), eᵢ⟩ eᵢ / P(I = i)`, which equals `∇L(w)` in expectation.
pub fn coordinate_filter_gradient(
    p: &Problem,
    w: &[f64],
    dist: &[f64],
    stream: &mut Stream,
) -> Result<GradientSample> {
    let d = p.dim();
    if dist.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: dist.len() });
    }
    if dist.iter().any(|p| *p <= 0.0) {
        return Err(Error::invalid("coordinate distribution has a zero-probability coordinate"));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::invalid(format!("coordinate distribution sums to {total}, not 1")));
    }
    let g = p.gradient(w)?;
    let u = stream.uniform();
    let mut acc = 0.0;
    let mut index = d - 1;
    for (i, pi) in dist.iter().enumerate() {
        acc += pi;
        if u < acc {
            index = i;
            break;
        }
    }
    let mut out = vec![0.0; d];
    out[index] = g[index] / dist[index];
    Ok(GradientSample { gradient: out, batch_size: 1, rng_position: stream.position() })
}

/// Oracle configuration the harness dispatches on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Oracle {
    /// Exact gradients.
    Deterministic,
    /// Exact gradient plus configured noise.
    Noisy { noise: NoiseSpec },
    /// `w - X` with `X ~ N(target, I)`; pair with the matching identity-Hessian quadratic.
    MeanEstimation { target: Vec<f64> },
    /// Batch average of noisy draws.
    Batch { noise: NoiseSpec, batch: usize },
    /// Random coordinate filter.
    CoordinateFilter { dist: Vec<f64> },
}

impl Oracle {
    pub fn sample(&self, p: &Problem, w: &[f64], stream: &mut Stream) -> Result<GradientSample> {
        match self {
            Oracle::Deterministic => Ok(GradientSample {
                gradient: p.gradient(w)?,
                batch_size: 1,
                rng_position: stream.position(),
            }),
            Oracle::Noisy { noise } => sample_gradient(p, w, noise, stream),
            Oracle::MeanEstimation { target } => mean_estimation_oracle(stream, w, target),
            Oracle::Batch { noise, batch } => batch_gradient(p, w, *batch, noise, stream),
            Oracle::CoordinateFilter { dist } => coordinate_filter_gradient(p, w, dist, stream),
        }
    }

    /// Exact `E‖ξ‖²` of the noise this oracle adds on `p`, when known.
    pub fn noise_second_moment(&self, p: &Problem) -> Option<f64> {
        let info = p.info();
        match self {
            Oracle::Deterministic => Some(0.0),
            Oracle::Noisy { noise } => Some(noise.total_second_moment(&info, p.dim())),
            Oracle::MeanEstimation { target } => Some(target.len() as f64),
            Oracle::Batch { noise, batch } => {
                Some(noise.total_second_moment(&info, p.dim()) / *batch as f64)
            }
            Oracle::CoordinateFilter { .. } => None,
        }
    }
}
