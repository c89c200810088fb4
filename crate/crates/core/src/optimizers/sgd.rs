//! SGD ensemble runner and weight averaging.
//!
//! Replicas advance in lockstep: schedules that consume the expected squared
//! distance to the minimizer receive the across-replica mean (exact distances,
//! synthetic problems) recomputed at every step. Each replica draws from its
//! own split stream, so runs are reproducible and replica order never matters.

use crate::error::{Error, Result};
use crate::linalg;
use crate::optimizers::schedules::{EnsembleStat, Schedule};
use crate::optimizers::steps::DEFAULT_GRAD_TOL;
use crate::optimizers::trace::Trace;
use crate::oracles::{Oracle, Stream};
use crate::problems::Problem;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct EnsembleOptions {
    pub iters: usize,
    pub replicas: usize,
    pub seed: u64,
    pub grad_tol: f64,
}

impl EnsembleOptions {
    pub fn new(iters: usize, replicas: usize, seed: u64) -> Self {
        EnsembleOptions { iters, replicas, seed, grad_tol: DEFAULT_GRAD_TOL }
    }
}

struct Replica {
    w: Vec<f64>,
    stream: Stream,
    trace: Trace,
    grad_norm: f64,
}

fn ensemble_stat(p: &Problem, replicas: &[Replica], stat: EnsembleStat) -> Result<Option<f64>> {
    match stat {
        EnsembleStat::None => Ok(None),
        EnsembleStat::MeanDist2 => {
            let minimizer = p.minimizer();
            let mean = replicas
                .iter()
                .map(|r| linalg::dist2(&r.w, &minimizer))
                .sum::<f64>()
                / replicas.len() as f64;
            Ok(Some(mean))
        }
        EnsembleStat::VInfinityDist2 => {
            let d = p.dim();
            let mut moments = vec![0.0; d];
            for r in replicas {
                let coords = p
                    .eigen_coords(&r.w)
                    .ok_or_else(|| Error::invalid("V-infinity schedule needs a problem with an eigenbasis"))?;
                for (m, c) in moments.iter_mut().zip(&coords) {
                    *m += c * c;
                }
            }
            let n = replicas.len() as f64;
            Ok(Some(moments.iter().map(|m| m / n).fold(0.0, f64::max)))
        }
    }
}

/// Run SGD across `replicas` coupled only through the schedule's ensemble
/// statistic. Returns one trace per replica, in replica order.
pub fn sgd_run(
    p: &Problem,
    oracle: &Oracle,
    schedule: &Schedule,
    w0: &[f64],
    opts: EnsembleOptions,
) -> Result<Vec<Trace>> {
    if opts.replicas < 1 {
        return Err(Error::invalid("need at least one replica"));
    }
    if schedule.needs_ensemble() != EnsembleStat::None && opts.replicas < 2 {
        return Err(Error::MissingEnsemble(schedule.name()));
    }
    if w0.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: w0.len() });
    }

    let mut replicas: Vec<Replica> = (0..opts.replicas)
        .map(|r| {
            let mut trace = Trace::new();
            trace.observe(p, w0, f64::NAN, f64::NAN, f64::NAN);
            Replica {
                w: w0.to_vec(),
                stream: Stream::split(opts.seed, r as u64),
                trace,
                grad_norm: f64::INFINITY,
            }
        })
        .collect();

    // Halving levels never decrease within a run (hysteresis against MC noise
    // in the ensemble estimate).
    let mut halving_floor: u32 = 0;
    let stat_kind = schedule.needs_ensemble();

    for n in 0..opts.iters {
        let stat = ensemble_stat(p, &replicas, stat_kind)?;
        let alpha = match schedule {
            Schedule::PiecewiseHalving { sigma2, lipschitz, mu } => {
                let level = Schedule::halving_level(*sigma2, stat.unwrap()).max(halving_floor);
                halving_floor = level;
                2f64.powi(-(level as i32)) / (lipschitz + mu)
            }
            _ => schedule.lr(n, stat)?,
        };

        let step = |r: &mut Replica| -> Result<()> {
            let sample = oracle.sample(p, &r.w, &mut r.stream)?;
            r.w = linalg::add_scaled(&r.w, -alpha, &sample.gradient);
            if !linalg::all_finite(&r.w) {
                return Err(Error::NonFinite("sgd iterate"));
            }
            r.trace.observe(p, &r.w, alpha, f64::NAN, f64::NAN);
            r.grad_norm = r.trace.last().map(|rec| rec.grad_norm).unwrap_or(f64::INFINITY);
            Ok(())
        };
        if replicas.len() > 1 {
            replicas.par_iter_mut().try_for_each(step)?;
        } else {
            replicas.iter_mut().try_for_each(step)?;
        }

        if replicas.iter().all(|r| r.grad_norm <= opts.grad_tol) {
            break;
        }
    }

    Ok(replicas.into_iter().map(|r| r.trace).collect())
}

/// Result of an averaging run.
#[derive(Debug, Clone)]
pub struct AveragedSgd {
    /// Per-replica traces of the *running average* `W̄ₙ`.
    pub traces: Vec<Trace>,
    /// The constant rate `α* = ‖w₀ - w*‖ / (√(M² + σ²) √N)`.
    pub alpha: f64,
    /// Largest exact gradient norm seen along any replica's iterates, for
    /// checking the bounded-gradient hypothesis `‖∇L‖ <= M`.
    pub max_grad_norm: f64,
}

/// Averaging SGD: run `n_steps` at the constant optimal rate and log the
/// running average `W̄ₖ = (W₀ + … + W_{k-1})/k`.
///
/// `m_lipschitz` is the Lipschitz constant of the loss itself (gradient-norm
/// bound M); `sigma` the raw noise level with `E‖ξ‖² <= σ²`.
pub fn averaged_sgd_run(
    p: &Problem,
    oracle: &Oracle,
    w0: &[f64],
    n_steps: usize,
    m_lipschitz: f64,
    sigma: f64,
    replicas: usize,
    seed: u64,
) -> Result<AveragedSgd> {
    if n_steps < 1 {
        return Err(Error::invalid("averaging run needs N >= 1"));
    }
    if replicas < 1 {
        return Err(Error::invalid("need at least one replica"));
    }
    let minimizer = p.minimizer();
    let dist0 = linalg::dist(w0, &minimizer);
    let alpha = dist0 / ((m_lipschitz * m_lipschitz + sigma * sigma).sqrt() * (n_steps as f64).sqrt());

    let run_one = |r: usize| -> Result<(Trace, f64)> {
        let mut stream = Stream::split(seed, r as u64);
        let mut w = w0.to_vec();
        let mut sum = vec![0.0; w.len()];
        let mut trace = Trace::new();
        trace.observe(p, &w, f64::NAN, f64::NAN, f64::NAN);
        let mut max_grad: f64 = 0.0;
        for k in 0..n_steps {
            for (s, wi) in sum.iter_mut().zip(&w) {
                *s += wi;
            }
            let avg: Vec<f64> = sum.iter().map(|s| s / (k as f64 + 1.0)).collect();
            trace.observe(p, &avg, alpha, f64::NAN, f64::NAN);
            max_grad = max_grad.max(linalg::norm(&p.gradient(&w)?));
            let sample = oracle.sample(p, &w, &mut stream)?;
            w = linalg::add_scaled(&w, -alpha, &sample.gradient);
        }
        Ok((trace, max_grad))
    };

    let results: Vec<(Trace, f64)> = if replicas > 1 {
        (0..replicas).into_par_iter().map(run_one).collect::<Result<_>>()?
    } else {
        (0..replicas).map(run_one).collect::<Result<_>>()?
    };

    let max_grad_norm = results.iter().map(|(_, m)| *m).fold(0.0, f64::max);
    Ok(AveragedSgd { traces: results.into_iter().map(|(t, _)| t).collect(), alpha, max_grad_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimizers::steps::{run_gd, RunOptions};
    use crate::problems::SpectralQuadratic;

    fn identity_quadratic(d: usize, center: Vec<f64>) -> Problem {
        Problem::Quadratic(SpectralQuadratic::diagonal(vec![1.0; d], center, 0.0).unwrap())
    }

    #[test]
    fn harmonic_sgd_realizes_the_sample_mean() {
        let d = 4;
        let target = vec![0.5, -1.0, 2.0, 0.0];
        let p = identity_quadratic(d, target.clone());
        let oracle = Oracle::MeanEstimation { target: target.clone() };
        let schedule = Schedule::Harmonic { a: 1.0, b: 1.0 };
        let seed = 99;
        let steps = 2000;
        let traces = sgd_run(&p, &oracle, &schedule, &[10.0, 10.0, 10.0, 10.0], EnsembleOptions {
            iters: steps,
            replicas: 1,
            seed,
            grad_tol: 0.0,
        })
        .unwrap();
        assert_eq!(traces[0].len(), steps + 1);

        // Replay the same stream to recover the X draws and their running mean.
        let mut stream = Stream::split(seed, 0);
        let mut sum = vec![0.0; d];
        let mut w = vec![10.0; d];
        for n in 0..steps {
            let x: Vec<f64> = target.iter().map(|t| t + stream.standard_normal()).collect();
            for (s, xi) in sum.iter_mut().zip(&x) {
                *s += xi;
            }
            // advance the reference SGD exactly as the runner does
            let g = linalg::sub(&w, &x);
            w = linalg::add_scaled(&w, -1.0 / (n as f64 + 1.0), &g);
            let mean: Vec<f64> = sum.iter().map(|s| s / (n as f64 + 1.0)).collect();
            assert!(linalg::dist(&w, &mean) <= 1e-12, "diverged from mean at step {n}");
        }
        // The final trace row must agree with the recomputed iterate.
        let final_dist = linalg::dist(&w, &p.minimizer());
        assert!((traces[0].last().unwrap().dist_to_min - final_dist).abs() <= 1e-12);
    }

    #[test]
    fn zero_noise_constant_schedule_reproduces_gd() {
        let p = Problem::Quadratic(
            SpectralQuadratic::seeded_rotation(vec![1.0, 2.0, 4.0], vec![0.0; 3], 0.0, 31).unwrap(),
        );
        let alpha = 0.3;
        let w0 = vec![1.0, -1.0, 2.0];
        let sgd = sgd_run(
            &p,
            &Oracle::Deterministic,
            &Schedule::Constant { alpha },
            &w0,
            EnsembleOptions::new(100, 1, 1),
        )
        .unwrap();
        let gd = run_gd(&p, &w0, alpha, RunOptions::new(100)).unwrap();
        assert_eq!(sgd[0].len(), gd.len());
        for (a, b) in sgd[0].records().iter().zip(gd.records()) {
            assert_eq!(a.dist_to_min, b.dist_to_min);
            assert_eq!(a.loss_gap, b.loss_gap);
        }
    }

    #[test]
    fn runs_are_deterministic_given_a_seed() {
        let p = identity_quadratic(3, vec![0.0; 3]);
        let oracle = Oracle::Noisy {
            noise: crate::oracles::NoiseSpec::isotropic(0.5, crate::oracles::VarianceConvention::Raw),
        };
        let schedule = Schedule::Harmonic { a: 0.5, b: 2.0 };
        let opts = EnsembleOptions::new(200, 3, 7);
        let a = sgd_run(&p, &oracle, &schedule, &[1.0, 1.0, 1.0], opts).unwrap();
        let b = sgd_run(&p, &oracle, &schedule, &[1.0, 1.0, 1.0], opts).unwrap();
        for (ta, tb) in a.iter().zip(&b) {
            for (ra, rb) in ta.records().iter().zip(tb.records()) {
                assert_eq!(ra.dist_to_min, rb.dist_to_min);
            }
        }
    }

    #[test]
    fn ensemble_schedule_demands_replicas() {
        let p = identity_quadratic(2, vec![0.0; 2]);
        let schedule = Schedule::OptimalStronglyConvex { sigma2: 1.0, lipschitz: 1.0, mu: 1.0 };
        let err = sgd_run(&p, &Oracle::Deterministic, &schedule, &[1.0, 1.0], EnsembleOptions::new(10, 1, 0));
        assert!(matches!(err, Err(Error::MissingEnsemble(_))));
    }

    #[test]
    fn averaging_single_step_returns_the_start() {
        let p = identity_quadratic(2, vec![1.0, 1.0]);
        let out = averaged_sgd_run(&p, &Oracle::Deterministic, &[3.0, 3.0], 1, 4.0, 0.0, 1, 5).unwrap();
        let trace = &out.traces[0];
        assert_eq!(trace.len(), 2);
        // W̄₁ = W₀ = w₀
        assert_eq!(trace.records()[1].dist_to_min, trace.records()[0].dist_to_min);
    }

    #[test]
    fn averaging_beats_the_mean_of_losses_under_convexity() {
        let p = Problem::Quadratic(
            SpectralQuadratic::seeded_rotation(vec![0.5, 2.0], vec![0.0, 0.0], 0.0, 37).unwrap(),
        );
        let n = 50;
        let out = averaged_sgd_run(&p, &Oracle::Deterministic, &[4.0, -2.0], n, 10.0, 0.0, 1, 5).unwrap();
        // Replay the plain iterates to compute the mean of losses.
        let alpha = out.alpha;
        let mut w = vec![4.0, -2.0];
        let mut mean_loss = 0.0;
        for _ in 0..n {
            mean_loss += p.value(&w).unwrap();
            let g = p.gradient(&w).unwrap();
            w = linalg::add_scaled(&w, -alpha, &g);
        }
        mean_loss /= n as f64;
        let avg_loss = out.traces[0].last().unwrap().loss_gap;
        assert!(avg_loss <= mean_loss + 1e-12);
    }
}
