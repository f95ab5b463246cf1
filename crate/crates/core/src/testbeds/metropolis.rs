//! Adaptive random-walk Metropolis sampler for the analytic testbed problems.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::evidence::WeightedSampleSet;
use crate::parallel::par_map_range;
use crate::rng::RngHandle;
use crate::testbeds::{attach_weights, ProblemSpec};

#[derive(Debug, Clone)]
pub struct McmcConfig {
    pub chains: usize,
    pub steps: usize,
    pub burn_in: usize,
    /// Target acceptance rate for step-size adaptation.
    pub target_accept: f64,
    /// Steps between adaptation updates during burn-in.
    pub adapt_window: usize,
    /// Keep every `thinning`-th post-burn-in state.
    pub thinning: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            chains: 4,
            steps: 20_000,
            burn_in: 5_000,
            target_accept: 0.234,
            adapt_window: 100,
            thinning: 5,
        }
    }
}

impl McmcConfig {
    fn validate(&self) -> Result<()> {
        if self.chains == 0 || self.steps == 0 || self.thinning == 0 || self.adapt_window == 0 {
            return Err(Error::invalid("McmcConfig fields must be positive"));
        }
        if self.burn_in >= self.steps {
            return Err(Error::invalid("burn_in must be < steps"));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(Error::invalid("target_accept must be in (0, 1)"));
        }
        Ok(())
    }
}

/// Map a point into the sampling space (logs for positive scale dims) and
/// back. The Jacobian term makes the transformed chain target the natural-
/// space posterior.
pub(super) fn to_sampling(problem: &ProblemSpec, x: &[f64]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .map(|(d, &v)| {
            if problem.log_scale_dims.contains(&d) {
                v.max(1e-300).ln()
            } else {
                v
            }
        })
        .collect()
}

pub(super) fn to_native(problem: &ProblemSpec, u: &[f64]) -> Vec<f64> {
    u.iter()
        .enumerate()
        .map(|(d, &v)| {
            if problem.log_scale_dims.contains(&d) {
                v.exp()
            } else {
                v
            }
        })
        .collect()
}

/// log target in sampling coordinates: posterior density times the Jacobian
/// Π exp(uₐ) of the log transforms.
fn log_target(problem: &ProblemSpec, u: &[f64]) -> f64 {
    let x = to_native(problem, u);
    if !problem.in_bounds(&x) {
        return f64::NEG_INFINITY;
    }
    let base = problem.log_unnorm(&x);
    if base == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    base + problem
        .log_scale_dims
        .iter()
        .map(|&d| u[d])
        .sum::<f64>()
}

struct ChainOutput {
    points: Vec<Vec<f64>>,
    acceptance: f64,
}

fn run_chain(problem: &ProblemSpec, config: &McmcConfig, rng: &RngHandle) -> Result<ChainOutput> {
    let mut r = rng.rng();
    let dim = problem.dim;

    let mut start = None;
    for _ in 0..1000 {
        let x = (problem.prior_sampler)(&mut r);
        if log_target(problem, &to_sampling(problem, &x)).is_finite() {
            start = Some(to_sampling(problem, &x));
            break;
        }
    }
    let mut u = start.ok_or_else(|| {
        Error::pipeline("mcmc", "could not find a finite-posterior starting point")
    })?;
    let mut log_p = log_target(problem, &u);

    // Per-dimension proposal sds: global log step adapted toward the target
    // acceptance, shape from a running variance estimate of the chain.
    let mut log_step = (2.38 / (dim as f64).sqrt()).ln();
    let mut run_mean = u.clone();
    let mut run_m2 = vec![1.0; dim];
    let mut seen = 1.0f64;
    let mut window_accepts = 0usize;
    let mut adapt_rounds = 0usize;

    let mut post_accepts = 0usize;
    let mut post_steps = 0usize;
    let mut points = Vec::new();

    for step in 0..config.steps {
        let adapting = step < config.burn_in;
        let scale = log_step.exp();
        let proposal: Vec<f64> = (0..dim)
            .map(|d| {
                let sd = (run_m2[d] / seen).sqrt().max(1e-8);
                u[d] + scale * sd * r.sample::<f64, _>(StandardNormal)
            })
            .collect();
        let log_p_new = log_target(problem, &proposal);
        let accept = log_p_new - log_p >= 0.0 || r.random::<f64>().ln() < log_p_new - log_p;
        if accept {
            u = proposal;
            log_p = log_p_new;
        }

        if adapting {
            window_accepts += usize::from(accept);
            seen += 1.0;
            for d in 0..dim {
                let delta = u[d] - run_mean[d];
                run_mean[d] += delta / seen;
                run_m2[d] += delta * (u[d] - run_mean[d]);
            }
            if (step + 1) % config.adapt_window == 0 {
                adapt_rounds += 1;
                let rate = window_accepts as f64 / config.adapt_window as f64;
                log_step += (rate - config.target_accept) / (adapt_rounds as f64).sqrt();
                window_accepts = 0;
            }
        } else {
            post_accepts += usize::from(accept);
            post_steps += 1;
            if (step - config.burn_in) % config.thinning == 0 {
                points.push(to_native(problem, &u));
            }
        }
    }

    Ok(ChainOutput {
        points,
        acceptance: post_accepts as f64 / post_steps.max(1) as f64,
    })
}

/// Sample the posterior of `problem` with adaptive random-walk Metropolis.
/// Returns the pooled post-burn-in, thinned samples from all chains together
/// with the mean post-adaptation acceptance rate.
pub fn metropolis_sample(
    problem: &ProblemSpec,
    config: &McmcConfig,
    rng: &RngHandle,
) -> Result<(WeightedSampleSet, f64)> {
    config.validate()?;
    let chains = par_map_range(config.chains, |c| {
        run_chain(problem, config, &rng.child(c as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let acceptance =
        chains.iter().map(|c| c.acceptance).sum::<f64>() / config.chains as f64;
    let points: Vec<Vec<f64>> = chains.into_iter().flat_map(|c| c.points).collect();
    Ok((attach_weights(problem, points)?, acceptance))
}
