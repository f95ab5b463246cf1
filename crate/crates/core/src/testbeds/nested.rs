//! Classic nested sampling, used as an independent evidence oracle for
//! problems without an analytic answer.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::prob::log_sum_exp;
use crate::rng::RngHandle;
use crate::testbeds::metropolis::{to_native, to_sampling};
use crate::testbeds::ProblemSpec;

#[derive(Debug, Clone)]
pub struct NsConfig {
    pub live_points: usize,
    /// Terminate when the live-point evidence remainder falls below this
    /// fraction (in log space) of the accumulated evidence.
    pub dlogz: f64,
    pub max_iterations: usize,
    /// Constrained random-walk length per replacement.
    pub walk_steps: usize,
}

impl Default for NsConfig {
    fn default() -> Self {
        NsConfig {
            live_points: 1000,
            dlogz: 0.01,
            max_iterations: 200_000,
            walk_steps: 40,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NsResult {
    pub log_z: f64,
    /// Information-based uncertainty √(H / n_live).
    pub log_z_err: f64,
    pub iterations: usize,
    pub information: f64,
}

struct LivePoint {
    x: Vec<f64>,
    log_l: f64,
}

/// Estimate log evidence by nested sampling. Live points are replaced by a
/// prior-targeting random walk constrained to L ≥ L*; when the prior is
/// uniform over the bounds, a bounding-box rejection shortcut is tried first.
pub fn nested_sampling_log_evidence(
    problem: &ProblemSpec,
    config: &NsConfig,
    rng: &RngHandle,
) -> Result<NsResult> {
    if config.live_points < 50 {
        return Err(Error::invalid("nested sampling needs >= 50 live points"));
    }
    if !(config.dlogz > 0.0) {
        return Err(Error::invalid("dlogz must be positive"));
    }
    let mut r = rng.rng();
    let nlive = config.live_points;

    let mut live: Vec<LivePoint> = Vec::with_capacity(nlive);
    for _ in 0..nlive {
        let mut found = false;
        for _ in 0..1000 {
            let x = (problem.prior_sampler)(&mut r);
            let log_pi = (problem.log_prior)(&x);
            if log_pi == f64::NEG_INFINITY {
                continue;
            }
            let log_l = (problem.log_likelihood)(&x);
            if log_l.is_nan() {
                continue;
            }
            live.push(LivePoint { x, log_l });
            found = true;
            break;
        }
        if !found {
            return Err(Error::pipeline(
                "nested-sampling",
                "prior sampler failed to produce valid live points",
            ));
        }
    }

    let uniform_prior = is_uniform_prior(problem);
    let ln_shrink = -1.0 / nlive as f64;
    // ln(X_{i-1} - X_i) for X_i = exp(-i/N): ln X_{i-1} + ln(1 - e^{-1/N})
    let ln_gap = (-ln_shrink).exp_m1().ln() + ln_shrink;

    let mut log_z = f64::NEG_INFINITY;
    let mut ln_x = 0.0f64;
    let mut iterations = 0usize;
    // (log weight·likelihood, log likelihood) of every dead point, for the
    // final information sum
    let mut records: Vec<(f64, f64)> = Vec::new();

    loop {
        iterations += 1;
        if iterations > config.max_iterations {
            return Err(Error::pipeline(
                "nested-sampling",
                format!("no convergence after {} iterations", config.max_iterations),
            ));
        }

        let worst = live
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.log_l.total_cmp(&b.1.log_l))
            .map(|(i, _)| i)
            .expect("live set non-empty");
        let l_star = live[worst].log_l;
        let ln_w = ln_x + ln_gap; // = ln(X_{i-1} - X_i)
        ln_x += ln_shrink;

        let contribution = l_star + ln_w;
        records.push((contribution, l_star));
        log_z = log_sum_exp(&[log_z, contribution])?;

        let replacement = replace_point(problem, &live, worst, l_star, uniform_prior, config, &mut r)?;
        live[worst] = replacement;

        let max_live_l = live
            .iter()
            .map(|p| p.log_l)
            .fold(f64::NEG_INFINITY, f64::max);
        let remainder = max_live_l + ln_x;
        if log_z.is_finite() && remainder - log_z < (config.dlogz).ln_1p() {
            break;
        }
    }

    // Fold the surviving live points into the evidence sum.
    let ln_w_live = ln_x - (nlive as f64).ln();
    for p in &live {
        let contribution = p.log_l + ln_w_live;
        records.push((contribution, p.log_l));
        log_z = log_sum_exp(&[log_z, contribution])?;
    }

    // H = Σ (wᵢLᵢ/Z) ln Lᵢ − ln Z
    let information = records
        .iter()
        .map(|&(c, l)| {
            let p = (c - log_z).exp();
            if p > 0.0 {
                p * l
            } else {
                0.0
            }
        })
        .sum::<f64>()
        - log_z;
    let information = information.max(0.0);
    Ok(NsResult {
        log_z,
        log_z_err: (information / nlive as f64).sqrt(),
        iterations,
        information,
    })
}

/// A prior is treated as uniform when bounds exist and the log prior at a few
/// interior probes matches −ln(volume).
fn is_uniform_prior(problem: &ProblemSpec) -> bool {
    let Some(bounds) = &problem.bounds else {
        return false;
    };
    let ln_vol: f64 = bounds.iter().map(|&(lo, hi)| (hi - lo).ln()).sum();
    for frac in [0.25, 0.5, 0.75] {
        let probe: Vec<f64> = bounds
            .iter()
            .map(|&(lo, hi)| lo + frac * (hi - lo))
            .collect();
        if ((problem.log_prior)(&probe) + ln_vol).abs() > 1e-9 {
            return false;
        }
    }
    true
}

fn replace_point(
    problem: &ProblemSpec,
    live: &[LivePoint],
    worst: usize,
    l_star: f64,
    uniform_prior: bool,
    config: &NsConfig,
    r: &mut rand_chacha::ChaCha8Rng,
) -> Result<LivePoint> {
    let dim = problem.dim;

    // Per-dimension extent of the live set drives the rejection box.
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    for p in live {
        for d in 0..dim {
            lo[d] = lo[d].min(p.x[d]);
            hi[d] = hi[d].max(p.x[d]);
        }
    }

    if uniform_prior {
        let bounds = problem.bounds.as_ref().expect("uniform prior has bounds");
        // Box slightly inflated around the live set, clipped to the prior box.
        let box_ranges: Vec<(f64, f64)> = (0..dim)
            .map(|d| {
                let pad = 0.1 * (hi[d] - lo[d]).max(1e-12);
                ((lo[d] - pad).max(bounds[d].0), (hi[d] + pad).min(bounds[d].1))
            })
            .collect();
        for _ in 0..30 {
            let x: Vec<f64> = box_ranges
                .iter()
                .map(|&(a, b)| r.random_range(a..=b))
                .collect();
            let log_pi = (problem.log_prior)(&x);
            if log_pi == f64::NEG_INFINITY {
                continue;
            }
            let log_l = (problem.log_likelihood)(&x);
            if log_l > l_star {
                return Ok(LivePoint { x, log_l });
            }
        }
    }

    // Random-walk fallback: start from a random survivor and evolve with a
    // Metropolis kernel targeting the prior (in sampling coordinates, with
    // log transforms for positive-scale dimensions), restricted to L >= L*.
    let log_prior_sampling = |u: &[f64]| -> f64 {
        let x = to_native(problem, u);
        if !problem.in_bounds(&x) {
            return f64::NEG_INFINITY;
        }
        let lp = (problem.log_prior)(&x);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        lp + problem.log_scale_dims.iter().map(|&d| u[d]).sum::<f64>()
    };
    // live-set spread in sampling coordinates
    let live_u: Vec<Vec<f64>> = live.iter().map(|p| to_sampling(problem, &p.x)).collect();
    let mut u_mean = vec![0.0; dim];
    for u in &live_u {
        for d in 0..dim {
            u_mean[d] += u[d] / live_u.len() as f64;
        }
    }
    let mut u_sd = vec![0.0; dim];
    for u in &live_u {
        for d in 0..dim {
            u_sd[d] += (u[d] - u_mean[d]).powi(2) / live_u.len() as f64;
        }
    }
    for s in &mut u_sd {
        *s = s.sqrt().max(1e-12);
    }

    for _attempt in 0..10 {
        let start = loop {
            let k = r.random_range(0..live.len());
            if k != worst {
                break k;
            }
        };
        let mut u = live_u[start].clone();
        let mut log_pi_s = log_prior_sampling(&u);
        let mut log_l = live[start].log_l;
        let mut step = 1.0f64;
        let mut moved = false;

        for _ in 0..config.walk_steps {
            let proposal: Vec<f64> = (0..dim)
                .map(|d| u[d] + step * u_sd[d] * r.sample::<f64, _>(StandardNormal))
                .collect();
            let p_log_pi = log_prior_sampling(&proposal);
            let mut accepted = false;
            if p_log_pi > f64::NEG_INFINITY
                && (p_log_pi - log_pi_s >= 0.0 || r.random::<f64>().ln() < p_log_pi - log_pi_s)
            {
                let x = to_native(problem, &proposal);
                let p_log_l = (problem.log_likelihood)(&x);
                if p_log_l >= l_star && !p_log_l.is_nan() {
                    u = proposal;
                    log_pi_s = p_log_pi;
                    log_l = p_log_l;
                    accepted = true;
                    moved = true;
                }
            }
            step *= if accepted { 1.1 } else { 0.9 };
        }
        if moved {
            return Ok(LivePoint {
                x: to_native(problem, &u),
                log_l,
            });
        }
    }
    Err(Error::pipeline(
        "nested-sampling",
        format!("live-point replacement stalled at likelihood plateau L* = {l_star:.6}"),
    ))
}
