//! Exhaustive partition-posterior enumeration, the brute-force oracle used to
//! validate the collapsed Gibbs sampler on tiny inputs.

use std::collections::HashMap;

use super::niw::{self, ClusterStats, NiwParams};
use super::SampleSet;
use crate::error::{Error, Result};
use crate::prob::log_sum_exp;
use statrs::function::gamma::ln_gamma;

/// Exact posterior over set partitions (CRP prior × NIW marginal likelihood)
/// for n ≤ 8 points. Keys are canonical assignment vectors.
pub fn enumerate_partition_posterior(
    samples: &SampleSet,
    prior: &NiwParams,
    alpha: f64,
) -> Result<HashMap<Vec<usize>, f64>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::invalid("cannot enumerate an empty sample set"));
    }
    if n > 8 {
        return Err(Error::invalid(format!(
            "partition enumeration refused for n = {n} > 8"
        )));
    }
    if prior.dim() != samples.dim() {
        return Err(Error::invalid("NIW prior dimension mismatch"));
    }

    let mut log_probs = Vec::new();
    let mut keys = Vec::new();
    for assignment in restricted_growth_strings(n) {
        let mut lp = crp_log_prior(&assignment, alpha);
        let k_max = *assignment.iter().max().unwrap() + 1;
        for k in 0..k_max {
            let mut stats = ClusterStats::empty(samples.dim());
            for (i, &a) in assignment.iter().enumerate() {
                if a == k {
                    stats.add(samples.point(i));
                }
            }
            lp += niw::log_marginal(prior, &stats)?;
        }
        log_probs.push(lp);
        keys.push(assignment);
    }
    let norm = log_sum_exp(&log_probs)?;
    Ok(keys
        .into_iter()
        .zip(log_probs)
        .map(|(k, lp)| (k, (lp - norm).exp()))
        .collect())
}

/// Unnormalized CRP log prior of a partition: K ln α + Σ ln(nₖ − 1)!.
/// The rising-factorial denominator is constant across partitions of fixed n
/// and cancels in the normalization.
fn crp_log_prior(assignment: &[usize], alpha: f64) -> f64 {
    let k_max = *assignment.iter().max().unwrap() + 1;
    let mut counts = vec![0usize; k_max];
    for &a in assignment {
        counts[a] += 1;
    }
    k_max as f64 * alpha.ln() + counts.iter().map(|&c| ln_gamma(c as f64)).sum::<f64>()
}

/// All set partitions of n items as restricted growth strings
/// (canonical assignment vectors).
fn restricted_growth_strings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; n];
    fn recurse(current: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
        if pos == current.len() {
            out.push(current.clone());
            return;
        }
        for label in 0..=max_used + 1 {
            current[pos] = label;
            recurse(current, pos + 1, max_used.max(label), out);
        }
    }
    if n > 0 {
        recurse(&mut current, 1, 0, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn prior_1d() -> NiwParams {
        NiwParams::new(DVector::zeros(1), 0.5, 3.0, DMatrix::from_vec(1, 1, vec![1.0])).unwrap()
    }

    #[test]
    fn bell_numbers() {
        assert_eq!(restricted_growth_strings(1).len(), 1);
        assert_eq!(restricted_growth_strings(3).len(), 5);
        assert_eq!(restricted_growth_strings(5).len(), 52);
        assert_eq!(restricted_growth_strings(8).len(), 4140);
    }

    #[test]
    fn single_point_is_certain() {
        let s = SampleSet::from_scalars(&[0.7]).unwrap();
        let post = enumerate_partition_posterior(&s, &prior_1d(), 1.0).unwrap();
        assert_eq!(post.len(), 1);
        assert!((post[&vec![0]] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concentration_controls_split_probability() {
        // large alpha makes the CRP prior dominate and favours singletons;
        // small alpha with nearby points favours a single cluster
        let s = SampleSet::from_scalars(&[-30.0, 30.0]).unwrap();
        let post = enumerate_partition_posterior(&s, &prior_1d(), 1e5).unwrap();
        assert_eq!(post.len(), 2);
        assert!(post[&vec![0, 1]] > 0.9, "split prob = {}", post[&vec![0, 1]]);

        let near = SampleSet::from_scalars(&[-0.1, 0.1]).unwrap();
        let post = enumerate_partition_posterior(&near, &prior_1d(), 0.1).unwrap();
        assert!(post[&vec![0, 0]] > 0.9, "merge prob = {}", post[&vec![0, 0]]);
    }

    #[test]
    fn probabilities_sum_to_one() {
        let s = SampleSet::from_scalars(&[-1.0, 0.2, 0.4, 1.5, -0.3]).unwrap();
        let post = enumerate_partition_posterior(&s, &prior_1d(), 1.0).unwrap();
        assert_eq!(post.len(), 52);
        let total: f64 = post.values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refuses_large_inputs() {
        let s = SampleSet::from_scalars(&[0.0; 9]).unwrap();
        assert!(enumerate_partition_posterior(&s, &prior_1d(), 1.0).is_err());
    }

    #[test]
    fn two_point_split_ratio_matches_direct_computation() {
        let s = SampleSet::from_scalars(&[-2.0, 3.0]).unwrap();
        let prior = prior_1d();
        let alpha = 0.7;
        let post = enumerate_partition_posterior(&s, &prior, alpha).unwrap();

        // Direct: p(together) ∝ α · m({a,b}); p(apart) ∝ α² · m({a}) m({b})
        let mut both = ClusterStats::empty(1);
        both.add(s.point(0));
        both.add(s.point(1));
        let mut only_a = ClusterStats::empty(1);
        only_a.add(s.point(0));
        let mut only_b = ClusterStats::empty(1);
        only_b.add(s.point(1));
        let lp_together = alpha.ln() + niw::log_marginal(&prior, &both).unwrap();
        let lp_apart = 2.0 * alpha.ln()
            + niw::log_marginal(&prior, &only_a).unwrap()
            + niw::log_marginal(&prior, &only_b).unwrap();
        let expected = (lp_apart - log_sum_exp(&[lp_together, lp_apart]).unwrap()).exp();
        assert!((post[&vec![0, 1]] - expected).abs() < 1e-12);
    }
}
