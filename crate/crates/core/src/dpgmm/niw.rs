//! Normal-inverse-Wishart base measure: sufficient statistics, posterior
//! updates, Student-t posterior predictive, marginal likelihood, and draws of
//! (mean, covariance) from the posterior.

use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::prob::LN_2PI;

/// Normal-inverse-Wishart parameters (mean guess, pseudo-count, degrees of
/// freedom, scale matrix). Requires dof > dim - 1 so the prior is proper.
#[derive(Debug, Clone)]
pub struct NiwParams {
    pub mean: DVector<f64>,
    pub kappa: f64,
    pub dof: f64,
    pub scale: DMatrix<f64>,
}

impl NiwParams {
    pub fn new(mean: DVector<f64>, kappa: f64, dof: f64, scale: DMatrix<f64>) -> Result<Self> {
        let d = mean.len();
        if !(kappa > 0.0) {
            return Err(Error::invalid("NIW pseudo-count must be positive"));
        }
        if !(dof > d as f64 - 1.0) {
            return Err(Error::invalid(format!(
                "NIW dof must exceed dim - 1 = {}",
                d as f64 - 1.0
            )));
        }
        if scale.nrows() != d || scale.ncols() != d {
            return Err(Error::invalid("NIW scale matrix dimension mismatch"));
        }
        Ok(NiwParams {
            mean,
            kappa,
            dof,
            scale,
        })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Running sufficient statistics of one cluster: count, coordinate sum, and
/// sum of outer products.
#[derive(Debug, Clone)]
pub struct ClusterStats {
    pub n: usize,
    pub sum: DVector<f64>,
    pub sum_outer: DMatrix<f64>,
}

impl ClusterStats {
    pub fn empty(dim: usize) -> Self {
        ClusterStats {
            n: 0,
            sum: DVector::zeros(dim),
            sum_outer: DMatrix::zeros(dim, dim),
        }
    }

    pub fn add(&mut self, x: &DVector<f64>) {
        self.n += 1;
        self.sum += x;
        self.sum_outer.ger(1.0, x, x, 1.0);
    }

    pub fn remove(&mut self, x: &DVector<f64>) {
        debug_assert!(self.n > 0);
        self.n -= 1;
        self.sum -= x;
        self.sum_outer.ger(-1.0, x, x, 1.0);
    }

    pub fn mean(&self) -> DVector<f64> {
        &self.sum / self.n as f64
    }

    /// Scatter matrix Σ (xᵢ − x̄)(xᵢ − x̄)ᵀ.
    pub fn scatter(&self) -> DMatrix<f64> {
        if self.n == 0 {
            return self.sum_outer.clone();
        }
        let mean = self.mean();
        let mut s = self.sum_outer.clone();
        s.ger(-(self.n as f64), &mean, &mean, 1.0);
        // rounding can leave tiny negative diagonals on tight clusters
        0.5 * (&s + s.transpose())
    }
}

/// Posterior NIW parameters given cluster statistics.
pub fn posterior(prior: &NiwParams, stats: &ClusterStats) -> NiwParams {
    if stats.n == 0 {
        return prior.clone();
    }
    let n = stats.n as f64;
    let mean = stats.mean();
    let kappa_n = prior.kappa + n;
    let dof_n = prior.dof + n;
    let mean_n = (prior.kappa * &prior.mean + &stats.sum) / kappa_n;
    let dm = &mean - &prior.mean;
    let mut scale_n = &prior.scale + stats.scatter();
    scale_n.ger(prior.kappa * n / kappa_n, &dm, &dm, 1.0);
    NiwParams {
        mean: mean_n,
        kappa: kappa_n,
        dof: dof_n,
        scale: scale_n,
    }
}

/// Multivariate Student-t log density with scale matrix `sigma`.
fn mvt_logpdf(x: &DVector<f64>, dof: f64, loc: &DVector<f64>, sigma: &DMatrix<f64>) -> Result<f64> {
    let d = x.len() as f64;
    let chol = Cholesky::new(sigma.clone())
        .ok_or_else(|| Error::numerical("Student-t scale matrix not SPD"))?;
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let delta = x - loc;
    let q = delta.dot(&chol.solve(&delta));
    Ok(ln_gamma(0.5 * (dof + d)) - ln_gamma(0.5 * dof)
        - 0.5 * d * (dof * std::f64::consts::PI).ln()
        - 0.5 * log_det
        - 0.5 * (dof + d) * (q / dof).ln_1p())
}

/// Posterior predictive density of `x` for a cluster with statistics `stats`
/// (Student-t with dof νₙ − d + 1).
pub fn log_predictive(prior: &NiwParams, stats: &ClusterStats, x: &DVector<f64>) -> Result<f64> {
    let post = posterior(prior, stats);
    let d = prior.dim() as f64;
    let t_dof = post.dof - d + 1.0;
    let factor = (post.kappa + 1.0) / (post.kappa * t_dof);
    let sigma = factor * &post.scale;
    mvt_logpdf(x, t_dof, &post.mean, &sigma)
}

fn ln_multigamma(d: usize, a: f64) -> f64 {
    let d_f = d as f64;
    0.25 * d_f * (d_f - 1.0) * std::f64::consts::PI.ln()
        + (0..d).map(|j| ln_gamma(a - 0.5 * j as f64)).sum::<f64>()
}

fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let chol =
        Cholesky::new(m.clone()).ok_or_else(|| Error::numerical("log_det of non-SPD matrix"))?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// Marginal likelihood of the cluster members under the NIW prior.
pub fn log_marginal(prior: &NiwParams, stats: &ClusterStats) -> Result<f64> {
    if stats.n == 0 {
        return Ok(0.0);
    }
    let d = prior.dim();
    let n = stats.n as f64;
    let post = posterior(prior, stats);
    Ok(-0.5 * n * d as f64 * std::f64::consts::PI.ln()
        + 0.5 * d as f64 * (prior.kappa / post.kappa).ln()
        + ln_multigamma(d, 0.5 * post.dof)
        - ln_multigamma(d, 0.5 * prior.dof)
        + 0.5 * prior.dof * log_det_spd(&prior.scale)?
        - 0.5 * post.dof * log_det_spd(&post.scale)?)
}

/// Draw (mean, covariance) from a NIW distribution.
pub fn sample(params: &NiwParams, rng: &mut ChaCha8Rng) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let d = params.dim();
    let cov = sample_inverse_wishart(params.dof, &params.scale, rng)?;
    let chol = Cholesky::new(&cov / params.kappa)
        .ok_or_else(|| Error::numerical("sampled covariance not SPD"))?;
    let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mean = &params.mean + chol.l() * z;
    Ok((mean, cov))
}

/// Inverse-Wishart draw via the Bartlett decomposition.
fn sample_inverse_wishart(
    dof: f64,
    scale: &DMatrix<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<DMatrix<f64>> {
    let d = scale.nrows();
    let scale_inv = Cholesky::new(scale.clone())
        .ok_or_else(|| Error::numerical("IW scale matrix not SPD"))?
        .inverse();
    let l = Cholesky::new(0.5 * (&scale_inv + scale_inv.transpose()))
        .ok_or_else(|| Error::numerical("IW inverse scale not SPD"))?
        .l();
    let mut a = DMatrix::zeros(d, d);
    for i in 0..d {
        let chi = ChiSquared::new(dof - i as f64)
            .map_err(|e| Error::numerical(format!("chi-squared dof: {e}")))?;
        a[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            a[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    let la = l * a;
    let w = &la * la.transpose();
    let w_inv = Cholesky::new(w)
        .ok_or_else(|| Error::numerical("Wishart draw not invertible"))?
        .inverse();
    Ok(0.5 * (&w_inv + w_inv.transpose()))
}

/// Density of a single Gaussian with the given Cholesky factorization cache.
pub fn gaussian_logpdf(
    x: &DVector<f64>,
    mean: &DVector<f64>,
    chol: &Cholesky<f64, nalgebra::Dyn>,
    log_det: f64,
) -> f64 {
    let delta = x - mean;
    let q = delta.dot(&chol.solve(&delta));
    -0.5 * (x.len() as f64 * LN_2PI + log_det + q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngHandle;
    use approx::assert_abs_diff_eq;

    fn unit_prior(d: usize) -> NiwParams {
        NiwParams::new(
            DVector::zeros(d),
            1.0,
            d as f64 + 2.0,
            DMatrix::identity(d, d),
        )
        .unwrap()
    }

    #[test]
    fn stats_add_remove_roundtrip() {
        let mut s = ClusterStats::empty(2);
        let a = DVector::from_vec(vec![1.0, -2.0]);
        let b = DVector::from_vec(vec![0.5, 3.0]);
        s.add(&a);
        s.add(&b);
        s.remove(&a);
        assert_eq!(s.n, 1);
        assert_abs_diff_eq!(s.sum[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.sum_outer[(1, 1)], 9.0, epsilon = 1e-12);
    }

    #[test]
    fn predictive_equals_marginal_ratio() {
        // t predictive must match p(D ∪ {x}) / p(D) computed from scratch.
        let prior = unit_prior(2);
        let pts: Vec<DVector<f64>> = vec![
            DVector::from_vec(vec![0.3, -0.1]),
            DVector::from_vec(vec![-0.8, 0.4]),
            DVector::from_vec(vec![1.2, 0.9]),
        ];
        let x = DVector::from_vec(vec![0.2, 0.2]);
        let mut stats = ClusterStats::empty(2);
        for p in &pts {
            stats.add(p);
        }
        let pred = log_predictive(&prior, &stats, &x).unwrap();
        let m_before = log_marginal(&prior, &stats).unwrap();
        stats.add(&x);
        let m_after = log_marginal(&prior, &stats).unwrap();
        assert_abs_diff_eq!(pred, m_after - m_before, epsilon = 1e-8);
    }

    #[test]
    fn prior_predictive_is_1d_student_t() {
        // In 1D the NIW prior predictive reduces to a location-scale t.
        let prior = NiwParams::new(
            DVector::from_vec(vec![0.5]),
            2.0,
            3.0,
            DMatrix::from_vec(1, 1, vec![1.5]),
        )
        .unwrap();
        let stats = ClusterStats::empty(1);
        let x = DVector::from_vec(vec![1.3]);
        let got = log_predictive(&prior, &stats, &x).unwrap();
        let t_dof = 3.0;
        let scale = (1.5f64 * (2.0 + 1.0) / (2.0 * 3.0)).sqrt();
        let expected = crate::prob::student_t_logpdf(1.3, t_dof, 0.5, scale).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-10);
    }

    #[test]
    fn niw_sample_moments() {
        // E[Σ] = Ψ/(ν − d − 1); check with many draws.
        let prior = NiwParams::new(
            DVector::from_vec(vec![1.0, -1.0]),
            4.0,
            8.0,
            DMatrix::from_vec(2, 2, vec![2.0, 0.5, 0.5, 1.0]),
        )
        .unwrap();
        let mut rng = RngHandle::new(11).rng();
        let n = 4000;
        let mut mean_acc = DVector::zeros(2);
        let mut cov_acc = DMatrix::zeros(2, 2);
        for _ in 0..n {
            let (m, c) = sample(&prior, &mut rng).unwrap();
            mean_acc += m;
            cov_acc += c;
        }
        let mean = mean_acc / n as f64;
        let cov = cov_acc / n as f64;
        // E[Σ] = Ψ / (8 - 2 - 1) = Ψ / 5
        assert_abs_diff_eq!(mean[0], 1.0, epsilon = 0.05);
        assert_abs_diff_eq!(mean[1], -1.0, epsilon = 0.05);
        assert_abs_diff_eq!(cov[(0, 0)], 0.4, epsilon = 0.05);
        assert_abs_diff_eq!(cov[(0, 1)], 0.1, epsilon = 0.05);
        assert_abs_diff_eq!(cov[(1, 1)], 0.2, epsilon = 0.05);
    }

    #[test]
    fn rejects_improper_dof() {
        assert!(NiwParams::new(DVector::zeros(3), 1.0, 1.5, DMatrix::identity(3, 3)).is_err());
    }
}
