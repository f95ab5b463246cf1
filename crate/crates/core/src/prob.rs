//! Log-space probability primitives: standard densities and the
//! normal-inverse-chi-squared conjugate family.

use crate::error::{Error, Result};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

pub const LN_2PI: f64 = 1.8378770664093453;

/// A point in parameter space. All coordinates are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("Point needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate {c}")));
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.coords)
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point { coords: vec![x] }
    }
}

/// Symmetric positive-definite matrix with a cached Cholesky factor.
///
/// Construction verifies symmetry and repairs near-singular inputs with a
/// small diagonal jitter (at most three attempts) before giving up.
#[derive(Debug, Clone)]
pub struct SpdMatrix {
    matrix: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl SpdMatrix {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::invalid("covariance matrix must be square"));
        }
        let dim = matrix.nrows();
        let scale = matrix
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()))
            .max(1e-300);
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::numerical(format!(
                        "matrix not symmetric at ({i},{j}): {} vs {}",
                        matrix[(i, j)],
                        matrix[(j, i)]
                    )));
                }
            }
        }
        // Symmetrize exactly, then factorize with escalating jitter.
        let sym = 0.5 * (&matrix + matrix.transpose());
        let jitter_unit = 1e-10 * sym.trace().abs().max(1e-300) / dim as f64;
        let mut jitter = 0.0;
        for attempt in 0..3 {
            let mut m = sym.clone();
            if jitter > 0.0 {
                for i in 0..dim {
                    m[(i, i)] += jitter;
                }
            }
            if let Some(chol) = Cholesky::new(m.clone()) {
                return Ok(SpdMatrix { matrix: m, chol });
            }
            jitter = jitter_unit * 10f64.powi(attempt);
        }
        Err(Error::numerical(
            "matrix is not positive definite (Cholesky failed after jitter attempts)",
        ))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("covariance rows must form a square matrix"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn log_det(&self) -> f64 {
        2.0 * self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>()
    }

    /// Mahalanobis form δᵀ Σ⁻¹ δ.
    pub fn quad_form(&self, delta: &DVector<f64>) -> f64 {
        let y = self.chol.solve(delta);
        delta.dot(&y)
    }

    /// Lower-triangular factor L with Σ = L Lᵀ.
    pub fn chol_l(&self) -> DMatrix<f64> {
        self.chol.l()
    }
}

/// Parameters of a normal-inverse-chi-squared distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nix2Params {
    pub mu0: f64,
    pub kappa0: f64,
    pub nu0: f64,
    pub sigma0sq: f64,
}

impl Nix2Params {
    pub fn new(mu0: f64, kappa0: f64, nu0: f64, sigma0sq: f64) -> Result<Self> {
        if !(kappa0 > 0.0 && nu0 > 0.0 && sigma0sq > 0.0) {
            return Err(Error::invalid(
                "Nix2Params requires kappa0 > 0, nu0 > 0, sigma0sq > 0",
            ));
        }
        Ok(Nix2Params {
            mu0,
            kappa0,
            nu0,
            sigma0sq,
        })
    }
}

/// log Σ exp(vᵢ), shift-stable. Errors on an empty list.
pub fn log_sum_exp(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("log_sum_exp of an empty list"));
    }
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    Ok(max + sum.ln())
}

/// Multivariate normal log density, evaluated via the covariance Cholesky.
pub fn mvn_logpdf(x: &Point, mean: &Point, cov: &SpdMatrix) -> Result<f64> {
    let d = x.dim();
    if mean.dim() != d || cov.dim() != d {
        return Err(Error::invalid(format!(
            "dimension mismatch: x={d}, mean={}, cov={}",
            mean.dim(),
            cov.dim()
        )));
    }
    let delta = x.as_vector() - mean.as_vector();
    Ok(-0.5 * (d as f64 * LN_2PI + cov.log_det() + cov.quad_form(&delta)))
}

/// Location-scale Student-t log density.
pub fn student_t_logpdf(x: f64, dof: f64, loc: f64, scale: f64) -> Result<f64> {
    if !(dof > 0.0) || !(scale > 0.0) {
        return Err(Error::invalid("student_t_logpdf requires dof > 0, scale > 0"));
    }
    let z = (x - loc) / scale;
    Ok(ln_gamma(0.5 * (dof + 1.0))
        - ln_gamma(0.5 * dof)
        - 0.5 * (dof * std::f64::consts::PI).ln()
        - scale.ln()
        - 0.5 * (dof + 1.0) * (z * z / dof).ln_1p())
}

/// Generalised normal log density in the normalized parametrization
/// β/(2αΓ(1/β)) · exp(−(|s−μ|/α)^β). Gaussian at β=2, α=√2σ; Laplace at β=1.
pub fn gen_normal_logpdf(s: f64, mu: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(beta > 0.0) {
        return Err(Error::invalid(
            "gen_normal_logpdf requires alpha > 0, beta > 0",
        ));
    }
    Ok(beta.ln() - (2.0 * alpha).ln() - ln_gamma(1.0 / beta)
        - ((s - mu).abs() / alpha).powf(beta))
}

/// Conjugate update of NIχ² parameters with Gaussian observations.
pub fn nix2_posterior_update(prior: &Nix2Params, data: &[f64]) -> Result<Nix2Params> {
    if data.is_empty() {
        return Err(Error::invalid("nix2_posterior_update needs data"));
    }
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let ss: f64 = data.iter().map(|s| (s - mean) * (s - mean)).sum();
    let kappa_n = prior.kappa0 + n;
    let nu_n = prior.nu0 + n;
    let mu_n = (prior.kappa0 * prior.mu0 + n * mean) / kappa_n;
    let nu_sigma_sq = prior.nu0 * prior.sigma0sq
        + ss
        + n * prior.kappa0 / kappa_n * (mean - prior.mu0) * (mean - prior.mu0);
    Ok(Nix2Params {
        mu0: mu_n,
        kappa0: kappa_n,
        nu0: nu_n,
        sigma0sq: nu_sigma_sq / nu_n,
    })
}

/// NIχ² log density at (μ, σ²): N(μ | μ₀, σ²/κ₀) × scaled-inverse-χ²(σ² | ν₀, σ₀²).
pub fn nix2_logpdf(mu: f64, sigmasq: f64, params: &Nix2Params) -> Result<f64> {
    if !(sigmasq > 0.0) {
        return Err(Error::invalid("nix2_logpdf requires sigmasq > 0"));
    }
    let half_nu = 0.5 * params.nu0;
    let tau = params.nu0 * params.sigma0sq;
    let log_inv_chi2 = half_nu * (0.5 * tau).ln() - ln_gamma(half_nu)
        - (1.0 + half_nu) * sigmasq.ln()
        - 0.5 * tau / sigmasq;
    let var = sigmasq / params.kappa0;
    let log_normal = -0.5 * (LN_2PI + var.ln() + (mu - params.mu0) * (mu - params.mu0) / var);
    Ok(log_inv_chi2 + log_normal)
}

/// Analytic log marginal likelihood of Gaussian data under a NIχ² prior.
pub fn nix2_log_evidence(prior: &Nix2Params, data: &[f64]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::invalid("nix2_log_evidence needs data"));
    }
    let n = data.len() as f64;
    let post = nix2_posterior_update(prior, data)?;
    Ok(ln_gamma(0.5 * post.nu0) - ln_gamma(0.5 * prior.nu0)
        + 0.5 * (prior.kappa0 / post.kappa0).ln()
        + 0.5 * prior.nu0 * (prior.nu0 * prior.sigma0sq).ln()
        - 0.5 * post.nu0 * (post.nu0 * post.sigma0sq).ln()
        - 0.5 * n * std::f64::consts::PI.ln())
}
