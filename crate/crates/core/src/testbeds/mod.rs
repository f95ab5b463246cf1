//! Analytic and semi-analytic inference problems with known or
//! oracle-computable evidences, plus the samplers and calibration harness
//! used to exercise the evidence pipeline end to end.

mod metropolis;
mod nested;
mod pp;
pub mod stats;
mod tail;

pub use metropolis::{metropolis_sample, McmcConfig};
pub use nested::{nested_sampling_log_evidence, NsConfig, NsResult};
pub use pp::{pp_test, PpResult};
pub use tail::{student_t_tail_demo, TailDemo, TailRow};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::prob::{
    gen_normal_logpdf, nix2_log_evidence, nix2_logpdf, nix2_posterior_update, Nix2Params, LN_2PI,
};
use crate::quad;
use crate::rng::RngHandle;

/// Seed for the committed fixture datasets.
pub const FIXTURE_SEED: u64 = 1;

pub type LogDensityFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SamplerFn = Box<dyn Fn(&mut ChaCha8Rng) -> Vec<f64> + Send + Sync>;

/// A self-contained inference problem.
pub struct ProblemSpec {
    pub name: String,
    pub dim: usize,
    pub log_prior: LogDensityFn,
    pub log_likelihood: LogDensityFn,
    pub prior_sampler: SamplerFn,
    pub bounds: Option<Vec<(f64, f64)>>,
    pub analytic_log_evidence: Option<f64>,
    pub posterior_sampler: Option<SamplerFn>,
    /// Exact normalized posterior log density, when available.
    pub posterior_logpdf: Option<LogDensityFn>,
    /// Dimensions that Metropolis explores in log space (positive scales).
    pub log_scale_dims: Vec<usize>,
}

impl ProblemSpec {
    /// Validate the spec; for dim ≤ 2 with bounds, assert by quadrature that
    /// the prior integrates to 1 (within 1%) over the bounded box.
    pub fn validated(self) -> Result<Self> {
        if self.dim == 0 {
            return Err(Error::invalid("problem dimension must be positive"));
        }
        if let Some(b) = &self.bounds {
            if b.len() != self.dim {
                return Err(Error::invalid("bounds length must equal dim"));
            }
        }
        if self.dim <= 2 {
            let mass = self.prior_mass_in_bounds()?;
            if (mass - 1.0).abs() > 0.01 {
                return Err(Error::numerical(format!(
                    "prior of `{}` integrates to {mass:.4} over its bounds",
                    self.name
                )));
            }
        }
        Ok(self)
    }

    /// Quadrature of the prior over the bounding box (dim ≤ 2 only).
    /// Dimensions flagged log-scale are integrated in log coordinates.
    pub fn prior_mass_in_bounds(&self) -> Result<f64> {
        let bounds = self
            .bounds
            .as_ref()
            .ok_or_else(|| Error::invalid("prior quadrature needs bounds"))?;
        let to_native = |d: usize, u: f64| {
            if self.log_scale_dims.contains(&d) {
                u.exp()
            } else {
                u
            }
        };
        let jac = |d: usize, u: f64| {
            if self.log_scale_dims.contains(&d) {
                u
            } else {
                0.0
            }
        };
        let range = |d: usize| -> (f64, f64) {
            let (lo, hi) = bounds[d];
            if self.log_scale_dims.contains(&d) {
                (lo.max(1e-12).ln(), hi.ln())
            } else {
                (lo, hi)
            }
        };
        match self.dim {
            1 => {
                let (a, b) = range(0);
                let f =
                    |u: f64| ((self.log_prior)(&[to_native(0, u)]) + jac(0, u)).exp();
                Ok(quad::integrate_1d_panels(&f, a, b, 1e-6, 64))
            }
            2 => {
                let (ax, bx) = range(0);
                let (ay, by) = range(1);
                let f = |u: f64, v: f64| {
                    ((self.log_prior)(&[to_native(0, u), to_native(1, v)])
                        + jac(0, u)
                        + jac(1, v))
                    .exp()
                };
                Ok(quad::integrate_2d_panels(&f, (ax, bx), (ay, by), 1e-4, 48))
            }
            _ => Err(Error::invalid("prior quadrature limited to dim <= 2")),
        }
    }

    pub fn log_unnorm(&self, x: &[f64]) -> f64 {
        let lp = (self.log_prior)(x);
        if lp == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        lp + (self.log_likelihood)(x)
    }

    pub fn in_bounds(&self, x: &[f64]) -> bool {
        match &self.bounds {
            Some(b) => x
                .iter()
                .zip(b)
                .all(|(&v, &(lo, hi))| v >= lo && v <= hi),
            None => true,
        }
    }
}

fn gaussian_1d_logpdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln() + (x - mean) * (x - mean) / var)
}

/// Inferring a Gaussian mean from the single observation s = 2 with unit
/// noise and a N(0, 10²) prior. The evidence is N(2 | 0, √101) ≈ e⁻³·²⁴⁶.
pub fn neal_problem() -> Result<ProblemSpec> {
    let post_var: f64 = 1.0 / (1.0 + 1.0 / 100.0);
    let post_mean = 2.0 * post_var;
    let post_sd = post_var.sqrt();
    ProblemSpec {
        name: "neal".into(),
        dim: 1,
        log_prior: Box::new(|x| gaussian_1d_logpdf(x[0], 0.0, 100.0)),
        log_likelihood: Box::new(|x| gaussian_1d_logpdf(2.0, x[0], 1.0)),
        prior_sampler: Box::new(|rng| vec![10.0 * rng.sample::<f64, _>(StandardNormal)]),
        bounds: Some(vec![(-100.0, 100.0)]),
        analytic_log_evidence: Some(gaussian_1d_logpdf(2.0, 0.0, 101.0)),
        posterior_sampler: Some(Box::new(move |rng| {
            vec![post_mean + post_sd * rng.sample::<f64, _>(StandardNormal)]
        })),
        posterior_logpdf: Some(Box::new(move |x| {
            gaussian_1d_logpdf(x[0], post_mean, post_var)
        })),
        log_scale_dims: vec![],
    }
    .validated()
}

pub const NIX2_DATA: [f64; 2] = [-3.0, 7.0];

/// Gaussian mean/variance inference with a NIχ²(0, 0.1, 1, 1) prior
/// conditioned on the two samples {−3, 7}. Analytic evidence ≈ −9.27.
pub fn nix2_problem() -> Result<ProblemSpec> {
    let prior = Nix2Params::new(0.0, 0.1, 1.0, 1.0)?;
    let post = nix2_posterior_update(&prior, &NIX2_DATA)?;
    let analytic = nix2_log_evidence(&prior, &NIX2_DATA)?;
    let bounds = vec![(-3000.0, 3000.0), (1e-8, 30000.0)];
    let bounds_sampler = bounds.clone();
    ProblemSpec {
        name: "nix2".into(),
        dim: 2,
        log_prior: Box::new(move |x| {
            if x[1] <= 0.0 {
                return f64::NEG_INFINITY;
            }
            nix2_logpdf(x[0], x[1], &prior).expect("sigmasq > 0")
        }),
        log_likelihood: Box::new(|x| {
            if x[1] <= 0.0 {
                return f64::NEG_INFINITY;
            }
            NIX2_DATA
                .iter()
                .map(|&s| gaussian_1d_logpdf(s, x[0], x[1]))
                .sum()
        }),
        prior_sampler: Box::new(move |rng| {
            loop {
                let x = sample_nix2(&prior, rng);
                if x[1] >= bounds_sampler[1].0
                    && x[1] <= bounds_sampler[1].1
                    && x[0].abs() <= bounds_sampler[0].1
                {
                    return x;
                }
            }
        }),
        bounds: Some(bounds),
        analytic_log_evidence: Some(analytic),
        posterior_sampler: Some(Box::new(move |rng| sample_nix2(&post, rng))),
        posterior_logpdf: Some(Box::new(move |x| {
            if x[1] <= 0.0 {
                return f64::NEG_INFINITY;
            }
            nix2_logpdf(x[0], x[1], &post).expect("sigmasq > 0")
        })),
        log_scale_dims: vec![1],
    }
    .validated()
}

/// Draw (μ, σ²) from a NIχ² distribution.
fn sample_nix2(params: &Nix2Params, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let chi = ChiSquared::new(params.nu0).expect("nu0 > 0");
    let sigmasq = params.nu0 * params.sigma0sq / chi.sample(rng);
    let mu = params.mu0
        + (sigmasq / params.kappa0).sqrt() * rng.sample::<f64, _>(StandardNormal);
    vec![mu, sigmasq]
}

/// Five-parameter bivariate Gaussian problem: infer (μ₁, μ₂, σ₁, σ₂, ρ) from
/// a 100-point dataset under a uniform prior on [−5,5]²×[0,10]²×[−1,1].
pub fn bivariate_params_problem(dataset: Vec<[f64; 2]>) -> Result<ProblemSpec> {
    if dataset.len() != 100 {
        return Err(Error::invalid(format!(
            "bivariate problem expects 100 points, got {}",
            dataset.len()
        )));
    }
    let bounds = vec![
        (-5.0, 5.0),
        (-5.0, 5.0),
        (0.0, 10.0),
        (0.0, 10.0),
        (-1.0, 1.0),
    ];
    let log_prior_const = -(20_000.0f64).ln();
    let bounds_p = bounds.clone();
    let bounds_s = bounds.clone();
    ProblemSpec {
        name: "bivariate".into(),
        dim: 5,
        log_prior: Box::new(move |x| {
            let inside = x
                .iter()
                .zip(&bounds_p)
                .all(|(&v, &(lo, hi))| v >= lo && v <= hi);
            if inside {
                log_prior_const
            } else {
                f64::NEG_INFINITY
            }
        }),
        log_likelihood: Box::new(move |x| {
            bivariate_gaussian_loglik(&dataset, x[0], x[1], x[2], x[3], x[4])
        }),
        prior_sampler: Box::new(move |rng| {
            bounds_s
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect()
        }),
        bounds: Some(bounds),
        analytic_log_evidence: None,
        posterior_sampler: None,
        posterior_logpdf: None,
        log_scale_dims: vec![2, 3],
    }
    .validated()
}

/// Log likelihood of 2D points under N(μ, Σ(σ₁, σ₂, ρ)); singular
/// configurations (σᵢ = 0 or |ρ| = 1) give −inf.
pub fn bivariate_gaussian_loglik(
    data: &[[f64; 2]],
    mu1: f64,
    mu2: f64,
    s1: f64,
    s2: f64,
    rho: f64,
) -> f64 {
    if s1 <= 0.0 || s2 <= 0.0 || rho.abs() >= 1.0 {
        return f64::NEG_INFINITY;
    }
    let one_m_r2 = 1.0 - rho * rho;
    let log_det = (s1 * s1 * s2 * s2 * one_m_r2).ln();
    let mut q_sum = 0.0;
    for p in data {
        let z1 = (p[0] - mu1) / s1;
        let z2 = (p[1] - mu2) / s2;
        q_sum += (z1 * z1 - 2.0 * rho * z1 * z2 + z2 * z2) / one_m_r2;
    }
    let n = data.len() as f64;
    -n * (LN_2PI + 0.5 * log_det) - 0.5 * q_sum
}

/// Competing models for a 100-sample scalar dataset: H_N Gaussian (μ, σ) vs
/// H_GN generalised normal (μ, α, β), both under uniform priors.
pub fn model_pair_gaussian_gennormal(dataset: Vec<f64>) -> Result<(ProblemSpec, ProblemSpec)> {
    if dataset.len() != 100 {
        return Err(Error::invalid(format!(
            "model pair expects 100 samples, got {}",
            dataset.len()
        )));
    }
    let data_n = dataset.clone();
    let bounds_n = vec![(-5.0, 5.0), (1e-6, 10.0)];
    let bounds_n_s = bounds_n.clone();
    let h_n = ProblemSpec {
        name: "gaussian".into(),
        dim: 2,
        log_prior: Box::new(move |x| {
            if x[0].abs() <= 5.0 && x[1] > 0.0 && x[1] <= 10.0 {
                -(10.0f64 * 10.0).ln()
            } else {
                f64::NEG_INFINITY
            }
        }),
        log_likelihood: Box::new(move |x| {
            if x[1] <= 0.0 {
                return f64::NEG_INFINITY;
            }
            data_n
                .iter()
                .map(|&s| gaussian_1d_logpdf(s, x[0], x[1] * x[1]))
                .sum()
        }),
        prior_sampler: Box::new(move |rng| {
            bounds_n_s
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect()
        }),
        bounds: Some(bounds_n),
        analytic_log_evidence: None,
        posterior_sampler: None,
        posterior_logpdf: None,
        log_scale_dims: vec![1],
    }
    .validated()?;

    let data_gn = dataset;
    let bounds_gn = vec![(-5.0, 5.0), (1e-6, 10.0), (0.5, 5.0)];
    let bounds_gn_s = bounds_gn.clone();
    let h_gn = ProblemSpec {
        name: "gen-normal".into(),
        dim: 3,
        log_prior: Box::new(move |x| {
            if x[0].abs() <= 5.0 && x[1] > 0.0 && x[1] <= 10.0 && x[2] >= 0.5 && x[2] <= 5.0 {
                -(10.0f64 * 10.0 * 4.5).ln()
            } else {
                f64::NEG_INFINITY
            }
        }),
        log_likelihood: Box::new(move |x| {
            if x[1] <= 0.0 || x[2] <= 0.0 {
                return f64::NEG_INFINITY;
            }
            data_gn
                .iter()
                .map(|&s| gen_normal_logpdf(s, x[0], x[1], x[2]).expect("positive params"))
                .sum()
        }),
        prior_sampler: Box::new(move |rng| {
            bounds_gn_s
                .iter()
                .map(|&(lo, hi)| rng.random_range(lo..hi))
                .collect()
        }),
        bounds: Some(bounds_gn),
        analytic_log_evidence: None,
        posterior_sampler: None,
        posterior_logpdf: None,
        log_scale_dims: vec![1],
    }
    .validated()?;
    Ok((h_n, h_gn))
}

/// Generate the seeded 100-point bivariate fixture dataset.
pub fn generate_bivariate_dataset(seed: u64) -> Vec<[f64; 2]> {
    // ground truth: mu = (0.3, -0.2), sigma = (1.2, 0.8), rho = 0.5
    let (mu1, mu2, s1, s2, rho) = (0.3, -0.2, 1.2, 0.8, 0.5);
    let mut rng = RngHandle::with_stream(seed, 101).rng();
    let norm = Normal::new(0.0, 1.0).unwrap();
    (0..100)
        .map(|_| {
            let z1: f64 = norm.sample(&mut rng);
            let z2: f64 = norm.sample(&mut rng);
            [
                mu1 + s1 * z1,
                mu2 + s2 * (rho * z1 + (1.0 - rho * rho).sqrt() * z2),
            ]
        })
        .collect()
}

/// Generate the seeded 100-sample Gaussian fixture dataset for the model
/// selection example (truth: N(0.1, 0.9²)).
pub fn generate_gaussian_dataset(seed: u64) -> Vec<f64> {
    let mut rng = RngHandle::with_stream(seed, 202).rng();
    let norm = Normal::new(0.1, 0.9).unwrap();
    (0..100).map(|_| norm.sample(&mut rng)).collect()
}

/// Build a weighted sample set for a problem from raw posterior points.
pub fn attach_weights(
    problem: &ProblemSpec,
    points: Vec<Vec<f64>>,
) -> Result<crate::evidence::WeightedSampleSet> {
    let log_l: Vec<f64> = points.iter().map(|p| (problem.log_likelihood)(p)).collect();
    let log_pi: Vec<f64> = points.iter().map(|p| (problem.log_prior)(p)).collect();
    crate::evidence::WeightedSampleSet::new(
        crate::dpgmm::SampleSet::from_rows(&points)?,
        log_l,
        log_pi,
    )
}

/// Draw `n` points from a problem's analytic posterior sampler.
pub fn analytic_posterior_samples(
    problem: &ProblemSpec,
    n: usize,
    rng: &RngHandle,
) -> Result<crate::evidence::WeightedSampleSet> {
    let sampler = problem
        .posterior_sampler
        .as_ref()
        .ok_or_else(|| Error::invalid("problem has no analytic posterior sampler"))?;
    let mut r = rng.rng();
    let points: Vec<Vec<f64>> = (0..n).map(|_| sampler(&mut r)).collect();
    attach_weights(problem, points)
}
