//! Dirichlet-process Gaussian-mixture density estimation via collapsed Gibbs
//! sampling. A fit produces explicit normalized finite-mixture realizations
//! drawn from the posterior over mixture parameters.

mod crp;
mod enumerate;
pub mod niw;

pub use crp::{canonicalize, crp_step, sweep as gibbs_sweep, GibbsState};
pub use enumerate::enumerate_partition_posterior;
pub use niw::{ClusterStats, NiwParams};

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prob::{log_sum_exp, Point, SpdMatrix};
use crate::rng::RngHandle;

/// A set of points sharing one dimension.
#[derive(Debug, Clone)]
pub struct SampleSet {
    points: Vec<DVector<f64>>,
    dim: usize,
}

impl SampleSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("empty sample set"));
        }
        let dim = points[0].dim();
        if points.iter().any(|p| p.dim() != dim) {
            return Err(Error::invalid("sample set points differ in dimension"));
        }
        Ok(SampleSet {
            points: points.iter().map(|p| p.as_vector()).collect(),
            dim,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let points = rows
            .iter()
            .map(|r| Point::new(r.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        let points = values
            .iter()
            .map(|&v| Point::new(vec![v]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &DVector<f64> {
        &self.points[i]
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    pub fn mean(&self) -> DVector<f64> {
        let mut m = DVector::zeros(self.dim);
        for p in &self.points {
            m += p;
        }
        m / self.len() as f64
    }

    /// Sample covariance with diagonal floored away from zero so that
    /// zero-variance inputs still yield a proper base measure.
    pub fn covariance(&self) -> DMatrix<f64> {
        let mean = self.mean();
        let mut c = DMatrix::zeros(self.dim, self.dim);
        for p in &self.points {
            let d = p - &mean;
            c.ger(1.0, &d, &d, 1.0);
        }
        c /= (self.len().max(2) - 1) as f64;
        for i in 0..self.dim {
            if c[(i, i)] < 1e-10 {
                c[(i, i)] = 1e-10;
            }
        }
        c
    }
}

/// One Gaussian mixture component with weight in (0, 1].
#[derive(Debug, Clone)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: DVector<f64>,
    pub cov: SpdMatrix,
    log_weight: f64,
    log_det: f64,
    chol: Cholesky<f64, Dyn>,
}

impl GaussianComponent {
    pub fn new(weight: f64, mean: DVector<f64>, cov: SpdMatrix) -> Result<Self> {
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(Error::invalid(format!(
                "component weight {weight} outside (0, 1]"
            )));
        }
        if mean.len() != cov.dim() {
            return Err(Error::invalid("component mean/cov dimension mismatch"));
        }
        let chol = Cholesky::new(cov.matrix().clone())
            .ok_or_else(|| Error::numerical("component covariance not SPD"))?;
        let log_det = cov.log_det();
        Ok(GaussianComponent {
            log_weight: weight.ln(),
            weight,
            mean,
            cov,
            log_det,
            chol,
        })
    }

    fn log_density(&self, x: &DVector<f64>) -> f64 {
        self.log_weight + niw::gaussian_logpdf(x, &self.mean, &self.chol, self.log_det)
    }
}

/// One finite mixture realization θⱼ of the DPGMM posterior.
#[derive(Debug, Clone)]
pub struct MixtureDraw {
    components: Vec<GaussianComponent>,
    dim: usize,
}

impl MixtureDraw {
    pub fn new(components: Vec<GaussianComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::invalid("mixture draw needs at least one component"));
        }
        let dim = components[0].mean.len();
        if components.iter().any(|c| c.mean.len() != dim) {
            return Err(Error::invalid("mixture components differ in dimension"));
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Ok(MixtureDraw { components, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    /// log Σᵢ wᵢ N(x | μᵢ, Σᵢ) for a raw coordinate vector.
    pub fn log_density(&self, x: &DVector<f64>) -> f64 {
        let terms: Vec<f64> = self.components.iter().map(|c| c.log_density(x)).collect();
        log_sum_exp(&terms).expect("non-empty mixture")
    }

    /// The same mixture with every component mean shifted by `offset`.
    pub fn translated(self, offset: &DVector<f64>) -> Result<MixtureDraw> {
        let comps = self
            .components
            .into_iter()
            .map(|c| GaussianComponent::new(c.weight, c.mean + offset, c.cov))
            .collect::<Result<Vec<_>>>()?;
        MixtureDraw::new(comps)
    }

    /// Draw one point from the mixture.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut comp = &self.components[self.components.len() - 1];
        for c in &self.components {
            acc += c.weight;
            if u < acc {
                comp = c;
                break;
            }
        }
        let z = DVector::from_fn(self.dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        &comp.mean + comp.chol.l() * z
    }
}

/// Evaluate the mixture log density at a point, checking dimensions.
pub fn mixture_logpdf(draw: &MixtureDraw, x: &Point) -> Result<f64> {
    if x.dim() != draw.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: point {} vs mixture {}",
            x.dim(),
            draw.dim()
        )));
    }
    Ok(draw.log_density(&x.as_vector()))
}

/// A posterior density estimate: a collection of mixture realizations.
#[derive(Debug, Clone)]
pub struct DensityEstimate {
    draws: Vec<MixtureDraw>,
    source_samples: usize,
    fingerprint: String,
}

impl DensityEstimate {
    pub fn new(draws: Vec<MixtureDraw>, source_samples: usize, fingerprint: String) -> Result<Self> {
        if draws.is_empty() {
            return Err(Error::invalid("density estimate needs at least one draw"));
        }
        let dim = draws[0].dim();
        if draws.iter().any(|d| d.dim() != dim) {
            return Err(Error::invalid("density estimate draws differ in dimension"));
        }
        Ok(DensityEstimate {
            draws,
            source_samples,
            fingerprint,
        })
    }

    pub fn dim(&self) -> usize {
        self.draws[0].dim()
    }

    pub fn draws(&self) -> &[MixtureDraw] {
        &self.draws
    }

    pub fn source_samples(&self) -> usize {
        self.source_samples
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Draw a point from a uniformly chosen mixture realization.
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> DVector<f64> {
        let j = rng.random_range(0..self.draws.len());
        self.draws[j].sample(rng)
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = EstimateJson {
            dim: self.dim(),
            draws: self
                .draws
                .iter()
                .map(|d| DrawJson {
                    weights: d.components.iter().map(|c| c.weight).collect(),
                    means: d
                        .components
                        .iter()
                        .map(|c| c.mean.iter().cloned().collect())
                        .collect(),
                    covs: d
                        .components
                        .iter()
                        .map(|c| matrix_rows(c.cov.matrix()))
                        .collect(),
                })
                .collect(),
            source_samples: self.source_samples,
            fingerprint: self.fingerprint.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: EstimateJson = serde_json::from_str(text)?;
        let mut draws = Vec::with_capacity(doc.draws.len());
        for d in &doc.draws {
            if d.weights.len() != d.means.len() || d.weights.len() != d.covs.len() {
                return Err(Error::input("draw weights/means/covs length mismatch"));
            }
            let comps = d
                .weights
                .iter()
                .zip(&d.means)
                .zip(&d.covs)
                .map(|((&w, m), c)| {
                    GaussianComponent::new(
                        w,
                        DVector::from_column_slice(m),
                        SpdMatrix::from_rows(c)?,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            draws.push(MixtureDraw::new(comps)?);
        }
        DensityEstimate::new(draws, doc.source_samples, doc.fingerprint)
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

#[derive(Serialize, Deserialize)]
struct DrawJson {
    weights: Vec<f64>,
    means: Vec<Vec<f64>>,
    covs: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
struct EstimateJson {
    dim: usize,
    draws: Vec<DrawJson>,
    source_samples: usize,
    fingerprint: String,
}

/// Gibbs sampler configuration. `niw` of `None` selects data-driven defaults:
/// mean guess = sample mean, pseudo-count 0.01, dof = dim + 2, scale matrix =
/// sample covariance.
#[derive(Debug, Clone)]
pub struct DpgmmConfig {
    pub concentration: f64,
    pub niw: Option<NiwParams>,
    pub sweeps: usize,
    pub burn_in: usize,
    pub thinning: usize,
}

impl Default for DpgmmConfig {
    fn default() -> Self {
        DpgmmConfig {
            concentration: 1.0,
            niw: None,
            sweeps: 1000,
            burn_in: 500,
            thinning: 5,
        }
    }
}

impl DpgmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.concentration > 0.0) {
            return Err(Error::invalid("concentration must be positive"));
        }
        if self.burn_in >= self.sweeps {
            return Err(Error::invalid("burn-in must be smaller than sweeps"));
        }
        if self.thinning == 0 {
            return Err(Error::invalid("thinning must be positive"));
        }
        Ok(())
    }

    pub fn resolve_niw(&self, samples: &SampleSet) -> Result<NiwParams> {
        match &self.niw {
            Some(p) => {
                if p.dim() != samples.dim() {
                    return Err(Error::invalid("NIW prior dimension mismatch"));
                }
                Ok(p.clone())
            }
            None => NiwParams::new(
                samples.mean(),
                0.01,
                samples.dim() as f64 + 2.0,
                samples.covariance(),
            ),
        }
    }
}

/// Fit a DPGMM to the sample set, returning (sweeps − burn-in)/thinning
/// mixture realizations. Reproducible: identical inputs and RNG handle give a
/// bit-identical estimate.
pub fn fit_dpgmm(
    samples: &SampleSet,
    config: &DpgmmConfig,
    rng: &RngHandle,
) -> Result<DensityEstimate> {
    config.validate()?;
    let min_n = 2 * samples.dim() + 2;
    if samples.len() < min_n {
        return Err(Error::invalid(format!(
            "need at least {min_n} samples in dimension {}, got {}",
            samples.dim(),
            samples.len()
        )));
    }
    let mut prior = config.resolve_niw(samples)?;

    // The cluster statistics track uncentered second moments, which lose all
    // precision when the data mean is large relative to its spread. The fit
    // is shift-equivariant, so run the sampler on centered data and shift the
    // component means back afterwards.
    let center = samples.mean();
    let centered = SampleSet {
        points: samples.points.iter().map(|p| p - &center).collect(),
        dim: samples.dim,
    };
    prior.mean -= &center;

    let alpha = config.concentration;
    let mut r = rng.rng();
    let mut state = GibbsState::init(centered.points())?;
    let mut order: Vec<usize> = (0..centered.len()).collect();

    let mut draws = Vec::new();
    for s in 0..config.sweeps {
        crp::sweep(&mut state, centered.points(), &prior, alpha, &mut order, &mut r)?;
        if s >= config.burn_in && (s - config.burn_in) % config.thinning == 0 {
            draws.push(extract_draw(&state, &prior, alpha, &mut r)?.translated(&center)?);
        }
    }
    let fingerprint = fingerprint_fit(samples.len(), samples.dim(), config, rng);
    DensityEstimate::new(draws, samples.len(), fingerprint)
}

/// Convert a Gibbs partition state into an explicit normalized mixture:
/// weights from a Dirichlet over occupied-cluster counts (the DP mass α split
/// across occupied clusters), component parameters from each cluster's NIW
/// posterior.
pub fn extract_draw(
    state: &GibbsState,
    prior: &NiwParams,
    alpha: f64,
    rng: &mut ChaCha8Rng,
) -> Result<MixtureDraw> {
    let occupied: Vec<&ClusterStats> = state.occupied().map(|(_, s)| s).collect();
    let k = occupied.len();
    let mut raw = Vec::with_capacity(k);
    for stats in &occupied {
        let conc = stats.n as f64 + alpha / k as f64;
        let g = Gamma::new(conc, 1.0).map_err(|e| Error::numerical(format!("gamma: {e}")))?;
        raw.push(g.sample(rng).max(f64::MIN_POSITIVE));
    }
    let total: f64 = raw.iter().sum();
    let mut components = Vec::with_capacity(k);
    for (stats, w) in occupied.iter().zip(&raw) {
        let post = niw::posterior(prior, stats);
        let (mean, cov) = niw::sample(&post, rng)?;
        components.push(GaussianComponent::new(w / total, mean, SpdMatrix::new(cov)?)?);
    }
    // renormalize exactly against accumulated rounding
    let sum: f64 = components.iter().map(|c| c.weight).sum();
    for c in &mut components {
        *c = GaussianComponent::new(c.weight / sum, c.mean.clone(), c.cov.clone())?;
    }
    MixtureDraw::new(components)
}

fn fingerprint_fit(n: usize, dim: usize, config: &DpgmmConfig, rng: &RngHandle) -> String {
    let mut h = Fnv::new();
    h.write(b"dpgmm");
    h.write_u64(n as u64);
    h.write_u64(dim as u64);
    h.write_u64(config.concentration.to_bits());
    h.write_u64(config.sweeps as u64);
    h.write_u64(config.burn_in as u64);
    h.write_u64(config.thinning as u64);
    h.write_u64(rng.seed);
    h.write_u64(rng.stream);
    format!("{:016x}", h.finish())
}

/// Stable fingerprint of arbitrary text (resolved configs, CLI outputs).
pub fn fingerprint_text(s: &str) -> String {
    let mut h = Fnv::new();
    h.write(s.as_bytes());
    format!("{:016x}", h.finish())
}

/// FNV-1a, used only for stable config fingerprints embedded in outputs.
pub(crate) struct Fnv(u64);

impl Fnv {
    pub fn new() -> Self {
        Fnv(0xcbf29ce484222325)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x100000001b3);
        }
    }

    pub fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

/// Pointwise quantiles of the estimate's log density at `x`.
///
/// `levels` are central credible masses; each yields a (lo, hi) pair around
/// the median of {log DPGMM(x|θⱼ)} over the draws.
pub fn predictive_logpdf(
    estimate: &DensityEstimate,
    x: &Point,
    levels: &[f64],
) -> Result<(f64, Vec<(f64, f64)>)> {
    if levels.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
        return Err(Error::invalid("quantile levels must lie in (0, 1)"));
    }
    let mut values: Vec<f64> = estimate
        .draws
        .iter()
        .map(|d| mixture_logpdf(d, x))
        .collect::<Result<Vec<_>>>()?;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted_quantile(&values, 0.5);
    let bands = levels
        .iter()
        .map(|&q| {
            (
                sorted_quantile(&values, 0.5 - 0.5 * q),
                sorted_quantile(&values, 0.5 + 0.5 * q),
            )
        })
        .collect();
    Ok((median, bands))
}

/// CDF of a single 1-dim mixture draw at scalar `x`.
pub fn mixture_cdf_1d(draw: &MixtureDraw, x: f64) -> Result<f64> {
    if draw.dim() != 1 {
        return Err(Error::invalid(format!(
            "mixture_cdf_1d needs a 1-dim draw, got dim {}",
            draw.dim()
        )));
    }
    Ok(draw
        .components
        .iter()
        .map(|c| {
            let z = (x - c.mean[0]) / c.cov.matrix()[(0, 0)].sqrt();
            c.weight * 0.5 * statrs::function::erf::erfc(-z / std::f64::consts::SQRT_2)
        })
        .sum())
}

/// Quantile function of a single 1-dim mixture draw (inverse of
/// [`mixture_cdf_1d`]), solved by bisection.
pub fn mixture_quantile_1d(draw: &MixtureDraw, u: f64) -> Result<f64> {
    if draw.dim() != 1 {
        return Err(Error::invalid(format!(
            "mixture_quantile_1d needs a 1-dim draw, got dim {}",
            draw.dim()
        )));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::invalid(format!("quantile level {u} outside [0, 1]")));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for c in &draw.components {
        let sd = c.cov.matrix()[(0, 0)].sqrt();
        lo = lo.min(c.mean[0] - 12.0 * sd);
        hi = hi.max(c.mean[0] + 12.0 * sd);
    }
    let scale = (hi - lo).max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mixture_cdf_1d(draw, mid)? < u {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-14 * scale {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// CDF of the median reconstruction at scalar `x` (1-dim estimates only):
/// the median over mixture draws of each draw's Gaussian-mixture CDF. Unlike
/// the CDF of the pooled predictive, this does not absorb the between-draw
/// scatter, so it represents the typical single reconstruction.
pub fn median_cdf_1d(estimate: &DensityEstimate, x: f64) -> Result<f64> {
    if estimate.dim() != 1 {
        return Err(Error::invalid(format!(
            "median_cdf_1d needs a 1-dim estimate, got dim {}",
            estimate.dim()
        )));
    }
    let mut values = estimate
        .draws
        .iter()
        .map(|d| mixture_cdf_1d(d, x))
        .collect::<Result<Vec<f64>>>()?;
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(sorted_quantile(&values, 0.5))
}

/// CDF at scalar `x` of the median reconstruction taken pointwise in density
/// (1-dim estimates only): the pointwise median over mixture draws of the
/// density curves, renormalized, then integrated up to `x` on a trapezoid
/// grid. This is the "median distribution" in the usual band-plot sense; its
/// width sits between the typical single draw and the pooled predictive.
pub fn median_density_cdf_1d(estimate: &DensityEstimate, x: f64) -> Result<f64> {
    if estimate.dim() != 1 {
        return Err(Error::invalid(format!(
            "median_density_cdf_1d needs a 1-dim estimate, got dim {}",
            estimate.dim()
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for d in estimate.draws() {
        for c in d.components() {
            let sd = c.cov.matrix()[(0, 0)].sqrt();
            lo = lo.min(c.mean[0] - 10.0 * sd);
            hi = hi.max(c.mean[0] + 10.0 * sd);
        }
    }
    const N: usize = 4096;
    let step = (hi - lo) / N as f64;
    let mut scratch = vec![0.0; estimate.draws().len()];
    let mut med = |t: f64| -> f64 {
        let p = DVector::from_vec(vec![t]);
        for (v, d) in scratch.iter_mut().zip(estimate.draws()) {
            *v = d.log_density(&p).exp();
        }
        scratch.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted_quantile(&scratch, 0.5)
    };
    let mut total = 0.0;
    let mut below = 0.0;
    let mut prev = med(lo);
    for i in 1..=N {
        let t = lo + step * i as f64;
        let cur = med(t);
        let panel = 0.5 * (prev + cur) * step;
        total += panel;
        if t <= x {
            below += panel;
        } else if t - step < x {
            // split the panel containing x linearly
            below += panel * (x - (t - step)) / step;
        }
        prev = cur;
    }
    if total <= 0.0 {
        return Err(Error::numerical(
            "median density integrated to zero".to_string(),
        ));
    }
    Ok((below / total).clamp(0.0, 1.0))
}

/// Linear-interpolation quantile of a sorted slice.
pub fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single_gaussian_estimate(locs: &[f64], sd: f64) -> DensityEstimate {
        let draws = locs
            .iter()
            .map(|&m| {
                MixtureDraw::new(vec![GaussianComponent::new(
                    1.0,
                    DVector::from_vec(vec![m]),
                    SpdMatrix::new(DMatrix::from_vec(1, 1, vec![sd * sd])).unwrap(),
                )
                .unwrap()])
                .unwrap()
            })
            .collect();
        DensityEstimate::new(draws, 1, "test".into()).unwrap()
    }

    #[test]
    fn median_cdf_matches_standard_normal_for_identical_draws() {
        let est = single_gaussian_estimate(&[0.0, 0.0, 0.0], 1.0);
        assert_abs_diff_eq!(median_cdf_1d(&est, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        // tolerance limited by the erfc implementation, not the estimator
        assert_abs_diff_eq!(
            median_cdf_1d(&est, 1.0).unwrap(),
            0.8413447460685429,
            epsilon = 1e-9
        );
    }

    #[test]
    fn median_cdf_tracks_the_median_draw_not_the_pooled_spread() {
        // Draws scattered at ±5 around a central one: the pooled predictive
        // CDF at 0 is pulled toward 0.5 slowly, but the median draw's CDF
        // jumps like the central narrow Gaussian.
        let est = single_gaussian_estimate(&[-5.0, 0.0, 5.0], 0.1);
        assert_abs_diff_eq!(median_cdf_1d(&est, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        assert!(median_cdf_1d(&est, 1.0).unwrap() > 0.999);
        assert!(median_cdf_1d(&est, -1.0).unwrap() < 0.001);
    }

    #[test]
    fn median_density_cdf_matches_standard_normal_for_identical_draws() {
        let est = single_gaussian_estimate(&[0.0, 0.0, 0.0], 1.0);
        // tolerance limited by the trapezoid grid
        assert_abs_diff_eq!(
            median_density_cdf_1d(&est, 0.0).unwrap(),
            0.5,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            median_density_cdf_1d(&est, 1.0).unwrap(),
            0.8413447460685429,
            epsilon = 1e-6
        );
    }

    #[test]
    fn median_density_cdf_is_wider_than_median_cdf_under_center_scatter() {
        // Draws whose centers scatter: the pointwise-median density flattens
        // in the middle while keeping the single-draw tails, so its CDF is
        // strictly wider than the median-of-CDFs readout but narrower than
        // the pooled predictive.
        let est = single_gaussian_estimate(&[-0.8, -0.3, 0.0, 0.3, 0.8], 1.0);
        let x = 1.5;
        let med_cdf = median_cdf_1d(&est, x).unwrap();
        let mpdf_cdf = median_density_cdf_1d(&est, x).unwrap();
        let pooled = est
            .draws()
            .iter()
            .map(|d| mixture_cdf_1d(d, x).unwrap())
            .sum::<f64>()
            / est.draws().len() as f64;
        assert!(mpdf_cdf < med_cdf);
        assert!(mpdf_cdf > pooled);
    }

    #[test]
    fn median_cdf_rejects_multivariate_estimates() {
        let cov = SpdMatrix::new(DMatrix::identity(2, 2)).unwrap();
        let draw = MixtureDraw::new(vec![GaussianComponent::new(
            1.0,
            DVector::zeros(2),
            cov,
        )
        .unwrap()])
        .unwrap();
        let est = DensityEstimate::new(vec![draw], 1, "test".into()).unwrap();
        assert!(median_cdf_1d(&est, 0.0).is_err());
    }
}
