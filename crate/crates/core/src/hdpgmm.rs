//! Hierarchical combination of density estimates: an outer DPGMM over a
//! latent quantity observed only through per-event posterior sample sets.
//!
//! The nested integral over latents and inner mixture parameters is
//! Monte-Carlo-marginalized: every outer Gibbs sweep redraws one latent value
//! per event from that event's inner reconstruction (random inner draw, then
//! a sample from it), and the collapsed sweep runs on those latents.

use nalgebra::DVector;
use rand::Rng;

use crate::dpgmm::{
    self, extract_draw, fit_dpgmm, DensityEstimate, DpgmmConfig, GibbsState, SampleSet,
};
use crate::error::{Error, Result};
use crate::parallel::par_map;
use crate::rng::RngHandle;

/// One event: its posterior samples and, once fitted, the inner density
/// estimate that represents them.
#[derive(Debug, Clone)]
pub struct EventSampleSet {
    pub samples: SampleSet,
    pub inner: Option<DensityEstimate>,
}

impl EventSampleSet {
    pub fn new(samples: SampleSet) -> Self {
        EventSampleSet {
            samples,
            inner: None,
        }
    }

    pub fn with_inner(samples: SampleSet, inner: DensityEstimate) -> Result<Self> {
        if inner.dim() != samples.dim() {
            return Err(Error::invalid("inner estimate dimension mismatch"));
        }
        Ok(EventSampleSet {
            samples,
            inner: Some(inner),
        })
    }
}

/// Joint law of the per-event latent draws within one refresh round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatentCoupling {
    /// Each latent is sampled from its inner reconstruction independently.
    Independent,
    /// All latents share one uniform rank per round: latent i is its inner
    /// reconstruction's quantile at the common rank (1-dim only). Use this
    /// when the events' measurement densities move together but the joint
    /// draw structure is unknown.
    Comonotonic,
    /// All latents share one sample index per round: latent i is its event's
    /// sample at a common random column. Use this when the events' sample
    /// sets are index-aligned realizations of one shared random source —
    /// e.g. evidence groups whose j-th entries all derive from the same
    /// approximant draw θⱼ — so the exact joint law of the shared error mode
    /// is preserved. Requires every event to hold the same number of samples.
    Aligned,
}

#[derive(Debug, Clone)]
pub struct HdpgmmConfig {
    pub inner: DpgmmConfig,
    pub outer: DpgmmConfig,
    /// Latent refresh rounds per outer sweep (extra marginalization).
    pub marginalization_draws_per_sweep: usize,
    /// Dependence structure of the latent refresh across events.
    pub coupling: LatentCoupling,
}

impl Default for HdpgmmConfig {
    fn default() -> Self {
        HdpgmmConfig {
            inner: DpgmmConfig::default(),
            outer: DpgmmConfig::default(),
            marginalization_draws_per_sweep: 1,
            coupling: LatentCoupling::Independent,
        }
    }
}

impl HdpgmmConfig {
    pub fn validate(&self) -> Result<()> {
        self.inner.validate()?;
        self.outer.validate()?;
        if self.marginalization_draws_per_sweep == 0 {
            return Err(Error::invalid(
                "marginalization draws per sweep must be positive",
            ));
        }
        Ok(())
    }
}

/// Fit the inner DPGMM of a single event.
pub fn fit_inner(
    event: &EventSampleSet,
    config: &DpgmmConfig,
    rng: &RngHandle,
) -> Result<EventSampleSet> {
    let inner = fit_dpgmm(&event.samples, config, rng)?;
    Ok(EventSampleSet {
        samples: event.samples.clone(),
        inner: Some(inner),
    })
}

/// Fit all inner estimates, one independent RNG stream per event.
pub fn fit_inner_all(
    events: &[EventSampleSet],
    config: &DpgmmConfig,
    rng: &RngHandle,
) -> Result<Vec<EventSampleSet>> {
    par_map(events, |i, ev| fit_inner(ev, config, &rng.child(i as u64)))
        .into_iter()
        .collect()
}

/// Fit the outer DPGMM across events (Monte-Carlo latent marginalization).
pub fn fit_hdpgmm(
    events: &[EventSampleSet],
    config: &HdpgmmConfig,
    rng: &RngHandle,
) -> Result<DensityEstimate> {
    config.validate()?;
    if events.len() < 2 {
        return Err(Error::invalid("fit_hdpgmm needs at least 2 events"));
    }
    let inners: Vec<&DensityEstimate> = events
        .iter()
        .map(|e| {
            e.inner
                .as_ref()
                .ok_or_else(|| Error::invalid("event missing inner estimate"))
        })
        .collect::<Result<Vec<_>>>()?;
    let dim = inners[0].dim();
    if inners.iter().any(|e| e.dim() != dim) {
        return Err(Error::invalid("events differ in dimension"));
    }

    let outer_cfg = &config.outer;
    let alpha = outer_cfg.concentration;
    let mut r = rng.rng();

    // Initial latents fix the data-driven base measure for the whole run.
    // The Gibbs sweeps work on centered latents (the cluster statistics use
    // uncentered second moments, which lose precision far from the origin);
    // component means are shifted back when draws are extracted.
    let mut latents: Vec<DVector<f64>> = inners.iter().map(|e| e.sample(&mut r)).collect();
    let latent_set = latent_sample_set(&latents)?;
    let center = latent_set.mean();
    let mut prior = outer_cfg.resolve_niw(&latent_set)?;
    prior.mean -= &center;
    for l in &mut latents {
        *l -= &center;
    }

    if config.coupling == LatentCoupling::Comonotonic && dim != 1 {
        return Err(Error::invalid(
            "comonotonic latent coupling is only defined for 1-dim events",
        ));
    }
    if config.coupling == LatentCoupling::Aligned {
        let n = events[0].samples.len();
        if events.iter().any(|e| e.samples.len() != n) {
            return Err(Error::invalid(
                "aligned latent coupling needs the same sample count in every event",
            ));
        }
        if events.iter().any(|e| e.samples.dim() != dim) {
            return Err(Error::invalid("events differ in dimension"));
        }
    }

    let mut state = GibbsState::init(&latents)?;
    let mut order: Vec<usize> = (0..latents.len()).collect();
    let mut draws = Vec::new();
    for s in 0..outer_cfg.sweeps {
        for _ in 0..config.marginalization_draws_per_sweep {
            refresh_latents(
                &mut latents,
                &inners,
                events,
                &center,
                config.coupling,
                &mut state,
                &mut r,
            )?;
            dpgmm::gibbs_sweep(&mut state, &latents, &prior, alpha, &mut order, &mut r)?;
        }
        if s >= outer_cfg.burn_in && (s - outer_cfg.burn_in) % outer_cfg.thinning == 0 {
            draws.push(extract_draw(&state, &prior, alpha, &mut r)?.translated(&center)?);
        }
    }
    DensityEstimate::new(
        draws,
        events.len(),
        format!("hdpgmm-{}", latent_set.len()),
    )
}

fn latent_sample_set(latents: &[DVector<f64>]) -> Result<SampleSet> {
    SampleSet::from_rows(
        &latents
            .iter()
            .map(|v| v.iter().cloned().collect())
            .collect::<Vec<Vec<f64>>>(),
    )
}

/// Replace every latent with a fresh (centered) draw from its inner
/// reconstruction and rebuild the partition's sufficient statistics in place.
/// Under comonotonic coupling the draws of one round share a single uniform
/// rank, so any error mode common to all events moves them together.
fn refresh_latents(
    latents: &mut [DVector<f64>],
    inners: &[&DensityEstimate],
    events: &[EventSampleSet],
    center: &DVector<f64>,
    coupling: LatentCoupling,
    state: &mut GibbsState,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<()> {
    match coupling {
        LatentCoupling::Independent => {
            for (latent, inner) in latents.iter_mut().zip(inners) {
                *latent = inner.sample(rng) - center;
            }
        }
        LatentCoupling::Comonotonic => {
            let u: f64 = rng.random();
            for (latent, inner) in latents.iter_mut().zip(inners) {
                // marginally still a draw from the inner reconstruction:
                // random mixture realization, then its quantile at the rank
                let draws = inner.draws();
                let draw = &draws[rng.random_range(0..draws.len())];
                let x = dpgmm::mixture_quantile_1d(draw, u)?;
                *latent = DVector::from_vec(vec![x]) - center;
            }
        }
        LatentCoupling::Aligned => {
            let column = rng.random_range(0..events[0].samples.len());
            for (latent, event) in latents.iter_mut().zip(events) {
                *latent = event.samples.point(column) - center;
            }
        }
    }
    state.rebuild_stats(latents);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpgmm::{GaussianComponent, MixtureDraw};
    use crate::prob::SpdMatrix;
    use nalgebra::DMatrix;
    use rand_distr::{Distribution, Normal};

    fn gaussian_estimate(mean: f64, sd: f64, n_draws: usize) -> DensityEstimate {
        let draws = (0..n_draws)
            .map(|_| {
                MixtureDraw::new(vec![GaussianComponent::new(
                    1.0,
                    DVector::from_vec(vec![mean]),
                    SpdMatrix::new(DMatrix::from_vec(1, 1, vec![sd * sd])).unwrap(),
                )
                .unwrap()])
                .unwrap()
            })
            .collect();
        DensityEstimate::new(draws, 1, "analytic".into()).unwrap()
    }

    fn quick_config() -> HdpgmmConfig {
        HdpgmmConfig {
            inner: DpgmmConfig {
                sweeps: 200,
                burn_in: 100,
                thinning: 2,
                ..DpgmmConfig::default()
            },
            outer: DpgmmConfig {
                sweeps: 300,
                burn_in: 150,
                thinning: 3,
                ..DpgmmConfig::default()
            },
            marginalization_draws_per_sweep: 1,
            coupling: LatentCoupling::Independent,
        }
    }

    #[test]
    fn fit_inner_recovers_location_and_is_deterministic() {
        let rng = RngHandle::new(5);
        let mut r = rng.child(99).rng();
        let normal = Normal::new(3.0, 1.0).unwrap();
        let vals: Vec<f64> = (0..1000).map(|_| normal.sample(&mut r)).collect();
        let event = EventSampleSet::new(SampleSet::from_scalars(&vals).unwrap());
        let cfg = quick_config().inner;
        let fitted = fit_inner(&event, &cfg, &rng).unwrap();
        let est = fitted.inner.as_ref().unwrap();

        // grid-search the median density peak
        let mut best = (f64::NEG_INFINITY, 0.0);
        let mut x = 0.0;
        while x < 6.0 {
            let (m, _) = dpgmm::predictive_logpdf(est, &crate::prob::Point::from(x), &[]).unwrap();
            if m > best.0 {
                best = (m, x);
            }
            x += 0.02;
        }
        assert!(
            best.1 > 2.8 && best.1 < 3.2,
            "peak at {} not near 3",
            best.1
        );

        let refit = fit_inner(&event, &cfg, &rng).unwrap();
        assert_eq!(
            fitted.inner.unwrap().to_json().unwrap(),
            refit.inner.unwrap().to_json().unwrap()
        );
    }

    #[test]
    fn delta_inner_limit_matches_direct_fit() {
        // Narrow inner densities at fixed locations: the outer fit should be
        // close to a DPGMM fit on the locations themselves.
        let rng = RngHandle::new(17);
        let mut r = rng.child(1).rng();
        let normal = Normal::new(0.0, 1.0).unwrap();
        let locations: Vec<f64> = (0..60).map(|_| normal.sample(&mut r)).collect();
        let events: Vec<EventSampleSet> = locations
            .iter()
            .map(|&z| {
                EventSampleSet::with_inner(
                    SampleSet::from_scalars(&[z]).unwrap(),
                    gaussian_estimate(z, 1e-4, 20),
                )
                .unwrap()
            })
            .collect();
        let cfg = quick_config();
        let outer = fit_hdpgmm(&events, &cfg, &rng).unwrap();

        let direct = fit_dpgmm(
            &SampleSet::from_scalars(&locations).unwrap(),
            &cfg.outer,
            &rng.child(2),
        )
        .unwrap();

        // Compare median log densities over the bulk.
        for &x in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
            let p = crate::prob::Point::from(x);
            let (m1, _) = dpgmm::predictive_logpdf(&outer, &p, &[]).unwrap();
            let (m2, _) = dpgmm::predictive_logpdf(&direct, &p, &[]).unwrap();
            assert!(
                (m1 - m2).abs() < 0.5,
                "outer {m1} vs direct {m2} at x = {x}"
            );
        }
    }

    #[test]
    fn synthetic_hierarchy_recovers_hyper_distribution() {
        // events ~ N(z_i, 0.1) around z_i ~ N(0,1); outer should match N(0,1)
        let rng = RngHandle::new(23);
        let mut r = rng.child(0).rng();
        let hyper = Normal::new(0.0, 1.0).unwrap();
        let events: Vec<EventSampleSet> = (0..80)
            .map(|_| {
                let z = hyper.sample(&mut r);
                EventSampleSet::with_inner(
                    SampleSet::from_scalars(&[z]).unwrap(),
                    gaussian_estimate(z, 0.1, 30),
                )
                .unwrap()
            })
            .collect();
        let outer = fit_hdpgmm(&events, &quick_config(), &rng).unwrap();
        for &x in &[-1.0, 0.0, 1.0] {
            let p = crate::prob::Point::from(x);
            let truth = crate::prob::mvn_logpdf(
                &p,
                &crate::prob::Point::from(0.0),
                &SpdMatrix::from_rows(&[vec![1.0]]).unwrap(),
            )
            .unwrap();
            let (_, bands) = dpgmm::predictive_logpdf(&outer, &p, &[0.9]).unwrap();
            let (lo, hi) = bands[0];
            // allow generous slack: 80 events is a small hierarchy
            assert!(
                truth > lo - 0.5 && truth < hi + 0.5,
                "truth {truth} outside [{lo}, {hi}] at x = {x}"
            );
        }
    }

    #[test]
    fn missing_inner_estimate_errors() {
        let events = vec![
            EventSampleSet::new(SampleSet::from_scalars(&[0.0, 1.0]).unwrap()),
            EventSampleSet::new(SampleSet::from_scalars(&[0.5, 1.5]).unwrap()),
        ];
        assert!(fit_hdpgmm(&events, &quick_config(), &RngHandle::new(1)).is_err());
    }

    #[test]
    fn event_permutation_is_distributionally_stable() {
        let rng = RngHandle::new(31);
        let mut r = rng.child(7).rng();
        let hyper = Normal::new(0.0, 1.0).unwrap();
        let events: Vec<EventSampleSet> = (0..40)
            .map(|_| {
                let z = hyper.sample(&mut r);
                EventSampleSet::with_inner(
                    SampleSet::from_scalars(&[z]).unwrap(),
                    gaussian_estimate(z, 0.1, 20),
                )
                .unwrap()
            })
            .collect();
        let mut reversed = events.clone();
        reversed.reverse();
        let cfg = quick_config();
        let a = fit_hdpgmm(&events, &cfg, &rng).unwrap();
        let b = fit_hdpgmm(&reversed, &cfg, &rng).unwrap();
        let p = crate::prob::Point::from(0.0);
        let (ma, _) = dpgmm::predictive_logpdf(&a, &p, &[]).unwrap();
        let (mb, _) = dpgmm::predictive_logpdf(&b, &p, &[]).unwrap();
        assert!((ma - mb).abs() < 0.5, "median densities {ma} vs {mb}");
    }
}
