//! Run configuration: JSON file merged with command-line flags (flags win),
//! resolved to concrete values before execution and echoed into every output.

use std::path::Path;

use serde::{Deserialize, Serialize};
use zinfer::dpgmm::DpgmmConfig;
use zinfer::evidence::PipelineConfig;
use zinfer::hdpgmm::HdpgmmConfig;
use zinfer::testbeds::{McmcConfig, NsConfig};
use zinfer::{Error, Result};

macro_rules! fill {
    ($dst:expr, $src:expr, $($field:ident).+) => {
        if $dst.$($field).+.is_none() {
            $dst.$($field).+ = $src.$($field).+.clone();
        }
    };
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// Worker-thread cap; 0 = library default.
    pub threads: Option<usize>,
    pub pipeline: PipelineSection,
    pub mcmc: McmcSection,
    pub ns: NsSection,
    pub pp: PpSection,
    pub tail: TailSection,
    pub example: ExampleSection,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineSection {
    pub bulk_fraction: Option<f64>,
    pub subset_size: Option<usize>,
    pub sweeps: Option<usize>,
    pub burn_in: Option<usize>,
    pub thinning: Option<usize>,
    pub inner_sweeps: Option<usize>,
    pub inner_burn_in: Option<usize>,
    pub inner_thinning: Option<usize>,
    pub outer_sweeps: Option<usize>,
    pub outer_burn_in: Option<usize>,
    pub outer_thinning: Option<usize>,
    pub posterior_draws: Option<usize>,
    pub log_space: Option<bool>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McmcSection {
    pub chains: Option<usize>,
    pub steps: Option<usize>,
    pub burn_in: Option<usize>,
    pub thinning: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NsSection {
    pub live_points: Option<usize>,
    pub dlogz: Option<f64>,
    pub walk_steps: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PpSection {
    pub problem: Option<String>,
    pub realizations: Option<usize>,
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailSection {
    pub dof: Option<f64>,
    pub samples: Option<usize>,
    pub grid_half: Option<f64>,
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExampleSection {
    /// Posterior sample count for analytically sampled examples.
    pub samples: Option<usize>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig> {
        match path {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::input(format!("config {}: {e}", p.display())))
            }
        }
    }

    /// Fill any unset field from `defaults`; afterwards the config is fully
    /// concrete.
    pub fn resolve(mut self, defaults: &RunConfig) -> RunConfig {
        fill!(self, defaults, seed);
        fill!(self, defaults, threads);
        fill!(self, defaults, pipeline.bulk_fraction);
        fill!(self, defaults, pipeline.subset_size);
        fill!(self, defaults, pipeline.sweeps);
        fill!(self, defaults, pipeline.burn_in);
        fill!(self, defaults, pipeline.thinning);
        fill!(self, defaults, pipeline.inner_sweeps);
        fill!(self, defaults, pipeline.inner_burn_in);
        fill!(self, defaults, pipeline.inner_thinning);
        fill!(self, defaults, pipeline.outer_sweeps);
        fill!(self, defaults, pipeline.outer_burn_in);
        fill!(self, defaults, pipeline.outer_thinning);
        fill!(self, defaults, pipeline.posterior_draws);
        fill!(self, defaults, pipeline.log_space);
        fill!(self, defaults, mcmc.chains);
        fill!(self, defaults, mcmc.steps);
        fill!(self, defaults, mcmc.burn_in);
        fill!(self, defaults, mcmc.thinning);
        fill!(self, defaults, ns.live_points);
        fill!(self, defaults, ns.dlogz);
        fill!(self, defaults, ns.walk_steps);
        fill!(self, defaults, pp.problem);
        fill!(self, defaults, pp.realizations);
        fill!(self, defaults, pp.samples);
        fill!(self, defaults, tail.dof);
        fill!(self, defaults, tail.samples);
        fill!(self, defaults, tail.grid_half);
        fill!(self, defaults, tail.grid_points);
        fill!(self, defaults, example.samples);
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn threads(&self) -> usize {
        self.threads.unwrap_or(0)
    }

    pub fn pipeline_config(&self) -> PipelineConfig {
        let base = PipelineConfig::default();
        let p = &self.pipeline;
        PipelineConfig {
            bulk_fraction: p.bulk_fraction.unwrap_or(base.bulk_fraction),
            subset_size: p.subset_size.unwrap_or(base.subset_size),
            dpgmm: DpgmmConfig {
                sweeps: p.sweeps.unwrap_or(base.dpgmm.sweeps),
                burn_in: p.burn_in.unwrap_or(base.dpgmm.burn_in),
                thinning: p.thinning.unwrap_or(base.dpgmm.thinning),
                ..base.dpgmm.clone()
            },
            hdpgmm: HdpgmmConfig {
                inner: DpgmmConfig {
                    sweeps: p.inner_sweeps.unwrap_or(base.hdpgmm.inner.sweeps),
                    burn_in: p.inner_burn_in.unwrap_or(base.hdpgmm.inner.burn_in),
                    thinning: p.inner_thinning.unwrap_or(base.hdpgmm.inner.thinning),
                    ..base.hdpgmm.inner.clone()
                },
                outer: DpgmmConfig {
                    sweeps: p.outer_sweeps.unwrap_or(base.hdpgmm.outer.sweeps),
                    burn_in: p.outer_burn_in.unwrap_or(base.hdpgmm.outer.burn_in),
                    thinning: p.outer_thinning.unwrap_or(base.hdpgmm.outer.thinning),
                    ..base.hdpgmm.outer.clone()
                },
                ..base.hdpgmm
            },
            log_space: p.log_space.unwrap_or(base.log_space),
            posterior_draws: p.posterior_draws.unwrap_or(base.posterior_draws),
        }
    }

    pub fn mcmc_config(&self) -> McmcConfig {
        let base = McmcConfig::default();
        McmcConfig {
            chains: self.mcmc.chains.unwrap_or(base.chains),
            steps: self.mcmc.steps.unwrap_or(base.steps),
            burn_in: self.mcmc.burn_in.unwrap_or(base.burn_in),
            thinning: self.mcmc.thinning.unwrap_or(base.thinning),
            ..base
        }
    }

    pub fn ns_config(&self) -> NsConfig {
        let base = NsConfig::default();
        NsConfig {
            live_points: self.ns.live_points.unwrap_or(base.live_points),
            dlogz: self.ns.dlogz.unwrap_or(base.dlogz),
            walk_steps: self.ns.walk_steps.unwrap_or(base.walk_steps),
            ..base
        }
    }
}
