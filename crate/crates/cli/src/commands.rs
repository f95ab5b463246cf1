//! Subcommand implementations.

use std::path::Path;

use serde::Serialize;
use zinfer::evidence::{
    bayes_factor_posterior, harmonic_mean_log_evidence, infer_log_evidence,
    retargeted_harmonic_mean_log_evidence, EvidencePosterior, PipelineWarnings,
};
use zinfer::parallel::with_thread_cap;
use zinfer::rng::RngHandle;
use zinfer::testbeds::{
    analytic_posterior_samples, bivariate_params_problem, generate_bivariate_dataset,
    generate_gaussian_dataset, metropolis_sample, model_pair_gaussian_gennormal, neal_problem,
    nested_sampling_log_evidence, nix2_problem, pp_test, student_t_tail_demo, NsResult,
    ProblemSpec, FIXTURE_SEED,
};
use zinfer::{io, Error, Result};

use crate::config::RunConfig;
use crate::report::{csv_header, ensure_out_dir, Report};

#[derive(Serialize)]
pub struct PosteriorSummary {
    pub median: f64,
    pub lower68: f64,
    pub upper68: f64,
    /// median^{+plus}_{−minus} convention.
    pub plus: f64,
    pub minus: f64,
}

impl From<&EvidencePosterior> for PosteriorSummary {
    fn from(p: &EvidencePosterior) -> Self {
        PosteriorSummary {
            median: p.median,
            lower68: p.lower68,
            upper68: p.upper68,
            plus: p.upper68 - p.median,
            minus: p.median - p.lower68,
        }
    }
}

#[derive(Serialize)]
struct InferResult {
    n_samples: usize,
    dim: usize,
    log_evidence: PosteriorSummary,
    harmonic_mean: f64,
    warnings: PipelineWarnings,
}

pub fn cmd_infer(input: &Path, config: &RunConfig, out: &Path) -> Result<()> {
    let samples = io::read_weighted_samples(input)?;
    let pipeline = config.pipeline_config();
    let handle = RngHandle::new(config.seed());
    let (posterior, warnings) = with_thread_cap(config.threads(), || {
        infer_log_evidence(&samples, &pipeline, &handle)
    })?;
    let result = InferResult {
        n_samples: samples.len(),
        dim: samples.dim(),
        log_evidence: PosteriorSummary::from(&posterior),
        harmonic_mean: harmonic_mean_log_evidence(&samples)?,
        warnings,
    };
    ensure_out_dir(out)?;
    Report::new("infer", config, result)?.write(&out.join("infer.json"))?;

    let mut csv = csv_header("infer", config)?;
    csv.push_str("log_z\n");
    for d in &posterior.draws {
        csv.push_str(&format!("{d}\n"));
    }
    std::fs::write(out.join("log_z_draws.csv"), csv)?;
    Ok(())
}

#[derive(Serialize)]
struct Reference {
    kind: &'static str,
    log_z: f64,
    err: Option<f64>,
    note: Option<String>,
}

#[derive(Serialize)]
struct ExampleResult {
    name: String,
    hierarchical: PosteriorSummary,
    harmonic_mean: f64,
    retargeted_harmonic_mean: Option<f64>,
    reference: Reference,
    agreement: bool,
    mcmc_acceptance: Option<f64>,
    warnings: PipelineWarnings,
}

/// Per-example defaults, overridden by anything the user set.
pub fn example_defaults(name: &str) -> RunConfig {
    let mut d = RunConfig::default();
    match name {
        "neal" => {
            d.example.samples = Some(3000);
            d.pipeline.subset_size = Some(200);
        }
        "nix2" => {
            d.example.samples = Some(14_050);
            d.pipeline.subset_size = Some(1000);
        }
        _ => {
            d.pipeline.subset_size = Some(200);
        }
    }
    d
}

pub fn cmd_example(name: &str, config: &RunConfig, out: &Path) -> Result<()> {
    ensure_out_dir(out)?;
    match name {
        "neal" | "nix2" => analytic_example(name, config, out),
        "bivariate" => bivariate_example(config, out),
        "model-pair" => model_pair_example(config, out),
        _ => Err(Error::input(format!(
            "unknown example `{name}`; valid names: neal, nix2, bivariate, model-pair"
        ))),
    }
}

fn analytic_example(name: &str, config: &RunConfig, out: &Path) -> Result<()> {
    let problem = match name {
        "neal" => neal_problem()?,
        _ => nix2_problem()?,
    };
    let n = config.example.samples.unwrap_or(3000);
    let handle = RngHandle::new(config.seed());
    let samples = analytic_posterior_samples(&problem, n, &handle.child(0))?;
    let pipeline = config.pipeline_config();
    let (posterior, warnings) = with_thread_cap(config.threads(), || {
        infer_log_evidence(&samples, &pipeline, &handle.child(1))
    })?;

    let truth = problem
        .analytic_log_evidence
        .expect("analytic examples have a reference");
    let (lo90, hi90) = posterior.credible_interval(0.9);
    let retargeted = problem.posterior_logpdf.as_ref().map(|post| {
        retargeted_harmonic_mean_log_evidence(&samples, &|x| post(x.as_slice()))
    });
    let result = ExampleResult {
        name: name.to_string(),
        hierarchical: PosteriorSummary::from(&posterior),
        harmonic_mean: harmonic_mean_log_evidence(&samples)?,
        retargeted_harmonic_mean: retargeted.transpose()?,
        reference: Reference {
            kind: "analytic",
            log_z: truth,
            err: None,
            note: (name == "nix2").then(|| "rounds to -9.3".to_string()),
        },
        agreement: lo90 <= truth && truth <= hi90,
        mcmc_acceptance: None,
        warnings,
    };
    Report::new(&format!("example-{name}"), config, result)?
        .write(&out.join(format!("example_{name}.json")))
}

/// Run MCMC then the evidence pipeline on a problem.
fn mcmc_pipeline(
    problem: &ProblemSpec,
    config: &RunConfig,
    handle: &RngHandle,
) -> Result<(EvidencePosterior, PipelineWarnings, f64, f64)> {
    let (samples, acceptance) = metropolis_sample(problem, &config.mcmc_config(), &handle.child(0))?;
    let pipeline = config.pipeline_config();
    let (posterior, warnings) = infer_log_evidence(&samples, &pipeline, &handle.child(1))?;
    let hm = harmonic_mean_log_evidence(&samples)?;
    Ok((posterior, warnings, acceptance, hm))
}

fn bivariate_example(config: &RunConfig, out: &Path) -> Result<()> {
    let problem = bivariate_params_problem(generate_bivariate_dataset(FIXTURE_SEED))?;
    let handle = RngHandle::new(config.seed());
    let (posterior, warnings, acceptance, hm) = with_thread_cap(config.threads(), || {
        mcmc_pipeline(&problem, config, &handle)
    })?;
    let ns = with_thread_cap(config.threads(), || {
        nested_sampling_log_evidence(&problem, &config.ns_config(), &handle.child(2))
    })?;

    let half_width = 0.5 * (posterior.upper68 - posterior.lower68);
    let combined = (half_width * half_width + ns.log_z_err * ns.log_z_err).sqrt();
    let result = ExampleResult {
        name: "bivariate".to_string(),
        hierarchical: PosteriorSummary::from(&posterior),
        harmonic_mean: hm,
        retargeted_harmonic_mean: None,
        reference: Reference {
            kind: "nested-sampling",
            log_z: ns.log_z,
            err: Some(ns.log_z_err),
            note: None,
        },
        agreement: (posterior.median - ns.log_z).abs() < 3.0 * combined,
        mcmc_acceptance: Some(acceptance),
        warnings,
    };
    Report::new("example-bivariate", config, result)?.write(&out.join("example_bivariate.json"))
}

#[derive(Serialize)]
struct ModelPairResult {
    name: &'static str,
    gaussian: PosteriorSummary,
    gen_normal: PosteriorSummary,
    /// log B in favour of the Gaussian model.
    log_bayes_factor: PosteriorSummary,
    lower90: f64,
    upper90: f64,
    ns_log_bayes_factor: f64,
    ns_err: f64,
    /// 90% regions of the hierarchical posterior and the NS Gaussian
    /// approximation intersect.
    overlap_90: bool,
    positive_median: bool,
    mcmc_acceptance: [f64; 2],
}

fn model_pair_example(config: &RunConfig, out: &Path) -> Result<()> {
    let (h_n, h_gn) = model_pair_gaussian_gennormal(generate_gaussian_dataset(FIXTURE_SEED))?;
    let handle = RngHandle::new(config.seed());

    let (post_n, _, acc_n, _) = with_thread_cap(config.threads(), || {
        mcmc_pipeline(&h_n, config, &handle.child(0))
    })?;
    let (post_gn, _, acc_gn, _) = with_thread_cap(config.threads(), || {
        mcmc_pipeline(&h_gn, config, &handle.child(1))
    })?;

    let log_b_draws = bayes_factor_posterior(&post_n, &post_gn, 5000, &handle.child(2));
    let log_b = EvidencePosterior::from_draws(log_b_draws, post_n.outer.clone())?;
    let (lo90, hi90) = log_b.credible_interval(0.9);

    let ns_cfg = config.ns_config();
    let ns_n = with_thread_cap(config.threads(), || {
        nested_sampling_log_evidence(&h_n, &ns_cfg, &handle.child(3))
    })?;
    let ns_gn = with_thread_cap(config.threads(), || {
        nested_sampling_log_evidence(&h_gn, &ns_cfg, &handle.child(4))
    })?;
    // NS posteriors approximated as Gaussians in log Z, so log B is Gaussian
    // with summed variances.
    let ns_log_b = ns_n.log_z - ns_gn.log_z;
    let ns_err = (ns_n.log_z_err.powi(2) + ns_gn.log_z_err.powi(2)).sqrt();
    let z90 = 1.6448536269514722; // Φ⁻¹(0.95)
    let ns_lo = ns_log_b - z90 * ns_err;
    let ns_hi = ns_log_b + z90 * ns_err;

    let result = ModelPairResult {
        name: "model-pair",
        gaussian: PosteriorSummary::from(&post_n),
        gen_normal: PosteriorSummary::from(&post_gn),
        log_bayes_factor: PosteriorSummary::from(&log_b),
        lower90: lo90,
        upper90: hi90,
        ns_log_bayes_factor: ns_log_b,
        ns_err,
        overlap_90: lo90 <= ns_hi && ns_lo <= hi90,
        positive_median: log_b.median > 0.0,
        mcmc_acceptance: [acc_n, acc_gn],
    };
    Report::new("example-model-pair", config, result)?.write(&out.join("example_model_pair.json"))
}

#[derive(Serialize)]
struct PpVerdict {
    problem: String,
    realizations: usize,
    samples_per_realization: usize,
    inside_band: bool,
    ks_pvalue: f64,
    low_power: bool,
    pass: bool,
}

pub fn cmd_pp_test(config: &RunConfig, out: &Path) -> Result<()> {
    let problem_name = config.pp.problem.clone().unwrap_or_else(|| "neal".to_string());
    let problem = match problem_name.as_str() {
        "neal" => neal_problem()?,
        "nix2" => nix2_problem()?,
        other => {
            return Err(Error::input(format!(
                "pp-test needs an analytic problem (neal, nix2), got `{other}`"
            )))
        }
    };
    let realizations = config.pp.realizations.unwrap_or(100);
    let samples = config.pp.samples.unwrap_or(3000);
    let pipeline = config.pipeline_config();
    let handle = RngHandle::new(config.seed());
    let res = with_thread_cap(config.threads(), || {
        pp_test(&problem, realizations, samples, &pipeline, &handle)
    })?;

    ensure_out_dir(out)?;
    let mut csv = csv_header("pp-test", config)?;
    csv.push_str("k,quantile,band_lo,band_hi\n");
    for (k, (&q, &(lo, hi))) in res.quantiles.iter().zip(&res.band).enumerate() {
        csv.push_str(&format!("{},{q},{lo},{hi}\n", k + 1));
    }
    std::fs::write(out.join("pp_quantiles.csv"), csv)?;

    let verdict = PpVerdict {
        problem: problem_name,
        realizations,
        samples_per_realization: samples,
        inside_band: res.inside_band,
        ks_pvalue: res.ks_pvalue,
        low_power: res.low_power,
        pass: res.inside_band && res.ks_pvalue > 0.01,
    };
    Report::new("pp-test", config, verdict)?.write(&out.join("pp_verdict.json"))
}

pub fn cmd_tail_demo(config: &RunConfig, out: &Path) -> Result<()> {
    let dof = config.tail.dof.unwrap_or(10.0);
    let samples = config.tail.samples.unwrap_or(10_000);
    let grid_half = config.tail.grid_half.unwrap_or(12.0);
    let grid_points = config.tail.grid_points.unwrap_or(121);
    let pipeline = config.pipeline_config();
    let handle = RngHandle::new(config.seed());
    let demo = with_thread_cap(config.threads(), || {
        student_t_tail_demo(dof, samples, grid_half, grid_points, &pipeline.dpgmm, &handle)
    })?;
    ensure_out_dir(out)?;
    let csv = csv_header("tail-demo", config)? + &demo.to_csv();
    std::fs::write(out.join("tail_demo.csv"), csv)?;
    Ok(())
}

#[derive(Serialize)]
struct NsReport {
    problem: String,
    log_z: f64,
    err: f64,
    iterations: usize,
    information: f64,
    analytic_reference: Option<f64>,
}

pub fn cmd_ns(name: &str, config: &RunConfig, out: &Path) -> Result<()> {
    let problem = match name {
        "neal" => neal_problem()?,
        "nix2" => nix2_problem()?,
        "bivariate" => bivariate_params_problem(generate_bivariate_dataset(FIXTURE_SEED))?,
        "gaussian" => model_pair_gaussian_gennormal(generate_gaussian_dataset(FIXTURE_SEED))?.0,
        "gen-normal" => model_pair_gaussian_gennormal(generate_gaussian_dataset(FIXTURE_SEED))?.1,
        other => {
            return Err(Error::input(format!(
                "unknown problem `{other}`; valid: neal, nix2, bivariate, gaussian, gen-normal"
            )))
        }
    };
    let handle = RngHandle::new(config.seed());
    let ns: NsResult = with_thread_cap(config.threads(), || {
        nested_sampling_log_evidence(&problem, &config.ns_config(), &handle)
    })?;
    ensure_out_dir(out)?;
    let result = NsReport {
        problem: name.to_string(),
        log_z: ns.log_z,
        err: ns.log_z_err,
        iterations: ns.iterations,
        information: ns.information,
        analytic_reference: problem.analytic_log_evidence,
    };
    Report::new("ns", config, result)?.write(&out.join("ns.json"))
}
