//! Scale diagnostic for the hierarchical combination: compares the
//! realization-to-realization scatter of the point estimate against the
//! widths that different combination rules would produce.

use zinfer::dpgmm::{fit_dpgmm, sorted_quantile};
use zinfer::evidence::{
    infer_log_evidence_with_approximant, select_bulk_subset, zhat_group, PipelineConfig,
};
use zinfer::rng::RngHandle;
use zinfer::testbeds::{analytic_posterior_samples, neal_problem};

fn sd(v: &[f64]) -> f64 {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)).sqrt()
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let realizations: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(20);
    let samples: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(600);
    let mut config = PipelineConfig::default();
    if let Some(s) = args.get(3) {
        config.subset_size = s.parse().unwrap();
    }
    let problem = neal_problem().unwrap();
    let truth = problem.analytic_log_evidence.unwrap();
    let rng = RngHandle::with_stream(2, 22);

    let mut medians = Vec::new();
    let mut widths = Vec::new();
    let mut betweens = Vec::new();
    let mut withins = Vec::new();
    let mut commons = Vec::new();
    let mut qs = Vec::new();
    let mut q_mpdfs = Vec::new();
    let mut q_pools = Vec::new();
    let mut q_means = Vec::new();
    let mut q_kdes = Vec::new();
    let mut mean_sds = Vec::new();
    let mut pool_hws = Vec::new();
    for i in 0..realizations {
        let handle = rng.child(i as u64);
        let data = analytic_posterior_samples(&problem, samples, &handle.child(0)).unwrap();
        let inner_rng = handle.child(1);
        let estimate = fit_dpgmm(data.points(), &config.dpgmm, &inner_rng.child(1)).unwrap();

        let subset = select_bulk_subset(&data, &config, &inner_rng.child(2)).unwrap();
        let mut group_medians = Vec::new();
        let mut group_sds = Vec::new();
        let mut per_draw: Vec<Vec<f64>> = Vec::new();
        for &idx in &subset {
            let g = zhat_group(&data, idx, &estimate).unwrap().log_zhat;
            if per_draw.is_empty() {
                per_draw = vec![Vec::new(); g.len()];
            }
            for (j, &v) in g.iter().enumerate() {
                per_draw[j].push(v);
            }
            let mut g = g;
            g.sort_by(|a, b| a.partial_cmp(b).unwrap());
            group_medians.push(sorted_quantile(&g, 0.5));
            group_sds.push(sd(&g));
        }
        // common mode: per-approximant-draw mean over groups
        let draw_means: Vec<f64> = per_draw
            .iter()
            .map(|col| col.iter().sum::<f64>() / col.len() as f64)
            .collect();
        let common = sd(&draw_means);
        let (post, _) =
            infer_log_evidence_with_approximant(&data, &estimate, &config, &inner_rng).unwrap();
        let q = zinfer::dpgmm::median_cdf_1d(&post.outer, truth).unwrap();
        let q_mpdf = zinfer::dpgmm::median_density_cdf_1d(&post.outer, truth).unwrap();
        let q_pool = post.quantile_of(truth);
        // distribution of per-draw mixture means
        let draw_means: Vec<f64> = post
            .outer
            .draws()
            .iter()
            .map(|d| {
                d.components()
                    .iter()
                    .map(|c| c.weight * c.mean[0])
                    .sum::<f64>()
            })
            .collect();
        let q_mean =
            draw_means.iter().filter(|&&m| m < truth).count() as f64 / draw_means.len() as f64;
        let mean_sd = sd(&draw_means);
        // KDE-smoothed CDF over draw means (Silverman-style bandwidth)
        let h = 0.9 * mean_sd * (draw_means.len() as f64).powf(-0.2);
        let q_kde = draw_means
            .iter()
            .map(|m| 0.5 * statrs::function::erf::erfc(-((truth - m) / h) / std::f64::consts::SQRT_2))
            .sum::<f64>()
            / draw_means.len() as f64;
        let mut sorted_draws = post.draws.clone();
        sorted_draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let pool_hw = 0.5
            * (sorted_quantile(&sorted_draws, 0.84) - sorted_quantile(&sorted_draws, 0.16));

        medians.push(post.median);
        widths.push(0.5 * (post.upper68 - post.lower68));
        betweens.push(sd(&group_medians));
        withins.push(group_sds.iter().sum::<f64>() / group_sds.len() as f64);
        commons.push(common);
        qs.push(q);
        q_mpdfs.push(q_mpdf);
        q_pools.push(q_pool);
        q_means.push(q_mean);
        q_kdes.push(q_kde);
        mean_sds.push(mean_sd);
        pool_hws.push(pool_hw);
        println!(
            "run {i:2}: median {:+.4} err {:+.4} hw68 {:.4} poolhw {:.4} meansd {:.4} between {:.4} within {:.4} common {:.4} q {:.3} qp {:.3} qm {:.3}",
            post.median,
            post.median - truth,
            widths[i],
            pool_hw,
            mean_sd,
            betweens[i],
            withins[i],
            common,
            q,
            q_pool,
            q_mean
        );
    }
    let errs: Vec<f64> = medians.iter().map(|m| m - truth).collect();
    println!("--");
    println!("sd of median error across realizations: {:.4}", sd(&errs));
    println!(
        "mean inferred 68% half-width:           {:.4}",
        widths.iter().sum::<f64>() / widths.len() as f64
    );
    println!(
        "mean between-group sd of group medians: {:.4}",
        betweens.iter().sum::<f64>() / betweens.len() as f64
    );
    println!(
        "mean within-group sd:                   {:.4}",
        withins.iter().sum::<f64>() / withins.len() as f64
    );
    println!(
        "mean common-mode sd (per-draw means):   {:.4}",
        commons.iter().sum::<f64>() / commons.len() as f64
    );
    println!(
        "mean pooled 68% half-width:             {:.4}",
        pool_hws.iter().sum::<f64>() / pool_hws.len() as f64
    );
    println!(
        "mean draw-mean sd:                      {:.4}",
        mean_sds.iter().sum::<f64>() / mean_sds.len() as f64
    );
    qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    q_pools.sort_by(|a, b| a.partial_cmp(b).unwrap());
    q_means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let fmt = |v: &[f64]| v.iter().map(|q| (q * 100.0).round() / 100.0).collect::<Vec<_>>();
    println!("q median-cdf: {:?}", fmt(&qs));
    q_mpdfs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("q median-pdf: {:?}", fmt(&q_mpdfs));
    println!("q pooled:     {:?}", fmt(&q_pools));
    println!("q draw-mean:  {:?}", fmt(&q_means));
    q_kdes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    println!("q mean-kde:   {:?}", fmt(&q_kdes));
}
