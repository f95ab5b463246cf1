use zinfer::evidence::PipelineConfig;
use zinfer::rng::RngHandle;
use zinfer::testbeds::{neal_problem, pp_test};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let realizations: usize = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(100);
    let samples: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(3000);
    let mut config = PipelineConfig::default();
    if let Some(s) = args.get(3) {
        config.subset_size = s.parse().unwrap();
    }
    let problem = neal_problem().unwrap();
    let res = pp_test(&problem, realizations, samples, &config, &RngHandle::with_stream(2, 22)).unwrap();
    println!("inside_band {} ks_p {:.4}", res.inside_band, res.ks_pvalue);
    for (k, (q, (lo, hi))) in res.quantiles.iter().zip(&res.band).enumerate() {
        let mark = if q < lo || q > hi { " <-- OUT" } else { "" };
        println!("{:3} {:.4} [{:.4}, {:.4}]{}", k + 1, q, lo, hi, mark);
    }
}
