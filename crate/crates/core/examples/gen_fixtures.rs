//! Regenerates the committed fixture datasets under `fixtures/`.
//!
//! Run from the crate root: `cargo run -p zinfer --example gen_fixtures`.
//! The files are deterministic functions of the embedded seed; the fixture
//! tests assert that the committed copies match.

use std::path::Path;

use zinfer::io::write_fixture_csv;
use zinfer::rng::RngHandle;
use zinfer::testbeds::{
    analytic_posterior_samples, generate_bivariate_dataset, generate_gaussian_dataset,
    neal_problem, FIXTURE_SEED,
};

fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    std::fs::create_dir_all(&dir).expect("create fixtures dir");

    let bivariate: Vec<Vec<f64>> = generate_bivariate_dataset(FIXTURE_SEED)
        .into_iter()
        .map(|p| p.to_vec())
        .collect();
    std::fs::write(
        dir.join("bivariate_points.csv"),
        write_fixture_csv(&["x1", "x2"], &bivariate, FIXTURE_SEED),
    )
    .unwrap();

    let gaussian: Vec<Vec<f64>> = generate_gaussian_dataset(FIXTURE_SEED)
        .into_iter()
        .map(|s| vec![s])
        .collect();
    std::fs::write(
        dir.join("gaussian_samples.csv"),
        write_fixture_csv(&["s"], &gaussian, FIXTURE_SEED),
    )
    .unwrap();

    // 3000 exact posterior samples of the 1D Gaussian problem, in the CSV
    // layout the `infer` command consumes.
    let problem = neal_problem().unwrap();
    let samples =
        analytic_posterior_samples(&problem, 3000, &RngHandle::with_stream(FIXTURE_SEED, 303))
            .unwrap();
    let rows: Vec<Vec<f64>> = (0..samples.len())
        .map(|i| {
            vec![
                samples.points().point(i)[0],
                samples.log_l()[i],
                samples.log_pi()[i],
            ]
        })
        .collect();
    std::fs::write(
        dir.join("neal_samples.csv"),
        write_fixture_csv(&["x", "log_likelihood", "log_prior"], &rows, FIXTURE_SEED),
    )
    .unwrap();

    println!("fixtures written to {}", dir.display());
}
