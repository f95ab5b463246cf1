//! Property tests: density-estimate JSON serialization round-trips.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use zinfer::dpgmm::{DensityEstimate, GaussianComponent, MixtureDraw};
use zinfer::prob::SpdMatrix;

/// Strategy for one valid mixture draw in `dim` dimensions: normalized
/// weights, finite means, SPD covariances built as A·Aᵀ + εI.
fn mixture_draw(dim: usize) -> impl Strategy<Value = MixtureDraw> {
    let comp_count = 1..4usize;
    comp_count.prop_flat_map(move |k| {
        let weights = proptest::collection::vec(0.05..1.0f64, k);
        let means = proptest::collection::vec(
            proptest::collection::vec(-50.0..50.0f64, dim),
            k,
        );
        let factors = proptest::collection::vec(
            proptest::collection::vec(-2.0..2.0f64, dim * dim),
            k,
        );
        (weights, means, factors).prop_map(move |(w, m, f)| {
            let total: f64 = w.iter().sum();
            let comps: Vec<GaussianComponent> = (0..w.len())
                .map(|i| {
                    let a = DMatrix::from_vec(dim, dim, f[i].clone());
                    let cov = &a * a.transpose() + DMatrix::identity(dim, dim) * 0.1;
                    GaussianComponent::new(
                        w[i] / total,
                        DVector::from_vec(m[i].clone()),
                        SpdMatrix::new(cov).unwrap(),
                    )
                    .unwrap()
                })
                .collect();
            MixtureDraw::new(comps).unwrap()
        })
    })
}

fn estimate(dim: usize) -> impl Strategy<Value = DensityEstimate> {
    proptest::collection::vec(mixture_draw(dim), 1..5).prop_map(|draws| {
        DensityEstimate::new(draws, 100, "prop".into()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_roundtrip_preserves_densities_1d(est in estimate(1), x in -60.0..60.0f64) {
        let back = DensityEstimate::from_json(&est.to_json().unwrap()).unwrap();
        prop_assert_eq!(back.dim(), est.dim());
        prop_assert_eq!(back.draws().len(), est.draws().len());
        prop_assert_eq!(back.fingerprint(), est.fingerprint());
        let p = DVector::from_vec(vec![x]);
        for (a, b) in est.draws().iter().zip(back.draws()) {
            let (da, db) = (a.log_density(&p), b.log_density(&p));
            prop_assert!((da - db).abs() <= 1e-12 * da.abs().max(1.0), "{} vs {}", da, db);
        }
    }

    #[test]
    fn json_roundtrip_preserves_densities_2d(est in estimate(2), x in -60.0..60.0f64, y in -60.0..60.0f64) {
        let back = DensityEstimate::from_json(&est.to_json().unwrap()).unwrap();
        let p = DVector::from_vec(vec![x, y]);
        for (a, b) in est.draws().iter().zip(back.draws()) {
            let (da, db) = (a.log_density(&p), b.log_density(&p));
            prop_assert!((da - db).abs() <= 1e-12 * da.abs().max(1.0), "{} vs {}", da, db);
        }
    }

    #[test]
    fn roundtrip_twice_is_identical_text(est in estimate(1)) {
        let once = est.to_json().unwrap();
        let twice = DensityEstimate::from_json(&once).unwrap().to_json().unwrap();
        prop_assert_eq!(once, twice);
    }
}
