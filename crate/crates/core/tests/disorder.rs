use chiral_scatter::disorder::{ensemble_average, sample_detunings, DisorderConfig};
use chiral_scatter::two_photon::two_photon_out;
use chiral_scatter::{EmitterArray, Error, GaussianPacket2, Grid};
use proptest::prelude::*;

fn config(m: usize, sigma_d: f64, n: usize, seed: u64) -> DisorderConfig {
    DisorderConfig::new(m, sigma_d, 0.0, 2.0, n, seed, Grid::symmetric(6.0, 0.05).unwrap()).unwrap()
}

#[test]
fn zero_disorder_reproduces_the_clean_array() {
    let c = config(3, 0.0, 5, 1);
    let stats = ensemble_average(&c).unwrap();
    let clean = two_photon_out(&GaussianPacket2::wide(0.0, 2.0).unwrap(), &EmitterArray::degenerate(3, 0.0), &c.grid).unwrap();
    assert_eq!(stats.mean_density, clean.density);
    assert!(stats.median_abs_dev.iter().all(|&x| x == 0.0));
    assert!(stats.mean_abs_dev.iter().all(|&x| x == 0.0));
    assert!(stats.std_error.iter().all(|&x| x == 0.0));
}

#[test]
fn thread_count_does_not_change_results() {
    let c = config(3, 0.5, 40, 7);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| ensemble_average(&c).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn samples_depend_only_on_seed_and_index() {
    let a = config(4, 0.7, 10, 3);
    let mut b = a.clone();
    b.n_samples = 1000;
    assert_eq!(sample_detunings(&a, 5).unwrap(), sample_detunings(&b, 5).unwrap());
    b.seed = 4;
    assert_ne!(sample_detunings(&a, 5).unwrap(), sample_detunings(&b, 5).unwrap());
}

#[test]
fn invalid_settings_are_rejected() {
    let g = Grid::symmetric(6.0, 0.05).unwrap();
    assert!(DisorderConfig::new(3, -0.1, 0.0, 2.0, 10, 0, g).is_err());
    assert!(DisorderConfig::new(3, 0.1, 0.0, 2.0, 0, 0, g).is_err());
    assert!(DisorderConfig::new(3, 0.1, 0.0, -2.0, 10, 0, g).is_err());
}

#[test]
fn impossible_separation_gives_up() {
    let mut c = config(4, 1e-8, 2, 0);
    c.degeneracy_tol = 10.0;
    assert!(matches!(ensemble_average(&c), Err(Error::ResampleLimitExceeded { .. })));
}

#[test]
fn standard_error_shrinks_like_inverse_root_n() {
    let centre = (Grid::symmetric(6.0, 0.05).unwrap().n_points() - 1) / 2;
    let small = ensemble_average(&config(3, 0.5, 100, 11)).unwrap().std_error[centre];
    let large = ensemble_average(&config(3, 0.5, 1600, 11)).unwrap().std_error[centre];
    let ratio = small / large;
    assert!((4.0 / 1.5..4.0 * 1.5).contains(&ratio), "ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constrained_draws_have_zero_mean(m in 2usize..10, s in 0.01f64..3.0, seed in 0u64..1000, idx in 0u64..1000) {
        let mut c = config(m, s, 1, seed);
        c.constrain_mean = true;
        let e = sample_detunings(&c, idx).unwrap();
        prop_assert!(e.mean_detuning().abs() < 1e-14 * s.max(1.0) * m as f64);
        prop_assert!(e.min_pairwise_gap() >= c.degeneracy_tol);
    }
}
