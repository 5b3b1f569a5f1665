use chiral_scatter::specfun::{
    erfc_real, erfcx, laguerre_assoc1, laguerre_assoc1_roots, series_inv, series_mul, series_pow, TruncatedSeries,
};
use chiral_scatter::{Complex64, Error};
use proptest::prelude::*;

// Reference values from 30-digit arbitrary-precision evaluation.
#[test]
fn erfc_reference_values() {
    let cases = [
        (0.3, 0.671_373_240_540_872_6),
        (1.2, 0.089_686_021_770_364_63),
        (3.5, 7.430_983_723_414_127e-7),
        (6.0, 2.151_973_671_249_891_3e-17),
    ];
    for (x, want) in cases {
        assert!((erfc_real(x) - want).abs() <= 4e-15 * want, "erfc({x})");
    }
    assert!((erfc_real(-1.2) - (2.0 - 0.089_686_021_770_364_63)).abs() < 1e-15);
}

#[test]
fn erfcx_reference_values() {
    let cases = [
        (0.5, 0.615_690_344_192_925_9),
        (2.0, 0.255_395_676_310_505_7),
        (10.0, 0.056_140_992_743_822_59),
        (40.0, 0.014_100_335_983_377_81),
    ];
    for (x, want) in cases {
        assert!((erfcx(x) - want).abs() <= 4e-15 * want, "erfcx({x})");
    }
}

#[test]
fn laguerre_reference_values() {
    let cases = [(3, 2.5, -1.104_166_666_666_666_7), (6, 7.25, 2.356_461_927_625_868), (9, 0.4, -0.388_451_800_087_478_2)];
    for (n, x, want) in cases {
        assert!((laguerre_assoc1(n, x) - want).abs() < 1e-13, "L({n}, {x})");
    }
    assert_eq!(laguerre_assoc1(0, 3.0), 1.0);
    assert_eq!(laguerre_assoc1(1, 0.5), 1.5);
}

#[test]
fn laguerre_roots_sum_and_vanish() {
    // The zeros of L^{(1)}_n sum to n(n+1).
    for n in 1..=12 {
        let roots = laguerre_assoc1_roots(n);
        assert_eq!(roots.len(), n);
        let sum: f64 = roots.iter().sum();
        assert!((sum - (n * (n + 1)) as f64).abs() < 1e-9 * sum, "n={n}");
        for r in roots {
            let slope = (laguerre_assoc1(n, r + 1e-6) - laguerre_assoc1(n, r - 1e-6)).abs() / 2e-6;
            assert!(laguerre_assoc1(n, r).abs() < 1e-10 * slope.max(1.0));
        }
    }
}

#[test]
fn singular_series_inverse_is_an_error() {
    let s = TruncatedSeries::from_real(&[0.0, 1.0, 2.0], 4);
    assert!(matches!(series_inv(&s), Err(Error::SingularSeries { .. })));
}

fn series(c: &[(f64, f64)], order: usize) -> TruncatedSeries {
    let mut v: Vec<Complex64> = c.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
    v.resize(order + 1, Complex64::new(0.0, 0.0));
    TruncatedSeries::new(v)
}

proptest! {
    #[test]
    fn inverse_times_series_is_one(c in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..7), lead in 0.5f64..3.0) {
        let mut c = c;
        c[0].0 += lead.copysign(c[0].0 + 1e-300);
        let s = series(&c, 6);
        let prod = series_mul(&s, &series_inv(&s).unwrap());
        prop_assert!((prod.coeff(0) - 1.0).norm() < 1e-12);
        for k in 1..=6 {
            prop_assert!(prod.coeff(k).norm() < 1e-9, "k={} {}", k, prod.coeff(k));
        }
    }

    #[test]
    fn power_is_repeated_product(c in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..5), m in 0u32..6) {
        let s = series(&c, 5);
        let mut want = series(&[(1.0, 0.0)], 5);
        for _ in 0..m {
            want = series_mul(&want, &s);
        }
        let got = series_pow(&s, m);
        for k in 0..=5 {
            prop_assert!((got.coeff(k) - want.coeff(k)).norm() < 1e-12);
        }
    }

    #[test]
    fn erfc_reflection(x in -5.0f64..5.0) {
        prop_assert!((erfc_real(x) + erfc_real(-x) - 2.0).abs() < 1e-15);
    }
}
