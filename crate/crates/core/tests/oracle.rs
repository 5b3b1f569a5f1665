use chiral_scatter::oracle::{
    four_coordinate_t, oracle_compose_m2, oracle_fourier_t, oracle_mixed_t, oracle_single_convolution, oracle_tmft,
    oracle_yudson, ContourSpec, TmftVariant,
};
use chiral_scatter::single_photon::kernel_single;
use chiral_scatter::single_photon::t_single;
use chiral_scatter::two_photon::irreducible_T_distinct;
use chiral_scatter::{Complex64, EmitterArray, Error, GaussianPacket1, Grid};

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn convolution_without_emitters_is_the_input() {
    let p = GaussianPacket1::new(0.4, 1.0).unwrap();
    let g = Grid::new(-5.0, 5.0, 41).unwrap();
    let out = oracle_single_convolution(&p, &EmitterArray::degenerate(0, 0.0), &g).unwrap();
    for (y, a) in g.points().zip(&out.amplitudes) {
        assert_eq!(*a, p.amplitude(y));
    }
}

#[test]
fn contour_rules_are_enforced() {
    let e = EmitterArray::new(vec![0.0, 1.0]).unwrap();
    let close = ContourSpec::new(vec![0.0, 0.5]);
    assert!(matches!(oracle_yudson(&e, &[1.0, 0.0], &[-1.0, -2.0], &close), Err(Error::ContourViolation(_))));
    let low = ContourSpec::new(vec![-0.6]);
    assert!(matches!(oracle_yudson(&e, &[1.0], &[0.0], &low), Err(Error::ContourViolation(_))));
    let ok = ContourSpec::standard(2, 1.0);
    // Photons on opposite sides of their sources.
    assert!(oracle_yudson(&e, &[1.0, 0.0], &[0.0, 2.0], &ok).is_err());
}

#[test]
fn one_photon_contour_integral_is_the_kernel() {
    let e = EmitterArray::degenerate(1, 0.3);
    let contour = ContourSpec::standard(1, 1.0);
    for (z, y) in [(0.0, -0.4), (2.0, -1.0), (-1.0, -8.0)] {
        let v = oracle_yudson(&e, &[z], &[y], &contour).unwrap();
        let want = -(Complex64::new(0.5, 0.3) * (y - z)).exp();
        assert!(rel(v, want) < 1e-6);
    }
    // Ahead of the source only the (unsampled) δ-term survives.
    assert!(oracle_yudson(&e, &[0.0], &[1.5], &contour).unwrap().norm() < 1e-9);
}

#[test]
fn two_photon_contour_integral_splits_into_kernels_and_t() {
    for e in [EmitterArray::degenerate(1, 0.0), EmitterArray::new(vec![-0.5, 0.7]).unwrap()] {
        let contour = ContourSpec::standard(2, 1.0);
        // z1 > z2 > y2 > y1: both pieces contribute.
        let (y, z) = ([-2.0, -0.3], [1.0, 0.4]);
        let v = oracle_yudson(&e, &z, &y, &contour).unwrap();
        let k = kernel_single(y[0] - z[0], &e, 0.0).unwrap() * kernel_single(y[1] - z[1], &e, 0.0).unwrap();
        let want = k + Complex64::i() * four_coordinate_t(y, z, &e).unwrap();
        assert!(rel(v, want) < 1e-5);
        // y1 > y2: the Bethe factor is 1 and the photons scatter independently.
        let (y, z) = ([-0.3, -2.0], [1.0, 0.4]);
        let v = oracle_yudson(&e, &z, &y, &contour).unwrap();
        let k = kernel_single(y[0] - z[0], &e, 0.0).unwrap() * kernel_single(y[1] - z[1], &e, 0.0).unwrap();
        assert!(rel(v, k) < 1e-5);
        // Moving the contours within their homotopy class changes nothing.
        let raised = oracle_yudson(&e, &z, &y, &contour.raised(0.25)).unwrap();
        assert!((raised - v).norm() < 1e-8);
    }
}

#[test]
fn four_coordinate_t_reproduces_mixed_t() {
    let e = EmitterArray::new(vec![-0.7, 0.2, 1.4]).unwrap();
    for (dy, dz, en) in [(0.2, 0.9, 0.3), (1.5, 0.05, -1.2), (3.0, 2.0, 2.5)] {
        let a = oracle_mixed_t(dy, dz, en, &e).unwrap();
        let b = irreducible_T_distinct(dy, dz, en, &e).unwrap();
        assert!(rel(a, b) < 1e-9, "{dy} {dz} {en}: {a} vs {b}");
    }
}

#[test]
fn momentum_t_selects_same_index_convention() {
    let samples = [(0.3, -0.5, 0.9), (1.1, 0.2, -0.4), (-1.7, 0.6, 0.0)];
    for e in [EmitterArray::new(vec![-0.3, 0.9]).unwrap(), EmitterArray::new(vec![-1.0, 0.1, 0.8]).unwrap()] {
        for &(p1, p2, k1) in &samples {
            let ft = oracle_fourier_t(p1, p2, k1, &e).unwrap();
            let same = oracle_tmft(p1, p2, k1, &e, TmftVariant::SameIndex).unwrap();
            let mixed = oracle_tmft(p1, p2, k1, &e, TmftVariant::MixedIndex).unwrap();
            assert!(rel(same, ft) < 1e-6);
            assert!(rel(mixed, ft) > 1e-3);
        }
    }
}

#[test]
fn momentum_t_symmetries() {
    let e = EmitterArray::new(vec![-0.3, 0.9, 1.6]).unwrap();
    let (p1, p2, k1) = (0.4, -1.1, 0.25);
    let k2 = p1 + p2 - k1;
    let base = oracle_tmft(p1, p2, k1, &e, TmftVariant::SameIndex).unwrap();
    assert!(rel(oracle_tmft(p2, p1, k1, &e, TmftVariant::SameIndex).unwrap(), base) < 1e-13);
    assert!(rel(oracle_tmft(p1, p2, k2, &e, TmftVariant::SameIndex).unwrap(), base) < 1e-13);
    let one = EmitterArray::new(vec![0.5]).unwrap();
    assert!(oracle_tmft(p1, p2, k1, &one, TmftVariant::SameIndex).unwrap().norm().is_finite());
}

#[test]
fn composition_matches_two_emitter_t() {
    let samples = [(0.3, -0.5, 0.9), (1.1, 0.2, -0.4), (-0.2, -0.9, 0.6)];
    let (d1, d2) = (-0.4, 0.8);
    let e = EmitterArray::new(vec![d1, d2]).unwrap();
    let ab = oracle_compose_m2(&samples, d1, d2).unwrap();
    let ba = oracle_compose_m2(&samples, d2, d1).unwrap();
    for ((&(p1, p2, k1), x), y) in samples.iter().zip(&ab).zip(&ba) {
        let want = oracle_tmft(p1, p2, k1, &e, TmftVariant::SameIndex).unwrap();
        assert!(rel(x.irreducible, want) < 1e-6);
        assert!(rel(y.irreducible, x.irreducible) < 1e-9);
        assert!(rel(x.reducible, t_single(p1, &e) * t_single(p2, &e)) < 1e-14);
    }
    assert!(oracle_compose_m2(&samples, 0.2, 0.2).is_err());
}
