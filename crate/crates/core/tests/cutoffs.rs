use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdw_core::cutoffs::*;
use vdw_core::quad::GaussLegendre;

/// Length of `[lo, hi] ∩ [-r, r]`.
fn overlap(lo: f64, hi: f64, r: f64) -> f64 {
    (hi.min(r) - lo.max(-r)).max(0.0)
}

/// `(4/η²) ∫∫ 1_{[η/2, 1-η/2]}(x - u - v) du dv` over `u, v ∈ [-η/4, η/4]`, integrating
/// the inner variable exactly and the outer by Gauss–Legendre on kink-free pieces.
fn tent_by_convolution(eta: f64, x: f64) -> f64 {
    let r = eta / 4.0;
    let (a, b) = (eta / 2.0, 1.0 - eta / 2.0);
    let inner = |u: f64| overlap(x - u - b, x - u - a, r);
    let mut cuts = vec![-r, r];
    for c in [x - b - r, x - b + r, x - a - r, x - a + r] {
        if c > -r && c < r {
            cuts.push(c);
        }
    }
    cuts.sort_by(f64::total_cmp);
    let g = GaussLegendre::new(4);
    let s: f64 = cuts.windows(2).map(|p| g.integrate(p[0], p[1], inner)).sum();
    4.0 / (eta * eta) * s
}

#[test]
fn tent_plateau_and_support() {
    let w = Tent::new(0.25).unwrap();
    assert_eq!(w.eval(0.5), 1.0);
    assert_eq!(w.eval(0.0), 0.0);
    assert_eq!(w.eval(1.0), 0.0);
    assert!(Tent::new(0.5).is_err());
    assert!(Tent::new(0.0).is_err());
}

#[test]
fn tent_derivative_on_dense_grid() {
    let eta = 0.1;
    let w = Tent::new(eta).unwrap();
    let n = 200_000;
    let mut max_d: f64 = 0.0;
    for i in 0..n {
        let (x0, x1) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
        max_d = max_d.max(((w.eval(x1) - w.eval(x0)) * n as f64).abs());
    }
    assert!(max_d >= 1.0 / eta && max_d <= 20.0 / eta, "{max_d}");
    assert!((max_d - 2.0 / eta).abs() < 1e-3);
    assert!(w.report(100_000).passes);
}

#[test]
fn tent_matches_triple_convolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for eta in [0.1, 0.3, 0.45] {
        let w = Tent::new(eta).unwrap();
        for _ in 0..100 {
            let x = rng.gen_range(-0.1..1.1);
            assert!((w.eval(x) - tent_by_convolution(eta, x)).abs() < 1e-10, "eta {eta} x {x}");
        }
    }
}

#[test]
fn fejer_examples() {
    let w = FejerWeight::new(10.0).unwrap();
    let direct: f64 = (-10..=10).map(|n| w.weight(n)).sum();
    assert!((direct - 22.5).abs() < 1e-12);
    assert!((w.fourier(0.0) - 22.5).abs() < 1e-12);
    let w = FejerWeight::new(100.0).unwrap();
    assert!(w.fourier(0.5).abs() <= 32.0 * 0.01 * 4.0);
    let rep = w.report(10_000);
    assert!(rep.passes, "{rep:?}");
    assert!(FejerWeight::new(9.9).is_err());
}

#[test]
fn fejer_transform_matches_direct_sum() {
    let w = FejerWeight::new(57.0).unwrap();
    let r = w.support_radius();
    for j in 0..50 {
        let beta = j as f64 / 50.0 + 0.003;
        let direct: f64 = (-r..=r).map(|n| w.weight(n) * (2.0 * PI * beta * n as f64).cos()).sum();
        assert!((direct - w.fourier(beta)).abs() < 1e-9);
    }
}

#[test]
fn interval_majorant_examples() {
    let d = 0.2;
    let chi = IntervalMajorant::new(d).unwrap();
    assert!(chi.eval(0.0) >= 1.0);
    assert_eq!(chi.eval(1.1 * d), 0.0);
    let rep = chi.report();
    assert!(rep.passes, "{rep:?}");
    assert!((rep.integral_ratio - 1.5).abs() < 1e-9);
    assert!(rep.decay_constant <= 2.0);
    assert!((chi.fourier(0.0) - 1.5 * d).abs() < 1e-12);
}

#[test]
fn band_limited_minorant_examples() {
    let s1 = 1f64.sin().powi(2);
    assert!((BandLimitedMinorant::psi(0.0) - 1.0 / s1).abs() < 1e-12);
    assert!((BandLimitedMinorant::psi(0.0) - 1.412).abs() < 1e-3);
    assert!((BandLimitedMinorant::psi(1.0) - 1.0).abs() < 1e-15);
    let rep = BandLimitedMinorant.report();
    assert!(rep.passes, "{rep:?}");
    assert!((rep.integral - PI / s1).abs() < 1e-6, "{}", rep.integral);
    assert_eq!(BandLimitedMinorant::psi_hat(0.32), 0.0);
}

#[test]
fn torus_box_examples() {
    let c = TorusBoxCutoff::new(16.0, 1).unwrap();
    for xi in 16..=64 {
        assert_eq!(c.coefficient(xi), 0.0);
        assert_eq!(c.coefficient(-xi), 0.0);
    }
    assert!(c.eval(&[0.0]) >= 1.0);
    let c2 = TorusBoxCutoff::new(16.0, 2).unwrap();
    assert!(c2.eval(&[0.0, 0.0]) >= 1.0);
    let rep = c2.report(1000, 1).unwrap();
    assert!(rep.passes, "{rep:?}");
    assert!(rep.integral <= 25.0 / 16.0);
    assert!(TorusBoxCutoff::new(1e6, 7).unwrap().report(10, 1).is_err());
}

#[test]
fn torus_box_integral_by_fine_grid() {
    let c = TorusBoxCutoff::new(40.0, 2).unwrap();
    let n = 301;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += c.eval(&[i as f64 / n as f64, j as f64 / n as f64]);
        }
    }
    s /= (n * n) as f64;
    let exact = (c.eps * PI / 1f64.sin().powi(2)).powi(2);
    assert!((s - exact).abs() < 1e-10);
    assert!(exact <= 25.0 / 40.0);
}

#[test]
fn torus_ball_examples() {
    let chi = TorusBallMinorant::new(2, 0.9, Some(4)).unwrap();
    assert!(chi.eval(&[0.0, 0.0]) > 0.0);
    assert!(chi.psi(&[0.5, 0.0]) < 0.0);
    let rep = chi.report(5000, 2).unwrap();
    assert!(rep.passes, "{rep:?}");
    assert!((rep.quadrature_integral - 1.0).abs() < 1e-6);
    // Midpoint grid oracle, independent of the moment formula.
    let n = 97;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += chi.eval(&[(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]);
        }
    }
    assert!((s / (n * n) as f64 - 1.0).abs() < 1e-9);
    assert!(TorusBallMinorant::new(2, 0.1, None).is_err());
    assert!(TorusBallMinorant::new(2, 0.9, Some(51)).is_err());
    // Too small a k for this radius leaves ∫ψ negative.
    assert!(TorusBallMinorant::new(2, 0.5, Some(4)).is_err());
}

#[test]
fn torus_ball_expansion_is_nonnegative() {
    for (d, k, rho) in [(1, 4, 0.9), (2, 4, 0.9), (2, 10, 0.8), (3, 10, 0.95)] {
        let chi = TorusBallMinorant::new(d, rho, Some(k)).unwrap();
        let poly = chi.expansion().unwrap();
        let zero = vec![0; d];
        assert!(poly.iter().all(|(f, c)| *f == zero || *c > 0.0));
        // Constant term minus the threshold power is ∫ψ.
        let c0 = poly[&zero] - (4.0 * chi.threshold).powi(k as i32);
        assert!((c0 / chi.integral - 1.0).abs() < 1e-12);
    }
}

#[test]
fn suite_passes() {
    assert!(cutoff_suite(0).unwrap().all_pass());
}

proptest! {
    #[test]
    fn tent_vanishes_outside_unit_interval(eta in 0.01f64..0.49, x in -10.0f64..10.0) {
        let w = Tent::new(eta).unwrap();
        if !(0.0..=1.0).contains(&x) {
            prop_assert_eq!(w.eval(x), 0.0);
        }
        prop_assert!((0.0..=1.0).contains(&w.eval(x)));
    }

    #[test]
    fn majorant_vanishes_outside_support(delta in 0.001f64..0.99, t in 1.0f64..100.0) {
        let chi = IntervalMajorant::new(delta).unwrap();
        prop_assert_eq!(chi.eval(t * delta), 0.0);
        prop_assert_eq!(chi.eval(-t * delta), 0.0);
    }

    #[test]
    fn fejer_transform_nonnegative(x in 10.0f64..1000.0, beta in 0.0f64..1.0) {
        prop_assert!(FejerWeight::new(x).unwrap().fourier(beta) >= 0.0);
    }
}
