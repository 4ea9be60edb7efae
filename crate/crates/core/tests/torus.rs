use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vdw_core::colouring::*;
use vdw_core::torus::*;

#[test]
fn folklore_red_progression() {
    let c = folklore_colouring(100);
    let w = ApWitness::new(2, 3, 33);
    assert!(ap_is_monochromatic(&c, &w, Colour::Red).unwrap());
    assert!(longest_mono_ap_full(&c, Colour::Red).length >= 33);
    assert_eq!(find_blue_3ap(&c), None);
}

#[test]
fn separation_witness_for_repeated_centre() {
    let x = TorusPoint::new([0.3, 0.4]);
    let rep = check_separation(&[x.clone(), x, TorusPoint::new([0.9, 0.1])], 0.01, 10.0).unwrap();
    assert!(!rep.passes);
    assert_eq!(rep.min_value, 0.0);
    assert_eq!(rep.witness, Some((1, 2, 1)));
}

/// Expected number of index triples violating separation for uniform centres.
fn expected_separation_violations(m: usize, dim: usize, rho: f64) -> f64 {
    let p = (20.0 * rho).min(1.0).powi(dim as i32);
    let triples = (m * m * (m + 1) / 2 - m) as f64;
    triples * p
}

#[test]
fn dense_example_exhausts_budget_on_separation() {
    let (m, dim, rho) = (64, 4, 0.01);
    let expected = expected_separation_violations(m, dim, rho);
    assert!(expected > 100.0);
    let cfg = CentreConfig { count: m, xi_max: 3, tolerance: 0.01, grid: 17, separation: 10.0, max_attempts: 3 };
    let family = Subspace::coordinate_family(dim, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let err = sample_centres(dim, rho, &family, &cfg, &mut rng).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("separation"), "{err}");
}

#[test]
fn feasible_certificates_pass_often() {
    let (m, dim, rho) = (64, 4, 0.0015);
    let cfg = CentreConfig { count: m, xi_max: 1, tolerance: 0.05, grid: 17, separation: 10.0, max_attempts: 1 };
    let family = Subspace::coordinate_family(dim, 1);
    let runs = 30;
    let mut passed = 0;
    for seed in 0..runs {
        let mut rng = vdw_core::rng::substream(77, seed);
        if let Ok((centres, cert)) = sample_centres(dim, rho, &family, &cfg, &mut rng) {
            assert!(cert.passes);
            let again = certify_centres(&centres, rho, &family, &cfg).unwrap();
            assert!(again.passes);
            passed += 1;
        }
    }
    println!("certificate pass frequency {passed}/{runs}");
    assert!(passed * 2 >= runs);
}

#[test]
fn coverage_detects_clustered_centres() {
    let centres: Vec<TorusPoint> = (0..20).map(|i| TorusPoint::new([0.001 * i as f64, 0.5])).collect();
    let cfg = CentreConfig { count: 20, xi_max: 1, tolerance: 0.05, grid: 9, separation: 0.0, max_attempts: 1 };
    let cert = certify_centres(&centres, 0.001, &Subspace::coordinate_family(2, 1), &cfg).unwrap();
    assert!(!cert.coverage[0].passes);
    assert!(cert.coverage[0].uncovered > 0);
}

fn unit_ball_volume(dim: usize) -> f64 {
    let d = dim as f64;
    std::f64::consts::PI.powf(d / 2.0) / statrs_gamma(d / 2.0 + 1.0)
}

fn statrs_gamma(x: f64) -> f64 {
    // x is a positive integer or half-integer here
    if (x - x.round()).abs() < 1e-12 {
        (1..x.round() as u64).map(|k| k as f64).product()
    } else {
        let mut g = std::f64::consts::PI.sqrt();
        let mut y = 0.5;
        while y < x - 1e-9 {
            g *= y;
            y += 1.0;
        }
        g
    }
}

#[test]
fn blue_density_matches_monte_carlo_shell_volume() {
    let (dim, rho, width, m, n) = (4, 0.05, 0.005, 32, 100_000);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let centres: Vec<TorusPoint> = (0..m).map(|_| TorusPoint::random(dim, &mut rng)).collect();
    let e = SymCoeffs::random(dim, (dim as f64).powi(-4), &mut rng);
    let sys = AnnulusSystem::new(rho, width, e, centres).unwrap();
    let theta = TorusPoint::random(dim, &mut rng);
    let c = build_colouring(n, &theta, &sys).unwrap();
    // Monte Carlo volume of one annulus, by rejection from the enclosing cube.
    let reach = sys.lift_radius();
    let trials = 2_000_000;
    let mut hits = 0u64;
    for _ in 0..trials {
        let y: Vec<f64> = (0..dim).map(|_| rng.gen_range(-reach..reach)).collect();
        if annulus_contains(&sys, &y) {
            hits += 1;
        }
    }
    let shell = hits as f64 / trials as f64 * (2.0 * reach).powi(dim as i32);
    let analytic = unit_ball_volume(dim) * (rho.powi(4) - (rho - width).powi(4)) / sys.matrix().determinant().abs();
    assert!((shell / analytic - 1.0).abs() < 0.1);
    let density = c.blue_count() as f64 / n as f64;
    let expected = m as f64 * shell;
    assert!(density >= 0.5 * expected && density <= 2.0 * expected, "{density} vs {expected}");
}

#[test]
fn green_wolf_has_dirichlet_red_progression() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let gw = green_wolf_colouring(10_000, 5, 0.25, &mut rng).unwrap();
    let w = dirichlet_red_ap(10_000, &gw.theta, 0.25).expect("Dirichlet progression");
    assert_eq!(w.length, 10);
    assert!(ap_is_monochromatic(&gw.colouring, &w, Colour::Red).unwrap());
}

#[test]
fn blue_3ap_frequency_is_logged() {
    let (dim, n, runs) = (3, 2000, 100);
    let mut with_ap = 0;
    for seed in 0..runs {
        let mut rng = vdw_core::rng::substream(2024, seed);
        let centres: Vec<TorusPoint> = (0..8).map(|_| TorusPoint::random(dim, &mut rng)).collect();
        let e = SymCoeffs::random(dim, (dim as f64).powi(-4), &mut rng);
        let sys = AnnulusSystem::new(0.08, 0.01, e, centres).unwrap();
        let theta = TorusPoint::random(dim, &mut rng);
        let c = build_colouring(n, &theta, &sys).unwrap();
        if find_blue_3ap(&c).is_some() {
            with_ap += 1;
        }
    }
    println!("blue 3-AP frequency over {runs} toy runs: {with_ap}/{runs}");
}

proptest! {
    #[test]
    fn parallelogram_bound(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 3;
        let (rho, width) = (0.05, 0.01);
        let e = SymCoeffs::random(dim, (dim as f64).powi(-4), &mut rng);
        let sys = AnnulusSystem::new(rho, width, e, vec![TorusPoint::new(vec![0.0; dim])]).unwrap();
        let a = sys.matrix();
        let mut found = 0;
        for _ in 0..2000 {
            let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.06..0.06)).collect();
            let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.03..0.03)).collect();
            let p: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + b).collect();
            let q: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - b).collect();
            if annulus_contains(&sys, &x) && annulus_contains(&sys, &p) && annulus_contains(&sys, &q) {
                let av = &a * nalgebra::DVector::from_column_slice(&v);
                prop_assert!(av.norm_squared() <= rho * rho - (rho - width) * (rho - width) + 1e-12);
                found += 1;
            }
        }
        prop_assume!(found > 0);
    }

    #[test]
    fn operator_norm_near_one(seed in any::<u64>(), dim in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = SymCoeffs::random(dim, (dim as f64).powi(-4), &mut rng);
        let s = (nalgebra::DMatrix::identity(dim, dim) + sigma(&e)).singular_values();
        prop_assert!(s.max() <= 1.5 && s.min() >= 0.5);
    }

    #[test]
    fn colouring_invariant_under_centre_permutation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 2;
        let centres: Vec<TorusPoint> = (0..6).map(|_| TorusPoint::random(dim, &mut rng)).collect();
        let e = SymCoeffs::random(dim, 1.0 / 16.0, &mut rng);
        let theta = TorusPoint::random(dim, &mut rng);
        let a = AnnulusSystem::new(0.1, 0.02, e.clone(), centres.clone()).unwrap();
        let mut rev = centres;
        rev.reverse();
        rev.rotate_left(2);
        let b = AnnulusSystem::new(0.1, 0.02, e, rev).unwrap();
        prop_assert_eq!(build_colouring(3000, &theta, &a).unwrap(), build_colouring(3000, &theta, &b).unwrap());
    }

    #[test]
    fn behrend_sets_are_ap_free(d in 2usize..6, digits in 1usize..5) {
        let n = (2 * d - 1).pow(digits as u32);
        let c = behrend_colouring(n, d, digits).unwrap();
        prop_assert_eq!(find_blue_3ap_with(&c, SearchStrategy::Pairwise), None);
    }

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centres: Vec<TorusPoint> = (0..3).map(|_| TorusPoint::random(3, &mut rng)).collect();
        let mut sys = AnnulusSystem::new(0.05, 0.01, SymCoeffs::random(3, 0.01, &mut rng), centres).unwrap();
        sys.seed = Some(seed);
        let s = serde_json::to_string(&sys).unwrap();
        prop_assert!(s.contains("\"D\":3"));
        let back: AnnulusSystem = serde_json::from_str(&s).unwrap();
        prop_assert_eq!(back, sys);
    }
}
