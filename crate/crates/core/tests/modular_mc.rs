use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankone_core::hyperbolic::{
    cartan_sample, decay_scan, hyp_dist, ks_critical_1pct, ks_statistic, mc_average_with, radial_draws,
    radial_profile, reduce, Action, HPoint, Mat2, McSettings, Observable, BASE_POINTS,
};

#[test]
fn radial_law_passes_ks() {
    let profile = radial_profile(6.0).unwrap();
    let n = 100_000;
    for t in [1.0f64, 3.0, 6.0] {
        let taus = radial_draws(&profile, t, n, 5).unwrap();
        // area of the hyperbolic disk is proportional to cosh τ - 1
        let d = ks_statistic(&taus, |x| (x.cosh() - 1.0) / (t.cosh() - 1.0));
        assert!(d < ks_critical_1pct(n as usize), "t = {t}: D = {d}");
        assert!(taus.iter().all(|&x| (0.0..=t).contains(&x)));
    }
}

#[test]
fn samples_land_at_drawn_radius() {
    let profile = radial_profile(8.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x0 = HPoint::new(0.1, 1.3).unwrap();
    let lift = Mat2::lift(x0);
    for _ in 0..2000 {
        let s = cartan_sample(&profile, 8.0, &mut rng).unwrap();
        assert!((hyp_dist(s.g.act(HPoint::I), HPoint::I) - s.tau).abs() < 1e-9);
        let z = lift.mul(&s.g.inverse()).act(HPoint::I);
        assert!((hyp_dist(z, x0) - s.tau).abs() < 1e-9);
        assert!((s.g.det() - 1.0).abs() < 1e-12);
    }
    let s = cartan_sample(&profile, 0.0, &mut rng).unwrap();
    assert!(hyp_dist(s.g.act(HPoint::I), HPoint::I) < 1e-12);
}

#[test]
fn reduction_is_a_modular_move() {
    let profile = radial_profile(9.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5000 {
        let z = cartan_sample(&profile, 9.0, &mut rng).unwrap().g.act(HPoint::new(0.2, 1.1).unwrap());
        let r = reduce(z).unwrap();
        assert!(r.point.in_fundamental_domain(1e-12), "{z:?} -> {r:?}");
        assert_eq!(r.word.a * r.word.d - r.word.b * r.word.c, 1);
        let w = r.word.to_mat().act(z);
        let scale = r.point.y.max(1.0);
        assert!((w.x - r.point.x).abs() < 1e-9 * scale && (w.y - r.point.y).abs() < 1e-9 * scale);
        // translates reduce to the same point up to the boundary identification
        let shifted = reduce(HPoint { x: z.x + 1.0, y: z.y }).unwrap().point;
        assert!((shifted.y - r.point.y).abs() < 1e-9 * scale);
        assert!((shifted.x - r.point.x).abs() < 1e-9 * scale || (shifted.x.abs() - 0.5).abs() < 1e-9);
    }
}

#[test]
fn inverse_and_direct_samples_agree() {
    let profile = radial_profile(5.0).unwrap();
    for (i, base) in BASE_POINTS.iter().enumerate() {
        let mut s = McSettings::new(200_000, 100 + i as u64, Observable::Cusp { y: 1.5 }, *base);
        let a = mc_average_with(&profile, 5.0, &s).unwrap();
        s.action = Action::Direct;
        s.seed += 1000;
        let b = mc_average_with(&profile, 5.0, &s).unwrap();
        let se = (a.standard_error.powi(2) + b.standard_error.powi(2)).sqrt();
        assert!((a.estimate - b.estimate).abs() < 4.0 * se, "{a:?} vs {b:?}");
    }
}

#[test]
fn standard_error_follows_root_n() {
    let profile = radial_profile(4.0).unwrap();
    let base = HPoint::new(0.1, 1.3).unwrap();
    let obs = Observable::Cusp { y: 2.0 };
    let a = mc_average_with(&profile, 4.0, &McSettings::new(50_000, 1, obs, base)).unwrap();
    let b = mc_average_with(&profile, 4.0, &McSettings::new(200_000, 1, obs, base)).unwrap();
    let ratio = a.standard_error / b.standard_error;
    assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn identical_seed_is_bit_identical() {
    let profile = radial_profile(3.0).unwrap();
    let s = McSettings::new(30_000, 77, Observable::Cusp { y: 1.2 }, BASE_POINTS[2]);
    let a = mc_average_with(&profile, 3.0, &s).unwrap();
    let b = mc_average_with(&profile, 3.0, &s).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
}

#[test]
fn disk_observable_mean_is_recovered() {
    let obs: Observable = "disk:0.1,1.8,0.2".parse().unwrap();
    let profile = radial_profile(9.0).unwrap();
    let run = mc_average_with(&profile, 9.0, &McSettings::new(200_000, 8, obs, BASE_POINTS[0])).unwrap();
    assert!(run.deviation() < 5.0 * run.standard_error + 5e-3, "{run:?}");
}

#[test]
fn constant_scan_has_zero_deviation() {
    let s = McSettings::new(1000, 4, Observable::Constant, BASE_POINTS[1]);
    let rep = decay_scan(&[1.0, 2.0, 3.0], &s).unwrap();
    assert!(rep.rows.iter().all(|r| r.deviation == 0.0 && r.within));
    assert_eq!(rep.exponent, None);
    assert!(decay_scan(&[0.5], &s).is_err());
    assert!(decay_scan(&[], &s).is_err());
}
