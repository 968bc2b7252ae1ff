use ajm_core::ak_two::{compute_marginals, plancherel_cff, probe_points, quadrant_coefficients};
use ajm_core::kernel::{
    integrate_region2, mc_integrate3, Half, KernelEvaluator2, KernelTable2, KernelTable3, Product2, Product3,
    RadialTable, RadialTable3, Region2, Region3,
};
use ajm_core::three_obs::compute_triple;
use ajm_core::{DetectorConfig, Error};

#[test]
fn parity_from_direct_evaluation() {
    for (s1, s2) in [(0.7, 0.7), (0.4, 1.1)] {
        let cfg = DetectorConfig::two(s1, s2);
        let ev = KernelEvaluator2::new(&cfg).unwrap();
        let pts = probe_points(&cfg, 7);
        let (mut dev, mut scale) = (0.0f64, 0.0f64);
        for &(p1, p2) in &pts {
            let (e, f, g) = ev.eval(p1, p2);
            let (em, fm, _) = ev.eval(-p1, p2);
            let (_, _, gm) = ev.eval(p1, -p2);
            dev = dev.max((e - em).norm()).max((f + fm).norm()).max((g + gm).norm());
            scale = scale.max(e.norm()).max(f.norm()).max(g.norm());
            // The kernels are real.
            dev = dev.max(e.im.abs()).max(f.im.abs()).max(g.im.abs());
        }
        assert!(dev <= 1e-10 * scale, "σ = ({s1}, {s2}): {dev:e} vs {scale:e}");
    }
}

#[test]
fn table_matches_direct_evaluation() {
    let cfg = DetectorConfig::two(0.6, 0.9);
    let table = KernelTable2::build(&cfg).unwrap();
    let ev = KernelEvaluator2::new(&cfg).unwrap();
    for &(p1, p2) in &probe_points(&cfg, 6) {
        let (e, f, g) = table.eval(p1, p2);
        let (ce, cf, cg) = ev.eval(p1, p2);
        let d = (e - ce.re).abs().max((f - cf.re).abs()).max((g - cg.re).abs());
        assert!(d < 1e-7, "({p1}, {p2}): {d:e}");
    }
}

#[test]
fn quadrant_normalization_is_one_quarter() {
    for (s1, s2) in [(0.05, 0.05), (0.3, 0.3), (0.7, 0.7), (1.5, 1.5), (0.1, 3.0), (2.0, 0.2)] {
        let table = KernelTable2::build(&DetectorConfig::two(s1, s2)).unwrap();
        let q = table.quadrant_integral(Product2::Density);
        assert!((q - 0.25).abs() <= 1e-6, "σ = ({s1}, {s2}): {q}");
        let full = integrate_region2(&table, Product2::Density, Region2::FULL);
        assert!((full - 1.0).abs() <= 4e-6);
        let left = integrate_region2(&table, Product2::EF, Region2::signs(Half::NonPos, Half::Any));
        let right = integrate_region2(&table, Product2::EF, Region2::signs(Half::NonNeg, Half::Any));
        assert!((left + right).abs() < 1e-15);
    }
}

#[test]
fn grid_convergence_on_doubling() {
    for s in [0.3, 0.7, 1.5] {
        let coarse = compute_marginals(&KernelTable2::build(&DetectorConfig::two(s, s)).unwrap()).unwrap();
        let fine = compute_marginals(&KernelTable2::build(&DetectorConfig::two(s, s).with_grid_points(1024)).unwrap())
            .unwrap();
        assert!((coarse.a_prime - fine.a_prime).abs() < 1e-5, "σ = {s}");
        assert!((coarse.b_prime - fine.b_prime).abs() < 1e-5, "σ = {s}");
    }
}

#[test]
fn radial_reduction_agrees_with_table() {
    for s in [0.2, 0.7, 1.3] {
        let cfg = DetectorConfig::two(s, s);
        let table = KernelTable2::build(&cfg).unwrap();
        let radial = RadialTable::for_sigma(s).unwrap();
        let mp = compute_marginals(&table).unwrap();
        assert!((mp.a_prime - radial.a_prime()).abs() <= 1e-5, "σ = {s}");
        for &(p1, p2) in &probe_points(&cfg, 5) {
            let (e, f, g) = table.eval(p1, p2);
            let (re, rf, rg) = radial.kernels(p1, p2);
            assert!((e - re).abs().max((f - rf).abs()).max((g - rg).abs()) <= 1e-5);
        }
    }
}

#[test]
fn plancherel_cross_check() {
    for (s1, s2) in [(0.7, 0.7), (0.3, 1.2)] {
        let cfg = DetectorConfig::two(s1, s2);
        let (_, c_ff, _) = quadrant_coefficients(&KernelTable2::build(&cfg).unwrap());
        let pos = plancherel_cff(&cfg).unwrap();
        assert!((c_ff - pos).abs() <= 1e-6, "{c_ff} vs {pos}");
    }
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(matches!(KernelTable2::build(&DetectorConfig::two(0.0, 1.0)), Err(Error::Config(_))));
    assert!(matches!(KernelTable2::build(&DetectorConfig::two(0.7, 0.7).with_grid_points(100)), Err(Error::Config(_))));
    let mut cfg = DetectorConfig::two(0.1, 0.7);
    cfg.grid_extent = Some(20.0);
    assert!(matches!(KernelTable2::build(&cfg), Err(Error::Config(_))));
    assert!(matches!(KernelTable3::build(&DetectorConfig::two(0.7, 0.7)), Err(Error::Config(_))));
}

#[test]
fn mc_is_deterministic() {
    let cfg = DetectorConfig::three(0.7, 0.7, 0.7).with_mc(1 << 16, 42);
    let a = mc_integrate3(&cfg, Product3::Density, Region3::Full).unwrap();
    let b = mc_integrate3(&cfg, Product3::Density, Region3::Full).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| mc_integrate3(&cfg, Product3::Density, Region3::Full).unwrap());
    assert_eq!(a, c);
    let d = mc_integrate3(&cfg.clone().with_mc(1 << 16, 43), Product3::Density, Region3::Full).unwrap();
    assert_ne!(a.value, d.value);
}

#[test]
fn three_detector_normalization() {
    for sig in [[0.7, 0.7, 0.7], [0.5, 0.7, 0.9]] {
        let cfg = DetectorConfig::three(sig[0], sig[1], sig[2]);
        let tm = compute_triple(&cfg).unwrap();
        let n = tm.normalization;
        assert!(n.stderr <= 1e-3, "{n:?}");
        assert!((n.value - 1.0).abs() <= 3.0 * n.stderr, "{n:?}");
    }
}

#[test]
fn radial_three_detector_profile() {
    let t = RadialTable3::for_sigma(0.7).unwrap();
    assert!(t.profile().normalization_defect < 1e-6);
    let table = KernelTable3::build(&DetectorConfig::three(0.7, 0.7, 0.7)).unwrap();
    assert!(table.is_radial());
    let grid = KernelTable3::build_grid(&DetectorConfig::three(0.7, 0.7, 0.7)).unwrap();
    for p in [[0.3, 0.1, -0.4], [1.2, -0.7, 0.2], [-0.05, 2.0, 1.0]] {
        let a = table.kernels(p);
        let b = grid.kernels(p);
        for i in 0..4 {
            assert!((a[i] - b[i]).abs() < 1e-4, "{p:?}: {a:?} vs {b:?}");
        }
    }
}
