use ajm_core::ak_two::{
    compute_marginals,
    default_sigma_grid, marginals_for, oblique_effects, oblique_probabilities, outcome_probabilities, post_state,
    probe_points, symmetry_probe, Symmetry,
};
use ajm_core::effect::{is_valid_effect, OUTCOMES2};
use ajm_core::kernel::{KernelEvaluator2, KernelTable2};
use ajm_core::{BlochState, DetectorConfig, Error, Sign, Vec3};
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type M2 = [[C; 2]; 2];

fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[C::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn pauli_combo(c0: f64, v: Vec3) -> M2 {
    let i = C::I;
    [
        [C::from(c0 + v.z), C::from(v.x) - i * v.y],
        [C::from(v.x) + i * v.y, C::from(c0 - v.z)],
    ]
}

/// Normalized `Σ w T ρ T†` over the outcome quadrant with `T = e + fσx + gσy`.
fn matrix_post_state(table: &KernelTable2, chi: Vec3, outcome: (Sign, Sign)) -> (f64, Vec3) {
    let rho = pauli_combo(0.5, chi * 0.5);
    let (sa, sb) = (outcome.0.value(), outcome.1.value());
    let (w1, w2) = (&table.axis(0).weights, &table.axis(1).weights);
    let mut acc = [[C::ZERO; 2]; 2];
    for (i, wi) in w1.iter().enumerate() {
        for (j, wj) in w2.iter().enumerate() {
            let t = pauli_combo(
                table.e0()[[i, j]],
                Vec3::new(sa * table.f0()[[i, j]], sb * table.g0()[[i, j]], 0.0),
            );
            let m = mul(&mul(&t, &rho), &t);
            for a in 0..2 {
                for b in 0..2 {
                    acc[a][b] += m[a][b] * (wi * wj);
                }
            }
        }
    }
    let tr = (acc[0][0] + acc[1][1]).re;
    let r = Vec3::new(2.0 * acc[1][0].re, 2.0 * acc[1][0].im, (acc[0][0] - acc[1][1]).re) / tr;
    (tr, r)
}

fn random_state(rng: &mut ChaCha8Rng) -> BlochState {
    loop {
        let r = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if r.norm() <= 1.0 {
            return BlochState::new(r).unwrap();
        }
    }
}

#[test]
fn post_state_matches_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (s1, s2) in [(0.7, 0.7), (0.4, 1.3)] {
        let table = KernelTable2::build(&DetectorConfig::two(s1, s2)).unwrap();
        let mp = compute_marginals(&table).unwrap();
        for _ in 0..4 {
            let chi = random_state(&mut rng);
            let probs = outcome_probabilities(&mp, &chi);
            for (k, o) in OUTCOMES2.iter().enumerate() {
                let ps = post_state(&table, &chi, *o).unwrap();
                let (tr, r) = matrix_post_state(&table, chi.r, *o);
                assert!((ps.probability - probs[k]).abs() <= 1e-6, "trace consistency {o:?}");
                assert!((ps.probability - tr).abs() <= 1e-9);
                assert!(ps.exact_state.r.max_abs_diff(r) <= 1e-6, "{:?} vs {r:?}", ps.exact_state.r);
            }
        }
    }
}

#[test]
fn post_state_figure_bands() {
    let table = KernelTable2::build(&DetectorConfig::two(0.7, 0.7)).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let chi = BlochState::new(Vec3::new(h, h, 0.0)).unwrap();
    let ps = post_state(&table, &chi, (Sign::Plus, Sign::Plus)).unwrap();
    let up = ps.state.uncertainty_product();
    let mag = ps.state.magnitude();
    assert!((0.85..=1.0).contains(&up), "{up}");
    assert!((0.4..=0.6).contains(&mag), "{mag}");

    let table = KernelTable2::build(&DetectorConfig::two(0.1, 3.0)).unwrap();
    let ps = post_state(&table, &chi, (Sign::Plus, Sign::Plus)).unwrap();
    assert!(ps.state.angle_to_x_deg() >= 80.0, "{}", ps.state.angle_to_x_deg());
}

#[test]
fn states_outside_the_ball_are_rejected() {
    assert!(matches!(BlochState::new(Vec3::new(1.0, 1.0, 0.0)), Err(Error::Domain(_))));
    let table = KernelTable2::build(&DetectorConfig::two(0.7, 0.7)).unwrap();
    let chi = BlochState::new(Vec3::X).unwrap();
    assert!(post_state(&table, &chi, (Sign::Minus, Sign::Minus)).unwrap().probability > 0.0);
}

#[test]
fn sharp_limit_is_monotone() {
    let sig2: Vec<f64> = (1..=30).map(|k| 0.1 * k as f64).collect();
    let rows: Vec<_> = sig2.iter().map(|&s| marginals_for(0.1, s, 512).unwrap()).collect();
    for w in rows.windows(2) {
        assert!(w[1].b_prime > w[0].b_prime);
        assert!(w[1].a_prime < w[0].a_prime);
    }
    assert!(rows.last().unwrap().uncertainty_lhs() >= 0.9);
}

#[test]
fn symmetric_aprime_rises_up_to_point_seven() {
    let grid: Vec<f64> = default_sigma_grid().into_iter().filter(|&s| s <= 0.7 + 1e-12).collect();
    let vals: Vec<f64> = grid.iter().map(|&s| marginals_for(s, s, 512).unwrap().a_prime).collect();
    for w in vals.windows(2) {
        assert!(w[1] >= w[0]);
    }
}

#[test]
fn oblique_is_nonnegative_and_valid() {
    let a_max = 2.0 / std::f64::consts::PI;
    for a in [0.0, 0.3, 0.5, a_max] {
        for it in 0..=24 {
            let theta = std::f64::consts::PI * it as f64 / 24.0;
            for e in oblique_effects(a, theta) {
                assert!(is_valid_effect(&e), "a′ {a} θ {theta}");
            }
            for i in 0..=12 {
                for j in 0..24 {
                    let th = std::f64::consts::PI * i as f64 / 12.0;
                    let ph = 2.0 * std::f64::consts::PI * j as f64 / 24.0;
                    let p = oblique_probabilities(a, theta, &BlochState::pure(th, ph));
                    assert!(p.iter().all(|&x| x >= -1e-15), "{p:?}");
                    assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn symmetry_probes() {
    let cfg = DetectorConfig::two(0.7, 0.7);
    let ev = KernelEvaluator2::new(&cfg).unwrap();
    let pts = probe_points(&cfg, 5);
    let chi = BlochState::new(Vec3::new(0.3, -0.5, 0.6)).unwrap();
    assert!(symmetry_probe(&ev, &cfg, &chi, Symmetry::Reflection, &pts).unwrap() <= 1e-6);
    for th in [0.4, -1.1] {
        assert!(symmetry_probe(&ev, &cfg, &chi, Symmetry::Rotation(th), &pts).unwrap() <= 1e-6);
    }
    // Rotating the state the other way breaks the identity.
    let wrong = BlochState::new(chi.rotated_z(-0.4).r).unwrap();
    let dev: f64 = pts
        .iter()
        .map(|&(p1, p2)| {
            let (s, c) = 0.4f64.sin_cos();
            (ev.density(p1, p2, chi.r) - ev.density(c * p1 - s * p2, s * p1 + c * p2, wrong.r)).abs()
        })
        .fold(0.0, f64::max);
    assert!(dev > 1e-3);

    let asym = DetectorConfig::two(0.5, 0.9);
    let ev = KernelEvaluator2::new(&asym).unwrap();
    let pts = probe_points(&asym, 5);
    assert!(symmetry_probe(&ev, &asym, &chi, Symmetry::Reflection, &pts).unwrap() <= 1e-6);
    assert!(matches!(
        symmetry_probe(&ev, &asym, &chi, Symmetry::Rotation(0.3), &pts),
        Err(Error::Precondition(_))
    ));
}
