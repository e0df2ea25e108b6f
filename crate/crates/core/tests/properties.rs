use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use linkint::integrator::QuadratureSpec;
use linkint::linalg;
use linkint::linking::{
    angle_integrand, cone_truncate, cone_truncated_linking, link_scene, linking_euclidean, pullback_check,
};
use linkint::manifold::{builtin_scene, polyline, ParamSubmanifold, Scene};
use linkint::oracle::{oracle_linking, sample_to_polylink};

fn scene(name: &str, params: &[f64]) -> Scene {
    builtin_scene(name, params).unwrap()
}

fn value(s: &Scene, spec: &QuadratureSpec) -> f64 {
    link_scene(s, spec).unwrap().1.value
}

fn moved(s: &Scene, seed: u64, shift_scale: f64) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = s.ambient.embedding_dim();
    let rot = linalg::random_rotation(dim, &mut rng);
    let shift: Vec<f64> = (0..dim).map(|i| shift_scale * ((seed as f64 + i as f64) * 1.7).sin()).collect();
    let mut out = s.clone();
    out.k = s.k.transformed(&rot, &shift);
    out.l = s.l.transformed(&rot, &shift);
    out.k_cap = None;
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn orientation_flip_negates(seed in 0u64..1000) {
        let s = moved(&scene("r3_hopf_circles", &[]), seed, 1.0);
        let spec = QuadratureSpec::default();
        let a = value(&s, &spec);
        let mut f = s.clone();
        f.k = s.k.reversed();
        prop_assert!((a + value(&f, &spec)).abs() < 1e-9);
    }

    #[test]
    fn euclidean_snaps_to_crossing_count(seed in 0u64..1000) {
        let s = moved(&scene("r3_torus_link", &[]), seed, 3.0);
        let r = linking_euclidean(&s.k, &s.l, &QuadratureSpec::default()).unwrap();
        let poly = sample_to_polylink(&s.k, &s.l, 256).unwrap();
        let (oracle, _) = oracle_linking(&poly, seed).unwrap();
        prop_assert!(r.residual < 0.02);
        prop_assert_eq!(r.value.round() as i64, oracle);
    }

    #[test]
    fn sphere_rotation_keeps_value(seed in 0u64..1000) {
        let s = moved(&scene("tilted_hopf", &[0.7]), seed, 0.0);
        let v = value(&s, &QuadratureSpec::default());
        prop_assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sphere_and_visible_integrands_agree_on_unit_points(seed in 0u64..1000) {
        let s = scene("hopf_great_circles", &[]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ci, u) = s.k.random_point(&mut rng);
        let (cj, v) = s.l.random_point(&mut rng);
        let x = s.k.charts()[ci].evaluate(&u).unwrap();
        let y = s.l.charts()[cj].evaluate(&v).unwrap();
        let a = angle_integrand(3, 1, &x, &y, false);
        let b = angle_integrand(3, 1, &x, &y, true);
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn swap_preserves_magnitude() {
    let spec = QuadratureSpec::default();
    for (name, params) in [
        ("hopf_great_circles", vec![]),
        ("great_spheres", vec![0.0, 2.0]),
        ("great_spheres", vec![1.0, 2.0]),
        ("r3_torus_link", vec![]),
        ("rn_meridional_spheres", vec![2.0, 1.0]),
        ("s2xr_equator_poles", vec![]),
    ] {
        let s = scene(name, &params);
        let a = value(&s, &spec);
        let b = value(&s.swapped(), &spec);
        assert!((a.abs() - b.abs()).abs() < 1e-6, "{}: {a} vs {b}", s.name);
    }
}

#[test]
fn chart_order_does_not_matter() {
    let spec = QuadratureSpec::default();
    let s = scene("s2xr_equator_poles", &[]);
    let mut p = s.clone();
    p.l = s.l.permuted(&[1, 0]);
    assert!((value(&s, &spec) - value(&p, &spec)).abs() < 1e-12);

    let pts: Vec<Vec<f64>> = (0..12)
        .map(|i| {
            let t = std::f64::consts::TAU * i as f64 / 12.0;
            vec![t.cos(), t.sin(), 0.0]
        })
        .collect();
    let k = polyline::closed_polyline("K", &pts, polyline::Projection::None).unwrap();
    let l = scene("r3_hopf_circles", &[]).l;
    let order: Vec<usize> = (0..12).rev().collect();
    let kp: ParamSubmanifold = k.permuted(&order);
    let a = linking_euclidean(&k, &l, &spec).unwrap().value;
    let b = linking_euclidean(&kp, &l, &spec).unwrap().value;
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
}

#[test]
fn worker_counts_give_identical_bits() {
    for (name, params) in [("great_spheres", vec![1.0, 2.0]), ("r3_torus_link", vec![]), ("s2xr_equator_poles", vec![])] {
        let s = scene(name, &params);
        let base = value(&s, &QuadratureSpec::default().with_workers(1)).to_bits();
        for w in [2, 3, 8] {
            assert_eq!(value(&s, &QuadratureSpec::default().with_workers(w)).to_bits(), base, "{name} with {w} workers");
        }
    }
}

#[test]
fn builtins_snap_with_small_residual() {
    let spec = QuadratureSpec::default();
    for text in [
        "hopf_great_circles",
        "great_spheres(1,1)",
        "great_spheres(2,1)",
        "great_spheres(0,1)",
        "s2xr_equator_poles",
        "r3_hopf_circles",
        "r3_split_unlink",
        "rn_meridional_spheres(1,2)",
        "rn_meridional_spheres(0,1)",
        "s3_cap_circles",
        "tilted_hopf(0.3)",
        "r3_torus_link",
    ] {
        let s = linkint::manifold::Scene::parse(text).unwrap();
        let (_, r) = link_scene(&s, &spec).unwrap();
        assert!(r.residual < 0.02, "{text}: {}", r.value);
        if let Some(e) = s.expected {
            assert_eq!(r.value.round() as i64, e, "{text}");
        }
    }
}

#[test]
fn deeper_refinement_does_not_hurt() {
    let s = scene("tilted_hopf", &[1.3]);
    let mut last = f64::INFINITY;
    for depth in [0, 2, 4, 6] {
        let spec = QuadratureSpec::default().with_order(6).with_depth(depth);
        let err = (value(&s, &spec) - 1.0).abs();
        assert!(err <= last * 1.01 + 1e-14, "depth {depth}: {err} after {last}");
        last = err;
    }
    assert!(last < 1e-6, "{last}");
}

#[test]
fn pullback_on_meridional_spheres() {
    let s = scene("rn_meridional_spheres", &[1.0, 2.0]);
    assert!(pullback_check(&s.k, &s.l, 50, 3).unwrap() < 1e-5);
}

#[test]
fn hopf_cap_decays_like_inverse_square() {
    let s = scene("hopf_great_circles", &[]);
    let spec = QuadratureSpec::default().with_order(24);
    let radii = [2.0, 4.0, 8.0, 16.0, 32.0];
    let mut caps = Vec::new();
    for r in radii {
        let c = cone_truncate(&s.k, s.k_cap.as_ref().unwrap(), r).unwrap();
        let res = cone_truncated_linking(&c, &s.l, &spec).unwrap();
        assert!((res.cap.value - 1.0 / (1.0 + r * r)).abs() < 1e-9, "R = {r}: {}", res.cap.value);
        assert!((res.total.value - 1.0).abs() < 1e-9);
        caps.push(res.cap.value);
    }
    let slope = linkint::cli::log_log_slope(&radii, &caps).unwrap();
    let (k, n) = (s.k.dim() as f64, 3.0);
    assert!((slope - (k - n)).abs() < 0.1, "{slope}");
}
