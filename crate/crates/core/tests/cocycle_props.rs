mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use undistort::cocycle::{
    g_cocycle, g_cocycle_powers, k_eval, k_eval_with, k_identity_residual, k_power, seminorm,
    KFunction,
};
use undistort::sampling;
use undistort::space::{potential_from_cocycle, PathIntegralCocycle};
use undistort::{CoverPoint, Homeo, Point, Space, Surd};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn k_is_additive_along_compositions(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let g = random_homeo(&mut rng);
        let h = random_homeo_on(g.space(), &mut rng);
        let r = k_identity_residual(&g, &h, 200, seed).unwrap();
        prop_assert!(r <= 1e-9, "{} / {}: {r}", g.describe(), h.describe());
    }

    #[test]
    fn two_cocycle_closes(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let g1 = random_homeo(&mut rng);
        let space = g1.space().clone();
        let g2 = random_homeo_on(&space, &mut rng);
        let g3 = random_homeo_on(&space, &mut rng);
        let g12 = g1.compose(&g2).unwrap();
        let g23 = g2.compose(&g3).unwrap();
        for _ in 0..20 {
            let x = space.sample_point(&mut rng);
            let d = g_cocycle(&x, &g2, &g3).unwrap() - g_cocycle(&x, &g12, &g3).unwrap()
                + g_cocycle(&x, &g1, &g23).unwrap()
                - g_cocycle(&x, &g1, &g2).unwrap();
            prop_assert!(d.abs() <= 1e-9);
        }
    }

    #[test]
    fn word_seminorm_is_subadditive(seed in any::<u64>(), len in 1usize..6) {
        let mut rng = sampling::rng(seed);
        let c = Space::circle();
        let gens: Vec<Homeo> = (0..3)
            .map(|_| Homeo::pl(&c, random_pl(&mut rng)).unwrap())
            .collect();
        let mut word = Homeo::identity(&c);
        let mut budget = 0.0;
        for _ in 0..len {
            let s = &gens[rng.gen_range(0..gens.len())];
            let s = if rng.gen_bool(0.5) { s.clone() } else { s.inverse().unwrap() };
            budget += seminorm(&s, 6).unwrap().certified_upper.unwrap();
            word = word.compose(&s).unwrap();
        }
        let w = seminorm(&word, 8).unwrap();
        prop_assert!(w.value <= budget + 1e-12, "{} > {budget}", w.value);
    }

    #[test]
    fn cocycle_is_bounded_by_the_seminorm(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let g = random_homeo(&mut rng);
        let h = random_homeo_on(g.space(), &mut rng);
        if let Some(bound) = seminorm(&g, 7).unwrap().certified_upper {
            for _ in 0..50 {
                let x = g.space().sample_point(&mut rng);
                prop_assert!(g_cocycle(&x, &g, &h).unwrap().abs() <= bound + 1e-12);
            }
        }
    }
}

#[test]
fn inverse_has_the_same_seminorm_on_exact_grids() {
    let annulus = Space::annulus();
    let torus = Space::torus2(1, 0);
    let maps = [
        Homeo::annulus_twist(&annulus, Surd::ratio(1, 3), Surd::ratio(-5, 4)).unwrap(),
        Homeo::torus_bump(&torus, Surd::ratio(7, 5)).unwrap(),
        Homeo::torus_translation(&torus, Surd::ratio(1, 7), Surd::ratio(2, 3)).unwrap(),
    ];
    let expected = [19.0 / 12.0, 7.0 / 5.0, 0.0];
    for (g, e) in maps.iter().zip(expected) {
        let a = seminorm(g, 6).unwrap().value;
        let b = seminorm(&g.inverse().unwrap(), 6).unwrap().value;
        assert!((a - e).abs() <= 1e-12, "{}: {a}", g.describe());
        assert!((a - b).abs() <= 1e-12);
    }
}

#[test]
fn grid_seminorm_increases_to_the_certified_bound() {
    let c = Space::circle();
    let g = Homeo::gradient_time_one(&c, Surd::ratio(1, 5)).unwrap();
    let mut prev = 0.0;
    for level in 2..=10 {
        let s = seminorm(&g, level).unwrap();
        assert!(s.value >= prev - 1e-15);
        assert!(s.value <= s.certified_upper.unwrap());
        prev = s.value;
    }
    let fine = seminorm(&g, 14).unwrap().value;
    assert!(seminorm(&g, 6).unwrap().certified_upper.unwrap() >= fine);
}

#[test]
fn k_agrees_with_any_equivariant_potential() {
    let s = Space::compactified_torus();
    let c = PathIntegralCocycle::of_class(&s);
    let b = CoverPoint::new(Point::new(0.25, 1.5), 0.0);
    let p = potential_from_cocycle(&s, &c, b).unwrap();
    let g = Homeo::torus_shear(&s, 2).unwrap();
    let mut rng = sampling::rng(31);
    for _ in 0..500 {
        let x = s.sample_point(&mut rng);
        let direct = k_eval(&g, &x).unwrap();
        let via = k_eval_with(&g, &p, &x).unwrap();
        assert!((direct - via).abs() <= 1e-9);
    }
}

#[test]
fn pinned_k_vanishes_at_the_pin() {
    let c = Space::circle();
    let g = Homeo::pl(&c, pl_from_data(&[(0, 1), (8, 4)])).unwrap();
    let pin = Point::circle(0.375);
    let k = KFunction::pinned(&g, pin).unwrap();
    assert_eq!(k.eval(&pin).unwrap(), 0.0);
    let x = Point::circle(0.8);
    assert_eq!(
        k.eval(&x).unwrap(),
        k_eval(&g, &x).unwrap() - k_eval(&g, &pin).unwrap()
    );
}

#[test]
fn power_cocycle_matches_composed_maps() {
    let t = Space::torus2(2, -3);
    let g = Homeo::torus_bump(&t, Surd::ratio(2, 3)).unwrap();
    let mut rng = sampling::rng(32);
    for _ in 0..100 {
        let x = t.sample_point(&mut rng);
        let (m, n) = (rng.gen_range(-5..=5), rng.gen_range(-5..=5));
        let a = g_cocycle_powers(&x, &g, m, n).unwrap();
        let b = g_cocycle(&x, &g.power(m).unwrap(), &g.power(n).unwrap()).unwrap();
        assert!((a - b).abs() <= 1e-9);
        assert!(
            (k_power(&g, &x, m).unwrap() - k_eval(&g.power(m).unwrap(), &x).unwrap()).abs() <= 1e-9
        );
    }
}
