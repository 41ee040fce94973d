mod common;

use common::*;
use rand::Rng;
use undistort::cocycle::seminorm;
use undistort::measure::{certify_two_measures, InvariantCircle, Measure};
use undistort::wordgeom::{ball, translation_length, word_norm, GenSet, DEFAULT_SEMINORM_LEVEL};
use undistort::{sampling, Homeo, Space, Surd};

/// Two PL maps supported on the two halves of the circle; they commute and
/// generate a copy of ℤ².
fn commuting_pair() -> GenSet {
    let c = Space::circle();
    let p = Homeo::pl(&c, pl_from_data(&[(0, 0), (4, 2), (8, 8)])).unwrap();
    let q = Homeo::pl(&c, pl_from_data(&[(0, 0), (8, 8), (12, 10)])).unwrap();
    GenSet::new(
        vec![("p".into(), p), ("q".into(), q)],
        DEFAULT_SEMINORM_LEVEL,
    )
    .unwrap()
}

fn half_twist_set() -> GenSet {
    let t = Homeo::annulus_twist(&Space::annulus(), Surd::zero(), Surd::ratio(1, 2)).unwrap();
    GenSet::new(vec![("T".into(), t)], DEFAULT_SEMINORM_LEVEL).unwrap()
}

/// Number of lattice points with `|a| + |b| ≤ r`.
fn taxicab(r: usize) -> usize {
    let r = r as i64;
    let mut count = 0;
    for a in -r..=r {
        for b in -r..=r {
            if a.abs() + b.abs() <= r {
                count += 1;
            }
        }
    }
    count
}

#[test]
fn commuting_pair_grows_like_the_square_lattice() {
    let set = commuting_pair();
    let b = ball(&set, 3, 1_000_000).unwrap();
    let oracle: Vec<usize> = (0..=3).map(taxicab).collect();
    assert_eq!(oracle, vec![1, 5, 13, 25]);
    assert_eq!(b.sizes, oracle);
    assert!(!b.truncated);
}

#[test]
fn balls_are_nested() {
    let set = commuting_pair();
    let small = ball(&set, 2, 1_000_000).unwrap();
    let big = ball(&set, 3, 1_000_000).unwrap();
    for node in &small.nodes {
        let there = big
            .lookup(&node.canonical)
            .expect("element of the smaller ball");
        assert_eq!(there.length, node.length);
        assert_eq!(there.witness, node.witness);
    }
    assert_eq!(&big.sizes[..3], &small.sizes[..]);
}

#[test]
fn witnesses_evaluate_to_their_elements() {
    let set = commuting_pair();
    let b = ball(&set, 3, 1_000_000).unwrap();
    for node in &b.nodes {
        assert_eq!(node.witness.len(), node.length);
        assert_eq!(
            set.eval(&node.witness).unwrap().canonical(),
            Some(node.canonical.clone())
        );
    }
}

#[test]
fn word_norm_is_subadditive() {
    let set = commuting_pair();
    let b = ball(&set, 4, 1_000_000).unwrap();
    let mut rng = sampling::rng(71);
    for _ in 0..300 {
        let g = &b.nodes[rng.gen_range(0..b.nodes.len())];
        let h = &b.nodes[rng.gen_range(0..b.nodes.len())];
        let gh = g.element.compose(&h.element).unwrap();
        if let Some(len) = b.norm_of(&gh) {
            assert!(len <= g.length + h.length);
        } else {
            // outside the ball means longer than the radius
            assert!(g.length + h.length > 4);
        }
    }
}

#[test]
fn seminorm_is_bounded_by_word_length() {
    let set = commuting_pair();
    let b = ball(&set, 3, 1_000_000).unwrap();
    for node in &b.nodes {
        let s = seminorm(&node.element, DEFAULT_SEMINORM_LEVEL)
            .unwrap()
            .value;
        assert!(s <= set.constant() * node.length as f64 + 1e-9);
    }
}

#[test]
fn generator_and_identity_norms() {
    let set = commuting_pair();
    let p = set.generators()[0].clone();
    assert_eq!(word_norm(&p, &set, 2, 1000).unwrap().exact, Some(1));
    let id = Homeo::identity(p.space());
    let n = word_norm(&id, &set, 2, 1000).unwrap();
    assert_eq!(n.exact, Some(0));
    assert_eq!(n.lower_bound, 0.0);
}

#[test]
fn twist_powers_meet_the_seminorm_bound() {
    let set = half_twist_set();
    assert!((set.constant() - 0.5).abs() <= 1e-12);
    let t = set.generators()[0].clone();
    for n in 1..=6 {
        let w = word_norm(&t.power(n).unwrap(), &set, 6, 1000).unwrap();
        assert_eq!(w.exact, Some(n as usize));
        assert!((w.lower_bound - n as f64).abs() <= 1e-9);
    }
}

#[test]
fn twist_translation_length_sandwich() {
    let set = half_twist_set();
    let t = set.generators()[0].clone();
    let a = t.space().clone();
    let cert = certify_two_measures(
        &Measure::circle(&a, InvariantCircle::Boundary(0)).unwrap(),
        &Measure::circle(&a, InvariantCircle::Boundary(1)).unwrap(),
        &t,
        Some(set.constant()),
    )
    .unwrap();
    let tl = translation_length(&t, &set, 8, 1000, std::slice::from_ref(&cert)).unwrap();
    assert_eq!(tl.upper, Some(1.0));
    assert!((tl.lower - 1.0).abs() <= 1e-9);
    // |Tⁿ| ≥ n·gap/C
    let gap = cert.seminorm_units_bound();
    for &(n, len) in &tl.power_norms {
        assert!(len as f64 >= n as f64 * gap / set.constant() - 1e-9);
    }
}

#[test]
fn irrational_rotation_generates_z() {
    let c = Space::circle();
    let r = Homeo::rigid_rotation(&c, &Surd::sqrt(2) - &Surd::one()).unwrap();
    let set = GenSet::new(vec![("r".into(), r.clone())], DEFAULT_SEMINORM_LEVEL).unwrap();
    assert_eq!(ball(&set, 4, 1000).unwrap().sizes, vec![1, 3, 5, 7, 9]);
    let tl = translation_length(&r, &set, 8, 1000, &[]).unwrap();
    assert_eq!(tl.upper, Some(1.0));
    // rotations have vanishing seminorm, so no certificate can bound τ here
    assert_eq!(tl.lower, 0.0);
}

#[test]
fn rational_rotation_is_torsion() {
    let c = Space::circle();
    let r = Homeo::rigid_rotation(&c, Surd::ratio(1, 3)).unwrap();
    let set = GenSet::new(vec![("r".into(), r.clone())], DEFAULT_SEMINORM_LEVEL).unwrap();
    assert_eq!(ball(&set, 5, 1000).unwrap().sizes, vec![1, 3, 3, 3, 3, 3]);
    assert_eq!(
        translation_length(&r, &set, 5, 1000, &[]).unwrap().upper,
        Some(0.0)
    );
}

#[test]
fn mixed_rotation_and_pl_stay_exact() {
    let c = Space::circle();
    let r = Homeo::rigid_rotation(&c, Surd::ratio(1, 4)).unwrap();
    let p = Homeo::pl(&c, pl_from_data(&[(0, 0), (4, 2), (8, 8)])).unwrap();
    let set = GenSet::new(vec![("r".into(), r), ("p".into(), p)], 6).unwrap();
    let b = ball(&set, 3, 100_000).unwrap();
    for node in &b.nodes {
        assert_eq!(
            set.eval(&node.witness).unwrap().canonical(),
            Some(node.canonical.clone())
        );
    }
    assert!(b.sizes.windows(2).all(|w| w[0] < w[1]));
}
