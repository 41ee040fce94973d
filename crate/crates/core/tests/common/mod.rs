#![allow(dead_code)]

use num::rational::Rational64;
use rand::seq::SliceRandom;
use rand::Rng;
use undistort::{Homeo, PlCircleMap, Space, Surd};

pub fn q(n: i64, d: i64) -> Surd {
    Surd::ratio(n, d)
}

/// Knot data `(x, y)` in sixteenths for a random PL lift: breakpoints in
/// `[0, 1)`, values strictly increasing with total spread below one.
pub fn random_pl_data<R: Rng>(rng: &mut R) -> Vec<(i64, i64)> {
    let n = rng.gen_range(1..=4);
    let mut xs: Vec<i64> = (0..16).collect();
    xs.shuffle(rng);
    let mut xs: Vec<i64> = xs[..n].to_vec();
    xs.sort();
    let mut ys: Vec<i64> = (0..16).collect();
    ys.shuffle(rng);
    let mut ys: Vec<i64> = ys[..n].to_vec();
    ys.sort();
    let offset = rng.gen_range(0..16);
    xs.into_iter()
        .zip(ys)
        .map(|(x, y)| (x, y + offset))
        .collect()
}

pub fn pl_from_data(data: &[(i64, i64)]) -> PlCircleMap {
    let knots = data.iter().map(|&(x, y)| (q(x, 16), q(y, 16))).collect();
    PlCircleMap::new(knots).expect("valid random PL data")
}

/// Random PL circle map with dyadic breakpoints and values.
pub fn random_pl<R: Rng>(rng: &mut R) -> PlCircleMap {
    pl_from_data(&random_pl_data(rng))
}

/// Lift value straight from the knot data, by scanning the periodically
/// extended knot list.
pub fn naive_lift(data: &[(i64, i64)], x: Rational64) -> Rational64 {
    let r = |n: i64| Rational64::new(n, 16);
    let one = Rational64::from_integer(1);
    let k = x.floor();
    let f = x - k;
    let (lx, ly) = *data.last().unwrap();
    let (fx, fy) = data[0];
    let mut ext = vec![(r(lx) - one, r(ly) - one)];
    ext.extend(data.iter().map(|&(a, b)| (r(a), r(b))));
    ext.push((r(fx) + one, r(fy) + one));
    for w in ext.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if x0 <= f && f < x1 {
            return y0 + (f - x0) * (y1 - y0) / (x1 - x0) + k;
        }
    }
    unreachable!("extended knots cover [0,1)")
}

pub fn to_surd(x: Rational64) -> Surd {
    Surd::ratio(*x.numer(), *x.denom())
}

fn small_rational<R: Rng>(rng: &mut R) -> Surd {
    q(rng.gen_range(-12..=12), rng.gen_range(1..=8))
}

/// A random map from one of the built-in families (or a PL map), on a
/// space with a random class.
pub fn random_homeo<R: Rng>(rng: &mut R) -> Homeo {
    let space = random_space_for(rng.gen_range(0..7), rng);
    random_homeo_on(&space, rng)
}

pub fn random_space_for<R: Rng>(family: usize, rng: &mut R) -> Space {
    use undistort::SpaceKind::*;
    let kind = match family {
        0 | 5 | 6 => Circle,
        1 => Annulus,
        2 => CircleTimesCompactifiedLine,
        _ => Torus2,
    };
    match kind {
        Circle | Annulus => Space::new(kind, vec![*[1, 2, -1].choose(rng).unwrap()]).unwrap(),
        CircleTimesCompactifiedLine => {
            Space::new(kind, vec![1, *[0, 1].choose(rng).unwrap()]).unwrap()
        }
        Torus2 => {
            let (a, b) = *[(1, 0), (0, 1), (2, -3), (1, 1)].choose(rng).unwrap();
            Space::torus2(a, b)
        }
    }
}

/// A random map on `space` from the families living there.
pub fn random_homeo_on<R: Rng>(space: &Space, rng: &mut R) -> Homeo {
    use undistort::SpaceKind::*;
    match space.kind() {
        Circle => match rng.gen_range(0..3) {
            0 => Homeo::rigid_rotation(space, small_rational(rng)).unwrap(),
            // |strength| ≤ 1/4: stronger contraction toward the attracting
            // fixed point leaves too few f64 digits for round trips
            1 => Homeo::gradient_time_one(space, q(rng.gen_range(-4..=4), 16)).unwrap(),
            _ => Homeo::pl(space, random_pl(rng)).unwrap(),
        },
        Annulus => Homeo::annulus_twist(space, small_rational(rng), small_rational(rng)).unwrap(),
        CircleTimesCompactifiedLine => Homeo::torus_shear(space, rng.gen_range(-3..=3)).unwrap(),
        Torus2 => {
            if rng.gen_bool(0.5) {
                Homeo::torus_bump(space, small_rational(rng)).unwrap()
            } else {
                Homeo::torus_translation(space, small_rational(rng), small_rational(rng)).unwrap()
            }
        }
    }
}

/// Distance on the unit circle.
pub fn circ(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}
