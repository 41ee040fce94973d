//! Base spaces, integral degree-one classes and their cyclic covers.
//!
//! A point of a base space has two coordinates `(s, t)`:
//!
//! | kind | `s` | `t` |
//! |------|-----|-----|
//! | `Circle` | angle in `[0,1)` | unused (0) |
//! | `Annulus` | angle in `[0,1)` | radius in `[0,1]` |
//! | `Torus2` | angle in `[0,1)` | angle in `[0,1)` |
//! | `CircleTimesCompactifiedLine` | angle in `[0,1)` | `x ∈ ℝ ∪ {∞}`, `∞` stored as `+∞` |
//!
//! Each space has up to two circle factors. The extended line `ℝ ∪ {∞}` is
//! the circle with unit coordinate `θ = (w + 1)/2`, `w = x/(1+|x|)`, so that
//! `∞` sits at `θ = 0`.
//!
//! The cyclic cover of a class with pairing vector `a` is modelled as pairs
//! `(base, sheet)`; the deck group acts by `sheet ↦ sheet + k`. The built-in
//! potential is `F(base, sheet) = Σ aᵢ θᵢ(base) + sheet`.

mod path;
mod potential;

pub use path::Path;
pub use potential::{
    cocycle_from_potential, potential_from_cocycle, verify_equivariance, PathIntegralCocycle,
    Potential,
};

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Circle,
    Annulus,
    Torus2,
    CircleTimesCompactifiedLine,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 4] = [
        SpaceKind::Circle,
        SpaceKind::Annulus,
        SpaceKind::Torus2,
        SpaceKind::CircleTimesCompactifiedLine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Circle => "Circle",
            SpaceKind::Annulus => "Annulus",
            SpaceKind::Torus2 => "Torus2",
            SpaceKind::CircleTimesCompactifiedLine => "CircleTimesCompactifiedLine",
        }
    }

    pub fn parse(name: &str) -> Option<SpaceKind> {
        SpaceKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Length of the homology basis the class is paired against.
    pub fn basis_len(self) -> usize {
        match self {
            SpaceKind::Circle | SpaceKind::Annulus => 1,
            SpaceKind::Torus2 | SpaceKind::CircleTimesCompactifiedLine => 2,
        }
    }

    /// Whether the second coordinate is a circle factor.
    pub fn second_is_circle(self) -> bool {
        matches!(
            self,
            SpaceKind::Torus2 | SpaceKind::CircleTimesCompactifiedLine
        )
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A base space together with an integral class, given by its pairing with
/// the fixed homology basis (one loop per circle factor).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Space {
    kind: SpaceKind,
    class_pairing: Vec<i64>,
}

impl Space {
    pub fn new(kind: SpaceKind, class_pairing: Vec<i64>) -> Result<Space> {
        if class_pairing.len() != kind.basis_len() {
            return Err(Error::Precondition(format!(
                "{kind} needs a class pairing of length {}, got {}",
                kind.basis_len(),
                class_pairing.len()
            )));
        }
        if class_pairing.iter().all(|&a| a == 0) {
            return Err(Error::Precondition(
                "class pairing is zero; use Space::zero_class".into(),
            ));
        }
        Ok(Space {
            kind,
            class_pairing,
        })
    }

    pub fn zero_class(kind: SpaceKind) -> Space {
        Space {
            kind,
            class_pairing: vec![0; kind.basis_len()],
        }
    }

    pub fn circle() -> Space {
        Space::new(SpaceKind::Circle, vec![1]).unwrap()
    }

    pub fn annulus() -> Space {
        Space::new(SpaceKind::Annulus, vec![1]).unwrap()
    }

    pub fn torus2(a: i64, b: i64) -> Space {
        Space::new(SpaceKind::Torus2, vec![a, b]).unwrap()
    }

    /// `S¹ × (ℝ ∪ {∞})` with the class of the first circle coordinate.
    pub fn compactified_torus() -> Space {
        Space::new(SpaceKind::CircleTimesCompactifiedLine, vec![1, 0]).unwrap()
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn class_pairing(&self) -> &[i64] {
        &self.class_pairing
    }

    /// Pairing vector padded to two entries.
    pub(crate) fn pairing2(&self) -> [f64; 2] {
        let a = self.class_pairing[0] as f64;
        let b = self.class_pairing.get(1).copied().unwrap_or(0) as f64;
        [a, b]
    }

    /// `⟨a, Σ shiftᵢ · loopᵢ⟩` for unwrapped angular increments.
    pub fn pair(&self, shift: [f64; 2]) -> f64 {
        let [a, b] = self.pairing2();
        let mut total = a * shift[0];
        if b != 0.0 {
            total += b * shift[1];
        }
        total
    }

    pub fn basepoint(&self) -> Point {
        Point::new(0.0, 0.0)
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        let bad = |what: &str| Err(Error::Domain(format!("{what} in {} at {p}", self.kind)));
        if !p.s.is_finite() || !(0.0..1.0).contains(&p.s) {
            return bad("angle outside [0,1)");
        }
        match self.kind {
            SpaceKind::Circle => {
                if p.t != 0.0 {
                    return bad("second coordinate set");
                }
            }
            SpaceKind::Annulus => {
                if !(0.0..=1.0).contains(&p.t) {
                    return bad("radius outside [0,1]");
                }
            }
            SpaceKind::Torus2 => {
                if !p.t.is_finite() || !(0.0..1.0).contains(&p.t) {
                    return bad("angle outside [0,1)");
                }
            }
            SpaceKind::CircleTimesCompactifiedLine => {
                if p.t.is_nan() || p.t == f64::NEG_INFINITY {
                    return bad("extended-line coordinate not in ℝ ∪ {∞}");
                }
            }
        }
        Ok(())
    }

    /// Reduces angles into `[0,1)`, clamps nothing, maps `-∞` to `∞`.
    pub fn normalize(&self, p: Point) -> Point {
        let s = wrap_unit(p.s);
        let t = match self.kind {
            SpaceKind::Circle => 0.0,
            SpaceKind::Annulus => p.t,
            SpaceKind::Torus2 => wrap_unit(p.t),
            SpaceKind::CircleTimesCompactifiedLine => {
                if p.t.is_infinite() {
                    f64::INFINITY
                } else {
                    p.t
                }
            }
        };
        Point::new(s, t)
    }

    /// Unit coordinates `θᵢ ∈ [0,1)` of each circle factor (second entry is 0
    /// when there is no second circle).
    pub fn angles(&self, p: &Point) -> [f64; 2] {
        match self.kind {
            SpaceKind::Circle | SpaceKind::Annulus => [p.s, 0.0],
            SpaceKind::Torus2 => [p.s, p.t],
            SpaceKind::CircleTimesCompactifiedLine => [p.s, line_to_unit(p.t)],
        }
    }

    /// `Σ aᵢ θᵢ(p)`: the built-in potential restricted to sheet 0.
    pub fn phi(&self, p: &Point) -> f64 {
        self.pair(self.angles(p))
    }

    /// Point with the given unit coordinates (second one ignored on
    /// `Circle`, used verbatim as the radius on `Annulus`).
    pub fn from_units(&self, u0: f64, u1: f64) -> Point {
        match self.kind {
            SpaceKind::Circle => Point::new(wrap_unit(u0), 0.0),
            SpaceKind::Annulus => Point::new(wrap_unit(u0), u1),
            SpaceKind::Torus2 => Point::new(wrap_unit(u0), wrap_unit(u1)),
            SpaceKind::CircleTimesCompactifiedLine => {
                Point::new(wrap_unit(u0), unit_to_line(wrap_unit(u1)))
            }
        }
    }

    /// Loops generating `H₁` at the basepoint, one per circle factor.
    pub fn basis_loops(&self) -> Vec<Path> {
        let b = self.basepoint();
        let mut loops = vec![Path::new(vec![b, b], vec![[1, 0]]).unwrap()];
        if self.kind.second_is_circle() {
            loops.push(Path::new(vec![b, b], vec![[0, 1]]).unwrap());
        }
        loops
    }

    /// Uniformly distributed point. On the extended line the unit coordinate
    /// is kept inside `[1/2000, 1999/2000]` (|x| ≤ 999) except for an
    /// explicit `∞` drawn with probability 1/16.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let s: f64 = rng.gen();
        match self.kind {
            SpaceKind::Circle => Point::new(s, 0.0),
            SpaceKind::Annulus => Point::new(s, rng.gen_range(0.0..=1.0)),
            SpaceKind::Torus2 => Point::new(s, rng.gen()),
            SpaceKind::CircleTimesCompactifiedLine => {
                if rng.gen_ratio(1, 16) {
                    Point::new(s, f64::INFINITY)
                } else {
                    let w: f64 = rng.gen_range(-0.999..0.999);
                    Point::new(s, w / (1.0 - w.abs()))
                }
            }
        }
    }

    /// Dyadic grid over a fundamental domain in unit coordinates, `2^level`
    /// points per circle axis and `2^level + 1` along the annulus radius.
    /// Grids at increasing level are nested.
    pub fn grid(&self, level: u32) -> Grid {
        let m = 1usize << level;
        let mesh = 1.0 / m as f64;
        let axis0: Vec<f64> = (0..m).map(|i| i as f64 * mesh).collect();
        let axis1: Vec<f64> = match self.kind {
            SpaceKind::Circle => vec![0.0],
            SpaceKind::Annulus => (0..=m).map(|i| i as f64 * mesh).collect(),
            _ => axis0.clone(),
        };
        let mut points = Vec::with_capacity(axis0.len() * axis1.len());
        for &u in &axis0 {
            for &v in &axis1 {
                points.push(self.from_units(u, v));
            }
        }
        Grid { points, mesh }
    }

    pub fn describe(&self) -> String {
        let pairing: Vec<String> = self.class_pairing.iter().map(|a| a.to_string()).collect();
        format!("{} class=[{}]", self.kind, pairing.join(" "))
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[derive(Clone, Debug)]
pub struct Grid {
    pub points: Vec<Point>,
    /// Spacing in unit coordinates.
    pub mesh: f64,
}

/// A point of a base space; see the module docs for the coordinate layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub s: f64,
    pub t: f64,
}

impl Point {
    pub const fn new(s: f64, t: f64) -> Point {
        Point { s, t }
    }

    pub const fn circle(s: f64) -> Point {
        Point { s, t: 0.0 }
    }

    pub fn is_at_infinity(&self) -> bool {
        self.t.is_infinite()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.t.is_infinite() {
            write!(f, "({}, inf)", self.s)
        } else {
            write!(f, "({}, {})", self.s, self.t)
        }
    }
}

/// A point of the cyclic cover: a base point and a real sheet height.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoverPoint {
    pub base: Point,
    pub sheet: f64,
}

impl CoverPoint {
    pub const fn new(base: Point, sheet: f64) -> CoverPoint {
        CoverPoint { base, sheet }
    }

    /// Deck transformation by `k`.
    pub fn deck(&self, k: i64) -> CoverPoint {
        CoverPoint {
            base: self.base,
            sheet: self.sheet + k as f64,
        }
    }

    pub fn project(&self) -> Point {
        self.base
    }
}

pub(crate) fn wrap_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Unit coordinate of `x ∈ ℝ ∪ {∞}` on the extended-line circle.
pub fn line_to_unit(x: f64) -> f64 {
    if x.is_infinite() {
        0.0
    } else {
        let w = x / (1.0 + x.abs());
        wrap_unit((w + 1.0) / 2.0)
    }
}

pub fn unit_to_line(u: f64) -> f64 {
    if u == 0.0 {
        f64::INFINITY
    } else {
        let w = 2.0 * u - 1.0;
        w / (1.0 - w.abs())
    }
}
