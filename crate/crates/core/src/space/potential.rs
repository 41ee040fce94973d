//! Equivariant potentials on the cyclic cover and the path-integral
//! cocycles they correspond to.
//!
//! A cocycle `c` in the class `a` gives the potential
//! `P(y, h) = c(γ) + h − h₀` where `γ` is the direct polyline from the
//! basepoint projection to `y` (its canonical lift ends on the sheet that
//! makes this formula agree with lifting `γ` from the basepoint). A potential
//! gives back the cocycle `γ ↦ P(γ̃(1)) − P(γ̃(0))`.

use std::fmt;
use std::sync::Arc;

use super::{CoverPoint, Path, Point, Space};
use crate::error::{Error, Result};
use crate::sampling;
use crate::INTEGER_TOLERANCE;

type CoverFn = Arc<dyn Fn(&CoverPoint) -> f64 + Send + Sync>;
type BaseFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;

#[derive(Clone)]
enum PotentialRepr {
    BuiltIn,
    FromCocycle {
        cocycle: Box<PathIntegralCocycle>,
        basepoint: CoverPoint,
    },
    Custom(CoverFn),
}

/// An equivariant function `F` on the cyclic cover,
/// `F(base, h + k) = F(base, h) + k`.
#[derive(Clone)]
pub struct Potential {
    space: Space,
    repr: PotentialRepr,
    modulus: Option<f64>,
    description: String,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("space", &self.space)
            .field("description", &self.description)
            .finish()
    }
}

impl Potential {
    /// `F(base, h) = Σ aᵢ θᵢ(base) + h`.
    pub fn built_in(space: &Space) -> Potential {
        let [a, b] = space.pairing2();
        let second = match space.kind() {
            super::SpaceKind::Torus2 => 1.0,
            super::SpaceKind::CircleTimesCompactifiedLine => 0.5,
            _ => 0.0,
        };
        Potential {
            space: space.clone(),
            repr: PotentialRepr::BuiltIn,
            modulus: Some(a.abs() + b.abs() * second),
            description: "built-in".into(),
        }
    }

    /// Arbitrary function on the cover; equivariance is not checked.
    pub fn custom<F>(space: &Space, description: &str, f: F) -> Potential
    where
        F: Fn(&CoverPoint) -> f64 + Send + Sync + 'static,
    {
        Potential {
            space: space.clone(),
            repr: PotentialRepr::Custom(Arc::new(f)),
            modulus: None,
            description: description.into(),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Bound on `|F(y) − F(x)|` per unit-coordinate length along paths that
    /// do not cross a chart cut, when known.
    pub fn modulus(&self) -> Option<f64> {
        self.modulus
    }

    pub fn eval(&self, p: &CoverPoint) -> f64 {
        match &self.repr {
            PotentialRepr::BuiltIn => self.space.phi(&p.base) + p.sheet,
            PotentialRepr::FromCocycle { cocycle, basepoint } => {
                let direct =
                    Path::straight(vec![basepoint.base, p.base]).expect("two vertices form a path");
                let c = cocycle
                    .integrate(&direct)
                    .expect("points of the cover lie in the coordinate domain");
                c + p.sheet - basepoint.sheet
            }
            PotentialRepr::Custom(f) => f(p),
        }
    }
}

#[derive(Clone)]
enum CocycleRepr {
    Canonical {
        pairing: [f64; 2],
    },
    Perturbed {
        pairing: [f64; 2],
        exact_part: BaseFn,
    },
    FromPotential(Box<Potential>),
}

/// A singular one-cocycle, evaluated on polyline paths.
#[derive(Clone)]
pub struct PathIntegralCocycle {
    space: Space,
    repr: CocycleRepr,
    description: String,
}

impl fmt::Debug for PathIntegralCocycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PathIntegralCocycle")
            .field("space", &self.space)
            .field("description", &self.description)
            .finish()
    }
}

impl PathIntegralCocycle {
    /// `Σ pᵢ dθᵢ` for an arbitrary integer period vector `p` (which need not
    /// match the space's class).
    pub fn canonical(space: &Space, periods: &[i64]) -> PathIntegralCocycle {
        PathIntegralCocycle {
            space: space.clone(),
            repr: CocycleRepr::Canonical {
                pairing: pad(periods),
            },
            description: format!("canonical{periods:?}"),
        }
    }

    /// Canonical cocycle of the space's own class: signed angular variation
    /// on the circle, the first-coordinate variation on the compactified
    /// torus, and so on.
    pub fn of_class(space: &Space) -> PathIntegralCocycle {
        PathIntegralCocycle::canonical(space, space.class_pairing())
    }

    /// `Σ pᵢ dθᵢ + δf`.
    pub fn perturbed<F>(space: &Space, periods: &[i64], description: &str, f: F) -> Self
    where
        F: Fn(&Point) -> f64 + Send + Sync + 'static,
    {
        PathIntegralCocycle {
            space: space.clone(),
            repr: CocycleRepr::Perturbed {
                pairing: pad(periods),
                exact_part: Arc::new(f),
            },
            description: description.into(),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn integrate(&self, path: &Path) -> Result<f64> {
        match &self.repr {
            CocycleRepr::Canonical { pairing } => {
                let inc = path.angular_increment(&self.space)?;
                Ok(pairing[0] * inc[0] + pairing[1] * inc[1])
            }
            CocycleRepr::Perturbed {
                pairing,
                exact_part,
            } => {
                let inc = path.angular_increment(&self.space)?;
                Ok(
                    pairing[0] * inc[0] + pairing[1] * inc[1] + exact_part(&path.end())
                        - exact_part(&path.start()),
                )
            }
            CocycleRepr::FromPotential(p) => {
                let end_sheet = path.lift_end_sheet(&self.space, 0.0)?;
                Ok(p.eval(&CoverPoint::new(path.end(), end_sheet))
                    - p.eval(&CoverPoint::new(path.start(), 0.0)))
            }
        }
    }

    /// Values on the basis loops of the space.
    pub fn loop_values(&self) -> Result<Vec<f64>> {
        self.space
            .basis_loops()
            .iter()
            .map(|l| self.integrate(l))
            .collect()
    }
}

fn pad(periods: &[i64]) -> [f64; 2] {
    [
        periods.first().copied().unwrap_or(0) as f64,
        periods.get(1).copied().unwrap_or(0) as f64,
    ]
}

/// The equivariant potential of `c`, pinned to vanish at `basepoint`.
pub fn potential_from_cocycle(
    space: &Space,
    c: &PathIntegralCocycle,
    basepoint: CoverPoint,
) -> Result<Potential> {
    if c.space().kind() != space.kind() {
        return Err(Error::SpaceMismatch {
            left: space.describe(),
            right: c.space().describe(),
        });
    }
    space.check_point(&basepoint.base)?;
    let values = c.loop_values()?;
    let found: Vec<i64> = values.iter().map(|v| v.round() as i64).collect();
    let consistent = values
        .iter()
        .zip(space.class_pairing())
        .all(|(v, &a)| (v - a as f64).abs() <= INTEGER_TOLERANCE);
    if !consistent {
        return Err(Error::ClassMismatch {
            expected: space.class_pairing().to_vec(),
            found,
        });
    }
    let mut c = c.clone();
    c.space = space.clone();
    Ok(Potential {
        space: space.clone(),
        description: format!("from_cocycle({})", c.description),
        repr: PotentialRepr::FromCocycle {
            cocycle: Box::new(c),
            basepoint,
        },
        modulus: None,
    })
}

pub fn cocycle_from_potential(space: &Space, potential: &Potential) -> PathIntegralCocycle {
    PathIntegralCocycle {
        space: space.clone(),
        description: format!("from_potential({})", potential.description),
        repr: CocycleRepr::FromPotential(Box::new(potential.clone())),
    }
}

/// `max |P(base, h + k) − P(base, h) − k|` over sampled points, sheets
/// `h ∈ {−2, …, 2}` (offset into each sheet) and `k ∈ {−3, …, 3}`.
pub fn verify_equivariance(potential: &Potential, samples: usize, seed: u64) -> f64 {
    let mut rng = sampling::rng(seed);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let base = potential.space.sample_point(&mut rng);
        let sheet = (i % 5) as f64 - 2.0 + sampling::unit(&mut rng) * 0.999;
        let p = CoverPoint::new(base, sheet);
        let here = potential.eval(&p);
        for k in -3..=3 {
            let r = (potential.eval(&p.deck(k)) - here - k as f64).abs();
            worst = worst.max(r);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(s: f64, t: f64, h: f64) -> CoverPoint {
        CoverPoint::new(Point::new(s, t), h)
    }

    #[test]
    fn length_cocycle_on_circle_gives_s_plus_h() {
        let s = Space::circle();
        let c = PathIntegralCocycle::of_class(&s);
        let p = potential_from_cocycle(&s, &c, cp(0.0, 0.0, 0.0)).unwrap();
        for &(x, h) in &[(0.0, 0.0), (0.3, 2.0), (0.75, -1.0)] {
            assert!((p.eval(&cp(x, 0.0, h)) - (x + h)).abs() < 1e-12);
        }
    }

    #[test]
    fn first_coordinate_cocycle_on_compactified_torus() {
        let s = Space::compactified_torus();
        let c = PathIntegralCocycle::of_class(&s);
        let p = potential_from_cocycle(&s, &c, cp(0.0, 0.0, 0.0)).unwrap();
        for &(t, x, h) in &[
            (0.2, 5.0, 0.0),
            (0.9, -3.5, 1.0),
            (0.4, f64::INFINITY, -2.0),
        ] {
            assert!((p.eval(&cp(t, x, h)) - (t + h)).abs() < 1e-12);
        }
    }

    #[test]
    fn moving_the_basepoint_shifts_by_a_constant() {
        let s = Space::circle();
        let c = PathIntegralCocycle::perturbed(&s, &[1], "bump", |p| {
            (2.0 * std::f64::consts::PI * p.s).sin() / 7.0
        });
        let b1 = cp(0.0, 0.0, 0.0);
        // a loop winding five times lifts the basepoint five sheets up
        let b2 = cp(0.0, 0.0, 5.0);
        let p1 = potential_from_cocycle(&s, &c, b1).unwrap();
        let p2 = potential_from_cocycle(&s, &c, b2).unwrap();
        for &(x, h) in &[(0.1, 0.0), (0.6, 3.0), (0.95, -2.0)] {
            let q = cp(x, 0.0, h);
            assert!((p1.eval(&q) - p2.eval(&q) - 5.0).abs() < 1e-12);
        }
        assert!(p1.eval(&b1).abs() < 1e-15);
    }

    #[test]
    fn class_mismatch_is_reported() {
        let s = Space::circle();
        let c = PathIntegralCocycle::canonical(&s, &[2]);
        let err = potential_from_cocycle(&s, &c, cp(0.0, 0.0, 0.0)).unwrap_err();
        assert_eq!(
            err,
            Error::ClassMismatch {
                expected: vec![1],
                found: vec![2]
            }
        );
    }

    #[test]
    fn potential_cocycle_pairs_generator_loops() {
        let s = Space::circle();
        let c = cocycle_from_potential(&s, &Potential::built_in(&s));
        let full = Path::new(vec![Point::circle(0.0), Point::circle(0.0)], vec![[1, 0]]).unwrap();
        assert!((c.integrate(&full).unwrap() - 1.0).abs() < 1e-12);

        let t = Space::compactified_torus();
        let c = cocycle_from_potential(&t, &Potential::built_in(&t));
        let loops = t.basis_loops();
        assert!((c.integrate(&loops[0]).unwrap() - 1.0).abs() < 1e-12);
        assert!(c.integrate(&loops[1]).unwrap().abs() < 1e-12);
    }

    #[test]
    fn path_leaving_domain_is_an_error() {
        let s = Space::annulus();
        let c = cocycle_from_potential(&s, &Potential::built_in(&s));
        let bad = Path::straight(vec![Point::new(0.0, 0.5), Point::new(0.2, 1.5)]).unwrap();
        assert!(matches!(c.integrate(&bad), Err(Error::Domain(_))));
    }

    #[test]
    fn equivariance_residuals() {
        let s = Space::circle();
        assert!(verify_equivariance(&Potential::built_in(&s), 500, 1) <= 1e-14);
        let corrupt = Potential::custom(&s, "corrupt", |p| {
            let base = p.base.s + p.sheet;
            if (0.0..1.0).contains(&p.sheet) {
                base + 0.1
            } else {
                base
            }
        });
        assert!(verify_equivariance(&corrupt, 500, 1) >= 0.1 - 1e-12);
    }
}
