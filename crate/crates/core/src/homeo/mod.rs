//! Homeomorphisms preserving the class, represented by equivariant lifts.
//!
//! Every map evaluates through [`Homeo::step`], which returns the image point
//! together with the unwrapped displacement of each circle coordinate. On
//! the cover this determines the lift
//! `(p, h) ↦ (g(p), h + ⟨a, shift⟩ + φ(p) − φ(g(p)))`, so that the built-in
//! potential changes by exactly `K(g)(p) = ⟨a, shift⟩`.

mod families;
mod pl;
mod sampled;

pub use families::{Family, NumericFamily};
pub use pl::PlCircleMap;
pub use sampled::SampledMap;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exact::Surd;
use crate::sampling;
use crate::space::{CoverPoint, Point, Space, SpaceKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    ExactPL,
    ClosedForm,
    NumericSampled,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::ExactPL => "ExactPL",
            Flavor::ClosedForm => "ClosedForm",
            Flavor::NumericSampled => "NumericSampled",
        })
    }
}

/// Image of a point and the unwrapped displacement of each circle
/// coordinate along the lift (second entry 0 without a second circle).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub image: Point,
    pub shift: [f64; 2],
}

/// Exact normal form; equal values mean equal homeomorphisms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Canonical {
    Identity,
    /// Knots of the lift with `F(0) ∈ [0, 1)`.
    CirclePl(Vec<(Surd, Surd)>),
    /// Twist parameters with the inner one reduced into `[0, 1)`.
    AnnulusTwist(Surd, Surd),
    TorusShear(i64),
    TorusBump(Surd),
    TorusTranslation(Surd, Surd),
    GradientTimeOne(Surd),
}

#[derive(Debug)]
enum Repr {
    Identity,
    Family(Family, NumericFamily),
    Pl(PlCircleMap),
    Sampled(SampledMap),
    /// `outer ∘ inner`, evaluated lazily.
    Compose(Homeo, Homeo),
}

#[derive(Clone, Debug)]
pub struct Homeo {
    space: Space,
    repr: Arc<Repr>,
}

fn require_kind(space: &Space, kind: SpaceKind, what: &str) -> Result<()> {
    if space.kind() != kind {
        return Err(Error::SpaceMismatch {
            left: format!("{what} needs {kind}"),
            right: space.describe(),
        });
    }
    Ok(())
}

impl Homeo {
    fn wrap(space: &Space, repr: Repr) -> Homeo {
        Homeo {
            space: space.clone(),
            repr: Arc::new(repr),
        }
    }

    pub fn identity(space: &Space) -> Homeo {
        Homeo::wrap(space, Repr::Identity)
    }

    pub fn from_family(space: &Space, family: Family) -> Result<Homeo> {
        require_kind(space, family.space_kind(), family.name())?;
        let numeric = family.numeric();
        Ok(Homeo::wrap(space, Repr::Family(family, numeric)))
    }

    pub fn rigid_rotation(space: &Space, rho: Surd) -> Result<Homeo> {
        Homeo::from_family(space, Family::RigidRotation { rho })
    }

    pub fn annulus_twist(space: &Space, inner: Surd, outer: Surd) -> Result<Homeo> {
        Homeo::from_family(space, Family::AnnulusTwist { inner, outer })
    }

    pub fn torus_shear(space: &Space, power: i64) -> Result<Homeo> {
        Homeo::from_family(space, Family::TorusShear { power })
    }

    pub fn torus_bump(space: &Space, amplitude: Surd) -> Result<Homeo> {
        Homeo::from_family(space, Family::TorusBump { amplitude })
    }

    pub fn torus_translation(space: &Space, a: Surd, b: Surd) -> Result<Homeo> {
        Homeo::from_family(space, Family::TorusTranslation { a, b })
    }

    pub fn gradient_time_one(space: &Space, strength: Surd) -> Result<Homeo> {
        Homeo::from_family(space, Family::GradientTimeOne { strength })
    }

    pub fn pl(space: &Space, map: PlCircleMap) -> Result<Homeo> {
        require_kind(space, SpaceKind::Circle, "PL circle map")?;
        Ok(Homeo::wrap(space, Repr::Pl(map)))
    }

    /// Grid approximation of `g` with `resolution` nodes per axis.
    pub fn sampled(g: &Homeo, resolution: usize) -> Result<Homeo> {
        let map = SampledMap::from_homeo(g, resolution)?;
        Ok(Homeo::wrap(&g.space, Repr::Sampled(map)))
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn flavor(&self) -> Flavor {
        match &*self.repr {
            Repr::Identity | Repr::Family(..) => Flavor::ClosedForm,
            Repr::Pl(_) => Flavor::ExactPL,
            Repr::Sampled(_) => Flavor::NumericSampled,
            Repr::Compose(a, b) => {
                if a.flavor() == Flavor::NumericSampled || b.flavor() == Flavor::NumericSampled {
                    Flavor::NumericSampled
                } else {
                    Flavor::ClosedForm
                }
            }
        }
    }

    pub fn family(&self) -> Option<&Family> {
        match &*self.repr {
            Repr::Family(f, _) => Some(f),
            _ => None,
        }
    }

    pub fn as_pl(&self) -> Option<&PlCircleMap> {
        match &*self.repr {
            Repr::Pl(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(&*self.repr, Repr::Identity)
    }

    /// Whether `n`-th powers are evaluated from a closed formula rather than
    /// by iterating.
    pub fn has_closed_powers(&self) -> bool {
        matches!(&*self.repr, Repr::Identity | Repr::Family(..))
    }

    /// Image and unwrapped displacement at `p`.
    pub fn step(&self, p: &Point) -> Result<Step> {
        self.space.check_point(p)?;
        Ok(self.step_unchecked(p))
    }

    fn step_unchecked(&self, p: &Point) -> Step {
        match &*self.repr {
            Repr::Identity => Step {
                image: *p,
                shift: [0.0, 0.0],
            },
            Repr::Family(_, f) => f.power_step(p, 1),
            Repr::Pl(map) => {
                let y = map.eval_f64(p.s);
                let d = y - p.s;
                Step {
                    image: Point::circle(crate::space::wrap_unit(y)),
                    shift: [d, 0.0],
                }
            }
            Repr::Sampled(map) => map.step(p),
            Repr::Compose(outer, inner) => {
                let a = inner.step_unchecked(p);
                let b = outer.step_unchecked(&a.image);
                Step {
                    image: b.image,
                    shift: [a.shift[0] + b.shift[0], a.shift[1] + b.shift[1]],
                }
            }
        }
    }

    pub fn apply(&self, p: &Point) -> Result<Point> {
        Ok(self.step(p)?.image)
    }

    /// The equivariant lift on the cover.
    pub fn lift(&self, p: &CoverPoint) -> Result<CoverPoint> {
        let st = self.step(&p.base)?;
        let sheet = p.sheet + self.space.pair(st.shift) + self.space.phi(&p.base)
            - self.space.phi(&st.image);
        Ok(CoverPoint::new(st.image, sheet))
    }

    /// Lift data of `gⁿ` at `p`: closed form when available, otherwise by
    /// iterating `g` (or its inverse for negative `n`).
    pub fn orbit_step(&self, p: &Point, n: i64) -> Result<Step> {
        self.space.check_point(p)?;
        match &*self.repr {
            Repr::Identity => Ok(Step {
                image: *p,
                shift: [0.0, 0.0],
            }),
            Repr::Family(_, f) => Ok(f.power_step(p, n)),
            _ if n < 0 => self.inverse()?.orbit_step(p, -n),
            _ => {
                let mut image = *p;
                let mut shift = [0.0, 0.0];
                for _ in 0..n {
                    let st = self.step_unchecked(&image);
                    image = st.image;
                    shift[0] += st.shift[0];
                    shift[1] += st.shift[1];
                }
                Ok(Step { image, shift })
            }
        }
    }

    /// Lift data of `gⁿ` at `p` for `n = 0, 1, …, n_max`.
    pub fn orbit_series(&self, p: &Point, n_max: usize) -> Result<Vec<Step>> {
        self.space.check_point(p)?;
        let mut out = Vec::with_capacity(n_max + 1);
        out.push(Step {
            image: *p,
            shift: [0.0, 0.0],
        });
        if let Repr::Family(_, f) = &*self.repr {
            out.extend((1..=n_max).map(|n| f.power_step(p, n as i64)));
            return Ok(out);
        }
        let mut cur = out[0];
        for _ in 0..n_max {
            let st = self.step_unchecked(&cur.image);
            cur = Step {
                image: st.image,
                shift: [cur.shift[0] + st.shift[0], cur.shift[1] + st.shift[1]],
            };
            out.push(cur);
        }
        Ok(out)
    }

    fn check_same_space(&self, other: &Homeo) -> Result<()> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch {
                left: self.space.describe(),
                right: other.space.describe(),
            });
        }
        Ok(())
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &Homeo) -> Result<Homeo> {
        self.check_same_space(other)?;
        let space = &self.space;
        match (&*self.repr, &*other.repr) {
            (Repr::Identity, _) => return Ok(other.clone()),
            (_, Repr::Identity) => return Ok(self.clone()),
            (Repr::Family(a, _), Repr::Family(b, _)) => {
                if let Some(c) = a.combine(b) {
                    return Homeo::from_family(space, c);
                }
            }
            _ => {}
        }
        if let (Some(p), Some(q)) = (self.exact_circle_pl(), other.exact_circle_pl()) {
            return Homeo::pl(space, p.compose(&q));
        }
        Ok(Homeo::wrap(
            space,
            Repr::Compose(self.clone(), other.clone()),
        ))
    }

    /// PL form of exact circle maps (PL maps and rigid rotations).
    fn exact_circle_pl(&self) -> Option<PlCircleMap> {
        match &*self.repr {
            Repr::Pl(p) => Some(p.clone()),
            Repr::Family(Family::RigidRotation { rho }, _) => {
                Some(PlCircleMap::rotation(rho.clone()))
            }
            _ => None,
        }
    }

    pub fn inverse(&self) -> Result<Homeo> {
        let space = &self.space;
        match &*self.repr {
            Repr::Identity => Ok(self.clone()),
            Repr::Family(f, _) => Homeo::from_family(space, f.scaled(-1)),
            Repr::Pl(p) => Homeo::pl(space, p.inverse()),
            Repr::Sampled(_) => Err(Error::NonInvertible(
                "grid-sampled maps carry no inverse".into(),
            )),
            Repr::Compose(outer, inner) => Ok(Homeo::wrap(
                space,
                Repr::Compose(inner.inverse()?, outer.inverse()?),
            )),
        }
    }

    /// `gⁿ`. Families scale their parameters, PL maps are composed exactly
    /// by repeated squaring, anything else becomes a balanced composition
    /// tree of depth `O(log |n|)`.
    pub fn power(&self, n: i64) -> Result<Homeo> {
        let space = &self.space;
        if n == 0 {
            return Ok(Homeo::identity(space));
        }
        match &*self.repr {
            Repr::Identity => Ok(self.clone()),
            Repr::Family(f, _) => Homeo::from_family(space, f.scaled(n)),
            Repr::Pl(p) => Homeo::pl(space, p.power(n)),
            _ => {
                let mut base = if n < 0 { self.inverse()? } else { self.clone() };
                let mut e = n.unsigned_abs();
                let mut acc = Homeo::identity(space);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = base.compose(&acc)?;
                    }
                    e >>= 1;
                    if e > 0 {
                        base = base.compose(&base)?;
                    }
                }
                Ok(acc)
            }
        }
    }

    /// Exact normal form, available for the identity, built-in families and
    /// PL circle maps.
    pub fn canonical(&self) -> Option<Canonical> {
        match &*self.repr {
            Repr::Identity => Some(match self.space.kind() {
                SpaceKind::Circle => Canonical::CirclePl(PlCircleMap::identity().canonical_knots()),
                _ => Canonical::Identity,
            }),
            Repr::Family(f, _) => Some(f.canonical()),
            Repr::Pl(p) => Some(Canonical::CirclePl(p.canonical_knots())),
            _ => None,
        }
    }

    /// Lipschitz constant of `K(g)` in unit coordinates, when known.
    pub fn k_lipschitz(&self) -> Option<f64> {
        let a = self.space.pairing2()[0].abs();
        match &*self.repr {
            Repr::Identity => Some(0.0),
            Repr::Family(f, _) => f.k_lipschitz(&self.space),
            Repr::Pl(p) => Some(a * p.displacement_lipschitz()),
            Repr::Sampled(s) => Some(s.k_lipschitz(&self.space)),
            Repr::Compose(..) => None,
        }
    }

    /// `⟨a, g_*ℓ⟩` for each basis loop `ℓ`, from the unwrapped image of a
    /// finely sampled loop.
    pub fn induced_pairing(&self) -> Vec<f64> {
        const M: usize = 4096;
        let space = &self.space;
        let loops = if space.kind().second_is_circle() {
            2
        } else {
            1
        };
        (0..loops)
            .map(|axis| {
                let point = |j: usize| {
                    let u = j as f64 / M as f64;
                    if axis == 0 {
                        space.from_units(u, 0.0)
                    } else {
                        space.from_units(0.0, u)
                    }
                };
                let mut total = [0.0, 0.0];
                let mut prev = space.angles(&self.step_unchecked(&point(0)).image);
                for j in 1..=M {
                    let cur = space.angles(&self.step_unchecked(&point(j)).image);
                    for i in 0..2 {
                        let d = cur[i] - prev[i];
                        total[i] += d - d.round();
                    }
                    prev = cur;
                }
                space.pair([total[0].round(), total[1].round()])
            })
            .collect()
    }

    /// Whether the induced pairing on basis loops equals the class pairing.
    pub fn preserves_class(&self) -> bool {
        self.induced_pairing()
            .iter()
            .zip(self.space.class_pairing())
            .all(|(v, &a)| *v == a as f64)
    }

    /// `max |lift(p, h+k) − lift(p, h) − k|` over random cover points and
    /// `k ∈ −3..=3`.
    pub fn equivariance_residual(&self, samples: usize, seed: u64) -> Result<f64> {
        let mut rng = sampling::rng(seed);
        let mut worst = 0.0f64;
        for i in 0..samples {
            let base = self.space.sample_point(&mut rng);
            let h = (i % 5) as f64 - 2.0 + sampling::unit(&mut rng);
            let p = CoverPoint::new(base, h);
            let lp = self.lift(&p)?;
            for k in -3..=3 {
                let lk = self.lift(&p.deck(k))?;
                worst = worst.max((lk.sheet - lp.sheet - k as f64).abs());
                if lk.base != lp.base {
                    worst = f64::INFINITY;
                }
            }
        }
        Ok(worst)
    }

    /// Spot check that distinct sampled points have distinct images.
    pub fn injective_on_samples(&self, samples: usize, seed: u64) -> bool {
        let mut rng = sampling::rng(seed);
        let mut pairs: Vec<(Point, Point)> = (0..samples)
            .map(|_| {
                let p = self.space.sample_point(&mut rng);
                (self.step_unchecked(&p).image, p)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.s.total_cmp(&b.0.s).then(a.0.t.total_cmp(&b.0.t)));
        pairs
            .windows(2)
            .all(|w| w[0].0 != w[1].0 || w[0].1 == w[1].1)
    }

    pub fn describe(&self) -> String {
        match &*self.repr {
            Repr::Identity => "Identity".into(),
            Repr::Family(f, _) => f.to_string(),
            Repr::Pl(p) => p.to_string(),
            Repr::Sampled(s) => format!("Sampled({})", s.resolution()),
            Repr::Compose(a, b) => format!("({} ∘ {})", a.describe(), b.describe()),
        }
    }
}

impl fmt::Display for Homeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}
