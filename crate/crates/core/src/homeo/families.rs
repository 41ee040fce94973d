//! Built-in closed-form families. Each family is closed under composition,
//! inversion and powers, and its `n`-th power has an explicit lift.

use std::f64::consts::PI;
use std::fmt;

use super::{Canonical, Step};
use crate::exact::Surd;
use crate::space::{line_to_unit, wrap_unit, Point, Space, SpaceKind};

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `s ↦ s + ρ` on the circle.
    RigidRotation { rho: Surd },
    /// `(s, r) ↦ (s + (1−r)ρ₀ + rρ₁, r)` on the annulus.
    AnnulusTwist { inner: Surd, outer: Surd },
    /// `g^k` for `g(t, x) = (t + |x+1| − |x|, x + 1)`, `g(t, ∞) = (t, ∞)`.
    TorusShear { power: i64 },
    /// `(s, t) ↦ (s + A(1 − cos 2πt)/2, t)` on the 2-torus. Fixes the circles
    /// `t = 0` pointwise and, for integral `A`, also `t = 1/2`.
    TorusBump { amplitude: Surd },
    /// `(s, t) ↦ (s + a, t + b)` on the 2-torus.
    TorusTranslation { a: Surd, b: Surd },
    /// Time-`k` map of the gradient flow `ṡ = −sin 2πs` on the circle:
    /// `tan πs ↦ e^{−2πk} tan πs`. Fixes `0` and `1/2`.
    GradientTimeOne { strength: Surd },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::RigidRotation { .. } => "RigidRotation",
            Family::AnnulusTwist { .. } => "AnnulusTwist",
            Family::TorusShear { .. } => "TorusShear",
            Family::TorusBump { .. } => "TorusBump",
            Family::TorusTranslation { .. } => "TorusTranslation",
            Family::GradientTimeOne { .. } => "GradientTimeOne",
        }
    }

    pub fn space_kind(&self) -> SpaceKind {
        match self {
            Family::RigidRotation { .. } | Family::GradientTimeOne { .. } => SpaceKind::Circle,
            Family::AnnulusTwist { .. } => SpaceKind::Annulus,
            Family::TorusShear { .. } => SpaceKind::CircleTimesCompactifiedLine,
            Family::TorusBump { .. } | Family::TorusTranslation { .. } => SpaceKind::Torus2,
        }
    }

    /// Same family, parameters added (composition), when both sides agree.
    pub fn combine(&self, other: &Family) -> Option<Family> {
        use Family::*;
        Some(match (self, other) {
            (RigidRotation { rho: a }, RigidRotation { rho: b }) => RigidRotation { rho: a + b },
            (
                AnnulusTwist {
                    inner: a0,
                    outer: a1,
                },
                AnnulusTwist {
                    inner: b0,
                    outer: b1,
                },
            ) => AnnulusTwist {
                inner: a0 + b0,
                outer: a1 + b1,
            },
            (TorusShear { power: a }, TorusShear { power: b }) => TorusShear { power: a + b },
            (TorusBump { amplitude: a }, TorusBump { amplitude: b }) => {
                TorusBump { amplitude: a + b }
            }
            (TorusTranslation { a: a0, b: b0 }, TorusTranslation { a: a1, b: b1 }) => {
                TorusTranslation {
                    a: a0 + a1,
                    b: b0 + b1,
                }
            }
            (GradientTimeOne { strength: a }, GradientTimeOne { strength: b }) => {
                GradientTimeOne { strength: a + b }
            }
            _ => return None,
        })
    }

    pub fn scaled(&self, n: i64) -> Family {
        use Family::*;
        match self {
            RigidRotation { rho } => RigidRotation {
                rho: rho.mul_int(n),
            },
            AnnulusTwist { inner, outer } => AnnulusTwist {
                inner: inner.mul_int(n),
                outer: outer.mul_int(n),
            },
            TorusShear { power } => TorusShear { power: power * n },
            TorusBump { amplitude } => TorusBump {
                amplitude: amplitude.mul_int(n),
            },
            TorusTranslation { a, b } => TorusTranslation {
                a: a.mul_int(n),
                b: b.mul_int(n),
            },
            GradientTimeOne { strength } => GradientTimeOne {
                strength: strength.mul_int(n),
            },
        }
    }

    pub fn canonical(&self) -> Canonical {
        use Family::*;
        match self {
            RigidRotation { rho } => {
                Canonical::CirclePl(super::pl::PlCircleMap::rotation(rho.clone()).canonical_knots())
            }
            AnnulusTwist { inner, outer } => {
                let k =
                    Surd::from_rational(num::rational::BigRational::from_integer(inner.floor()));
                let (a, b) = (inner - &k, outer - &k);
                if a.is_zero() && b.is_zero() {
                    Canonical::Identity
                } else {
                    Canonical::AnnulusTwist(a, b)
                }
            }
            TorusShear { power: 0 } => Canonical::Identity,
            TorusShear { power } => Canonical::TorusShear(*power),
            TorusBump { amplitude } if amplitude.is_zero() => Canonical::Identity,
            TorusBump { amplitude } => Canonical::TorusBump(amplitude.clone()),
            TorusTranslation { a, b } => {
                let (a, b) = (a.fract(), b.fract());
                if a.is_zero() && b.is_zero() {
                    Canonical::Identity
                } else {
                    Canonical::TorusTranslation(a, b)
                }
            }
            GradientTimeOne { strength } if strength.is_zero() => {
                Canonical::CirclePl(super::pl::PlCircleMap::identity().canonical_knots())
            }
            GradientTimeOne { strength } => Canonical::GradientTimeOne(strength.clone()),
        }
    }

    /// Lipschitz constant of `K = ⟨a, shift⟩` in unit coordinates (ℓ¹).
    pub fn k_lipschitz(&self, space: &Space) -> Option<f64> {
        let [a, _] = space.pairing2();
        use Family::*;
        match self {
            RigidRotation { .. } | TorusTranslation { .. } => Some(0.0),
            AnnulusTwist { inner, outer } => {
                Some(a.abs() * (outer.to_f64() - inner.to_f64()).abs())
            }
            TorusShear { .. } => None,
            TorusBump { amplitude } => Some(a.abs() * amplitude.to_f64().abs() * PI),
            GradientTimeOne { strength } => {
                let lambda = (-2.0 * PI * strength.to_f64()).exp();
                Some(a.abs() * (lambda.max(1.0 / lambda) - 1.0))
            }
        }
    }

    /// Parameters converted once to floating point.
    pub fn numeric(&self) -> NumericFamily {
        use Family::*;
        match self {
            RigidRotation { rho } => NumericFamily::Rotation(rho.to_f64()),
            AnnulusTwist { inner, outer } => NumericFamily::Twist(inner.to_f64(), outer.to_f64()),
            TorusShear { power } => NumericFamily::Shear(*power),
            TorusBump { amplitude } => NumericFamily::Bump(amplitude.to_f64()),
            TorusTranslation { a, b } => NumericFamily::Translation(a.to_f64(), b.to_f64()),
            GradientTimeOne { strength } => NumericFamily::Gradient(strength.to_f64()),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Family::*;
        match self {
            RigidRotation { rho } => write!(f, "RigidRotation({rho})"),
            AnnulusTwist { inner, outer } => write!(f, "AnnulusTwist({inner}, {outer})"),
            TorusShear { power } => write!(f, "TorusShear^{power}"),
            TorusBump { amplitude } => write!(f, "TorusBump({amplitude})"),
            TorusTranslation { a, b } => write!(f, "TorusTranslation({a}, {b})"),
            GradientTimeOne { strength } => write!(f, "GradientTimeOne({strength})"),
        }
    }
}

/// Floating-point evaluation data of a [`Family`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NumericFamily {
    Rotation(f64),
    Twist(f64, f64),
    Shear(i64),
    Bump(f64),
    Translation(f64, f64),
    Gradient(f64),
}

impl NumericFamily {
    /// Lift of the `n`-th power at `p`, from the closed form with the power
    /// folded into the formula (no iteration).
    pub fn power_step(&self, p: &Point, n: i64) -> Step {
        let nf = n as f64;
        match *self {
            NumericFamily::Rotation(rho) => {
                let d = nf * rho;
                Step {
                    image: Point::circle(wrap_unit(p.s + d)),
                    shift: [d, 0.0],
                }
            }
            NumericFamily::Twist(inner, outer) => {
                let d = nf * ((1.0 - p.t) * inner + p.t * outer);
                Step {
                    image: Point::new(wrap_unit(p.s + d), p.t),
                    shift: [d, 0.0],
                }
            }
            NumericFamily::Shear(k) => {
                if p.t.is_infinite() {
                    return Step {
                        image: *p,
                        shift: [0.0, 0.0],
                    };
                }
                let m = (k * n) as f64;
                let x = p.t;
                let x_new = x + m;
                let d = x_new.abs() - x.abs();
                let d = if m == 0.0 { 0.0 } else { d };
                Step {
                    image: Point::new(wrap_unit(p.s + d), x_new),
                    shift: [d, line_to_unit(x_new) - line_to_unit(x)],
                }
            }
            NumericFamily::Bump(amplitude) => {
                let d = nf * amplitude * (1.0 - (2.0 * PI * p.t).cos()) / 2.0;
                Step {
                    image: Point::new(wrap_unit(p.s + d), p.t),
                    shift: [d, 0.0],
                }
            }
            NumericFamily::Translation(a, b) => {
                let (da, db) = (nf * a, nf * b);
                Step {
                    image: Point::new(wrap_unit(p.s + da), wrap_unit(p.t + db)),
                    shift: [da, db],
                }
            }
            NumericFamily::Gradient(strength) => {
                let lambda = (-2.0 * PI * strength * nf).exp();
                // work near whichever fixed point (0 or 1/2) is closer so both
                // stay exactly fixed
                let image = if (0.25..=0.75).contains(&p.s) {
                    let d = PI * (p.s - 0.5);
                    0.5 + d.sin().atan2(lambda * d.cos()) / PI
                } else {
                    let base = if p.s > 0.75 { 1.0 } else { 0.0 };
                    let d = PI * (p.s - base);
                    base + (lambda * d.sin()).atan2(d.cos()) / PI
                };
                Step {
                    image: Point::circle(wrap_unit(image)),
                    shift: [image - p.s, 0.0],
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shear_powers_match_closed_form() {
        let f = NumericFamily::Shear(1);
        for n in -5..=5 {
            for &x in &[-3.5, -1.0, -0.25, 0.0, 0.7, 4.0] {
                let st = f.power_step(&Point::new(0.0, x), n);
                let expect = (x + n as f64).abs() - x.abs();
                assert_eq!(st.shift[0], expect);
                assert_eq!(st.image.t, x + n as f64);
            }
        }
        let at_inf = f.power_step(&Point::new(0.3, f64::INFINITY), 7);
        assert_eq!(at_inf.image, Point::new(0.3, f64::INFINITY));
        assert_eq!(at_inf.shift, [0.0, 0.0]);
    }

    #[test]
    fn gradient_fixes_two_points_and_composes_multiplicatively() {
        let f = NumericFamily::Gradient(0.3);
        for &s in &[0.0, 0.5] {
            let st = f.power_step(&Point::circle(s), 3);
            assert!((st.image.s - s).abs() < 1e-15);
            assert!(st.shift[0].abs() < 1e-15);
        }
        let p = Point::circle(0.37);
        let two = f.power_step(&f.power_step(&p, 1).image, 1);
        let direct = f.power_step(&p, 2);
        assert!((two.image.s - direct.image.s).abs() < 1e-14);
    }

    #[test]
    fn twist_canonical_forms_absorb_integer_shifts() {
        let a = Family::AnnulusTwist {
            inner: Surd::from_int(1),
            outer: Surd::ratio(3, 2),
        };
        let b = Family::AnnulusTwist {
            inner: Surd::zero(),
            outer: Surd::ratio(1, 2),
        };
        assert_eq!(a.canonical(), b.canonical());
        let c = Family::AnnulusTwist {
            inner: Surd::from_int(1),
            outer: Surd::ratio(1, 2),
        };
        assert_ne!(b.canonical(), c.canonical());
    }
}
