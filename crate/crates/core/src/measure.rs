//! Invariant-measure surrogates and the tests built on `∫K(g) dμ`: Nielsen
//! (non)equivalence, rotation integrals over invariant circles and the
//! rationality relation between their rotation numbers.

use std::fmt;

use crate::certificate::{Certificate, Mechanism};
use crate::cocycle::k_eval;
use crate::error::{Error, Result};
use crate::homeo::Homeo;
use crate::rotation::circular_distance;
use crate::space::{Point, Space, SpaceKind};

/// Midpoints used for integrals over invariant circles.
pub const QUADRATURE_POINTS: usize = 4096;
/// Gap tolerance when both measures are exact.
pub const EXACT_GAP_TOLERANCE: f64 = 1e-6;
/// Largest orbit length for rotation numbers of maps without closed powers.
pub const MAX_CIRCLE_ITERATIONS: usize = 100_000;
/// Tolerance for "the image lies on the circle".
pub const CIRCLE_INVARIANCE_TOLERANCE: f64 = 1e-9;

/// A closed curve of the base along which one coordinate runs once around
/// its circle factor in the positive direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InvariantCircle {
    /// The whole circle (`Circle` spaces).
    Base,
    /// Boundary circle `r = 0` or `r = 1` of the annulus.
    Boundary(u8),
    /// The circle `x = ∞` of the compactified-line torus.
    Infinity,
    /// `θ ↦ (θ, t)` for fixed second coordinate `t`.
    SCircle(f64),
    /// `θ ↦ (s, θ)` on the 2-torus.
    TCircle(f64),
}

impl InvariantCircle {
    pub fn parse(name: &str) -> Result<InvariantCircle> {
        let bad = || Error::Parse(format!("unknown circle name '{name}'"));
        let number = |v: &str| -> Result<f64> {
            if v == "inf" {
                return Ok(f64::INFINITY);
            }
            v.parse::<crate::exact::Surd>()
                .map(|s| s.to_f64())
                .map_err(|_| bad())
        };
        Ok(match name {
            "base" => InvariantCircle::Base,
            "boundary:0" => InvariantCircle::Boundary(0),
            "boundary:1" => InvariantCircle::Boundary(1),
            "infinity" => InvariantCircle::Infinity,
            _ => {
                if let Some(v) = name.strip_prefix("s-circle:") {
                    InvariantCircle::SCircle(number(v)?)
                } else if let Some(v) = name.strip_prefix("t-circle:") {
                    InvariantCircle::TCircle(number(v)?)
                } else {
                    return Err(bad());
                }
            }
        })
    }

    pub fn check(&self, space: &Space) -> Result<()> {
        let ok = match (self, space.kind()) {
            (InvariantCircle::Base, SpaceKind::Circle) => true,
            (InvariantCircle::Boundary(_), SpaceKind::Annulus) => true,
            (InvariantCircle::Infinity, SpaceKind::CircleTimesCompactifiedLine) => true,
            (InvariantCircle::SCircle(_), SpaceKind::Circle) => false,
            (InvariantCircle::SCircle(t), _) => space.check_point(&Point::new(0.0, *t)).is_ok(),
            (InvariantCircle::TCircle(s), SpaceKind::Torus2) => (0.0..1.0).contains(s),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "circle {self} does not lie in {}",
                space.kind()
            )))
        }
    }

    /// Which coordinate runs around the circle.
    pub fn axis(&self) -> usize {
        match self {
            InvariantCircle::TCircle(_) => 1,
            _ => 0,
        }
    }

    pub fn point(&self, theta: f64) -> Point {
        let theta = crate::space::wrap_unit(theta);
        match *self {
            InvariantCircle::Base => Point::circle(theta),
            InvariantCircle::Boundary(b) => Point::new(theta, b as f64),
            InvariantCircle::Infinity => Point::new(theta, f64::INFINITY),
            InvariantCircle::SCircle(t) => Point::new(theta, t),
            InvariantCircle::TCircle(s) => Point::new(s, theta),
        }
    }

    /// Parameter of `p` if it lies on the circle.
    pub fn locate(&self, p: &Point) -> Option<f64> {
        let tol = CIRCLE_INVARIANCE_TOLERANCE;
        let near = |a: f64, b: f64| a == b || (a - b).abs() <= tol;
        match *self {
            InvariantCircle::Base => Some(p.s),
            InvariantCircle::Boundary(b) => near(p.t, b as f64).then_some(p.s),
            InvariantCircle::Infinity => p.t.is_infinite().then_some(p.s),
            InvariantCircle::SCircle(t) => near(p.t, t).then_some(p.s),
            InvariantCircle::TCircle(s) => (circular_distance(p.s, s) <= tol).then_some(p.t),
        }
    }

    /// `⟨a, ℓ⟩`.
    pub fn pairing(&self, space: &Space) -> i64 {
        space.class_pairing().get(self.axis()).copied().unwrap_or(0)
    }
}

impl fmt::Display for InvariantCircle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantCircle::Base => f.write_str("base"),
            InvariantCircle::Boundary(b) => write!(f, "boundary:{b}"),
            InvariantCircle::Infinity => f.write_str("infinity"),
            InvariantCircle::SCircle(t) if t.is_infinite() => f.write_str("s-circle:inf"),
            InvariantCircle::SCircle(t) => write!(f, "s-circle:{t}"),
            InvariantCircle::TCircle(s) => write!(f, "t-circle:{s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasureKind {
    Atomic {
        points: Vec<Point>,
        weights: Vec<f64>,
    },
    /// Uniform measure in the circle's parameter.
    CircleUniformImage { circle: InvariantCircle },
    /// Orbit average `(1/N) Σ_{k<N} δ_{gᵏx}`.
    Empirical {
        start: Point,
        orbit: Vec<Point>,
        /// `2 max |K(g)| / N` along the orbit.
        defect: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    space: Space,
    kind: MeasureKind,
}

impl Measure {
    pub fn atomic(space: &Space, points: Vec<Point>, weights: Vec<f64>) -> Result<Measure> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(Error::Domain(
                "atomic measure needs one weight per point".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::Domain("negative atom weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("atom weights sum to {total}, not 1")));
        }
        for p in &points {
            space.check_point(p)?;
        }
        Ok(Measure {
            space: space.clone(),
            kind: MeasureKind::Atomic { points, weights },
        })
    }

    pub fn dirac(space: &Space, p: Point) -> Result<Measure> {
        Measure::atomic(space, vec![p], vec![1.0])
    }

    pub fn circle(space: &Space, circle: InvariantCircle) -> Result<Measure> {
        circle.check(space)?;
        Ok(Measure {
            space: space.clone(),
            kind: MeasureKind::CircleUniformImage { circle },
        })
    }

    /// Orbit measure of `x` under `g` with `n` points.
    pub fn empirical(g: &Homeo, start: Point, n: usize) -> Result<Measure> {
        if n == 0 {
            return Err(Error::Domain(
                "empirical measure needs a positive length".into(),
            ));
        }
        let series = g.orbit_series(&start, n)?;
        let mut orbit = Vec::with_capacity(n);
        let mut kmax = 0.0f64;
        for w in series.windows(2) {
            orbit.push(w[0].image);
            let k = g
                .space()
                .pair([w[1].shift[0] - w[0].shift[0], w[1].shift[1] - w[0].shift[1]]);
            kmax = kmax.max(k.abs());
        }
        Ok(Measure {
            space: g.space().clone(),
            kind: MeasureKind::Empirical {
                start,
                orbit,
                defect: 2.0 * kmax / n as f64,
            },
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    pub fn is_empirical(&self) -> bool {
        matches!(self.kind, MeasureKind::Empirical { .. })
    }

    /// Invariance defect carried by empirical measures, 0 otherwise.
    pub fn defect(&self) -> f64 {
        match &self.kind {
            MeasureKind::Empirical { defect, .. } => *defect,
            _ => 0.0,
        }
    }

    pub fn integrate<F>(&self, f: F) -> Result<f64>
    where
        F: Fn(&Point) -> Result<f64>,
    {
        match &self.kind {
            MeasureKind::Atomic { points, weights } => {
                let mut total = 0.0;
                for (p, w) in points.iter().zip(weights) {
                    total += w * f(p)?;
                }
                Ok(total)
            }
            MeasureKind::CircleUniformImage { circle } => {
                let mut total = 0.0;
                for j in 0..QUADRATURE_POINTS {
                    let theta = (j as f64 + 0.5) / QUADRATURE_POINTS as f64;
                    total += f(&circle.point(theta))?;
                }
                Ok(total / QUADRATURE_POINTS as f64)
            }
            MeasureKind::Empirical { orbit, .. } => {
                let mut total = 0.0;
                for p in orbit {
                    total += f(p)?;
                }
                Ok(total / orbit.len() as f64)
            }
        }
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            MeasureKind::Atomic { points, .. } => format!("Atomic({} points)", points.len()),
            MeasureKind::CircleUniformImage { circle } => format!("Circle({circle})"),
            MeasureKind::Empirical { start, orbit, .. } => {
                format!("Empirical(start={start}, N={})", orbit.len())
            }
        }
    }
}

fn check_space(mu: &Measure, g: &Homeo) -> Result<()> {
    if mu.space() != g.space() {
        return Err(Error::SpaceMismatch {
            left: mu.space().describe(),
            right: g.space().describe(),
        });
    }
    Ok(())
}

/// `∫ K(g) dμ`, minus `K(g)(pin)` when a pin is given.
pub fn integrate_k(mu: &Measure, g: &Homeo, pin: Option<&Point>) -> Result<f64> {
    check_space(mu, g)?;
    let raw = mu.integrate(|p| k_eval(g, p))?;
    Ok(match pin {
        Some(p) => raw - k_eval(g, p)?,
        None => raw,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct NielsenGap {
    pub integral_mu: f64,
    pub integral_nu: f64,
    /// `|∫K(g) d(μ − ν)|`.
    pub gap: f64,
    pub tolerance: f64,
    pub equivalent: bool,
}

pub fn nielsen_gap(mu: &Measure, nu: &Measure, g: &Homeo) -> Result<NielsenGap> {
    let integral_mu = integrate_k(mu, g, None)?;
    let integral_nu = integrate_k(nu, g, None)?;
    let gap = (integral_mu - integral_nu).abs();
    let tolerance = if mu.is_empirical() || nu.is_empirical() {
        EXACT_GAP_TOLERANCE.max(10.0 * (mu.defect() + nu.defect()))
    } else {
        EXACT_GAP_TOLERANCE
    };
    Ok(NielsenGap {
        integral_mu,
        integral_nu,
        gap,
        tolerance,
        equivalent: gap <= tolerance,
    })
}

/// Undistortion from two Nielsen-nonequivalent invariant measures:
/// `h ↦ ∫K(h) d(μ − ν)` is 1-Lipschitz for the seminorm and equals
/// `n·gap` on `gⁿ`, so `C·τ(g) ≥ gap`.
pub fn certify_two_measures(
    mu: &Measure,
    nu: &Measure,
    g: &Homeo,
    constant: Option<f64>,
) -> Result<Certificate> {
    let ng = nielsen_gap(mu, nu, g)?;
    let mut cert = Certificate::new(Mechanism::TwoMeasures);
    cert.push("measure_mu", mu.describe());
    cert.push("measure_nu", nu.describe());
    cert.push("integral_mu", ng.integral_mu);
    cert.push("integral_nu", ng.integral_nu);
    cert.push("gap", ng.gap);
    cert.push("gap_tolerance", ng.tolerance);
    cert.push("invariance_defect", mu.defect() + nu.defect());
    if let Some(c) = constant {
        cert.push("seminorm_constant", c);
    }
    if ng.equivalent {
        cert.push("reason", "measures are Nielsen equivalent within tolerance");
        return Ok(cert);
    }
    cert.conclude(ng.gap, constant);
    Ok(cert)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SccRotation {
    /// Translation number of the lift of `g|ℓ` obtained from `g̃`.
    pub translation: f64,
    /// Topological rotation number of `g|ℓ` in `[0, 1)`.
    pub rotation: f64,
    pub pairing: i64,
    /// `translation · pairing`.
    pub product: f64,
    /// `∫K(g) dμ` for the uniform measure on `ℓ`.
    pub k_integral: f64,
    pub iterations: usize,
    /// Heuristic error `1/N` of the orbit estimate (0 for closed forms).
    pub error: f64,
}

/// Rotation number of `g` restricted to the invariant circle `ℓ`, times
/// `⟨a, ℓ⟩`.
pub fn scc_rotation_integral(
    circle: &InvariantCircle,
    g: &Homeo,
    budget: usize,
) -> Result<SccRotation> {
    let space = g.space();
    circle.check(space)?;
    for j in 0..64 {
        let p = circle.point(j as f64 / 64.0);
        let q = g.apply(&p)?;
        if circle.locate(&q).is_none() {
            return Err(Error::Precondition(format!(
                "circle {circle} is not invariant: {p} maps to {q}"
            )));
        }
    }
    let start = circle.point(0.0);
    let axis = circle.axis();
    let (iterations, shift, error) = if g.has_closed_powers() {
        let n = budget.max(1);
        (n, g.orbit_step(&start, n as i64)?.shift[axis], 0.0)
    } else {
        let n = budget.clamp(1, MAX_CIRCLE_ITERATIONS);
        (
            n,
            g.orbit_step(&start, n as i64)?.shift[axis],
            1.0 / n as f64,
        )
    };
    let translation = shift / iterations as f64;
    let pairing = circle.pairing(space);
    let rotation = {
        let f = translation - translation.floor();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    };
    let mu = Measure::circle(space, *circle)?;
    Ok(SccRotation {
        translation,
        rotation,
        pairing,
        product: translation * pairing as f64,
        k_integral: integrate_k(&mu, g, None)?,
        iterations,
        error,
    })
}

/// Largest denominator considered in rational reconstruction.
pub const MAX_RELATION_COEFFICIENT: i64 = 64;
pub const RELATION_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct RationalityReport {
    /// Both pairings nonzero, so a relation is expected for distorted `g`.
    pub applicable: bool,
    /// Smallest `(k₁, k₂)`, `k₁ > 0`, `k₂ ≠ 0`, with `k₁ρ₁ ≡ k₂ρ₂ (mod 1)`.
    pub relation: Option<(i64, i64)>,
    /// `ρᵢ ≡ p/q (mod 1)` with `q ≤ 64`, from continued fractions.
    pub rational_1: Option<(i64, i64)>,
    pub rational_2: Option<(i64, i64)>,
}

/// Continued-fraction reconstruction of `x mod 1` as `p/q`, `q ≤ max_den`.
pub fn rational_reconstruction(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    let x = x - x.floor();
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h = a * h1 + h0;
        let k = a * k1 + k0;
        if k > max_den {
            break;
        }
        if (x - h as f64 / k as f64).abs() <= tol {
            return Some((h.rem_euclid(k), k));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = v - a as f64;
        if frac <= 0.0 {
            break;
        }
        v = 1.0 / frac;
    }
    // x within tol of 1 reduces to 0/1
    if (1.0 - x).abs() <= tol {
        return Some((0, 1));
    }
    None
}

pub fn rationality_check(rho1: f64, pairing1: i64, rho2: f64, pairing2: i64) -> RationalityReport {
    let k = MAX_RELATION_COEFFICIENT;
    let mut relation: Option<((i64, i64, i64, bool), (i64, i64))> = None;
    for k1 in 1..=k {
        for a in 1..=k {
            for k2 in [a, -a] {
                let d = k1 as f64 * rho1 - k2 as f64 * rho2;
                if (d - d.round()).abs() > RELATION_TOLERANCE {
                    continue;
                }
                let key = (k1.max(a), k1, a, k2 < 0);
                if relation.as_ref().is_none_or(|(best, _)| key < *best) {
                    relation = Some((key, (k1, k2)));
                }
            }
        }
    }
    let relation = relation.map(|(_, r)| r);
    RationalityReport {
        applicable: pairing1 != 0 && pairing2 != 0,
        relation,
        rational_1: rational_reconstruction(rho1, k, RELATION_TOLERANCE),
        rational_2: rational_reconstruction(rho2, k, RELATION_TOLERANCE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Verdict;
    use crate::exact::Surd;

    fn twist() -> Homeo {
        Homeo::annulus_twist(&Space::annulus(), Surd::zero(), Surd::ratio(1, 2)).unwrap()
    }

    #[test]
    fn circle_names_roundtrip() {
        for name in [
            "base",
            "boundary:0",
            "boundary:1",
            "infinity",
            "s-circle:0.25",
            "t-circle:0.5",
        ] {
            assert_eq!(InvariantCircle::parse(name).unwrap().to_string(), name);
        }
        assert_eq!(
            InvariantCircle::parse("s-circle:1/4").unwrap(),
            InvariantCircle::SCircle(0.25)
        );
        assert!(InvariantCircle::parse("boundary:2").is_err());
    }

    #[test]
    fn twist_boundary_integrals_and_gap() {
        let g = twist();
        let s = g.space().clone();
        let m0 = Measure::circle(&s, InvariantCircle::Boundary(0)).unwrap();
        let m1 = Measure::circle(&s, InvariantCircle::Boundary(1)).unwrap();
        assert_eq!(integrate_k(&m0, &g, None).unwrap(), 0.0);
        assert!((integrate_k(&m1, &g, None).unwrap() - 0.5).abs() < 1e-15);
        let ng = nielsen_gap(&m0, &m1, &g).unwrap();
        assert!((ng.gap - 0.5).abs() < 1e-15);
        assert!(!ng.equivalent);
        let c = certify_two_measures(&m0, &m1, &g, Some(0.5)).unwrap();
        assert_eq!(c.verdict, Verdict::Undistorted);
        assert!((c.tau_lower_bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empirical_rotation_measure() {
        let c = Space::circle();
        let g = Homeo::rigid_rotation(&c, Surd::ratio(1, 7)).unwrap();
        let mu = Measure::empirical(&g, Point::circle(0.2), 10_000).unwrap();
        assert!((integrate_k(&mu, &g, None).unwrap() - 1.0 / 7.0).abs() < 1e-3);
        assert!((mu.defect() - 2.0 / 7.0 / 10_000.0).abs() < 1e-15);
    }

    #[test]
    fn weights_validated() {
        let c = Space::circle();
        assert!(Measure::atomic(&c, vec![Point::circle(0.0)], vec![0.5]).is_err());
        assert!(Measure::atomic(
            &c,
            vec![Point::circle(0.0), Point::circle(0.5)],
            vec![1.5, -0.5]
        )
        .is_err());
    }

    #[test]
    fn scc_on_twist_and_shear() {
        let g = twist();
        let r = scc_rotation_integral(&InvariantCircle::Boundary(1), &g, 1000).unwrap();
        assert_eq!(r.translation, 0.5);
        assert_eq!(r.product, 0.5);
        assert!((r.k_integral - 0.5).abs() < 1e-15);
        let s = Space::compactified_torus();
        let shear = Homeo::torus_shear(&s, 1).unwrap();
        let r = scc_rotation_integral(&InvariantCircle::Infinity, &shear, 1000).unwrap();
        assert_eq!(r.product, 0.0);
        assert_eq!(r.pairing, 1);
        let not_invariant = scc_rotation_integral(&InvariantCircle::SCircle(0.0), &shear, 10);
        assert!(matches!(not_invariant, Err(Error::Precondition(_))));
    }

    #[test]
    fn rationality_examples() {
        let r = rationality_check(1.0 / 3.0, 1, 0.5, 1);
        assert_eq!(r.relation, Some((3, 2)));
        let irr = 2f64.sqrt() - 1.0;
        assert_eq!(rationality_check(irr, 1, irr, 1).relation, Some((1, 1)));
        let none = rationality_check(irr, 1, 0.5, 1);
        assert_eq!(none.relation, None);
        assert_eq!(none.rational_1, None);
        assert_eq!(none.rational_2, Some((1, 2)));
    }

    #[test]
    fn reconstruction() {
        assert_eq!(rational_reconstruction(0.4, 64, 1e-9), Some((2, 5)));
        assert_eq!(rational_reconstruction(-0.25, 64, 1e-9), Some((3, 4)));
        assert_eq!(rational_reconstruction(0.0, 64, 1e-9), Some((0, 1)));
        assert_eq!(rational_reconstruction(1.0 / 67.0, 64, 1e-9), None);
    }
}
