//! Exact piecewise-linear degree-one circle maps.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::Surd;

/// A lift `F: ℝ → ℝ` with `F(x + 1) = F(x) + 1`, linear between knots.
///
/// Knots are `(xᵢ, yᵢ = F(xᵢ))` with `0 = x₀ < x₁ < … < 1` and strictly
/// increasing `yᵢ`, `y_last < y₀ + 1`. Interior knots where the slope does
/// not change are removed, so two maps with equal lifts have equal knot
/// lists once `y₀` is reduced into `[0, 1)` (see [`canonical_knots`]).
///
/// [`canonical_knots`]: PlCircleMap::canonical_knots
#[derive(Clone, Debug)]
pub struct PlCircleMap {
    knots: Vec<(Surd, Surd)>,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PartialEq for PlCircleMap {
    fn eq(&self, other: &Self) -> bool {
        self.knots == other.knots
    }
}

impl Eq for PlCircleMap {}

impl PlCircleMap {
    /// Builds a map from knots `(x, value)`. Breakpoints must be strictly
    /// increasing in `[0, 1)`; values may be given modulo 1 as long as they
    /// are in the same cyclic order, or already as lift values.
    pub fn new(knots: Vec<(Surd, Surd)>) -> Result<PlCircleMap> {
        if knots.is_empty() {
            return Err(Error::Domain("PL map without breakpoints".into()));
        }
        let zero = Surd::zero();
        let one = Surd::one();
        for w in knots.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Domain(format!(
                    "PL breakpoints not strictly increasing at {}",
                    w[1].0
                )));
            }
        }
        if knots[0].0 < zero || knots.last().unwrap().0 >= one {
            return Err(Error::Domain("PL breakpoints must lie in [0,1)".into()));
        }
        // unwrap values into a strictly increasing sequence
        let mut lifted: Vec<(Surd, Surd)> = Vec::with_capacity(knots.len());
        for (x, y) in knots {
            let y = match lifted.last() {
                Some((_, prev)) if y <= *prev => {
                    let k = (prev - &y).floor() + 1;
                    &y + &Surd::from_rational(num::rational::BigRational::from_integer(k))
                }
                _ => y,
            };
            lifted.push((x, y));
        }
        if lifted.last().unwrap().1 >= &lifted[0].1 + &one {
            return Err(Error::Domain(
                "PL values wind more than once; degree must be +1".into(),
            ));
        }
        if lifted[0].0 != zero {
            let value = Self::wrap_value(&lifted, &zero);
            lifted.insert(0, (zero, value));
        }
        Ok(Self::from_lift(lifted))
    }

    /// Value at `0` interpolated across the wrap-around segment.
    fn wrap_value(lifted: &[(Surd, Surd)], at: &Surd) -> Surd {
        let one = Surd::one();
        let (xl, yl) = lifted.last().unwrap();
        let (x0, y0) = &lifted[0];
        let (xa, ya) = (xl - &one, yl - &one);
        let slope = &(y0 - &ya) / &(x0 - &xa);
        &ya + &(&(at - &xa) * &slope)
    }

    /// Assumes valid lift data with `x₀ = 0`; removes collinear knots.
    fn from_lift(knots: Vec<(Surd, Surd)>) -> PlCircleMap {
        let one = Surd::one();
        let n = knots.len();
        let mut keep = vec![true; n];
        if n > 1 {
            let slopes: Vec<Surd> = (0..n)
                .map(|i| {
                    let (x0, y0) = &knots[i];
                    let (x1, y1) = if i + 1 < n {
                        (knots[i + 1].0.clone(), knots[i + 1].1.clone())
                    } else {
                        (one.clone(), &knots[0].1 + &one)
                    };
                    &(&y1 - y0) / &(&x1 - x0)
                })
                .collect();
            for i in 1..n {
                if slopes[i] == slopes[i - 1] {
                    keep[i] = false;
                }
            }
        }
        let knots: Vec<(Surd, Surd)> = knots
            .into_iter()
            .zip(keep)
            .filter_map(|(k, keep)| keep.then_some(k))
            .collect();
        let xs = knots.iter().map(|(x, _)| x.to_f64()).collect();
        let ys = knots.iter().map(|(_, y)| y.to_f64()).collect();
        PlCircleMap { knots, xs, ys }
    }

    pub fn identity() -> PlCircleMap {
        PlCircleMap::rotation(Surd::zero())
    }

    pub fn rotation(rho: Surd) -> PlCircleMap {
        Self::from_lift(vec![(Surd::zero(), rho)])
    }

    pub fn knots(&self) -> &[(Surd, Surd)] {
        &self.knots
    }

    /// Knots with the integer part of `F(0)` removed: equal exactly when the
    /// circle maps are equal.
    pub fn canonical_knots(&self) -> Vec<(Surd, Surd)> {
        let k = Surd::from_rational(num::rational::BigRational::from_integer(
            self.knots[0].1.floor(),
        ));
        self.knots
            .iter()
            .map(|(x, y)| (x.clone(), y - &k))
            .collect()
    }

    pub fn is_rotation(&self) -> bool {
        self.knots.len() == 1
    }

    /// Endpoint of segment `i` (the knot after it, wrapping to `x = 1`).
    fn segment_end(&self, i: usize) -> (Surd, Surd) {
        if i + 1 < self.knots.len() {
            self.knots[i + 1].clone()
        } else {
            (Surd::one(), &self.knots[0].1 + &Surd::one())
        }
    }

    fn slope(&self, i: usize) -> Surd {
        let (x0, y0) = &self.knots[i];
        let (x1, y1) = self.segment_end(i);
        &(&y1 - y0) / &(&x1 - x0)
    }

    /// Slopes of every segment, in knot order.
    pub fn slopes(&self) -> Vec<Surd> {
        (0..self.knots.len()).map(|i| self.slope(i)).collect()
    }

    /// Exact lift value `F(x)`.
    pub fn eval(&self, x: &Surd) -> Surd {
        let k = Surd::from_rational(num::rational::BigRational::from_integer(x.floor()));
        let f = x - &k;
        let i = match self.knots.binary_search_by(|(kx, _)| kx.cmp(&f)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let (xi, yi) = &self.knots[i];
        let y = yi + &(&(&f - xi) * &self.slope(i));
        &y + &k
    }

    /// Exact `F⁻¹(y)`.
    pub fn inverse_eval(&self, y: &Surd) -> Surd {
        let y0 = &self.knots[0].1;
        let m = Surd::from_rational(num::rational::BigRational::from_integer((y - y0).floor()));
        let u = y - &m;
        let i = match self.knots.binary_search_by(|(_, ky)| ky.cmp(&u)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let (xi, yi) = &self.knots[i];
        let x = xi + &(&(&u - yi) / &self.slope(i));
        &x + &m
    }

    /// Floating-point lift value.
    pub fn eval_f64(&self, x: f64) -> f64 {
        let k = x.floor();
        let f = x - k;
        let i = match self.xs.binary_search_by(|v| v.total_cmp(&f)) {
            Ok(i) => i,
            Err(i) => i.max(1) - 1,
        };
        let (x1, y1) = if i + 1 < self.xs.len() {
            (self.xs[i + 1], self.ys[i + 1])
        } else {
            (1.0, self.ys[0] + 1.0)
        };
        let y = self.ys[i] + (f - self.xs[i]) * (y1 - self.ys[i]) / (x1 - self.xs[i]);
        y + k
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PlCircleMap) -> PlCircleMap {
        let mut candidates: Vec<Surd> = vec![Surd::zero()];
        candidates.extend(other.knots.iter().map(|(x, _)| x.clone()));
        for (x, _) in &self.knots {
            candidates.push(other.inverse_eval(x).fract());
        }
        candidates.sort();
        candidates.dedup();
        let knots = candidates
            .into_iter()
            .map(|u| {
                let v = self.eval(&other.eval(&u));
                (u, v)
            })
            .collect();
        Self::from_lift(knots)
    }

    pub fn inverse(&self) -> PlCircleMap {
        let mut candidates: Vec<Surd> = vec![Surd::zero()];
        candidates.extend(self.knots.iter().map(|(_, y)| y.fract()));
        candidates.sort();
        candidates.dedup();
        let knots = candidates
            .into_iter()
            .map(|u| {
                let v = self.inverse_eval(&u);
                (u, v)
            })
            .collect();
        Self::from_lift(knots)
    }

    pub fn power(&self, n: i64) -> PlCircleMap {
        let mut base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = PlCircleMap::identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = base.compose(&acc);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    /// `max |slope − 1|`, the Lipschitz constant of the displacement.
    pub fn displacement_lipschitz(&self) -> f64 {
        self.slopes()
            .iter()
            .map(|s| (s.to_f64() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

impl fmt::Display for PlCircleMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PL[")?;
        for (i, (x, y)) in self.knots.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}:{y}")?;
        }
        f.write_str("]")
    }
}
