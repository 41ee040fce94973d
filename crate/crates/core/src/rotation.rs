//! Local rotation numbers `r_x(g) = lim b_x(gⁿ)/n` with
//! `b_x(gⁿ) = −(F(g̃ⁿ x̃) − F(x̃)) = −K(gⁿ)(x)`, and finite evidence for the
//! boundedness of `G_x` on the cyclic group `⟨g⟩`.

use std::fmt;

use crate::cocycle;
use crate::error::{Error, Result};
use crate::homeo::{Homeo, Step};
use crate::space::Point;

/// Threshold on the fitted growth of the running sup, per doubling of the
/// range.
pub const GROWTH_THRESHOLD: f64 = 0.1;
/// Largest range used for the `G_x(gᵐ, gⁿ)` table.
pub const DIAGNOSTIC_RANGE: usize = 64;
/// Largest `n` at which `b_x(gⁿ)` is tabulated for the residual band when
/// closed forms make every power cheap.
const BAND_SAMPLES: usize = 1 << 16;

/// Evaluates lifts of powers `gⁿ`, keeping one inverse around for negative
/// exponents of maps without closed powers.
#[derive(Clone, Debug)]
pub struct Powers {
    g: Homeo,
    inverse: Option<Homeo>,
}

impl Powers {
    pub fn new(g: &Homeo) -> Powers {
        let inverse = if g.has_closed_powers() {
            None
        } else {
            g.inverse().ok()
        };
        Powers {
            g: g.clone(),
            inverse,
        }
    }

    pub fn homeo(&self) -> &Homeo {
        &self.g
    }

    /// Whether negative powers can be evaluated.
    pub fn invertible(&self) -> bool {
        self.g.has_closed_powers() || self.inverse.is_some()
    }

    pub fn step(&self, p: &Point, n: i64) -> Result<Step> {
        if n >= 0 || self.g.has_closed_powers() {
            return self.g.orbit_step(p, n);
        }
        match &self.inverse {
            Some(inv) => inv.orbit_step(p, -n),
            None => Err(Error::NonInvertible(format!(
                "negative power of {}",
                self.g.describe()
            ))),
        }
    }

    /// `K(gⁿ)(p)`.
    pub fn k(&self, p: &Point, n: i64) -> Result<f64> {
        Ok(self.g.space().pair(self.step(p, n)?.shift))
    }

    /// `K(gⁿ)(p)` for `n = 0..=n_max`.
    pub fn k_series(&self, p: &Point, n_max: usize) -> Result<Vec<f64>> {
        let space = self.g.space();
        Ok(self
            .g
            .orbit_series(p, n_max)?
            .into_iter()
            .map(|st| space.pair(st.shift))
            .collect())
    }

    /// `G_x(gᵐ, gⁿ) = K(gᵐ)(gⁿx) − K(gᵐ)(x)`.
    pub fn g_cocycle(&self, x: &Point, m: i64, n: i64) -> Result<f64> {
        let y = self.step(x, n)?.image;
        Ok(self.k(&y, m)? - self.k(x, m)?)
    }
}

/// `b_x(gⁿ)`.
pub fn b_value(x: &Point, g: &Homeo, n: i64) -> Result<f64> {
    Ok(-cocycle::k_power(g, x, n)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundedVerdict {
    Bounded,
    UnboundedSuspected,
    Inconclusive,
}

impl fmt::Display for BoundedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundedVerdict::Bounded => "Bounded",
            BoundedVerdict::UnboundedSuspected => "UnboundedSuspected",
            BoundedVerdict::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundednessDiagnostic {
    pub range: usize,
    /// `max |G_x(gᵐ, gⁿ)|` over the whole table.
    pub sup: f64,
    /// Running sup `S(M)` over `|m|, |n| ≤ M` for `M = 1, 2, 4, …, range`.
    pub levels: Vec<(usize, f64)>,
    /// Least-squares slope of `S` against `log₂ M` over the upper half of
    /// the levels.
    pub slope: f64,
    pub verdict: BoundedVerdict,
    /// Only `m, n ≥ 0` were tabulated (map without inverse).
    pub one_sided: bool,
    /// `(m, n, G_x(gᵐ, gⁿ))` row-major over the table.
    pub table: Vec<(i64, i64, f64)>,
}

fn dyadic_levels(range: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut m = 1;
    while m < range {
        out.push(m);
        m *= 2;
    }
    out.push(range.max(1));
    out
}

fn fitted_slope(levels: &[(usize, f64)]) -> f64 {
    let upper = &levels[levels.len() / 2..];
    if upper.len() < 2 {
        return 0.0;
    }
    let pts: Vec<(f64, f64)> = upper.iter().map(|&(m, s)| ((m as f64).log2(), s)).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Tabulates `G_x(gᵐ, gⁿ)` for `|m|, |n| ≤ range` and classifies the growth
/// of its running sup.
pub fn boundedness_diagnostic(x: &Point, g: &Homeo, range: usize) -> Result<BoundednessDiagnostic> {
    let powers = Powers::new(g);
    boundedness_with(&powers, x, range)
}

pub(crate) fn boundedness_with(
    powers: &Powers,
    x: &Point,
    range: usize,
) -> Result<BoundednessDiagnostic> {
    let one_sided = !powers.invertible();
    let r = range as i64;
    let lo = if one_sided { 0 } else { -r };
    let mut table = Vec::new();
    for m in lo..=r {
        for n in lo..=r {
            table.push((m, n, powers.g_cocycle(x, m, n)?));
        }
    }
    let levels: Vec<(usize, f64)> = dyadic_levels(range)
        .into_iter()
        .map(|lvl| {
            let l = lvl as i64;
            let s = table
                .iter()
                .filter(|(m, n, _)| m.abs() <= l && n.abs() <= l)
                .map(|t| t.2.abs())
                .fold(0.0, f64::max);
            (lvl, s)
        })
        .collect();
    let sup = levels.last().map_or(0.0, |l| l.1);
    let slope = fitted_slope(&levels);
    let verdict = if slope > GROWTH_THRESHOLD {
        BoundedVerdict::UnboundedSuspected
    } else if levels.len() < 2 {
        if sup == 0.0 {
            BoundedVerdict::Bounded
        } else {
            BoundedVerdict::Inconclusive
        }
    } else {
        let half = levels[levels.len() - 2].1;
        if sup - half <= GROWTH_THRESHOLD {
            BoundedVerdict::Bounded
        } else {
            BoundedVerdict::Inconclusive
        }
    };
    Ok(BoundednessDiagnostic {
        range,
        sup,
        levels,
        slope,
        verdict,
        one_sided,
        table,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationEstimate {
    /// Representative `r_x(g)`.
    pub r: f64,
    /// `r mod 1`.
    pub rot: f64,
    /// `−r mod 1`, the value a classical lift estimate produces.
    pub classical: f64,
    pub n_used: usize,
    /// `sup |b_x(gⁿ) − r·n|` over the computed `n`.
    pub residual_band: f64,
    pub bounded_verdict: BoundedVerdict,
    pub diagnostic: BoundednessDiagnostic,
}

fn fract(v: f64) -> f64 {
    let f = v - v.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// The budget rounded up to a power of two (at least 2).
pub fn effective_budget(budget: usize) -> usize {
    budget.max(2).next_power_of_two()
}

/// `r = (b(N) − b(N/2)) / (N/2)`: the average increment over the second
/// half of the orbit, with `N` the budget rounded up to a power of two.
pub fn local_rotation_number(x: &Point, g: &Homeo, budget: usize) -> Result<RotationEstimate> {
    let powers = Powers::new(g);
    rotation_with(&powers, x, budget)
}

pub(crate) fn rotation_with(powers: &Powers, x: &Point, budget: usize) -> Result<RotationEstimate> {
    let g = powers.homeo();
    let n = effective_budget(budget);
    let half = n / 2;
    let (b_full, b_half, band_points): (f64, f64, Vec<(usize, f64)>) = if g.has_closed_powers() {
        let b = |k: usize| -> Result<f64> { Ok(-powers.k(x, k as i64)?) };
        let mut pts = Vec::new();
        for k in 1..=n.min(BAND_SAMPLES) {
            pts.push((k, b(k)?));
        }
        let mut k = BAND_SAMPLES * 2;
        while k <= n {
            pts.push((k, b(k)?));
            k *= 2;
        }
        (b(n)?, b(half)?, pts)
    } else {
        let ks = powers.k_series(x, n)?;
        let pts: Vec<(usize, f64)> = ks
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| (k, -v))
            .collect();
        (-ks[n], -ks[half], pts)
    };
    let r = (b_full - b_half) / half as f64;
    let residual_band = band_points
        .iter()
        .map(|&(k, b)| (b - r * k as f64).abs())
        .fold(0.0, f64::max);
    let diagnostic = boundedness_with(powers, x, budget.clamp(1, DIAGNOSTIC_RANGE))?;
    Ok(RotationEstimate {
        r,
        rot: fract(r),
        classical: fract(-r),
        n_used: n,
        residual_band,
        bounded_verdict: diagnostic.verdict,
        diagnostic,
    })
}

/// Distance between two points of `ℝ/ℤ`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    let d = fract(a - b);
    d.min(1.0 - d)
}
