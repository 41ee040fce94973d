//! The two-point quasimorphism `q(g) = K(g)(y) − K(g)(x)` on `⟨g⟩`, its
//! defect and homogenisation, and undistortion certificates built from
//! rotation numbers or fixed points.

use crate::certificate::{Certificate, Mechanism};
use crate::cocycle;
use crate::error::{Error, Result};
use crate::homeo::Homeo;
use crate::rotation::{self, circular_distance, BoundedVerdict, Powers};
use crate::space::{Path, Point, SpaceKind};
use crate::INTEGER_TOLERANCE;

/// Circular gap between two rotation numbers that counts as distinct.
pub const ROTATION_GAP_TOLERANCE: f64 = 1e-6;
/// Distance within which a point counts as fixed.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-12;

/// `q(gⁿ)`.
pub fn q_value(x: &Point, y: &Point, g: &Homeo, n: i64) -> Result<f64> {
    Ok(cocycle::k_power(g, y, n)? - cocycle::k_power(g, x, n)?)
}

/// Values `n ↦ q(gⁿ)` of the quasimorphism for a fixed pair of points.
#[derive(Clone, Debug)]
pub struct Quasimorphism {
    x: Point,
    y: Point,
    powers: Powers,
}

impl Quasimorphism {
    pub fn new(x: Point, y: Point, g: &Homeo) -> Quasimorphism {
        Quasimorphism {
            x,
            y,
            powers: Powers::new(g),
        }
    }

    pub fn value(&self, n: i64) -> Result<f64> {
        Ok(self.powers.k(&self.y, n)? - self.powers.k(&self.x, n)?)
    }

    /// `q(gⁿ)` for `n = 0..=n_max`.
    pub fn series(&self, n_max: usize) -> Result<Vec<f64>> {
        let ky = self.powers.k_series(&self.y, n_max)?;
        let kx = self.powers.k_series(&self.x, n_max)?;
        Ok(ky.iter().zip(&kx).map(|(a, b)| a - b).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefectEstimate {
    pub range: usize,
    /// `max |q(gᵐ) − q(gᵐ⁺ⁿ) + q(gⁿ)|` over the table.
    pub sampled: f64,
    pub norm_x: f64,
    pub norm_y: f64,
    /// `norm_x + norm_y`.
    pub bound: f64,
    pub holds: bool,
}

/// Defect of `q` on `|m|, |n| ≤ range` against `‖G_x‖ + ‖G_y‖` on the same
/// table (one-sided for maps without inverse).
pub fn defect_estimate(x: &Point, y: &Point, g: &Homeo, range: usize) -> Result<DefectEstimate> {
    let powers = Powers::new(g);
    let r = range as i64;
    let lo = if powers.invertible() { -r } else { 0 };
    let q = |n: i64| -> Result<f64> { Ok(powers.k(y, n)? - powers.k(x, n)?) };
    let mut sampled = 0.0f64;
    let mut norm_x = 0.0f64;
    let mut norm_y = 0.0f64;
    for m in lo..=r {
        let qm = q(m)?;
        for n in lo..=r {
            sampled = sampled.max((qm - q(m + n)? + q(n)?).abs());
            norm_x = norm_x.max(powers.g_cocycle(x, m, n)?.abs());
            norm_y = norm_y.max(powers.g_cocycle(y, m, n)?.abs());
        }
    }
    let bound = norm_x + norm_y;
    Ok(DefectEstimate {
        range,
        sampled,
        norm_x,
        norm_y,
        bound,
        holds: sampled <= bound + 1e-9,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Homogenised {
    pub value: f64,
    /// `sup |q(gⁿ) − value·n|` over `n ≤ n_used`.
    pub band: f64,
    pub n_used: usize,
}

/// `q̂(g) ≈ (q(g^N) − q(g^{N/2})) / (N/2)` with `N` a power of two.
pub fn homogenise(x: &Point, y: &Point, g: &Homeo, budget: usize) -> Result<Homogenised> {
    homogenise_with(&Quasimorphism::new(*x, *y, g), budget)
}

fn homogenise_with(q: &Quasimorphism, budget: usize) -> Result<Homogenised> {
    let n = rotation::effective_budget(budget);
    let values = if q.powers.homeo().has_closed_powers() && n > (1 << 16) {
        let mut v = q.series(1 << 16)?;
        v.resize(n + 1, f64::NAN);
        v[n / 2] = q.value((n / 2) as i64)?;
        v[n] = q.value(n as i64)?;
        v
    } else {
        q.series(n)?
    };
    let value = (values[n] - values[n / 2]) / (n / 2) as f64;
    let band = values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_nan())
        .map(|(k, v)| (v - value * k as f64).abs())
        .fold(0.0, f64::max);
    Ok(Homogenised {
        value,
        band,
        n_used: n,
    })
}

/// Undistortion from two points whose local rotation numbers differ: the
/// homogenised `q̂` is then nonzero and `C·τ(g) ≥ |q̂(g)|`.
///
/// `constant` is the generator seminorm constant `C`, when a generating set
/// is known.
pub fn certify_two_rotation_points(
    x: &Point,
    y: &Point,
    g: &Homeo,
    budget: usize,
    constant: Option<f64>,
) -> Result<Certificate> {
    let mut cert = Certificate::new(Mechanism::TwoRotationPoints);
    let powers = Powers::new(g);
    let n = rotation::effective_budget(budget);
    let ex = rotation::rotation_with(&powers, x, n)?;
    let ey = rotation::rotation_with(&powers, y, n)?;
    let ex2 = rotation::rotation_with(&powers, x, 2 * n)?;
    let ey2 = rotation::rotation_with(&powers, y, 2 * n)?;
    let gap = circular_distance(ex.rot, ey.rot);
    let gap2 = circular_distance(ex2.rot, ey2.rot);
    cert.push("budget", n);
    cert.push("rot_x", ex2.rot);
    cert.push("rot_y", ey2.rot);
    cert.push("r_x", ex2.r);
    cert.push("r_y", ey2.r);
    cert.push("bounded_x", ex.bounded_verdict.to_string());
    cert.push("bounded_y", ey.bounded_verdict.to_string());
    cert.push("rotation_gap", gap);
    cert.push("rotation_gap_doubled_budget", gap2);
    cert.push("rotation_gap_tolerance", ROTATION_GAP_TOLERANCE);
    if let Some(c) = constant {
        cert.push("seminorm_constant", c);
    }
    let bounded = ex.bounded_verdict == BoundedVerdict::Bounded
        && ey.bounded_verdict == BoundedVerdict::Bounded;
    if !bounded {
        cert.push("reason", "boundedness not established at both points");
        return Ok(cert);
    }
    if gap <= ROTATION_GAP_TOLERANCE || gap2 <= ROTATION_GAP_TOLERANCE {
        cert.push("reason", "rotation gap below tolerance");
        return Ok(cert);
    }
    let q = Quasimorphism {
        x: *x,
        y: *y,
        powers,
    };
    let qh = homogenise_with(&q, 2 * n)?;
    cert.push("q_hat", qh.value);
    cert.push("q_band", qh.band);
    if qh.value.abs() <= ROTATION_GAP_TOLERANCE {
        cert.push("reason", "homogenisation vanishes");
        return Ok(cert);
    }
    cert.conclude(qh.value.abs(), constant);
    Ok(cert)
}

fn fixed(g: &Homeo, p: &Point) -> Result<bool> {
    let q = g.apply(p)?;
    let ds = circular_distance(q.s, p.s);
    let dt = if p.t.is_infinite() || q.t.is_infinite() {
        if p.t == q.t {
            0.0
        } else {
            f64::INFINITY
        }
    } else if g.space().kind() == SpaceKind::Torus2 {
        circular_distance(q.t, p.t)
    } else {
        (q.t - p.t).abs()
    };
    Ok(ds <= FIXED_POINT_TOLERANCE && dt <= FIXED_POINT_TOLERANCE)
}

/// `⟨a, gγ − γ⟩` by integrating along a densely sampled image of `γ`.
pub fn image_loop_pairing(g: &Homeo, gamma: &Path) -> Result<f64> {
    const PIECES: usize = 1024;
    let space = g.space();
    let mut total = [0.0, 0.0];
    let mut prev: Option<[f64; 2]> = None;
    for (seg, w) in gamma.vertices().windows(2).zip(gamma.windings()) {
        let a = space.angles(&seg[0]);
        let b = space.angles(&seg[1]);
        let second_circle = space.kind().second_is_circle();
        for j in 0..=PIECES {
            let f = j as f64 / PIECES as f64;
            let u0 = a[0] + f * (b[0] - a[0] + w[0] as f64);
            let p = if second_circle {
                space.from_units(u0, a[1] + f * (b[1] - a[1] + w[1] as f64))
            } else {
                space.from_units(u0, seg[0].t + f * (seg[1].t - seg[0].t))
            };
            let cur = space.angles(&g.apply(&p)?);
            if let Some(pr) = prev {
                for i in 0..2 {
                    let d = cur[i] - pr[i];
                    total[i] += d - d.round();
                }
            }
            prev = Some(cur);
        }
    }
    Ok(space.pair(total) - gamma.canonical_integral(space)?)
}

/// Undistortion from two fixed points joined by `γ`: the pairing
/// `⟨a, gγ − γ⟩ = K(g)(y) − K(g)(x)` is an integer, and when it is nonzero
/// `C·τ(g) ≥ |pairing|`.
pub fn certify_two_fixed_points(
    x: &Point,
    y: &Point,
    g: &Homeo,
    gamma: &Path,
    constant: Option<f64>,
) -> Result<Certificate> {
    for (name, p) in [("x", x), ("y", y)] {
        if !fixed(g, p)? {
            return Err(Error::Precondition(format!(
                "{name} = {p} is not fixed by {}",
                g.describe()
            )));
        }
    }
    if gamma.start() != *x || gamma.end() != *y {
        return Err(Error::Domain("path must run from x to y".into()));
    }
    let mut cert = Certificate::new(Mechanism::TwoFixedPoints);
    let pairing = cocycle::k_eval(g, y)? - cocycle::k_eval(g, x)?;
    let rounded = pairing.round();
    let loop_pairing = image_loop_pairing(g, gamma)?;
    cert.push("pairing", pairing);
    cert.push("loop_pairing", loop_pairing);
    cert.push("integer_residual", (pairing - rounded).abs());
    cert.push("integer_tolerance", INTEGER_TOLERANCE);
    if let Some(c) = constant {
        cert.push("seminorm_constant", c);
    }
    if (pairing - rounded).abs() > INTEGER_TOLERANCE {
        cert.push("reason", "pairing is not an integer");
        return Ok(cert);
    }
    if rounded == 0.0 {
        cert.push("reason", "pairing is zero");
        return Ok(cert);
    }
    cert.conclude(rounded.abs(), constant);
    Ok(cert)
}

/// Finite check that `|q(gⁿ)|/n` stays above the certified bound (in
/// seminorm units, relative slack `1e-3`) over the second half of the
/// budget.
pub fn certificate_soundness(
    cert: &Certificate,
    x: &Point,
    y: &Point,
    g: &Homeo,
    budget: usize,
) -> Result<bool> {
    if !cert.is_undistorted() {
        return Ok(true);
    }
    let n = rotation::effective_budget(budget);
    let q = Quasimorphism::new(*x, *y, g);
    let values = q.series(n)?;
    let floor = cert.seminorm_units_bound() * (1.0 - 1e-3);
    Ok((n / 2..=n).all(|k| values[k].abs() / k as f64 >= floor))
}
