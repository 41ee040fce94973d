//! The coboundary function `K(g) = F∘g̃ − F`, its seminorm and the group
//! two-cocycle `G_x(g, h) = K(g)(hx) − K(g)(x)`.

use rayon::prelude::*;

use crate::error::Result;
use crate::homeo::Homeo;
use crate::sampling;
use crate::space::{CoverPoint, Point, Potential};

/// `K(g)(x)` for the built-in potential.
pub fn k_eval(g: &Homeo, x: &Point) -> Result<f64> {
    let st = g.step(x)?;
    Ok(g.space().pair(st.shift))
}

/// `K(g)(x) = F(g̃ x̃) − F(x̃)` for an arbitrary potential, with `x̃` on
/// sheet 0.
pub fn k_eval_with(g: &Homeo, potential: &Potential, x: &Point) -> Result<f64> {
    let lifted = CoverPoint::new(*x, 0.0);
    let image = g.lift(&lifted)?;
    Ok(potential.eval(&image) - potential.eval(&lifted))
}

/// `K(gⁿ)(x)`.
pub fn k_power(g: &Homeo, x: &Point, n: i64) -> Result<f64> {
    let st = g.orbit_step(x, n)?;
    Ok(g.space().pair(st.shift))
}

/// `K(g)` as a function on the base, optionally shifted so that it vanishes
/// at a pinned point.
#[derive(Clone, Debug)]
pub struct KFunction {
    g: Homeo,
    pin: Option<(Point, f64)>,
}

impl KFunction {
    pub fn new(g: &Homeo) -> KFunction {
        KFunction {
            g: g.clone(),
            pin: None,
        }
    }

    pub fn pinned(g: &Homeo, at: Point) -> Result<KFunction> {
        let value = k_eval(g, &at)?;
        Ok(KFunction {
            g: g.clone(),
            pin: Some((at, value)),
        })
    }

    pub fn homeo(&self) -> &Homeo {
        &self.g
    }

    pub fn pin(&self) -> Option<Point> {
        self.pin.map(|(p, _)| p)
    }

    pub fn eval(&self, x: &Point) -> Result<f64> {
        let raw = k_eval(&self.g, x)?;
        Ok(match self.pin {
            Some((_, v)) => raw - v,
            None => raw,
        })
    }
}

/// `max |K(gh)(x) − K(g)(hx) − K(h)(x)|` over random points.
pub fn k_identity_residual(g: &Homeo, h: &Homeo, samples: usize, seed: u64) -> Result<f64> {
    let gh = g.compose(h)?;
    let mut rng = sampling::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = g.space().sample_point(&mut rng);
        let hx = h.apply(&x)?;
        let r = k_eval(&gh, &x)? - k_eval(g, &hx)? - k_eval(h, &x)?;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Seminorm {
    /// `max K − min K` over the grid.
    pub value: f64,
    /// `value + 2(L + 1)·mesh` when `K(g)` has a known Lipschitz constant `L`.
    pub certified_upper: Option<f64>,
    pub level: u32,
    pub mesh: f64,
    pub argmin: Point,
    pub argmax: Point,
}

/// Grid approximation of `sup_{x,y} |K(g)(y) − K(g)(x)|` on the dyadic grid
/// of the given level (`2^level` points per circle axis).
pub fn seminorm(g: &Homeo, level: u32) -> Result<Seminorm> {
    let grid = g.space().grid(level);
    let values: Vec<f64> = grid
        .points
        .par_iter()
        .map(|p| k_eval(g, p))
        .collect::<Result<_>>()?;
    let mut lo = 0;
    let mut hi = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[lo] {
            lo = i;
        }
        if *v > values[hi] {
            hi = i;
        }
    }
    let value = values[hi] - values[lo];
    Ok(Seminorm {
        value,
        certified_upper: g.k_lipschitz().map(|l| value + 2.0 * (l + 1.0) * grid.mesh),
        level,
        mesh: grid.mesh,
        argmin: grid.points[lo],
        argmax: grid.points[hi],
    })
}

/// `G_x(g, h) = K(g)(hx) − K(g)(x)`.
pub fn g_cocycle(x: &Point, g: &Homeo, h: &Homeo) -> Result<f64> {
    let hx = h.apply(x)?;
    Ok(k_eval(g, &hx)? - k_eval(g, x)?)
}

/// `G_x(gᵐ, gⁿ)` using closed-form powers when available.
pub fn g_cocycle_powers(x: &Point, g: &Homeo, m: i64, n: i64) -> Result<f64> {
    let gnx = g.orbit_step(x, n)?.image;
    Ok(k_power(g, &gnx, m)? - k_power(g, x, m)?)
}
