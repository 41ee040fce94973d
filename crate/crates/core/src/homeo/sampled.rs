//! Maps stored as lift values on a grid with bilinear interpolation.

use super::{Homeo, Step};
use crate::error::{Error, Result};
use crate::space::{wrap_unit, Point, Space, SpaceKind};

/// Lift data on a `m × m'` grid in unit coordinates: the unwrapped shift of
/// the first angle and, depending on the space, the shift of the second
/// angle (torus) or the image radius (annulus).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledMap {
    kind: SpaceKind,
    m: usize,
    rows: usize,
    shift: Vec<f64>,
    second: Vec<f64>,
    /// Lipschitz constants of the interpolated `shift` and `second` fields.
    lipschitz: [f64; 2],
}

impl SampledMap {
    pub fn from_homeo(g: &Homeo, resolution: usize) -> Result<SampledMap> {
        let kind = g.space().kind();
        if resolution < 2 {
            return Err(Error::Domain(
                "sampling resolution must be at least 2".into(),
            ));
        }
        let rows = match kind {
            SpaceKind::Circle => 1,
            SpaceKind::Annulus => resolution + 1,
            SpaceKind::Torus2 => resolution,
            SpaceKind::CircleTimesCompactifiedLine => {
                return Err(Error::UnsupportedFlavor(
                    "sampled maps are not available on the compactified-line torus".into(),
                ))
            }
        };
        let m = resolution;
        let mesh = 1.0 / m as f64;
        let mut shift = Vec::with_capacity(m * rows);
        let mut second = Vec::with_capacity(m * rows);
        for i in 0..m {
            for j in 0..rows {
                let p = g.space().from_units(i as f64 * mesh, j as f64 * mesh);
                let st = g.step(&p)?;
                shift.push(st.shift[0]);
                second.push(match kind {
                    SpaceKind::Annulus => st.image.t,
                    _ => st.shift[1],
                });
            }
        }
        let mut out = SampledMap {
            kind,
            m,
            rows,
            shift,
            second,
            lipschitz: [0.0, 0.0],
        };
        out.lipschitz = [
            out.field_lipschitz(&out.shift),
            out.field_lipschitz(&out.second),
        ];
        Ok(out)
    }

    fn at(&self, field: &[f64], i: usize, j: usize) -> f64 {
        field[(i % self.m) * self.rows + j]
    }

    /// Sum over axes of the largest neighbour difference per unit length;
    /// bounds the ℓ¹ Lipschitz constant of the bilinear interpolant.
    fn field_lipschitz(&self, field: &[f64]) -> f64 {
        let m = self.m as f64;
        let mut along = 0.0f64;
        let mut across = 0.0f64;
        for i in 0..self.m {
            for j in 0..self.rows {
                along = along.max((self.at(field, i + 1, j) - self.at(field, i, j)).abs() * m);
                let next = match self.kind {
                    SpaceKind::Circle => continue,
                    SpaceKind::Annulus if j + 1 == self.rows => continue,
                    SpaceKind::Torus2 => (j + 1) % self.rows,
                    _ => j + 1,
                };
                across = across.max((self.at(field, i, next) - self.at(field, i, j)).abs() * m);
            }
        }
        along + across
    }

    fn interpolate(&self, field: &[f64], u: f64, v: f64) -> f64 {
        let m = self.m as f64;
        let x = u * m;
        let i0 = (x.floor() as usize).min(self.m - 1);
        let fx = x - i0 as f64;
        if self.rows == 1 {
            return (1.0 - fx) * self.at(field, i0, 0) + fx * self.at(field, i0 + 1, 0);
        }
        let y = v * m;
        let (j0, j1, fy) = match self.kind {
            SpaceKind::Annulus => {
                let j0 = (y.floor() as usize).min(self.rows - 2);
                (j0, j0 + 1, y - j0 as f64)
            }
            _ => {
                let j0 = (y.floor() as usize).min(self.rows - 1);
                (j0, (j0 + 1) % self.rows, y - j0 as f64)
            }
        };
        let a = (1.0 - fx) * self.at(field, i0, j0) + fx * self.at(field, i0 + 1, j0);
        let b = (1.0 - fx) * self.at(field, i0, j1) + fx * self.at(field, i0 + 1, j1);
        (1.0 - fy) * a + fy * b
    }

    pub fn resolution(&self) -> usize {
        self.m
    }

    pub fn step(&self, p: &Point) -> Step {
        let d = self.interpolate(&self.shift, p.s, p.t);
        match self.kind {
            SpaceKind::Circle => Step {
                image: Point::circle(wrap_unit(p.s + d)),
                shift: [d, 0.0],
            },
            SpaceKind::Annulus => {
                let r = self.interpolate(&self.second, p.s, p.t).clamp(0.0, 1.0);
                Step {
                    image: Point::new(wrap_unit(p.s + d), r),
                    shift: [d, 0.0],
                }
            }
            _ => {
                let e = self.interpolate(&self.second, p.s, p.t);
                Step {
                    image: Point::new(wrap_unit(p.s + d), wrap_unit(p.t + e)),
                    shift: [d, e],
                }
            }
        }
    }

    /// Lipschitz constant of `K` for the given class.
    pub fn k_lipschitz(&self, space: &Space) -> f64 {
        let [a, b] = space.pairing2();
        let second = if self.kind == SpaceKind::Torus2 {
            b.abs() * self.lipschitz[1]
        } else {
            0.0
        };
        a.abs() * self.lipschitz[0] + second
    }
}
