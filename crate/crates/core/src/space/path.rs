use super::{Point, Space};
use crate::error::{Error, Result};

/// A polyline in base coordinates. Each segment runs directly between its
/// endpoints' unit coordinates and then makes `winding[i]` extra full turns
/// around circle factor `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    vertices: Vec<Point>,
    windings: Vec<[i64; 2]>,
}

impl Path {
    pub fn new(vertices: Vec<Point>, windings: Vec<[i64; 2]>) -> Result<Path> {
        if vertices.is_empty() {
            return Err(Error::Domain("path without vertices".into()));
        }
        if windings.len() + 1 != vertices.len() {
            return Err(Error::Domain(format!(
                "path with {} vertices needs {} windings, got {}",
                vertices.len(),
                vertices.len() - 1,
                windings.len()
            )));
        }
        Ok(Path { vertices, windings })
    }

    /// Polyline with zero extra windings.
    pub fn straight(vertices: Vec<Point>) -> Result<Path> {
        let n = vertices.len().saturating_sub(1);
        Path::new(vertices, vec![[0, 0]; n])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn windings(&self) -> &[[i64; 2]] {
        &self.windings
    }

    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.start() == self.end()
    }

    pub fn then(&self, other: &Path) -> Result<Path> {
        if self.end() != other.start() {
            return Err(Error::Domain("concatenated paths do not meet".into()));
        }
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices[1..]);
        let mut windings = self.windings.clone();
        windings.extend_from_slice(&other.windings);
        Ok(Path { vertices, windings })
    }

    pub fn reversed(&self) -> Path {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        let windings = self.windings.iter().rev().map(|w| [-w[0], -w[1]]).collect();
        Path { vertices, windings }
    }

    pub fn check(&self, space: &Space) -> Result<()> {
        for v in &self.vertices {
            space.check_point(v)?;
        }
        if !space.kind().second_is_circle() && self.windings.iter().any(|w| w[1] != 0) {
            return Err(Error::Domain(format!(
                "winding around a non-circle factor of {}",
                space.kind()
            )));
        }
        Ok(())
    }

    /// Total unwrapped increment of each circle factor's unit coordinate.
    pub fn angular_increment(&self, space: &Space) -> Result<[f64; 2]> {
        self.check(space)?;
        let mut total = [0.0, 0.0];
        for (seg, w) in self.vertices.windows(2).zip(&self.windings) {
            let a = space.angles(&seg[0]);
            let b = space.angles(&seg[1]);
            for i in 0..2 {
                total[i] += b[i] - a[i] + w[i] as f64;
            }
        }
        Ok(total)
    }

    /// Integral of the built-in cocycle `Σ aᵢ dθᵢ` along the path.
    pub fn canonical_integral(&self, space: &Space) -> Result<f64> {
        Ok(space.pair(self.angular_increment(space)?))
    }

    /// Sheet reached by lifting the path from `start_sheet` in the cover.
    pub fn lift_end_sheet(&self, space: &Space, start_sheet: f64) -> Result<f64> {
        let canon = self.canonical_integral(space)?;
        Ok(start_sheet + canon - space.phi(&self.end()) + space.phi(&self.start()))
    }

    /// Length in unit coordinates (ℓ¹ per segment, windings included).
    pub fn unit_length(&self, space: &Space) -> f64 {
        let mut total = 0.0;
        for (seg, w) in self.vertices.windows(2).zip(&self.windings) {
            let a = space.angles(&seg[0]);
            let b = space.angles(&seg[1]);
            total += (b[0] - a[0] + w[0] as f64).abs();
            if space.kind().second_is_circle() {
                total += (b[1] - a[1] + w[1] as f64).abs();
            } else {
                total += (seg[1].t - seg[0].t).abs();
            }
        }
        total
    }
}
