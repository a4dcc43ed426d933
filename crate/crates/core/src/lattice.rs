//! Uniform rectangular lattices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn square(half: f64) -> Self {
        Self::new(-half, half, -half, half)
    }
}

/// `nx × ny` nodes spanning a rectangle, first index along x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl Lattice {
    pub fn new(rect: Rect, nx: usize, ny: usize) -> Result<Self> {
        Self::with_min(rect, nx, ny, 3)
    }

    pub fn with_min(rect: Rect, nx: usize, ny: usize, min: usize) -> Result<Self> {
        if nx < min || ny < min {
            return Err(Error::TooSmallGrid { nx, ny, min });
        }
        let finite = [rect.x0, rect.x1, rect.y0, rect.y1].iter().all(|v| v.is_finite());
        if !finite || rect.x1 < rect.x0 || rect.y1 < rect.y0 {
            return Err(Error::InvalidArgument(format!("bad rectangle {rect:?}")));
        }
        Ok(Self { rect, nx, ny })
    }

    /// Lattice with spacing `h` on both axes, the rectangle rounded to whole steps.
    pub fn with_spacing(x0: f64, y0: f64, h: f64, nx: usize, ny: usize) -> Result<Self> {
        let rect = Rect::new(x0, x0 + h * (nx - 1) as f64, y0, y0 + h * (ny - 1) as f64);
        Self::new(rect, nx, ny)
    }

    pub fn hx(&self) -> f64 {
        (self.rect.x1 - self.rect.x0) / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        (self.rect.y1 - self.rect.y0) / (self.ny - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.rect.x0 + self.hx() * i as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        self.rect.y0 + self.hy() * j as f64
    }

    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && i + 1 < self.nx && j + 1 < self.ny
    }

    pub fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.nx - 1).flat_map(move |i| (1..self.ny - 1).map(move |j| (i, j)))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nx).flat_map(move |i| (0..self.ny).map(move |j| (i, j)))
    }

    /// Index of the node nearest to `x` on the first axis.
    pub fn nearest_i(&self, x: f64) -> usize {
        let t = ((x - self.rect.x0) / self.hx()).round();
        t.clamp(0.0, (self.nx - 1) as f64) as usize
    }

    pub fn nearest_j(&self, y: f64) -> usize {
        let t = ((y - self.rect.y0) / self.hy()).round();
        t.clamp(0.0, (self.ny - 1) as f64) as usize
    }

    /// Same rectangle with the spacing halved.
    pub fn refined(&self) -> Self {
        Self {
            rect: self.rect,
            nx: 2 * self.nx - 1,
            ny: 2 * self.ny - 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_and_spacing() {
        let l = Lattice::new(Rect::square(1.0), 41, 21).unwrap();
        assert!((l.hx() - 0.05).abs() < 1e-15);
        assert!((l.hy() - 0.1).abs() < 1e-15);
        assert_eq!(l.x(40), 1.0);
        assert_eq!(l.nearest_i(0.0), 20);
        assert_eq!(l.interior().count(), 39 * 19);
        let r = l.refined();
        assert_eq!((r.nx, r.ny), (81, 41));
        assert_eq!(r.x(2), l.x(1));
    }

    #[test]
    fn rejects_small_or_inverted() {
        assert!(matches!(
            Lattice::new(Rect::square(1.0), 2, 5),
            Err(Error::TooSmallGrid { .. })
        ));
        assert!(Lattice::new(Rect::new(1.0, 0.0, 0.0, 1.0), 3, 3).is_err());
        assert!(Lattice::new(Rect::new(0.0, 0.0, 0.0, 1.0), 3, 3).is_ok());
    }
}
