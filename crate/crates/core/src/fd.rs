//! Finite-difference stencils on lattice arrays indexed `[i, j]` with `i` along x.

use std::ops::{Add, Sub};

use ndarray::Array2;

use crate::minkowski::MinkVector4;

pub trait FdValue: Copy + Add<Output = Self> + Sub<Output = Self> {
    fn scale(self, s: f64) -> Self;
}

impl FdValue for f64 {
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl FdValue for MinkVector4 {
    fn scale(self, s: f64) -> Self {
        s * self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

fn at<T: FdValue>(a: &Array2<T>, i: usize, j: usize, axis: Axis, offset: isize) -> T {
    match axis {
        Axis::X => a[[(i as isize + offset) as usize, j]],
        Axis::Y => a[[i, (j as isize + offset) as usize]],
    }
}

fn extent<T>(a: &Array2<T>, i: usize, j: usize, axis: Axis) -> (usize, usize) {
    match axis {
        Axis::X => (i, a.nrows()),
        Axis::Y => (j, a.ncols()),
    }
}

/// Second-order first derivative: central inside, one-sided on the boundary.
pub fn d1<T: FdValue>(a: &Array2<T>, i: usize, j: usize, h: f64, axis: Axis) -> T {
    let (k, n) = extent(a, i, j, axis);
    let f = |o| at(a, i, j, axis, o);
    if k == 0 {
        (f(1).scale(4.0) - f(0).scale(3.0) - f(2)).scale(0.5 / h)
    } else if k + 1 == n {
        (f(0).scale(3.0) - f(-1).scale(4.0) + f(-2)).scale(0.5 / h)
    } else {
        (f(1) - f(-1)).scale(0.5 / h)
    }
}

/// Fourth-order central first derivative where five points fit, else [`d1`].
pub fn d1_fourth<T: FdValue>(a: &Array2<T>, i: usize, j: usize, h: f64, axis: Axis) -> T {
    let (k, n) = extent(a, i, j, axis);
    if k < 2 || k + 2 >= n {
        return d1(a, i, j, h, axis);
    }
    let f = |o| at(a, i, j, axis, o);
    ((f(1) - f(-1)).scale(8.0) - (f(2) - f(-2))).scale(1.0 / (12.0 * h))
}

/// Central second derivative along one axis; interior nodes only.
pub fn d2<T: FdValue>(a: &Array2<T>, i: usize, j: usize, h: f64, axis: Axis) -> T {
    let f = |o| at(a, i, j, axis, o);
    (f(1) + f(-1) - f(0).scale(2.0)).scale(1.0 / (h * h))
}

/// Central mixed derivative; interior nodes only.
pub fn dxy<T: FdValue>(a: &Array2<T>, i: usize, j: usize, hx: f64, hy: f64) -> T {
    (a[[i + 1, j + 1]] - a[[i + 1, j - 1]] - a[[i - 1, j + 1]] + a[[i - 1, j - 1]])
        .scale(1.0 / (4.0 * hx * hy))
}

pub fn laplacian<T: FdValue>(a: &Array2<T>, i: usize, j: usize, hx: f64, hy: f64) -> T {
    d2(a, i, j, hx, Axis::X) + d2(a, i, j, hy, Axis::Y)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, h: f64, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
        Array2::from_shape_fn((n, n), |(i, j)| f(i as f64 * h, j as f64 * h))
    }

    #[test]
    fn quadratics_are_exact() {
        let h = 0.1;
        let a = sample(7, h, |x, y| 3.0 * x * x - 2.0 * x * y + y * y + x);
        for i in 0..7 {
            let x = i as f64 * h;
            assert!((d1(&a, i, 3, h, Axis::X) - (6.0 * x - 2.0 * 0.3 + 1.0)).abs() < 1e-12);
        }
        assert!((d2(&a, 3, 3, h, Axis::X) - 6.0).abs() < 1e-10);
        assert!((dxy(&a, 3, 3, h, h) + 2.0).abs() < 1e-10);
        assert!((laplacian(&a, 2, 4, h, h) - 8.0).abs() < 1e-10);
    }

    #[test]
    fn fourth_order_converges_faster() {
        let err = |h: f64| {
            let a = sample(9, h, |x, _| x.sin());
            (d1_fourth(&a, 4, 4, h, Axis::Y) - 0.0).abs() + (d1_fourth(&a, 4, 4, h, Axis::X) - (4.0 * h).cos()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn vector_values() {
        let h = 0.5;
        let a = Array2::from_shape_fn((3, 3), |(i, j)| MinkVector4::new(i as f64, j as f64, 0.0, 1.0));
        assert_eq!(d1(&a, 1, 1, h, Axis::X), MinkVector4::new(2.0, 0.0, 0.0, 0.0));
        assert_eq!(d1(&a, 1, 0, h, Axis::Y), MinkVector4::new(0.0, 2.0, 0.0, 0.0));
    }
}
