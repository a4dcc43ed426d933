//! Lorentzian linear algebra of ℝ⁴₁ with signature (−, +, +, +).

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for orthonormality checks of unit vectors.
pub const FRAME_TOL: f64 = 1e-10;
const POLE_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MinkVector4(pub [f64; 4]);

impl MinkVector4 {
    pub const ZERO: MinkVector4 = MinkVector4([0.0; 4]);

    pub fn new(x0: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Self([x0, x1, x2, x3])
    }

    /// Coordinate vector ∂ₖ.
    pub fn basis(k: usize) -> Self {
        let mut v = [0.0; 4];
        v[k] = 1.0;
        Self(v)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        lorentz_product(self, other)
    }

    /// Euclidean length of the coordinate tuple, used for scales and error norms.
    pub fn euclid_norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn complexify(&self) -> ComplexVector4 {
        ComplexVector4(self.0.map(|x| Complex64::new(x, 0.0)))
    }
}

impl Index<usize> for MinkVector4 {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

impl IndexMut<usize> for MinkVector4 {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.0[k]
    }
}

impl Add for MinkVector4 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl AddAssign for MinkVector4 {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for MinkVector4 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

impl Neg for MinkVector4 {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|x| -x))
    }
}

impl Mul<MinkVector4> for f64 {
    type Output = MinkVector4;
    fn mul(self, v: MinkVector4) -> MinkVector4 {
        MinkVector4(v.0.map(|x| self * x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ComplexVector4(pub [Complex64; 4]);

impl ComplexVector4 {
    pub fn re(&self) -> MinkVector4 {
        MinkVector4(self.0.map(|z| z.re))
    }

    pub fn im(&self) -> MinkVector4 {
        MinkVector4(self.0.map(|z| z.im))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.map(|z| s * z))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.is_finite())
    }

    /// Hermitian Euclidean length of the coordinate tuple.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<usize> for ComplexVector4 {
    type Output = Complex64;
    fn index(&self, k: usize) -> &Complex64 {
        &self.0[k]
    }
}

impl Add for ComplexVector4 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl Sub for ComplexVector4 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] - o.0[k]))
    }
}

pub fn lorentz_product(x: &MinkVector4, y: &MinkVector4) -> f64 {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
}

/// Bilinear (not Hermitian) extension of the Lorentzian product.
pub fn complex_bilinear(x: &ComplexVector4, y: &ComplexVector4) -> Complex64 {
    -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Determinant of the matrix whose rows are the given vectors.
pub fn det4(v: [&MinkVector4; 4]) -> f64 {
    (0..4)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * v[0][k] * det3(minor(&v[1..], k))
        })
        .sum()
}

fn minor(rows: &[&MinkVector4], skip: usize) -> [[f64; 3]; 3] {
    std::array::from_fn(|r| {
        let cols: Vec<usize> = (0..4).filter(|&c| c != skip).collect();
        std::array::from_fn(|c| rows[r][cols[c]])
    })
}

/// Volume form Ω = (−dx⁰) ∧ dx¹ ∧ dx² ∧ dx³.
pub fn volume_form(v0: &MinkVector4, v1: &MinkVector4, v2: &MinkVector4, v3: &MinkVector4) -> f64 {
    -det4([v0, v1, v2, v3])
}

/// The vector `l` with ⟨l, w⟩ = Ω(v1, v2, v3, w) for every `w`.
pub fn triple_product(v1: &MinkVector4, v2: &MinkVector4, v3: &MinkVector4) -> MinkVector4 {
    // det(v1, v2, v3, w) = Σ wᵏ Cₖ with Cₖ the cofactors of the last row.
    let rows = [v1, v2, v3];
    let cofactor = |k: usize| {
        let sign = if (3 + k) % 2 == 0 { 1.0 } else { -1.0 };
        sign * det3(minor(&rows, k))
    };
    MinkVector4([cofactor(0), -cofactor(1), -cofactor(2), -cofactor(3)])
}

/// W(a, b) = (a + b, 1 + ab, i(1 − ab), a − b).
pub fn weierstrass_vector(a: Complex64, b: Complex64) -> ComplexVector4 {
    let i = Complex64::i();
    let ab = a * b;
    ComplexVector4([a + b, 1.0 + ab, i * (1.0 - ab), a - b])
}

/// The null vectors L₀(b), L₃(a) spanning the normal plane of W(a, b).
pub fn lightlike_pair(a: Complex64, b: Complex64) -> (MinkVector4, MinkVector4) {
    let nb = b.norm_sqr();
    let na = a.norm_sqr();
    (
        MinkVector4::new(1.0 + nb, 2.0 * b.re, 2.0 * b.im, 1.0 - nb),
        MinkVector4::new(1.0 + na, 2.0 * a.re, 2.0 * a.im, -1.0 + na),
    )
}

fn check_orthonormal(e1: &MinkVector4, e2: &MinkVector4) -> Result<()> {
    let ok = (e1.dot(e1) - 1.0).abs() <= FRAME_TOL
        && (e2.dot(e2) - 1.0).abs() <= FRAME_TOL
        && e1.dot(e2).abs() <= FRAME_TOL;
    if ok && e1.is_finite() && e2.is_finite() {
        Ok(())
    } else {
        Err(Error::NonOrthonormalInput)
    }
}

/// Future-directed unit timelike vector orthogonal to the spacelike pair.
pub fn timelike_normal(e1: &MinkVector4, e2: &MinkVector4) -> Result<MinkVector4> {
    check_orthonormal(e1, e2)?;
    let t = MinkVector4::basis(0) + e1[0] * *e1 + e2[0] * *e2;
    Ok((1.0 / (1.0 + e1[0] * e1[0] + e2[0] * e2[0]).sqrt()) * t)
}

/// `{l0, e1, e2, l3}` with null `l0`, `l3` normalised to time component 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiRigidFrame {
    pub l0: MinkVector4,
    pub e1: MinkVector4,
    pub e2: MinkVector4,
    pub l3: MinkVector4,
    pub a_of_l3: Complex64,
    pub b_of_l0: Complex64,
}

pub fn semi_rigid_frame(e1: &MinkVector4, e2: &MinkVector4) -> Result<SemiRigidFrame> {
    let tau = timelike_normal(e1, e2)?;
    let mut nu = triple_product(&tau, e1, e2);
    let nn = nu.dot(&nu);
    if !(nn > FRAME_TOL) {
        return Err(Error::DegenerateComplement);
    }
    nu = (1.0 / nn.sqrt()) * nu;
    if det4([&tau, e1, e2, &nu]) < 0.0 {
        nu = -nu;
    }
    let plus = tau + nu;
    let minus = tau - nu;
    let l0 = (1.0 / plus[0]) * plus;
    let l3 = (1.0 / minus[0]) * minus;
    if (1.0 - l3[3]).abs() < POLE_GUARD || (1.0 + l0[3]).abs() < POLE_GUARD {
        return Err(Error::ProjectionPole);
    }
    Ok(SemiRigidFrame {
        l0,
        e1: *e1,
        e2: *e2,
        l3,
        a_of_l3: Complex64::new(l3[1], l3[2]) / (1.0 - l3[3]),
        b_of_l0: Complex64::new(l0[1], l0[2]) / (1.0 + l0[3]),
    })
}

/// Rotates the pair by ϑ inside its own plane.
pub fn rotate_pair(e1: &MinkVector4, e2: &MinkVector4, angle: f64) -> (MinkVector4, MinkVector4) {
    let (s, c) = angle.sin_cos();
    (c * *e1 + s * *e2, (-s) * *e1 + c * *e2)
}

/// Orthonormal basis of the real plane carried by W(a, b).
pub fn tangent_frame(a: Complex64, b: Complex64) -> Result<(MinkVector4, MinkVector4)> {
    let d = (1.0 - a * b.conj()).norm();
    if !(d > POLE_GUARD) {
        return Err(Error::DegenerateMetric { area: d });
    }
    let w = weierstrass_vector(a, b);
    Ok(((1.0 / d) * w.re(), (1.0 / d) * w.im()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(x: &MinkVector4, y: &MinkVector4, tol: f64) -> bool {
        (*x - *y).max_abs() <= tol
    }

    #[test]
    fn lorentz_examples() {
        let d0 = MinkVector4::basis(0);
        assert_eq!(lorentz_product(&d0, &d0), -1.0);
        let n = MinkVector4::new(1.0, 0.0, 0.0, 1.0);
        assert_eq!(lorentz_product(&n, &n), 0.0);
        let x = MinkVector4::new(-1.0, 0.0, 0.0, 3.0);
        let y = MinkVector4::new(3.0, 3.0, 0.0, -1.0);
        assert_eq!(lorentz_product(&x, &y), 0.0);
    }

    #[test]
    fn bilinear_examples() {
        let w = weierstrass_vector(c(1.0, 2.0), c(3.0, -1.0));
        assert!(complex_bilinear(&w, &w).norm() <= 1e-12);
        let w = weierstrass_vector(c(1.0, 0.0), c(2.0, 0.0));
        assert!((complex_bilinear(&w, &w.conj()) - c(2.0, 0.0)).norm() <= 1e-12);
        let t = ComplexVector4([c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(complex_bilinear(&t, &t), c(1.0, 0.0));
    }

    #[test]
    fn weierstrass_vector_examples() {
        let z = c(0.0, 0.0);
        assert_eq!(weierstrass_vector(z, z).0, [z, c(1.0, 0.0), c(0.0, 1.0), z]);
        assert_eq!(
            weierstrass_vector(c(1.0, 0.0), c(2.0, 0.0)).0,
            [c(3.0, 0.0), c(3.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0)]
        );
        let a = c(0.3, -0.8);
        assert_eq!(weierstrass_vector(a, z).0, [a, c(1.0, 0.0), c(0.0, 1.0), a]);
    }

    #[test]
    fn triple_product_of_basis_vectors() {
        let d: Vec<MinkVector4> = (0..4).map(MinkVector4::basis).collect();
        assert_eq!(triple_product(&d[1], &d[2], &d[3]), -d[0]);
        let l = triple_product(&d[0], &d[1], &d[2]);
        assert_eq!(l.dot(&d[3]), volume_form(&d[0], &d[1], &d[2], &d[3]));
        assert_eq!(l.dot(&d[3]), -1.0);
        let v = MinkVector4::new(0.2, 1.0, -3.0, 0.5);
        assert_eq!(triple_product(&v, &v, &d[2]), MinkVector4::ZERO);
    }

    #[test]
    fn lightlike_pair_examples() {
        let (l0, l3) = lightlike_pair(c(0.0, 0.0), c(0.0, 0.0));
        assert_eq!(l0, MinkVector4::new(1.0, 0.0, 0.0, 1.0));
        assert_eq!(l3, MinkVector4::new(1.0, 0.0, 0.0, -1.0));
        let (l0, _) = lightlike_pair(c(0.0, 0.0), c(2.0, 0.0));
        assert_eq!(l0, MinkVector4::new(5.0, 4.0, 0.0, -3.0));
    }

    #[test]
    fn timelike_normal_examples() {
        let d1 = MinkVector4::basis(1);
        let d2 = MinkVector4::basis(2);
        assert_eq!(timelike_normal(&d1, &d2).unwrap(), MinkVector4::basis(0));

        let e1 = MinkVector4::new(1.0, 2f64.sqrt(), 0.0, 0.0);
        let tau = timelike_normal(&e1, &d2).unwrap();
        let expected = (1.0 / 2f64.sqrt()) * (MinkVector4::basis(0) + e1);
        assert!(close(&tau, &expected, 1e-15));
        assert!((tau.dot(&tau) + 1.0).abs() < 1e-14);
        assert!(tau.dot(&e1).abs() < 1e-14);

        assert_eq!(
            timelike_normal(&(2.0 * d1), &d2),
            Err(Error::NonOrthonormalInput)
        );
    }

    #[test]
    fn flat_semi_rigid_frame() {
        let f = semi_rigid_frame(&MinkVector4::basis(1), &MinkVector4::basis(2)).unwrap();
        assert_eq!(f.l0, MinkVector4::new(1.0, 0.0, 0.0, 1.0));
        assert_eq!(f.l3, MinkVector4::new(1.0, 0.0, 0.0, -1.0));
        assert_eq!(f.a_of_l3, c(0.0, 0.0));
        assert_eq!(f.b_of_l0, c(0.0, 0.0));
    }

    #[test]
    fn tangent_frame_examples() {
        let (e1, e2) = tangent_frame(c(0.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!((e1, e2), (MinkVector4::basis(1), MinkVector4::basis(2)));
        let (e1, e2) = tangent_frame(c(1.0, 0.0), c(2.0, 0.0)).unwrap();
        assert!((e1.dot(&e1) - 1.0).abs() < 1e-14);
        assert!((e2.dot(&e2) - 1.0).abs() < 1e-14);
        assert!(e1.dot(&e2).abs() < 1e-14);
        let a = c(0.6, 0.8);
        assert!(matches!(tangent_frame(a, a), Err(Error::DegenerateMetric { .. })));
    }

    fn vec4() -> impl Strategy<Value = MinkVector4> {
        prop::array::uniform4(-3.0..3.0f64).prop_map(MinkVector4)
    }

    fn disc_point() -> impl Strategy<Value = Complex64> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(x, y)| c(x, y))
    }

    /// Data with |1 − a·conj b| bounded away from zero.
    fn regular_ab() -> impl Strategy<Value = (Complex64, Complex64)> {
        (disc_point(), disc_point()).prop_filter("non-degenerate", |(a, b)| (1.0 - a * b.conj()).norm() > 0.05)
    }

    proptest! {
        #[test]
        fn weierstrass_vector_is_null((a, b) in (disc_point(), disc_point())) {
            let w = weierstrass_vector(a, b);
            prop_assert!(complex_bilinear(&w, &w).norm() <= 1e-12 * (1.0 + w.norm().powi(2)));
            let expected = 2.0 * (1.0 - a * b.conj()).norm_sqr();
            prop_assert!((complex_bilinear(&w, &w.conj()) - expected).norm() <= 1e-12 * expected.max(1.0));
        }

        #[test]
        fn triple_product_is_alternating(v1 in vec4(), v2 in vec4(), v3 in vec4(), w in vec4()) {
            let l = triple_product(&v1, &v2, &v3);
            let scale = 1.0 + v1.euclid_norm() * v2.euclid_norm() * v3.euclid_norm();
            for v in [&v1, &v2, &v3] {
                prop_assert!(l.dot(v).abs() <= 1e-12 * scale * (1.0 + v.euclid_norm()));
            }
            prop_assert!((triple_product(&v2, &v1, &v3) + l).max_abs() <= 1e-12 * scale);
            prop_assert!((triple_product(&v1, &v3, &v2) + l).max_abs() <= 1e-12 * scale);
            let omega = volume_form(&v1, &v2, &v3, &w);
            prop_assert!((l.dot(&w) - omega).abs() <= 1e-11 * scale * (1.0 + w.euclid_norm()));
        }

        #[test]
        fn lightlike_pair_is_null_and_future((a, b) in (disc_point(), disc_point())) {
            let (l0, l3) = lightlike_pair(a, b);
            prop_assert!(l0.dot(&l0).abs() <= 1e-12 * l0[0] * l0[0]);
            prop_assert!(l3.dot(&l3).abs() <= 1e-12 * l3[0] * l3[0]);
            prop_assert!(l0[0] >= 1.0 && l3[0] >= 1.0);
        }

        #[test]
        fn semi_rigid_frame_invariants((a, b) in regular_ab(), angle in -3.2..3.2f64) {
            let (e1, e2) = tangent_frame(a, b).unwrap();
            let f = semi_rigid_frame(&e1, &e2).unwrap();
            let tol = 1e-12 * (1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr());
            prop_assert!(f.l0.dot(&f.l0).abs() <= tol && f.l3.dot(&f.l3).abs() <= tol);
            prop_assert!((f.l0[0] - 1.0).abs() <= 1e-12 && (f.l3[0] - 1.0).abs() <= 1e-12);
            for e in [&f.e1, &f.e2] {
                prop_assert!(e.dot(&f.l0).abs() <= tol && e.dot(&f.l3).abs() <= tol);
            }
            // The frame recovers the data that produced the tangent plane.
            prop_assert!((f.a_of_l3 - a).norm() <= 1e-8 * (1.0 + a.norm_sqr()));
            prop_assert!((f.b_of_l0 - b).norm() <= 1e-8 * (1.0 + b.norm_sqr()));
            // Rotating inside the plane leaves the null directions alone.
            let (r1, r2) = rotate_pair(&e1, &e2, angle);
            let g = semi_rigid_frame(&r1, &r2).unwrap();
            prop_assert!(close(&g.l0, &f.l0, 1e-9) && close(&g.l3, &f.l3, 1e-9));
        }

        #[test]
        fn timelike_normal_properties((a, b) in regular_ab()) {
            let (e1, e2) = tangent_frame(a, b).unwrap();
            let tau = timelike_normal(&e1, &e2).unwrap();
            prop_assert!((tau.dot(&tau) + 1.0).abs() <= 1e-9);
            prop_assert!(tau.dot(&e1).abs() <= 1e-9 && tau.dot(&e2).abs() <= 1e-9);
            prop_assert!(tau[0] > 0.0);
        }
    }
}
