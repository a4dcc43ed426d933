//! Reference surfaces with known closed forms.

use num_complex::Complex64;

use std::sync::Arc;

use crate::complex_fn::HolomorphicExpr;
use crate::conjugate::{FnField, ParametricGrid};
use crate::error::Result;
use crate::lattice::Lattice;
use crate::minkowski::MinkVector4;
use crate::weierstrass::WeierstrassData;

fn exp_w() -> HolomorphicExpr {
    HolomorphicExpr::call(crate::complex_fn::Func::Exp, HolomorphicExpr::var())
}

fn cst(re: f64, im: f64) -> HolomorphicExpr {
    HolomorphicExpr::constant(Complex64::new(re, im))
}

/// a = e^w, b = 2e^{−w}, μ = 1, anchored at X0 = 2(−1, 0, 0, 3).
pub fn exp_graph() -> WeierstrassData {
    WeierstrassData::new(
        exp_w(),
        cst(2.0, 0.0) / exp_w(),
        cst(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        MinkVector4::new(-2.0, 0.0, 0.0, 6.0),
    )
}

pub fn exp_graph_closed_form(u: f64, v: f64) -> MinkVector4 {
    let (p, m) = (u.exp(), (-u).exp());
    2.0 * MinkVector4::new((p - 2.0 * m) * v.cos(), 3.0 * u, v, (p + 2.0 * m) * v.cos())
}

/// The exp graph surface as the graph (A, x, y, B) over x = 6u, y = 2v.
pub fn exp_graph_heights(x: f64, y: f64) -> (f64, f64) {
    let (p, m) = ((x / 6.0).exp(), (-x / 6.0).exp());
    let c = (y / 2.0).cos();
    (2.0 * (p - 2.0 * m) * c, 2.0 * (p + 2.0 * m) * c)
}

/// a = e^w, b = e^{iθ} e^w, μ = e^{−w}/4, anchored at the origin.
pub fn theta_data(theta: f64) -> WeierstrassData {
    let rot = Complex64::from_polar(1.0, theta);
    WeierstrassData::new(
        exp_w(),
        HolomorphicExpr::constant(rot) * exp_w(),
        cst(0.25, 0.0) / exp_w(),
        Complex64::new(0.0, 0.0),
        MinkVector4::ZERO,
    )
}

/// The θ = 0 member, whose tangent is ½(1, cosh w, −i sinh w, 0).
pub fn catenoid_pair() -> WeierstrassData {
    theta_data(0.0)
}

/// (u, sinh u cos v, sinh u sin v, 0).
pub fn catenoid_pair_l3(u: f64, v: f64) -> MinkVector4 {
    MinkVector4::new(u, u.sinh() * v.cos(), u.sinh() * v.sin(), 0.0)
}

/// (0, −cosh u cos v, −cosh u sin v, u).
pub fn catenoid_pair_e3(u: f64, v: f64) -> MinkVector4 {
    MinkVector4::new(0.0, -u.cosh() * v.cos(), -u.cosh() * v.sin(), u)
}

/// Weierstrass data of (sin u cosh v, sin u sinh v, u, 0):
/// a = b = i cos w / (1 + sin w), μ = −(i/4)(1 + sin w).
pub fn example_lightlike_weierstrass() -> WeierstrassData {
    use crate::complex_fn::Func;
    let w = HolomorphicExpr::var;
    let one_plus_sin = cst(1.0, 0.0) + HolomorphicExpr::call(Func::Sin, w());
    let a = cst(0.0, 1.0) * HolomorphicExpr::call(Func::Cos, w()) / one_plus_sin.clone();
    WeierstrassData::new(
        a.clone(),
        a,
        cst(0.0, -0.25) * one_plus_sin,
        Complex64::new(0.0, 0.0),
        MinkVector4::ZERO,
    )
}

/// Catenoid of ℝ³ as the graph B(p, q) = arccosh r over the (p, q) plane, r > 1.
pub fn catenoid_graph(p: f64, q: f64) -> f64 {
    p.hypot(q).acosh()
}

/// Spacelike catenoid of ℝ³₁ as the graph A(x, y) = arcsinh r.
pub fn l3_catenoid_graph(x: f64, y: f64) -> f64 {
    x.hypot(y).asinh()
}

/// Helicoid X(x, y) = (0, x cos y, x sin y, y).
pub fn helicoid(x: f64, y: f64) -> MinkVector4 {
    MinkVector4::new(0.0, x * y.cos(), x * y.sin(), y)
}

pub fn helicoid_tangents(x: f64, y: f64) -> (MinkVector4, MinkVector4) {
    (
        MinkVector4::new(0.0, y.cos(), y.sin(), 0.0),
        MinkVector4::new(0.0, -x * y.sin(), x * y.cos(), 1.0),
    )
}

pub fn helicoid_grid(lattice: Lattice) -> Result<ParametricGrid> {
    ParametricGrid::from_analytic(lattice, helicoid, Arc::new(FnField(helicoid_tangents)))
}

/// Conjugate of the helicoid anchored at (0, 0, 1, 0):
/// (0, −√(1+x²) sin y, √(1+x²) cos y, arcsinh x).
pub fn catenoid_conjugate(x: f64, y: f64) -> MinkVector4 {
    let r = (1.0 + x * x).sqrt();
    MinkVector4::new(0.0, -r * y.sin(), r * y.cos(), x.asinh())
}

/// k(sin u cosh v, sin u sinh v, u, 0), obtained from the profile ODE
/// (k² − x²)(f′)² = k² with x = k sin u.
pub fn lightlike_example(k: f64, u: f64, v: f64) -> MinkVector4 {
    k * MinkVector4::new(u.sin() * v.cosh(), u.sin() * v.sinh(), u, 0.0)
}

pub fn lightlike_example_grid(lattice: Lattice, k: f64) -> Result<ParametricGrid> {
    let field = FnField(move |u: f64, v: f64| {
        (
            k * MinkVector4::new(u.cos() * v.cosh(), u.cos() * v.sinh(), 1.0, 0.0),
            k * MinkVector4::new(u.sin() * v.sinh(), u.sin() * v.cosh(), 0.0, 0.0),
        )
    });
    ParametricGrid::from_analytic(lattice, move |u, v| lightlike_example(k, u, v), Arc::new(field))
}

/// Graph profile x ↦ b + k·arcsin(x/k) of the ODE above, |x| < k.
pub fn lightlike_profile(k: f64, b: f64, x: f64) -> f64 {
    b + k * (x / k).asin()
}

/// k(cos u cosh v, cos u sinh v, v, 0).
pub fn hyperbolic_helicoid_grid(lattice: Lattice, k: f64) -> Result<ParametricGrid> {
    let field = FnField(move |u: f64, v: f64| {
        (
            k * MinkVector4::new(-u.sin() * v.cosh(), -u.sin() * v.sinh(), 0.0, 0.0),
            k * MinkVector4::new(u.cos() * v.sinh(), u.cos() * v.cosh(), 1.0, 0.0),
        )
    });
    let pos = move |u: f64, v: f64| k * MinkVector4::new(u.cos() * v.cosh(), u.cos() * v.sinh(), v, 0.0);
    ParametricGrid::from_analytic(lattice, pos, Arc::new(field))
}

/// The E³ catenoid graph (0, p, q, arccosh r) with exact tangents.
pub fn catenoid_graph_grid(lattice: Lattice) -> Result<ParametricGrid> {
    let field = FnField(|p: f64, q: f64| {
        let r2 = p * p + q * q;
        let s = 1.0 / (r2 * (r2 - 1.0)).sqrt();
        (MinkVector4::new(0.0, 1.0, 0.0, p * s), MinkVector4::new(0.0, 0.0, 1.0, q * s))
    });
    let pos = |p: f64, q: f64| MinkVector4::new(0.0, p, q, catenoid_graph(p, q));
    ParametricGrid::from_analytic(lattice, pos, Arc::new(field))
}

/// First-type graph (A, x, y, B) of closed-form heights with exact gradients.
pub fn first_type_graph_grid<F>(lattice: Lattice, heights: F) -> Result<ParametricGrid>
where
    F: Fn(f64, f64) -> GraphJet + Send + Sync + 'static,
{
    let heights = Arc::new(heights);
    let h = heights.clone();
    let field = FnField(move |x: f64, y: f64| {
        let j = h(x, y);
        (MinkVector4::new(j.a_x, 1.0, 0.0, j.b_x), MinkVector4::new(j.a_y, 0.0, 1.0, j.b_y))
    });
    let pos = move |x: f64, y: f64| {
        let j = heights(x, y);
        MinkVector4::new(j.a, x, y, j.b)
    };
    ParametricGrid::from_analytic(lattice, pos, Arc::new(field))
}

/// Heights and gradients of a first-type graph at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GraphJet {
    pub a: f64,
    pub a_x: f64,
    pub a_y: f64,
    pub b: f64,
    pub b_x: f64,
    pub b_y: f64,
}

/// The non-minimal control A = x² + y², B = 0.
pub fn paraboloid(x: f64, y: f64) -> GraphJet {
    GraphJet {
        a: x * x + y * y,
        a_x: 2.0 * x,
        a_y: 2.0 * y,
        ..GraphJet::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_graph_chart_matches_graph() {
        let (u, v) = (0.3, -0.8);
        let p = exp_graph_closed_form(u, v);
        let (a, b) = exp_graph_heights(6.0 * u, 2.0 * v);
        assert!((p[0] - a).abs() < 1e-14 && (p[3] - b).abs() < 1e-14);
        assert_eq!((p[1], p[2]), (6.0 * u, 2.0 * v));
    }

    #[test]
    fn lightlike_data_tangent() {
        let d = example_lightlike_weierstrass();
        let w = Complex64::new(0.9, -0.4);
        let fw = crate::weierstrass::derivative_vector(&d, w).unwrap();
        let expected = [0.5 * w.cos(), Complex64::new(0.0, -0.5) * w.sin(), Complex64::new(0.5, 0.0)];
        for k in 0..3 {
            assert!((fw[k] - expected[k]).norm() < 1e-14);
        }
        assert!(fw[3].norm() < 1e-15);
    }
}
