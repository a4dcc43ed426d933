//! Holomorphic expressions in one complex variable `w`.

mod expr;
mod parse;
pub mod quadrature;

pub use expr::{Func, HolomorphicExpr, DIV_GUARD};
pub use parse::parse_expr;
pub use quadrature::{polyline, PathSegment, DEFAULT_MAX_DEPTH, DEFAULT_TOL};

use num_complex::Complex64;

use crate::error::Result;

/// `∫ f(ξ) dξ` along the polyline `path`.
pub fn path_integral(f: &HolomorphicExpr, path: &[PathSegment], tol: f64) -> Result<Complex64> {
    let g = |z: Complex64| Ok([f.eval(z)?]);
    Ok(quadrature::integrate_path(&g, path, tol)?[0])
}
