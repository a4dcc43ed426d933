//! The family b = e^{iθ}·a joining an L³ surface (θ = 0) to an E³ surface (θ = π).

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::complex_fn::quadrature::PathSegment;
use crate::complex_fn::HolomorphicExpr;
use crate::error::{Error, Result};
use crate::graphs::{GraphGrid, GraphKind};
use crate::lattice::Lattice;
use crate::minkowski::MinkVector4;
use crate::report::{GateKind, ResidualReport};
use crate::weierstrass::{derivative_vector, surface_point, WeierstrassData};

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct ThetaFamilySpec {
    pub a: HolomorphicExpr,
    pub mu: HolomorphicExpr,
    pub theta: f64,
    pub p0: MinkVector4,
    pub w0: Complex64,
}

impl ThetaFamilySpec {
    pub fn new(a: HolomorphicExpr, mu: HolomorphicExpr, theta: f64, p0: MinkVector4, w0: Complex64) -> Self {
        Self { a, mu, theta, p0, w0 }
    }

    /// The same family member at another angle and anchor.
    pub fn at(&self, theta: f64, p0: MinkVector4) -> Self {
        Self {
            theta,
            p0,
            ..self.clone()
        }
    }

    pub fn data(&self) -> WeierstrassData {
        let rot = HolomorphicExpr::constant(Complex64::from_polar(1.0, self.theta));
        WeierstrassData::new(self.a.clone(), rot * self.a.clone(), self.mu.clone(), self.w0, self.p0)
    }
}

pub fn family_point(spec: &ThetaFamilySpec, w: Complex64, tol: f64) -> Result<MinkVector4> {
    surface_point(&spec.data(), w, tol)
}

/// Linking defects between the members at `theta_x` (playing X) and `theta_y` (playing Y):
/// |Y³_w − X⁰_w|, |Y¹_w + iX²_w|, |Y²_w − iX¹_w|.
pub fn linking_defects(spec: &ThetaFamilySpec, w: Complex64, theta_x: f64, theta_y: f64) -> Result<[f64; 3]> {
    let i = Complex64::i();
    let xw = derivative_vector(&spec.at(theta_x, spec.p0).data(), w)?;
    let yw = derivative_vector(&spec.at(theta_y, spec.p0).data(), w)?;
    Ok([
        (yw[3] - xw[0]).norm(),
        (yw[1] + i * xw[2]).norm(),
        (yw[2] - i * xw[1]).norm(),
    ])
}

/// Linking relations between the θ = 0 and θ = π members.
pub fn linking_residual(spec: &ThetaFamilySpec, w: Complex64) -> Result<ResidualReport> {
    linking_residual_pair(spec, w, 0.0, std::f64::consts::PI, 1e-12)
}

pub fn linking_residual_pair(
    spec: &ThetaFamilySpec,
    w: Complex64,
    theta_x: f64,
    theta_y: f64,
    tol: f64,
) -> Result<ResidualReport> {
    let d = linking_defects(spec, w, theta_x, theta_y)?;
    let mut report = ResidualReport::new();
    report.record("linking", [d.iter().sum::<f64>()], tol, GateKind::Hard, None);
    Ok(report)
}

fn jacobian(x_w: Complex64, y_w: Complex64) -> Complex64 {
    x_w * y_w.conj() - x_w.conj() * y_w
}

/// |∂(x, y) − ∂(p, q)| with (x, y) = X¹, X² at θ = 0 and (p, q) = Y¹, Y² at θ = π.
pub fn jacobian_equality_residual(spec: &ThetaFamilySpec, w: Complex64) -> Result<f64> {
    let xw = derivative_vector(&spec.at(0.0, spec.p0).data(), w)?;
    let yw = derivative_vector(&spec.at(std::f64::consts::PI, spec.p0).data(), w)?;
    Ok((jacobian(xw[1], xw[2]) - jacobian(yw[1], yw[2])).norm())
}

/// Lattices and Newton seeds for resampling the endpoint surfaces as graphs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransportParams {
    /// (x, y) lattice of the L³ graph at θ = 0.
    pub xy: Lattice,
    /// (p, q) lattice of the E³ graph at θ = π.
    pub pq: Lattice,
    /// Parameter near the preimage of the first (x, y) node.
    #[serde(skip)]
    pub seed_xy: Complex64,
    #[serde(skip)]
    pub seed_pq: Complex64,
    pub tol: f64,
}

/// Tracks a point of the surface, advancing by short integrals from the previous one.
struct Walker<'a> {
    data: &'a WeierstrassData,
    w: Complex64,
    f: MinkVector4,
    tol: f64,
}

impl Walker<'_> {
    fn moved(&self, w: Complex64) -> Result<MinkVector4> {
        let d = self.data.segment_integral(PathSegment::new(self.w, w), 0.5 * self.tol)?;
        Ok(self.f + 2.0 * d.re())
    }

    fn jacobian(&self, w: Complex64) -> Result<[[f64; 2]; 2]> {
        let fw = derivative_vector(self.data, w)?;
        let (fu, fv) = (2.0 * fw.re(), -2.0 * fw.im());
        Ok([[fu[1], fv[1]], [fu[2], fv[2]]])
    }

    /// Newton iteration for the parameter with (f¹, f²) = target, returning |det| and sign.
    fn solve(&mut self, target: [f64; 2], sign: Option<f64>) -> Result<f64> {
        let fold = |reason: String| Error::FoldDetected { x: target[0], y: target[1], reason };
        let scale = 1.0 + target[0].abs().max(target[1].abs());
        let (mut w, mut f) = (self.w, self.f);
        for _ in 0..NEWTON_MAX_ITER {
            let j = self.jacobian(w)?;
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let jscale = j.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
            if det.abs() <= 1e-10 * jscale * jscale {
                return Err(fold(format!("Jacobian vanishes at w = {w}")));
            }
            if let Some(s) = sign {
                if det.signum() != s {
                    return Err(fold(format!("Jacobian changes sign at w = {w}")));
                }
            }
            let (rx, ry) = (target[0] - f[1], target[1] - f[2]);
            if rx.abs().max(ry.abs()) <= NEWTON_TOL * scale {
                self.w = w;
                self.f = f;
                return Ok(det);
            }
            let du = (j[1][1] * rx - j[0][1] * ry) / det;
            let dv = (j[0][0] * ry - j[1][0] * rx) / det;
            w += Complex64::new(du, dv);
            f = self.moved(w)?;
            // Keep later steps short: integrate from the latest iterate.
            self.w = w;
            self.f = f;
        }
        Err(fold(format!("Newton iteration did not converge in {NEWTON_MAX_ITER} steps")))
    }
}

/// Heights (f⁰, f³) over a lattice of the (f¹, f²) plane.
pub fn resample_as_graph(data: &WeierstrassData, lattice: Lattice, seed: Complex64, tol: f64) -> Result<GraphGrid> {
    let mut walker = Walker {
        data,
        w: seed,
        f: surface_point(data, seed, tol)?,
        tol,
    };
    let shape = (lattice.nx, lattice.ny);
    let mut a = Array2::zeros(shape);
    let mut b = Array2::zeros(shape);
    let mut sign = None;
    let mut row_start = None;
    for i in 0..lattice.nx {
        // Each row restarts from the first node of the previous row.
        if let Some((w, f)) = row_start {
            walker.w = w;
            walker.f = f;
        }
        for j in 0..lattice.ny {
            let det = walker.solve([lattice.x(i), lattice.y(j)], sign)?;
            sign.get_or_insert(det.signum());
            if j == 0 {
                row_start = Some((walker.w, walker.f));
            }
            a[[i, j]] = walker.f[0];
            b[[i, j]] = walker.f[3];
        }
    }
    GraphGrid::from_heights(GraphKind::FirstType, lattice, a, b)
}

/// Graph (A, x, y, ·) of the θ = 0 member and (·, p, q, B) of the θ = π member.
pub fn transported_graphs(
    spec: &ThetaFamilySpec,
    p0_l3: MinkVector4,
    p0_e3: MinkVector4,
    params: &TransportParams,
) -> Result<(GraphGrid, GraphGrid)> {
    let l3 = spec.at(0.0, p0_l3).data();
    let e3 = spec.at(std::f64::consts::PI, p0_e3).data();
    Ok((
        resample_as_graph(&l3, params.xy, params.seed_xy, params.tol)?,
        resample_as_graph(&e3, params.pq, params.seed_pq, params.tol)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex_fn::parse_expr;
    use crate::fixtures;
    use crate::lattice::Rect;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn catenoid_pair_spec() -> ThetaFamilySpec {
        ThetaFamilySpec::new(
            parse_expr("exp(w)").unwrap(),
            parse_expr("exp(-w)/4").unwrap(),
            0.0,
            MinkVector4::ZERO,
            c(0.0, 0.0),
        )
    }

    #[test]
    fn endpoints_reproduce_closed_forms() {
        let s = catenoid_pair_spec();
        let e3 = s.at(PI, MinkVector4::new(0.0, -1.0, 0.0, 0.0));
        for &(u, v) in &[(0.3, 0.2), (1.4, -1.0), (-0.6, 2.9)] {
            let x = family_point(&s, c(u, v), 1e-10).unwrap();
            assert!((x - fixtures::catenoid_pair_l3(u, v)).max_abs() < 1e-10);
            let y = family_point(&e3, c(u, v), 1e-10).unwrap();
            assert!((y - fixtures::catenoid_pair_e3(u, v)).max_abs() < 1e-10);
        }
    }

    #[test]
    fn constant_a_gives_planes() {
        let s = ThetaFamilySpec::new(parse_expr("0.5*i").unwrap(), parse_expr("1").unwrap(), 0.0, MinkVector4::ZERO, c(0.0, 0.0));
        for theta in [0.0, 1.0, PI] {
            let d = s.at(theta, MinkVector4::ZERO).data();
            let fw = derivative_vector(&d, c(0.0, 0.0)).unwrap();
            for w in [c(0.4, -0.3), c(-1.0, 2.0)] {
                // f is real-linear in w with constant tangent vector.
                let f = surface_point(&d, w, 1e-12).unwrap();
                assert!((f - 2.0 * fw.scale(w).re()).max_abs() < 1e-12);
            }
        }
        assert!(linking_residual(&s, c(0.3, 0.3)).unwrap().entries[0].max_abs < 1e-15);
        assert!(jacobian_equality_residual(&s, c(0.3, 0.3)).unwrap() < 1e-15);
    }

    #[test]
    fn linking_and_jacobian_identities() {
        let s = catenoid_pair_spec();
        for w in [c(0.2, 0.9), c(-1.1, 0.4), c(1.7, -2.2)] {
            assert!(linking_residual(&s, w).unwrap().all_pass());
            assert!(jacobian_equality_residual(&s, w).unwrap() <= 1e-12);
        }
        let generic = ThetaFamilySpec::new(parse_expr("w^2 + 1").unwrap(), parse_expr("1").unwrap(), 0.0, MinkVector4::ZERO, c(0.0, 0.0));
        assert!(jacobian_equality_residual(&generic, c(1.0, 1.0)).unwrap() <= 1e-12);
        let mismatched = linking_residual_pair(&s, c(0.5, 0.5), 0.0, PI / 2.0, 1e-12).unwrap();
        assert!(mismatched.entries[0].max_abs > 0.1 && !mismatched.all_pass());
    }

    fn params(xy: Rect, pq: Rect, n: usize) -> TransportParams {
        let corner_xy = c(xy.x0.hypot(xy.y0).asinh(), xy.y0.atan2(xy.x0));
        let corner_pq = c(pq.x0.hypot(pq.y0).acosh(), (-pq.y0).atan2(-pq.x0));
        TransportParams {
            xy: Lattice::new(xy, n, n).unwrap(),
            pq: Lattice::new(pq, n, n).unwrap(),
            seed_xy: corner_xy + c(0.05, -0.05),
            seed_pq: corner_pq + c(-0.05, 0.05),
            tol: 1e-12,
        }
    }

    #[test]
    fn transported_graphs_match_catenoids() {
        let p = params(Rect::new(0.5, 1.5, -0.5, 0.5), Rect::new(-2.0, -1.2, -0.4, 0.4), 11);
        let (l3, e3) = transported_graphs(&catenoid_pair_spec(), MinkVector4::ZERO, MinkVector4::new(0.0, -1.0, 0.0, 0.0), &p).unwrap();
        for (i, j) in p.xy.nodes() {
            let exact = fixtures::l3_catenoid_graph(p.xy.x(i), p.xy.y(j));
            assert!((l3.a[[i, j]] - exact).abs() <= 1e-6);
            assert!(l3.b[[i, j]].abs() <= 1e-9);
        }
        for (i, j) in p.pq.nodes() {
            let exact = fixtures::catenoid_graph(p.pq.x(i), p.pq.y(j));
            assert!((e3.b[[i, j]] - exact).abs() <= 1e-6);
            assert!(e3.a[[i, j]].abs() <= 1e-9);
        }
    }

    #[test]
    fn patch_through_the_axis_folds() {
        let mut p = params(Rect::new(0.5, 1.5, -0.5, 0.5), Rect::new(-2.0, -1.2, -0.4, 0.4), 11);
        p.xy = Lattice::new(Rect::new(-0.5, 0.5, -0.5, 0.5), 11, 11).unwrap();
        p.seed_xy = c(0.6, -2.3);
        let l3 = catenoid_pair_spec().at(0.0, MinkVector4::ZERO).data();
        assert!(matches!(
            resample_as_graph(&l3, p.xy, p.seed_xy, p.tol),
            Err(Error::FoldDetected { .. })
        ));
    }

    mod props {
        use super::*;
        use crate::minkowski::{complex_bilinear, lorentz_product};
        use crate::weierstrass::metric_lambda2;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn every_member_is_conformal_and_harmonic(theta in 0.0..PI, u in -1.0..1.0f64, v in -3.0..3.0f64) {
                let s = catenoid_pair_spec().at(theta, MinkVector4::ZERO);
                let d = s.data();
                let w = c(u, v);
                let fw = derivative_vector(&d, w).unwrap();
                prop_assert!(complex_bilinear(&fw, &fw).norm() <= 1e-12 * (1.0 + fw.norm()).powi(2));
                let (fx, fy) = (2.0 * fw.re(), -2.0 * fw.im());
                let l2 = metric_lambda2(&d, w).unwrap();
                prop_assert!((lorentz_product(&fx, &fx) - l2).abs() <= 1e-10 * l2.max(1.0));
                prop_assert!(lorentz_product(&fx, &fy).abs() <= 1e-10 * l2.max(1.0));
                let h = 1e-3;
                let pt = |z: Complex64| family_point(&s, z, 1e-13).unwrap();
                let lap = pt(w + h) + pt(w - h) + pt(w + c(0.0, h)) + pt(w - c(0.0, h)) - 4.0 * pt(w);
                prop_assert!(lap.max_abs() / (h * h) <= 1e-4);
            }
        }
    }
}
