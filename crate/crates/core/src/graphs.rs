//! Entire minimal graphs of the first kind (A, x, y, B) and second kind (x, A, B, y).

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex_fn::{HolomorphicExpr, DIV_GUARD};
use crate::error::{Error, Result};
use crate::fd::{d1, d2, dxy, Axis};
use crate::lattice::Lattice;
use crate::metric::MetricData;
use crate::minkowski::MinkVector4;
use crate::report::{GateKind, GridMeta, ResidualReport};
use crate::weierstrass::{classify_point, curvature_from_jet, surface_point, PointClass, WeierstrassData};

pub type Mat2 = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GraphKind {
    /// (A(x, y), x, y, B(x, y)), with b = c/a and μ = 1.
    FirstType,
    /// (x, A(x, y), B(x, y), y), with b = c·a and μ = 1/a.
    SecondType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphSpec {
    pub kind: GraphKind,
    pub a: HolomorphicExpr,
    pub c: Complex64,
    /// (u − u0, v − v0) ↦ (x, y) minus the origin offset.
    pub change: Mat2,
    pub inverse: Mat2,
    data: WeierstrassData,
}

fn mat_vec(m: &Mat2, v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    std::array::from_fn(|r| std::array::from_fn(|c| a[r][0] * b[0][c] + a[r][1] * b[1][c]))
}

fn check_a(a: &HolomorphicExpr) -> Result<()> {
    match a.as_literal() {
        Some(v) if v.norm() < DIV_GUARD => Err(Error::ZeroOfA { w: Complex64::new(0.0, 0.0) }),
        _ => Ok(()),
    }
}

pub fn first_type_spec(a: HolomorphicExpr, c: Complex64) -> Result<GraphSpec> {
    let modulus = c.norm();
    if !c.is_finite() || modulus < 1e-12 || (modulus - 1.0).abs() < 1e-12 {
        return Err(Error::InvalidConstantC { c });
    }
    check_a(&a)?;
    let (al, be) = (c.re, c.im);
    let change = [[2.0 * (1.0 + al), -2.0 * be], [2.0 * be, 2.0 * (al - 1.0)]];
    let s = 1.0 / (2.0 * (al * al + be * be - 1.0));
    let inverse = [[s * (al - 1.0), s * be], [-s * be, s * (1.0 + al)]];
    let b = HolomorphicExpr::constant(c) / a.clone();
    let mu = HolomorphicExpr::constant(Complex64::new(1.0, 0.0));
    let data = WeierstrassData::new(a.clone(), b, mu, Complex64::new(0.0, 0.0), MinkVector4::ZERO);
    Ok(GraphSpec {
        kind: GraphKind::FirstType,
        a,
        c,
        change,
        inverse,
        data,
    })
}

pub fn second_type_spec(a: HolomorphicExpr, c: Complex64) -> Result<GraphSpec> {
    if !c.is_finite() || c.im.abs() < 1e-12 {
        return Err(Error::RealConstantC { c });
    }
    check_a(&a)?;
    let (al, be) = (c.re, c.im);
    let change = [[2.0 * (1.0 + al), -2.0 * be], [2.0 * (1.0 - al), 2.0 * be]];
    let s = 1.0 / (4.0 * be);
    let inverse = [[s * be, s * be], [s * (al - 1.0), s * (al + 1.0)]];
    let b = HolomorphicExpr::constant(c) * a.clone();
    let mu = HolomorphicExpr::constant(Complex64::new(1.0, 0.0)) / a.clone();
    let data = WeierstrassData::new(a.clone(), b, mu, Complex64::new(0.0, 0.0), MinkVector4::ZERO);
    Ok(GraphSpec {
        kind: GraphKind::SecondType,
        a,
        c,
        change,
        inverse,
        data,
    })
}

impl GraphSpec {
    /// Moves the lower integration limit to `w0` with `f(w0) = x0`.
    pub fn with_origin(mut self, w0: Complex64, x0: MinkVector4) -> Self {
        self.data = self.data.with_anchor(w0, x0);
        self
    }

    pub fn data(&self) -> &WeierstrassData {
        &self.data
    }

    fn plane_indices(&self) -> (usize, usize) {
        match self.kind {
            GraphKind::FirstType => (1, 2),
            GraphKind::SecondType => (0, 3),
        }
    }

    fn height_indices(&self) -> (usize, usize) {
        match self.kind {
            GraphKind::FirstType => (0, 3),
            GraphKind::SecondType => (1, 2),
        }
    }

    /// Projection-plane coordinates of the point with parameter `w`.
    pub fn forward(&self, w: Complex64) -> (f64, f64) {
        let d = w - self.data.w0();
        let [x, y] = mat_vec(&self.change, [d.re, d.im]);
        let (ix, iy) = self.plane_indices();
        let x0 = self.data.x0();
        (x + x0[ix], y + x0[iy])
    }

    pub fn parameter(&self, x: f64, y: f64) -> Complex64 {
        let (ix, iy) = self.plane_indices();
        let x0 = self.data.x0();
        let [u, v] = mat_vec(&self.inverse, [x - x0[ix], y - x0[iy]]);
        self.data.w0() + Complex64::new(u, v)
    }

    /// Product `change · inverse`, the identity up to rounding.
    pub fn round_trip(&self) -> Mat2 {
        mat_mul(&self.change, &self.inverse)
    }

    fn check_nonzero_a(&self, w: Complex64) -> Result<()> {
        match self.a.eval(w) {
            Ok(v) if v.norm() < DIV_GUARD => Err(Error::ZeroOfA { w }),
            Ok(_) => Ok(()),
            Err(Error::PoleEncountered { .. }) => Err(Error::PoleEncountered { w }),
            Err(e) => Err(e),
        }
    }

    /// Point of the embedding over `(x, y)` and its parameter.
    pub fn point(&self, x: f64, y: f64, tol: f64) -> Result<(MinkVector4, Complex64)> {
        let w = self.parameter(x, y);
        self.check_nonzero_a(w)?;
        Ok((surface_point(&self.data, w, tol)?, w))
    }
}

pub fn graph_eval(spec: &GraphSpec, x: f64, y: f64, tol: f64) -> Result<(f64, f64)> {
    let (f, _) = spec.point(x, y, tol)?;
    let (ia, ib) = spec.height_indices();
    Ok((f[ia], f[ib]))
}

/// Heights over a lattice of the projection plane, with metric and mask.
#[derive(Debug, Clone)]
pub struct GraphGrid {
    pub kind: GraphKind,
    pub lattice: Lattice,
    pub a: Array2<f64>,
    pub b: Array2<f64>,
    /// Metric from second-order differences, one-sided on the boundary.
    pub metric: Array2<MetricData>,
    pub spacelike: Array2<bool>,
    pub curvature: Array2<Option<f64>>,
    pub class: Array2<PointClass>,
}

/// Tangents X_x, X_y of the embedding for height gradients.
fn graph_tangents(kind: GraphKind, ax: f64, ay: f64, bx: f64, by: f64) -> (MinkVector4, MinkVector4) {
    match kind {
        GraphKind::FirstType => (MinkVector4::new(ax, 1.0, 0.0, bx), MinkVector4::new(ay, 0.0, 1.0, by)),
        GraphKind::SecondType => (MinkVector4::new(1.0, ax, bx, 0.0), MinkVector4::new(0.0, ay, by, 1.0)),
    }
}

/// Metric of the embedding built from height gradients.
pub fn graph_metric_from_gradients(kind: GraphKind, ax: f64, ay: f64, bx: f64, by: f64) -> MetricData {
    let (xx, xy) = graph_tangents(kind, ax, ay, bx, by);
    MetricData::from_tangents(&xx, &xy)
}

impl GraphGrid {
    /// Grid from sampled heights; curvature is left unset.
    pub fn from_heights(kind: GraphKind, lattice: Lattice, a: Array2<f64>, b: Array2<f64>) -> Result<Self> {
        let shape = (lattice.nx, lattice.ny);
        if a.dim() != shape || b.dim() != shape {
            return Err(Error::InvalidArgument(format!(
                "height arrays {:?}/{:?} do not match lattice {shape:?}",
                a.dim(),
                b.dim()
            )));
        }
        let (hx, hy) = (lattice.hx(), lattice.hy());
        let metric = Array2::from_shape_fn(shape, |(i, j)| {
            graph_metric_from_gradients(
                kind,
                d1(&a, i, j, hx, Axis::X),
                d1(&a, i, j, hy, Axis::Y),
                d1(&b, i, j, hx, Axis::X),
                d1(&b, i, j, hy, Axis::Y),
            )
        });
        let spacelike = metric.map(|m| m.is_spacelike(0.0));
        let class = spacelike.map(|&s| if s { PointClass::Regular } else { PointClass::MetricDegenerate });
        Ok(Self {
            kind,
            lattice,
            a,
            b,
            metric,
            spacelike,
            curvature: Array2::from_elem(shape, None),
            class,
        })
    }

    /// Grid of closed-form heights.
    pub fn from_fn(kind: GraphKind, lattice: Lattice, f: impl Fn(f64, f64) -> (f64, f64)) -> Result<Self> {
        let vals = Array2::from_shape_fn((lattice.nx, lattice.ny), |(i, j)| f(lattice.x(i), lattice.y(j)));
        Self::from_heights(kind, lattice, vals.map(|v| v.0), vals.map(|v| v.1))
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta {
            nx: self.lattice.nx,
            ny: self.lattice.ny,
            hx: self.lattice.hx(),
            hy: self.lattice.hy(),
        }
    }

    pub fn all_spacelike(&self) -> bool {
        self.spacelike.iter().all(|&s| s)
    }
}

/// Samples the graph of `spec` over `lattice`; fails on the first bad node.
pub fn graph_grid(spec: &GraphSpec, lattice: Lattice, tol: f64) -> Result<GraphGrid> {
    let (ia, ib) = spec.height_indices();
    let nodes: Vec<(usize, usize)> = lattice.nodes().collect();
    let values: Vec<(f64, f64, Option<f64>, PointClass)> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let (f, w) = spec.point(lattice.x(i), lattice.y(j), tol)?;
            let jet = spec.data.jet(w)?;
            let cls = classify_point(&spec.data, w);
            let k = if cls == PointClass::Regular { curvature_from_jet(&jet).ok() } else { None };
            Ok((f[ia], f[ib], k, cls))
        })
        .collect::<Result<_>>()?;
    let shape = (lattice.nx, lattice.ny);
    let at = |i: usize, j: usize| values[i * lattice.ny + j];
    let a = Array2::from_shape_fn(shape, |(i, j)| at(i, j).0);
    let b = Array2::from_shape_fn(shape, |(i, j)| at(i, j).1);
    let mut grid = GraphGrid::from_heights(spec.kind, lattice, a, b)?;
    grid.curvature = Array2::from_shape_fn(shape, |(i, j)| at(i, j).2);
    for ((i, j), cls) in grid.class.indexed_iter_mut() {
        let exact = at(i, j).3;
        if exact != PointClass::Regular {
            *cls = exact;
        }
    }
    Ok(grid)
}

/// Metric at an interior node from central differences of A and B.
pub fn graph_metric(grid: &GraphGrid, i: usize, j: usize) -> Result<MetricData> {
    if !grid.lattice.is_interior(i, j) {
        return Err(Error::BoundaryNode { i, j });
    }
    let (hx, hy) = (grid.lattice.hx(), grid.lattice.hy());
    Ok(graph_metric_from_gradients(
        grid.kind,
        d1(&grid.a, i, j, hx, Axis::X),
        d1(&grid.a, i, j, hy, Axis::Y),
        d1(&grid.b, i, j, hx, Axis::X),
        d1(&grid.b, i, j, hy, Axis::Y),
    ))
}

/// g₂₂ Z_xx − 2 g₁₂ Z_xy + g₁₁ Z_yy at an interior node.
fn system_residual(z: &Array2<f64>, m: &MetricData, i: usize, j: usize, hx: f64, hy: f64) -> f64 {
    m.g * d2(z, i, j, hx, Axis::X) - 2.0 * m.f * dxy(z, i, j, hx, hy) + m.e * d2(z, i, j, hy, Axis::Y)
}

/// Residuals of the minimal-graph system for both heights over the interior nodes.
pub fn minimal_graph_residual(grid: &GraphGrid, tol: f64) -> Result<ResidualReport> {
    let l = &grid.lattice;
    if l.nx < 5 || l.ny < 5 {
        return Err(Error::TooSmallGrid { nx: l.nx, ny: l.ny, min: 5 });
    }
    let (hx, hy) = (l.hx(), l.hy());
    let nodes: Vec<(usize, usize)> = l.interior().collect();
    let pairs: Vec<(f64, f64)> = nodes
        .par_iter()
        .map(|&(i, j)| {
            let m = graph_metric(grid, i, j).expect("interior node");
            (
                system_residual(&grid.a, &m, i, j, hx, hy),
                system_residual(&grid.b, &m, i, j, hx, hy),
            )
        })
        .collect();
    let h = Some(hx.max(hy));
    let mut report = ResidualReport::with_meta(grid.meta());
    report.record("graphSystemA", pairs.iter().map(|p| p.0), tol, GateKind::Soft, h);
    report.record("graphSystemB", pairs.iter().map(|p| p.1), tol, GateKind::Soft, h);
    let mask: Vec<f64> = grid.spacelike.iter().map(|&s| if s { 0.0 } else { 1.0 }).collect();
    report.record("spacelikeMask", mask, 0.0, GateKind::Hard, None);
    Ok(report)
}

/// Value of the system residual for one height at a single interior node.
pub fn minimal_graph_residual_at(grid: &GraphGrid, i: usize, j: usize) -> Result<(f64, f64)> {
    let m = graph_metric(grid, i, j)?;
    let (hx, hy) = (grid.lattice.hx(), grid.lattice.hy());
    Ok((
        system_residual(&grid.a, &m, i, j, hx, hy),
        system_residual(&grid.b, &m, i, j, hx, hy),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpecialEquation {
    /// (1 + B_y²)B_xx − 2B_xB_yB_xy + (1 + B_x²)B_yy = 0.
    EuclideanGraph,
    /// (1 − A_y²)A_xx + 2A_xA_yA_xy + (1 − A_x²)A_yy = 0 with A_x² + A_y² < 1.
    CalabiGraph,
    /// (1 + A_y²)A_xx − 2A_xA_yA_xy + (−1 + A_x²)A_yy = 0 with A_x² > A_y² + 1.
    SecondTypeL3,
}

impl SpecialEquation {
    pub fn name(self) -> &'static str {
        match self {
            SpecialEquation::EuclideanGraph => "euclideanGraph",
            SpecialEquation::CalabiGraph => "calabiGraph",
            SpecialEquation::SecondTypeL3 => "secondTypeL3",
        }
    }

    fn operator(self, zx: f64, zy: f64, zxx: f64, zxy: f64, zyy: f64) -> f64 {
        match self {
            SpecialEquation::EuclideanGraph => (1.0 + zy * zy) * zxx - 2.0 * zx * zy * zxy + (1.0 + zx * zx) * zyy,
            SpecialEquation::CalabiGraph => (1.0 - zy * zy) * zxx + 2.0 * zx * zy * zxy + (1.0 - zx * zx) * zyy,
            SpecialEquation::SecondTypeL3 => (1.0 + zy * zy) * zxx - 2.0 * zx * zy * zxy + (zx * zx - 1.0) * zyy,
        }
    }

    fn constraint_holds(self, zx: f64, zy: f64) -> bool {
        match self {
            SpecialEquation::EuclideanGraph => true,
            SpecialEquation::CalabiGraph => zx * zx + zy * zy < 1.0,
            SpecialEquation::SecondTypeL3 => zx * zx > zy * zy + 1.0,
        }
    }
}

/// Interior nodes where the gradient constraint of `kind` fails.
pub fn constraint_violations(kind: SpecialEquation, z: &Array2<f64>, h: f64) -> Vec<(usize, usize)> {
    let (nx, ny) = z.dim();
    (1..nx.saturating_sub(1))
        .flat_map(|i| (1..ny.saturating_sub(1)).map(move |j| (i, j)))
        .filter(|&(i, j)| !kind.constraint_holds(d1(z, i, j, h, Axis::X), d1(z, i, j, h, Axis::Y)))
        .collect()
}

/// Residual of a single scalar graph equation; constraint failures are
/// reported as a separate entry rather than aborting.
pub fn special_equation_residual(kind: SpecialEquation, z: &Array2<f64>, h: f64, tol: f64) -> Result<ResidualReport> {
    let (nx, ny) = z.dim();
    if nx < 3 || ny < 3 {
        return Err(Error::TooSmallGrid { nx, ny, min: 3 });
    }
    let mut values = Vec::with_capacity((nx - 2) * (ny - 2));
    for i in 1..nx - 1 {
        for j in 1..ny - 1 {
            values.push(kind.operator(
                d1(z, i, j, h, Axis::X),
                d1(z, i, j, h, Axis::Y),
                d2(z, i, j, h, Axis::X),
                dxy(z, i, j, h, h),
                d2(z, i, j, h, Axis::Y),
            ));
        }
    }
    let violations = constraint_violations(kind, z, h).len();
    let mut report = ResidualReport::with_meta(GridMeta { nx, ny, hx: h, hy: h });
    report.record(kind.name(), values, tol, GateKind::Soft, Some(h));
    report.record(
        &format!("{}Constraint", kind.name()),
        [violations as f64],
        0.0,
        GateKind::Hard,
        None,
    );
    Ok(report)
}

/// 4|μ|² Im(conj(a)·b): the imaginary part of x_w y_w̄ − x_w̄ y_w, which vanishes where the chart folds.
pub fn second_type_jacobian(a: Complex64, b: Complex64, mu: Complex64) -> f64 {
    4.0 * mu.norm_sqr() * (a.conj() * b).im
}
