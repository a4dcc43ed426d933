//! The tangent rotation J, conjugate surfaces, Nitsche isothermic coordinates
//! and lightcone degeneracy scans on parametric grids.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::complex_fn::quadrature::{integrate_segment, PathSegment, DEFAULT_MAX_DEPTH};
use crate::error::{Error, Result};
use crate::fd::{d1, d1_fourth, Axis};
use crate::lattice::Lattice;
use crate::metric::{metric_epsilon, MetricData};
use crate::minkowski::MinkVector4;
use crate::report::{GateKind, GridMeta, ResidualReport};
use crate::weierstrass::{derivative_vector, SurfaceGrid, WeierstrassData};

/// Exact tangents of a parametrised surface.
pub trait SurfaceField: Send + Sync {
    fn tangents(&self, x: f64, y: f64) -> Result<(MinkVector4, MinkVector4)>;
}

/// Wraps a closure returning `(X_x, X_y)`.
pub struct FnField<F>(pub F);

impl<F> SurfaceField for FnField<F>
where
    F: Fn(f64, f64) -> (MinkVector4, MinkVector4) + Send + Sync,
{
    fn tangents(&self, x: f64, y: f64) -> Result<(MinkVector4, MinkVector4)> {
        Ok((self.0)(x, y))
    }
}

/// In the isothermic chart w = x + iy: f_x = 2 Re f_w, f_y = −2 Im f_w.
impl SurfaceField for WeierstrassData {
    fn tangents(&self, x: f64, y: f64) -> Result<(MinkVector4, MinkVector4)> {
        let fw = derivative_vector(self, Complex64::new(x, y))?;
        Ok((2.0 * fw.re(), -2.0 * fw.im()))
    }
}

#[derive(Clone)]
pub struct ParametricGrid {
    pub lattice: Lattice,
    pub p: Array2<MinkVector4>,
    pub px: Array2<MinkVector4>,
    pub py: Array2<MinkVector4>,
    pub metric: Array2<MetricData>,
    /// Exact tangent functions, used for quadrature between nodes.
    pub field: Option<Arc<dyn SurfaceField>>,
}

impl std::fmt::Debug for ParametricGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParametricGrid")
            .field("lattice", &self.lattice)
            .field("analytic", &self.field.is_some())
            .finish_non_exhaustive()
    }
}

impl ParametricGrid {
    pub fn from_tangent_arrays(
        lattice: Lattice,
        p: Array2<MinkVector4>,
        px: Array2<MinkVector4>,
        py: Array2<MinkVector4>,
        field: Option<Arc<dyn SurfaceField>>,
    ) -> Result<Self> {
        let shape = (lattice.nx, lattice.ny);
        if p.dim() != shape || px.dim() != shape || py.dim() != shape {
            return Err(Error::InvalidArgument("array shapes do not match the lattice".into()));
        }
        let metric = Array2::from_shape_fn(shape, |ij| MetricData::from_tangents(&px[ij], &py[ij]));
        Ok(Self {
            lattice,
            p,
            px,
            py,
            metric,
            field,
        })
    }

    /// Positions only; tangents by fourth-order central differences.
    pub fn from_positions(lattice: Lattice, p: Array2<MinkVector4>) -> Result<Self> {
        if p.dim() != (lattice.nx, lattice.ny) {
            return Err(Error::InvalidArgument("array shapes do not match the lattice".into()));
        }
        let (hx, hy) = (lattice.hx(), lattice.hy());
        let px = Array2::from_shape_fn(p.dim(), |(i, j)| d1_fourth(&p, i, j, hx, Axis::X));
        let py = Array2::from_shape_fn(p.dim(), |(i, j)| d1_fourth(&p, i, j, hy, Axis::Y));
        Self::from_tangent_arrays(lattice, p, px, py, None)
    }

    pub fn from_fn(lattice: Lattice, pos: impl Fn(f64, f64) -> MinkVector4) -> Result<Self> {
        let p = Array2::from_shape_fn((lattice.nx, lattice.ny), |(i, j)| pos(lattice.x(i), lattice.y(j)));
        Self::from_positions(lattice, p)
    }

    /// Closed-form positions with exact tangents.
    pub fn from_analytic(
        lattice: Lattice,
        pos: impl Fn(f64, f64) -> MinkVector4,
        field: Arc<dyn SurfaceField>,
    ) -> Result<Self> {
        let shape = (lattice.nx, lattice.ny);
        let p = Array2::from_shape_fn(shape, |(i, j)| pos(lattice.x(i), lattice.y(j)));
        let mut px = Array2::from_elem(shape, MinkVector4::ZERO);
        let mut py = px.clone();
        for (i, j) in lattice.nodes() {
            let (tx, ty) = field.tangents(lattice.x(i), lattice.y(j))?;
            px[[i, j]] = tx;
            py[[i, j]] = ty;
        }
        Self::from_tangent_arrays(lattice, p, px, py, Some(field))
    }

    /// Isothermic grid of a sampled Weierstrass surface with exact tangents.
    pub fn from_surface_grid(grid: &SurfaceGrid, data: &WeierstrassData) -> Result<Self> {
        let p = grid.samples.map(|s| s.f);
        let px = grid.samples.map(|s| 2.0 * s.f_w.re());
        let py = grid.samples.map(|s| -2.0 * s.f_w.im());
        let field: Arc<dyn SurfaceField> = Arc::new(data.clone());
        Self::from_tangent_arrays(grid.lattice, p, px, py, Some(field))
    }

    pub fn meta(&self) -> GridMeta {
        GridMeta {
            nx: self.lattice.nx,
            ny: self.lattice.ny,
            hx: self.lattice.hx(),
            hy: self.lattice.hy(),
        }
    }

    fn node_epsilon(&self, i: usize, j: usize) -> f64 {
        tangent_epsilon(&self.px[[i, j]], &self.py[[i, j]])
    }
}

fn tangent_epsilon(xx: &MinkVector4, xy: &MinkVector4) -> f64 {
    metric_epsilon(xx.euclid_norm() * xy.euclid_norm())
}

fn area(xx: &MinkVector4, xy: &MinkVector4) -> Result<(MetricData, f64)> {
    let m = MetricData::from_tangents(xx, xy);
    let det = m.det();
    if !(det > tangent_epsilon(xx, xy)) {
        return Err(Error::DegenerateMetric { area: det });
    }
    Ok((m, det.sqrt()))
}

/// J(V) = (⟨X_x, V⟩ X_y − ⟨X_y, V⟩ X_x) / √(EG − F²).
pub fn j_apply(xx: &MinkVector4, xy: &MinkVector4, v: &MinkVector4) -> Result<MinkVector4> {
    let (_, w) = area(xx, xy)?;
    Ok((1.0 / w) * (xx.dot(v) * *xy - xy.dot(v) * *xx))
}

/// J(β) = coeff_dx dx + coeff_dy dy for β = X_x dx + X_y dy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OneFormSample {
    pub coeff_dx: MinkVector4,
    pub coeff_dy: MinkVector4,
}

pub fn j_of_tangents(xx: &MinkVector4, xy: &MinkVector4) -> Result<OneFormSample> {
    let (m, w) = area(xx, xy)?;
    Ok(OneFormSample {
        coeff_dx: (1.0 / w) * (m.e * *xy - m.f * *xx),
        coeff_dy: (1.0 / w) * (m.f * *xy - m.g * *xx),
    })
}

pub fn j_one_form(grid: &ParametricGrid) -> Result<Array2<OneFormSample>> {
    let mut out = Array2::from_elem(grid.p.dim(), OneFormSample { coeff_dx: MinkVector4::ZERO, coeff_dy: MinkVector4::ZERO });
    for ((i, j), slot) in out.indexed_iter_mut() {
        *slot = j_of_tangents(&grid.px[[i, j]], &grid.py[[i, j]])?;
    }
    Ok(out)
}

/// Per-node |∂_x coeff_dy − ∂_y coeff_dx| over interior nodes.
pub fn closedness_defects(form: &Array2<OneFormSample>, hx: f64, hy: f64) -> Result<Array2<MinkVector4>> {
    let (nx, ny) = form.dim();
    if nx < 3 || ny < 3 {
        return Err(Error::TooSmallGrid { nx, ny, min: 3 });
    }
    let dx = form.map(|s| s.coeff_dx);
    let dy = form.map(|s| s.coeff_dy);
    Ok(Array2::from_shape_fn((nx - 2, ny - 2), |(i, j)| {
        d1(&dy, i + 1, j + 1, hx, Axis::X) - d1(&dx, i + 1, j + 1, hy, Axis::Y)
    }))
}

pub fn closedness_residual(form: &Array2<OneFormSample>, lattice: &Lattice, tol: f64) -> Result<ResidualReport> {
    let (hx, hy) = (lattice.hx(), lattice.hy());
    let defects = closedness_defects(form, hx, hy)?;
    let mut report = ResidualReport::with_meta(GridMeta { nx: lattice.nx, ny: lattice.ny, hx, hy });
    report.record(
        "closedness",
        defects.iter().map(|d| d.euclid_norm()),
        tol,
        GateKind::Soft,
        Some(hx.max(hy)),
    );
    Ok(report)
}

/// Mean curvature vector 2H = (GΨ₁₁ − 2FΨ₁₂ + EΨ₂₂)/(EG − F²) at interior nodes,
/// with Ψ the normal parts of finite-difference second derivatives.
pub fn mean_curvature_vectors(grid: &ParametricGrid) -> Result<Array2<MinkVector4>> {
    let l = &grid.lattice;
    if l.nx < 3 || l.ny < 3 {
        return Err(Error::TooSmallGrid { nx: l.nx, ny: l.ny, min: 3 });
    }
    let (hx, hy) = (l.hx(), l.hy());
    let mut out = Array2::from_elem((l.nx - 2, l.ny - 2), MinkVector4::ZERO);
    for (i, j) in l.interior() {
        let (xx, xy) = (grid.px[[i, j]], grid.py[[i, j]]);
        let (m, _) = area(&xx, &xy)?;
        let det = m.det();
        let normal = |v: MinkVector4| {
            let (p, q) = (v.dot(&xx), v.dot(&xy));
            let a = (m.g * p - m.f * q) / det;
            let b = (m.e * q - m.f * p) / det;
            v - a * xx - b * xy
        };
        let xxx = d1(&grid.px, i, j, hx, Axis::X);
        let xyy = d1(&grid.py, i, j, hy, Axis::Y);
        let xxy = 0.5 * (d1(&grid.px, i, j, hy, Axis::Y) + d1(&grid.py, i, j, hx, Axis::X));
        let h2 = (1.0 / det) * (m.g * normal(xxx) - 2.0 * m.f * normal(xxy) + m.e * normal(xyy));
        out[[i - 1, j - 1]] = h2;
    }
    Ok(out)
}

/// Node values of a 1-form ω = ω_x dx + ω_y dy and, optionally, exact coefficient functions.
struct OneForm<'a> {
    dx: Array2<MinkVector4>,
    dy: Array2<MinkVector4>,
    exact: Option<Box<dyn Fn(f64, f64) -> Result<(MinkVector4, MinkVector4)> + Sync + 'a>>,
}

struct PathIntegral {
    values: Array2<MinkVector4>,
    /// Largest difference between the row-first and column-first conventions.
    path_dependence: f64,
}

fn real_segment_integral(
    f: &(dyn Fn(f64) -> Result<MinkVector4> + Sync),
    a: f64,
    b: f64,
    tol: f64,
) -> Result<MinkVector4> {
    let g = |z: Complex64| f(z.re).map(|v| v.0.map(|x| Complex64::new(x, 0.0)));
    let seg = PathSegment::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0));
    let r = integrate_segment(&g, seg, tol, DEFAULT_MAX_DEPTH)?;
    Ok(MinkVector4(r.map(|z| z.re)))
}

impl OneForm<'_> {
    fn along_x(&self, l: &Lattice, i: usize, j: usize, tol: f64) -> Result<MinkVector4> {
        let (x0, x1, y) = (l.x(i), l.x(i + 1), l.y(j));
        match &self.exact {
            Some(f) => real_segment_integral(&|x| f(x, y).map(|c| c.0), x0, x1, tol),
            None => Ok((0.5 * (x1 - x0)) * (self.dx[[i, j]] + self.dx[[i + 1, j]])),
        }
    }

    fn along_y(&self, l: &Lattice, i: usize, j: usize, tol: f64) -> Result<MinkVector4> {
        let (y0, y1, x) = (l.y(j), l.y(j + 1), l.x(i));
        match &self.exact {
            Some(f) => real_segment_integral(&|y| f(x, y).map(|c| c.1), y0, y1, tol),
            None => Ok((0.5 * (y1 - y0)) * (self.dy[[i, j]] + self.dy[[i, j + 1]])),
        }
    }

    /// Integral from the lower-left node along both two-leg conventions.
    fn integrate(&self, l: &Lattice, tol: f64) -> Result<PathIntegral> {
        let share = tol / (l.nx + l.ny) as f64;
        let row_first = self.march(l, share, true)?;
        let col_first = self.march(l, share, false)?;
        let path_dependence = row_first
            .iter()
            .zip(col_first.iter())
            .map(|(a, b)| (*a - *b).max_abs())
            .fold(0.0, f64::max);
        Ok(PathIntegral {
            values: row_first,
            path_dependence,
        })
    }

    fn march(&self, l: &Lattice, tol: f64, row_first: bool) -> Result<Array2<MinkVector4>> {
        let (nx, ny) = (l.nx, l.ny);
        let mut out = Array2::from_elem((nx, ny), MinkVector4::ZERO);
        if row_first {
            for i in 1..nx {
                out[[i, 0]] = out[[i - 1, 0]] + self.along_x(l, i - 1, 0, tol)?;
            }
            let cols: Vec<Vec<MinkVector4>> = (0..nx)
                .into_par_iter()
                .map(|i| {
                    let mut acc = out[[i, 0]];
                    let mut col = vec![acc];
                    for j in 1..ny {
                        acc += self.along_y(l, i, j - 1, tol)?;
                        col.push(acc);
                    }
                    Ok(col)
                })
                .collect::<Result<_>>()?;
            for (i, col) in cols.into_iter().enumerate() {
                for (j, v) in col.into_iter().enumerate() {
                    out[[i, j]] = v;
                }
            }
        } else {
            for j in 1..ny {
                out[[0, j]] = out[[0, j - 1]] + self.along_y(l, 0, j - 1, tol)?;
            }
            let rows: Vec<Vec<MinkVector4>> = (0..ny)
                .into_par_iter()
                .map(|j| {
                    let mut acc = out[[0, j]];
                    let mut row = vec![acc];
                    for i in 1..nx {
                        acc += self.along_x(l, i - 1, j, tol)?;
                        row.push(acc);
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            for (j, row) in rows.into_iter().enumerate() {
                for (i, v) in row.into_iter().enumerate() {
                    out[[i, j]] = v;
                }
            }
        }
        Ok(out)
    }
}

/// Conjugate surface together with the path-convention discrepancy of the integral.
#[derive(Debug, Clone)]
pub struct ConjugateSurface {
    pub grid: ParametricGrid,
    pub path_dependence: f64,
}

/// Integrates J(dX) from the lower-left node, anchored there at `y0`.
pub fn conjugate_surface(grid: &ParametricGrid, y0: MinkVector4, tol: f64) -> Result<ConjugateSurface> {
    conjugate_surface_anchored(grid, y0, (0, 0), tol)
}

/// As [`conjugate_surface`], translated so that node `anchor` sits at `y0`.
pub fn conjugate_surface_anchored(
    grid: &ParametricGrid,
    y0: MinkVector4,
    anchor: (usize, usize),
    tol: f64,
) -> Result<ConjugateSurface> {
    let l = grid.lattice;
    if anchor.0 >= l.nx || anchor.1 >= l.ny {
        return Err(Error::InvalidArgument(format!("anchor {anchor:?} outside the lattice")));
    }
    let form = j_one_form(grid)?;
    let exact = grid.field.clone().map(|field| {
        Box::new(move |x: f64, y: f64| {
            let (xx, xy) = field.tangents(x, y)?;
            let s = j_of_tangents(&xx, &xy)?;
            Ok((s.coeff_dx, s.coeff_dy))
        }) as Box<dyn Fn(f64, f64) -> Result<(MinkVector4, MinkVector4)> + Sync>
    });
    let one_form = OneForm {
        dx: form.map(|s| s.coeff_dx),
        dy: form.map(|s| s.coeff_dy),
        exact,
    };
    let integral = one_form.integrate(&l, tol)?;
    let shift = y0 - integral.values[anchor];
    let p = integral.values.map(|v| *v + shift);
    let out = ParametricGrid::from_tangent_arrays(l, p, one_form.dx, one_form.dy, None)?;
    Ok(ConjugateSurface {
        grid: out,
        path_dependence: integral.path_dependence,
    })
}

/// α = (F + i√(EG − F²)) / E.
pub fn beltrami_alpha(m: &MetricData) -> Result<Complex64> {
    let det = m.det();
    if !(m.e > 0.0 && det > 0.0) {
        return Err(Error::DegenerateMetric { area: det });
    }
    Ok(Complex64::new(m.f, det.sqrt()) / m.e)
}

#[derive(Debug, Clone)]
pub struct IsothermicChart {
    pub u: Array2<f64>,
    pub v: Array2<f64>,
    /// max |(u_y + i v_y) − α(u_x + i v_x)| over interior nodes.
    pub cr_residual: f64,
    pub path_dependence: f64,
}

/// Node values of (E dx + F dy)/W and (F dx + G dy)/W packed into components 0 and 1.
fn nitsche_coefficients(xx: &MinkVector4, xy: &MinkVector4) -> Result<(MinkVector4, MinkVector4)> {
    let (m, w) = area(xx, xy)?;
    Ok((
        MinkVector4::new(m.e / w, m.f / w, 0.0, 0.0),
        MinkVector4::new(m.f / w, m.g / w, 0.0, 0.0),
    ))
}

pub fn nitsche_coordinates(grid: &ParametricGrid, tol: f64) -> Result<IsothermicChart> {
    let l = grid.lattice;
    let shape = (l.nx, l.ny);
    let mut dx = Array2::from_elem(shape, MinkVector4::ZERO);
    let mut dy = dx.clone();
    for (i, j) in l.nodes() {
        let (a, b) = nitsche_coefficients(&grid.px[[i, j]], &grid.py[[i, j]])?;
        dx[[i, j]] = a;
        dy[[i, j]] = b;
    }
    let exact = grid.field.clone().map(|field| {
        Box::new(move |x: f64, y: f64| {
            let (xx, xy) = field.tangents(x, y)?;
            nitsche_coefficients(&xx, &xy)
        }) as Box<dyn Fn(f64, f64) -> Result<(MinkVector4, MinkVector4)> + Sync>
    });
    let integral = OneForm { dx, dy, exact }.integrate(&l, tol)?;
    let u = Array2::from_shape_fn(shape, |(i, j)| l.x(i) + integral.values[[i, j]][0]);
    let v = Array2::from_shape_fn(shape, |(i, j)| l.y(j) + integral.values[[i, j]][1]);
    let cr_residual = cr_defects(&u, &v, grid)?.iter().fold(0.0, |m: f64, d| m.max(*d));
    Ok(IsothermicChart {
        u,
        v,
        cr_residual,
        path_dependence: integral.path_dependence,
    })
}

/// |(u_y + i v_y) − α(u_x + i v_x)| at interior nodes, by central differences.
pub fn cr_defects(u: &Array2<f64>, v: &Array2<f64>, grid: &ParametricGrid) -> Result<Vec<f64>> {
    let l = &grid.lattice;
    let (hx, hy) = (l.hx(), l.hy());
    l.interior()
        .map(|(i, j)| {
            let alpha = beltrami_alpha(&grid.metric[[i, j]])?;
            let zx = Complex64::new(d1(u, i, j, hx, Axis::X), d1(v, i, j, hx, Axis::X));
            let zy = Complex64::new(d1(u, i, j, hy, Axis::Y), d1(v, i, j, hy, Axis::Y));
            Ok((zy - alpha * zx).norm())
        })
        .collect()
}

/// Nodes split by the sign of EG − F².
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LightconeScan {
    /// |EG − F²| within tolerance at a genuine surface point.
    pub lightlike: Vec<(usize, usize)>,
    /// EG − F² clearly negative.
    pub timelike: Vec<(usize, usize)>,
    /// Non-finite positions or vanishing tangents.
    pub singular: Vec<(usize, usize)>,
}

pub fn scan_nodes(grid: &ParametricGrid) -> LightconeScan {
    let mut scan = LightconeScan::default();
    for (i, j) in grid.lattice.nodes() {
        let (p, xx, xy) = (grid.p[[i, j]], grid.px[[i, j]], grid.py[[i, j]]);
        let defined = p.is_finite() && xx.is_finite() && xy.is_finite();
        if !defined || (xx.max_abs() == 0.0 && xy.max_abs() == 0.0) {
            scan.singular.push((i, j));
            continue;
        }
        let det = grid.metric[[i, j]].det();
        let eps = grid.node_epsilon(i, j);
        if det.abs() <= eps {
            scan.lightlike.push((i, j));
        } else if det < 0.0 {
            scan.timelike.push((i, j));
        }
    }
    scan
}

/// Nodes whose tangent plane touches the lightcone.
pub fn lightcone_scan(grid: &ParametricGrid) -> Vec<(usize, usize)> {
    scan_nodes(grid).lightlike
}
