//! Surfaces generated by Weierstrass data `(a, b, μ)` through `f_w = μ W(a, b)`.

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::complex_fn::quadrature::{integrate_segment, PathSegment, DEFAULT_MAX_DEPTH};
use crate::complex_fn::{parse_expr, HolomorphicExpr, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Rect};
use crate::metric::{metric_epsilon, MetricData};
use crate::minkowski::{complex_bilinear, lightlike_pair, weierstrass_vector, ComplexVector4, MinkVector4};

#[derive(Debug, Clone, PartialEq)]
pub struct WeierstrassData {
    a: HolomorphicExpr,
    b: HolomorphicExpr,
    mu: HolomorphicExpr,
    a_w: HolomorphicExpr,
    b_w: HolomorphicExpr,
    mu_w: HolomorphicExpr,
    w0: Complex64,
    x0: MinkVector4,
}

/// Values of the data and their first derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub a: Complex64,
    pub b: Complex64,
    pub mu: Complex64,
    pub a_w: Complex64,
    pub b_w: Complex64,
    pub mu_w: Complex64,
}

impl Jet {
    pub fn f_w(&self) -> ComplexVector4 {
        weierstrass_vector(self.a, self.b).scale(self.mu)
    }

    /// Exact second derivative d/dw (μ W(a, b)).
    pub fn f_ww(&self) -> ComplexVector4 {
        let i = Complex64::i();
        let (a, b) = (self.a, self.b);
        let d_ab = self.a_w * b + a * self.b_w;
        let dw = ComplexVector4([self.a_w + self.b_w, d_ab, -i * d_ab, self.a_w - self.b_w]);
        weierstrass_vector(a, b).scale(self.mu_w) + dw.scale(self.mu)
    }

    /// 4|μ|²|1 − a·conj b|².
    pub fn lambda2(&self) -> f64 {
        4.0 * self.mu.norm_sqr() * (1.0 - self.a * self.b.conj()).norm_sqr()
    }

    pub fn scale(&self) -> f64 {
        (self.mu.norm() * (1.0 + self.a.norm()) * (1.0 + self.b.norm())).max(1.0)
    }

    pub fn epsilon(&self) -> f64 {
        metric_epsilon(self.scale())
    }
}

impl WeierstrassData {
    pub fn new(a: HolomorphicExpr, b: HolomorphicExpr, mu: HolomorphicExpr, w0: Complex64, x0: MinkVector4) -> Self {
        Self {
            a_w: a.differentiate(),
            b_w: b.differentiate(),
            mu_w: mu.differentiate(),
            a,
            b,
            mu,
            w0,
            x0,
        }
    }

    /// Builds data from grammar strings.
    pub fn parse(a: &str, b: &str, mu: &str, w0: Complex64, x0: MinkVector4) -> Result<Self> {
        Ok(Self::new(parse_expr(a)?, parse_expr(b)?, parse_expr(mu)?, w0, x0))
    }

    pub fn a(&self) -> &HolomorphicExpr {
        &self.a
    }

    pub fn b(&self) -> &HolomorphicExpr {
        &self.b
    }

    pub fn mu(&self) -> &HolomorphicExpr {
        &self.mu
    }

    pub fn w0(&self) -> Complex64 {
        self.w0
    }

    pub fn x0(&self) -> MinkVector4 {
        self.x0
    }

    pub fn with_anchor(mut self, w0: Complex64, x0: MinkVector4) -> Self {
        self.w0 = w0;
        self.x0 = x0;
        self
    }

    pub fn jet(&self, w: Complex64) -> Result<Jet> {
        let jet = Jet {
            a: self.a.eval(w)?,
            b: self.b.eval(w)?,
            mu: self.mu.eval(w)?,
            a_w: self.a_w.eval(w)?,
            b_w: self.b_w.eval(w)?,
            mu_w: self.mu_w.eval(w)?,
        };
        if !jet.f_w().is_finite() {
            return Err(Error::NonFinite { w });
        }
        Ok(jet)
    }

    fn integrand(&self, w: Complex64) -> Result<[Complex64; 4]> {
        let a = self.a.eval(w)?;
        let b = self.b.eval(w)?;
        let mu = self.mu.eval(w)?;
        Ok(weierstrass_vector(a, b).scale(mu).0)
    }

    /// `∫ μ W(a, b) dξ` along one segment.
    pub fn segment_integral(&self, seg: PathSegment, tol: f64) -> Result<ComplexVector4> {
        let f = |z| self.integrand(z);
        integrate_segment(&f, seg, tol, DEFAULT_MAX_DEPTH).map(ComplexVector4)
    }

    /// Point of the surface reached from `x0` by twice the real part of `integral`.
    pub fn point_from_integral(&self, integral: &ComplexVector4) -> MinkVector4 {
        self.x0 + 2.0 * integral.re()
    }
}

/// `f(w) = X0 + 2 Re ∫_{w0}^{w} μ W(a, b) dξ` along the straight segment.
pub fn surface_point(data: &WeierstrassData, w: Complex64, tol: f64) -> Result<MinkVector4> {
    // The real part doubles the quadrature error.
    let integral = data.segment_integral(PathSegment::new(data.w0, w), 0.5 * tol)?;
    Ok(data.point_from_integral(&integral))
}

pub fn derivative_vector(data: &WeierstrassData, w: Complex64) -> Result<ComplexVector4> {
    let v = data.integrand(w)?;
    let v = ComplexVector4(v);
    if !v.is_finite() {
        return Err(Error::NonFinite { w });
    }
    Ok(v)
}

pub fn metric_lambda2(data: &WeierstrassData, w: Complex64) -> Result<f64> {
    Ok(data.jet(w)?.lambda2())
}

/// Gauss curvature Re(a_w·conj(b_w)·(1 − conj(a)·b)²) / (|μ|²|1 − a·conj b|⁶).
pub fn curvature_from_jet(jet: &Jet) -> Result<f64> {
    let lambda2 = jet.lambda2();
    if !(lambda2 > jet.epsilon()) {
        return Err(Error::DegenerateMetric { area: lambda2 });
    }
    let q = 1.0 - jet.a.conj() * jet.b;
    let num = (jet.a_w * jet.b_w.conj() * q * q).re;
    Ok(num / (jet.mu.norm_sqr() * q.norm_sqr().powi(3)))
}

pub fn gauss_curvature(data: &WeierstrassData, w: Complex64) -> Result<f64> {
    curvature_from_jet(&data.jet(w)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondFormData {
    pub coeff_l0: Complex64,
    pub coeff_l3: Complex64,
    pub l0: MinkVector4,
    pub l3: MinkVector4,
}

impl SecondFormData {
    /// Normal part coeff_l0·L₀(b) + coeff_l3·L₃(a) of f_ww.
    pub fn normal_part(&self) -> ComplexVector4 {
        self.l0.complexify().scale(self.coeff_l0) + self.l3.complexify().scale(self.coeff_l3)
    }
}

pub fn second_form_from_jet(jet: &Jet) -> Result<SecondFormData> {
    let lambda2 = jet.lambda2();
    if !(lambda2 > jet.epsilon()) {
        return Err(Error::DegenerateMetric { area: lambda2 });
    }
    let (l0, l3) = lightlike_pair(jet.a, jet.b);
    Ok(SecondFormData {
        coeff_l0: jet.mu * jet.a_w / (1.0 - jet.a * jet.b.conj()),
        coeff_l3: jet.mu * jet.b_w / (1.0 - jet.b * jet.a.conj()),
        l0,
        l3,
    })
}

pub fn second_form(data: &WeierstrassData, w: Complex64) -> Result<SecondFormData> {
    second_form_from_jet(&data.jet(w)?)
}

/// Fourth component of the Gauss map,
/// (1 − |ab|²) / (|1 − conj(a)·b| √(1 + |a|²) √(1 + |b|²)).
pub fn gauss_map_nu3(a: Complex64, b: Complex64) -> Result<f64> {
    let d = (1.0 - a.conj() * b).norm();
    if !(d > 1e-12) {
        return Err(Error::DegenerateMetric { area: d });
    }
    Ok((1.0 - (a * b).norm_sqr()) / (d * (1.0 + a.norm_sqr()).sqrt() * (1.0 + b.norm_sqr()).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PointClass {
    Regular,
    MetricDegenerate,
    LightlikeSingular,
    PoleOfData,
}

impl PointClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PointClass::Regular => "Regular",
            PointClass::MetricDegenerate => "MetricDegenerate",
            PointClass::LightlikeSingular => "LightlikeSingular",
            PointClass::PoleOfData => "PoleOfData",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            PointClass::Regular,
            PointClass::MetricDegenerate,
            PointClass::LightlikeSingular,
            PointClass::PoleOfData,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
    }
}

fn classify_jet(jet: &Jet, f: Option<&MinkVector4>) -> PointClass {
    if jet.lambda2() > jet.epsilon() {
        return PointClass::Regular;
    }
    let f_w = jet.f_w();
    let manifold_point = f.is_some_and(|f| f.is_finite()) && f_w.is_finite();
    // A nonzero null tangent means the tangent plane touches the lightcone.
    if manifold_point && f_w.norm() > jet.epsilon().sqrt() {
        PointClass::LightlikeSingular
    } else {
        PointClass::MetricDegenerate
    }
}

pub fn classify_point(data: &WeierstrassData, w: Complex64) -> PointClass {
    let Ok(jet) = data.jet(w) else {
        return PointClass::PoleOfData;
    };
    let f = surface_point(data, w, DEFAULT_TOL).ok();
    classify_jet(&jet, f.as_ref())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub w: Complex64,
    pub f: MinkVector4,
    pub f_w: ComplexVector4,
    pub metric: MetricData,
    /// Gauss curvature; absent away from regular points.
    pub k: Option<f64>,
    pub nu3: Option<f64>,
    pub cls: PointClass,
}

impl SurfaceSample {
    fn pole(w: Complex64) -> Self {
        let nan = f64::NAN;
        Self {
            w,
            f: MinkVector4([nan; 4]),
            f_w: ComplexVector4([Complex64::new(nan, nan); 4]),
            metric: MetricData::new(nan, nan, nan),
            k: None,
            nu3: None,
            cls: PointClass::PoleOfData,
        }
    }

    fn build(jet: &Jet, w: Complex64, f: MinkVector4) -> Self {
        let cls = classify_jet(jet, Some(&f));
        let regular = cls == PointClass::Regular;
        Self {
            w,
            f,
            f_w: jet.f_w(),
            metric: MetricData::isothermic(jet.lambda2()),
            k: if regular { curvature_from_jet(jet).ok() } else { None },
            nu3: if regular { gauss_map_nu3(jet.a, jet.b).ok() } else { None },
            cls,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChartKind {
    Isothermic,
    GraphXY,
}

#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub lattice: Lattice,
    /// Indexed `[i, j]` with `u = lattice.x(i)`, `v = lattice.y(j)`.
    pub samples: Array2<SurfaceSample>,
    pub chart: ChartKind,
}

impl SurfaceGrid {
    pub fn count(&self, cls: PointClass) -> usize {
        self.samples.iter().filter(|s| s.cls == cls).count()
    }

    /// One scalar per node, e.g. a coordinate of `f`.
    pub fn map<T>(&self, f: impl Fn(&SurfaceSample) -> T) -> Array2<T> {
        self.samples.map(f)
    }
}

/// Samples the surface on the lattice of `rect`.
///
/// Integrals march `w0 → (u, v0) → (u, v)` so every node costs one short
/// segment; nodes whose chain hits a failure retry the straight path from `w0`
/// before being flagged as poles.
pub fn sample_grid(data: &WeierstrassData, rect: Rect, nu: usize, nv: usize, tol: f64) -> Result<SurfaceGrid> {
    let lattice = Lattice::new(rect, nu, nv)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let w_at = |i: usize, j: usize| Complex64::new(lattice.x(i), lattice.y(j));
    // Each node is reached through at most nu + nv segments; the real part doubles.
    let share = 0.5 * tol / (nu + nv) as f64;

    let mut base: Vec<Option<ComplexVector4>> = Vec::with_capacity(nu);
    let mut acc = Some(ComplexVector4::default());
    let mut prev = data.w0;
    for i in 0..nu {
        let w = w_at(i, 0);
        acc = acc.and_then(|s| data.segment_integral(PathSegment::new(prev, w), share).ok().map(|d| s + d));
        base.push(acc);
        prev = w;
    }

    let columns: Vec<Vec<SurfaceSample>> = (0..nu)
        .into_par_iter()
        .map(|i| {
            let mut acc = base[i];
            (0..nv)
                .map(|j| {
                    let w = w_at(i, j);
                    if j > 0 {
                        let seg = PathSegment::new(w_at(i, j - 1), w);
                        acc = acc.and_then(|s| data.segment_integral(seg, share).ok().map(|d| s + d));
                    }
                    let f = match acc {
                        Some(s) => Ok(data.point_from_integral(&s)),
                        None => surface_point(data, w, tol),
                    };
                    match (data.jet(w), f) {
                        (Ok(jet), Ok(f)) => SurfaceSample::build(&jet, w, f),
                        _ => SurfaceSample::pole(w),
                    }
                })
                .collect()
        })
        .collect();

    let samples = Array2::from_shape_fn((nu, nv), |(i, j)| columns[i][j]);
    Ok(SurfaceGrid {
        lattice,
        samples,
        chart: ChartKind::Isothermic,
    })
}

/// |⟨f_w, f_w⟩| at a sample.
pub fn null_defect(s: &SurfaceSample) -> f64 {
    complex_bilinear(&s.f_w, &s.f_w).norm()
}

/// |λ² − 2⟨f_w, conj f_w⟩| relative to max(1, λ²).
pub fn metric_consistency_defect(s: &SurfaceSample) -> f64 {
    let lambda2 = s.metric.e;
    let direct = 2.0 * complex_bilinear(&s.f_w, &s.f_w.conj());
    (direct - lambda2).norm() / lambda2.max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn zero_data() -> WeierstrassData {
        WeierstrassData::parse("0", "0", "1", c(0.0, 0.0), MinkVector4::ZERO).unwrap()
    }

    #[test]
    fn exp_graph_surface_point() {
        let d = fixtures::exp_graph();
        assert!((surface_point(&d, c(0.0, 0.0), 1e-10).unwrap() - MinkVector4::new(-2.0, 0.0, 0.0, 6.0)).max_abs() < 1e-14);
        for &(u, v) in &[(0.7, -0.4), (-1.0, 1.0), (0.3, 2.5)] {
            let got = surface_point(&d, c(u, v), 1e-10).unwrap();
            assert!((got - fixtures::exp_graph_closed_form(u, v)).max_abs() <= 1e-10, "{u} {v}");
        }
    }

    #[test]
    fn constant_data_is_a_plane() {
        let d = zero_data();
        let p = surface_point(&d, c(0.8, -1.3), 1e-10).unwrap();
        assert!((p - MinkVector4::new(0.0, 1.6, 2.6, 0.0)).max_abs() < 1e-14);
        assert_eq!(metric_lambda2(&d, c(0.1, 0.2)).unwrap(), 4.0);
        assert_eq!(gauss_curvature(&d, c(0.1, 0.2)).unwrap(), 0.0);
        let s = second_form(&d, c(0.4, 0.0)).unwrap();
        assert_eq!((s.coeff_l0, s.coeff_l3), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn derivative_vector_examples() {
        let d = fixtures::exp_graph();
        let fw = derivative_vector(&d, c(0.0, 0.0)).unwrap();
        assert_eq!(fw.0, [c(3.0, 0.0), c(3.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0)]);
        let d = fixtures::catenoid_pair();
        let w = c(0.6, -1.1);
        let fw = derivative_vector(&d, w).unwrap();
        let expected = [c(0.5, 0.0), 0.5 * w.cosh(), c(0.0, -0.5) * w.sinh(), c(0.0, 0.0)];
        for k in 0..4 {
            assert!((fw[k] - expected[k]).norm() < 1e-15);
        }
        assert_eq!(derivative_vector(&zero_data(), w).unwrap().0[2], c(0.0, 1.0));
    }

    #[test]
    fn lambda2_examples() {
        let d = fixtures::exp_graph();
        for &(u, v) in &[(0.0f64, 0.0f64), (0.5, 0.3), (-0.2, 1.4)] {
            let expected = 4.0 * (5.0 - 4.0 * (2.0 * v).cos());
            assert!((metric_lambda2(&d, c(u, v)).unwrap() - expected).abs() < 1e-12);
        }
        let d = fixtures::catenoid_pair();
        let w = c(1.3, 0.4);
        assert!((metric_lambda2(&d, w).unwrap() - w.re.sinh().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn exp_graph_curvature_at_origin() {
        let k = gauss_curvature(&fixtures::exp_graph(), c(0.0, 0.0)).unwrap();
        assert!((k + 2.0).abs() < 1e-14);
    }

    #[test]
    fn curvature_oracle_from_log_lambda() {
        // K = −Δ ln λ / λ².
        let d = fixtures::exp_graph();
        let h = 1e-3;
        for &(u, v) in &[(0.0, 0.0), (0.4, 0.7), (-0.9, -0.2)] {
            let ln_l = |du: f64, dv: f64| 0.5 * metric_lambda2(&d, c(u + du, v + dv)).unwrap().ln();
            let lap = (ln_l(h, 0.0) + ln_l(-h, 0.0) + ln_l(0.0, h) + ln_l(0.0, -h) - 4.0 * ln_l(0.0, 0.0)) / (h * h);
            let oracle = -lap / metric_lambda2(&d, c(u, v)).unwrap();
            let k = gauss_curvature(&d, c(u, v)).unwrap();
            assert!((k - oracle).abs() <= 1e-5 * k.abs().max(1.0), "{k} vs {oracle}");
        }
    }

    #[test]
    fn exp_graph_second_form_at_origin() {
        let d = fixtures::exp_graph();
        let s = second_form(&d, c(0.0, 0.0)).unwrap();
        assert!((s.coeff_l0 - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((s.coeff_l3 - c(2.0, 0.0)).norm() < 1e-15);
        let n = s.normal_part();
        let expected = MinkVector4::new(-1.0, 0.0, 0.0, 3.0);
        assert!((n.re() - expected).max_abs() < 1e-14 && n.im().max_abs() < 1e-14);
        let fw = derivative_vector(&d, c(0.0, 0.0)).unwrap();
        assert!(complex_bilinear(&n, &fw).norm() < 1e-14);
    }

    #[test]
    fn constant_b_gives_lightlike_second_form() {
        let d = WeierstrassData::parse("exp(w)", "0.5", "1", c(0.0, 0.0), MinkVector4::ZERO).unwrap();
        let s = second_form(&d, c(0.2, 0.3)).unwrap();
        assert_eq!(s.coeff_l3, c(0.0, 0.0));
        let n = s.normal_part();
        assert!(complex_bilinear(&n, &n).norm() < 1e-12);
    }

    #[test]
    fn nu3_examples() {
        assert_eq!(gauss_map_nu3(c(0.0, 0.0), c(0.0, 0.0)).unwrap(), 1.0);
        assert!((gauss_map_nu3(c(0.5, 0.0), c(0.0, 0.0)).unwrap() - 1.0 / 1.25f64.sqrt()).abs() < 1e-15);
        assert!(gauss_map_nu3(c(2.0, 0.0), c(0.0, 0.5)).unwrap().abs() < 1e-15);
        assert!(gauss_map_nu3(c(0.6, 0.8), c(0.6, 0.8)).is_err());
    }

    #[test]
    fn classification() {
        let d = fixtures::exp_graph();
        for &(u, v) in &[(0.0, 0.0), (1.0, -2.0), (-3.0, 0.5)] {
            assert_eq!(classify_point(&d, c(u, v)), PointClass::Regular);
        }
        let d = fixtures::example_lightlike_weierstrass();
        assert_eq!(classify_point(&d, c(std::f64::consts::PI, 0.3)), PointClass::LightlikeSingular);
        assert_eq!(classify_point(&d, c(1.0, 0.3)), PointClass::Regular);
        let d = WeierstrassData::parse("0", "0", "w - 1", c(0.0, 0.0), MinkVector4::ZERO).unwrap();
        assert_eq!(classify_point(&d, c(1.0, 0.0)), PointClass::MetricDegenerate);
        let d = WeierstrassData::parse("1/w", "0", "1", c(1.0, 0.0), MinkVector4::ZERO).unwrap();
        assert_eq!(classify_point(&d, c(0.0, 0.0)), PointClass::PoleOfData);
    }

    #[test]
    fn exp_graph_grid_matches_closed_form() {
        let g = sample_grid(&fixtures::exp_graph(), Rect::square(1.0), 41, 41, 1e-10).unwrap();
        let worst = g
            .samples
            .iter()
            .map(|s| (s.f - fixtures::exp_graph_closed_form(s.w.re, s.w.im)).max_abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-8, "{worst}");
        assert_eq!(g.count(PointClass::Regular), 41 * 41);
    }

    #[test]
    fn catenoid_pair_grid_lambda2() {
        let rect = Rect::new(0.2, 2.0, -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        let g = sample_grid(&fixtures::catenoid_pair(), rect, 19, 21, 1e-10).unwrap();
        for s in g.samples.iter() {
            assert!((s.metric.lambda2.unwrap() - s.w.re.sinh().powi(2)).abs() <= 1e-8);
        }
    }

    #[test]
    fn zero_width_rectangle() {
        let g = sample_grid(&zero_data(), Rect::new(0.5, 0.5, -1.0, 1.0), 3, 3, 1e-10).unwrap();
        for s in g.samples.iter() {
            assert_eq!(s.w.re, 0.5);
            assert!((s.f - MinkVector4::new(0.0, 1.0, -2.0 * s.w.im, 0.0)).max_abs() < 1e-15);
        }
    }

    #[test]
    fn grid_flags_poles_without_aborting() {
        let d = WeierstrassData::parse("0", "0", "1/w", c(1.0, 1.0), MinkVector4::ZERO).unwrap();
        let g = sample_grid(&d, Rect::square(1.0), 5, 5, 1e-8).unwrap();
        assert_eq!(g.samples[[2, 2]].cls, PointClass::PoleOfData);
        assert!(g.count(PointClass::Regular) > 0);
        assert!(matches!(sample_grid(&d, Rect::square(1.0), 2, 5, 1e-8), Err(Error::TooSmallGrid { .. })));
    }

    fn point() -> impl Strategy<Value = Complex64> {
        (-1.5..1.5f64, -1.5..1.5f64).prop_map(|(x, y)| c(x, y))
    }

    proptest! {
        #[test]
        fn null_condition_and_metric_consistency(w in point()) {
            for d in [fixtures::exp_graph(), fixtures::catenoid_pair(), fixtures::theta_data(0.7)] {
                let Ok(jet) = d.jet(w) else { continue };
                let s = SurfaceSample::build(&jet, w, MinkVector4::ZERO);
                prop_assert!(null_defect(&s) <= 1e-10 * jet.scale().powi(2));
                prop_assert!(metric_consistency_defect(&s) <= 1e-10);
            }
        }

        #[test]
        fn second_form_is_the_normal_projection(w in point()) {
            for d in [fixtures::exp_graph(), fixtures::theta_data(1.1)] {
                let jet = d.jet(w).unwrap();
                let Ok(s) = second_form_from_jet(&jet) else { continue };
                let fw = jet.f_w();
                let fww = jet.f_ww();
                let proj = fww - fw.scale(complex_bilinear(&fww, &fw.conj()) / complex_bilinear(&fw, &fw.conj()));
                let n = s.normal_part();
                let scale = 1.0 + fww.norm();
                prop_assert!((n - proj).norm() <= 1e-9 * scale);
                prop_assert!(complex_bilinear(&n, &fw).norm() <= 1e-8 * scale);
                prop_assert!(complex_bilinear(&n, &fw.conj()).norm() <= 1e-8 * scale);
            }
        }
    }
}
