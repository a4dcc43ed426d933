use num_complex::Complex64;
use proptest::prelude::*;

use minsurf4::complex_fn::parse_expr;
use minsurf4::conjugate::{conjugate_surface_anchored, ParametricGrid};
use minsurf4::fixtures;
use minsurf4::graphs::{first_type_spec, graph_grid, minimal_graph_residual, special_equation_residual, SpecialEquation};
use minsurf4::lattice::{Lattice, Rect};
use minsurf4::minkowski::MinkVector4;
use minsurf4::theta::{transported_graphs, ThetaFamilySpec, TransportParams};
use minsurf4::weierstrass::{gauss_curvature, metric_lambda2, sample_grid};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_over<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curvature_matches_log_lambda_oracle(u in -1.0..1.0f64, v in -1.5..1.5f64) {
        let d = fixtures::exp_graph();
        let h = 1e-3;
        let ln_l = |du: f64, dv: f64| 0.5 * metric_lambda2(&d, c(u + du, v + dv)).unwrap().ln();
        let lap = (ln_l(h, 0.0) + ln_l(-h, 0.0) + ln_l(0.0, h) + ln_l(0.0, -h) - 4.0 * ln_l(0.0, 0.0)) / (h * h);
        let oracle = -lap / metric_lambda2(&d, c(u, v)).unwrap();
        let k = gauss_curvature(&d, c(u, v)).unwrap();
        prop_assert!((k - oracle).abs() <= 1e-5f64.max(50.0 * h * h) * k.abs().max(1.0));
    }
}

#[test]
fn exp_graph_gauss_map_stays_in_one_hemisphere() {
    // |ab| = 2 everywhere, so 1 − |ab|² = −3 fixes the sign of ν³.
    let g = sample_grid(&fixtures::exp_graph(), Rect::square(1.0), 21, 21, 1e-10).unwrap();
    for s in g.samples.iter() {
        let nu3 = s.nu3.expect("regular sample");
        assert!(nu3 < -0.1, "{nu3} at {}", s.w);
    }
}

#[test]
fn exp_graph_graph_residual_is_second_order() {
    let spec = first_type_spec(parse_expr("exp(w)").unwrap(), c(2.0, 0.0))
        .unwrap()
        .with_origin(c(0.0, 0.0), MinkVector4::new(-2.0, 0.0, 0.0, 6.0));
    let worst = |n: usize| {
        let g = graph_grid(&spec, Lattice::new(Rect::square(1.0), n, n).unwrap(), 1e-12).unwrap();
        assert!(g.all_spacelike());
        let r = minimal_graph_residual(&g, 1.0).unwrap();
        (r.get("graphSystemA").unwrap().max_abs, r.get("graphSystemB").unwrap().max_abs)
    };
    let (coarse, fine) = (worst(41), worst(81));
    for ratio in [coarse.0 / fine.0, coarse.1 / fine.1] {
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
    }
}

fn helicoid(n: usize, m: usize) -> ParametricGrid {
    fixtures::helicoid_grid(Lattice::new(Rect::new(0.0, 1.5, -1.0, 1.0), n, m).unwrap()).unwrap()
}

/// max |Y' + X − const| where Y' is the conjugate of the conjugate of X.
fn involution_defect(x: &ParametricGrid) -> f64 {
    let y = conjugate_surface_anchored(x, MinkVector4::ZERO, (0, 0), 1e-10).unwrap();
    let anchor = -1.0 * x.p[[0, 0]];
    let yy = conjugate_surface_anchored(&y.grid, anchor, (0, 0), 1e-10).unwrap();
    max_over(x.lattice.nodes().map(|ij| (yy.grid.p[ij] + x.p[ij]).max_abs()))
}

#[test]
fn conjugation_is_an_involution_up_to_sign() {
    let (coarse, fine) = (involution_defect(&helicoid(31, 41)), involution_defect(&helicoid(61, 81)));
    let h = 0.05;
    assert!(coarse <= h * h, "{coarse}");
    assert!(coarse / fine >= 3.5, "{coarse} -> {fine}");
}

fn metric_gap(a: &ParametricGrid, b: &ParametricGrid) -> f64 {
    max_over(a.lattice.nodes().map(|ij| {
        let (m, n) = (a.metric[ij], b.metric[ij]);
        (m.e - n.e).abs().max((m.f - n.f).abs()).max((m.g - n.g).abs())
    }))
}

#[test]
fn conjugate_preserves_the_metric() {
    let mut gaps = Vec::new();
    for (n, m) in [(31, 41), (61, 81)] {
        let x = helicoid(n, m);
        let y = conjugate_surface_anchored(&x, MinkVector4::ZERO, (0, 0), 1e-10).unwrap();
        // The stored tangents are J(dX), which is exactly isometric.
        assert!(metric_gap(&x, &y.grid) < 1e-12);
        // Differencing the integrated positions converges at second order or better.
        let fd = ParametricGrid::from_positions(x.lattice, y.grid.p.clone()).unwrap();
        gaps.push(metric_gap(&x, &fd));
    }
    assert!(gaps[0] / gaps[1] >= 3.5, "{gaps:?}");
}

#[test]
fn fixture_tangents_agree_with_positions() {
    let grids = |n: usize| {
        let l = Lattice::new(Rect::new(1.2, 2.0, -0.4, 0.4), n, n).unwrap();
        [
            fixtures::catenoid_graph_grid(l).unwrap(),
            fixtures::lightlike_example_grid(l, 1.0).unwrap(),
            fixtures::hyperbolic_helicoid_grid(l, 1.0).unwrap(),
            fixtures::first_type_graph_grid(l, fixtures::paraboloid).unwrap(),
        ]
    };
    let gap = |g: &ParametricGrid| {
        let fd = ParametricGrid::from_positions(g.lattice, g.p.clone()).unwrap();
        max_over(g.lattice.nodes().map(|ij| (fd.px[ij] - g.px[ij]).max_abs().max((fd.py[ij] - g.py[ij]).max_abs())))
    };
    for (coarse, fine) in grids(41).iter().zip(grids(81).iter()) {
        let (ec, ef) = (gap(coarse), gap(fine));
        // Exact for the paraboloid, whose positions are quadratic.
        assert!(ec < 1e-12 || ec / ef >= 3.5, "{ec} -> {ef}");
    }
}

#[test]
fn transported_graphs_satisfy_their_equations_to_second_order() {
    let spec = ThetaFamilySpec::new(
        parse_expr("exp(w)").unwrap(),
        parse_expr("exp(-w)/4").unwrap(),
        0.0,
        MinkVector4::ZERO,
        c(0.0, 0.0),
    );
    let residuals = |n: usize| {
        let params = TransportParams {
            xy: Lattice::new(Rect::new(0.5, 1.5, -0.5, 0.5), n, n).unwrap(),
            pq: Lattice::new(Rect::new(-2.0, -1.2, -0.4, 0.4), n, n).unwrap(),
            seed_xy: c(0.65, -0.8),
            seed_pq: c(1.3, 0.2),
            tol: 1e-12,
        };
        let (l3, e3) = transported_graphs(&spec, MinkVector4::ZERO, MinkVector4::new(0.0, -1.0, 0.0, 0.0), &params).unwrap();
        let calabi = special_equation_residual(SpecialEquation::CalabiGraph, &l3.a, params.xy.hx(), 1.0).unwrap();
        let euclid = special_equation_residual(SpecialEquation::EuclideanGraph, &e3.b, params.pq.hx(), 1.0).unwrap();
        assert_eq!(calabi.get("calabiGraphConstraint").unwrap().max_abs, 0.0);
        (
            calabi.get("calabiGraph").unwrap().max_abs,
            euclid.get("euclideanGraph").unwrap().max_abs,
        )
    };
    let (coarse, fine) = (residuals(21), residuals(41));
    for ratio in [coarse.0 / fine.0, coarse.1 / fine.1] {
        assert!((3.0..=5.0).contains(&ratio), "ratio {ratio}: {coarse:?} -> {fine:?}");
    }
}
