//! Command dispatch and the run report.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use minsurf4::complex_fn::parse_expr;
use minsurf4::conjugate::{
    closedness_residual, conjugate_surface_anchored, cr_defects, j_one_form, nitsche_coordinates, scan_nodes,
    ParametricGrid,
};
use minsurf4::fd::{d1_fourth, Axis};
use minsurf4::fixtures;
use minsurf4::graphs::{
    first_type_spec, graph_grid, minimal_graph_residual, second_type_spec, special_equation_residual, GraphGrid,
    GraphKind, GraphSpec, SpecialEquation,
};
use minsurf4::lattice::Lattice;
use minsurf4::minkowski::{complex_bilinear, MinkVector4};
use minsurf4::report::{GateKind, ResidualEntry, ResidualReport};
use minsurf4::theta::{linking_defects, transported_graphs, ThetaFamilySpec, TransportParams};
use minsurf4::weierstrass::{
    derivative_vector, metric_consistency_defect, null_defect, sample_grid, second_form, PointClass, SurfaceGrid,
    WeierstrassData,
};

use crate::config::{complex, vector, Command, DataBlock, FamilyBlock, FixtureBlock, FixtureName, GraphType, Projection, RunConfig};
use crate::export::{write_graph_csv, write_obj, write_parametric_csv, write_surface_csv};
use crate::CliError;

pub const NULL_TOL: f64 = 1e-10;
pub const METRIC_TOL: f64 = 1e-10;
pub const NORMALITY_TOL: f64 = 1e-8;
pub const ISOMETRY_TOL: f64 = 1e-9;
pub const LINKING_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    /// Soft residual failures also fail the run.
    pub gate: bool,
    /// Overrides the configured quadrature tolerance.
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SampleCounts {
    pub total: usize,
    pub regular: usize,
    pub degenerate: usize,
    pub lightlike: usize,
    pub pole: usize,
}

impl SampleCounts {
    fn add(&mut self, other: SampleCounts) {
        self.total += other.total;
        self.regular += other.regular;
        self.degenerate += other.degenerate;
        self.lightlike += other.lightlike;
        self.pole += other.pole;
    }

    fn from_classes<'a>(classes: impl Iterator<Item = &'a PointClass>) -> Self {
        let mut c = SampleCounts::default();
        for cls in classes {
            c.total += 1;
            match cls {
                PointClass::Regular => c.regular += 1,
                PointClass::LightlikeSingular => c.lightlike += 1,
                PointClass::MetricDegenerate => c.degenerate += 1,
                PointClass::PoleOfData => c.pole += 1,
            }
        }
        c
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config: RunConfig,
    pub residuals: Vec<ResidualEntry>,
    pub samples: SampleCounts,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub report_path: PathBuf,
    pub exit_code: u8,
}

fn numerical(e: minsurf4::Error) -> CliError {
    CliError::Numerical(e.to_string())
}

fn invalid(e: minsurf4::Error) -> CliError {
    CliError::Config(e.to_string())
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Config data turned into library objects; failures here are config errors.
enum Prepared {
    Surface(WeierstrassData),
    Graph(GraphSpec),
    Family(ThetaFamilySpec, FamilyBlock),
    Fixture(FixtureBlock),
}

fn prepare(cfg: &RunConfig) -> Result<Prepared, CliError> {
    Ok(match &cfg.data {
        DataBlock::Weierstrass(w) => Prepared::Surface(
            WeierstrassData::parse(&w.a, &w.b, &w.mu, complex(w.w0), vector(w.x0)).map_err(invalid)?,
        ),
        DataBlock::Graph(g) => {
            let a = parse_expr(&g.a).map_err(invalid)?;
            let spec = match g.graph_type {
                GraphType::First => first_type_spec(a, complex(g.c)),
                GraphType::Second => second_type_spec(a, complex(g.c)),
            }
            .map_err(invalid)?;
            Prepared::Graph(spec.with_origin(complex(g.w0), vector(g.x0)))
        }
        DataBlock::Family(f) => {
            let spec = ThetaFamilySpec::new(
                parse_expr(&f.a).map_err(invalid)?,
                parse_expr(&f.mu).map_err(invalid)?,
                f.thetas[0],
                MinkVector4::ZERO,
                complex(f.w0),
            );
            if let Some(t) = &f.transport {
                for (name, d) in [("transport.xy", &t.xy), ("transport.pq", &t.pq)] {
                    let l = d.lattice()?;
                    if (l.hx() - l.hy()).abs() > 1e-12 * l.hx().max(l.hy()) {
                        return Err(CliError::Config(format!("{name}: graph equations need equal spacing on both axes")));
                    }
                }
            }
            Prepared::Family(spec, f.clone())
        }
        DataBlock::Fixture(f) => Prepared::Fixture(f.clone()),
    })
}

struct Ctx<'a> {
    cfg: &'a RunConfig,
    out_dir: &'a Path,
    report: ResidualReport,
    samples: SampleCounts,
}

impl Ctx<'_> {
    fn lattice(&self) -> Result<Lattice, CliError> {
        self.cfg.domain.lattice()
    }

    fn residual_tol(&self, l: &Lattice) -> f64 {
        let h = l.hx().max(l.hy());
        self.cfg.residual_tol.unwrap_or(10.0 * h * h)
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.out_dir.join(rel)
    }

    fn create(&self, rel: &str) -> Result<BufWriter<File>, CliError> {
        let path = self.path(rel);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        File::create(&path).map(BufWriter::new).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }

    fn projection(&self, fallback: Projection) -> Projection {
        self.cfg.outputs.projection.unwrap_or(fallback)
    }
}

/// `dir/name.ext` with `_tag` appended to the name.
fn tagged(path: &str, tag: &str) -> String {
    let p = Path::new(path);
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let name = match p.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{tag}.{ext}"),
        None => format!("{stem}_{tag}"),
    };
    match p.parent().filter(|d| !d.as_os_str().is_empty()) {
        Some(dir) => dir.join(name).to_string_lossy().into_owned(),
        None => name,
    }
}

fn prefixed(report: ResidualReport, prefix: &str) -> ResidualReport {
    let mut out = ResidualReport::new();
    for mut e in report.entries {
        e.name = format!("{prefix}{}", e.name);
        out.push(e);
    }
    out
}

/// Null condition, metric consistency and harmonicity of a sampled surface.
fn surface_suite(grid: &SurfaceGrid, rtol: f64) -> ResidualReport {
    let l = grid.lattice;
    let (hx, hy) = (l.hx(), l.hy());
    let defined = |s: &&minsurf4::weierstrass::SurfaceSample| s.cls != PointClass::PoleOfData;
    let mut r = ResidualReport::new();
    r.record("nullCondition", grid.samples.iter().filter(defined).map(null_defect), NULL_TOL, GateKind::Hard, None);
    r.record(
        "metricConsistency",
        grid.samples.iter().filter(defined).map(metric_consistency_defect),
        METRIC_TOL,
        GateKind::Hard,
        None,
    );
    let f = grid.samples.map(|s| s.f);
    let harmonic = l.interior().filter_map(|(i, j)| {
        let stencil = [(i, j), (i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)];
        if stencil.iter().any(|&ij| grid.samples[ij].cls == PointClass::PoleOfData) {
            return None;
        }
        let lap = (1.0 / (hx * hx)) * (f[[i + 1, j]] + f[[i - 1, j]] - 2.0 * f[[i, j]])
            + (1.0 / (hy * hy)) * (f[[i, j + 1]] + f[[i, j - 1]] - 2.0 * f[[i, j]]);
        Some(lap.max_abs())
    });
    r.record("harmonicity", harmonic, rtol, GateKind::Soft, Some(hx.max(hy)));
    r
}

/// Curvature against −Δ ln λ / λ² on the grid, and normality of the second form.
fn curvature_suite(data: &WeierstrassData, grid: &SurfaceGrid) -> Result<ResidualReport, CliError> {
    let l = grid.lattice;
    let (hx, hy) = (l.hx(), l.hy());
    let h = hx.max(hy);
    let regular = |i: usize, j: usize| grid.samples[[i, j]].cls == PointClass::Regular;
    let ln_l = |i: usize, j: usize| 0.5 * grid.samples[[i, j]].metric.e.ln();
    let oracle = l.interior().filter_map(|(i, j)| {
        let stencil = [(i, j), (i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)];
        if !stencil.iter().all(|&(a, b)| regular(a, b)) {
            return None;
        }
        let k = grid.samples[[i, j]].k?;
        let lap = (ln_l(i + 1, j) + ln_l(i - 1, j) - 2.0 * ln_l(i, j)) / (hx * hx)
            + (ln_l(i, j + 1) + ln_l(i, j - 1) - 2.0 * ln_l(i, j)) / (hy * hy);
        let fd = -lap / grid.samples[[i, j]].metric.e;
        Some((k - fd).abs() / k.abs().max(1.0))
    });
    let mut r = ResidualReport::new();
    r.record("curvatureOracle", oracle, 1e-5f64.max(50.0 * h * h), GateKind::Soft, Some(h));
    let mut normality = Vec::new();
    for s in grid.samples.iter().filter(|s| s.cls == PointClass::Regular) {
        let n = second_form(data, s.w).map_err(numerical)?.normal_part();
        let scale = (n.norm() * s.f_w.norm()).max(1.0);
        let worst = complex_bilinear(&n, &s.f_w).norm().max(complex_bilinear(&n, &s.f_w.conj()).norm());
        normality.push(worst / scale);
    }
    r.record("secondFormNormality", normality, NORMALITY_TOL, GateKind::Hard, None);
    Ok(r)
}

fn sample(ctx: &Ctx, data: &WeierstrassData) -> Result<SurfaceGrid, CliError> {
    let d = ctx.cfg.domain;
    sample_grid(data, d.rect(), d.nx, d.ny, ctx.cfg.tol).map_err(numerical)
}

fn export_surface(ctx: &Ctx, grid: &SurfaceGrid, csv: Option<String>, obj: Option<String>) -> Result<(), CliError> {
    if let Some(p) = csv {
        write_surface_csv(ctx.create(&p)?, grid)?;
    }
    if let Some(p) = obj {
        let keep = grid.samples.map(|s| s.cls == PointClass::Regular);
        write_obj(ctx.create(&p)?, &grid.samples.map(|s| s.f), &keep, ctx.projection(Projection::First3))?;
    }
    Ok(())
}

fn run_surface(ctx: &mut Ctx, data: &WeierstrassData, curvature: bool, suite: bool) -> Result<(), CliError> {
    let grid = sample(ctx, data)?;
    ctx.samples = SampleCounts::from_classes(grid.samples.iter().map(|s| &s.cls));
    if suite {
        let rtol = ctx.residual_tol(&grid.lattice);
        ctx.report.extend(surface_suite(&grid, rtol));
    }
    if curvature {
        ctx.report.extend(curvature_suite(data, &grid)?);
    }
    export_surface(ctx, &grid, ctx.cfg.outputs.csv_path.clone(), ctx.cfg.outputs.obj_path.clone())
}

fn graph_positions(grid: &GraphGrid) -> Array2<MinkVector4> {
    let l = grid.lattice;
    Array2::from_shape_fn((l.nx, l.ny), |(i, j)| {
        let (x, y, a, b) = (l.x(i), l.y(j), grid.a[[i, j]], grid.b[[i, j]]);
        match grid.kind {
            GraphKind::FirstType => MinkVector4::new(a, x, y, b),
            GraphKind::SecondType => MinkVector4::new(x, a, b, y),
        }
    })
}

fn export_graph(ctx: &Ctx, grid: &GraphGrid, csv: Option<String>, obj: Option<String>) -> Result<(), CliError> {
    if let Some(p) = csv {
        write_graph_csv(ctx.create(&p)?, grid)?;
    }
    if let Some(p) = obj {
        let keep = grid.class.map(|c| *c == PointClass::Regular);
        write_obj(ctx.create(&p)?, &graph_positions(grid), &keep, ctx.projection(Projection::XyA))?;
    }
    Ok(())
}

fn run_graph(ctx: &mut Ctx, spec: &GraphSpec) -> Result<(), CliError> {
    let l = ctx.lattice()?;
    let grid = graph_grid(spec, l, ctx.cfg.tol).map_err(numerical)?;
    ctx.samples = SampleCounts::from_classes(grid.class.iter());
    let r = minimal_graph_residual(&grid, ctx.residual_tol(&l)).map_err(numerical)?;
    ctx.report.extend(r);
    export_graph(ctx, &grid, ctx.cfg.outputs.csv_path.clone(), ctx.cfg.outputs.obj_path.clone())
}

fn fixture_grid(f: &FixtureBlock, l: Lattice) -> minsurf4::Result<ParametricGrid> {
    match f.name {
        FixtureName::Helicoid => fixtures::helicoid_grid(l),
        FixtureName::CatenoidGraph => fixtures::catenoid_graph_grid(l),
        FixtureName::LightlikeExample => fixtures::lightlike_example_grid(l, f.k),
        FixtureName::HyperbolicHelicoid => fixtures::hyperbolic_helicoid_grid(l, f.k),
        FixtureName::Paraboloid => fixtures::first_type_graph_grid(l, fixtures::paraboloid),
    }
}

fn parametric_grid(ctx: &Ctx, prepared: &Prepared) -> Result<ParametricGrid, CliError> {
    match prepared {
        Prepared::Surface(data) => {
            let s = sample(ctx, data)?;
            ParametricGrid::from_surface_grid(&s, data).map_err(numerical)
        }
        Prepared::Fixture(f) => fixture_grid(f, ctx.lattice()?).map_err(numerical),
        _ => unreachable!("validated data kind"),
    }
}

/// Fourth-order differences of the positions against the stored tangents.
fn tangent_consistency(grid: &ParametricGrid, rtol: f64) -> ResidualReport {
    let l = grid.lattice;
    let (hx, hy) = (l.hx(), l.hy());
    let gaps = l.interior().map(|(i, j)| {
        let dx = d1_fourth(&grid.p, i, j, hx, Axis::X) - grid.px[[i, j]];
        let dy = d1_fourth(&grid.p, i, j, hy, Axis::Y) - grid.py[[i, j]];
        dx.max_abs().max(dy.max_abs())
    });
    let mut r = ResidualReport::new();
    r.record("tangentConsistency", gaps, rtol, GateKind::Soft, Some(hx.max(hy)));
    r
}

struct Flags {
    flags: Array2<&'static str>,
    samples: SampleCounts,
}

fn lightcone_flags(grid: &ParametricGrid) -> Flags {
    let scan = scan_nodes(grid);
    let mut flags = Array2::from_elem((grid.lattice.nx, grid.lattice.ny), "regular");
    for &ij in &scan.lightlike {
        flags[ij] = "lightlike";
    }
    for &ij in &scan.timelike {
        flags[ij] = "timelike";
    }
    for &ij in &scan.singular {
        flags[ij] = "singular";
    }
    let total = flags.len();
    let degenerate = scan.timelike.len() + scan.singular.len();
    Flags {
        flags,
        samples: SampleCounts {
            total,
            regular: total - degenerate - scan.lightlike.len(),
            degenerate,
            lightlike: scan.lightlike.len(),
            pole: 0,
        },
    }
}

fn keep_mask(flags: &Array2<&str>) -> Array2<bool> {
    flags.map(|f| *f == "regular" || *f == "timelike")
}

fn export_parametric(
    ctx: &Ctx,
    grid: &ParametricGrid,
    u: &Array2<f64>,
    v: &Array2<f64>,
    flags: &Array2<&str>,
) -> Result<(), CliError> {
    if let Some(p) = &ctx.cfg.outputs.csv_path {
        write_parametric_csv(ctx.create(p)?, grid, u, v, flags)?;
    }
    if let Some(p) = &ctx.cfg.outputs.obj_path {
        write_obj(ctx.create(p)?, &grid.p, &keep_mask(flags), ctx.projection(Projection::Last3))?;
    }
    Ok(())
}

fn metric_gap(x: &ParametricGrid, y: &ParametricGrid) -> Vec<f64> {
    x.lattice
        .nodes()
        .map(|ij| {
            let (a, b) = (x.metric[ij], y.metric[ij]);
            let gap = (a.e - b.e).abs().max((a.f - b.f).abs()).max((a.g - b.g).abs());
            gap / a.e.abs().max(a.g.abs()).max(1.0)
        })
        .collect()
}

fn run_conjugate(ctx: &mut Ctx, prepared: &Prepared) -> Result<(), CliError> {
    let g = parametric_grid(ctx, prepared)?;
    let l = g.lattice;
    let h = Some(l.hx().max(l.hy()));
    let rtol = ctx.residual_tol(&l);
    let Flags { flags, samples } = lightcone_flags(&g);
    ctx.samples = samples;
    ctx.report.extend(tangent_consistency(&g, rtol));
    let form = j_one_form(&g).map_err(numerical)?;
    ctx.report.extend(closedness_residual(&form, &l, rtol).map_err(numerical)?);
    let (node, value) = match ctx.cfg.anchor {
        Some(a) => ((a.node[0], a.node[1]), vector(a.value)),
        None => ((0, 0), MinkVector4::ZERO),
    };
    let conj = conjugate_surface_anchored(&g, value, node, ctx.cfg.tol).map_err(numerical)?;
    ctx.report.record("pathDependence", [conj.path_dependence], rtol, GateKind::Soft, h);
    ctx.report.record("metricPreservation", metric_gap(&g, &conj.grid), ISOMETRY_TOL, GateKind::Hard, None);
    let chart = nitsche_coordinates(&g, ctx.cfg.tol).map_err(numerical)?;
    let cr = cr_defects(&chart.u, &chart.v, &g).map_err(numerical)?;
    ctx.report.record("crResidual", cr, rtol, GateKind::Soft, h);
    export_parametric(ctx, &conj.grid, &chart.u, &chart.v, &flags)
}

fn run_scan(ctx: &mut Ctx, prepared: &Prepared) -> Result<(), CliError> {
    let g = parametric_grid(ctx, prepared)?;
    let l = g.lattice;
    let rtol = ctx.residual_tol(&l);
    let Flags { flags, samples } = lightcone_flags(&g);
    ctx.samples = samples;
    ctx.report.extend(tangent_consistency(&g, rtol));
    let nan = Array2::from_elem((l.nx, l.ny), f64::NAN);
    // The chart only exists where the whole patch is spacelike.
    let (u, v) = if samples.regular == samples.total {
        let chart = nitsche_coordinates(&g, ctx.cfg.tol).map_err(numerical)?;
        (chart.u, chart.v)
    } else {
        (nan.clone(), nan)
    };
    export_parametric(ctx, &g, &u, &v, &flags)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ManifestMember {
    index: usize,
    theta: f64,
    anchor: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    obj: Option<String>,
    residuals: Vec<ResidualEntry>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ManifestTransport {
    #[serde(skip_serializing_if = "Option::is_none")]
    l3_csv: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    e3_csv: Option<String>,
    residuals: Vec<ResidualEntry>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Manifest {
    thetas: Vec<f64>,
    members: Vec<ManifestMember>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transport: Option<ManifestTransport>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

fn linking_suite(spec: &ThetaFamilySpec, l: &Lattice) -> Result<ResidualReport, CliError> {
    let (mut link, mut jac) = (Vec::new(), Vec::new());
    let x_data = spec.at(0.0, spec.p0).data();
    let y_data = spec.at(std::f64::consts::PI, spec.p0).data();
    for (a, b) in l.nodes() {
        let w = Complex64::new(l.x(a), l.y(b));
        let (xw, yw) = match (derivative_vector(&x_data, w), derivative_vector(&y_data, w)) {
            (Ok(x), Ok(y)) => (x, y),
            // Poles of the data are reported by the member grids.
            _ => continue,
        };
        let scale = xw.norm().max(1.0);
        let d = linking_defects(spec, w, 0.0, std::f64::consts::PI).map_err(numerical)?;
        link.push(d.iter().sum::<f64>() / scale);
        let jx = xw[1] * xw[2].conj() - xw[1].conj() * xw[2];
        let jy = yw[1] * yw[2].conj() - yw[1].conj() * yw[2];
        jac.push((jx - jy).norm() / (scale * scale));
    }
    let mut r = ResidualReport::new();
    r.record("linking", link, LINKING_TOL, GateKind::Hard, None);
    r.record("jacobianEquality", jac, LINKING_TOL, GateKind::Hard, None);
    Ok(r)
}

fn run_family(ctx: &mut Ctx, spec: &ThetaFamilySpec, block: &FamilyBlock) -> Result<(), CliError> {
    let mut members = Vec::new();
    let csv_stem = ctx.cfg.outputs.csv_path.clone();
    let obj_stem = ctx.cfg.outputs.obj_path.clone();
    for (k, &theta) in block.thetas.iter().enumerate() {
        let anchor = block.anchors.as_ref().map_or([0.0; 4], |a| a[k]);
        let data = spec.at(theta, vector(anchor)).data();
        let grid = sample(ctx, &data)?;
        ctx.samples.add(SampleCounts::from_classes(grid.samples.iter().map(|s| &s.cls)));
        let suite = surface_suite(&grid, ctx.residual_tol(&grid.lattice));
        let csv = csv_stem.as_deref().map(|p| tagged(p, &k.to_string()));
        let obj = obj_stem.as_deref().map(|p| tagged(p, &k.to_string()));
        export_surface(ctx, &grid, csv.clone(), obj.clone())?;
        members.push(ManifestMember {
            index: k,
            theta,
            anchor,
            csv,
            obj,
            residuals: suite.entries.clone(),
        });
        ctx.report.extend(prefixed(suite, &format!("theta{k}.")));
    }
    ctx.report.extend(linking_suite(spec, &ctx.lattice()?)?);

    let transport = match &block.transport {
        None => None,
        Some(t) => {
            let params = TransportParams {
                xy: t.xy.lattice()?,
                pq: t.pq.lattice()?,
                seed_xy: complex(t.seed_xy),
                seed_pq: complex(t.seed_pq),
                tol: ctx.cfg.tol,
            };
            let (l3, e3) =
                transported_graphs(spec, vector(t.anchor_l3), vector(t.anchor_e3), &params).map_err(numerical)?;
            let mut r = ResidualReport::new();
            let calabi = special_equation_residual(SpecialEquation::CalabiGraph, &l3.a, params.xy.hx(), ctx.residual_tol(&params.xy));
            let euclid = special_equation_residual(SpecialEquation::EuclideanGraph, &e3.b, params.pq.hx(), ctx.residual_tol(&params.pq));
            r.extend(calabi.map_err(numerical)?);
            r.extend(euclid.map_err(numerical)?);
            let l3_csv = csv_stem.as_deref().map(|p| tagged(p, "l3"));
            let e3_csv = csv_stem.as_deref().map(|p| tagged(p, "e3"));
            export_graph(ctx, &l3, l3_csv.clone(), None)?;
            export_graph(ctx, &e3, e3_csv.clone(), None)?;
            let entries = r.entries.clone();
            ctx.report.extend(r);
            Some(ManifestTransport {
                l3_csv,
                e3_csv,
                residuals: entries,
            })
        }
    };
    let manifest = Manifest {
        thetas: block.thetas.clone(),
        members,
        transport,
    };
    write_json(&ctx.path(MANIFEST_NAME), &manifest)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn execute(ctx: &mut Ctx, prepared: &Prepared) -> Result<(), CliError> {
    match (ctx.cfg.command, prepared) {
        (Command::Generate, Prepared::Surface(d)) => run_surface(ctx, d, false, true),
        (Command::Curvature, Prepared::Surface(d)) => run_surface(ctx, d, true, false),
        (Command::Check, Prepared::Surface(d)) => run_surface(ctx, d, true, true),
        (Command::Graph | Command::Check, Prepared::Graph(s)) => run_graph(ctx, s),
        (Command::Conjugate, p) => run_conjugate(ctx, p),
        (Command::Scan, p) => run_scan(ctx, p),
        (Command::Family, Prepared::Family(s, b)) => run_family(ctx, s, b),
        _ => unreachable!("validated command and data kind"),
    }
}

pub const DEFAULT_REPORT: &str = "report.json";

/// Runs one configuration, writing every artifact under `opts.out_dir`.
///
/// Config errors are returned before anything is written; numerical failures
/// still produce a report carrying the error message.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<RunOutcome, CliError> {
    let mut cfg = config.clone();
    if let Some(t) = opts.tol {
        cfg.tol = t;
    }
    cfg.validate()?;
    let prepared = prepare(&cfg)?;
    std::fs::create_dir_all(&opts.out_dir).map_err(io)?;
    let mut ctx = Ctx {
        cfg: &cfg,
        out_dir: &opts.out_dir,
        report: ResidualReport::new(),
        samples: SampleCounts::default(),
    };
    let error = match execute(&mut ctx, &prepared) {
        Ok(()) if ctx.samples.pole > 0 => Some(format!("{} samples hit a pole of the data", ctx.samples.pole)),
        Ok(()) => None,
        Err(CliError::Numerical(m)) => Some(m),
        Err(e) => return Err(e),
    };
    let exit_code = if error.is_some() {
        3
    } else if !ctx.report.hard_pass() || (opts.gate && !ctx.report.all_pass()) {
        1
    } else {
        0
    };
    let report_path = ctx.path(cfg.outputs.report_path.as_deref().unwrap_or(DEFAULT_REPORT));
    let report = RunReport {
        command: cfg.command.name().to_string(),
        config: cfg.clone(),
        residuals: ctx.report.entries,
        samples: ctx.samples,
        error,
    };
    if let Some(dir) = report_path.parent() {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    write_json(&report_path, &report)?;
    Ok(RunOutcome {
        report,
        report_path,
        exit_code,
    })
}
