//! CSV and OBJ writers.

use std::io::Write;

use ndarray::Array2;

use minsurf4::conjugate::ParametricGrid;
use minsurf4::graphs::GraphGrid;
use minsurf4::minkowski::MinkVector4;
use minsurf4::weierstrass::SurfaceGrid;

use crate::config::Projection;
use crate::CliError;

pub const SURFACE_COLUMNS: [&str; 13] = ["u", "v", "f0", "f1", "f2", "f3", "E", "F", "G", "lambda2", "K", "nu3", "class"];
pub const GRAPH_COLUMNS: [&str; 9] = ["x", "y", "A", "B", "E", "F", "G", "K", "class"];
pub const PARAMETRIC_COLUMNS: [&str; 12] = ["x", "y", "P0", "P1", "P2", "P3", "E", "F", "G", "u", "v", "flags"];

/// 17 significant digits, enough to read every double back exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    fmt_f64(v.unwrap_or(f64::NAN))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// Row order: u-major, matching `[i, j]` lattice indexing.
pub fn write_surface_csv<W: Write>(out: W, grid: &SurfaceGrid) -> Result<(), CliError> {
    let l = grid.lattice;
    let rows = l.nodes().map(|ij| {
        let s = &grid.samples[ij];
        let mut row = vec![fmt_f64(l.x(ij.0)), fmt_f64(l.y(ij.1))];
        row.extend(s.f.0.iter().map(|&v| fmt_f64(v)));
        row.extend([s.metric.e, s.metric.f, s.metric.g].map(fmt_f64));
        row.push(fmt_opt(s.metric.lambda2));
        row.push(fmt_opt(s.k));
        row.push(fmt_opt(s.nu3));
        row.push(s.cls.as_str().to_string());
        row
    });
    write_rows(out, &SURFACE_COLUMNS, rows)
}

pub fn write_graph_csv<W: Write>(out: W, grid: &GraphGrid) -> Result<(), CliError> {
    let l = grid.lattice;
    let rows = l.nodes().map(|ij| {
        let m = grid.metric[ij];
        let mut row: Vec<String> = [l.x(ij.0), l.y(ij.1), grid.a[ij], grid.b[ij], m.e, m.f, m.g]
            .into_iter()
            .map(fmt_f64)
            .collect();
        row.push(fmt_opt(grid.curvature[ij]));
        row.push(grid.class[ij].as_str().to_string());
        row
    });
    write_rows(out, &GRAPH_COLUMNS, rows)
}

pub fn write_parametric_csv<W: Write>(
    out: W,
    grid: &ParametricGrid,
    u: &Array2<f64>,
    v: &Array2<f64>,
    flags: &Array2<&str>,
) -> Result<(), CliError> {
    let l = grid.lattice;
    let rows = l.nodes().map(|ij| {
        let m = grid.metric[ij];
        let mut row = vec![fmt_f64(l.x(ij.0)), fmt_f64(l.y(ij.1))];
        row.extend(grid.p[ij].0.iter().map(|&c| fmt_f64(c)));
        row.extend([m.e, m.f, m.g, u[ij], v[ij]].map(fmt_f64));
        row.push(flags[ij].to_string());
        row
    });
    write_rows(out, &PARAMETRIC_COLUMNS, rows)
}

/// Triangulated lattice with counter-clockwise faces in parameter order;
/// nodes with `keep == false` are dropped with every face touching them.
pub fn write_obj<W: Write>(
    mut out: W,
    positions: &Array2<MinkVector4>,
    keep: &Array2<bool>,
    projection: Projection,
) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    let (nx, ny) = positions.dim();
    let comps = projection.components();
    let mut index = Array2::<usize>::zeros((nx, ny));
    let mut next = 1;
    for i in 0..nx {
        for j in 0..ny {
            let p = positions[[i, j]];
            if keep[[i, j]] && p.is_finite() {
                writeln!(out, "v {} {} {}", fmt_f64(p[comps[0]]), fmt_f64(p[comps[1]]), fmt_f64(p[comps[2]])).map_err(io)?;
                index[[i, j]] = next;
                next += 1;
            }
        }
    }
    for i in 0..nx.saturating_sub(1) {
        for j in 0..ny.saturating_sub(1) {
            let (a, b, c, d) = (index[[i, j]], index[[i + 1, j]], index[[i + 1, j + 1]], index[[i, j + 1]]);
            for tri in [[a, b, c], [a, c, d]] {
                if tri.iter().all(|&k| k > 0) {
                    writeln!(out, "f {} {} {}", tri[0], tri[1], tri[2]).map_err(io)?;
                }
            }
        }
    }
    out.flush().map_err(io)
}
