//! Adaptive Gauss–Kronrod (7, 15) quadrature along straight complex segments.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance of the Weierstrass integrals.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Default recursion limit for bisection.
pub const DEFAULT_MAX_DEPTH: u32 = 24;

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss abscissae.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Straight integration contour from `start` to `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSegment {
    pub start: Complex64,
    pub end: Complex64,
}

impl PathSegment {
    pub fn new(start: Complex64, end: Complex64) -> Self {
        Self { start, end }
    }

    pub fn is_degenerate(&self) -> bool {
        self.start == self.end
    }
}

/// Polyline through the given vertices.
pub fn polyline(points: &[Complex64]) -> Vec<PathSegment> {
    points
        .windows(2)
        .map(|p| PathSegment::new(p[0], p[1]))
        .collect()
}

struct Panel<const N: usize> {
    kronrod: [Complex64; N],
    error: f64,
    abs_mass: f64,
}

fn gk15<const N: usize, F>(f: &F, a: Complex64, b: Complex64) -> Result<Panel<N>>
where
    F: Fn(Complex64) -> Result<[Complex64; N]>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let zero = [Complex64::new(0.0, 0.0); N];
    let mut kronrod = zero;
    let mut gauss = zero;
    let mut abs_mass = 0.0;

    let mut accumulate = |values: [Complex64; N], wk: f64, wg: Option<f64>| {
        for c in 0..N {
            kronrod[c] += wk * values[c];
            if let Some(wg) = wg {
                gauss[c] += wg * values[c];
            }
            abs_mass += wk * values[c].norm();
        }
    };

    for k in 0..8 {
        let wg = if k % 2 == 1 { Some(WG[k / 2]) } else { None };
        if k == 7 {
            accumulate(f(center)?, WGK[k], wg);
        } else {
            let dx = half * XGK[k];
            accumulate(f(center - dx)?, WGK[k], wg);
            accumulate(f(center + dx)?, WGK[k], wg);
        }
    }

    let mut error: f64 = 0.0;
    for c in 0..N {
        kronrod[c] *= half;
        gauss[c] *= half;
        error = error.max((kronrod[c] - gauss[c]).norm());
    }
    Ok(Panel {
        kronrod,
        error,
        abs_mass: abs_mass * half.norm(),
    })
}

fn adapt<const N: usize, F>(
    f: &F,
    a: Complex64,
    b: Complex64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<[Complex64; N]>
where
    F: Fn(Complex64) -> Result<[Complex64; N]>,
{
    let panel = gk15(f, a, b)?;
    // Below this floor the Gauss/Kronrod difference is rounding noise.
    let floor = 64.0 * f64::EPSILON * panel.abs_mass;
    if panel.error <= tol.max(floor) {
        return Ok(panel.kronrod);
    }
    if depth >= max_depth {
        return Err(Error::ToleranceNotMet {
            start: a,
            end: b,
            tol,
            estimate: panel.error,
        });
    }
    let mid = 0.5 * (a + b);
    let left = adapt(f, a, mid, 0.5 * tol, depth + 1, max_depth)?;
    let right = adapt(f, mid, b, 0.5 * tol, depth + 1, max_depth)?;
    let mut out = left;
    for c in 0..N {
        out[c] += right[c];
    }
    Ok(out)
}

/// Integrates a vector-valued function of the complex variable along one segment.
///
/// The estimated absolute error of every component is at most `tol`.
pub fn integrate_segment<const N: usize, F>(
    f: &F,
    segment: PathSegment,
    tol: f64,
    max_depth: u32,
) -> Result<[Complex64; N]>
where
    F: Fn(Complex64) -> Result<[Complex64; N]>,
{
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "quadrature tolerance must be positive, got {tol}"
        )));
    }
    if segment.is_degenerate() {
        return Ok([Complex64::new(0.0, 0.0); N]);
    }
    adapt(f, segment.start, segment.end, tol, 0, max_depth)
}

/// Integrates along a polyline, splitting the tolerance evenly between segments.
pub fn integrate_path<const N: usize, F>(
    f: &F,
    path: &[PathSegment],
    tol: f64,
) -> Result<[Complex64; N]>
where
    F: Fn(Complex64) -> Result<[Complex64; N]>,
{
    let share = tol / path.len().max(1) as f64;
    let mut total = [Complex64::new(0.0, 0.0); N];
    for &segment in path {
        let part = integrate_segment(f, segment, share, DEFAULT_MAX_DEPTH)?;
        for c in 0..N {
            total[c] += part[c];
        }
    }
    Ok(total)
}

/// Integrates a real function along the real segment `[a, b]`.
pub fn integrate_real<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let g = |z: Complex64| Ok([Complex64::new(f(z.re)?, 0.0)]);
    let seg = PathSegment::new(Complex64::new(a, 0.0), Complex64::new(b, 0.0));
    Ok(integrate_segment(&g, seg, tol, DEFAULT_MAX_DEPTH)?[0].re)
}
