use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical and geometric layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("pole encountered at w = {w}")]
    PoleEncountered { w: Complex64 },

    #[error("non-finite value produced at w = {w}")]
    NonFinite { w: Complex64 },

    #[error("quadrature tolerance {tol:e} not met on [{start}, {end}] (estimated error {estimate:e})")]
    ToleranceNotMet {
        start: Complex64,
        end: Complex64,
        tol: f64,
        estimate: f64,
    },

    #[error("input vectors are not an orthonormal spacelike pair")]
    NonOrthonormalInput,

    #[error("orthogonal complement is not a timelike plane")]
    DegenerateComplement,

    #[error("null direction projects to the point at infinity")]
    ProjectionPole,

    #[error("degenerate metric (area element {area:e})")]
    DegenerateMetric { area: f64 },

    #[error("constant c = {c} is excluded: first-type graphs need c ∈ ℂ∖{{0,1,−1}} with |c| ≠ 1")]
    InvalidConstantC { c: Complex64 },

    #[error("constant c = {c} is real: second-type graphs need Im(c) ≠ 0")]
    RealConstantC { c: Complex64 },

    #[error("a(w) vanishes at w = {w}")]
    ZeroOfA { w: Complex64 },

    #[error("node ({i}, {j}) lies on the grid boundary")]
    BoundaryNode { i: usize, j: usize },

    #[error("grid {nx}x{ny} is smaller than the required {min}x{min}")]
    TooSmallGrid { nx: usize, ny: usize, min: usize },

    #[error("coordinate map folds near ({x}, {y}): {reason}")]
    FoldDetected { x: f64, y: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
