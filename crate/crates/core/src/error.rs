use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({u}, {v}) lies outside the unit square")]
    OutsideUnitSquare { u: f64, v: f64 },

    #[error("inadmissible bound parameters: {0}")]
    Inadmissible(String),

    #[error("mixture weight t = {0} must lie in [0, 1]")]
    WeightOutOfRange(f64),

    #[error("grid order {n} is below the minimum of {min}")]
    GridTooSmall { n: usize, min: usize },

    #[error("not 2-increasing: cell ({i}, {j}) has mass {mass:e}")]
    NegativeMass { i: usize, j: usize, mass: f64 },

    #[error("invalid checkerboard: {0}")]
    InvalidCheckerboard(String),

    #[error("asymmetry level m = {0} must lie in [0, 1/3]")]
    AsymmetryOutOfRange(f64),

    #[error("{kind} value {value} lies outside its global range [{lo}, {hi}]")]
    MeasureOutOfRange {
        kind: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("point ({a}, {b}) is outside the triangle Δ_m for m = {m}")]
    OutsideTriangle { a: f64, b: f64, m: f64 },

    #[error("the triangle Δ_m degenerates at m = {0}; scans need 0 < m < 1/3")]
    DegenerateTriangle(f64),

    #[error("{mode} evaluation is not supported for {what}")]
    UnsupportedMode { mode: &'static str, what: String },

    #[error("invalid copula spec '{spec}': {reason}")]
    InvalidSpec { spec: String, reason: String },

    #[error("invalid {name} '{value}': {reason}")]
    InvalidArgument {
        name: &'static str,
        value: String,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
