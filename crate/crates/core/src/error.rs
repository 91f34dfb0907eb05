use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("beamwidth {0} rad is outside the open interval (0, pi)")]
    BeamwidthDomain(f64),

    #[error("degenerate geometry: candidate position ({x}, {y}) coincides with a receiver")]
    DegenerateGeometry { x: f64, y: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cost surface has no contrast (max == min)")]
    DegenerateSurface,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
