use thiserror::Error;

use crate::geometry::Position;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A field model was queried outside the region where it is defined.
    #[error("position ({x}, {y}, {z}) nm lies outside the field grid")]
    OutOfDomain { x: f64, y: f64, z: f64 },

    #[error("phase is undefined: projected field magnitude {magnitude:e} is below 1e-14")]
    UndefinedPhase { magnitude: f64 },

    #[error("degenerate reference: double sum {denominator:e} is not positive")]
    DegenerateReference { denominator: f64 },

    #[error("degenerate source: {0}")]
    DegenerateSource(String),

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("expected {expected} samples, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("at sweep point {index}")]
    AtGridPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn out_of_domain(r: Position) -> Self {
        Error::OutOfDomain {
            x: r.x,
            y: r.y,
            z: r.z,
        }
    }

    pub(crate) fn at_point(index: usize, source: Error) -> Self {
        Error::AtGridPoint {
            index,
            source: Box::new(source),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
