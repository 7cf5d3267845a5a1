use thiserror::Error;

use crate::algebra::AlgebraTag;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot double {base:?}: tables beyond the octonions are not provided")]
    DoublingLimit { base: AlgebraTag },
    #[error("doubling {base:?} is not provided (use the isomorphic construction from {hint:?})")]
    UnsupportedDoubling { base: AlgebraTag, hint: AlgebraTag },
    #[error("algebra mismatch: {left:?} vs {right:?}")]
    TagMismatch { left: AlgebraTag, right: AlgebraTag },
    #[error("coefficient count {got} does not match algebra dimension {expected}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("vector length {got} does not match dimension {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid space parameters: {0}")]
    InvalidSpace(String),
    #[error("point is off the quadric: <x,x> = {value}, expected {expected}")]
    OffQuadric { value: f64, expected: f64 },
    #[error("vector is not tangent: <p,v> = {0}")]
    NotTangent(f64),
    #[error("degenerate subspace: {0}")]
    Degenerate(String),
    #[error("null vector where a unit vector is required (<X,X> = {0})")]
    NullVector(f64),
    #[error("vector is not horizontal (vertical component {0})")]
    NotHorizontal(f64),
    #[error("base vector is not in the image of the differential (residual {0})")]
    NotInImage(f64),
    #[error("points are not on a common fibre (residual {0})")]
    NotOnFibre(f64),
    #[error("incompatible composition: {0}")]
    IncompatibleComposition(String),
    #[error("unknown fibration id `{0}`")]
    UnknownFibration(String),
    #[error("invalid fibration parameters: {0}")]
    InvalidParameters(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("unknown identity `{0}` in tolerance override")]
    UnknownIdentity(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
