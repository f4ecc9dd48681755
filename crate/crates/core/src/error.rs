use thiserror::Error;

use crate::exact::Rational;

/// Contract violations and invalid inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    /// Two coordinates in one predicate share a perturbation index; a
    /// coordinate cannot be compared against itself.
    #[error("perturbation index {0} appears more than once in one predicate")]
    DuplicateIndex(usize),
    #[error("query perturbation indices must be larger than every mesh index (query starts at {query}, mesh ends at {mesh})")]
    QueryIndexOrder { query: usize, mesh: usize },
    #[error("interval is reversed: {l} > {r}")]
    ReversedInterval { l: Box<Rational>, r: Box<Rational> },
    #[error("edge endpoints must be distinct points (both are point {0})")]
    DegenerateEdge(usize),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),
    #[error("invalid cube set: {0}")]
    InvalidCubes(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
