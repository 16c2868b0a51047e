use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("invalid point: {0}")]
    InvalidPoint(&'static str),
    #[error("determinant {0} is not 1")]
    InvalidIsometry(f64),
    #[error("invalid body: {0}")]
    InvalidBody(&'static str),
    #[error("invalid tangent vector: {0}")]
    InvalidTangent(&'static str),
    #[error("boundary point lies in the closure of the body")]
    BoundaryInsideBody,
    #[error("bodies intersect")]
    BodiesIntersect,
    #[error("bodies are tangent")]
    Tangent,
    #[error("vectors are not on the same leaf")]
    NotSameLeaf,
    #[error("argument outside the domain: {0}")]
    DomainError(&'static str),
}
