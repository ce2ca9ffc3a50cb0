use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A group table violating one of the group axioms. Indices are the labels
/// used in the input table.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupAxiom {
    #[error("entry ({row}, {col}) = {value} is not an element index (order {order})")]
    OutOfRange { row: usize, col: usize, value: usize, order: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {element} has no two-sided inverse")]
    NoInverse { element: usize },
    #[error("associativity fails at ({a}, {b}, {c}): (ab)c = {left}, a(bc) = {right}")]
    NotAssociative { a: usize, b: usize, c: usize, left: usize, right: usize },
    #[error("row {row} is not a permutation of the elements")]
    RowNotPermutation { row: usize },
    #[error("column {col} is not a permutation of the elements")]
    ColumnNotPermutation { col: usize },
}

impl GroupAxiom {
    /// Short name of the violated axiom.
    pub fn invariant(&self) -> &'static str {
        match self {
            GroupAxiom::OutOfRange { .. } => "closure",
            GroupAxiom::NoIdentity => "identity",
            GroupAxiom::NoInverse { .. } => "inverses",
            GroupAxiom::NotAssociative { .. } => "associativity",
            GroupAxiom::RowNotPermutation { .. } => "latin_rows",
            GroupAxiom::ColumnNotPermutation { .. } => "latin_columns",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid group table: {0}")]
    GroupAxiom(#[from] GroupAxiom),
    #[error("unknown group description `{0}`")]
    UnknownGroup(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("element index {index} out of range for a group of order {order}")]
    ElementOutOfRange { index: usize, order: usize },
    #[error("operands live on different groups")]
    GroupMismatch,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("symbol is not real-valued (element {element}, imaginary part {imag:e})")]
    NotReal { element: usize, imag: f64 },
    #[error("psi is not certified as conditionally of negative type: {0}")]
    NotCertified(String),
    #[error("cocycle construction failed: residual {residual:e} exceeds {limit:e}")]
    Construction { residual: f64, limit: f64 },
    #[error("matrix is not orthogonal (defect {0:e})")]
    NotOrthogonal(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("z = {z} hits the spectrum at element {element}")]
    Pole { z: String, element: usize },
    #[error("quadrature did not converge at psi = {value}: estimate {coarse}, refined {fine}")]
    Quadrature { value: f64, coarse: num_complex::Complex64, fine: num_complex::Complex64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
