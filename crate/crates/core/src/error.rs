use alloc::string::String;

/// Errors raised by the algebraic core.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoreError {
    #[error("malformed group: {0}")]
    MalformedGroup(String),
    #[error("malformed group element: expected {expected} residues, found {found}")]
    MalformedElement { expected: usize, found: usize },
    #[error("unknown variable x{0}")]
    UnknownVariable(u32),
    #[error("variable x{id} declared with conflicting degrees ({first}) and ({second})")]
    DegreeConflict { id: u32, first: String, second: String },
    #[error("graded substitution error: image of x{id} is not homogeneous of degree ({expected})")]
    GradedSubstitution { id: u32, expected: String },
    #[error("graded evaluation error: {0}")]
    GradedEvaluation(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("resource guard exceeded: {what} (estimate {estimate}, limit {limit})")]
    ResourceGuard { what: String, estimate: u128, limit: u128 },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("variable x{0} does not carry a Z2 degree")]
    NonZ2Variable(u32),
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("index {index} out of range 1..={bound}")]
    OutOfRange { index: usize, bound: usize },
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
