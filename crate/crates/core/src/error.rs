use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("operands live in different variable contexts")]
    ContextMismatch,
    #[error("polynomial is not divisible by the given divisor")]
    NotDivisible,
    #[error("variable {0} occurs with a negative exponent but its image is not a monomial")]
    NonInvertibleImage(String),
    #[error("polynomial is not pointed: {0}")]
    NotPointed(String),
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("coefficient column {0} has mixed signs")]
    UnsignedColumn(usize),
    #[error("exchange matrix is not skew-symmetrizable")]
    NonSkewSymmetrizable,
    #[error("no cluster variable with g-vector {target:?} within depth {depth}")]
    NotFound { target: Vec<i64>, depth: usize },
    #[error("exchange matrix is not acyclic")]
    NotAcyclic,
    #[error("Cartan matrix is not of affine type")]
    NotAffineType,
    #[error("height bound {0} too small to close the tube orbits")]
    HeightBoundTooSmall(i64),
    #[error("arc length {len} out of range for a tube of size {k}")]
    LengthOutOfRange { len: usize, k: usize },
    #[error("root vector has a negative coordinate")]
    NegativeInput,
    #[error("root is not in the imaginary wall: {0}")]
    NotInImaginaryWall(String),
    #[error("set of arcs is not maximal compatible")]
    NotMaximal,
    #[error("arc is not a member of the set")]
    NotMember,
    #[error("identity violated: {0}")]
    IdentityViolated(String),
    #[error("peeling did not terminate within {0} steps")]
    NonTerminating(usize),
    #[error("exploration budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
