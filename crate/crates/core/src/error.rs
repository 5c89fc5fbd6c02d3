use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cyclic factor order must be at least 1")]
    NonPositiveOrder,
    #[error("group order {0} exceeds the supported limit")]
    GroupTooLarge(u128),
    #[error("element {element:?} is not a member of {context}")]
    ElementOutOfRange { element: Vec<i64>, context: String },
    #[error("{0} is not a subgroup of the ambient group")]
    NotASubgroup(String),
    #[error("quotient exponent {0} is not prime")]
    NonPrimeExponent(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{p}G is not contained in the subgroup")]
    ScaleNotContained { p: u64 },
    #[error("homomorphism relation violated: {order} * h(e_{generator}) != 0")]
    RelationViolation { generator: usize, order: u64 },
    #[error("homomorphism expects {expected} generator images, got {actual}")]
    ImageCount { expected: usize, actual: usize },
    #[error("missing pseudonorm value for element {0:?}")]
    MissingValue(Vec<i64>),
    #[error("pseudonorm value for {0:?} is negative")]
    NegativeValue(Vec<i64>),
    #[error("base pseudonorm fails validation: {0}")]
    InvalidBaseNorm(String),
    #[error("collections use different set sizes ({0} vs {1})")]
    MismatchedUniformity(usize, usize),
    #[error("set {index} has {actual} elements, expected {expected}")]
    NotUniform {
        index: usize,
        expected: usize,
        actual: usize,
    },
    #[error("sets {0} and {1} of one collection overlap")]
    NotDisjoint(usize, usize),
    #[error("set of size {size} is not divisible by {p}")]
    NotDivisible { size: usize, p: usize },
    #[error("padded collections differ: {0}")]
    PaddingMismatch(String),
    #[error("matrix is not doubly stochastic: {0}")]
    NotDoublyStochastic(String),
    #[error("window too small: a representative needs coordinates up to {required}")]
    WindowTooSmall { required: i64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}
