use thiserror::Error;

/// Errors raised by the library. Variants named `*Violation` indicate that a
/// mechanically checked identity failed; they are never expected on valid
/// input and point at a bug.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("not a bijection of 0..{0}")]
    NotABijection(usize),
    #[error("closure exceeded the element cap of {cap}")]
    CapExceeded { cap: usize },
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("order bound {r} is not the prime dividing {m}")]
    InvalidOrderBound { m: u64, r: u64 },

    #[error("row {row} is not a bijection (C1)")]
    RowNotBijective { row: usize },
    #[error("cycloid equation fails at x={x}, y={y}, z={z} (C2)")]
    CycloidViolation { x: usize, y: usize, z: usize },
    #[error("diagonal x -> x*x is not a bijection (C3)")]
    DiagonalNotBijective,
    #[error("entry {value} at ({row},{col}) is outside 0..{n}")]
    EntryOutOfRange { row: usize, col: usize, value: usize, n: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cycle set is decomposable")]
    NotIndecomposable,
    #[error("size {n} exceeds the supported cap {cap}")]
    SizeCapExceeded { n: usize, cap: usize },

    #[error("brace axiom violated: {0}")]
    AxiomViolation(String),
    #[error("subset is not a left ideal")]
    NotALeftIdeal,
    #[error("element {0} is not central")]
    NotCentral(usize),
    #[error("element {0} is not a multiplicative involution")]
    NotInvolution(usize),
    #[error("hypothesis fails: {0}")]
    HypothesisFails(String),

    #[error("image array has length {got}, expected {expected}")]
    ImageLength { got: usize, expected: usize },
    #[error("not additive: phi({a}+{b}) != phi({a})+phi({b})")]
    NotAdditiveHom { a: usize, b: usize },
    #[error("coefficients are not a class function: k({g}) differs from its conjugate by {h}")]
    NotCentralInGroupRing { g: usize, h: usize },
    #[error("endomorphisms live on different braces")]
    BraceMismatch,
    #[error("endomorphism is not a (relative) lambda-endomorphism")]
    NotRelativeEndo,
    #[error("endomorphism is not a full lambda-endomorphism")]
    NotFullEndo,
    #[error("brace has no permutation realization")]
    NotPermutationBrace,
    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("appendix model is defined for v in {{3,4}}, got {0}")]
    UnsupportedV(u32),
    #[error("inconsistent search model: {0}")]
    InconsistentSpec(String),
    #[error("unsupported size {n} for {what}")]
    UnsupportedSize { n: usize, what: &'static str },
    #[error("{0} requires the extended flag")]
    RequiresExtended(String),
}

pub type Result<T> = std::result::Result<T, Error>;
