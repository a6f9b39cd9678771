use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("precision must be at least one digit")]
    ZeroPrecision,
    #[error("{p}^{precision} does not fit in 64 bits")]
    PrecisionTooLarge { p: u64, precision: u32 },
    #[error("{0} is not a unit")]
    NotUnit(u128),
    #[error("insufficient guard digits: need {needed} effective digits, have {available}")]
    GuardDigits { needed: u32, available: u32 },
    #[error("precision exhausted")]
    PrecisionExhausted,
    #[error("value is not divisible by p^{0}")]
    NotDivisible(u32),
    #[error("measure is not supported on the units")]
    NotUnitSupported,
    #[error("seed point {0} is not a unit")]
    NonUnitSeed(u128),
    #[error("Frobenius-twisted sum does not terminate after {0} terms")]
    DivergentSeed(usize),
    #[error("nonzero coefficient at ({k},{l}) pushed past level {level}")]
    Clipped { k: usize, l: usize, level: usize },
    #[error("level {level} exceeds bound {bound}")]
    LevelOverflow { level: usize, bound: usize },
    #[error("series order {have} is below the required {need}")]
    InsufficientOrder { have: usize, need: usize },
    #[error("product of two 1-forms")]
    FormDegree,
    #[error("expected a series in {expected} variable(s)")]
    Arity { expected: usize },
    #[error("incompatible coefficient rings")]
    RingMismatch,
    #[error("point must have positive valuation")]
    PointNotInDisc,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {field}: {msg}")]
    Config { field: &'static str, msg: String },
}
