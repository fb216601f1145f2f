use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// Variants are grouped by how a caller should react: `Validation` means the
/// input was malformed, `Domain` means the input is well-formed but sits where
/// the mathematics is undefined (the indeterminacy locus, an exceptional
/// point), and `Numerical` means tolerances were too tight or too loose to
/// make a decision.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("not a projective point")]
    NotProjectivePoint,

    #[error("singular Möbius matrix")]
    SingularMobius,

    #[error("roots undefined for the zero polynomial")]
    RootsUndefined,

    #[error("gcd undefined: both polynomials are zero")]
    GcdOfZeros,

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("map lies in the indeterminacy locus I(d): iteration and the measure map do not extend continuously to it")]
    Indeterminate,

    #[error("composition vanished")]
    CompositionVanished,

    #[error("exceptional point")]
    ExceptionalPoint,

    #[error("hole matching ambiguous, tighten tolerances")]
    AmbiguousHoleMatch,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("data error: {0}")]
    Data(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::DegreeMismatch(_)
            | Error::NotProjectivePoint
            | Error::GcdOfZeros
            | Error::RootsUndefined
            | Error::SingularMobius => 2,
            Error::Indeterminate | Error::ExceptionalPoint | Error::Data(_) => 3,
            Error::CompositionVanished | Error::AmbiguousHoleMatch | Error::Numerical(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
