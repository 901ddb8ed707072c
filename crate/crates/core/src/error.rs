use thiserror::Error;

use crate::syntax::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("constant `{0}` has no image under the pre-interpretation")]
    UnmappedConstant(String),

    #[error("grounding would produce {needed} rule instances (cap {cap})")]
    GroundingCap { needed: u128, cap: u64 },

    #[error("Herbrand base has {size} atoms (enumeration cap {cap})")]
    BaseCap { size: usize, cap: usize },

    #[error("extension space of {needed} candidate interpretations exceeds cap {cap}")]
    ExtensionCap { needed: u128, cap: u64 },

    #[error("role nominal `{0}` must be normalized before this step")]
    TupleNominal(String),

    #[error("program predicate `{0}` collides with a predicate introduced by the translation")]
    NameCollision(String),

    #[error("name `{0}` has no extension in the interpretation")]
    UndeclaredName(String),

    #[error("arity mismatch for `{name}`: expected {expected}, found {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("ill-formed interpretation: {0}")]
    Structure(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}
