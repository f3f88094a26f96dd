//! Crate-wide error type.
//!
//! Every fallible operation in the crate reports one of these variants.
//! The variants form a closed taxonomy that the CLI maps onto exit codes,
//! so adding a variant means deciding its exit class as well.

use std::fmt;

/// Errors raised by exact-arithmetic and adelic operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An operation that requires a nonzero input (e.g. a valuation) got zero.
    ZeroInput,
    /// A polynomial failed to split into linear factors over the current
    /// base field. Carries a rendering of the irreducible factor that
    /// refused to split, so the caller can report which extension is needed.
    NeedsLargerField { factor: String },
    /// Hensel splitting was requested for a polynomial whose reduction is
    /// not separable (discriminant valuation positive).
    WildOrInseparableResidue { detail: String },
    /// A local factorization hit a ramification index divisible by the
    /// characteristic, or an inseparable residual polynomial.
    UnsupportedWildRamification { detail: String },
    /// A truncated series was queried beyond its stored precision.
    PrecisionExhausted { detail: String },
    /// The jet-lattice index did not stabilize after widening the cutoffs.
    CutoffTooNarrow { place: String },
    /// A slot of the local decomposition could not be matched with a unique
    /// fiber place within the working precision.
    RoutingAmbiguous { place: String, slot: usize },
    /// Bounded witness search exhausted its budget without success.
    WitnessNotFound { bound: u32 },
    /// A content computation was requested for a non-invertible element.
    NotAUnit,
    /// Two values from different base fields were combined.
    FieldMismatch,
    /// An input was rejected (unsupported degree, unverifiable certificate,
    /// malformed data).
    Unsupported { detail: String },
    /// Instance or expression text failed to parse.
    Parse { detail: String },
    /// Two routes that must agree (by theorem) disagreed. This is a bug,
    /// never a property of the input.
    Inconsistency { detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroInput => write!(f, "operation undefined for zero input"),
            Error::NeedsLargerField { factor } => {
                write!(f, "needs larger base field: {factor} does not split")
            }
            Error::WildOrInseparableResidue { detail } => {
                write!(f, "residue polynomial not separable: {detail}")
            }
            Error::UnsupportedWildRamification { detail } => {
                write!(f, "unsupported wild ramification: {detail}")
            }
            Error::PrecisionExhausted { detail } => write!(f, "precision exhausted: {detail}"),
            Error::CutoffTooNarrow { place } => {
                write!(f, "jet lattice cutoff too narrow at {place}")
            }
            Error::RoutingAmbiguous { place, slot } => {
                write!(f, "no unique fiber match for slot {slot} at {place}")
            }
            Error::WitnessNotFound { bound } => {
                write!(f, "no witness found within height bound {bound}")
            }
            Error::NotAUnit => write!(f, "element is not a unit"),
            Error::FieldMismatch => write!(f, "values belong to different base fields"),
            Error::Unsupported { detail } => write!(f, "unsupported: {detail}"),
            Error::Parse { detail } => write!(f, "parse error: {detail}"),
            Error::Inconsistency { detail } => {
                write!(f, "internal consistency failure (bug): {detail}")
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
