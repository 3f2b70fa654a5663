use thiserror::Error;

use crate::theory::Violation;

/// Errors raised by the engine. Analysis verdicts (incompatible, not positive,
/// no covariant representation, ...) are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("a polytope needs at least one vertex")]
    EmptyPolytope,

    #[error("ball radius must be positive")]
    NonPositiveRadius,

    #[error("vertex {index} is not an extreme point of the listed set")]
    RedundantVertex { index: usize },

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("unsupported degenerate face: effect {observable}[{outcome}] is identically one on a ball")]
    UnsupportedDegenerateFace { observable: String, outcome: usize },

    #[error("point lies outside the state space")]
    OutsideStateSpace,

    #[error("observable {0} has no outcomes")]
    NoOutcomes(String),

    #[error("observable {name}: {outcomes} outcome labels but {effects} effects")]
    OutcomeCount {
        name: String,
        outcomes: usize,
        effects: usize,
    },

    #[error("theory is invalid: {} violation(s)", .0.len())]
    InvalidTheory(Vec<Violation>),

    #[error("grid shape mismatch: expected {rows}x{cols}")]
    GridShape { rows: usize, cols: usize },

    #[error("marginal violation: {0}")]
    Marginals(String),

    #[error("expected {expected} free functionals, got {found}")]
    FreeParameterCount { expected: usize, found: usize },

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("representation is not faithful")]
    NotFaithful,

    #[error("map is not a symmetry of the representation")]
    NotASymmetry,

    #[error("map does not send the state space into the target")]
    NotAChannel,

    #[error("channel does not satisfy the requested effect equations")]
    ChannelEquations,

    #[error("group too large: more than {limit} elements")]
    GroupTooLarge { limit: usize },

    #[error("numeric containment check was inconclusive")]
    Inconclusive,

    #[error("channels required for ball backend")]
    ChannelsRequired,

    #[error("unknown catalog entry: {0}")]
    UnknownEntry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
