use thiserror::Error;

use crate::coalition::{Coalition, PlayerId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("game needs at least one player")]
    NoPlayers,

    #[error("{n} players exceed the limit of {limit} for this representation")]
    TooManyPlayers { n: usize, limit: usize },

    #[error("no value supplied for coalition {0}")]
    MissingCoalition(Coalition),

    #[error("coalition {0} was supplied more than once")]
    DuplicateCoalition(Coalition),

    #[error("coalition {coalition} references players outside 0..{n}")]
    InvalidCoalition { coalition: Coalition, n: usize },

    #[error("player {player} is out of range for a {n}-player game")]
    InvalidPlayer { player: PlayerId, n: usize },

    #[error("player {player} is already a member of {coalition}")]
    PlayerInCoalition {
        player: PlayerId,
        coalition: Coalition,
    },

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("two-type worth table must be {rows}x{cols}, got {actual} entries")]
    TableShapeMismatch {
        rows: usize,
        cols: usize,
        actual: usize,
    },

    #[error("games have different player counts ({left} vs {right})")]
    PlayerCountMismatch { left: usize, right: usize },

    #[error("value {0} is not finite")]
    NonFinite(f64),

    #[error("mixing weight {0} is outside [0, 1]")]
    InvalidAlpha(f64),

    #[error("{0}-player game is too large for an exhaustive superadditivity check")]
    TooLargeForExactCheck(usize),

    #[error("game is not symmetric")]
    NotSymmetric,

    #[error("coalition size {size} is out of range for {n} players")]
    OutOfRange { size: usize, n: usize },

    #[error("weighting is not a probability distribution: {0}")]
    InvalidWeighting(String),

    #[error(
        "{n}-player game exceeds the exact limit of {limit}; use Monte Carlo sampling instead"
    )]
    GameTooLargeForExact { n: usize, limit: usize },

    #[error("{0}-player game is too large for full permutation enumeration (max 10)")]
    TooManyPlayersForOracle(usize),

    #[error("variance evaluated to {variance}, below the rounding floor")]
    NumericalInstability { variance: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("at least 2 samples are required, got {0}")]
    InsufficientSamples(usize),

    #[error("at least one chunk is required")]
    NoChunks,

    #[error("uncertainty {0} is negative")]
    NegativeVariance(f64),

    #[error("bound is undefined for a zero value")]
    ZeroValue,

    #[error("threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),

    #[error("every sampled pair had a vanishing uncertainty denominator")]
    DegenerateDenominators,

    #[error("size {0} is not representable for this family: {1}")]
    SizeNotRepresentable(usize, String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid ordering: {0}")]
    InvalidOrdering(String),
}
