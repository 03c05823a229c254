use thiserror::Error;

/// Errors reported by shape construction, word validation, tracing, and the
/// exact/Monte Carlo estimators.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument is outside its documented domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A word contains a letter outside 1..=n-1, or n < 2.
    #[error("letter {letter} at position {position} is outside 1..={max} for rank {n}")]
    LetterOutOfRange {
        letter: usize,
        position: usize,
        max: usize,
        n: usize,
    },

    /// Two letters on adjacent diagonals repeat without the other in between.
    /// Positions are 0-based indices into the word.
    #[error(
        "word is not alternating: letters {i} and {j} at positions {first} and {second} \
         repeat on adjacent diagonals with no separating letter"
    )]
    NotAlternating {
        i: usize,
        j: usize,
        first: usize,
        second: usize,
    },

    /// A box violates 1 <= x - y <= n - 1.
    #[error("box ({x}, {y}) has diagonal {d}, outside 1..={max}")]
    DiagonalOutOfRange { x: i64, y: i64, d: i64, max: i64 },

    /// The same box was listed twice.
    #[error("box ({x}, {y}) listed more than once")]
    DuplicateBox { x: i64, y: i64 },

    /// An operation that walks pipes through the shape needs order-convexity.
    #[error("shape is not order-convex: box ({x}, {y}) lies between members but is missing")]
    NotOrderConvex { x: i64, y: i64 },

    /// The operation would materialize or enumerate more state than supported.
    #[error("input too large for {what}: {detail}")]
    TooLarge { what: &'static str, detail: String },

    /// A linear system had no usable pivot.
    #[error("singular linear system while {0}")]
    Singular(&'static str),

    /// Malformed input file (JSON shape/word/tiling payloads).
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
