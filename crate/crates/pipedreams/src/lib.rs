//! Random subwords of words in the adjacent transpositions s_1..s_{n-1},
//! realized as random cross/bump tilings of box shapes ("pipe dreams"), with
//! exact and Monte Carlo estimators for the inversion number of the permutation
//! a random subword sorts to, and simulators for the lattice walks the pipes
//! perform.
//!
//! Module layout:
//! - [`word`]: words in adjacent transpositions, permutations, inversion counting.
//! - [`shape`]: box shapes on the diagonals 1..n-1, heap construction from a
//!   word, order-convexity and related predicates.
//! - [`pipedream`]: random tilings of a shape, the exit permutation computed
//!   algebraically and by tracing pipes, SVG rendering.
//! - [`walk`]: the facing pair chain of two pipes, its asymptotic variance, the
//!   associated normal CDF, first-meeting simulation, and tail bounds.
//! - [`estimate`]: exact oracles and deterministic parallel Monte Carlo for
//!   expected inversions, plus the statistical experiment tables.
//! - [`cli`]: the `pipedream` command line.

pub mod cli;
pub mod error;
pub mod estimate;
pub mod pipedream;
pub mod shape;
pub mod walk;
pub mod word;

pub use error::{Error, Result};
