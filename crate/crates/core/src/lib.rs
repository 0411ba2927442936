//! Graphings over `Z × [0,1)^N`, their execution, and the encoding of
//! multihead automata as pairs of graphings.
//!
//! Everything is generic over an exact [`Scalar`]; the aliases below fix
//! it to arbitrary-precision rationals.

pub mod encodings;
pub mod equivalence;
pub mod error;
pub mod execution;
pub mod graphing;
pub mod oracle;
pub mod random;
pub mod realizers;
pub mod scalar;
pub mod space;

pub use error::{Error, Result};
pub use scalar::{Extended, Scalar};

/// Exact rational scalar used by the concrete aliases.
pub type Q = num_rational::BigRational;

pub type Interval = space::Interval<Q>;
pub type RationalBox = space::RationalBox<Q>;
pub type MeasurableSet = space::MeasurableSet<Q>;
pub type Point = space::Point<Q>;
pub type Realizer = realizers::Realizer<Q>;
pub type Microcosm = realizers::Microcosm<Q>;
pub type Graphing = graphing::Graphing<Q>;
pub type Edge = graphing::Edge<Q>;
pub type Execution = execution::Execution<Q>;
pub type MachineSpec = encodings::MachineSpec<Q>;
