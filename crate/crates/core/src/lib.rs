//! Bordered invariants of tangle diagrams over the rational-function field
//! of characteristic two: the cleaved-link algebra, twisted type D and type
//! A structures, their pairing into a chain complex, reduction to the
//! free-circle-free model, and weight-move isomorphisms.

pub mod cleaved;
pub mod corpus;
pub mod diagram;
pub mod field;
pub mod fixtures;
pub mod pairing;
pub mod planar;
pub mod reduce;
pub mod type_a;
pub mod type_d;
pub mod weightmoves;

/// The coefficient field every structure is linear over.
pub type Coeff = field::RationalFunction;
/// The evaluation field used for randomized certification.
pub type EvalField = field::Gf2e;
