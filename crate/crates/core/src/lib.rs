//! Exact construction and analysis of Wigner representations of convex
//! state spaces with respect to a pair of observables.
//!
//! All decisions are made in exact rational arithmetic. Polytope state
//! spaces are handled through linear programs whose answers carry either a
//! witness or a Farkas certificate; ball state spaces are handled in closed
//! form with values of the shape `a + b√s`.

pub mod catalog;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod symmetry;
pub mod theory;
pub mod wigner;

pub use error::{Error, Result};
pub use exact::{Rational, RationalMatrix};
pub use geometry::{AffineFunctional, AffineMap, ExtremalValue, StateSpace};
pub use theory::{Channel, Observable, Theory};
pub use wigner::WignerRep;
