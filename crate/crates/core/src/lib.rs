//! redukit-core: computational structure theory for reductive matrix groups.
//!
//! Given a real matrix Lie algebra, a reductive subalgebra presented in a
//! transpose-stable basis, and a finite-dimensional representation, this
//! crate builds the Cartan-adapted machinery (involution, positive form,
//! adapted inner product), splits off centralizers and commutants, factors
//! group elements through the Mostow coordinates `k * exp(P) * exp(Z)`,
//! certifies the non-contraction constant of translated orbit pieces via a
//! convexity inequality and a small linear program, and decides the
//! boundedness/focusing dichotomy on one-parameter families.

pub mod bounds;
pub mod cartan;
pub mod error;
pub mod focusing;
pub mod liealg;
pub mod numerics;
pub mod presets;
pub mod reductive_pair;
pub mod sampling;

pub use error::{Error, Result};
pub use numerics::{Mat, Vector};
