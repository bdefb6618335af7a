//! Lifting uv-quotient knot Floer complexes to full complexes over F[U],
//! computing the homology of the large surgery subquotients `A_k^+`, and
//! deciding property SpliFf for a knot and its mirror.

pub mod ak;
pub mod batch;
pub mod error;
pub mod gf2;
pub mod lift;
pub mod model;
pub mod spliff;

pub use error::{Error, Result};
