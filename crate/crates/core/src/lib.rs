//! Ortholength invariants and coherent parameters for cusped hyperbolic
//! 3-manifolds: lines as traceless matrices, Gram realization, ideal
//! triangulations, developing maps and the figure-8 knot example.

pub mod coherence;
pub mod continuation;
pub mod develop;
pub mod error;
pub mod fig8;
pub mod gram;
pub mod mat2;
pub mod orthinv;
pub mod tolerance;
pub mod triangulation;

pub use error::{Error, ErrorClass, Result};
pub use tolerance::Tolerances;
