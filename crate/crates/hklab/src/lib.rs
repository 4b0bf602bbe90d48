//! Numerical realization of an interpolating family of involutions on the
//! space of n x n matrices with real eigenvalues.
//!
//! The family `alpha_a`, a in [0, 1], connects entrywise conjugation (a = 0)
//! to transpose (a = 1) while preserving the characteristic polynomial and
//! the conjugacy class. It is computed through a quiver-variety model: a
//! matrix is encoded as a linear-algebra representative on a moment-map level
//! set ([`bridge`]), balanced inside its gauge orbit by Kempf-Ness flow, and
//! rotated by the quaternionic structure of the representation space
//! ([`quiver`]). Tracing the fixed locus of `alpha_a` in `a` yields a
//! homeomorphism from real matrices onto complex symmetric ones ([`tracer`]),
//! which at nilpotent matrices realizes the classical orbit correspondence
//! tabulated in [`orbits`]. Restricted-root multiplicities, the associated
//! Hecke-algebra parameters, and fiber-dimension bounds for the real Springer
//! map live in [`hecke`]. Batch verification drivers are in [`verify`].

pub mod bridge;
pub mod error;
pub mod hecke;
pub mod involution;
pub mod json;
pub mod linalg;
pub mod orbits;
pub mod quiver;
pub mod tracer;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMat, JordanType, RMat, SpectralData, Tolerances};
