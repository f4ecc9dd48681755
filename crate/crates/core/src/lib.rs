//! Exact computational-geometry kernel with Simulation of Simplicity.
//!
//! Coordinates are exact rationals. Each input coordinate receives a unique
//! perturbation index `i` and is treated as `x + ε^(2^i)` for an infinitesimal
//! `ε`, so orientation tests never return zero and every degenerate
//! configuration resolves consistently. The predicates are evaluated in plain
//! exact arithmetic plus comparisons of indices.
//!
//! Modules:
//!
//! * [`exact`] rational scalars and small determinants
//! * [`sos`] perturbation indices, the tie-breaking comparison, ε-polynomials
//!   and perturbed orientation in 2D and 3D
//! * [`predicates`] half-open point-on-edge, ray/edge crossing, segment crossing
//! * [`planar`] point in polygon and polyline intersection counting
//! * [`cubes`] volume, area and edge length of a union of equal axis-aligned cubes
//! * [`mesh3d`] point location in a closed triangle mesh over a uniform grid
//! * [`oracle`] symbolic and concrete-δ reference evaluations used by tests
//! * [`io`] the text formats read by the command-line tool

pub mod cubes;
pub mod error;
pub mod exact;
pub mod io;
pub mod mesh3d;
pub mod oracle;
pub mod planar;
pub mod predicates;
pub mod shapes;
pub mod sos;

pub use error::{GeomError, Result};
pub use exact::{parse_exact, Rational, Sign};
