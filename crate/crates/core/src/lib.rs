//! Flat norm decompositions of piecewise-linear currents in the plane.
//!
//! The library is organized around one pipeline: exact planar currents
//! ([`geom`]), simplicial 2-complexes and chains ([`complex`]), quality
//! triangulation with localized small angles ([`triangulate`]), deformation of
//! currents onto a complex ([`deform`]), the simplicial flat norm as an exact
//! totally-unimodular linear program ([`flatnorm`]), polyhedral approximation
//! of curves ([`approx`]), and end-to-end experiments ([`pipeline`]).
//!
//! All geometric predicates and current identities are evaluated in exact
//! rational arithmetic; floating point appears only in reported measures
//! (lengths, areas, angles) and in conservative filters.

pub mod approx;
pub mod complex;
pub mod deform;
pub mod flatnorm;
pub mod geom;
pub mod io;
pub mod pipeline;
pub mod rat;
pub mod triangulate;

pub use geom::{PLCurrent, PLRegion, Point};
pub use rat::Rat;

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
