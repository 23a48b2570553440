//! Exact planar primitives: points, predicates, piecewise-linear currents,
//! polynomial test forms, and measure/overlay computations.

pub mod clip;
pub mod current;
pub mod form;
pub mod hull;
pub mod overlay;
pub mod point;
pub mod predicates;

pub use current::{PLCurrent, PLRegion, Segment};
pub use form::{pair_curve, pair_region, Poly2, PolyForm};
pub use overlay::filler_area_bound;
pub use point::{Point, Vec2};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("form degree does not match current dimension: {0}")]
    DimensionMismatch(String),
    #[error("dilation factor must be positive, got {0}")]
    NonPositiveFactor(String),
    #[error("boundaries differ, no filler region exists: {0}")]
    BoundaryMismatch(String),
    #[error("invalid piecewise-linear current: {0}")]
    InvalidCurrent(String),
    #[error("invalid piecewise-linear region: {0}")]
    InvalidRegion(String),
}
