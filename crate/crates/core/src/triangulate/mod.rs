//! Quality triangulation: PSLG ingestion, rotated-grid superposition, and
//! encroachment-driven Delaunay refinement with localized small angles.

pub mod angles;
pub mod cdt;
pub mod grid;
pub mod localize;
pub mod pslg;
pub mod refine;

pub use angles::{choose_rotation, forbidden_angles, AngleSet, Rotation};
pub use grid::{superimpose_grid, GridSpec};
pub use localize::{localize, small_angle_locations, LocalizeReport, SmallAngleAudit};
pub use pslg::{node_segments, Pslg, PslgSegment, RawSegment, SegTag};
pub use refine::{refine, Mesh, MeshEdgeTag, RefineParams, RefineStats};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TriangulateError {
    #[error("invalid PSLG: {0}")]
    InvalidPslg(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("refinement size cap exceeded: {0}")]
    SizeCap(String),
    #[error(transparent)]
    Complex(#[from] crate::complex::ComplexError),
}
