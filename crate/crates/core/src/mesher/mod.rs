//! Conforming, tagged, graded triangulations of full and perforated domains.
//!
//! Delaunay refinement with a Lipschitz size field resolves holes whose
//! radius sits orders of magnitude below ε; circles enter as
//! perimeter-preserving inscribed polygons so the discrete boundary measure
//! carries the exact mass. Torus domains are meshed on a fundamental square
//! whose cut lines avoid all holes, with mirrored seam traces identified
//! vertex-by-vertex.

mod build;
mod cdt;
mod format;
mod mesh;
mod refine;

pub use build::{
    hole_size, ngon_count, polygon_radius, size_field_for, triangulate_full,
    triangulate_perforated, MeshBundle, SizeField,
};
pub use format::{read_mesh, write_mesh, FORMAT_HEADER};
pub use mesh::{EdgeTag, Locator, Mesh};

use thiserror::Error;

/// Quality bound enforced on every produced triangle.
pub const MIN_ANGLE_DEG: f64 = 20.0;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh quality failure: minimum angle {min_angle}°")]
    QualityFailure { min_angle: f64 },
    #[error("hole polygon interference between pairs {pairs:?}")]
    HoleResolutionFailure { pairs: Vec<(usize, usize)> },
    #[error("mesh structure error: {0}")]
    Structure(String),
    #[error("mesh format error: {0}")]
    Format(String),
}
