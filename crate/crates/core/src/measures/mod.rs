//! Boundary measures, §-style trial functions, dual-norm witnesses, and
//! mollified potentials.

mod measure;

pub use measure::{
    cell_ratio, pair, polygon_quadrature, triangle_quadrature, BoundaryMeasure, WeightedCircle,
    DEFAULT_CIRCLE_NODES,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("trial support 2r leaves its cell at hole {hole_index} (2r = {support}, clearance {clearance})")]
    SupportOverflow {
        hole_index: usize,
        support: f64,
        clearance: f64,
    },
    #[error("mollifier tube of width {delta} overlaps: limit {limit}")]
    TubeOverlap { delta: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
