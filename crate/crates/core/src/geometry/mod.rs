//! Perforation geometry: separated sites, Voronoi cells, site classes, hole
//! radii and signed parameters, and the α(ε) schedules.
//!
//! All operations are pure functions of their inputs and safe to call from
//! concurrent workers.

mod domain;
mod perforate;
mod point;
mod potential;
mod schedule;
mod separated;
mod voronoi;

pub use domain::FlatDomain;
pub use perforate::{
    classify_sites, hole_radius, perforate, Hole, PerforatedDomain, SiteClass,
    NEAR_ZERO_EXPONENT,
};
pub use point::{
    point_in_polygon, point_segment_dist, polygon_signed_area, Point2,
};
pub use potential::PotentialField;
pub use schedule::{validate_schedule, AlphaSchedule, ScheduleReport, ScheduleRow};
pub use separated::{build_separated_set, verification_grid, SeparatedSet};
pub use voronoi::{voronoi, VoronoiCell};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("maximality could not be certified: grid point ({}, {}) uncovered at eps {eps}", point.0, point.1)]
    GridCoverageFailure { point: (f64, f64), eps: f64 },
    #[error("degenerate Voronoi cell at site {site_index} (area {area})")]
    DegenerateCell { site_index: usize, area: f64 },
    #[error("cell areas sum to {total_area}, domain area is {domain_area}")]
    PartitionFailure { total_area: f64, domain_area: f64 },
    #[error("perforation too large at this eps: {} site(s), radius {radius} vs clearance {clearance}", sites.len())]
    PerforationTooLarge {
        sites: Vec<(f64, f64)>,
        radius: f64,
        clearance: f64,
    },
    #[error("flex-power exponent p0 = {p0} outside (1, 2)")]
    InvalidExponent { p0: f64 },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
