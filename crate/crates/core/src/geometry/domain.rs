use super::point::{
    point_in_polygon, point_segment_dist, polygon_signed_area, segments_properly_intersect, Point2,
};
use super::GeometryError;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// The model manifold: a flat unit-cell torus or a planar polygon with a
/// Dirichlet part `Γ` (edge indices) and a per-edge Robin weight `Σ` on the
/// rest of the boundary.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FlatDomain {
    Torus {
        side: f64,
    },
    Polygon {
        /// CCW simple closed loop; edge `i` runs from vertex `i` to `i+1`.
        vertices: Vec<Point2>,
        /// Boundary edge indices carrying the zero-trace condition.
        dirichlet_edges: BTreeSet<usize>,
        /// Robin weight per edge, defined exactly on the non-Dirichlet edges.
        robin_weights: BTreeMap<usize, f64>,
    },
}

impl FlatDomain {
    pub fn unit_torus() -> Self {
        FlatDomain::Torus { side: 1.0 }
    }

    pub fn torus(side: f64) -> Result<Self, GeometryError> {
        if !(side > 0.0) || !side.is_finite() {
            return Err(GeometryError::InvalidDomain(format!(
                "torus side must be positive and finite, got {side}"
            )));
        }
        Ok(FlatDomain::Torus { side })
    }

    /// Build a polygon domain, checking simplicity, orientation and the
    /// `Γ`/`Σ` edge partition.
    pub fn polygon(
        vertices: Vec<Point2>,
        dirichlet_edges: BTreeSet<usize>,
        robin_weights: BTreeMap<usize, f64>,
    ) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::InvalidDomain(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidDomain(
                "polygon has non-finite vertices".into(),
            ));
        }
        let area = polygon_signed_area(&vertices);
        if area <= 0.0 {
            return Err(GeometryError::InvalidDomain(format!(
                "polygon must be positively oriented with area > 0 (signed area {area})"
            )));
        }
        for i in 0..n {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            if a.dist(b) < 1e-14 {
                return Err(GeometryError::InvalidDomain(format!(
                    "degenerate edge {i}"
                )));
            }
            for j in (i + 1)..n {
                let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if !adjacent && segments_properly_intersect(a, b, c, d) {
                    return Err(GeometryError::InvalidDomain(format!(
                        "polygon is not simple: edges {i} and {j} cross"
                    )));
                }
            }
        }
        if let Some(&bad) = dirichlet_edges.iter().find(|&&e| e >= n) {
            return Err(GeometryError::InvalidDomain(format!(
                "dirichlet edge index {bad} out of range (n = {n})"
            )));
        }
        for e in 0..n {
            let is_dirichlet = dirichlet_edges.contains(&e);
            let has_weight = robin_weights.contains_key(&e);
            if is_dirichlet && has_weight {
                return Err(GeometryError::InvalidDomain(format!(
                    "edge {e} is Dirichlet but carries a Robin weight"
                )));
            }
            if !is_dirichlet && !has_weight {
                return Err(GeometryError::InvalidDomain(format!(
                    "edge {e} is neither Dirichlet nor weighted"
                )));
            }
        }
        if robin_weights.values().any(|w| !w.is_finite()) {
            return Err(GeometryError::InvalidDomain(
                "Robin weights must be finite".into(),
            ));
        }
        Ok(FlatDomain::Polygon {
            vertices,
            dirichlet_edges,
            robin_weights,
        })
    }

    /// Axis-aligned unit square `[0,1]²` with edges bottom, right, top, left.
    pub fn unit_square(
        dirichlet_edges: impl IntoIterator<Item = usize>,
        robin_weight: f64,
    ) -> Result<Self, GeometryError> {
        let vertices = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let dirichlet: BTreeSet<usize> = dirichlet_edges.into_iter().collect();
        let robin = (0..4)
            .filter(|e| !dirichlet.contains(e))
            .map(|e| (e, robin_weight))
            .collect();
        Self::polygon(vertices, dirichlet, robin)
    }

    pub fn area(&self) -> f64 {
        match self {
            FlatDomain::Torus { side } => side * side,
            FlatDomain::Polygon { vertices, .. } => polygon_signed_area(vertices),
        }
    }

    /// Geodesic diameter: `L/√2` for the torus, max vertex distance for polygons.
    pub fn diameter(&self) -> f64 {
        match self {
            FlatDomain::Torus { side } => side * std::f64::consts::FRAC_1_SQRT_2,
            FlatDomain::Polygon { vertices, .. } => {
                let mut d: f64 = 0.0;
                for i in 0..vertices.len() {
                    for j in (i + 1)..vertices.len() {
                        d = d.max(vertices[i].dist(vertices[j]));
                    }
                }
                d
            }
        }
    }

    /// Geodesic distance (wrap-around metric on the torus).
    pub fn dist(&self, a: Point2, b: Point2) -> f64 {
        match self {
            FlatDomain::Torus { side } => {
                let d = self.wrap_delta(a - b, *side);
                d.norm()
            }
            FlatDomain::Polygon { .. } => a.dist(b),
        }
    }

    fn wrap_delta(&self, d: Point2, side: f64) -> Point2 {
        let mut dx = d.x.rem_euclid(side);
        let mut dy = d.y.rem_euclid(side);
        if dx > side / 2.0 {
            dx -= side;
        }
        if dy > side / 2.0 {
            dy -= side;
        }
        Point2::new(dx, dy)
    }

    /// Canonical representative of a point: in `[0,L)²` on the torus, identity
    /// on polygons.
    pub fn wrap(&self, p: Point2) -> Point2 {
        match self {
            FlatDomain::Torus { side } => {
                Point2::new(p.x.rem_euclid(*side), p.y.rem_euclid(*side))
            }
            FlatDomain::Polygon { .. } => p,
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self {
            FlatDomain::Torus { .. } => true,
            FlatDomain::Polygon { vertices, .. } => point_in_polygon(p, vertices),
        }
    }

    /// Distance from a point to the boundary `∂M` (infinite for the torus).
    pub fn boundary_dist(&self, p: Point2) -> f64 {
        match self {
            FlatDomain::Torus { .. } => f64::INFINITY,
            FlatDomain::Polygon { vertices, .. } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| point_segment_dist(p, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        match self {
            FlatDomain::Torus { side } => (Point2::new(0.0, 0.0), Point2::new(*side, *side)),
            FlatDomain::Polygon { vertices, .. } => {
                let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    lo.x = lo.x.min(v.x);
                    lo.y = lo.y.min(v.y);
                    hi.x = hi.x.max(v.x);
                    hi.y = hi.y.max(v.y);
                }
                (lo, hi)
            }
        }
    }

    pub fn is_torus(&self) -> bool {
        matches!(self, FlatDomain::Torus { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_metric_wraps() {
        let t = FlatDomain::unit_torus();
        let a = Point2::new(0.05, 0.5);
        let b = Point2::new(0.95, 0.5);
        assert!((t.dist(a, b) - 0.1).abs() < 1e-15);
        assert!((t.diameter() - (0.5f64 * 0.5 + 0.5 * 0.5).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn polygon_validation_rejects_bowtie() {
        let bowtie = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
        ];
        assert!(FlatDomain::polygon(bowtie, BTreeSet::new(), BTreeMap::new()).is_err());
    }

    #[test]
    fn polygon_validation_rejects_cw() {
        let cw = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(1.0, 0.0),
        ];
        assert!(FlatDomain::polygon(cw, BTreeSet::new(), BTreeMap::new()).is_err());
    }

    #[test]
    fn sigma_partition_enforced() {
        // Missing weight on a non-Dirichlet edge.
        let vertices = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let err = FlatDomain::polygon(vertices, BTreeSet::from([0]), BTreeMap::new());
        assert!(err.is_err());
        let sq = FlatDomain::unit_square([3], 0.5).unwrap();
        assert!((sq.area() - 1.0).abs() < 1e-15);
    }
}
