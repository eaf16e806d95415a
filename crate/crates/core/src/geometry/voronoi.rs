use super::domain::FlatDomain;
use super::point::{point_in_polygon, point_segment_dist, polygon_signed_area, Point2};
use super::separated::SeparatedSet;
use super::GeometryError;
use serde::{Deserialize, Serialize};

/// A Voronoi cell of the tessellation associated with a separated set.
///
/// On the torus the polygon is convex and expressed in the unwrapped frame of
/// its site (it may straddle the fundamental square); on polygon domains it is
/// the convex bisector cell clipped to the domain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VoronoiCell {
    pub site: Point2,
    pub polygon: Vec<Point2>,
    pub area: f64,
    pub touches_boundary: bool,
}

impl VoronoiCell {
    /// Distance from the site to the cell boundary (the cell inradius at the
    /// site).
    pub fn site_boundary_dist(&self) -> f64 {
        let n = self.polygon.len();
        (0..n)
            .map(|i| point_segment_dist(self.site, self.polygon[i], self.polygon[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.polygon.len();
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut twice_area = 0.0;
        for i in 0..n {
            let a = self.polygon[i];
            let b = self.polygon[(i + 1) % n];
            let w = a.cross(b);
            twice_area += w;
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        Point2::new(cx / (3.0 * twice_area), cy / (3.0 * twice_area))
    }

    pub fn contains(&self, p: Point2) -> bool {
        point_in_polygon(p, &self.polygon)
    }
}

/// Clip a polygon against the half-plane `n·x ≤ c` (Sutherland–Hodgman).
fn clip_half_plane(polygon: &[Point2], n: Point2, c: f64) -> Vec<Point2> {
    let mut out = Vec::with_capacity(polygon.len() + 1);
    let len = polygon.len();
    for i in 0..len {
        let a = polygon[i];
        let b = polygon[(i + 1) % len];
        let fa = n.dot(a) - c;
        let fb = n.dot(b) - c;
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let t = fa / (fa - fb);
            out.push(a + (b - a).scale(t));
        }
    }
    out
}

/// Perpendicular-bisector half-plane keeping points at least as close to
/// `s` as to `other`: `n·x ≤ c` with `n = other − s`.
fn bisector(s: Point2, other: Point2) -> (Point2, f64) {
    let n = other - s;
    let c = 0.5 * (other.norm_sq() - s.norm_sq());
    (n, c)
}

/// Voronoi tessellation of the domain for the given sites.
///
/// Torus cells are built from the 3×3 periodic replication of the site set
/// (valid for `eps < L/2`, which is enforced); polygon-domain cells intersect
/// the bisector cell with the domain polygon.
pub fn voronoi(
    sset: &SeparatedSet,
    domain: &FlatDomain,
) -> Result<Vec<VoronoiCell>, GeometryError> {
    let area_floor = 1e-12 * domain.area();
    let cells: Vec<VoronoiCell> = match domain {
        FlatDomain::Torus { side } => {
            let l = *side;
            if sset.eps >= l / 2.0 && sset.sites.len() > 1 {
                return Err(GeometryError::InvalidParameter(format!(
                    "torus Voronoi via 3x3 replication requires eps < L/2 (eps = {}, L = {l})",
                    sset.eps
                )));
            }
            sset.sites
                .iter()
                .map(|&s| {
                    let m = 1.5 * l;
                    let mut poly = vec![
                        Point2::new(s.x - m, s.y - m),
                        Point2::new(s.x + m, s.y - m),
                        Point2::new(s.x + m, s.y + m),
                        Point2::new(s.x - m, s.y + m),
                    ];
                    for &other in &sset.sites {
                        for di in -1i32..=1 {
                            for dj in -1i32..=1 {
                                let rep =
                                    other + Point2::new(di as f64 * l, dj as f64 * l);
                                if rep == s {
                                    continue;
                                }
                                let (n, c) = bisector(s, rep);
                                poly = clip_half_plane(&poly, n, c);
                            }
                        }
                    }
                    VoronoiCell {
                        site: s,
                        area: polygon_signed_area(&poly),
                        polygon: poly,
                        touches_boundary: false,
                    }
                })
                .collect()
        }
        FlatDomain::Polygon { vertices, .. } => sset
            .sites
            .iter()
            .map(|&s| {
                let mut poly = vertices.clone();
                for &other in &sset.sites {
                    if other == s {
                        continue;
                    }
                    let (n, c) = bisector(s, other);
                    poly = clip_half_plane(&poly, n, c);
                }
                let boundary_tol = 1e-9 * domain.diameter();
                let touches = poly
                    .iter()
                    .any(|&v| domain.boundary_dist(v) <= boundary_tol);
                VoronoiCell {
                    site: s,
                    area: polygon_signed_area(&poly),
                    polygon: poly,
                    touches_boundary: touches,
                }
            })
            .collect(),
    };

    for (i, cell) in cells.iter().enumerate() {
        if !(cell.area > area_floor) {
            return Err(GeometryError::DegenerateCell {
                site_index: i,
                area: cell.area,
            });
        }
        debug_assert!(cell.contains(cell.site), "site {i} outside its own cell");
    }
    let total: f64 = cells.iter().map(|c| c.area).sum();
    let rel = (total - domain.area()).abs() / domain.area();
    if rel > 1e-9 {
        return Err(GeometryError::PartitionFailure {
            total_area: total,
            domain_area: domain.area(),
        });
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sset(eps: f64, sites: Vec<Point2>) -> SeparatedSet {
        SeparatedSet {
            eps,
            sites,
            seed: 0,
        }
    }

    #[test]
    fn single_site_on_torus_owns_the_torus() {
        let t = FlatDomain::unit_torus();
        let cells = voronoi(&sset(0.8, vec![Point2::new(0.37, 0.42)]), &t).unwrap();
        assert_eq!(cells.len(), 1);
        assert!((cells[0].area - 1.0).abs() < 1e-12);
        assert!(!cells[0].touches_boundary);
    }

    #[test]
    fn single_site_in_square_owns_the_square() {
        let sq = FlatDomain::unit_square([], 0.0).unwrap();
        let cells = voronoi(&sset(1.5, vec![Point2::new(0.5, 0.5)]), &sq).unwrap();
        assert_eq!(cells.len(), 1);
        assert!((cells[0].area - 1.0).abs() < 1e-12);
        assert!(cells[0].touches_boundary);
    }

    #[test]
    fn two_diagonal_sites_split_the_torus_evenly() {
        let t = FlatDomain::unit_torus();
        let sites = vec![Point2::new(0.0, 0.0), Point2::new(0.5, 0.5)];
        let cells = voronoi(&sset(0.4, sites.clone()), &t).unwrap();
        assert!((cells[0].area - 0.5).abs() < 1e-9);
        assert!((cells[1].area - 0.5).abs() < 1e-9);

        // Monte-Carlo area oracle: nearest-site counts over uniform samples.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        let mut hits = [0usize; 2];
        for _ in 0..n {
            let p = Point2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            let d0 = t.dist(p, sites[0]);
            let d1 = t.dist(p, sites[1]);
            hits[if d0 <= d1 { 0 } else { 1 }] += 1;
        }
        let frac = hits[0] as f64 / n as f64;
        // 4σ band for a fair coin over n samples.
        let sigma = 0.5 / (n as f64).sqrt();
        assert!((frac - 0.5).abs() < 4.0 * sigma, "frac = {frac}");
    }

    #[test]
    fn partition_invariant_on_random_sets() {
        let t = FlatDomain::unit_torus();
        let sq = FlatDomain::unit_square([], 0.0).unwrap();
        for (domain, eps) in [(&t, 0.17), (&t, 0.23), (&sq, 0.21)] {
            let s = super::super::separated::build_separated_set(domain, eps, 31).unwrap();
            let cells = voronoi(&s, domain).unwrap();
            let total: f64 = cells.iter().map(|c| c.area).sum();
            assert!((total - domain.area()).abs() / domain.area() <= 1e-9);
            for c in &cells {
                assert!(c.contains(c.site));
            }
        }
    }
}
