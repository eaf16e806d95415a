use crate::geometry::{PerforatedDomain, Point2, PotentialField, VoronoiCell};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Default number of trapezoid nodes per circle.
pub const DEFAULT_CIRCLE_NODES: usize = 64;

/// One weighted circle of the boundary measure.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct WeightedCircle {
    pub center: Point2,
    pub radius: f64,
    /// sign·α carried by this circle.
    pub weight: f64,
}

impl WeightedCircle {
    /// Trapezoid quadrature of `f` over the circle (equal weights on a
    /// periodic integrand, spectrally accurate for smooth `f`).
    pub fn integrate<F: Fn(Point2) -> f64>(&self, f: &F, nodes: usize) -> f64 {
        let n = nodes.max(4);
        let mut sum = 0.0;
        for j in 0..n {
            let theta = TAU * j as f64 / n as f64;
            let p = self.center + Point2::new(theta.cos(), theta.sin()).scale(self.radius);
            sum += f(p);
        }
        sum * TAU * self.radius / n as f64
    }

    pub fn circumference(&self) -> f64 {
        TAU * self.radius
    }
}

/// The signed measure `μ = σ dA` carried by the union of hole circles,
/// pairable against scalar fields.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BoundaryMeasure {
    pub circles: Vec<WeightedCircle>,
    pub quadrature_nodes: usize,
}

impl BoundaryMeasure {
    pub fn from_perforated(pd: &PerforatedDomain) -> Self {
        let circles = pd
            .holes
            .iter()
            .map(|h| WeightedCircle {
                center: h.center,
                radius: h.radius,
                weight: h.sign as f64 * pd.alpha,
            })
            .collect();
        BoundaryMeasure {
            circles,
            quadrature_nodes: DEFAULT_CIRCLE_NODES,
        }
    }

    pub fn empty() -> Self {
        BoundaryMeasure {
            circles: Vec::new(),
            quadrature_nodes: DEFAULT_CIRCLE_NODES,
        }
    }

    /// Total variation mass Σ |weight|·2πr.
    pub fn total_variation(&self) -> f64 {
        self.circles
            .iter()
            .map(|c| c.weight.abs() * c.circumference())
            .sum()
    }

    /// Signed mass Σ weight·2πr = ⟨μ, 1⟩.
    pub fn signed_mass(&self) -> f64 {
        self.circles
            .iter()
            .map(|c| c.weight * c.circumference())
            .sum()
    }

    /// Smallest gap between two circles (surface to surface), and the
    /// smallest radius; both are ∞/∞ when fewer than one circle exists.
    pub fn min_radius(&self) -> f64 {
        self.circles
            .iter()
            .map(|c| c.radius)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, a) in self.circles.iter().enumerate() {
            for b in &self.circles[i + 1..] {
                gap = gap.min(a.center.dist(b.center) - a.radius - b.radius);
            }
        }
        gap
    }
}

/// Pair the measure with a scalar field: Σ over circles of
/// weight·(trapezoid quadrature of f). Exact for constant `f`.
pub fn pair<F: Fn(Point2) -> f64>(mu: &BoundaryMeasure, f: F) -> f64 {
    let nodes = mu.quadrature_nodes.max(32);
    mu.circles
        .iter()
        .map(|c| c.weight * c.integrate(&f, nodes))
        .sum()
}

/// Degree-4 Dunavant rule on the reference triangle (6 points, weights sum
/// to 1; multiply by the physical area).
const DUNAVANT4: [(f64, f64, f64); 6] = [
    (0.108103018168070, 0.445948490915965, 0.223381589678011),
    (0.445948490915965, 0.108103018168070, 0.223381589678011),
    (0.445948490915965, 0.445948490915965, 0.223381589678011),
    (0.816847572980459, 0.091576213509771, 0.109951743655322),
    (0.091576213509771, 0.816847572980459, 0.109951743655322),
    (0.091576213509771, 0.091576213509771, 0.109951743655322),
];

/// Integrate `f` over a triangle with a degree-4 rule.
pub fn triangle_quadrature<F: Fn(Point2) -> f64>(a: Point2, b: Point2, c: Point2, f: &F) -> f64 {
    let area = 0.5 * (b - a).cross(c - a);
    DUNAVANT4
        .iter()
        .map(|&(l1, l2, w)| {
            let l3 = 1.0 - l1 - l2;
            let p = a.scale(l1) + b.scale(l2) + c.scale(l3);
            w * f(p)
        })
        .sum::<f64>()
        * area
}

/// Integrate `f` over a convex polygon by fan triangulation from the
/// centroid, with `sub` × `sub` uniform refinement of each fan triangle.
pub fn polygon_quadrature<F: Fn(Point2) -> f64>(polygon: &[Point2], f: &F, sub: usize) -> f64 {
    let n = polygon.len();
    let centroid = {
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut tw = 0.0;
        for i in 0..n {
            let a = polygon[i];
            let b = polygon[(i + 1) % n];
            let w = a.cross(b);
            tw += w;
            cx += (a.x + b.x) * w;
            cy += (a.y + b.y) * w;
        }
        Point2::new(cx / (3.0 * tw), cy / (3.0 * tw))
    };
    let mut total = 0.0;
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        // Uniform refinement of triangle (centroid, a, b).
        let m = sub.max(1);
        for r in 0..m {
            for s in 0..(m - r) {
                let corner = |u: usize, v: usize| {
                    let lu = u as f64 / m as f64;
                    let lv = v as f64 / m as f64;
                    centroid + (a - centroid).scale(lu) + (b - centroid).scale(lv)
                };
                let p00 = corner(r, s);
                let p10 = corner(r + 1, s);
                let p01 = corner(r, s + 1);
                total += triangle_quadrature(p00, p10, p01, f);
                if s + r + 1 < m {
                    let p11 = corner(r + 1, s + 1);
                    total += triangle_quadrature(p10, p11, p01, f);
                }
            }
        }
    }
    total
}

/// Ratio `(∫_{∂B} σ dA) / (∫_Y V dv)` for one perforated cell: the numerator
/// is exact by the defining perimeter balance, the denominator is a dense
/// degree-4 quadrature over the cell polygon.
pub fn cell_ratio(
    cell: &VoronoiCell,
    potential: &PotentialField,
    wrap: impl Fn(Point2) -> Point2,
    alpha: f64,
) -> f64 {
    let v_site = potential.eval(wrap(cell.site));
    let numerator = v_site * cell.area;
    let _ = alpha; // the α's cancel: sign·α·2πr = V(s)·|Y| exactly
    let denominator = polygon_quadrature(&cell.polygon, &|p| potential.eval(wrap(p)), 4);
    numerator / denominator
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{
        build_separated_set, classify_sites, perforate, voronoi, AlphaSchedule, FlatDomain,
        SiteClass,
    };

    #[test]
    fn pair_with_unit_function_recovers_per_cell_identity() {
        let t = FlatDomain::unit_torus();
        let eps = 0.2;
        let s = build_separated_set(&t, eps, 3).unwrap();
        let cells = voronoi(&s, &t).unwrap();
        let v = PotentialField::constant(1.0);
        let classes = classify_sites(&cells, &v, &t, eps, 16);
        let schedule = AlphaSchedule::Constant { alpha: 1.0 };
        let (_, mu) = perforate(&t, &cells, &classes, &v, &schedule, eps).unwrap();
        let covered: f64 = cells
            .iter()
            .zip(&classes)
            .filter(|(_, c)| **c == SiteClass::Perforated)
            .map(|(cell, _)| cell.area)
            .sum();
        let paired = pair(&mu, |_| 1.0);
        assert!((paired - covered).abs() < 1e-12);
        // V ≡ 1 on the torus: every cell perforated, coverage is the full area.
        assert!((paired - 1.0).abs() < 1e-12);
    }

    #[test]
    fn total_variation_matches_own_quadrature() {
        let t = FlatDomain::unit_torus();
        let eps = 0.15;
        let s = build_separated_set(&t, eps, 5).unwrap();
        let cells = voronoi(&s, &t).unwrap();
        let v = PotentialField::new("sin", |p: Point2| 1.2 + (TAU * p.y).sin() * 0.5);
        let classes = classify_sites(&cells, &v, &t, eps, 16);
        let schedule = AlphaSchedule::Constant { alpha: 1.5 };
        let (_, mu) = perforate(&t, &cells, &classes, &v, &schedule, eps).unwrap();
        let tv_quad: f64 = mu
            .circles
            .iter()
            .map(|c| c.weight.abs() * c.integrate(&|_| 1.0, mu.quadrature_nodes))
            .sum();
        assert!((tv_quad - mu.total_variation()).abs() <= 1e-12 * mu.total_variation());
    }

    #[test]
    fn cell_ratio_exact_for_constant_potential() {
        let t = FlatDomain::unit_torus();
        let s = build_separated_set(&t, 0.25, 2).unwrap();
        let cells = voronoi(&s, &t).unwrap();
        let v = PotentialField::constant(3.0);
        for cell in &cells {
            let ratio = cell_ratio(cell, &v, |p| t.wrap(p), 1.0);
            assert!((ratio - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polygon_quadrature_exact_for_affine() {
        let square = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let val = polygon_quadrature(&square, &|p| 2.0 + 3.0 * p.x - p.y, 2);
        assert!((val - (2.0 + 1.5 - 0.5)).abs() < 1e-13);
        let quartic = polygon_quadrature(&square, &|p| p.x.powi(4), 1);
        assert!((quartic - 0.2).abs() < 1e-13, "degree-4 rule exact on x^4");
    }
}
