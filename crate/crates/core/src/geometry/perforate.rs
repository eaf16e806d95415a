use super::domain::FlatDomain;
use super::point::Point2;
use super::potential::PotentialField;
use super::schedule::AlphaSchedule;
use super::voronoi::VoronoiCell;
use super::GeometryError;
use crate::measures::BoundaryMeasure;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Exponent θ of the near-zero threshold `ε^θ`; any θ ∈ (0, 1) works for the
/// construction, 1/2 is the definiteness default.
pub const NEAR_ZERO_EXPONENT: f64 = 0.5;

/// Classification of a Voronoi site: touching the boundary, carrying a hole,
/// or too close to a zero of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SiteClass {
    Boundary,
    NearZero,
    Perforated,
}

/// One removed disk together with the sign its boundary parameter carries.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct Hole {
    #[serde(rename = "c")]
    pub center: Point2,
    #[serde(rename = "r")]
    pub radius: f64,
    pub sign: i8,
}

/// The perforated domain `Ω = M \ T` with its (ε, α) provenance.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PerforatedDomain {
    pub base: FlatDomain,
    pub holes: Vec<Hole>,
    pub eps: f64,
    pub alpha: f64,
}

impl PerforatedDomain {
    /// Area of Ω (base minus the exact disk areas).
    pub fn area(&self) -> f64 {
        let holes: f64 = self
            .holes
            .iter()
            .map(|h| std::f64::consts::PI * h.radius * h.radius)
            .sum();
        self.base.area() - holes
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("perforated domain serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, GeometryError> {
        serde_json::from_str(s)
            .map_err(|e| GeometryError::InvalidParameter(format!("bad perforated-domain JSON: {e}")))
    }
}

/// Sample set used to certify the pointwise condition on a cell: polygon
/// vertices, the site, and an interior lattice.
fn cell_samples(cell: &VoronoiCell, samples_per_cell: usize) -> (Vec<Point2>, f64) {
    let mut samples = cell.polygon.clone();
    samples.push(cell.site);
    let (mut lo, mut hi) = (cell.polygon[0], cell.polygon[0]);
    for v in &cell.polygon {
        lo.x = lo.x.min(v.x);
        lo.y = lo.y.min(v.y);
        hi.x = hi.x.max(v.x);
        hi.y = hi.y.max(v.y);
    }
    let mut n = (samples_per_cell as f64).sqrt().ceil() as usize;
    let mut spacing;
    loop {
        let hx = (hi.x - lo.x) / n as f64;
        let hy = (hi.y - lo.y) / n as f64;
        spacing = hx.max(hy);
        let mut interior = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let p = Point2::new(lo.x + (i as f64 + 0.5) * hx, lo.y + (j as f64 + 0.5) * hy);
                if cell.contains(p) {
                    interior.push(p);
                }
            }
        }
        if samples.len() + interior.len() >= samples_per_cell || n > 64 {
            samples.extend(interior);
            break;
        }
        n += 2;
    }
    (samples, spacing)
}

/// Classify every cell: `Boundary` for cells meeting ∂M, `Perforated` when
/// |V| certifiably exceeds `ε^θ` on the whole cell, `NearZero` otherwise.
///
/// The pointwise bound is certified on the finite sample set; when the field
/// carries a Lipschitz bound the sampled minimum is tightened by
/// `lip · spacing` before the comparison.
pub fn classify_sites(
    cells: &[VoronoiCell],
    potential: &PotentialField,
    domain: &FlatDomain,
    eps: f64,
    samples_per_cell: usize,
) -> Vec<SiteClass> {
    assert!(samples_per_cell >= 16, "need at least 16 samples per cell");
    let threshold = eps.powf(NEAR_ZERO_EXPONENT);
    cells
        .iter()
        .map(|cell| {
            if cell.touches_boundary {
                return SiteClass::Boundary;
            }
            let (samples, spacing) = cell_samples(cell, samples_per_cell);
            let min_abs = samples
                .iter()
                .map(|&p| potential.eval(domain.wrap(p)).abs())
                .fold(f64::INFINITY, f64::min);
            let certified = match potential.lipschitz_bound() {
                Some(lip) => min_abs - lip * spacing,
                None => min_abs,
            };
            if certified > threshold {
                SiteClass::Perforated
            } else {
                SiteClass::NearZero
            }
        })
        .collect()
}

/// Hole radius from the perimeter balance `2πr = |V(s)|·Area(Y)/α` (the d = 2
/// form of the defining relation).
pub fn hole_radius(
    cell: &VoronoiCell,
    potential: &PotentialField,
    domain: &FlatDomain,
    alpha: f64,
) -> Result<f64, GeometryError> {
    if !(alpha > 0.0) {
        return Err(GeometryError::InvalidParameter(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let v = potential.eval(domain.wrap(cell.site));
    if v == 0.0 {
        return Err(GeometryError::InvalidParameter(
            "hole radius undefined where V(site) = 0".into(),
        ));
    }
    let r = v.abs() * cell.area / (TAU * alpha);
    let clearance = cell.site_boundary_dist();
    if r >= 0.5 * clearance {
        return Err(GeometryError::PerforationTooLarge {
            sites: vec![(cell.site.x, cell.site.y)],
            radius: r,
            clearance,
        });
    }
    Ok(r)
}

/// Remove one disk per perforated site and attach the signed boundary
/// measure `σ dA` with weight `±α` on each circle.
pub fn perforate(
    domain: &FlatDomain,
    cells: &[VoronoiCell],
    classes: &[SiteClass],
    potential: &PotentialField,
    schedule: &AlphaSchedule,
    eps: f64,
) -> Result<(PerforatedDomain, BoundaryMeasure), GeometryError> {
    assert_eq!(cells.len(), classes.len(), "classification/cell mismatch");
    let alpha = schedule.alpha(eps)?;
    let mut holes = Vec::new();
    let mut offenders = Vec::new();
    let mut worst: Option<(f64, f64)> = None;
    for (cell, class) in cells.iter().zip(classes) {
        if *class != SiteClass::Perforated {
            continue;
        }
        match hole_radius(cell, potential, domain, alpha) {
            Ok(r) => {
                let sign = if potential.eval(domain.wrap(cell.site)) > 0.0 {
                    1
                } else {
                    -1
                };
                holes.push(Hole {
                    center: domain.wrap(cell.site),
                    radius: r,
                    sign,
                });
            }
            Err(GeometryError::PerforationTooLarge {
                sites,
                radius,
                clearance,
            }) => {
                offenders.extend(sites);
                let ratio = radius / clearance;
                if worst.map_or(true, |(wr, wc)| ratio > wr / wc) {
                    worst = Some((radius, clearance));
                }
            }
            Err(e) => return Err(e),
        }
    }
    if !offenders.is_empty() {
        let (radius, clearance) = worst.unwrap();
        return Err(GeometryError::PerforationTooLarge {
            sites: offenders,
            radius,
            clearance,
        });
    }

    for (i, a) in holes.iter().enumerate() {
        for b in &holes[i + 1..] {
            let d = domain.dist(a.center, b.center);
            if d <= a.radius + b.radius {
                return Err(GeometryError::InvalidParameter(format!(
                    "holes at ({}, {}) and ({}, {}) are not disjoint",
                    a.center.x, a.center.y, b.center.x, b.center.y
                )));
            }
        }
        if domain.boundary_dist(a.center) <= a.radius {
            return Err(GeometryError::InvalidParameter(
                "hole touches the outer boundary".into(),
            ));
        }
    }

    let pd = PerforatedDomain {
        base: domain.clone(),
        holes,
        eps,
        alpha,
    };
    let measure = BoundaryMeasure::from_perforated(&pd);
    Ok((pd, measure))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::separated::build_separated_set;
    use crate::geometry::voronoi::voronoi;

    fn torus_setup(eps: f64, seed: u64) -> (FlatDomain, Vec<VoronoiCell>) {
        let t = FlatDomain::unit_torus();
        let s = build_separated_set(&t, eps, seed).unwrap();
        let cells = voronoi(&s, &t).unwrap();
        (t, cells)
    }

    #[test]
    fn constant_one_classifies_all_perforated() {
        let (t, cells) = torus_setup(0.25, 1);
        let v = PotentialField::constant(1.0);
        let classes = classify_sites(&cells, &v, &t, 0.25, 16);
        assert!(classes.iter().all(|c| *c == SiteClass::Perforated));
    }

    #[test]
    fn zero_potential_classifies_all_near_zero() {
        let (t, cells) = torus_setup(0.25, 1);
        let v = PotentialField::constant(0.0);
        let classes = classify_sites(&cells, &v, &t, 0.25, 16);
        assert!(classes.iter().all(|c| *c == SiteClass::NearZero));
    }

    #[test]
    fn square_boundary_cells_are_boundary_class() {
        let sq = FlatDomain::unit_square([0, 1, 2, 3], 0.0).unwrap();
        let s = build_separated_set(&sq, 0.3, 2).unwrap();
        let cells = voronoi(&s, &sq).unwrap();
        let v = PotentialField::constant(1.0);
        let classes = classify_sites(&cells, &v, &sq, 0.3, 16);
        for (cell, class) in cells.iter().zip(&classes) {
            if cell.touches_boundary {
                assert_eq!(*class, SiteClass::Boundary);
            }
        }
        assert!(classes.iter().any(|c| *c == SiteClass::Boundary));
    }

    #[test]
    fn radius_matches_direct_substitution() {
        // V(s) = α makes r = A / 2π; and the numeric example 0.01/(2π).
        let (t, cells) = torus_setup(0.3, 3);
        let cell = &cells[0];
        let alpha = 2.5;
        let v = PotentialField::constant(alpha);
        let r = hole_radius(cell, &v, &t, alpha).unwrap();
        assert!((r - cell.area / TAU).abs() < 1e-15);

        let v1 = PotentialField::constant(1.0);
        let mut small = cell.clone();
        small.area = 0.01;
        let r = hole_radius(&small, &v1, &t, 1.0).unwrap();
        assert!((r - 0.01 / TAU).abs() < 1e-18);
        assert!((r - 1.5915e-3).abs() < 1e-6);
    }

    #[test]
    fn near_zero_everywhere_gives_empty_measure() {
        let (t, cells) = torus_setup(0.25, 4);
        let v = PotentialField::constant(0.0);
        let classes = classify_sites(&cells, &v, &t, 0.25, 16);
        let schedule = AlphaSchedule::Constant { alpha: 1.0 };
        let (pd, mu) = perforate(&t, &cells, &classes, &v, &schedule, 0.25).unwrap();
        assert!(pd.holes.is_empty());
        assert_eq!(mu.total_variation(), 0.0);
    }

    #[test]
    fn unit_potential_gives_circumference_equal_cell_area() {
        let (t, cells) = torus_setup(0.2, 5);
        let v = PotentialField::constant(1.0);
        let classes = classify_sites(&cells, &v, &t, 0.2, 16);
        let schedule = AlphaSchedule::Constant { alpha: 1.0 };
        let (pd, _) = perforate(&t, &cells, &classes, &v, &schedule, 0.2).unwrap();
        assert_eq!(pd.holes.len(), cells.len());
        for (hole, cell) in pd.holes.iter().zip(&cells) {
            assert_eq!(hole.sign, 1);
            assert!((TAU * hole.radius - cell.area).abs() < 1e-15);
        }
    }

    #[test]
    fn affine_sign_split_across_midline() {
        // eps small enough that cells away from the midline clear the √ε
        // threshold on both signs of V = x − 1/2.
        let (t, cells) = torus_setup(0.05, 6);
        let v = PotentialField::new("x - 1/2", |p: Point2| p.x - 0.5);
        let classes = classify_sites(&cells, &v, &t, 0.05, 16);
        let schedule = AlphaSchedule::Constant { alpha: 1.0 };
        let (pd, _) = perforate(&t, &cells, &classes, &v, &schedule, 0.05).unwrap();
        assert!(pd.holes.iter().any(|h| h.sign == 1));
        assert!(pd.holes.iter().any(|h| h.sign == -1));
        for hole in &pd.holes {
            if hole.center.x < 0.5 {
                assert_eq!(hole.sign, -1, "hole at x = {}", hole.center.x);
            } else {
                assert_eq!(hole.sign, 1, "hole at x = {}", hole.center.x);
            }
        }
    }

    #[test]
    fn per_cell_measure_identity_is_exact() {
        // sign·α·2πr = V(center)·cell_area up to round-off, for a varying V.
        let (t, cells) = torus_setup(0.18, 7);
        let v = PotentialField::new("1 + sin", |p: Point2| {
            1.5 + 0.4 * (TAU * p.x).sin()
        })
        .with_lipschitz_bound(0.4 * TAU);
        let classes = classify_sites(&cells, &v, &t, 0.18, 16);
        let schedule = AlphaSchedule::Constant { alpha: 2.0 };
        let (pd, _) = perforate(&t, &cells, &classes, &v, &schedule, 0.18).unwrap();
        let mut hole_iter = pd.holes.iter();
        for (cell, class) in cells.iter().zip(&classes) {
            if *class != SiteClass::Perforated {
                continue;
            }
            let hole = hole_iter.next().unwrap();
            let lhs = hole.sign as f64 * pd.alpha * TAU * hole.radius;
            let rhs = v.eval(t.wrap(cell.site)) * cell.area;
            assert!((lhs - rhs).abs() <= 1e-14 * rhs.abs().max(1.0));
        }
    }

    #[test]
    fn radius_over_eps_vanishes_with_slope_one() {
        // Fixed V and constant α: r ≍ ε² in d = 2, so r/ε has log-log slope 1.
        let t = FlatDomain::unit_torus();
        let v = PotentialField::constant(1.0);
        let schedule = AlphaSchedule::Constant { alpha: 1.0 };
        let mut points = Vec::new();
        for &eps in &[0.2, 0.1, 0.05] {
            let s = build_separated_set(&t, eps, 11).unwrap();
            let cells = voronoi(&s, &t).unwrap();
            let classes = classify_sites(&cells, &v, &t, eps, 16);
            let (pd, _) = perforate(&t, &cells, &classes, &v, &schedule, eps).unwrap();
            let max_ratio = pd
                .holes
                .iter()
                .map(|h| h.radius / eps)
                .fold(0.0f64, f64::max);
            points.push((eps.ln(), max_ratio.ln()));
        }
        assert!(points[0].1 > points[1].1 && points[1].1 > points[2].1);
        let slope = (points[0].1 - points[2].1) / (points[0].0 - points[2].0);
        assert!(
            (slope - 1.0).abs() < 0.35,
            "log-log slope of max r/eps was {slope}"
        );
    }

    #[test]
    fn serialization_round_trip_is_stable() {
        let (t, cells) = torus_setup(0.2, 8);
        let v = PotentialField::constant(1.0);
        let classes = classify_sites(&cells, &v, &t, 0.2, 16);
        let schedule = AlphaSchedule::Constant { alpha: 1.0 };
        let (pd, _) = perforate(&t, &cells, &classes, &v, &schedule, 0.2).unwrap();
        let json = pd.to_json();
        let back = PerforatedDomain::from_json(&json).unwrap();
        assert_eq!(pd, back);
        assert_eq!(json, back.to_json());
    }
}
