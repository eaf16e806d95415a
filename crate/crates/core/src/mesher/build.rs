//! Mesh construction for full and perforated domains: input polylines,
//! seeding, seam placement on the torus, refinement, and extraction.

use super::cdt::{Region, VId};
use super::mesh::{edge_key, EdgeTag, Mesh};
use super::refine::{Criteria, Refiner, SegKind, SubSeg};
use super::{MeshError, MIN_ANGLE_DEG};
use crate::geometry::{FlatDomain, PerforatedDomain, Point2};
use std::collections::BTreeMap;
use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

const DEFAULT_MAX_VERTICES: usize = 3_000_000;
/// Lattice seed spacing relative to h_max.
const SEED_SPACING: f64 = 0.78;

/// Graded size field: h_max away from holes, r/3 on each hole circle,
/// growing with Lipschitz slope g − 1.
#[derive(Debug, Clone)]
pub struct SizeField {
    pub h_max: f64,
    /// Neighbor-size growth factor g ∈ (1, 2].
    pub grading: f64,
    /// (center, polygonalized radius, local size) per hole.
    circles: Vec<(Point2, f64, f64)>,
}

impl SizeField {
    pub fn uniform(h_max: f64) -> Self {
        SizeField {
            h_max,
            grading: 1.5,
            circles: Vec::new(),
        }
    }

    pub fn graded(h_max: f64, grading: f64, pd: &PerforatedDomain) -> Result<Self, MeshError> {
        if !(grading > 1.0 && grading <= 2.0) {
            return Err(MeshError::Structure(format!(
                "grading factor must lie in (1, 2], got {grading}"
            )));
        }
        if !(h_max > 0.0) {
            return Err(MeshError::Structure("h_max must be positive".into()));
        }
        let circles = pd
            .holes
            .iter()
            .map(|h| {
                let n = ngon_count(h.radius);
                let r_poly = polygon_radius(h.radius, n);
                (h.center, r_poly, hole_size(h.radius))
            })
            .collect();
        Ok(SizeField {
            h_max,
            grading,
            circles,
        })
    }

    pub fn size(&self, p: Point2) -> f64 {
        let mut s = self.h_max;
        let slope = self.grading - 1.0;
        for &(c, r, h) in &self.circles {
            let d = (p.dist(c) - r).abs();
            s = s.min(h + slope * d);
        }
        s
    }
}

/// Local mesh size on a hole circle.
pub fn hole_size(radius: f64) -> f64 {
    radius / 3.0
}

/// Polygon vertex count for a hole: n = max(16, ⌈2πr/h_hole⌉).
pub fn ngon_count(radius: f64) -> usize {
    let h = hole_size(radius);
    ((TAU * radius / h).ceil() as usize).max(16)
}

/// Perimeter-preserving corrected radius r′ = πr/(n·sin(π/n)).
pub fn polygon_radius(radius: f64, n: usize) -> f64 {
    PI * radius / (n as f64 * (PI / n as f64).sin())
}

/// A mesh pair extracted from one triangulation: the perforated mesh and the
/// same mesh with hole interiors filled. The first `shared_vertex_count`
/// vertices coincide (same indices, same coordinates).
#[derive(Debug, Clone)]
pub struct MeshBundle {
    pub perforated: Mesh,
    pub filled: Mesh,
    pub shared_vertex_count: usize,
}

/// Mesh the full domain at uniform target size.
pub fn triangulate_full(domain: &FlatDomain, h_max: f64) -> Result<Mesh, MeshError> {
    if !(h_max > 0.0 && h_max < 2.0 * domain.diameter()) {
        return Err(MeshError::Structure(format!(
            "h_max = {h_max} out of range for domain diameter {}",
            domain.diameter()
        )));
    }
    let pd = PerforatedDomain {
        base: domain.clone(),
        holes: Vec::new(),
        eps: 0.0,
        alpha: 1.0,
    };
    let sf = SizeField::uniform(h_max);
    let bundle = triangulate(&pd, &sf)?;
    Ok(bundle.perforated)
}

/// Mesh the perforated domain; the bundle also carries the hole-filled mesh
/// used for extensions and for embedding the circles as internal polylines.
pub fn triangulate_perforated(
    pd: &PerforatedDomain,
    sf: &SizeField,
) -> Result<MeshBundle, MeshError> {
    triangulate(pd, sf)
}

struct HolePolygon {
    center: Point2,
    r_poly: f64,
    n: usize,
}

fn hole_polygons(pd: &PerforatedDomain) -> Result<Vec<HolePolygon>, MeshError> {
    let polys: Vec<HolePolygon> = pd
        .holes
        .iter()
        .map(|h| {
            let n = ngon_count(h.radius);
            HolePolygon {
                center: h.center,
                r_poly: polygon_radius(h.radius, n),
                n,
            }
        })
        .collect();
    let mut bad = Vec::new();
    for i in 0..polys.len() {
        for j in (i + 1)..polys.len() {
            let d = pd.base.dist(polys[i].center, polys[j].center);
            if d <= 1.05 * (polys[i].r_poly + polys[j].r_poly) {
                bad.push((i, j));
            }
        }
        if pd.base.boundary_dist(polys[i].center) <= 2.0 * polys[i].r_poly {
            bad.push((i, i));
        }
    }
    if !bad.is_empty() {
        return Err(MeshError::HoleResolutionFailure { pairs: bad });
    }
    Ok(polys)
}

/// Choose torus cut lines that stay clear of all hole polygons.
fn torus_cuts(side: f64, polys: &[HolePolygon]) -> Result<(f64, f64), MeshError> {
    let pick = |coords: Vec<(f64, f64)>| -> Option<f64> {
        // coords: (center coordinate mod L, margin)
        if coords.is_empty() {
            return Some(0.0);
        }
        let mut events: Vec<(f64, f64)> = coords
            .iter()
            .map(|&(c, m)| (c.rem_euclid(side), m))
            .collect();
        events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut best: Option<(f64, f64)> = None; // (clearance, cut)
        let k = events.len();
        for i in 0..k {
            let (c0, m0) = events[i];
            let (c1, m1) = events[(i + 1) % k];
            let gap_end = if i + 1 == k { c1 + side } else { c1 };
            let lo = c0 + m0;
            let hi = gap_end - m1;
            if hi <= lo {
                continue;
            }
            let cut = 0.5 * (lo + hi);
            let clearance = 0.5 * (hi - lo);
            if best.map_or(true, |(bc, _)| clearance > bc) {
                best = Some((clearance, cut.rem_euclid(side)));
            }
        }
        best.map(|(_, cut)| cut)
    };
    let margin = |p: &HolePolygon| 3.0 * p.r_poly;
    let sx = pick(polys.iter().map(|p| (p.center.x, margin(p))).collect());
    let sy = pick(polys.iter().map(|p| (p.center.y, margin(p))).collect());
    match (sx, sy) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(MeshError::Structure(
            "no torus cut line clears the holes".into(),
        )),
    }
}

fn triangulate(pd: &PerforatedDomain, sf: &SizeField) -> Result<MeshBundle, MeshError> {
    let domain = &pd.base;
    let polys = hole_polygons(pd)?;
    let h_max = sf.h_max;

    let (lo, hi, cuts) = match domain {
        FlatDomain::Torus { side } => {
            let (sx, sy) = torus_cuts(*side, &polys)?;
            (
                Point2::new(sx, sy),
                Point2::new(sx + side, sy + side),
                Some((sx, sy, *side)),
            )
        }
        FlatDomain::Polygon { .. } => {
            let (lo, hi) = domain.bounding_box();
            (lo, hi, None)
        }
    };

    let mut refiner = Refiner::new(lo, hi, DEFAULT_MAX_VERTICES);

    // Wrap hole centers into the fundamental square of the chosen cuts.
    let wrap_into = |p: Point2| -> Point2 {
        match cuts {
            Some((sx, sy, l)) => Point2::new(
                sx + (p.x - sx).rem_euclid(l),
                sy + (p.y - sy).rem_euclid(l),
            ),
            None => p,
        }
    };

    // 1. Outer boundary / seam vertices and chains.
    enum Outer {
        PolygonEdges(Vec<(Vec<VId>, usize)>),
        Seam {
            bottom: Vec<VId>,
            top: Vec<VId>,
            left: Vec<VId>,
            right: Vec<VId>,
            side: f64,
        },
    }

    let outer = match domain {
        FlatDomain::Torus { side } => {
            let n = (side / h_max).ceil() as usize;
            let n = n.max(4);
            let (sx, sy, l) = cuts.unwrap();
            let (x1, y1) = (sx + l, sy + l);
            let xs: Vec<f64> = (0..=n)
                .map(|k| {
                    if k == n {
                        x1
                    } else {
                        sx + k as f64 * (l / n as f64)
                    }
                })
                .collect();
            let ys: Vec<f64> = (0..=n)
                .map(|k| {
                    if k == n {
                        y1
                    } else {
                        sy + k as f64 * (l / n as f64)
                    }
                })
                .collect();
            let bottom: Vec<VId> = xs
                .iter()
                .map(|&x| refiner.insert_vertex(Point2::new(x, sy)))
                .collect();
            let top: Vec<VId> = xs
                .iter()
                .map(|&x| refiner.insert_vertex(Point2::new(x, y1)))
                .collect();
            let left: Vec<VId> = ys
                .iter()
                .map(|&y| refiner.insert_vertex(Point2::new(sx, y)))
                .collect();
            let right: Vec<VId> = ys
                .iter()
                .map(|&y| refiner.insert_vertex(Point2::new(x1, y)))
                .collect();
            Outer::Seam {
                bottom,
                top,
                left,
                right,
                side: *side,
            }
        }
        FlatDomain::Polygon { vertices, .. } => {
            let nv = vertices.len();
            let corner_ids: Vec<VId> = vertices
                .iter()
                .map(|&v| refiner.insert_vertex(v))
                .collect();
            let mut edges = Vec::new();
            for e in 0..nv {
                let a = vertices[e];
                let b = vertices[(e + 1) % nv];
                let len = a.dist(b);
                let n = ((len / h_max).ceil() as usize).max(1);
                let mut chain = vec![corner_ids[e]];
                for k in 1..n {
                    let t = k as f64 / n as f64;
                    chain.push(refiner.insert_vertex(a + (b - a).scale(t)));
                }
                chain.push(corner_ids[(e + 1) % nv]);
                edges.push((chain, e));
            }
            Outer::PolygonEdges(edges)
        }
    };

    // 2. Hole ring vertices.
    let mut ring_ids: Vec<Vec<VId>> = Vec::new();
    for poly in &polys {
        let c = wrap_into(poly.center);
        let ids: Vec<VId> = (0..poly.n)
            .map(|k| {
                let theta = TAU * k as f64 / poly.n as f64;
                refiner.insert_vertex(
                    c + Point2::new(theta.cos(), theta.sin()).scale(poly.r_poly),
                )
            })
            .collect();
        ring_ids.push(ids);
    }

    // 3. Interior seed lattice (skipped near boundaries and holes).
    {
        let spacing = SEED_SPACING * h_max;
        let nx = (((hi.x - lo.x) / spacing).ceil() as usize).max(1);
        let ny = (((hi.y - lo.y) / spacing).ceil() as usize).max(1);
        let margin = 0.55 * h_max;
        for i in 0..nx {
            for j in 0..ny {
                let p = Point2::new(
                    lo.x + (i as f64 + 0.217) * (hi.x - lo.x) / nx as f64,
                    lo.y + (j as f64 + 0.113) * (hi.y - lo.y) / ny as f64,
                );
                let inside = match cuts {
                    Some((sx, sy, l)) => {
                        p.x > sx + margin
                            && p.x < sx + l - margin
                            && p.y > sy + margin
                            && p.y < sy + l - margin
                    }
                    None => domain.contains(p) && domain.boundary_dist(p) > margin,
                };
                if inside && sf.size(p) >= 0.8 * h_max {
                    refiner.insert_vertex(p);
                }
            }
        }
    }

    // 4. Register constraint chains.
    let register_chain = |refiner: &mut Refiner,
                          chain: &[VId],
                          kind: SegKind|
     -> Result<Vec<usize>, MeshError> {
        let mut ids = Vec::new();
        for w in chain.windows(2) {
            ids.extend(refiner.register_segment(w[0], w[1], kind)?);
        }
        Ok(ids)
    };

    match &outer {
        Outer::PolygonEdges(edges) => {
            for (chain, e) in edges {
                register_chain(&mut refiner, chain, SegKind::Outer { domain_edge: *e })?;
            }
        }
        Outer::Seam {
            bottom,
            top,
            left,
            right,
            side,
        } => {
            let b = register_chain(&mut refiner, bottom, SegKind::Seam)?;
            let t = register_chain(&mut refiner, top, SegKind::Seam)?;
            let l = register_chain(&mut refiner, left, SegKind::Seam)?;
            let r = register_chain(&mut refiner, right, SegKind::Seam)?;
            if b.len() != t.len() || l.len() != r.len() {
                return Err(MeshError::Structure(
                    "seam recovery broke the mirrored subdivision".into(),
                ));
            }
            refiner.link_siblings(&b, &t, Point2::new(0.0, *side));
            refiner.link_siblings(&l, &r, Point2::new(*side, 0.0));
            for (&u, &v) in bottom.iter().zip(top.iter()) {
                refiner.record_seam_pair(u, v);
            }
            for (&u, &v) in left.iter().zip(right.iter()) {
                refiner.record_seam_pair(u, v);
            }
        }
    }
    for (hid, ids) in ring_ids.iter().enumerate() {
        let mut chain = ids.clone();
        chain.push(ids[0]);
        register_chain(&mut refiner, &chain, SegKind::Hole { hole_id: hid })?;
    }

    // 5. Region labels: hole centers seed their regions.
    let seeds: Vec<(Point2, Region)> = polys
        .iter()
        .enumerate()
        .map(|(hid, p)| (wrap_into(p.center), Region::Hole(hid as u32)))
        .collect();
    refiner.cdt.assign_regions(&seeds);

    // 6. Refine (hole interiors too, so the filled mesh shares the quality
    // bound).
    let size_fn = |p: Point2| sf.size(p);
    let crit = Criteria {
        min_angle_deg: MIN_ANGLE_DEG,
        size: &size_fn,
    };
    refiner.refine(&crit, true)?;

    // 7. Extract the perforated mesh, then the filled mesh on top of the
    // same vertex numbering.
    let is_dirichlet = |e: usize| match domain {
        FlatDomain::Polygon {
            dirichlet_edges, ..
        } => dirichlet_edges.contains(&e),
        FlatDomain::Torus { .. } => false,
    };
    let resolve = |kind: SegKind| -> Option<EdgeTag> {
        match kind {
            SegKind::Outer { domain_edge } => Some(if is_dirichlet(domain_edge) {
                EdgeTag::OuterDirichlet
            } else {
                EdgeTag::OuterRobin(domain_edge)
            }),
            SegKind::Hole { hole_id } => Some(EdgeTag::HoleBoundary(hole_id)),
            SegKind::Seam => None,
        }
    };

    let mut vmap: HashMap<VId, usize> = HashMap::new();
    let perforated = extract(
        &refiner,
        |r| r == Region::Interior,
        &resolve,
        &mut vmap,
    )?;
    let shared_vertex_count = perforated.vertices.len();
    let filled = extract(
        &refiner,
        |r| matches!(r, Region::Interior | Region::Hole(_)),
        &resolve,
        &mut vmap,
    )?;
    Ok(MeshBundle {
        perforated,
        filled,
        shared_vertex_count,
    })
}

fn extract(
    refiner: &Refiner,
    keep: impl Fn(Region) -> bool,
    resolve: &impl Fn(SegKind) -> Option<EdgeTag>,
    vmap: &mut HashMap<VId, usize>,
) -> Result<Mesh, MeshError> {
    let cdt = &refiner.cdt;
    let mut vertices: Vec<Point2> = vmap
        .iter()
        .map(|(&v, &i)| (i, cdt.point(v)))
        .collect::<BTreeMap<usize, Point2>>()
        .into_values()
        .collect();
    let mut triangles = Vec::new();
    for tri in cdt.tris.iter().filter(|t| t.alive && keep(t.region)) {
        let mut idx = [0usize; 3];
        for (slot, &v) in idx.iter_mut().zip(&tri.v) {
            let next = vertices.len();
            let i = *vmap.entry(v).or_insert_with(|| {
                vertices.push(cdt.point(v));
                next
            });
            *slot = i;
        }
        triangles.push(idx);
    }
    let mut edge_tags = BTreeMap::new();
    for seg in refiner.segs.iter().filter(|s| s.alive) {
        let Some(tag) = resolve(seg.kind) else {
            continue;
        };
        let (Some(&i), Some(&j)) = (vmap.get(&seg.a), vmap.get(&seg.b)) else {
            continue;
        };
        edge_tags.insert(edge_key(i, j), tag);
    }
    let mut periodic_pairs = Vec::new();
    for &(a, b) in &refiner.seam_pairs {
        if let (Some(&i), Some(&j)) = (vmap.get(&a), vmap.get(&b)) {
            periodic_pairs.push((i, j));
        }
    }
    let mesh = Mesh {
        vertices,
        triangles,
        edge_tags,
        periodic_pairs,
    };
    mesh.validate()?;
    Ok(mesh)
}

/// One-hole helper used by `SubSeg`-free callers; re-exported for tests.
pub fn size_field_for(pd: &PerforatedDomain, h_max: f64, grading: f64) -> Result<SizeField, MeshError> {
    SizeField::graded(h_max, grading, pd)
}

#[allow(unused)]
fn debug_seg(seg: &SubSeg) -> String {
    format!("{}-{} {:?}", seg.a, seg.b, seg.kind)
}
