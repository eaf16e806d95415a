//! Ruppert-style Delaunay refinement over the CDT kernel: encroached
//! subsegments are split at their midpoints (mirrored across torus seams),
//! bad triangles are fixed by circumcenter insertion, and a Lipschitz size
//! field drives the grading around holes.

use super::cdt::{Cdt, Inserted, Located, Region, TId, VId, WalkResult};
use super::MeshError;
use crate::geometry::Point2;
use std::collections::{HashMap, VecDeque};

/// What a subsegment is part of; resolves to mesh tags at extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegKind {
    /// Outer polygon edge group (polygon domains).
    Outer { domain_edge: usize },
    /// One hole's polygonalized circle.
    Hole { hole_id: usize },
    /// Torus seam; carries the exact translation to its mirror twin.
    Seam,
}

#[derive(Debug, Clone)]
pub struct SubSeg {
    pub a: VId,
    pub b: VId,
    pub kind: SegKind,
    /// Mirror sibling (seam segments only).
    pub sibling: Option<usize>,
    /// Exact translation mapping this segment onto its sibling.
    pub offset: Point2,
    pub alive: bool,
}

/// Refinement driver state: the kernel plus the subsegment store and the
/// seam vertex pairing.
pub struct Refiner {
    pub cdt: Cdt,
    pub segs: Vec<SubSeg>,
    seg_of_edge: HashMap<(VId, VId), usize>,
    /// (vertex, mirrored vertex) seam identifications.
    pub seam_pairs: Vec<(VId, VId)>,
    max_vertices: usize,
}

fn ekey(a: VId, b: VId) -> (VId, VId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Shortest-edge based triangle quality plus a size-field bound.
pub struct Criteria<'a> {
    /// Minimum admissible angle in degrees.
    pub min_angle_deg: f64,
    /// Local target edge length.
    pub size: &'a dyn Fn(Point2) -> f64,
}

impl Refiner {
    pub fn new(lo: Point2, hi: Point2, max_vertices: usize) -> Self {
        Refiner {
            cdt: Cdt::new(lo, hi),
            segs: Vec::new(),
            seg_of_edge: HashMap::new(),
            seam_pairs: Vec::new(),
            max_vertices,
        }
    }

    pub fn insert_vertex(&mut self, p: Point2) -> VId {
        self.cdt.insert(p, super::cdt::NONE).vertex
    }

    /// Register an input segment (after all input vertices are inserted),
    /// recovering it by midpoint insertion when it is not yet an edge.
    /// Returns the subsegment ids created.
    pub fn register_segment(
        &mut self,
        a: VId,
        b: VId,
        kind: SegKind,
    ) -> Result<Vec<usize>, MeshError> {
        let mut out = Vec::new();
        self.register_rec(a, b, kind, &mut out, 0)?;
        Ok(out)
    }

    fn register_rec(
        &mut self,
        a: VId,
        b: VId,
        kind: SegKind,
        out: &mut Vec<usize>,
        depth: usize,
    ) -> Result<(), MeshError> {
        if depth > 48 {
            return Err(MeshError::Structure(
                "segment recovery did not terminate".into(),
            ));
        }
        if self.cdt.triangle_with_edge(a, b).is_some() {
            let id = self.push_seg(SubSeg {
                a,
                b,
                kind,
                sibling: None,
                offset: Point2::new(0.0, 0.0),
                alive: true,
            });
            self.cdt.mark_constraint(a, b);
            out.push(id);
            return Ok(());
        }
        let mid = (self.cdt.point(a) + self.cdt.point(b)).scale(0.5);
        let ins = self.cdt.insert(mid, super::cdt::NONE);
        let m = ins.vertex;
        if let Some((sa, sb)) = ins.split_constraint {
            // The midpoint landed exactly on another constraint edge; keep
            // the stores in sync.
            self.on_constraint_split(sa, sb, m);
        }
        if m == a || m == b {
            return Err(MeshError::Structure(
                "degenerate segment during recovery".into(),
            ));
        }
        self.register_rec(a, m, kind, out, depth + 1)?;
        self.register_rec(m, b, kind, out, depth + 1)
    }

    fn push_seg(&mut self, seg: SubSeg) -> usize {
        let id = self.segs.len();
        self.seg_of_edge.insert(ekey(seg.a, seg.b), id);
        self.segs.push(seg);
        id
    }

    /// Tie two registered seam chains into mirror siblings. The chains must
    /// have identical subdivision (guaranteed when both were registered from
    /// translated copies of the same points).
    pub fn link_siblings(&mut self, left: &[usize], right: &[usize], offset: Point2) {
        assert_eq!(left.len(), right.len());
        for (&l, &r) in left.iter().zip(right) {
            self.segs[l].sibling = Some(r);
            self.segs[l].offset = offset;
            self.segs[r].sibling = Some(l);
            self.segs[r].offset = -offset;
        }
    }

    pub fn record_seam_pair(&mut self, a: VId, b: VId) {
        self.seam_pairs.push((a, b));
    }

    fn seg_id_of(&self, a: VId, b: VId) -> Option<usize> {
        self.seg_of_edge.get(&ekey(a, b)).copied()
    }

    /// React to the kernel reporting that constraint edge (a, b) was split
    /// at vertex m by a plain insertion: split the subsegment record too,
    /// mirroring across the seam when the segment has a sibling.
    fn on_constraint_split(&mut self, a: VId, b: VId, m: VId) -> (usize, usize) {
        let id = self
            .seg_id_of(a, b)
            .expect("constraint edge without subsegment record");
        let seg = self.segs[id].clone();
        self.segs[id].alive = false;
        self.seg_of_edge.remove(&ekey(a, b));
        // Normalize so the children run a → m → b in the stored orientation.
        let (sa, sb) = (seg.a, seg.b);
        let i1 = self.push_seg(SubSeg {
            a: sa,
            b: m,
            kind: seg.kind,
            sibling: None,
            offset: seg.offset,
            alive: true,
        });
        let i2 = self.push_seg(SubSeg {
            a: m,
            b: sb,
            kind: seg.kind,
            sibling: None,
            offset: seg.offset,
            alive: true,
        });
        if let Some(sib) = seg.sibling {
            if self.segs[sib].alive {
                let mirror_mid = self.cdt.point(m) + seg.offset;
                let sseg = self.segs[sib].clone();
                if let Some((st, sk)) = self.cdt.triangle_with_edge(sseg.a, sseg.b) {
                    let sins = self.cdt.split_edge(st, sk, mirror_mid);
                    let sm = sins.vertex;
                    self.segs[sib].alive = false;
                    self.seg_of_edge.remove(&ekey(sseg.a, sseg.b));
                    let s1 = self.push_seg(SubSeg {
                        a: sseg.a,
                        b: sm,
                        kind: sseg.kind,
                        sibling: Some(i1),
                        offset: -seg.offset,
                        alive: true,
                    });
                    let s2 = self.push_seg(SubSeg {
                        a: sm,
                        b: sseg.b,
                        kind: sseg.kind,
                        sibling: Some(i2),
                        offset: -seg.offset,
                        alive: true,
                    });
                    self.segs[i1].sibling = Some(s1);
                    self.segs[i2].sibling = Some(s2);
                    self.record_seam_pair(m, sm);
                }
            }
        }
        (i1, i2)
    }

    /// Split a subsegment at its midpoint, mirroring across the seam when it
    /// has a sibling. Returns the new vertices and the four child ids.
    pub fn split_subseg(&mut self, id: usize) -> Result<Vec<usize>, MeshError> {
        if !self.segs[id].alive {
            return Ok(Vec::new());
        }
        let seg = self.segs[id].clone();
        let (pa, pb) = (self.cdt.point(seg.a), self.cdt.point(seg.b));
        let mid = (pa + pb).scale(0.5);
        let (t, k) = self
            .cdt
            .triangle_with_edge(seg.a, seg.b)
            .ok_or_else(|| MeshError::Structure("subsegment lost its edge".into()))?;
        let ins = self.cdt.split_edge(t, k, mid);
        let m = ins.vertex;
        self.segs[id].alive = false;
        self.seg_of_edge.remove(&ekey(seg.a, seg.b));
        let c1 = self.push_seg(SubSeg {
            a: seg.a,
            b: m,
            kind: seg.kind,
            sibling: None,
            offset: seg.offset,
            alive: true,
        });
        let c2 = self.push_seg(SubSeg {
            a: m,
            b: seg.b,
            kind: seg.kind,
            sibling: None,
            offset: seg.offset,
            alive: true,
        });
        let mut children = vec![c1, c2];

        if let Some(sib) = seg.sibling {
            let sseg = self.segs[sib].clone();
            if sseg.alive {
                let mirror_mid = mid + seg.offset;
                let (st, sk) = self
                    .cdt
                    .triangle_with_edge(sseg.a, sseg.b)
                    .ok_or_else(|| MeshError::Structure("sibling lost its edge".into()))?;
                let sins = self.cdt.split_edge(st, sk, mirror_mid);
                let sm = sins.vertex;
                self.segs[sib].alive = false;
                self.seg_of_edge.remove(&ekey(sseg.a, sseg.b));
                // Orient children consistently: seg.a mirrors to sseg.a by
                // construction of the seam chains.
                let s1 = self.push_seg(SubSeg {
                    a: sseg.a,
                    b: sm,
                    kind: sseg.kind,
                    sibling: Some(c1),
                    offset: -seg.offset,
                    alive: true,
                });
                let s2 = self.push_seg(SubSeg {
                    a: sm,
                    b: sseg.b,
                    kind: sseg.kind,
                    sibling: Some(c2),
                    offset: -seg.offset,
                    alive: true,
                });
                self.segs[c1].sibling = Some(s1);
                self.segs[c1].offset = seg.offset;
                self.segs[c2].sibling = Some(s2);
                self.segs[c2].offset = seg.offset;
                self.record_seam_pair(m, sm);
                children.push(s1);
                children.push(s2);
            }
        }
        Ok(children)
    }

    fn is_encroached(&self, id: usize) -> bool {
        let seg = &self.segs[id];
        if !seg.alive {
            return false;
        }
        let (pa, pb) = (self.cdt.point(seg.a), self.cdt.point(seg.b));
        let mid = (pa + pb).scale(0.5);
        let r2 = 0.25 * (pa - pb).norm_sq();
        let Some((t, k)) = self.cdt.triangle_with_edge(seg.a, seg.b) else {
            return false;
        };
        let tri = &self.cdt.tris[t as usize];
        let mut apexes = vec![tri.v[k]];
        let n = tri.adj[k];
        if n != super::cdt::NONE {
            let ntri = &self.cdt.tris[n as usize];
            let dk = ntri.adj.iter().position(|&x| x == t).unwrap();
            apexes.push(ntri.v[dk]);
        }
        apexes.into_iter().any(|v| {
            let d2 = (self.cdt.point(v) - mid).norm_sq();
            d2 < r2 * (1.0 - 1e-12)
        })
    }

    fn tri_needs_refinement(&self, t: TId, crit: &Criteria, refine_holes: bool) -> bool {
        let tri = &self.cdt.tris[t as usize];
        match tri.region {
            Region::Interior => {}
            Region::Hole(_) if refine_holes => {}
            _ => return false,
        }
        let [a, b, c] = tri.v;
        let (pa, pb, pc) = (self.cdt.point(a), self.cdt.point(b), self.cdt.point(c));
        let l_ab = pa.dist(pb);
        let l_bc = pb.dist(pc);
        let l_ca = pc.dist(pa);
        let longest = l_ab.max(l_bc).max(l_ca);
        let shortest = l_ab.min(l_bc).min(l_ca);
        let centroid = (pa + pb + pc).scale(1.0 / 3.0);
        if longest > (crit.size)(centroid) {
            return true;
        }
        // circumradius / shortest-edge bound ⇔ minimum-angle bound.
        let area = 0.5 * (pb - pa).cross(pc - pa);
        if area <= 0.0 {
            return true;
        }
        let circumradius = l_ab * l_bc * l_ca / (4.0 * area);
        let ratio_limit = 0.5 / crit.min_angle_deg.to_radians().sin();
        circumradius / shortest > ratio_limit
    }

    /// Run Delaunay refinement until every triangle in the refined regions
    /// meets the angle and size criteria and no subsegment is encroached.
    pub fn refine(&mut self, crit: &Criteria, refine_holes: bool) -> Result<(), MeshError> {
        let mut seg_queue: VecDeque<usize> = (0..self.segs.len()).collect();
        let mut tri_queue: VecDeque<TId> = (0..self.cdt.tris.len() as TId).collect();

        loop {
            if self.cdt.num_vertices() > self.max_vertices {
                return Err(MeshError::QualityFailure {
                    min_angle: f64::NAN,
                });
            }
            if let Some(sid) = seg_queue.pop_front() {
                if self.segs[sid].alive && self.is_encroached(sid) {
                    let children = self.split_subseg(sid)?;
                    for c in &children {
                        seg_queue.push_back(*c);
                    }
                    self.requeue_around_children(&children, &mut seg_queue, &mut tri_queue);
                }
                continue;
            }
            let Some(t) = tri_queue.pop_front() else {
                break;
            };
            if !self.cdt.tris[t as usize].alive
                || !self.tri_needs_refinement(t, crit, refine_holes)
            {
                continue;
            }
            let Some(cc) = self.cdt.circumcenter(t) else {
                continue;
            };
            // Walk toward the circumcenter; a constraint in the way is an
            // encroached segment and is split instead.
            match self.cdt.walk(cc, t, true) {
                WalkResult::BlockedByConstraint(a, b) => {
                    if let Some(sid) = self.seg_id_of(a, b) {
                        let children = self.split_subseg(sid)?;
                        for c in &children {
                            seg_queue.push_back(*c);
                        }
                        self.requeue_around_children(&children, &mut seg_queue, &mut tri_queue);
                    }
                    tri_queue.push_back(t);
                }
                WalkResult::Found(located) => {
                    let t0 = match located {
                        Located::Inside(tt) | Located::OnEdge(tt, _) => tt,
                        Located::OnVertex(_) => {
                            // Circumcenter coincides with a vertex: the
                            // triangle cannot be improved this way.
                            continue;
                        }
                    };
                    let encroached = self.cdt.cavity_encroached_constraints(cc, t0);
                    if !encroached.is_empty() {
                        for (a, b) in encroached {
                            if let Some(sid) = self.seg_id_of(a, b) {
                                let children = self.split_subseg(sid)?;
                                for c in &children {
                                    seg_queue.push_back(*c);
                                }
                                self.requeue_around_children(
                                    &children,
                                    &mut seg_queue,
                                    &mut tri_queue,
                                );
                            }
                        }
                        tri_queue.push_back(t);
                        continue;
                    }
                    let ins: Inserted = self.cdt.insert(cc, t0);
                    if let Some((a, b)) = ins.split_constraint {
                        // Bookkeeping for an exact on-constraint hit.
                        let (c1, c2) = self.on_constraint_split(a, b, ins.vertex);
                        seg_queue.push_back(c1);
                        seg_queue.push_back(c2);
                    }
                    if !ins.existing {
                        self.requeue_star(ins.vertex, &mut seg_queue, &mut tri_queue);
                    }
                }
            }
        }
        Ok(())
    }

    fn requeue_star(&self, v: VId, seg_queue: &mut VecDeque<usize>, tri_queue: &mut VecDeque<TId>) {
        for t in self.cdt.star(v) {
            tri_queue.push_back(t);
            let tri = &self.cdt.tris[t as usize];
            for k in 0..3 {
                let a = tri.v[(k + 1) % 3];
                let b = tri.v[(k + 2) % 3];
                if let Some(sid) = self.seg_id_of(a, b) {
                    seg_queue.push_back(sid);
                }
            }
        }
    }

    fn requeue_around_children(
        &self,
        children: &[usize],
        seg_queue: &mut VecDeque<usize>,
        tri_queue: &mut VecDeque<TId>,
    ) {
        for &c in children {
            let seg = &self.segs[c];
            if !seg.alive {
                continue;
            }
            for v in [seg.a, seg.b] {
                self.requeue_star(v, seg_queue, tri_queue);
            }
        }
    }
}
