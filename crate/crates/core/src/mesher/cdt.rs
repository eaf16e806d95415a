//! Incremental constrained Delaunay kernel: triangle-based adjacency,
//! exact-predicate walks, flip legalization, and topological edge splits
//! (constraint subsegments are split without any geometric test, which keeps
//! Ruppert-style refinement robust).

use crate::geometry::Point2;
use robust::{incircle, orient2d};
use std::collections::HashMap;

pub type VId = u32;
pub type TId = u32;
pub const NONE: TId = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Unknown,
    Outside,
    Interior,
    Hole(u32),
}

#[derive(Debug, Clone)]
pub struct Triangle {
    /// CCW vertices.
    pub v: [VId; 3],
    /// adj[k] is across the edge (v[k+1], v[k+2]), opposite v[k].
    pub adj: [TId; 3],
    pub region: Region,
    pub alive: bool,
}

#[derive(Debug, Clone, Copy)]
pub enum Located {
    Inside(TId),
    /// On edge k of the triangle.
    OnEdge(TId, usize),
    OnVertex(VId),
}

#[derive(Debug, Clone, Copy)]
pub enum WalkResult {
    Found(Located),
    /// The straight walk would cross a constraint edge.
    BlockedByConstraint(VId, VId),
}

/// Outcome of a point insertion, reporting a split constraint edge if any.
#[derive(Debug, Clone, Copy)]
pub struct Inserted {
    pub vertex: VId,
    pub split_constraint: Option<(VId, VId)>,
    pub existing: bool,
}

pub struct Cdt {
    pub pts: Vec<Point2>,
    pub tris: Vec<Triangle>,
    vert_tri: Vec<TId>,
    constraints: HashMap<(VId, VId), ()>,
    last_tri: TId,
    scale: f64,
}

fn ekey(a: VId, b: VId) -> (VId, VId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Cdt {
    /// Bootstrap with a super-triangle enclosing the given bounding box by a
    /// wide margin.
    pub fn new(lo: Point2, hi: Point2) -> Self {
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
        let cx = 0.5 * (lo.x + hi.x);
        let cy = 0.5 * (lo.y + hi.y);
        let m = 40.0 * span;
        let pts = vec![
            Point2::new(cx - 2.0 * m, cy - m),
            Point2::new(cx + 2.0 * m, cy - m),
            Point2::new(cx, cy + 2.0 * m),
        ];
        let tris = vec![Triangle {
            v: [0, 1, 2],
            adj: [NONE, NONE, NONE],
            region: Region::Unknown,
            alive: true,
        }];
        Cdt {
            pts,
            tris,
            vert_tri: vec![0, 0, 0],
            constraints: HashMap::new(),
            last_tri: 0,
            scale: span,
        }
    }

    pub fn point(&self, v: VId) -> Point2 {
        self.pts[v as usize]
    }

    pub fn num_vertices(&self) -> usize {
        self.pts.len()
    }

    pub fn super_vertices(&self) -> [VId; 3] {
        [0, 1, 2]
    }

    pub fn is_constraint(&self, a: VId, b: VId) -> bool {
        self.constraints.contains_key(&ekey(a, b))
    }

    pub fn mark_constraint(&mut self, a: VId, b: VId) {
        self.constraints.insert(ekey(a, b), ());
    }

    fn orient(&self, a: VId, b: VId, p: Point2) -> f64 {
        orient2d(self.point(a).into(), self.point(b).into(), p.into())
    }

    /// Does the directed triangle list contain edge (a, b)? Returns (t, k).
    pub fn triangle_with_edge(&self, a: VId, b: VId) -> Option<(TId, usize)> {
        // Walk the star of `a`.
        let start = self.vert_tri[a as usize];
        if start == NONE {
            return None;
        }
        let mut t = start;
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > 1_000_000 {
                return None;
            }
            let tri = &self.tris[t as usize];
            debug_assert!(tri.alive);
            let i = tri.v.iter().position(|&v| v == a)?;
            // Edges incident to a in this triangle: (a, v[i+1]) and (a, v[i+2]).
            let next = tri.v[(i + 1) % 3];
            let prev = tri.v[(i + 2) % 3];
            if next == b {
                // Edge (a, b) = (v[i], v[i+1]) is opposite v[i+2].
                return Some((t, (i + 2) % 3));
            }
            if prev == b {
                return Some((t, (i + 1) % 3));
            }
            // Rotate around `a`: cross the edge (a, prev), i.e. opposite next.
            let across = tri.adj[(i + 1) % 3];
            if across == NONE {
                return None;
            }
            t = across;
            if t == start {
                return None;
            }
        }
    }

    /// Straight walk toward `p`. `stop_at_constraints` makes the walk report
    /// the first constraint edge it would cross.
    pub fn walk(&self, p: Point2, hint: TId, stop_at_constraints: bool) -> WalkResult {
        let mut t = if hint != NONE && (hint as usize) < self.tris.len()
            && self.tris[hint as usize].alive
        {
            hint
        } else {
            self.last_tri
        };
        if !self.tris[t as usize].alive {
            t = self
                .tris
                .iter()
                .position(|tr| tr.alive)
                .expect("no alive triangles") as TId;
        }
        let mut steps = 0usize;
        let max_steps = 8 * self.tris.len() + 64;
        loop {
            steps += 1;
            if steps > max_steps {
                // Fallback: exhaustive scan.
                return self.scan_all(p);
            }
            let tri = &self.tris[t as usize];
            let [v0, v1, v2] = tri.v;
            let o0 = self.orient(v1, v2, p);
            let o1 = self.orient(v2, v0, p);
            let o2 = self.orient(v0, v1, p);
            if o0 >= 0.0 && o1 >= 0.0 && o2 >= 0.0 {
                let zeros = [(o0, 0usize), (o1, 1), (o2, 2)]
                    .iter()
                    .filter(|(o, _)| *o == 0.0)
                    .map(|&(_, k)| k)
                    .collect::<Vec<_>>();
                return WalkResult::Found(match zeros.len() {
                    0 => Located::Inside(t),
                    1 => Located::OnEdge(t, zeros[0]),
                    _ => {
                        // Two zero orientations: p coincides with the vertex
                        // shared by the two edges.
                        let k = 3 - zeros[0] - zeros[1];
                        Located::OnVertex(tri.v[k])
                    }
                });
            }
            // Cross the most violated edge.
            let (mut ok, mut ov) = (0usize, o0);
            if o1 < ov {
                ok = 1;
                ov = o1;
            }
            if o2 < ov {
                ok = 2;
            }
            let (ea, eb) = (tri.v[(ok + 1) % 3], tri.v[(ok + 2) % 3]);
            if stop_at_constraints && self.is_constraint(ea, eb) {
                return WalkResult::BlockedByConstraint(ea, eb);
            }
            let next = tri.adj[ok];
            if next == NONE {
                return self.scan_all(p);
            }
            t = next;
        }
    }

    fn scan_all(&self, p: Point2) -> WalkResult {
        for (ti, tri) in self.tris.iter().enumerate() {
            if !tri.alive {
                continue;
            }
            let [v0, v1, v2] = tri.v;
            let o0 = self.orient(v1, v2, p);
            let o1 = self.orient(v2, v0, p);
            let o2 = self.orient(v0, v1, p);
            if o0 >= 0.0 && o1 >= 0.0 && o2 >= 0.0 {
                let t = ti as TId;
                let zeros: Vec<usize> = [(o0, 0usize), (o1, 1), (o2, 2)]
                    .iter()
                    .filter(|(o, _)| *o == 0.0)
                    .map(|&(_, k)| k)
                    .collect();
                return WalkResult::Found(match zeros.len() {
                    0 => Located::Inside(t),
                    1 => Located::OnEdge(t, zeros[0]),
                    _ => Located::OnVertex(tri.v[3 - zeros[0] - zeros[1]]),
                });
            }
        }
        panic!("point ({}, {}) outside the super-triangle", p.x, p.y);
    }

    fn alloc(&mut self, v: [VId; 3], region: Region) -> TId {
        self.tris.push(Triangle {
            v,
            adj: [NONE, NONE, NONE],
            region,
            alive: true,
        });
        (self.tris.len() - 1) as TId
    }

    fn set_adj_pair(&mut self, t: TId, k: usize, n: TId, nk: usize) {
        self.tris[t as usize].adj[k] = n;
        if n != NONE {
            self.tris[n as usize].adj[nk] = t;
        }
    }

    fn replace_neighbor(&mut self, t: TId, old: TId, new: TId) {
        if t == NONE {
            return;
        }
        let tri = &mut self.tris[t as usize];
        for k in 0..3 {
            if tri.adj[k] == old {
                tri.adj[k] = new;
                return;
            }
        }
        panic!("adjacency desync");
    }

    fn refresh_vert_tri(&mut self, t: TId) {
        for &v in &self.tris[t as usize].v {
            self.vert_tri[v as usize] = t;
        }
    }

    /// Insert a point known (or snapped) to lie inside triangle `t`.
    fn insert_in_triangle(&mut self, p: Point2, t: TId) -> VId {
        let vid = self.pts.len() as VId;
        self.pts.push(p);
        self.vert_tri.push(NONE);
        let Triangle { v: [a, b, c], adj, region, .. } = self.tris[t as usize].clone();

        let t0 = t; // (p, a, b)
        let t1 = self.alloc([vid, b, c], region);
        let t2 = self.alloc([vid, c, a], region);
        self.tris[t0 as usize].v = [vid, a, b];
        self.tris[t0 as usize].region = region;

        // External neighbors: edge (a,b) was opposite c => adj[2] etc.
        let n_ab = adj[2];
        let n_bc = adj[0];
        let n_ca = adj[1];
        self.tris[t0 as usize].adj = [n_ab, t1, t2];
        self.tris[t1 as usize].adj = [n_bc, t2, t0];
        self.tris[t2 as usize].adj = [n_ca, t0, t1];
        self.replace_neighbor(n_bc, t0, t1);
        self.replace_neighbor(n_ca, t0, t2);
        // n_ab still points at t0, which remains correct.
        self.refresh_vert_tri(t0);
        self.refresh_vert_tri(t1);
        self.refresh_vert_tri(t2);
        self.last_tri = t0;

        self.legalize_stack(vec![(t0, 0), (t1, 0), (t2, 0)]);
        vid
    }

    /// Split edge k of triangle t at point p (topological 2→4 or 1→2 split).
    /// Returns the new vertex. Constraint bookkeeping: if the edge was a
    /// constraint, both halves are marked and the split is reported.
    pub fn split_edge(&mut self, t: TId, k: usize, p: Point2) -> Inserted {
        let tri = self.tris[t as usize].clone();
        let a = tri.v[k];
        let b = tri.v[(k + 1) % 3];
        let c = tri.v[(k + 2) % 3];
        let was_constraint = self.is_constraint(b, c);
        let vid = self.pts.len() as VId;
        self.pts.push(p);
        self.vert_tri.push(NONE);

        let n = tri.adj[k];
        // Triangle t = (a, b, c) splits into (a, b, p) and (a, p, c).
        let t1 = t;
        let t2 = self.alloc([a, vid, c], tri.region);
        self.tris[t1 as usize].v = [a, b, vid];
        let n_ab = tri.adj[(k + 2) % 3]; // edge (a, b), opposite c
        let n_ca = tri.adj[(k + 1) % 3]; // edge (c, a), opposite b
        // t1 = (a, b, p): adj[0] across (b,p), adj[1] across (p,a) = t2, adj[2] across (a,b)
        // t2 = (a, p, c): adj[0] across (p,c), adj[1] across (c,a), adj[2] across (a,p) = t1
        self.tris[t1 as usize].adj = [NONE, t2, n_ab];
        self.tris[t2 as usize].adj = [NONE, n_ca, t1];
        self.replace_neighbor(n_ca, t1, t2);

        let mut suspects = vec![(t1, 2), (t2, 1)];

        if n != NONE {
            let ntri = self.tris[n as usize].clone();
            let dk = ntri
                .adj
                .iter()
                .position(|&x| x == t)
                .expect("neighbor desync");
            let d = ntri.v[dk];
            // n = (d, c, b) up to rotation; splits into (d, p, b) and (d, c, p).
            let n1 = n;
            let n2 = self.alloc([d, ntri.v[(dk + 1) % 3], vid], ntri.region);
            // ntri.v[(dk+1)%3] = c (shared edge is (c, b) from n's view).
            let cc = ntri.v[(dk + 1) % 3];
            let bb = ntri.v[(dk + 2) % 3];
            debug_assert_eq!(ekey(cc, bb), ekey(b, c));
            self.tris[n1 as usize].v = [d, vid, bb];
            let n_dc = ntri.adj[(dk + 2) % 3]; // edge (d, c), opposite b
            let n_bd = ntri.adj[(dk + 1) % 3]; // edge (b, d), opposite c
            // n1 = (d, p, b): adj[0] across (p,b), adj[1] across (b,d), adj[2] across (d,p) = n2
            // n2 = (d, c, p): adj[0] across (c,p), adj[1] across (p,d) = n1, adj[2] across (d,c)
            self.tris[n1 as usize].adj = [NONE, n_bd, n2];
            self.tris[n2 as usize].adj = [NONE, n1, n_dc];
            self.replace_neighbor(n_dc, n1, n2);
            // Tie the four around p: t1 edge (b,p) ↔ n1 edge (p,b); t2 edge (p,c) ↔ n2 edge (c,p).
            self.set_adj_pair(t1, 0, n1, 0);
            self.set_adj_pair(t2, 0, n2, 0);
            self.refresh_vert_tri(n1);
            self.refresh_vert_tri(n2);
            suspects.push((n1, 1));
            suspects.push((n2, 2));
        }
        self.refresh_vert_tri(t1);
        self.refresh_vert_tri(t2);
        self.last_tri = t1;

        if was_constraint {
            self.constraints.remove(&ekey(b, c));
            self.mark_constraint(b, vid);
            self.mark_constraint(vid, c);
        }
        self.legalize_stack(suspects);
        Inserted {
            vertex: vid,
            split_constraint: was_constraint.then_some((b, c)),
            existing: false,
        }
    }

    /// Legalize a stack of (triangle, edge) suspects by Delaunay flips,
    /// never flipping constraint edges.
    fn legalize_stack(&mut self, mut stack: Vec<(TId, usize)>) {
        let mut guard = 0usize;
        while let Some((t, k)) = stack.pop() {
            guard += 1;
            if guard > 64 * self.tris.len() + 1024 {
                panic!("legalization did not terminate");
            }
            if !self.tris[t as usize].alive {
                continue;
            }
            let tri = self.tris[t as usize].clone();
            let n = tri.adj[k];
            if n == NONE {
                continue;
            }
            let a = tri.v[k];
            let b = tri.v[(k + 1) % 3];
            let c = tri.v[(k + 2) % 3];
            if self.is_constraint(b, c) {
                continue;
            }
            let ntri = self.tris[n as usize].clone();
            let dk = ntri.adj.iter().position(|&x| x == t).expect("desync");
            let d = ntri.v[dk];
            let ic = incircle(
                self.point(a).into(),
                self.point(b).into(),
                self.point(c).into(),
                self.point(d).into(),
            );
            if ic <= 0.0 {
                continue;
            }
            // Flip (b,c) → (a,d). t := (a, b, d), n := (a, d, c).
            let n_ab = tri.adj[(k + 2) % 3];
            let n_ca = tri.adj[(k + 1) % 3];
            let n_bd = ntri.adj[(dk + 1) % 3];
            let n_dc = ntri.adj[(dk + 2) % 3];
            debug_assert_eq!(ntri.v[(dk + 1) % 3], c);
            debug_assert_eq!(ntri.v[(dk + 2) % 3], b);

            self.tris[t as usize].v = [a, b, d];
            self.tris[n as usize].v = [a, d, c];
            // t = (a,b,d): adj[0] across (b,d), adj[1] across (d,a) = n, adj[2] across (a,b)
            self.tris[t as usize].adj = [n_bd, n, n_ab];
            // n = (a,d,c): adj[0] across (d,c), adj[1] across (c,a), adj[2] across (a,d) = t
            self.tris[n as usize].adj = [n_dc, n_ca, t];
            self.replace_neighbor(n_bd, n, t);
            self.replace_neighbor(n_ca, t, n);
            self.refresh_vert_tri(t);
            self.refresh_vert_tri(n);
            // Newly suspect edges: the four outer edges of the flipped quad.
            stack.push((t, 0)); // (b, d)
            stack.push((t, 2)); // (a, b)
            stack.push((n, 0)); // (d, c)
            stack.push((n, 1)); // (c, a)
        }
    }

    /// General-purpose insertion with snapping to existing vertices.
    pub fn insert(&mut self, p: Point2, hint: TId) -> Inserted {
        match self.walk(p, hint, false) {
            WalkResult::Found(Located::OnVertex(v)) => Inserted {
                vertex: v,
                split_constraint: None,
                existing: true,
            },
            WalkResult::Found(Located::Inside(t)) => {
                // Snap to a vertex if numerically coincident.
                if let Some(v) = self.snap(p, t) {
                    return Inserted {
                        vertex: v,
                        split_constraint: None,
                        existing: true,
                    };
                }
                Inserted {
                    vertex: self.insert_in_triangle(p, t),
                    split_constraint: None,
                    existing: false,
                }
            }
            WalkResult::Found(Located::OnEdge(t, k)) => {
                if let Some(v) = self.snap(p, t) {
                    return Inserted {
                        vertex: v,
                        split_constraint: None,
                        existing: true,
                    };
                }
                self.split_edge(t, k, p)
            }
            WalkResult::BlockedByConstraint(..) => unreachable!("walk was unrestricted"),
        }
    }

    fn snap(&self, p: Point2, t: TId) -> Option<VId> {
        let tol = 1e-13 * self.scale;
        self.tris[t as usize]
            .v
            .iter()
            .copied()
            .find(|&v| self.point(v).dist(p) <= tol)
    }

    pub fn circumcenter(&self, t: TId) -> Option<Point2> {
        let [a, b, c] = self.tris[t as usize].v;
        let (pa, pb, pc) = (self.point(a), self.point(b), self.point(c));
        let d = 2.0 * (pb - pa).cross(pc - pa);
        if d.abs() < 1e-30 {
            return None;
        }
        let bb = pb - pa;
        let cc = pc - pa;
        let ux = (cc.y * bb.norm_sq() - bb.y * cc.norm_sq()) / d;
        let uy = (bb.x * cc.norm_sq() - cc.x * bb.norm_sq()) / d;
        Some(Point2::new(pa.x + ux, pa.y + uy))
    }

    /// Collect the constraint edges on the Bowyer–Watson cavity of `p`
    /// (triangles whose circumcircle strictly contains `p`, flooded from
    /// `t0` without crossing constraints) that `p` encroaches.
    pub fn cavity_encroached_constraints(&self, p: Point2, t0: TId) -> Vec<(VId, VId)> {
        let mut visited = vec![t0];
        let mut stack = vec![t0];
        let mut result = Vec::new();
        while let Some(t) = stack.pop() {
            let tri = self.tris[t as usize].clone();
            for k in 0..3 {
                let a = tri.v[(k + 1) % 3];
                let b = tri.v[(k + 2) % 3];
                if self.is_constraint(a, b) {
                    let (pa, pb) = (self.point(a), self.point(b));
                    let mid = (pa + pb).scale(0.5);
                    let r2 = 0.25 * (pa - pb).norm_sq();
                    if (p - mid).norm_sq() < r2 * (1.0 - 1e-12) {
                        result.push(ekey(a, b));
                    }
                    continue;
                }
                let n = tri.adj[k];
                if n == NONE || visited.contains(&n) {
                    continue;
                }
                let ntri = &self.tris[n as usize];
                let ic = incircle(
                    self.point(ntri.v[0]).into(),
                    self.point(ntri.v[1]).into(),
                    self.point(ntri.v[2]).into(),
                    p.into(),
                );
                if ic > 0.0 {
                    visited.push(n);
                    stack.push(n);
                }
            }
        }
        result.sort_unstable();
        result.dedup();
        result
    }

    /// Triangles currently incident to a vertex.
    pub fn star(&self, v: VId) -> Vec<TId> {
        let mut out = Vec::new();
        let start = self.vert_tri[v as usize];
        if start == NONE {
            return out;
        }
        let mut t = start;
        let mut guard = 0;
        loop {
            guard += 1;
            if guard > 1_000_000 {
                panic!("star walk did not close");
            }
            out.push(t);
            let tri = &self.tris[t as usize];
            let i = tri
                .v
                .iter()
                .position(|&x| x == v)
                .expect("vert_tri desync");
            let across = tri.adj[(i + 1) % 3];
            if across == NONE {
                // Open fan: restart from the other side.
                out.clear();
                let mut u = start;
                loop {
                    out.push(u);
                    let tri = &self.tris[u as usize];
                    let i = tri.v.iter().position(|&x| x == v).unwrap();
                    let back = tri.adj[(i + 2) % 3];
                    if back == NONE || back == start {
                        break;
                    }
                    u = back;
                }
                return out;
            }
            t = across;
            if t == start {
                return out;
            }
        }
    }

    /// Flood-fill region labels across non-constraint edges from the given
    /// seeds; everything reachable from the super-triangle is Outside.
    pub fn assign_regions(&mut self, seeds: &[(Point2, Region)]) {
        for tri in self.tris.iter_mut() {
            if tri.alive {
                tri.region = Region::Unknown;
            }
        }
        // Outside: flood from any triangle touching a super vertex.
        let svs = self.super_vertices();
        let outside_seed = self
            .tris
            .iter()
            .position(|t| t.alive && t.v.iter().any(|v| svs.contains(v)))
            .expect("super-triangle vertices present") as TId;
        self.flood(outside_seed, Region::Outside);
        for (p, region) in seeds {
            let t = match self.walk(*p, NONE, false) {
                WalkResult::Found(Located::Inside(t)) => t,
                WalkResult::Found(Located::OnEdge(t, _)) => t,
                WalkResult::Found(Located::OnVertex(v)) => self.vert_tri[v as usize],
                WalkResult::BlockedByConstraint(..) => unreachable!(),
            };
            self.flood(t, *region);
        }
        for tri in self.tris.iter_mut() {
            if tri.alive && tri.region == Region::Unknown {
                tri.region = Region::Interior;
            }
        }
    }

    fn flood(&mut self, seed: TId, region: Region) {
        let mut stack = vec![seed];
        while let Some(t) = stack.pop() {
            let tri = &self.tris[t as usize];
            if !tri.alive || self.tris[t as usize].region == region {
                continue;
            }
            self.tris[t as usize].region = region;
            let tri = self.tris[t as usize].clone();
            for k in 0..3 {
                let a = tri.v[(k + 1) % 3];
                let b = tri.v[(k + 2) % 3];
                if self.is_constraint(a, b) {
                    continue;
                }
                let n = tri.adj[k];
                if n != NONE && self.tris[n as usize].region != region {
                    stack.push(n);
                }
            }
        }
    }

    /// Exhaustive structural invariant check (used in tests).
    #[cfg(test)]
    pub fn check_consistency(&self) {
        for (ti, tri) in self.tris.iter().enumerate() {
            if !tri.alive {
                continue;
            }
            let o = orient2d(
                self.point(tri.v[0]).into(),
                self.point(tri.v[1]).into(),
                self.point(tri.v[2]).into(),
            );
            assert!(o > 0.0, "triangle {ti} not CCW");
            for k in 0..3 {
                let n = tri.adj[k];
                if n == NONE {
                    continue;
                }
                let ntri = &self.tris[n as usize];
                assert!(ntri.alive, "dead neighbor of {ti}");
                assert!(
                    ntri.adj.contains(&(ti as TId)),
                    "adjacency not mutual: {ti} -> {n}"
                );
                let a = tri.v[(k + 1) % 3];
                let b = tri.v[(k + 2) % 3];
                assert!(
                    ntri.v.contains(&a) && ntri.v.contains(&b),
                    "shared edge mismatch {ti} -> {n}"
                );
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_insertions_stay_consistent_and_delaunay() {
        let mut cdt = Cdt::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut pts = Vec::new();
        for _ in 0..300 {
            let p = Point2::new(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
            pts.push(p);
            cdt.insert(p, NONE);
        }
        cdt.check_consistency();
        // Empty-circumcircle property for triangles away from the hull.
        for tri in cdt.tris.iter().filter(|t| t.alive) {
            if tri.v.iter().any(|&v| v < 3) {
                continue;
            }
            let (a, b, c) = (
                cdt.point(tri.v[0]),
                cdt.point(tri.v[1]),
                cdt.point(tri.v[2]),
            );
            for (vi, &p) in pts.iter().enumerate() {
                let vid = (vi + 3) as VId;
                if tri.v.contains(&vid) {
                    continue;
                }
                let ic = incircle(a.into(), b.into(), c.into(), p.into());
                assert!(
                    ic <= 0.0,
                    "vertex {vid} strictly inside a circumcircle"
                );
            }
        }
    }

    #[test]
    fn grid_points_with_collinear_inserts() {
        // Exercises OnEdge paths: grid points plus midpoints of grid edges.
        let mut cdt = Cdt::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        for i in 0..=4 {
            for j in 0..=4 {
                cdt.insert(Point2::new(i as f64 / 4.0, j as f64 / 4.0), NONE);
            }
        }
        for i in 0..4 {
            cdt.insert(Point2::new(i as f64 / 4.0 + 0.125, 0.5), NONE);
        }
        cdt.check_consistency();
    }

    #[test]
    fn duplicate_insert_returns_existing() {
        let mut cdt = Cdt::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        let a = cdt.insert(Point2::new(0.3, 0.4), NONE);
        let b = cdt.insert(Point2::new(0.3, 0.4), NONE);
        assert!(!a.existing);
        assert!(b.existing);
        assert_eq!(a.vertex, b.vertex);
    }

    #[test]
    fn constraint_edge_survives_legalization() {
        let mut cdt = Cdt::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        let a = cdt.insert(Point2::new(0.1, 0.5), NONE).vertex;
        let b = cdt.insert(Point2::new(0.9, 0.5), NONE).vertex;
        assert!(cdt.triangle_with_edge(a, b).is_some());
        cdt.mark_constraint(a, b);
        // Insert points that would normally flip the edge away.
        cdt.insert(Point2::new(0.5, 0.501), NONE);
        cdt.insert(Point2::new(0.5, 0.499), NONE);
        cdt.check_consistency();
        assert!(
            cdt.triangle_with_edge(a, b).is_some(),
            "constraint edge was flipped away"
        );
    }

    #[test]
    fn split_edge_marks_both_halves() {
        let mut cdt = Cdt::new(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0));
        let a = cdt.insert(Point2::new(0.2, 0.2), NONE).vertex;
        let b = cdt.insert(Point2::new(0.8, 0.2), NONE).vertex;
        cdt.insert(Point2::new(0.5, 0.9), NONE);
        cdt.mark_constraint(a, b);
        let (t, k) = cdt.triangle_with_edge(a, b).unwrap();
        let mid = (cdt.point(a) + cdt.point(b)).scale(0.5);
        let ins = cdt.split_edge(t, k, mid);
        let reported = ins
            .split_constraint
            .map(|(x, y)| (x.min(y), x.max(y)));
        assert_eq!(reported, Some((a.min(b), a.max(b))));
        assert!(cdt.is_constraint(a, ins.vertex));
        assert!(cdt.is_constraint(ins.vertex, b));
        assert!(!cdt.is_constraint(a, b));
        cdt.check_consistency();
    }
}
