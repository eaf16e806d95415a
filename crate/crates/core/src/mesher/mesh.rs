use super::MeshError;
use crate::geometry::Point2;
use std::collections::{BTreeMap, HashMap};

/// Boundary/polyline tag of a mesh edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeTag {
    OuterDirichlet,
    /// Robin part of the outer boundary; the id is the domain edge group the
    /// Σ weight is read from.
    OuterRobin(usize),
    /// Boundary circle of one hole.
    HoleBoundary(usize),
}

/// A conforming tagged P1 triangulation.
///
/// Torus meshes are meshes of the fundamental square whose seam vertices are
/// identified through `periodic_pairs`; paired vertices carry one degree of
/// freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point2>,
    /// CCW index triples.
    pub triangles: Vec<[usize; 3]>,
    /// Keyed by (min, max) vertex index. Tagged edges may be interior when a
    /// hole polyline is embedded in a full-domain mesh.
    pub edge_tags: BTreeMap<(usize, usize), EdgeTag>,
    /// Periodic seam identifications (a, b) meaning a and b are the same
    /// torus vertex.
    pub periodic_pairs: Vec<(usize, usize)>,
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Mesh {
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        0.5 * (self.vertices[b] - self.vertices[a]).cross(self.vertices[c] - self.vertices[a])
    }

    pub fn area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn edge_length(&self, a: usize, b: usize) -> f64 {
        self.vertices[a].dist(self.vertices[b])
    }

    /// Total length of the edges tagged as the given hole's boundary.
    pub fn hole_perimeter(&self, hole_id: usize) -> f64 {
        self.edge_tags
            .iter()
            .filter(|(_, tag)| **tag == EdgeTag::HoleBoundary(hole_id))
            .map(|(&(a, b), _)| self.edge_length(a, b))
            .sum()
    }

    pub fn hole_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .edge_tags
            .values()
            .filter_map(|t| match t {
                EdgeTag::HoleBoundary(i) => Some(*i),
                _ => None,
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    pub fn min_angle_deg(&self) -> f64 {
        let mut min_angle = f64::INFINITY;
        for t in &self.triangles {
            for k in 0..3 {
                let a = self.vertices[t[k]];
                let b = self.vertices[t[(k + 1) % 3]];
                let c = self.vertices[t[(k + 2) % 3]];
                let u = b - a;
                let v = c - a;
                let cos = (u.dot(v) / (u.norm() * v.norm())).clamp(-1.0, 1.0);
                min_angle = min_angle.min(cos.acos().to_degrees());
            }
        }
        min_angle
    }

    /// Map each edge to the triangles containing it.
    fn edge_incidence(&self) -> HashMap<(usize, usize), Vec<usize>> {
        let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (ti, t) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                map.entry(edge_key(t[k], t[(k + 1) % 3])).or_default().push(ti);
            }
        }
        map
    }

    /// Vertex → dof map folding periodic pairs onto shared dofs, plus the
    /// independent dof count.
    pub fn dof_map(&self) -> (Vec<usize>, usize) {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for &(a, b) in &self.periodic_pairs {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
        let mut dof_of_root: HashMap<usize, usize> = HashMap::new();
        let mut map = vec![0usize; n];
        let mut next = 0usize;
        for v in 0..n {
            let r = find(&mut parent, v);
            let dof = *dof_of_root.entry(r).or_insert_with(|| {
                let d = next;
                next += 1;
                d
            });
            map[v] = dof;
        }
        (map, next)
    }

    /// Structural checks: conforming incidence, orientation, positive areas,
    /// the 20° angle bound, closed tagged hole cycles, and tag/pairing
    /// completeness on the boundary.
    pub fn validate(&self) -> Result<(), MeshError> {
        let n = self.vertices.len();
        for t in &self.triangles {
            if t.iter().any(|&v| v >= n) {
                return Err(MeshError::Structure("triangle index out of range".into()));
            }
        }
        for ti in 0..self.triangles.len() {
            if self.triangle_area(ti) <= 0.0 {
                return Err(MeshError::Structure(format!(
                    "triangle {ti} is not CCW / has non-positive area"
                )));
            }
        }
        let incidence = self.edge_incidence();
        let mut paired: HashMap<usize, Vec<usize>> = HashMap::new();
        for &(a, b) in &self.periodic_pairs {
            paired.entry(a).or_default().push(b);
            paired.entry(b).or_default().push(a);
        }
        for (&(a, b), tris) in &incidence {
            match tris.len() {
                1 => {
                    let tagged = self.edge_tags.contains_key(&(a, b));
                    let is_paired = paired.contains_key(&a) && paired.contains_key(&b);
                    if !tagged && !is_paired {
                        return Err(MeshError::Structure(format!(
                            "boundary edge ({a}, {b}) neither tagged nor periodic-paired"
                        )));
                    }
                }
                2 => {}
                k => {
                    return Err(MeshError::Structure(format!(
                        "edge ({a}, {b}) shared by {k} triangles"
                    )))
                }
            }
        }
        for key in self.edge_tags.keys() {
            if !incidence.contains_key(key) {
                return Err(MeshError::Structure(format!(
                    "tagged edge {key:?} is not a mesh edge"
                )));
            }
        }
        let min_angle = self.min_angle_deg();
        if min_angle < super::MIN_ANGLE_DEG - 1e-9 {
            return Err(MeshError::QualityFailure { min_angle });
        }
        // Every hole id must form closed cycles: each vertex of the tagged
        // subgraph has even degree (= 2 for a simple circle).
        for id in self.hole_ids() {
            let mut degree: HashMap<usize, usize> = HashMap::new();
            for (&(a, b), tag) in &self.edge_tags {
                if *tag == EdgeTag::HoleBoundary(id) {
                    *degree.entry(a).or_default() += 1;
                    *degree.entry(b).or_default() += 1;
                }
            }
            if degree.is_empty() || degree.values().any(|&d| d != 2) {
                return Err(MeshError::Structure(format!(
                    "hole {id} boundary is not a closed cycle"
                )));
            }
        }
        Ok(())
    }

    /// Barycentric coordinates of `p` in triangle `t` (can be negative).
    pub fn barycentric(&self, t: usize, p: Point2) -> [f64; 3] {
        let [i, j, k] = self.triangles[t];
        let (a, b, c) = (self.vertices[i], self.vertices[j], self.vertices[k]);
        let twice = (b - a).cross(c - a);
        [
            (b - p).cross(c - p) / twice,
            (c - p).cross(a - p) / twice,
            (a - p).cross(b - p) / twice,
        ]
    }
}

/// Uniform-grid point locator over a mesh.
pub struct Locator<'m> {
    mesh: &'m Mesh,
    lo: Point2,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl<'m> Locator<'m> {
    pub fn new(mesh: &'m Mesh) -> Self {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &mesh.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        let nt = mesh.triangles.len().max(1);
        let extent = (hi.x - lo.x).max(hi.y - lo.y).max(1e-300);
        let n = ((nt as f64).sqrt().ceil() as usize).clamp(1, 512);
        let cell = extent / n as f64;
        let nx = (((hi.x - lo.x) / cell).ceil() as usize + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).ceil() as usize + 1).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        for (ti, t) in mesh.triangles.iter().enumerate() {
            let (mut tlo, mut thi) = (mesh.vertices[t[0]], mesh.vertices[t[0]]);
            for &v in &t[1..] {
                tlo.x = tlo.x.min(mesh.vertices[v].x);
                tlo.y = tlo.y.min(mesh.vertices[v].y);
                thi.x = thi.x.max(mesh.vertices[v].x);
                thi.y = thi.y.max(mesh.vertices[v].y);
            }
            let i0 = (((tlo.x - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let i1 = (((thi.x - lo.x) / cell).floor() as isize).clamp(0, nx as isize - 1) as usize;
            let j0 = (((tlo.y - lo.y) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
            let j1 = (((thi.y - lo.y) / cell).floor() as isize).clamp(0, ny as isize - 1) as usize;
            for i in i0..=i1 {
                for j in j0..=j1 {
                    buckets[j * nx + i].push(ti);
                }
            }
        }
        Locator {
            mesh,
            lo,
            cell,
            nx,
            ny,
            buckets,
        }
    }

    /// Containing triangle and barycentric coordinates, with a small
    /// tolerance for points on edges.
    pub fn locate(&self, p: Point2) -> Option<(usize, [f64; 3])> {
        let i = (((p.x - self.lo.x) / self.cell).floor() as isize).clamp(0, self.nx as isize - 1)
            as usize;
        let j = (((p.y - self.lo.y) / self.cell).floor() as isize).clamp(0, self.ny as isize - 1)
            as usize;
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for dj in -1isize..=1 {
            for di in -1isize..=1 {
                let ii = i as isize + di;
                let jj = j as isize + dj;
                if ii < 0 || jj < 0 || ii >= self.nx as isize || jj >= self.ny as isize {
                    continue;
                }
                for &ti in &self.buckets[jj as usize * self.nx + ii as usize] {
                    let bc = self.mesh.barycentric(ti, p);
                    let worst = bc[0].min(bc[1]).min(bc[2]);
                    if worst >= -1e-12 {
                        return Some((ti, bc));
                    }
                    if best.map_or(true, |(_, _, w)| worst > w) {
                        best = Some((ti, bc, worst));
                    }
                }
            }
        }
        // Accept a slightly-outside match (points on the hull boundary).
        best.and_then(|(ti, bc, w)| if w > -1e-9 { Some((ti, bc)) } else { None })
    }
}
