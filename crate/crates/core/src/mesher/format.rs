//! Mesh text format, version 1. Round-trips bit-exactly.
//!
//! ```text
//! robinlab-mesh 1
//! v <x> <y>
//! t <i> <j> <k>
//! e <i> <j> <TAG> [id]
//! p <i> <j>
//! ```
//! Floats are written in Rust's shortest round-trip `Display` form; tags are
//! `dirichlet`, `robin <group>`, `hole <id>`.

use super::mesh::{EdgeTag, Mesh};
use super::MeshError;
use crate::geometry::Point2;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const FORMAT_HEADER: &str = "robinlab-mesh 1";

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{FORMAT_HEADER}");
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {}", v.x, v.y);
    }
    for t in &mesh.triangles {
        let _ = writeln!(out, "t {} {} {}", t[0], t[1], t[2]);
    }
    for (&(i, j), tag) in &mesh.edge_tags {
        match tag {
            EdgeTag::OuterDirichlet => {
                let _ = writeln!(out, "e {i} {j} dirichlet");
            }
            EdgeTag::OuterRobin(g) => {
                let _ = writeln!(out, "e {i} {j} robin {g}");
            }
            EdgeTag::HoleBoundary(h) => {
                let _ = writeln!(out, "e {i} {j} hole {h}");
            }
        }
    }
    for &(a, b) in &mesh.periodic_pairs {
        let _ = writeln!(out, "p {a} {b}");
    }
    out
}

pub fn read_mesh(text: &str) -> Result<Mesh, MeshError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != FORMAT_HEADER {
        return Err(MeshError::Format(format!(
            "unsupported header {header:?}, expected {FORMAT_HEADER:?}"
        )));
    }
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut edge_tags = BTreeMap::new();
    let mut periodic_pairs = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_ascii_whitespace();
        let kind = parts.next().unwrap();
        let mut next = |what: &str| -> Result<&str, MeshError> {
            parts.next().ok_or_else(|| {
                MeshError::Format(format!("line {}: missing {what}", lineno + 2))
            })
        };
        match kind {
            "v" => {
                let x: f64 = parse(next("x")?, lineno)?;
                let y: f64 = parse(next("y")?, lineno)?;
                vertices.push(Point2::new(x, y));
            }
            "t" => {
                let i: usize = parse(next("i")?, lineno)?;
                let j: usize = parse(next("j")?, lineno)?;
                let k: usize = parse(next("k")?, lineno)?;
                triangles.push([i, j, k]);
            }
            "e" => {
                let i: usize = parse(next("i")?, lineno)?;
                let j: usize = parse(next("j")?, lineno)?;
                let tag = match next("tag")? {
                    "dirichlet" => EdgeTag::OuterDirichlet,
                    "robin" => EdgeTag::OuterRobin(parse(next("group")?, lineno)?),
                    "hole" => EdgeTag::HoleBoundary(parse(next("id")?, lineno)?),
                    other => {
                        return Err(MeshError::Format(format!(
                            "line {}: unknown tag {other:?}",
                            lineno + 2
                        )))
                    }
                };
                edge_tags.insert(super::mesh::edge_key(i, j), tag);
            }
            "p" => {
                let a: usize = parse(next("a")?, lineno)?;
                let b: usize = parse(next("b")?, lineno)?;
                periodic_pairs.push((a, b));
            }
            other => {
                return Err(MeshError::Format(format!(
                    "line {}: unknown record {other:?}",
                    lineno + 2
                )))
            }
        }
    }
    Ok(Mesh {
        vertices,
        triangles,
        edge_tags,
        periodic_pairs,
    })
}

fn parse<T: std::str::FromStr>(s: &str, lineno: usize) -> Result<T, MeshError> {
    s.parse().map_err(|_| {
        MeshError::Format(format!("line {}: cannot parse {s:?}", lineno + 2))
    })
}
