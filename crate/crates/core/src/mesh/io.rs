//! Plain-text mesh format.
//!
//! ```text
//! polymesh 2d v1
//! vertices N
//! x y                      (N lines)
//! elements M
//! v0 v1 v2 ...             (M lines, counterclockwise)
//! faces K
//! v0 v1 ownerA ownerB      (K lines, ownerB = -1 on the boundary)
//! ```
//! All indices are 0-based. Floats are written in shortest round-trip form.

use std::fmt::Write as _;

use super::PolytopalMesh;
use crate::error::{Error, Result};
use crate::geometry::Point;

const HEADER: &str = "polymesh 2d v1";

pub fn write_mesh(mesh: &PolytopalMesh) -> String {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "vertices {}", mesh.vertices.len()).unwrap();
    for v in &mesh.vertices {
        writeln!(out, "{:?} {:?}", v.x, v.y).unwrap();
    }
    writeln!(out, "elements {}", mesh.elements.len()).unwrap();
    for e in &mesh.elements {
        let ids: Vec<String> = e.vertices.iter().map(usize::to_string).collect();
        writeln!(out, "{}", ids.join(" ")).unwrap();
    }
    writeln!(out, "faces {}", mesh.faces.len()).unwrap();
    for f in &mesh.faces {
        let a = f.owners[0].element as i64;
        let b = f.owners.get(1).map_or(-1, |o| o.element as i64);
        writeln!(out, "{} {} {} {}", f.vertices[0], f.vertices[1], a, b).unwrap();
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let line = line.trim();
            if !line.is_empty() {
                return Ok(line);
            }
        }
        Err(Error::Parse { line: self.last + 1, message: "unexpected end of input".into() })
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { line: self.last, message: message.into() }
    }

    fn section(&mut self, name: &str) -> Result<usize> {
        let line = self.next()?;
        let mut it = line.split_whitespace();
        if it.next() != Some(name) {
            return Err(self.err(format!("expected '{name} <count>'")));
        }
        let count = it.next().and_then(|s| s.parse().ok()).ok_or_else(|| self.err(format!("bad {name} count")))?;
        if it.next().is_some() {
            return Err(self.err("trailing tokens"));
        }
        Ok(count)
    }
}

pub fn read_mesh(text: &str) -> Result<PolytopalMesh> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    if lines.next()? != HEADER {
        return Err(lines.err(format!("expected header '{HEADER}'")));
    }

    let nv = lines.section("vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let line = lines.next()?;
        let xy: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| lines.err(format!("bad coordinate: {e}")))?;
        if xy.len() != 2 || !xy.iter().all(|c| c.is_finite()) {
            return Err(lines.err("expected two finite coordinates"));
        }
        vertices.push(Point::new(xy[0], xy[1]));
    }

    let ne = lines.section("elements")?;
    let mut polygons = Vec::with_capacity(ne);
    for _ in 0..ne {
        let line = lines.next()?;
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| lines.err(format!("bad vertex index: {e}")))?;
        if ids.len() < 3 {
            return Err(lines.err("element needs at least 3 vertices"));
        }
        if let Some(v) = ids.iter().find(|&&v| v >= nv) {
            return Err(lines.err(format!("dangling vertex index {v}")));
        }
        polygons.push(ids);
    }

    let nf = lines.section("faces")?;
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let line = lines.next()?;
        let vals: Vec<i64> = line
            .split_whitespace()
            .map(|s| s.parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| lines.err(format!("bad face entry: {e}")))?;
        let [v0, v1, a, b] = vals[..] else {
            return Err(lines.err("face line needs 'v0 v1 ownerA ownerB'"));
        };
        for v in [v0, v1] {
            if v < 0 || v as usize >= nv {
                return Err(lines.err(format!("dangling vertex index {v}")));
            }
        }
        if a < 0 || a as usize >= ne || b < -1 || b >= ne as i64 {
            return Err(lines.err("owner index out of range"));
        }
        let mut owners = vec![a as usize];
        if b >= 0 {
            owners.push(b as usize);
        }
        faces.push(([v0 as usize, v1 as usize], owners));
    }
    if let Ok(extra) = lines.next() {
        return Err(lines.err(format!("unexpected trailing content '{extra}'")));
    }

    PolytopalMesh::from_parts(vertices, polygons, faces)
}
