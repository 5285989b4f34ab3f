use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::PolytopalMesh;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Largest supported refinement level; level 11 already means ~4M elements.
const MAX_LEVEL: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeshFamily {
    Triangular,
    Cartesian,
    LocallyRefined,
    Hexagonal,
}

impl MeshFamily {
    pub const ALL: [MeshFamily; 4] = [MeshFamily::Triangular, MeshFamily::Cartesian, MeshFamily::LocallyRefined, MeshFamily::Hexagonal];

    pub fn name(self) -> &'static str {
        match self {
            MeshFamily::Triangular => "triangular",
            MeshFamily::Cartesian => "cartesian",
            MeshFamily::LocallyRefined => "locally-refined",
            MeshFamily::Hexagonal => "hexagonal",
        }
    }
}

impl fmt::Display for MeshFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeshFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "triangular" => Ok(MeshFamily::Triangular),
            "cartesian" => Ok(MeshFamily::Cartesian),
            "locally-refined" => Ok(MeshFamily::LocallyRefined),
            "hexagonal" => Ok(MeshFamily::Hexagonal),
            other => Err(Error::Domain(format!("unknown mesh family '{other}'"))),
        }
    }
}

/// Generates a mesh of the unit square; `h_max` halves with each level.
pub fn generate(family: MeshFamily, level: u32) -> Result<PolytopalMesh> {
    if level == 0 {
        return Err(Error::Domain("mesh level must be at least 1".into()));
    }
    if level > MAX_LEVEL {
        return Err(Error::Resource(format!("level {level} exceeds the supported maximum {MAX_LEVEL}")));
    }
    let n = 1usize << level;
    match family {
        MeshFamily::Cartesian => cartesian(n),
        MeshFamily::Triangular => triangular(n),
        MeshFamily::LocallyRefined => locally_refined(n),
        MeshFamily::Hexagonal => hexagonal(n),
    }
}

fn grid_vertices(n: usize) -> Vec<Point> {
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            v.push(Point::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    v
}

fn cartesian(n: usize) -> Result<PolytopalMesh> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    PolytopalMesh::from_polygons(grid_vertices(n), cells)
}

fn triangular(n: usize) -> Result<PolytopalMesh> {
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            // alternate the diagonal so the pattern has no preferred direction
            if (i + j) % 2 == 0 {
                cells.push(vec![a, b, c]);
                cells.push(vec![a, c, d]);
            } else {
                cells.push(vec![a, b, d]);
                cells.push(vec![b, c, d]);
            }
        }
    }
    PolytopalMesh::from_polygons(grid_vertices(n), cells)
}

/// Cartesian grid whose left half is refined once, leaving hanging nodes on
/// the coarse cells along `x = 1/2`.
fn locally_refined(n: usize) -> Result<PolytopalMesh> {
    let fine = 2 * n;
    let id = |i: usize, j: usize| j * (fine + 1) + i;
    let refined = |i: usize| i < n / 2;
    let mut cells = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let (fi, fj) = (2 * i, 2 * j);
            if refined(i) {
                for (di, dj) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let (a, b) = (fi + di, fj + dj);
                    cells.push(vec![id(a, b), id(a + 1, b), id(a + 1, b + 1), id(a, b + 1)]);
                }
                continue;
            }
            let mut poly = Vec::with_capacity(8);
            poly.push(id(fi, fj));
            if j > 0 && refined(i) {
                poly.push(id(fi + 1, fj));
            }
            poly.push(id(fi + 2, fj));
            if i + 1 < n && refined(i + 1) {
                poly.push(id(fi + 2, fj + 1));
            }
            poly.push(id(fi + 2, fj + 2));
            if j + 1 < n && refined(i) {
                poly.push(id(fi + 1, fj + 2));
            }
            poly.push(id(fi, fj + 2));
            if i > 0 && refined(i - 1) {
                poly.push(id(fi, fj + 1));
            }
            cells.push(poly);
        }
    }
    compact(grid_vertices(fine), cells)
}

/// Flat-top hexagon tiling aligned with the square and clipped to it.
///
/// Vertices live on the lattice `x = P / (3n)`, `y = Q / (2m)`, so clipping
/// and vertex matching are exact in integer arithmetic.
fn hexagonal(n: usize) -> Result<PolytopalMesh> {
    let m = ((n as f64) * 3f64.sqrt() / 2.0).round().max(1.0) as i64;
    let n = n as i64;
    let (pmax, qmax) = (3 * n, 2 * m);
    let mut keys: HashMap<(i64, i64), usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut cells = Vec::new();
    for i in 0..=n {
        let rows: Vec<i64> = if i % 2 == 0 { (0..=m).map(|j| 2 * j).collect() } else { (0..m).map(|j| 2 * j + 1).collect() };
        for q in rows {
            let p = 3 * i;
            let hex = [(p + 2, q), (p + 1, q + 1), (p - 1, q + 1), (p - 2, q), (p - 1, q - 1), (p + 1, q - 1)];
            let clipped = clip_to_box(&hex, pmax, qmax);
            if clipped.len() < 3 {
                continue;
            }
            let poly = clipped
                .into_iter()
                .map(|key| {
                    *keys.entry(key).or_insert_with(|| {
                        vertices.push(Point::new(key.0 as f64 / pmax as f64, key.1 as f64 / qmax as f64));
                        vertices.len() - 1
                    })
                })
                .collect();
            cells.push(poly);
        }
    }
    PolytopalMesh::from_polygons(vertices, cells)
}

/// Sutherland-Hodgman clipping against `[0, pmax] x [0, qmax]`. All crossings of
/// the tiling with the box lie on lattice points, so the arithmetic stays exact.
fn clip_to_box(poly: &[(i64, i64)], pmax: i64, qmax: i64) -> Vec<(i64, i64)> {
    type Pt = (i64, i64);
    type Plane = (Box<dyn Fn(Pt) -> bool>, Box<dyn Fn(Pt, Pt) -> Pt>);
    let planes: [Plane; 4] = [
        (Box::new(|p: Pt| p.0 >= 0), Box::new(|a: Pt, b: Pt| cut_at_p(a, b, 0))),
        (Box::new(move |p: Pt| p.0 <= pmax), Box::new(move |a: Pt, b: Pt| cut_at_p(a, b, pmax))),
        (Box::new(|p: Pt| p.1 >= 0), Box::new(|a: Pt, b: Pt| cut_at_q(a, b, 0))),
        (Box::new(move |p: Pt| p.1 <= qmax), Box::new(move |a: Pt, b: Pt| cut_at_q(a, b, qmax))),
    ];
    let mut out: Vec<Pt> = poly.to_vec();
    for (inside, cut) in &planes {
        let input = std::mem::take(&mut out);
        for k in 0..input.len() {
            let cur = input[k];
            let prev = input[(k + input.len() - 1) % input.len()];
            match (inside(prev), inside(cur)) {
                (true, true) => out.push(cur),
                (true, false) => out.push(cut(prev, cur)),
                (false, true) => {
                    out.push(cut(prev, cur));
                    out.push(cur);
                }
                (false, false) => {}
            }
        }
        out.dedup();
        while out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        if out.is_empty() {
            break;
        }
    }
    out
}

fn cut_at_p(a: (i64, i64), b: (i64, i64), p: i64) -> (i64, i64) {
    let num = (p - a.0) * (b.1 - a.1);
    let den = b.0 - a.0;
    debug_assert_eq!(num % den, 0);
    (p, a.1 + num / den)
}

fn cut_at_q(a: (i64, i64), b: (i64, i64), q: i64) -> (i64, i64) {
    let num = (q - a.1) * (b.0 - a.0);
    let den = b.1 - a.1;
    debug_assert_eq!(num % den, 0);
    (a.0 + num / den, q)
}

/// Drops unreferenced vertices and renumbers the polygons.
fn compact(vertices: Vec<Point>, mut cells: Vec<Vec<usize>>) -> Result<PolytopalMesh> {
    let mut map = vec![usize::MAX; vertices.len()];
    let mut kept = Vec::new();
    for cell in &mut cells {
        for v in cell.iter_mut() {
            if map[*v] == usize::MAX {
                map[*v] = kept.len();
                kept.push(vertices[*v]);
            }
            *v = map[*v];
        }
    }
    PolytopalMesh::from_polygons(kept, cells)
}
