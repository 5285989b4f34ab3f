//! Polytopal meshes of the unit square.
//!
//! Every element is a counterclockwise polygon whose consecutive vertex pairs
//! are mesh faces. Hanging nodes are ordinary polygon vertices, so the coarse
//! side of a nonconforming interface simply owns two collinear faces.

mod generate;
mod io;
mod validate;

use std::collections::HashMap;

pub use generate::{generate, MeshFamily};
pub use io::{read_mesh, write_mesh};
pub use validate::{validate, RegularityReport};

use crate::error::{Error, Result, ValidationError};
use crate::geometry::{self, Point, Vec2};

/// Owner of a face together with the orientation of the global normal
/// relative to that owner: `n_TF = sign * normal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceOwner {
    pub element: usize,
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Face {
    pub vertices: [usize; 2],
    pub length: f64,
    pub midpoint: Point,
    /// Unit normal of the oriented segment `vertices[0] -> vertices[1]`, rotated clockwise.
    pub normal: Vec2,
    pub owners: Vec<FaceOwner>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.owners.len() == 1
    }

    /// Sign relating the global normal to the outward normal of `element`.
    pub fn sign_for(&self, element: usize) -> Option<f64> {
        self.owners.iter().find(|o| o.element == element).map(|o| o.sign)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    /// Vertex indices, counterclockwise.
    pub vertices: Vec<usize>,
    /// Face indices; face `i` joins `vertices[i]` and `vertices[i + 1]`.
    pub faces: Vec<usize>,
    pub centroid: Point,
    pub diameter: f64,
    pub area: f64,
    pub submesh: Vec<[Point; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolytopalMesh {
    pub vertices: Vec<Point>,
    pub elements: Vec<Element>,
    pub faces: Vec<Face>,
    pub h_max: f64,
}

/// Fan triangulation of a polygon from `center`; a triangle is returned unchanged.
pub fn fan_submesh(points: &[Point], center: &Point) -> Option<Vec<[Point; 3]>> {
    if points.len() == 3 {
        return Some(vec![[points[0], points[1], points[2]]]);
    }
    let n = points.len();
    let mut simplices = Vec::with_capacity(n);
    for i in 0..n {
        let tri = [*center, points[i], points[(i + 1) % n]];
        if geometry::triangle_area(&tri[0], &tri[1], &tri[2]) <= 0.0 {
            return None;
        }
        simplices.push(tri);
    }
    Some(simplices)
}

/// Matching simplicial submesh of one element (fan from its centroid).
pub fn simplicial_submesh(mesh: &PolytopalMesh, element: usize) -> Result<Vec<[Point; 3]>> {
    let el = &mesh.elements[element];
    let pts = mesh.element_points(element);
    fan_submesh(&pts, &el.centroid)
        .ok_or_else(|| Error::Geometry { element, reason: "element is not star-shaped with respect to its centroid".into() })
}

impl PolytopalMesh {
    /// Builds a mesh from polygons, deriving one face per distinct polygon edge.
    pub fn from_polygons(vertices: Vec<Point>, polygons: Vec<Vec<usize>>) -> Result<Self> {
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut faces: Vec<([usize; 2], Vec<usize>)> = Vec::new();
        for (t, poly) in polygons.iter().enumerate() {
            for i in 0..poly.len() {
                let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    Some(&f) => faces[f].1.push(t),
                    None => {
                        lookup.insert(key, faces.len());
                        faces.push(([a, b], vec![t]));
                    }
                }
            }
        }
        Self::from_parts(vertices, polygons, faces)
    }

    /// Builds a mesh from explicit faces `(endpoints, owners)`, checking that
    /// the declared incidence matches the polygon edges.
    pub fn from_parts(vertices: Vec<Point>, polygons: Vec<Vec<usize>>, face_defs: Vec<([usize; 2], Vec<usize>)>) -> Result<Self> {
        let mut lookup: HashMap<(usize, usize), usize> = HashMap::with_capacity(face_defs.len());
        let mut faces = Vec::with_capacity(face_defs.len());
        for (f, (ends, owners)) in face_defs.iter().enumerate() {
            let [a, b] = *ends;
            if a == b {
                return Err(ValidationError::Face { face: f, reason: "degenerate endpoints".into() }.into());
            }
            if owners.is_empty() || owners.len() > 2 {
                return Err(ValidationError::Face { face: f, reason: format!("{} owners, expected 1 or 2", owners.len()) }.into());
            }
            if lookup.insert((a.min(b), a.max(b)), f).is_some() {
                return Err(ValidationError::Face { face: f, reason: "duplicate face".into() }.into());
            }
            let (pa, pb) = (vertices[a], vertices[b]);
            faces.push(Face {
                vertices: [a, b],
                length: (pb - pa).norm(),
                midpoint: nalgebra::center(&pa, &pb),
                normal: geometry::edge_normal(&pa, &pb),
                owners: Vec::with_capacity(2),
            });
        }

        let mut elements = Vec::with_capacity(polygons.len());
        for (t, poly) in polygons.into_iter().enumerate() {
            let pts: Vec<Point> = poly.iter().map(|&v| vertices[v]).collect();
            let (area, centroid) = geometry::polygon_area_centroid(&pts);
            if !(area > 0.0) {
                return Err(Error::Geometry { element: t, reason: format!("non-positive area {area}") });
            }
            let mut face_ids = Vec::with_capacity(poly.len());
            for i in 0..poly.len() {
                let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
                let f = *lookup
                    .get(&(a.min(b), a.max(b)))
                    .ok_or_else(|| ValidationError::Element { element: t, reason: format!("edge ({a}, {b}) has no face") })?;
                if !face_defs[f].1.contains(&t) {
                    return Err(ValidationError::Face {
                        face: f,
                        reason: format!("element {t} bounds this face but is not a declared owner"),
                    }
                    .into());
                }
                let sign = if faces[f].vertices == [a, b] { 1.0 } else { -1.0 };
                faces[f].owners.push(FaceOwner { element: t, sign });
                face_ids.push(f);
            }
            let submesh = fan_submesh(&pts, &centroid)
                .ok_or_else(|| Error::Geometry { element: t, reason: "element is not star-shaped with respect to its centroid".into() })?;
            elements.push(Element { diameter: geometry::diameter(&pts), vertices: poly, faces: face_ids, centroid, area, submesh });
        }

        for (f, (_, owners)) in face_defs.iter().enumerate() {
            if faces[f].owners.len() != owners.len() {
                return Err(ValidationError::Face {
                    face: f,
                    reason: format!("declares owners {owners:?} but is bounded by {} element(s)", faces[f].owners.len()),
                }
                .into());
            }
            // keep the declared owner order
            faces[f].owners.sort_by_key(|o| owners.iter().position(|&e| e == o.element));
        }

        let h_max = elements.iter().map(|e| e.diameter).fold(0.0, f64::max);
        Ok(PolytopalMesh { vertices, elements, faces, h_max })
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn element_points(&self, element: usize) -> Vec<Point> {
        self.elements[element].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn face_points(&self, face: usize) -> [Point; 2] {
        let [a, b] = self.faces[face].vertices;
        [self.vertices[a], self.vertices[b]]
    }

    /// Outward unit normal `n_TF` of local face `local` of `element`.
    pub fn outward_normal(&self, element: usize, local: usize) -> Vec2 {
        let f = self.elements[element].faces[local];
        let face = &self.faces[f];
        face.sign_for(element).unwrap_or(1.0) * face.normal
    }

    pub fn boundary_faces(&self) -> impl Iterator<Item = usize> + '_ {
        self.faces.iter().enumerate().filter(|(_, f)| f.is_boundary()).map(|(i, _)| i)
    }

    /// Rigidly translated copy of the mesh.
    pub fn translated(&self, shift: Vec2) -> Self {
        let mut out = self.clone();
        for v in &mut out.vertices {
            *v += shift;
        }
        for e in &mut out.elements {
            e.centroid += shift;
            for s in &mut e.submesh {
                for p in s.iter_mut() {
                    *p += shift;
                }
            }
        }
        for f in &mut out.faces {
            f.midpoint += shift;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)]
    }

    #[test]
    fn unit_square_fan_has_four_quarter_triangles() {
        let sub = fan_submesh(&square(), &Point::new(0.5, 0.5)).unwrap();
        assert_eq!(sub.len(), 4);
        for s in &sub {
            assert!((geometry::triangle_area(&s[0], &s[1], &s[2]) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_is_its_own_submesh() {
        let tri = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let sub = fan_submesh(&tri, &Point::new(1.0 / 3.0, 1.0 / 3.0)).unwrap();
        assert_eq!(sub, vec![tri]);
    }

    #[test]
    fn regular_hexagon_fan_splits_area_evenly() {
        let pts: Vec<Point> = (0..6)
            .map(|i| {
                let a = std::f64::consts::PI / 3.0 * i as f64;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let (area, c) = geometry::polygon_area_centroid(&pts);
        // 3√3/2 for unit circumradius
        assert!((area - 1.5 * 3f64.sqrt()).abs() < 1e-14);
        let sub = fan_submesh(&pts, &c).unwrap();
        assert_eq!(sub.len(), 6);
        for s in &sub {
            assert!((geometry::triangle_area(&s[0], &s[1], &s[2]) - area / 6.0).abs() < 1e-14);
        }
    }

    #[test]
    fn non_star_shaped_polygon_is_rejected() {
        // arrow-head: reflex vertex folds a fan triangle over the centroid
        let pts = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.15, 0.1), Point::new(0.0, 1.0)];
        let (_, c) = geometry::polygon_area_centroid(&pts);
        assert!(fan_submesh(&pts, &c).is_none());
    }

    #[test]
    fn two_element_fixture_detects_shared_face() {
        let vertices = vec![
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.5, 1.0),
            Point::new(0.0, 1.0),
        ];
        let mesh = PolytopalMesh::from_polygons(vertices, vec![vec![0, 1, 4, 5], vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(mesh.num_faces(), 7);
        let shared: Vec<&Face> = mesh.faces.iter().filter(|f| f.owners.len() == 2).collect();
        assert_eq!(shared.len(), 1);
        let owners: Vec<usize> = shared[0].owners.iter().map(|o| o.element).collect();
        assert_eq!(owners, vec![0, 1]);
        assert_eq!(shared[0].owners[0].sign, -shared[0].owners[1].sign);
        // n_{T0 F} points towards +x
        let local = mesh.elements[0].faces.iter().position(|&f| mesh.faces[f].owners.len() == 2).unwrap();
        assert!((mesh.outward_normal(0, local) - Vec2::new(1.0, 0.0)).norm() < 1e-15);
    }
}
