use serde::Serialize;

use super::PolytopalMesh;
use crate::error::{Result, ValidationError};
use crate::geometry::{self, Vec2};

const REL_TOL: f64 = 1e-12;

/// Shape-regularity ratios estimated from the fan submesh.
#[derive(Debug, Clone, Serialize)]
pub struct RegularityReport {
    /// `r_S / h_S` for every simplex of the submesh.
    pub simplex_ratios: Vec<f64>,
    /// `h_S / h_T` for every simplex, against its parent element.
    pub element_ratios: Vec<f64>,
    /// Minimum over both families.
    pub rho: f64,
}

/// Checks every mesh invariant and reports the regularity parameter.
pub fn validate(mesh: &PolytopalMesh) -> Result<RegularityReport> {
    let nf = mesh.faces.len();

    for (t, el) in mesh.elements.iter().enumerate() {
        let elem_err = |reason: String| ValidationError::Element { element: t, reason };
        if el.vertices.len() < 3 {
            return Err(elem_err(format!("only {} vertices", el.vertices.len())).into());
        }
        if !(el.area > 0.0) {
            return Err(elem_err(format!("non-positive area {}", el.area)).into());
        }
        if let Some(&f) = el.faces.iter().find(|&&f| f >= nf) {
            return Err(elem_err(format!("references missing face {f}")).into());
        }

        let pts = mesh.element_points(t);
        let perimeter: f64 = (0..pts.len()).map(|i| (pts[(i + 1) % pts.len()] - pts[i]).norm()).sum();
        let covered: f64 = el.faces.iter().map(|&f| mesh.faces[f].length).sum();
        if (covered - perimeter).abs() > REL_TOL * perimeter {
            return Err(ValidationError::SkeletonPartition { element: t, covered, perimeter }.into());
        }

        let mut flux = Vec2::zeros();
        for &f in &el.faces {
            let face = &mesh.faces[f];
            let sign = face.sign_for(t).ok_or_else(|| elem_err(format!("not an owner of its face {f}")))?;
            flux += face.length * sign * face.normal;
        }
        if flux.norm() > REL_TOL {
            return Err(ValidationError::Divergence { element: t, residual: flux.norm() }.into());
        }

        let mut sub_area = 0.0;
        for s in &el.submesh {
            let a = geometry::triangle_area(&s[0], &s[1], &s[2]);
            if !(a > 0.0) {
                return Err(elem_err("submesh simplex with non-positive orientation".into()).into());
            }
            sub_area += a;
        }
        if (sub_area - el.area).abs() > REL_TOL * el.area {
            return Err(elem_err(format!("submesh area {sub_area} differs from element area {}", el.area)).into());
        }
    }

    let mut boundary_length = 0.0;
    for (f, face) in mesh.faces.iter().enumerate() {
        let face_err = |reason: String| ValidationError::Face { face: f, reason };
        if !(face.length > 0.0) {
            return Err(face_err("zero length".into()).into());
        }
        if (face.normal.norm() - 1.0).abs() > 1e-14 {
            return Err(face_err(format!("normal has length {}", face.normal.norm())).into());
        }
        for o in &face.owners {
            let listed = mesh.elements.get(o.element).is_some_and(|e| e.faces.contains(&f));
            if !listed {
                return Err(face_err(format!("owner {} does not list this face", o.element)).into());
            }
        }
        match face.owners.as_slice() {
            [_] => {
                let [a, b] = mesh.face_points(f);
                let on_side =
                    |u: f64, v: f64| (u.abs() < REL_TOL && v.abs() < REL_TOL) || ((u - 1.0).abs() < REL_TOL && (v - 1.0).abs() < REL_TOL);
                if !(on_side(a.x, b.x) || on_side(a.y, b.y)) {
                    return Err(face_err("boundary face not contained in the domain boundary".into()).into());
                }
                boundary_length += face.length;
            }
            [o1, o2] => {
                if o1.element == o2.element {
                    return Err(face_err("interface owned twice by the same element".into()).into());
                }
                if o1.sign != -o2.sign {
                    return Err(face_err("owner normals are not opposite".into()).into());
                }
            }
            owners => return Err(face_err(format!("{} owners", owners.len())).into()),
        }
    }

    let total: f64 = mesh.elements.iter().map(|e| e.area).sum();
    if (total - 1.0).abs() > REL_TOL {
        return Err(ValidationError::Coverage { total }.into());
    }
    if (boundary_length - 4.0).abs() > REL_TOL * 4.0 {
        return Err(ValidationError::BoundaryLength { total: boundary_length }.into());
    }

    let mut simplex_ratios = Vec::new();
    let mut element_ratios = Vec::new();
    for el in &mesh.elements {
        for s in &el.submesh {
            let h_s = geometry::diameter(s);
            simplex_ratios.push(geometry::triangle_inradius(s) / h_s);
            element_ratios.push(h_s / el.diameter);
        }
    }
    let rho = simplex_ratios.iter().chain(&element_ratios).copied().fold(f64::INFINITY, f64::min);
    Ok(RegularityReport { simplex_ratios, element_ratios, rho })
}
