//! Scaled monomial bases on cells and faces.

use nalgebra::{DMatrix, DVector};

use super::fields::SmoothField;
use super::quadrature::{self, QuadratureRule};
use crate::error::{Error, Result};
use crate::geometry::{self, Point, Vec2};
use crate::mesh::{fan_submesh, PolytopalMesh};

/// Dimension of `P^l` in two variables.
pub const fn cell_dim(l: usize) -> usize {
    (l + 1) * (l + 2) / 2
}

/// Dimension of `P^k` on a face.
pub const fn face_dim(k: usize) -> usize {
    k + 1
}

/// A face seen from a cell (or standalone).
#[derive(Debug, Clone)]
pub struct FaceGeometry {
    pub a: Point,
    pub b: Point,
    pub midpoint: Point,
    pub length: f64,
    /// Unit tangent `a -> b`.
    pub tangent: Vec2,
    /// Unit normal; outward when the face belongs to a `CellGeometry`.
    pub normal: Vec2,
}

impl FaceGeometry {
    pub fn new(a: Point, b: Point, normal: Vec2) -> Self {
        let length = (b - a).norm();
        FaceGeometry { a, b, midpoint: nalgebra::center(&a, &b), length, tangent: (b - a) / length, normal }
    }

    /// Mesh face with its global orientation and normal.
    pub fn from_mesh(mesh: &PolytopalMesh, face: usize) -> Self {
        let [a, b] = mesh.face_points(face);
        FaceGeometry::new(a, b, mesh.faces[face].normal)
    }

    pub fn rule(&self, exactness: usize) -> Result<QuadratureRule> {
        quadrature::segment_rule(&self.a, &self.b, exactness)
    }
}

/// Everything the polynomial machinery needs to know about one polygon.
#[derive(Debug, Clone)]
pub struct CellGeometry {
    pub vertices: Vec<Point>,
    pub centroid: Point,
    pub diameter: f64,
    pub area: f64,
    pub simplices: Vec<[Point; 3]>,
    pub faces: Vec<FaceGeometry>,
}

impl CellGeometry {
    /// Standalone counterclockwise polygon; faces are its edges.
    pub fn from_polygon(points: &[Point]) -> Result<Self> {
        let (area, centroid) = geometry::polygon_area_centroid(points);
        if !(area > 0.0) {
            return Err(Error::Geometry { element: 0, reason: format!("non-positive area {area}") });
        }
        let simplices = fan_submesh(points, &centroid).ok_or_else(|| Error::Geometry { element: 0, reason: "not star-shaped".into() })?;
        let n = points.len();
        let faces = (0..n)
            .map(|i| {
                let (a, b) = (points[i], points[(i + 1) % n]);
                FaceGeometry::new(a, b, geometry::edge_normal(&a, &b))
            })
            .collect();
        Ok(CellGeometry { vertices: points.to_vec(), centroid, diameter: geometry::diameter(points), area, simplices, faces })
    }

    /// Mesh element; faces follow the element's face order but keep the
    /// global face orientation (so face bases agree between both owners).
    pub fn from_mesh(mesh: &PolytopalMesh, element: usize) -> Self {
        let el = &mesh.elements[element];
        let faces = el
            .faces
            .iter()
            .enumerate()
            .map(|(i, &f)| {
                let [a, b] = mesh.face_points(f);
                FaceGeometry::new(a, b, mesh.outward_normal(element, i))
            })
            .collect();
        CellGeometry {
            vertices: mesh.element_points(element),
            centroid: el.centroid,
            diameter: el.diameter,
            area: el.area,
            simplices: el.submesh.clone(),
            faces,
        }
    }

    pub fn rule(&self, exactness: usize) -> Result<QuadratureRule> {
        quadrature::cell_rule(&self.simplices, exactness)
    }
}

/// Hierarchical basis of `P^l(T)` built from `((x - x_T) / h_T)^α`, optionally
/// orthonormalized in `L^2(T)`. The first `cell_dim(j)` functions always span
/// `P^j(T)`, so lower-degree spaces are leading sub-blocks.
#[derive(Debug, Clone)]
pub struct CellBasis {
    pub degree: usize,
    pub center: Point,
    pub scale: f64,
    pub exponents: Vec<[usize; 2]>,
    /// `ψ = L φ` with `L` lower triangular, when orthonormalized.
    pub transform: Option<DMatrix<f64>>,
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|i| (n - i) as f64).product()
}

impl CellBasis {
    pub fn monomial(center: Point, scale: f64, degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(cell_dim(degree));
        for d in 0..=degree {
            for a in (0..=d).rev() {
                exponents.push([a, d - a]);
            }
        }
        CellBasis { degree, center, scale, exponents, transform: None }
    }

    /// Mass-orthonormal hierarchical basis (Cholesky-based Gram-Schmidt).
    pub fn orthonormal(cell: &CellGeometry, degree: usize) -> Result<Self> {
        let mut basis = CellBasis::monomial(cell.centroid, cell.diameter, degree);
        let rule = cell.rule(2 * degree)?;
        let mass = gram_matrix(&rule, |x| basis.eval(x));
        let chol = mass.cholesky().ok_or_else(|| Error::LinearAlgebra("cell mass matrix is not positive definite".into()))?;
        let n = basis.dim();
        let inv = chol
            .l()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::LinearAlgebra("singular Cholesky factor".into()))?;
        basis.transform = Some(inv);
        Ok(basis)
    }

    /// Basis of degree `degree`, orthonormalized when requested.
    pub fn for_cell(cell: &CellGeometry, degree: usize, orthonormalize: bool) -> Result<Self> {
        if orthonormalize {
            CellBasis::orthonormal(cell, degree)
        } else {
            Ok(CellBasis::monomial(cell.centroid, cell.diameter, degree))
        }
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    /// Leading sub-basis spanning `P^l(T)`, `l <= degree`.
    pub fn truncated(&self, l: usize) -> CellBasis {
        let n = cell_dim(l.min(self.degree));
        CellBasis {
            degree: l.min(self.degree),
            center: self.center,
            scale: self.scale,
            exponents: self.exponents[..n].to_vec(),
            transform: self.transform.as_ref().map(|t| t.view((0, 0), (n, n)).into_owned()),
        }
    }

    /// `∂^α` of the raw scaled monomials.
    pub fn monomial_derivative(&self, x: &Point, alpha: [usize; 2]) -> DVector<f64> {
        let xi = (x.x - self.center.x) / self.scale;
        let eta = (x.y - self.center.y) / self.scale;
        let factor = self.scale.powi(-((alpha[0] + alpha[1]) as i32));
        DVector::from_iterator(
            self.dim(),
            self.exponents.iter().map(|&[e, f]| {
                if e < alpha[0] || f < alpha[1] {
                    0.0
                } else {
                    factor * falling(e, alpha[0]) * falling(f, alpha[1]) * xi.powi((e - alpha[0]) as i32) * eta.powi((f - alpha[1]) as i32)
                }
            }),
        )
    }

    pub fn derivative(&self, x: &Point, alpha: [usize; 2]) -> DVector<f64> {
        let raw = self.monomial_derivative(x, alpha);
        match &self.transform {
            Some(t) => t * raw,
            None => raw,
        }
    }

    pub fn eval(&self, x: &Point) -> DVector<f64> {
        self.derivative(x, [0, 0])
    }

    /// `(∂x ψ, ∂y ψ)` for all basis functions.
    pub fn gradient(&self, x: &Point) -> (DVector<f64>, DVector<f64>) {
        (self.derivative(x, [1, 0]), self.derivative(x, [0, 1]))
    }
}

/// Scaled monomials `(s / h_F)^j` in the arclength coordinate `s` measured
/// from the face midpoint along the face tangent.
#[derive(Debug, Clone)]
pub struct FaceBasis {
    pub degree: usize,
    pub origin: Point,
    pub tangent: Vec2,
    pub scale: f64,
}

impl FaceBasis {
    pub fn new(face: &FaceGeometry, degree: usize) -> Self {
        FaceBasis { degree, origin: face.midpoint, tangent: face.tangent, scale: face.length }
    }

    pub fn dim(&self) -> usize {
        face_dim(self.degree)
    }

    /// Arclength coordinate of `x` (not scaled).
    pub fn arclength(&self, x: &Point) -> f64 {
        (x - self.origin).dot(&self.tangent)
    }

    pub fn eval(&self, x: &Point) -> DVector<f64> {
        let s = self.arclength(x) / self.scale;
        DVector::from_iterator(self.dim(), (0..=self.degree).map(|j| s.powi(j as i32)))
    }
}

/// Polynomial on a cell in a given basis.
#[derive(Debug, Clone)]
pub struct CellPolynomial {
    pub basis: CellBasis,
    pub coeffs: DVector<f64>,
}

impl SmoothField for CellPolynomial {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        let n = self.coeffs.len();
        self.basis.derivative(x, alpha).rows(0, n).dot(&self.coeffs)
    }
}

#[derive(Debug, Clone)]
pub struct FacePolynomial {
    pub basis: FaceBasis,
    pub coeffs: DVector<f64>,
}

impl FacePolynomial {
    pub fn value(&self, x: &Point) -> f64 {
        self.basis.eval(x).dot(&self.coeffs)
    }
}

/// `Σ_q w_q φ(x_q) φ(x_q)^T`.
pub fn gram_matrix(rule: &QuadratureRule, eval: impl Fn(&Point) -> DVector<f64>) -> DMatrix<f64> {
    let mut m: Option<DMatrix<f64>> = None;
    for (x, w) in rule.iter() {
        let v = eval(x);
        let acc = m.get_or_insert_with(|| DMatrix::zeros(v.len(), v.len()));
        acc.syger(w, &v, &v, 1.0);
    }
    let mut m = m.unwrap_or_else(|| DMatrix::zeros(0, 0));
    m.fill_upper_triangle_with_lower_triangle();
    m
}
