//! `L^2`-orthogonal and elliptic projectors onto local polynomial spaces.

use nalgebra::{DMatrix, DVector};

use super::basis::{gram_matrix, CellBasis, CellGeometry, CellPolynomial, FaceBasis, FaceGeometry, FacePolynomial};
use super::fields::SmoothField;
use super::quadrature;
use crate::error::{Error, Result};

/// Exactness used when integrating non-polynomial data against the basis.
pub fn data_exactness() -> usize {
    quadrature::max_cell_exactness()
}

/// Exactness used for non-polynomial data on faces.
pub const FACE_DATA_EXACTNESS: usize = 31;

/// Whether the default basis of degree `l` is orthonormalized.
pub fn orthonormalize_degree(l: usize) -> bool {
    l >= 2
}

fn cholesky_solve(m: DMatrix<f64>, rhs: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
    m.cholesky().map(|c| c.solve(rhs)).ok_or_else(|| Error::LinearAlgebra(format!("{what} is not positive definite")))
}

/// Coefficients of `π^l_T v` in `basis` (of degree `l`).
pub fn l2_project_cell_in<F: SmoothField + ?Sized>(v: &F, basis: &CellBasis, cell: &CellGeometry) -> Result<DVector<f64>> {
    let mass = gram_matrix(&cell.rule(2 * basis.degree)?, |x| basis.eval(x));
    let rule = cell.rule(data_exactness())?;
    let mut rhs = DVector::zeros(basis.dim());
    for (x, w) in rule.iter() {
        rhs.axpy(w * v.value(x), &basis.eval(x), 1.0);
    }
    cholesky_solve(mass, &rhs, "cell mass matrix")
}

pub fn l2_project_cell<F: SmoothField + ?Sized>(v: &F, l: usize, cell: &CellGeometry) -> Result<CellPolynomial> {
    let basis = CellBasis::for_cell(cell, l, orthonormalize_degree(l))?;
    let coeffs = l2_project_cell_in(v, &basis, cell)?;
    Ok(CellPolynomial { basis, coeffs })
}

/// Coefficients of `π^k_F v` in `basis`.
pub fn l2_project_face_in(v: &dyn Fn(&crate::geometry::Point) -> f64, basis: &FaceBasis, face: &FaceGeometry) -> Result<DVector<f64>> {
    let mass = gram_matrix(&face.rule(2 * basis.degree)?, |x| basis.eval(x));
    let rule = face.rule(FACE_DATA_EXACTNESS)?;
    let mut rhs = DVector::zeros(basis.dim());
    for (x, w) in rule.iter() {
        rhs.axpy(w * v(x), &basis.eval(x), 1.0);
    }
    cholesky_solve(mass, &rhs, "face mass matrix")
}

pub fn l2_project_face<F: SmoothField + ?Sized>(v: &F, k: usize, face: &FaceGeometry) -> Result<FacePolynomial> {
    let basis = FaceBasis::new(face, k);
    let coeffs = l2_project_face_in(&|x| v.value(x), &basis, face)?;
    Ok(FacePolynomial { basis, coeffs })
}

/// Coefficients of the elliptic projection `π^{1,l}_T v` in `basis`.
///
/// The gradient part solves the stiffness system on the span of the
/// non-constant basis functions; the constant is then fixed by
/// `∫_T (π v - v) = 0`.
pub fn elliptic_project_in<F: SmoothField + ?Sized>(v: &F, basis: &CellBasis, cell: &CellGeometry) -> Result<DVector<f64>> {
    let n = basis.dim();
    let rule_poly = cell.rule((2 * basis.degree).max(1))?;
    let rule = cell.rule(data_exactness())?;

    let mut coeffs = DVector::zeros(n);
    if n > 1 {
        let mut stiffness = DMatrix::zeros(n - 1, n - 1);
        for (x, w) in rule_poly.iter() {
            let (gx, gy) = basis.gradient(x);
            let (gx, gy) = (gx.rows(1, n - 1), gy.rows(1, n - 1));
            stiffness.syger(w, &gx, &gx, 1.0);
            stiffness.syger(w, &gy, &gy, 1.0);
        }
        stiffness.fill_upper_triangle_with_lower_triangle();
        let mut rhs = DVector::zeros(n - 1);
        for (x, w) in rule.iter() {
            let g = v.gradient(x);
            let (gx, gy) = basis.gradient(x);
            rhs.axpy(w * g.x, &gx.rows(1, n - 1), 1.0);
            rhs.axpy(w * g.y, &gy.rows(1, n - 1), 1.0);
        }
        let c = cholesky_solve(stiffness, &rhs, "stiffness on the non-constant complement")?;
        coeffs.rows_mut(1, n - 1).copy_from(&c);
    }

    let mut mean_v = 0.0;
    let mut basis_means = DVector::zeros(n);
    for (x, w) in rule.iter() {
        mean_v += w * v.value(x);
        basis_means.axpy(w, &basis.eval(x), 1.0);
    }
    let rest = basis_means.rows(1, n - 1).dot(&coeffs.rows(1, n - 1));
    coeffs[0] = (mean_v - rest) / basis_means[0];
    Ok(coeffs)
}

pub fn elliptic_project<F: SmoothField + ?Sized>(v: &F, l: usize, cell: &CellGeometry) -> Result<CellPolynomial> {
    let basis = CellBasis::for_cell(cell, l, orthonormalize_degree(l))?;
    let coeffs = elliptic_project_in(v, &basis, cell)?;
    Ok(CellPolynomial { basis, coeffs })
}
