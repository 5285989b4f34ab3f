//! Element-level HHO operators: gradient reconstruction, potential
//! reconstruction, face difference operators, stabilization and the
//! discrete `W^{1,p}`-like local norm.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mesh::PolytopalMesh;
use crate::polybasis::basis::gram_matrix;
use crate::polybasis::projection::{l2_project_cell_in, l2_project_face_in};
use crate::polybasis::{cell_dim, face_dim, CellBasis, CellGeometry, CellPolynomial, FaceBasis, QuadratureRule, SmoothField};

/// Layout of `U_T^k = P^k(T) × Π_F P^k(F)`: cell unknowns first, then one
/// block per face in the element's face order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalDofSpace {
    pub degree: usize,
    pub num_faces: usize,
}

impl LocalDofSpace {
    pub fn cell_dofs(&self) -> usize {
        cell_dim(self.degree)
    }

    pub fn face_dofs(&self) -> usize {
        face_dim(self.degree)
    }

    pub fn dim(&self) -> usize {
        self.cell_dofs() + self.num_faces * self.face_dofs()
    }

    pub fn face_offset(&self, local_face: usize) -> usize {
        self.cell_dofs() + local_face * self.face_dofs()
    }
}

/// Quadrature exactness used for the nonlinear element integrals.
pub fn nonlinear_exactness(k: usize, boost: usize) -> usize {
    2 * (k + 1) + 2 + boost
}

/// Values of a discrete operator at the nodes of a face rule.
#[derive(Debug, Clone)]
pub struct FaceTables {
    pub rule: QuadratureRule,
    /// `h_F`.
    pub diameter: f64,
    /// `(D_F v)(x_q)` as rows acting on local DOFs.
    pub difference: DMatrix<f64>,
}

/// All local operators of one element, as matrices acting on local DOFs,
/// plus their values at quadrature nodes.
#[derive(Debug, Clone)]
pub struct LocalOperatorPack {
    pub space: LocalDofSpace,
    pub cell: CellGeometry,
    /// Basis of `P^{k+1}(T)`; its leading block spans `P^k(T)`.
    pub basis: CellBasis,
    pub face_bases: Vec<FaceBasis>,
    /// Coefficients of the two components of `G_T v` in the `P^k` block.
    pub gradient: [DMatrix<f64>; 2],
    /// Coefficients of `p_T v` in `basis`.
    pub reconstruction: DMatrix<f64>,
    /// Coefficients of `D_TF v` in each face basis.
    pub face_difference: Vec<DMatrix<f64>>,
    /// Rule for the nonlinear cell integrals.
    pub rule: QuadratureRule,
    /// `G_T v` components at the nodes of `rule`.
    pub gradient_at_nodes: [DMatrix<f64>; 2],
    /// `∇ p_T v` components at the nodes of `rule`.
    pub reconstruction_gradient_at_nodes: [DMatrix<f64>; 2],
    pub faces: Vec<FaceTables>,
}

fn rows_of(basis_eval: impl Fn(&crate::geometry::Point) -> DVector<f64>, rule: &QuadratureRule, n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rule.len(), n);
    for (q, x) in rule.points.iter().enumerate() {
        m.row_mut(q).copy_from(&basis_eval(x).transpose());
    }
    m
}

fn chol(m: DMatrix<f64>, what: &str) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    m.cholesky().ok_or_else(|| Error::LinearAlgebra(format!("{what} is not positive definite")))
}

impl LocalOperatorPack {
    /// Builds the operators on element `t` of `mesh`.
    pub fn from_mesh(mesh: &PolytopalMesh, t: usize, k: usize, quad_boost: usize) -> Result<Self> {
        Self::new(CellGeometry::from_mesh(mesh, t), k, quad_boost)
    }

    pub fn new(cell: CellGeometry, k: usize, quad_boost: usize) -> Result<Self> {
        let space = LocalDofSpace { degree: k, num_faces: cell.faces.len() };
        let (nc, nf, n1, ndof) = (space.cell_dofs(), space.face_dofs(), cell_dim(k + 1), space.dim());
        let basis = CellBasis::for_cell(&cell, k + 1, k >= 2)?;
        let face_bases: Vec<FaceBasis> = cell.faces.iter().map(|f| FaceBasis::new(f, k)).collect();

        let rule_c = cell.rule(2 * k + 2)?;
        let mass_k = chol(gram_matrix(&rule_c, |x| basis.eval(x).rows(0, nc).into_owned()), "cell mass matrix")?;

        // cross moments ∫ ψ_a ψ_i and ∫ ψ_a ∂ψ_i, a ∈ P^k, i ∈ P^{k+1}
        let mut cross = DMatrix::zeros(nc, n1);
        let mut ax = DMatrix::zeros(nc, n1);
        let mut ay = DMatrix::zeros(nc, n1);
        let mut stiff = DMatrix::zeros(n1, n1);
        for (x, w) in rule_c.iter() {
            let v = basis.eval(x);
            let (gx, gy) = basis.gradient(x);
            let vk = v.rows(0, nc);
            cross.ger(w, &vk, &v, 1.0);
            ax.ger(w, &vk, &gx, 1.0);
            ay.ger(w, &vk, &gy, 1.0);
            stiff.ger(w, &gx, &gx, 1.0);
            stiff.ger(w, &gy, &gy, 1.0);
        }

        // gradient reconstruction
        let mut bx = DMatrix::zeros(nc, ndof);
        let mut by = DMatrix::zeros(nc, ndof);
        // -(v_T, ∂ψ_a): columns j < nc, using ∫ ψ_j ∂ψ_a = ax[j, a] restricted to a < nc
        bx.view_mut((0, 0), (nc, nc)).copy_from(&(-ax.view((0, 0), (nc, nc)).transpose()));
        by.view_mut((0, 0), (nc, nc)).copy_from(&(-ay.view((0, 0), (nc, nc)).transpose()));
        let mut face_cross = Vec::with_capacity(space.num_faces);
        let mut face_mass = Vec::with_capacity(space.num_faces);
        for (i, (face, fb)) in cell.faces.iter().zip(&face_bases).enumerate() {
            let rule_f = face.rule(2 * k + 1)?;
            let mut c = DMatrix::zeros(nf, n1);
            for (x, w) in rule_f.iter() {
                c.ger(w, &fb.eval(x), &basis.eval(x), 1.0);
            }
            let off = space.face_offset(i);
            let ck = c.view((0, 0), (nf, nc)).transpose();
            bx.view_mut((0, off), (nc, nf)).copy_from(&(&ck * face.normal.x));
            by.view_mut((0, off), (nc, nf)).copy_from(&(&ck * face.normal.y));
            face_cross.push(c);
            face_mass.push(chol(gram_matrix(&face.rule(2 * k)?, |x| fb.eval(x)), "face mass matrix")?);
        }
        let gx = mass_k.solve(&bx);
        let gy = mass_k.solve(&by);

        // potential reconstruction: gradient part on the non-constant complement
        let rest = n1 - 1;
        let k_rest = chol(stiff.view((1, 1), (rest, rest)).into_owned(), "reconstruction stiffness")?;
        let rhs = ax.columns(1, rest).transpose() * &gx + ay.columns(1, rest).transpose() * &gy;
        let mut recon = DMatrix::zeros(n1, ndof);
        recon.view_mut((1, 0), (rest, ndof)).copy_from(&k_rest.solve(&rhs));
        // mean value: ∫ p_T v = ∫ v_T
        let means = basis_means(&basis, &rule_c);
        let mut row0 = DVector::zeros(ndof);
        row0.rows_mut(0, nc).copy_from(&means.rows(0, nc));
        row0 -= recon.view((1, 0), (rest, ndof)).transpose() * means.rows(1, rest);
        recon.row_mut(0).copy_from(&(row0 / means[0]).transpose());

        // δ_T = v_T - π^k_T p_T v
        let mut delta = -mass_k.solve(&(&cross * &recon));
        for j in 0..nc {
            delta[(j, j)] += 1.0;
        }
        let mut face_difference = Vec::with_capacity(space.num_faces);
        for i in 0..space.num_faces {
            let c = &face_cross[i];
            let inner = c * &recon + c.columns(0, nc) * &delta;
            let mut d = -face_mass[i].solve(&inner);
            let off = space.face_offset(i);
            for j in 0..nf {
                d[(j, off + j)] += 1.0;
            }
            face_difference.push(d);
        }

        let rule = cell.rule(nonlinear_exactness(k, quad_boost))?;
        let psi_k = rows_of(|x| basis.eval(x).rows(0, nc).into_owned(), &rule, nc);
        let dpsi_x = rows_of(|x| basis.derivative(x, [1, 0]), &rule, n1);
        let dpsi_y = rows_of(|x| basis.derivative(x, [0, 1]), &rule, n1);
        let gradient_at_nodes = [&psi_k * &gx, &psi_k * &gy];
        let reconstruction_gradient_at_nodes = [&dpsi_x * &recon, &dpsi_y * &recon];
        let faces = cell
            .faces
            .iter()
            .zip(&face_bases)
            .zip(&face_difference)
            .map(|((face, fb), d)| {
                let rule = face.rule(nonlinear_exactness(k, quad_boost))?;
                let phi = rows_of(|x| fb.eval(x), &rule, nf);
                Ok(FaceTables { difference: phi * d, rule, diameter: face.length })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(LocalOperatorPack {
            space,
            cell,
            basis,
            face_bases,
            gradient: [gx, gy],
            reconstruction: recon,
            face_difference,
            rule,
            gradient_at_nodes,
            reconstruction_gradient_at_nodes,
            faces,
        })
    }

    pub fn degree(&self) -> usize {
        self.space.degree
    }

    pub fn ndof(&self) -> usize {
        self.space.dim()
    }

    /// Basis of the cell unknowns, `P^k(T)`.
    pub fn cell_basis(&self) -> CellBasis {
        self.basis.truncated(self.degree())
    }

    /// Interpolate: `I_T v = (π^k_T v, (π^k_F v)_F)`.
    pub fn interpolate<F: SmoothField + ?Sized>(&self, v: &F) -> Result<DVector<f64>> {
        let mut dofs = DVector::zeros(self.ndof());
        let nc = self.space.cell_dofs();
        dofs.rows_mut(0, nc).copy_from(&l2_project_cell_in(v, &self.cell_basis(), &self.cell)?);
        for (i, (face, fb)) in self.cell.faces.iter().zip(&self.face_bases).enumerate() {
            let c = l2_project_face_in(&|x| v.value(x), fb, face)?;
            dofs.rows_mut(self.space.face_offset(i), fb.dim()).copy_from(&c);
        }
        Ok(dofs)
    }

    /// `p_T v` as a polynomial.
    pub fn potential(&self, dofs: &DVector<f64>) -> CellPolynomial {
        CellPolynomial { basis: self.basis.clone(), coeffs: &self.reconstruction * dofs }
    }

    /// The cell unknown `v_T` as a polynomial.
    pub fn cell_polynomial(&self, dofs: &DVector<f64>) -> CellPolynomial {
        let nc = self.space.cell_dofs();
        CellPolynomial { basis: self.cell_basis(), coeffs: dofs.rows(0, nc).into_owned() }
    }

    /// `s_T(u, v)` for exponent `p`.
    pub fn stabilization(&self, u: &DVector<f64>, v: &DVector<f64>, p: f64) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let du = &f.difference * u;
                let dv = &f.difference * v;
                let s: f64 = f.rule.weights.iter().zip(du.iter().zip(dv.iter())).map(|(w, (a, b))| w * signed_power(*a, p) * b).sum();
                f.diameter.powf(1.0 - p) * s
            })
            .sum()
    }

    /// `‖∇ p_T v‖^p_{L^p(T)}`.
    pub fn reconstruction_gradient_power(&self, v: &DVector<f64>, p: f64) -> f64 {
        let gx = &self.reconstruction_gradient_at_nodes[0] * v;
        let gy = &self.reconstruction_gradient_at_nodes[1] * v;
        self.rule.weights.iter().zip(gx.iter().zip(gy.iter())).map(|(w, (a, b))| w * a.hypot(*b).powf(p)).sum()
    }

    /// `‖v‖^p_{1,p,T} = ‖∇ p_T v‖^p_{L^p(T)} + s_T(v, v)`.
    pub fn local_norm_power(&self, v: &DVector<f64>, p: f64) -> f64 {
        self.reconstruction_gradient_power(v, p) + self.stabilization(v, v, p)
    }

    pub fn local_norm(&self, v: &DVector<f64>, p: f64) -> f64 {
        self.local_norm_power(v, p).powf(1.0 / p)
    }
}

/// `|t|^{p-2} t`, with the value 0 at `t = 0`.
pub fn signed_power(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(p - 2.0) * t
    }
}

fn basis_means(basis: &CellBasis, rule: &QuadratureRule) -> DVector<f64> {
    let mut m = DVector::zeros(basis.dim());
    for (x, w) in rule.iter() {
        m.axpy(w, &basis.eval(x), 1.0);
    }
    m
}
