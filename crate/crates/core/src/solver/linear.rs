use faer::prelude::*;
use faer::sparse::SparseColMat;
use faer::Side;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::assembly::assemble_matrix;
use super::dofs::Discretization;
use crate::error::{Error, Result};

/// Sparse direct solver used for the Newton systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinearSolverKind {
    /// Sparse Cholesky, falling back to LU when the matrix is not numerically SPD.
    #[default]
    Cholesky,
    Lu,
}

/// Solves `A x = b`.
pub fn solve_sparse(a: &SparseColMat<usize, f64>, b: &DVector<f64>, kind: LinearSolverKind) -> Result<DVector<f64>> {
    let mut rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let cholesky = match kind {
        LinearSolverKind::Cholesky => a.sp_cholesky(Side::Lower).ok(),
        LinearSolverKind::Lu => None,
    };
    match cholesky {
        Some(llt) => llt.solve_in_place(rhs.as_mut()),
        None => {
            if kind == LinearSolverKind::Cholesky {
                log::debug!("Cholesky failed, retrying with LU");
            }
            let lu = a.sp_lu().map_err(|e| Error::LinearAlgebra(format!("sparse LU failed: {e:?}")))?;
            lu.solve_in_place(rhs.as_mut());
        }
    }
    let x = DVector::from_fn(b.len(), |i, _| rhs[(i, 0)]);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearAlgebra("linear solve produced non-finite values".into()));
    }
    Ok(x)
}

/// Element data kept for back-substitution.
struct CellElimination {
    cell_lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    coupling: DMatrix<f64>,
    residual: DVector<f64>,
}

/// Face-only system obtained by eliminating the cell unknowns element by element.
pub struct CondensedSystem {
    pub matrix: SparseColMat<usize, f64>,
    /// Right-hand side of the reduced system (already negated).
    pub rhs: DVector<f64>,
    eliminations: Vec<CellElimination>,
}

impl CondensedSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }
}

/// Builds the Schur complement on the face unknowns of `J δ = -r`, given
/// element matrices and residuals. Returns `None` if some cell block is singular.
pub fn static_condense(disc: &Discretization, locals: &[(DVector<f64>, DMatrix<f64>)]) -> Result<Option<CondensedSystem>> {
    let layout = &disc.layout;
    let nc = layout.cell_dofs();
    let offset = layout.num_cell_unknowns();
    let nface = layout.dim() - offset;
    let fixed = layout.fixed_mask();

    let mut triplets = Vec::new();
    let mut rhs = DVector::zeros(nface);
    let mut eliminations = Vec::with_capacity(locals.len());
    for (t, (r, m)) in locals.iter().enumerate() {
        let nl = m.nrows() - nc;
        let jcc = m.view((0, 0), (nc, nc)).into_owned();
        let jcf = m.view((0, nc), (nc, nl)).into_owned();
        let jfc = m.view((nc, 0), (nl, nc));
        let jff = m.view((nc, nc), (nl, nl));
        let lu = jcc.lu();
        let (Some(x_cf), Some(x_c)) = (lu.solve(&jcf), lu.solve(&r.rows(0, nc).into_owned())) else {
            return Ok(None);
        };
        if x_cf.iter().chain(x_c.iter()).any(|v| !v.is_finite()) {
            return Ok(None);
        }
        let schur = jff - jfc * &x_cf;
        let g = r.rows(nc, nl) - jfc * &x_c;
        let map: Vec<usize> = disc.maps[t][nc..].iter().map(|&i| i - offset).collect();
        for (b, &j) in map.iter().enumerate() {
            if fixed[j + offset] {
                continue;
            }
            for (a, &i) in map.iter().enumerate() {
                if !fixed[i + offset] {
                    triplets.push(faer::sparse::Triplet::new(i, j, schur[(a, b)]));
                }
            }
        }
        for (a, &i) in map.iter().enumerate() {
            if !fixed[i + offset] {
                rhs[i] -= g[a];
            }
        }
        eliminations.push(CellElimination { cell_lu: lu, coupling: jcf, residual: r.rows(0, nc).into_owned() });
    }
    triplets.extend((0..nface).filter(|&i| fixed[i + offset]).map(|i| faer::sparse::Triplet::new(i, i, 1.0)));
    let matrix = SparseColMat::try_new_from_triplets(nface, nface, &triplets).map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    Ok(Some(CondensedSystem { matrix, rhs, eliminations }))
}

/// Recovers the full update from the face part.
pub fn back_substitute(disc: &Discretization, system: &CondensedSystem, faces: &DVector<f64>) -> DVector<f64> {
    let layout = &disc.layout;
    let nc = layout.cell_dofs();
    let offset = layout.num_cell_unknowns();
    let mut full = DVector::zeros(layout.dim());
    full.rows_mut(offset, faces.len()).copy_from(faces);
    for (t, e) in system.eliminations.iter().enumerate() {
        let local_faces = DVector::from_iterator(disc.maps[t].len() - nc, disc.maps[t][nc..].iter().map(|&i| full[i]));
        let rhs = -(&e.residual + &e.coupling * local_faces);
        let cells = e.cell_lu.solve(&rhs).expect("cell block was factorized");
        full.rows_mut(layout.cell_offset(t), nc).copy_from(&cells);
    }
    full
}

/// Newton update `δ` with `J δ = -r` for the given element systems.
pub fn newton_update(
    disc: &Discretization,
    locals: &[(DVector<f64>, DMatrix<f64>)],
    residual: &DVector<f64>,
    kind: LinearSolverKind,
    condense: bool,
) -> Result<DVector<f64>> {
    if condense {
        match static_condense(disc, locals)? {
            Some(system) => {
                let faces = solve_sparse(&system.matrix, &system.rhs, kind)?;
                return Ok(back_substitute(disc, &system, &faces));
            }
            None => log::warn!("singular cell block; falling back to the full system"),
        }
    }
    let jac = assemble_matrix(disc, locals)?;
    solve_sparse(&jac, &(-residual), kind)
}
