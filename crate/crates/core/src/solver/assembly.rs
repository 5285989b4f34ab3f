use faer::sparse::{SparseColMat, Triplet};
use nalgebra::{DMatrix, DVector};

use super::dofs::{Discretization, HybridDofVector};
use crate::error::{Error, Result};
use crate::hho_local::LocalOperatorPack;
use crate::law::{scalar_flux, scalar_flux_derivative, LerayLionsLaw};
use crate::polybasis::{quadrature, SmoothField};

/// Right-hand side data of the discrete problem.
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub law: &'a LerayLionsLaw,
    pub source: &'a dyn SmoothField,
    /// Dirichlet data; `None` means homogeneous.
    pub dirichlet: Option<&'a dyn SmoothField>,
}

/// Exactness of the rule used for `∫_T f v_T`.
pub fn load_exactness(k: usize) -> usize {
    (2 * k + 8).min(quadrature::max_cell_exactness())
}

/// `(∫_T f ψ_a)_a` on the cell basis of every element.
pub fn assemble_load(disc: &Discretization, source: &dyn SmoothField) -> Result<Vec<DVector<f64>>> {
    let k = disc.degree();
    super::par_map(disc.packs.len(), |t| {
        let pack = &disc.packs[t];
        let basis = pack.cell_basis();
        let rule = pack.cell.rule(load_exactness(k))?;
        let mut b = DVector::zeros(basis.dim());
        for (x, w) in rule.iter() {
            b.axpy(w * source.value(x), &basis.eval(x), 1.0);
        }
        Ok(b)
    })
    .into_iter()
    .collect()
}

/// Element residual `A_T(u, ·) - (f, ·_T)` and, if requested, its Jacobian,
/// for the `ε`-smoothed flux and stabilization.
pub fn element_system(
    pack: &LocalOperatorPack,
    law: &LerayLionsLaw,
    u: &DVector<f64>,
    load: Option<&DVector<f64>>,
    eps: f64,
    with_matrix: bool,
) -> (DVector<f64>, Option<DMatrix<f64>>) {
    let p = law.p;
    let [gx_tab, gy_tab] = &pack.gradient_at_nodes;
    let gx = gx_tab * u;
    let gy = gy_tab * u;
    let nq = pack.rule.len();
    let mut fx = DVector::zeros(nq);
    let mut fy = DVector::zeros(nq);
    let mut ax = with_matrix.then(|| gx_tab.clone());
    let mut ay = with_matrix.then(|| gy_tab.clone());
    for (q, (x, w)) in pack.rule.iter().enumerate() {
        let xi = crate::geometry::Vec2::new(gx[q], gy[q]);
        let a = law.flux.flux(x, &xi, eps);
        fx[q] = w * a.x;
        fy[q] = w * a.y;
        if let (Some(ax), Some(ay)) = (ax.as_mut(), ay.as_mut()) {
            let d = law.flux.jacobian(x, &xi, eps) * w;
            let rx = gx_tab.row(q);
            let ry = gy_tab.row(q);
            ax.row_mut(q).copy_from(&(rx * d[(0, 0)] + ry * d[(0, 1)]));
            ay.row_mut(q).copy_from(&(rx * d[(1, 0)] + ry * d[(1, 1)]));
        }
    }
    let mut residual = gx_tab.tr_mul(&fx) + gy_tab.tr_mul(&fy);
    let mut matrix = match (ax, ay) {
        (Some(ax), Some(ay)) => Some(gx_tab.tr_mul(&ax) + gy_tab.tr_mul(&ay)),
        _ => None,
    };

    for face in &pack.faces {
        let scale = face.diameter.powf(1.0 - p);
        let d = &face.difference * u;
        let s = DVector::from_iterator(d.len(), d.iter().zip(&face.rule.weights).map(|(v, w)| scale * w * scalar_flux(*v, p, eps)));
        residual += face.difference.tr_mul(&s);
        if let Some(m) = matrix.as_mut() {
            let mut weighted = face.difference.clone();
            for (q, (v, w)) in d.iter().zip(&face.rule.weights).enumerate() {
                weighted.row_mut(q).scale_mut(scale * w * scalar_flux_derivative(*v, p, eps));
            }
            *m += face.difference.tr_mul(&weighted);
        }
    }

    if let Some(b) = load {
        let mut cells = residual.rows_mut(0, b.len());
        cells -= b;
    }
    (residual, matrix)
}

/// Element residuals and Jacobians at a global state.
pub fn local_systems(
    disc: &Discretization,
    law: &LerayLionsLaw,
    state: &HybridDofVector,
    loads: Option<&[DVector<f64>]>,
    eps: f64,
) -> Vec<(DVector<f64>, DMatrix<f64>)> {
    super::par_map(disc.packs.len(), |t| {
        let u = state.gather(&disc.maps[t]);
        let (r, m) = element_system(&disc.packs[t], law, &u, loads.map(|l| &l[t]), eps, true);
        (r, m.expect("matrix requested"))
    })
}

/// Global residual; boundary-face rows are zero.
pub fn assemble_residual(
    disc: &Discretization,
    law: &LerayLionsLaw,
    state: &HybridDofVector,
    loads: Option<&[DVector<f64>]>,
    eps: f64,
) -> DVector<f64> {
    let parts = super::par_map(disc.packs.len(), |t| {
        let u = state.gather(&disc.maps[t]);
        element_system(&disc.packs[t], law, &u, loads.map(|l| &l[t]), eps, false).0
    });
    let mut r = DVector::zeros(disc.layout.dim());
    for (t, rt) in parts.iter().enumerate() {
        for (a, &i) in disc.maps[t].iter().enumerate() {
            r[i] += rt[a];
        }
    }
    for i in 0..r.len() {
        if disc.layout.is_fixed(i) {
            r[i] = 0.0;
        }
    }
    r
}

/// Scatters element matrices; boundary-face rows and columns become identity.
pub fn assemble_matrix(disc: &Discretization, locals: &[(DVector<f64>, DMatrix<f64>)]) -> Result<SparseColMat<usize, f64>> {
    let n = disc.layout.dim();
    let fixed = disc.layout.fixed_mask();
    let mut triplets = Vec::with_capacity(locals.iter().map(|(_, m)| m.len()).sum::<usize>() + n);
    for (t, (_, m)) in locals.iter().enumerate() {
        let map = &disc.maps[t];
        for (b, &j) in map.iter().enumerate() {
            if fixed[j] {
                continue;
            }
            for (a, &i) in map.iter().enumerate() {
                if !fixed[i] {
                    triplets.push(Triplet::new(i, j, m[(a, b)]));
                }
            }
        }
    }
    triplets.extend((0..n).filter(|&i| fixed[i]).map(|i| Triplet::new(i, i, 1.0)));
    SparseColMat::try_new_from_triplets(n, n, &triplets).map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
}

/// Global Jacobian at `state`.
pub fn assemble_jacobian(
    disc: &Discretization,
    law: &LerayLionsLaw,
    state: &HybridDofVector,
    eps: f64,
) -> Result<SparseColMat<usize, f64>> {
    assemble_matrix(disc, &local_systems(disc, law, state, None, eps))
}

/// Gathers the element residuals into a global vector with masked boundary rows.
pub fn scatter_residual(disc: &Discretization, locals: &[(DVector<f64>, DMatrix<f64>)]) -> DVector<f64> {
    let mut r = DVector::zeros(disc.layout.dim());
    for (t, (rt, _)) in locals.iter().enumerate() {
        for (a, &i) in disc.maps[t].iter().enumerate() {
            r[i] += rt[a];
        }
    }
    for i in 0..r.len() {
        if disc.layout.is_fixed(i) {
            r[i] = 0.0;
        }
    }
    r
}

/// `Σ_T (1/p)‖G_T u‖^p + (1/p) Σ_F h_F^{1-p} ‖D_TF u‖^p - (f, u_T)`;
/// its gradient is the residual of the `p`-Laplace scheme.
pub fn energy(disc: &Discretization, p: f64, state: &HybridDofVector, loads: Option<&[DVector<f64>]>) -> f64 {
    disc.packs
        .iter()
        .enumerate()
        .map(|(t, pack)| {
            let u = state.gather(&disc.maps[t]);
            let gx = &pack.gradient_at_nodes[0] * &u;
            let gy = &pack.gradient_at_nodes[1] * &u;
            let mut e: f64 = pack.rule.weights.iter().zip(gx.iter().zip(gy.iter())).map(|(w, (a, b))| w * a.hypot(*b).powf(p)).sum();
            for face in &pack.faces {
                let d = &face.difference * &u;
                e += face.diameter.powf(1.0 - p) * face.rule.weights.iter().zip(d.iter()).map(|(w, v)| w * v.abs().powf(p)).sum::<f64>();
            }
            let load = loads.map_or(0.0, |l| l[t].dot(&u.rows(0, l[t].len())));
            e / p - load
        })
        .sum()
}

/// `‖v‖_{1,p,h} = (Σ_T ‖v‖^p_{1,p,T})^{1/p}`.
pub fn global_norm(disc: &Discretization, v: &HybridDofVector, p: f64) -> f64 {
    disc.packs.iter().enumerate().map(|(t, pack)| pack.local_norm_power(&v.gather(&disc.maps[t]), p)).sum::<f64>().powf(1.0 / p)
}
