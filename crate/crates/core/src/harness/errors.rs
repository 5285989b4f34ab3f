use serde::Serialize;

use super::case::ManufacturedCase;
use crate::error::Result;
use crate::polybasis::SmoothField;
use crate::solver::{global_norm, interpolate_global, Discretization, HybridDofVector};

#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct ErrorBundle {
    /// `‖I_h u - u_h‖_{1,p,h}`.
    pub discrete: f64,
    /// `(‖∇_h(u - p_h u_h)‖^p_{L^p} + Σ_T s_T(u_h, u_h))^{1/p}`.
    pub potential: f64,
    /// `‖u - p_h u_h‖_{L^p}`.
    pub lp: f64,
}

/// Exactness of the rules used to integrate errors against the exact solution.
pub fn error_exactness(k: usize) -> usize {
    (2 * k + 8).min(crate::polybasis::quadrature::max_cell_exactness())
}

pub fn compute_errors(disc: &Discretization, case: &ManufacturedCase, uh: &HybridDofVector) -> Result<ErrorBundle> {
    errors_against(disc, &case.exact, case.p(), uh)
}

/// Errors of `uh` against an arbitrary smooth `exact`.
pub fn errors_against<F: SmoothField + ?Sized>(disc: &Discretization, exact: &F, p: f64, uh: &HybridDofVector) -> Result<ErrorBundle> {
    let mut diff = interpolate_global(disc, exact)?;
    diff.values -= &uh.values;
    let discrete = global_norm(disc, &diff, p);

    let mut grad = 0.0;
    let mut stab = 0.0;
    let mut lp = 0.0;
    for (t, pack) in disc.packs.iter().enumerate() {
        let u = uh.gather(&disc.maps[t]);
        let pu = pack.potential(&u);
        let rule = pack.cell.rule(error_exactness(disc.degree()))?;
        for (x, w) in rule.iter() {
            grad += w * (exact.gradient(x) - pu.gradient(x)).norm().powf(p);
            lp += w * (exact.value(x) - pu.value(x)).abs().powf(p);
        }
        stab += pack.stabilization(&u, &u, p);
    }
    Ok(ErrorBundle { discrete, potential: (grad + stab).powf(1.0 / p), lp: lp.powf(1.0 / p) })
}
