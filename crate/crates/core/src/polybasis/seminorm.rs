//! Broken Sobolev seminorms measured by quadrature.
//!
//! `|v|_{W^{m,p}}` is the sum over all multi-indices `|α| = m` of
//! `‖∂^α v‖_{L^p}`; for `p = ∞` the supremum is taken over quadrature nodes.

use super::basis::{CellGeometry, FaceGeometry};
use super::fields::SmoothField;
use super::projection::{data_exactness, FACE_DATA_EXACTNESS};
use super::quadrature::QuadratureRule;
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeminormSpec {
    pub order: usize,
    /// Lebesgue index in `[1, ∞]`.
    pub p: f64,
}

impl SeminormSpec {
    pub fn new(order: usize, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("Lebesgue index must be at least 1, got {p}")));
        }
        Ok(SeminormSpec { order, p })
    }
}

/// `‖g‖_{L^p}` over the rule (`p = ∞` takes the max over nodes).
pub fn lp_norm(rule: &QuadratureRule, p: f64, g: impl Fn(&Point) -> f64) -> f64 {
    if p.is_infinite() {
        rule.points.iter().map(|x| g(x).abs()).fold(0.0, f64::max)
    } else {
        rule.iter().map(|(x, w)| w * g(x).abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Multi-indices of total order `m`.
pub fn multi_indices(m: usize) -> impl Iterator<Item = [usize; 2]> {
    (0..=m).rev().map(move |a| [a, m - a])
}

pub fn seminorm_with_rule<F: SmoothField + ?Sized>(v: &F, spec: SeminormSpec, rule: &QuadratureRule) -> f64 {
    multi_indices(spec.order).map(|a| lp_norm(rule, spec.p, |x| v.derivative(x, a))).sum()
}

/// `|v|_{W^{m,p}(T)}`.
pub fn seminorm<F: SmoothField + ?Sized>(v: &F, spec: SeminormSpec, cell: &CellGeometry) -> Result<f64> {
    Ok(seminorm_with_rule(v, spec, &cell.rule(data_exactness())?))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `m`-th tangential derivative along the face.
pub fn tangential_derivative<F: SmoothField + ?Sized>(v: &F, face: &FaceGeometry, m: usize, x: &Point) -> f64 {
    let t = face.tangent;
    (0..=m).map(|a| binomial(m, a) * t.x.powi(a as i32) * t.y.powi((m - a) as i32) * v.derivative(x, [a, m - a])).sum()
}

/// `|v|_{W^{m,p}(F)}` using tangential derivatives.
pub fn face_seminorm<F: SmoothField + ?Sized>(v: &F, spec: SeminormSpec, face: &FaceGeometry) -> Result<f64> {
    let rule = face.rule(FACE_DATA_EXACTNESS)?;
    Ok(lp_norm(&rule, spec.p, |x| tangential_derivative(v, face, spec.order, x)))
}

/// `h_T^{1/p} |v|_{W^{m,p}(F_T)}` where the face part is the broken
/// `L^p` combination over all faces of the cell.
pub fn trace_seminorm<F: SmoothField + ?Sized>(v: &F, spec: SeminormSpec, cell: &CellGeometry) -> Result<f64> {
    let per_face = cell.faces.iter().map(|f| face_seminorm(v, spec, f)).collect::<Result<Vec<_>>>()?;
    Ok(if spec.p.is_infinite() {
        per_face.into_iter().fold(0.0, f64::max)
    } else {
        cell.diameter.powf(1.0 / spec.p) * per_face.iter().map(|s| s.powf(spec.p)).sum::<f64>().powf(1.0 / spec.p)
    })
}
