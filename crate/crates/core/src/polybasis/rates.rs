//! Empirical approximation rates of the local projectors.

use serde::Serialize;

use super::basis::CellGeometry;
use super::fields::{Difference, SmoothField};
use super::projection::{data_exactness, elliptic_project, l2_project_cell};
use super::seminorm::{lp_norm, seminorm, trace_seminorm, SeminormSpec};
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectorKind {
    L2,
    Elliptic,
}

impl std::str::FromStr for ProjectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(ProjectorKind::L2),
            "elliptic" => Ok(ProjectorKind::Elliptic),
            _ => Err(Error::Domain(format!("unknown projector {s:?} (expected l2 or elliptic)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateRow {
    pub h: f64,
    pub error: f64,
    pub eoc: Option<f64>,
}

/// `log(e_{i-1}/e_i) / log(h_{i-1}/h_i)`; undefined for the first entry and
/// wherever an error is not positive or the mesh sizes coincide.
pub fn compute_eoc(h: &[f64], e: &[f64]) -> Vec<Option<f64>> {
    (0..h.len().min(e.len()))
        .map(|i| {
            let ok = i > 0 && e[i - 1] > 0.0 && e[i] > 0.0 && e[i - 1].is_finite() && e[i].is_finite() && h[i] != h[i - 1];
            ok.then(|| (e[i - 1] / e[i]).ln() / (h[i - 1] / h[i]).ln())
        })
        .collect()
}

/// Least-squares slope of `log e` against `log h`.
pub fn fitted_slope(h: &[f64], e: &[f64]) -> f64 {
    let n = h.len() as f64;
    let xs: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<f64> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Square `[0, h]^2`.
pub fn square_cell(h: f64) -> Result<CellGeometry> {
    CellGeometry::from_polygon(&[Point::new(0.0, 0.0), Point::new(h, 0.0), Point::new(h, h), Point::new(0.0, h)])
}

pub struct RateStudy {
    pub kind: ProjectorKind,
    pub degree: usize,
    pub spec: SeminormSpec,
    /// Measure the face trace `h^{1/p} |v - πv|_{W^{m,p}(∂T)}` instead of the cell seminorm.
    pub trace: bool,
}

impl RateStudy {
    /// Error on one cell, divided by `|v|_{W^{l+1,p}(T)}` so that the
    /// measure of the cell drops out and the slope reads `l + 1 - m`.
    pub fn relative_error<F: SmoothField + ?Sized>(&self, v: &F, cell: &CellGeometry) -> Result<f64> {
        let proj = match self.kind {
            ProjectorKind::L2 => l2_project_cell(v, self.degree, cell)?,
            ProjectorKind::Elliptic => elliptic_project(v, self.degree, cell)?,
        };
        let diff = Difference(v, &proj);
        let err = if self.trace { trace_seminorm(&diff, self.spec, cell)? } else { seminorm(&diff, self.spec, cell)? };
        let reference = seminorm(v, SeminormSpec { order: self.degree + 1, p: self.spec.p }, cell)?;
        if !(reference > 0.0) {
            return Err(Error::Domain("field has vanishing reference seminorm".into()));
        }
        Ok(err / reference)
    }

    /// Rate rows on the squares `[0, h]^2`.
    pub fn run<F: SmoothField + ?Sized>(&self, v: &F, hs: &[f64]) -> Result<Vec<RateRow>> {
        let errors = hs.iter().map(|&h| self.relative_error(v, &square_cell(h)?)).collect::<Result<Vec<_>>>()?;
        let eoc = compute_eoc(hs, &errors);
        Ok(hs.iter().zip(errors).zip(eoc).map(|((&h, error), eoc)| RateRow { h, error, eoc }).collect())
    }
}

pub fn rates_csv(rows: &[RateRow]) -> String {
    let mut out = String::from("h,error,eoc\n");
    for r in rows {
        let eoc = r.eoc.map(|e| format!("{e:.6}")).unwrap_or_default();
        out.push_str(&format!("{:.6e},{:.6e},{eoc}\n", r.h, r.error));
    }
    out
}

/// `‖π v‖_{L^p(T)} / ‖v‖_{L^p(T)}`.
pub fn lp_stability_ratio<F: SmoothField + ?Sized>(v: &F, kind: ProjectorKind, l: usize, p: f64, cell: &CellGeometry) -> Result<f64> {
    let proj = match kind {
        ProjectorKind::L2 => l2_project_cell(v, l, cell)?,
        ProjectorKind::Elliptic => elliptic_project(v, l, cell)?,
    };
    let rule = cell.rule(data_exactness())?;
    Ok(lp_norm(&rule, p, |x| proj.value(x)) / lp_norm(&rule, p, |x| v.value(x)))
}
