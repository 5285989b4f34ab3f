use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Vec2};
use crate::law::{p_laplacian, LerayLionsLaw};
use crate::polybasis::{ExpField, SinProduct, SmoothField};

/// Gradients below this norm make `f` use the smoothed Jacobian.
pub const GRADIENT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseKind {
    /// `u = exp(x + π y)`, non-zero boundary data.
    Exponential,
    /// `u = sin(π x) sin(π y)`, homogeneous boundary data.
    Trigonometric,
}

impl CaseKind {
    pub fn name(self) -> &'static str {
        match self {
            CaseKind::Exponential => "exponential",
            CaseKind::Trigonometric => "trigonometric",
        }
    }
}

impl fmt::Display for CaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential" | "exp" => Ok(CaseKind::Exponential),
            "trigonometric" | "trig" => Ok(CaseKind::Trigonometric),
            _ => Err(Error::Domain(format!("unknown case {s:?} (expected exponential or trigonometric)"))),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum ExactSolution {
    Exp(ExpField),
    Sin(SinProduct),
}

impl SmoothField for ExactSolution {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        match self {
            ExactSolution::Exp(e) => e.derivative(x, alpha),
            ExactSolution::Sin(s) => s.derivative(x, alpha),
        }
    }
}

/// Exact solution, law and derived data of a manufactured problem.
#[derive(Debug)]
pub struct ManufacturedCase {
    pub kind: CaseKind,
    pub law: LerayLionsLaw,
    pub exact: ExactSolution,
    regularized: AtomicUsize,
}

impl Clone for ManufacturedCase {
    fn clone(&self) -> Self {
        ManufacturedCase { kind: self.kind, law: self.law.clone(), exact: self.exact, regularized: AtomicUsize::new(0) }
    }
}

pub fn make_case(kind: CaseKind, p: f64) -> Result<ManufacturedCase> {
    let pi = std::f64::consts::PI;
    let exact = match kind {
        CaseKind::Exponential => ExactSolution::Exp(ExpField { a: 1.0, b: pi }),
        CaseKind::Trigonometric => ExactSolution::Sin(SinProduct { wx: pi, wy: pi }),
    };
    Ok(ManufacturedCase { kind, law: p_laplacian(p)?, exact, regularized: AtomicUsize::new(0) })
}

impl ManufacturedCase {
    pub fn p(&self) -> f64 {
        self.law.p
    }

    pub fn hessian(&self, x: &Point) -> Matrix2<f64> {
        let e = &self.exact;
        let xy = e.derivative(x, [1, 1]);
        Matrix2::new(e.derivative(x, [2, 0]), xy, xy, e.derivative(x, [0, 2]))
    }

    /// `f = -trace(Da(∇u) H u)`.
    pub fn source_at(&self, x: &Point) -> f64 {
        let g: Vec2 = self.exact.gradient(x);
        let da = if g.norm() < GRADIENT_FLOOR {
            self.regularized.fetch_add(1, Ordering::Relaxed);
            self.law.flux.jacobian(x, &g, GRADIENT_FLOOR)
        } else {
            self.law.flux.jacobian(x, &g, 0.0)
        };
        -(da * self.hessian(x)).trace()
    }

    /// Number of source evaluations that hit the gradient floor so far.
    pub fn regularized_evaluations(&self) -> usize {
        self.regularized.load(Ordering::Relaxed)
    }

    pub fn source(&self) -> Source<'_> {
        Source(self)
    }

    /// Boundary data; `None` for the homogeneous case.
    pub fn dirichlet(&self) -> Option<&ExactSolution> {
        match self.kind {
            CaseKind::Exponential => Some(&self.exact),
            CaseKind::Trigonometric => None,
        }
    }
}

/// Value-only view of the source term.
pub struct Source<'a>(&'a ManufacturedCase);

impl SmoothField for Source<'_> {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        if alpha == [0, 0] {
            self.0.source_at(x)
        } else {
            f64::NAN
        }
    }
}
