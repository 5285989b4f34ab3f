//! Leray-Lions flux laws and their structural constants.

mod inequality;

use std::fmt;
use std::sync::Arc;

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Point, Vec2};

pub use inequality::{check_all, check_inequality, reports_csv, InequalityId, InequalityReport};

/// A flux `a(x, ξ)` and its `ξ`-Jacobian. `eps > 0` requests a smoothed
/// version that is differentiable at `ξ = 0`; `eps = 0` is the exact law.
pub trait Flux: Send + Sync {
    fn flux(&self, x: &Point, xi: &Vec2, eps: f64) -> Vec2;
    fn jacobian(&self, x: &Point, xi: &Vec2, eps: f64) -> Matrix2<f64>;
}

/// `a(ξ) = (|ξ|² + ε²)^{(p-2)/2} ξ`.
#[derive(Debug, Clone, Copy)]
pub struct PowerFlux {
    pub p: f64,
}

impl Flux for PowerFlux {
    fn flux(&self, _x: &Point, xi: &Vec2, eps: f64) -> Vec2 {
        let r2 = xi.norm_squared() + eps * eps;
        if r2 == 0.0 {
            return Vec2::zeros();
        }
        xi * r2.powf(0.5 * (self.p - 2.0))
    }

    fn jacobian(&self, _x: &Point, xi: &Vec2, eps: f64) -> Matrix2<f64> {
        let r2 = xi.norm_squared() + eps * eps;
        if r2 == 0.0 {
            let d = match self.p {
                p if p > 2.0 => 0.0,
                2.0 => 1.0,
                _ => f64::INFINITY,
            };
            return Matrix2::identity() * d;
        }
        let s = r2.powf(0.5 * (self.p - 2.0));
        (Matrix2::identity() + xi * xi.transpose() * ((self.p - 2.0) / r2)) * s
    }
}

/// Structural constants. `gamma` and `zeta` are only known after calibration.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LawConstants {
    pub beta: f64,
    pub lambda: f64,
    pub gamma: Option<f64>,
    pub zeta: Option<f64>,
}

#[derive(Clone)]
pub struct LerayLionsLaw {
    pub p: f64,
    /// Conjugate exponent `p / (p - 1)`.
    pub p_conj: f64,
    pub flux: Arc<dyn Flux>,
    pub constants: LawConstants,
    pub name: String,
    power_law: bool,
}

impl fmt::Debug for LerayLionsLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LerayLionsLaw").field("name", &self.name).field("p", &self.p).field("constants", &self.constants).finish()
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("exponent must lie in (1, ∞), got {p}")));
    }
    Ok(())
}

/// The `p`-Laplace law `a(ξ) = |ξ|^{p-2} ξ`.
pub fn p_laplacian(p: f64) -> Result<LerayLionsLaw> {
    check_exponent(p)?;
    Ok(LerayLionsLaw {
        p,
        p_conj: p / (p - 1.0),
        flux: Arc::new(PowerFlux { p }),
        constants: LawConstants { beta: 1.0, lambda: 1.0, gamma: None, zeta: None },
        name: format!("p-laplacian(p={p})"),
        power_law: true,
    })
}

impl LerayLionsLaw {
    /// User-supplied law with known growth and coercivity constants.
    pub fn custom(name: &str, p: f64, flux: Arc<dyn Flux>, beta: f64, lambda: f64) -> Result<Self> {
        check_exponent(p)?;
        Ok(LerayLionsLaw {
            p,
            p_conj: p / (p - 1.0),
            flux,
            constants: LawConstants { beta, lambda, gamma: None, zeta: None },
            name: name.to_string(),
            power_law: false,
        })
    }

    /// Whether this is the `p`-Laplace law (so that other exponents of the
    /// same family can be used for continuation).
    pub fn is_power_law(&self) -> bool {
        self.power_law
    }

    pub fn eval(&self, xi: &Vec2) -> Vec2 {
        self.flux.flux(&Point::origin(), xi, 0.0)
    }

    pub fn jacobian(&self, xi: &Vec2) -> Matrix2<f64> {
        self.flux.jacobian(&Point::origin(), xi, 0.0)
    }

    /// Estimates `γ` and `ζ` on random samples and stores them.
    pub fn calibrated(mut self, samples: usize, seed: u64) -> Self {
        let (gamma, zeta) = inequality::calibrate_vector_constants(&self, samples, seed);
        self.constants.gamma = Some(gamma);
        self.constants.zeta = Some(zeta);
        self
    }
}

/// Scalar `(t² + ε²)^{(p-2)/2} t`.
pub fn scalar_flux(t: f64, p: f64, eps: f64) -> f64 {
    let r2 = t * t + eps * eps;
    if r2 == 0.0 {
        0.0
    } else {
        t * r2.powf(0.5 * (p - 2.0))
    }
}

/// Derivative of [`scalar_flux`] in `t`.
pub fn scalar_flux_derivative(t: f64, p: f64, eps: f64) -> f64 {
    let r2 = t * t + eps * eps;
    if r2 == 0.0 {
        return if p > 2.0 {
            0.0
        } else if p == 2.0 {
            1.0
        } else {
            f64::INFINITY
        };
    }
    r2.powf(0.5 * (p - 2.0)) * (1.0 + (p - 2.0) * t * t / r2)
}

/// Random gradients with `|ξ|` log-uniform in `[lo, hi]`.
pub fn sample_gradients(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = (rng.random_range(lo.ln()..=hi.ln())).exp();
            let th = rng.random_range(0.0..std::f64::consts::TAU);
            Vec2::new(r * th.cos(), r * th.sin())
        })
        .collect()
}

/// Largest relative deviation between the Jacobian and central finite
/// differences of the flux (step `1e-5 |ξ|`).
pub fn jacobian_check(law: &LerayLionsLaw, samples: &[Vec2]) -> f64 {
    samples
        .iter()
        .map(|xi| {
            let h = 1e-5 * xi.norm();
            let exact = law.jacobian(xi);
            let mut fd = Matrix2::zeros();
            for j in 0..2 {
                let mut e = Vec2::zeros();
                e[j] = h;
                fd.set_column(j, &((law.eval(&(xi + e)) - law.eval(&(xi - e))) / (2.0 * h)));
            }
            (fd - exact).norm() / exact.norm()
        })
        .fold(0.0, f64::max)
}
