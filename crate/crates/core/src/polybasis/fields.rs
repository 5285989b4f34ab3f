//! Scalar fields with analytic partial derivatives.

use crate::geometry::{Point, Vec2};

/// A scalar field that can report `∂^α v` at a point for `α = [αx, αy]`.
pub trait SmoothField: Sync {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64;

    fn value(&self, x: &Point) -> f64 {
        self.derivative(x, [0, 0])
    }

    fn gradient(&self, x: &Point) -> Vec2 {
        Vec2::new(self.derivative(x, [1, 0]), self.derivative(x, [0, 1]))
    }
}

impl<F> SmoothField for F
where
    F: Fn(&Point, [usize; 2]) -> f64 + Sync,
{
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        self(x, alpha)
    }
}

/// Wraps a value-only closure; derivatives are unavailable (NaN).
pub struct Values<F>(pub F);

impl<F: Fn(&Point) -> f64 + Sync> SmoothField for Values<F> {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        if alpha == [0, 0] {
            (self.0)(x)
        } else {
            f64::NAN
        }
    }
}

/// `exp(a x + b y)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpField {
    pub a: f64,
    pub b: f64,
}

impl SmoothField for ExpField {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        self.a.powi(alpha[0] as i32) * self.b.powi(alpha[1] as i32) * (self.a * x.x + self.b * x.y).exp()
    }
}

/// n-th derivative of `sin(w t)`.
fn sin_derivative(w: f64, t: f64, n: usize) -> f64 {
    let s = w.powi(n as i32);
    match n % 4 {
        0 => s * (w * t).sin(),
        1 => s * (w * t).cos(),
        2 => -s * (w * t).sin(),
        _ => -s * (w * t).cos(),
    }
}

/// `sin(wx x) sin(wy y)`; `wy = 0` is treated as the one-variable field `sin(wx x)`.
#[derive(Debug, Clone, Copy)]
pub struct SinProduct {
    pub wx: f64,
    pub wy: f64,
}

impl SmoothField for SinProduct {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        let fy = if self.wy == 0.0 {
            if alpha[1] == 0 {
                1.0
            } else {
                0.0
            }
        } else {
            sin_derivative(self.wy, x.y, alpha[1])
        };
        sin_derivative(self.wx, x.x, alpha[0]) * fy
    }
}

/// `a - b`.
pub struct Difference<'a, A: ?Sized, B: ?Sized>(pub &'a A, pub &'a B);

impl<A: SmoothField + ?Sized, B: SmoothField + ?Sized> SmoothField for Difference<'_, A, B> {
    fn derivative(&self, x: &Point, alpha: [usize; 2]) -> f64 {
        self.0.derivative(x, alpha) - self.1.derivative(x, alpha)
    }
}
