//! Quadrature on polygons (through their simplicial submesh) and on faces.
//!
//! Reference rules come from `bempp-quadrature`: symmetric Xiao-Gimbutas
//! rules on the triangle and Gauss-Legendre rules on the interval.

use std::sync::OnceLock;

use bempp_quadrature::simplex_rules::{available_rules_interval, available_rules_triangle, simplex_rule_interval, simplex_rule_triangle};

use crate::error::{Error, Result};
use crate::geometry::Point;

/// Points and physical weights of a quadrature rule.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.points.iter().zip(&self.weights).map(|(x, w)| w * f(x)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Point, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Reference rule: barycentric-free coordinates on the unit simplex.
#[derive(Debug)]
struct ReferenceRule {
    points: Vec<f64>,
    weights: Vec<f64>,
    exactness: usize,
}

fn tabulate(available: Vec<usize>, fetch: impl Fn(usize) -> Option<(usize, Vec<f64>, Vec<f64>)>) -> Vec<ReferenceRule> {
    // cheapest rule for every exactness level
    let mut rules: Vec<(usize, ReferenceRule)> = Vec::new();
    for n in available {
        if let Some((order, points, weights)) = fetch(n) {
            rules.push((n, ReferenceRule { points, weights, exactness: order }));
        }
    }
    let max = rules.iter().map(|(_, r)| r.exactness).max().unwrap_or(0);
    let mut best = Vec::with_capacity(max + 1);
    for e in 0..=max {
        let pick = rules
            .iter()
            .filter(|(_, r)| r.exactness >= e)
            .min_by_key(|(n, r)| (*n, r.exactness))
            .map(|(_, r)| ReferenceRule { points: r.points.clone(), weights: r.weights.clone(), exactness: r.exactness })
            .expect("some rule reaches the maximum");
        best.push(pick);
    }
    best
}

fn triangle_table() -> &'static [ReferenceRule] {
    static TABLE: OnceLock<Vec<ReferenceRule>> = OnceLock::new();
    TABLE.get_or_init(|| tabulate(available_rules_triangle(), |n| simplex_rule_triangle(n).ok().map(|r| (r.order, r.points, r.weights))))
}

fn interval_table() -> &'static [ReferenceRule] {
    static TABLE: OnceLock<Vec<ReferenceRule>> = OnceLock::new();
    TABLE.get_or_init(|| tabulate(available_rules_interval(), |n| simplex_rule_interval(n).ok().map(|r| (r.order, r.points, r.weights))))
}

/// Highest exactness available on triangles.
pub fn max_cell_exactness() -> usize {
    triangle_table().len() - 1
}

pub fn max_face_exactness() -> usize {
    interval_table().len() - 1
}

fn lookup(table: &'static [ReferenceRule], exactness: usize, what: &str) -> Result<&'static ReferenceRule> {
    table.get(exactness).ok_or_else(|| Error::Capability(format!("no {what} rule of exactness {exactness} (max {})", table.len() - 1)))
}

/// Rule on one triangle.
pub fn triangle_rule(tri: &[Point; 3], exactness: usize) -> Result<QuadratureRule> {
    let mut rule = QuadratureRule { points: Vec::new(), weights: Vec::new(), exactness };
    append_triangle(&mut rule, tri, lookup(triangle_table(), exactness, "triangle")?);
    Ok(rule)
}

fn append_triangle(rule: &mut QuadratureRule, tri: &[Point; 3], reference: &ReferenceRule) {
    let (a, b, c) = (tri[0], tri[1], tri[2]);
    let jac = ((b - a).perp(&(c - a))).abs();
    for (xi, w) in reference.points.chunks_exact(2).zip(&reference.weights) {
        rule.points.push(a + (b - a) * xi[0] + (c - a) * xi[1]);
        rule.weights.push(w * jac);
    }
}

/// Composite rule over a simplicial submesh.
pub fn cell_rule(simplices: &[[Point; 3]], exactness: usize) -> Result<QuadratureRule> {
    let reference = lookup(triangle_table(), exactness, "triangle")?;
    let mut rule = QuadratureRule {
        points: Vec::with_capacity(simplices.len() * reference.weights.len()),
        weights: Vec::with_capacity(simplices.len() * reference.weights.len()),
        exactness,
    };
    for tri in simplices {
        append_triangle(&mut rule, tri, reference);
    }
    Ok(rule)
}

/// Gauss-Legendre rule on the segment `[a, b]`.
pub fn segment_rule(a: &Point, b: &Point, exactness: usize) -> Result<QuadratureRule> {
    let reference = lookup(interval_table(), exactness, "interval")?;
    let len = (b - a).norm();
    Ok(QuadratureRule {
        points: reference.points.iter().map(|&s| a + (b - a) * s).collect(),
        weights: reference.weights.iter().map(|w| w * len).collect(),
        exactness,
    })
}
