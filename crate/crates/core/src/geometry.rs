//! Planar geometry helpers shared by the mesh and the polynomial machinery.

use nalgebra::{Point2, Vector2};

pub type Point = Point2<f64>;
pub type Vec2 = Vector2<f64>;

/// Signed area of the triangle `(a, b, c)`; positive when counterclockwise.
pub fn triangle_area(a: &Point, b: &Point, c: &Point) -> f64 {
    0.5 * ((b - a).perp(&(c - a)))
}

/// Inradius of a triangle, `2|S| / perimeter`.
pub fn triangle_inradius(tri: &[Point; 3]) -> f64 {
    let area = triangle_area(&tri[0], &tri[1], &tri[2]).abs();
    let perimeter = (tri[1] - tri[0]).norm() + (tri[2] - tri[1]).norm() + (tri[0] - tri[2]).norm();
    2.0 * area / perimeter
}

/// Signed area and area centroid of a simple polygon (shoelace formula).
pub fn polygon_area_centroid(points: &[Point]) -> (f64, Point) {
    let n = points.len();
    let mut area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    for i in 0..n {
        let p = &points[i];
        let q = &points[(i + 1) % n];
        let cross = p.x * q.y - q.x * p.y;
        area += cross;
        cx += (p.x + q.x) * cross;
        cy += (p.y + q.y) * cross;
    }
    area *= 0.5;
    (area, Point::new(cx / (6.0 * area), cy / (6.0 * area)))
}

/// Largest distance between two points of the set.
pub fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max((q - p).norm());
        }
    }
    d
}

/// Outward normal of the edge `a -> b` of a counterclockwise polygon.
pub fn edge_normal(a: &Point, b: &Point) -> Vec2 {
    let t = b - a;
    Vec2::new(t.y, -t.x).normalize()
}
