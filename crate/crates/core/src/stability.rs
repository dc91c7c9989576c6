//! Support polygons and the signed static stability margin.

use nalgebra::Vector2;

use crate::error::{GaitError, Result};
use crate::model::RobotState;

/// Distances (m) below this magnitude are reported as exactly zero.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Convex hull of the supporting feet, counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportPolygon {
    pub vertices: Vec<Vector2<f64>>,
}

fn cross(o: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Andrew's monotone chain. Collinear and duplicate points are dropped.
pub fn convex_hull(points: &[Vector2<f64>]) -> SupportPolygon {
    let mut pts: Vec<Vector2<f64>> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return SupportPolygon { vertices: pts };
    }
    let mut hull: Vec<Vector2<f64>> = Vec::with_capacity(2 * pts.len());
    for p in pts.iter() {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower = hull.len() + 1;
    for p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(*p);
    }
    hull.pop();
    if hull.len() < 3 {
        // All points collinear: keep the two extremes.
        hull = vec![pts[0], pts[pts.len() - 1]];
    }
    SupportPolygon { vertices: hull }
}

pub fn support_polygon(state: &RobotState) -> Result<SupportPolygon> {
    let pts: Vec<Vector2<f64>> = state
        .supporting()
        .map(|leg| state.foot(leg).position.xy())
        .collect();
    if pts.is_empty() {
        return Err(GaitError::NoSupport);
    }
    Ok(convex_hull(&pts))
}

fn segment_distance(p: &Vector2<f64>, a: &Vector2<f64>, b: &Vector2<f64>) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

impl SupportPolygon {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edges(&self) -> impl Iterator<Item = (&Vector2<f64>, &Vector2<f64>)> {
        let n = self.vertices.len();
        (0..n).map(move |i| (&self.vertices[i], &self.vertices[(i + 1) % n]))
    }

    /// Unsigned distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: &Vector2<f64>) -> f64 {
        match self.vertices.len() {
            0 => f64::INFINITY,
            1 => (p - self.vertices[0]).norm(),
            _ => self
                .edges()
                .map(|(a, b)| segment_distance(p, a, b))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Strict containment test for polygons with at least three vertices.
    fn contains(&self, p: &Vector2<f64>) -> bool {
        self.vertices.len() >= 3 && self.edges().all(|(a, b)| cross(a, b, p) > 0.0)
    }
}

/// Signed stability margin of `com` with respect to `poly`: the distance to
/// the nearest edge, positive inside and negative outside. Point and segment
/// hulls give zero on the hull and a negative distance elsewhere.
pub fn stability_margin(poly: &SupportPolygon, com: &Vector2<f64>) -> f64 {
    let d = poly.boundary_distance(com);
    if d <= BOUNDARY_TOL {
        0.0
    } else if poly.contains(com) {
        d
    } else {
        -d
    }
}

/// Stability margin of a robot state, with the CoM at the body centre.
pub fn state_margin(state: &RobotState) -> Result<f64> {
    Ok(stability_margin(&support_polygon(state)?, &state.com_xy()))
}
