//! Planar primitives shared by the planner and the simulator.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// True when `other` lies in the closed disk of radius `r` around `self`.
    pub fn within(self, other: Point, r: f64) -> bool {
        self.distance(other) <= r
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    fn add_scaled(self, dir: Point, s: f64) -> Point {
        Point::new(self.x + dir.x * s, self.y + dir.y * s)
    }

    fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// How two equal-radius circles meet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CircleMeeting {
    /// Centers farther than `2r` apart.
    Disjoint,
    /// Two proper crossings.
    Crossing(Point, Point),
    /// Centers within `tol` of each other, or of distance `2r`.
    Degenerate,
}

/// Intersects two circles of common radius `r`.
///
/// Crossing points are returned in a fixed order: the one to the left of the
/// directed line `a -> b` first.
pub fn meet_equal_circles(a: Point, b: Point, r: f64, tol: f64) -> CircleMeeting {
    let d = a.distance(b);
    if d <= tol || (d - 2.0 * r).abs() <= tol {
        return CircleMeeting::Degenerate;
    }
    if d > 2.0 * r {
        return CircleMeeting::Disjoint;
    }
    let half = d / 2.0;
    let h = (r * r - half * half).max(0.0).sqrt();
    let axis = b.sub(a);
    let ux = axis.x / d;
    let uy = axis.y / d;
    let mid = Point::new(a.x + ux * half, a.y + uy * half);
    let left = Point::new(mid.x - uy * h, mid.y + ux * h);
    let right = Point::new(mid.x + uy * h, mid.y - ux * h);
    CircleMeeting::Crossing(left, right)
}

/// The four points obtained by stepping `eps` away from a crossing point of
/// the circles centered at `a` and `b` along the two angle bisectors of the
/// crossing. One point lands in each of the four faces meeting there.
pub fn nudge_around_crossing(p: Point, a: Point, b: Point, eps: f64) -> [Point; 4] {
    let ra = unit(p.sub(a));
    let rb = unit(p.sub(b));
    let dirs = [
        // inside both
        Point::new(-ra.x - rb.x, -ra.y - rb.y),
        // inside a only
        Point::new(-ra.x + rb.x, -ra.y + rb.y),
        // inside b only
        Point::new(ra.x - rb.x, ra.y - rb.y),
        // outside both
        Point::new(ra.x + rb.x, ra.y + rb.y),
    ];
    dirs.map(|d| p.add_scaled(unit(d), eps))
}

fn unit(v: Point) -> Point {
    let n = v.norm();
    if n == 0.0 {
        v
    } else {
        Point::new(v.x / n, v.y / n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_of_two_unit_circles_by_hand() {
        // x = 6, y = ±sqrt(100 - 36) = ±8
        match meet_equal_circles(Point::new(0.0, 0.0), Point::new(12.0, 0.0), 10.0, 1e-9) {
            CircleMeeting::Crossing(l, r) => {
                assert!((l.x - 6.0).abs() < 1e-12 && (l.y - 8.0).abs() < 1e-12);
                assert!((r.x - 6.0).abs() < 1e-12 && (r.y + 8.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tangent_and_identical_circles_are_degenerate() {
        let o = Point::new(0.0, 0.0);
        assert_eq!(meet_equal_circles(o, Point::new(20.0, 0.0), 10.0, 1e-9), CircleMeeting::Degenerate);
        assert_eq!(meet_equal_circles(o, o, 10.0, 1e-9), CircleMeeting::Degenerate);
        assert_eq!(meet_equal_circles(o, Point::new(20.5, 0.0), 10.0, 1e-9), CircleMeeting::Disjoint);
    }

    #[test]
    fn nudged_points_land_in_four_distinct_faces() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(12.0, 0.0);
        let p = Point::new(6.0, 8.0);
        let pts = nudge_around_crossing(p, a, b, 1e-5);
        let membership: Vec<(bool, bool)> = pts.iter().map(|q| (q.within(a, 10.0), q.within(b, 10.0))).collect();
        assert_eq!(membership, vec![(true, true), (true, false), (false, true), (false, false)]);
    }
}
