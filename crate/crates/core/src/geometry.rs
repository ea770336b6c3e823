//! Planar geometry in projected meters: rings, polygons, convex clipping and
//! the handful of predicates the population overlay needs.
//!
//! Rings are stored open (the closing vertex is implied). Normalized polygons
//! have a counter-clockwise exterior and clockwise holes, so the signed ring
//! areas of a polygon sum to its area.

use serde::{Deserialize, Serialize};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        self.distance_sq(other).sqrt()
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bbox {
    pub min: Point,
    pub max: Point,
}

impl Bbox {
    pub fn of(points: &[Point]) -> Option<Bbox> {
        let first = *points.first()?;
        let mut bbox = Bbox {
            min: first,
            max: first,
        };
        for p in &points[1..] {
            bbox.min.x = bbox.min.x.min(p.x);
            bbox.min.y = bbox.min.y.min(p.y);
            bbox.max.x = bbox.max.x.max(p.x);
            bbox.max.y = bbox.max.y.max(p.y);
        }
        Some(bbox)
    }

    pub fn expand(self, by: f64) -> Bbox {
        Bbox {
            min: Point::new(self.min.x - by, self.min.y - by),
            max: Point::new(self.max.x + by, self.max.y + by),
        }
    }

    pub fn intersects(&self, other: &Bbox) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn to_ring(self) -> Vec<Point> {
        vec![
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }
}

/// Polygon with optional holes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub exterior: Vec<Point>,
    pub holes: Vec<Vec<Point>>,
}

impl Polygon {
    pub fn new(exterior: Vec<Point>, holes: Vec<Vec<Point>>) -> Self {
        Polygon { exterior, holes }
    }

    pub fn from_ring(exterior: Vec<Point>) -> Self {
        Polygon {
            exterior,
            holes: Vec::new(),
        }
    }

    pub fn rect(min: Point, max: Point) -> Self {
        Polygon::from_ring(Bbox { min, max }.to_ring())
    }

    /// Unsigned area: exterior minus holes.
    pub fn area(&self) -> f64 {
        signed_area(&self.exterior).abs()
            - self
                .holes
                .iter()
                .map(|h| signed_area(h).abs())
                .sum::<f64>()
    }

    pub fn bbox(&self) -> Option<Bbox> {
        Bbox::of(&self.exterior)
    }

    pub fn rings(&self) -> impl Iterator<Item = &Vec<Point>> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }

    /// Drops closing duplicates and consecutive repeats, then orients the
    /// exterior counter-clockwise and holes clockwise.
    pub fn normalize(&mut self) {
        clean_ring(&mut self.exterior);
        if signed_area(&self.exterior) < 0.0 {
            self.exterior.reverse();
        }
        for hole in &mut self.holes {
            clean_ring(hole);
            if signed_area(hole) > 0.0 {
                hole.reverse();
            }
        }
    }

    /// Structural validity: rings have three or more vertices, no ring
    /// self-intersects, and every hole lies inside the exterior.
    pub fn validate(&self) -> Result<(), String> {
        for (i, ring) in self.rings().enumerate() {
            let label = if i == 0 {
                "exterior".to_string()
            } else {
                format!("hole {}", i - 1)
            };
            if ring.len() < 3 {
                return Err(format!("{label} has fewer than 3 distinct vertices"));
            }
            if ring.iter().any(|p| !p.is_finite()) {
                return Err(format!("{label} has non-finite coordinates"));
            }
            if signed_area(ring).abs() <= EPS {
                return Err(format!("{label} has zero area"));
            }
            if ring_self_intersects(ring) {
                return Err(format!("{label} self-intersects"));
            }
        }
        for (i, hole) in self.holes.iter().enumerate() {
            if hole.iter().any(|p| !point_in_ring(*p, &self.exterior)) {
                return Err(format!("hole {i} is not inside the exterior"));
            }
        }
        Ok(())
    }

    /// Even-odd containment; points on an edge count as inside the exterior.
    pub fn contains(&self, p: Point) -> bool {
        point_in_ring(p, &self.exterior) && !self.holes.iter().any(|h| point_in_ring(p, h))
    }
}

fn clean_ring(ring: &mut Vec<Point>) {
    ring.dedup_by(|a, b| a == b);
    while ring.len() > 1 && ring.first() == ring.last() {
        ring.pop();
    }
}

/// Shoelace area, positive for counter-clockwise rings.
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    // Anchor on the first vertex to limit cancellation with large coordinates.
    let o = ring[0];
    let mut twice = 0.0;
    for i in 1..n - 1 {
        let a = ring[i];
        let b = ring[i + 1];
        twice += (a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y);
    }
    twice / 2.0
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Crossing-number test. Boundary points are reported inside.
pub fn point_in_ring(p: Point, ring: &[Point]) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let a = ring[i];
        let b = ring[j];
        if on_segment(p, a, b) {
            return true;
        }
        if (a.y > p.y) != (b.y > p.y) {
            let x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    let scale = 1.0 + a.x.abs().max(a.y.abs()).max(b.x.abs()).max(b.y.abs());
    cross(a, b, p).abs() <= EPS * scale * scale
        && p.x >= a.x.min(b.x) - EPS * scale
        && p.x <= a.x.max(b.x) + EPS * scale
        && p.y >= a.y.min(b.y) - EPS * scale
        && p.y <= a.y.max(b.y) + EPS * scale
}

fn segments_cross(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(p1, q1, q2))
        || (d2 == 0.0 && on_segment(p2, q1, q2))
        || (d3 == 0.0 && on_segment(q1, p1, p2))
        || (d4 == 0.0 && on_segment(q2, p1, p2))
}

/// O(n²) check over non-adjacent edge pairs.
pub fn ring_self_intersects(ring: &[Point]) -> bool {
    let n = ring.len();
    for i in 0..n {
        let (a1, a2) = (ring[i], ring[(i + 1) % n]);
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (b1, b2) = (ring[j], ring[(j + 1) % n]);
            if segments_cross(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

/// Andrew's monotone chain. Returns a counter-clockwise ring without
/// collinear vertices.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Convex hull of `points` grown outward by `distance`, with arcs
/// approximated by `segments` vertices per full turn. The vertices lie on
/// the true offset curve, so the result is convex and every input point is
/// at least `distance * cos(pi / segments)` from its boundary.
pub fn buffered_hull(points: &[Point], distance: f64, segments: usize) -> Vec<Point> {
    let hull = convex_hull(points);
    let mut grown = Vec::with_capacity(hull.len() * segments);
    for p in &hull {
        for k in 0..segments {
            let theta = std::f64::consts::TAU * k as f64 / segments as f64;
            grown.push(Point::new(
                p.x + distance * theta.cos(),
                p.y + distance * theta.sin(),
            ));
        }
    }
    convex_hull(&grown)
}

pub fn is_convex_ccw(ring: &[Point]) -> bool {
    let n = ring.len();
    if n < 3 {
        return false;
    }
    (0..n).all(|i| cross(ring[i], ring[(i + 1) % n], ring[(i + 2) % n]) >= -EPS)
}

/// Keeps the part of `ring` where `a*x + b*y <= c` (Sutherland-Hodgman step).
///
/// For a non-convex subject the output may contain zero-width bridges along
/// the clip line; its signed area is still exact.
pub fn clip_ring_halfplane(ring: &[Point], a: f64, b: f64, c: f64) -> Vec<Point> {
    let n = ring.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(n + 2);
    let side = |p: Point| a * p.x + b * p.y - c;
    let mut prev = ring[n - 1];
    let mut prev_side = side(prev);
    for &cur in ring {
        let cur_side = side(cur);
        let cur_in = cur_side <= 0.0;
        let prev_in = prev_side <= 0.0;
        if cur_in != prev_in {
            let t = prev_side / (prev_side - cur_side);
            out.push(Point::new(
                prev.x + t * (cur.x - prev.x),
                prev.y + t * (cur.y - prev.y),
            ));
        }
        if cur_in {
            out.push(cur);
        }
        prev = cur;
        prev_side = cur_side;
    }
    out
}

/// Clips `ring` (any orientation, possibly non-convex) to the convex
/// counter-clockwise polygon `window`.
pub fn clip_ring_convex(ring: &[Point], window: &[Point]) -> Vec<Point> {
    let mut out = ring.to_vec();
    let n = window.len();
    for i in 0..n {
        if out.is_empty() {
            break;
        }
        let p = window[i];
        let q = window[(i + 1) % n];
        // Interior of a CCW window is to the left of p->q.
        let a = q.y - p.y;
        let b = p.x - q.x;
        let c = a * p.x + b * p.y;
        out = clip_ring_halfplane(&out, a, b, c);
    }
    out
}

/// Area of `polygon ∩ window` for a convex counter-clockwise window.
/// The polygon must be normalized (CCW exterior, CW holes).
pub fn overlap_area_convex(polygon: &Polygon, window: &[Point]) -> f64 {
    polygon
        .rings()
        .map(|ring| signed_area(&clip_ring_convex(ring, window)))
        .sum::<f64>()
        .max(0.0)
}

/// Ear-clipping triangulation of a simple counter-clockwise ring.
pub fn triangulate(ring: &[Point]) -> Vec<[Point; 3]> {
    let mut idx: Vec<usize> = (0..ring.len()).collect();
    let mut triangles = Vec::with_capacity(ring.len().saturating_sub(2));
    let mut guard = 0;
    while idx.len() > 3 && guard < ring.len() * ring.len() {
        guard += 1;
        let m = idx.len();
        let mut clipped = false;
        for i in 0..m {
            let a = ring[idx[(i + m - 1) % m]];
            let b = ring[idx[i]];
            let c = ring[idx[(i + 1) % m]];
            if cross(a, b, c) <= EPS {
                continue;
            }
            let blocked = idx.iter().any(|&k| {
                let p = ring[k];
                p != a && p != b && p != c && in_triangle(p, a, b, c)
            });
            if blocked {
                continue;
            }
            triangles.push([a, b, c]);
            idx.remove(i);
            clipped = true;
            break;
        }
        if !clipped {
            // Degenerate leftovers (collinear runs) carry no area.
            break;
        }
    }
    if idx.len() == 3 {
        let t = [ring[idx[0]], ring[idx[1]], ring[idx[2]]];
        if cross(t[0], t[1], t[2]) > EPS {
            triangles.push(t);
        }
    }
    triangles
}

fn in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    cross(a, b, p) >= 0.0 && cross(b, c, p) >= 0.0 && cross(c, a, p) >= 0.0
}
