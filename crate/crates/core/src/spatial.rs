//! Fixed-cell grid bucketing for radius queries.

use std::collections::HashMap;

use crate::geometry::Point;

#[derive(Debug, Clone)]
pub struct GridIndex {
    cell: f64,
    points: Vec<Point>,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl GridIndex {
    /// Buckets `points` into square cells of side `cell` (must be > 0).
    pub fn new(points: &[Point], cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "grid cell must be positive");
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(key(*p, cell)).or_default().push(i);
        }
        GridIndex {
            cell,
            points: points.to_vec(),
            buckets,
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point {
        self.points[i]
    }

    /// Indices of points with Euclidean distance `<= radius` from `center`,
    /// in ascending index order.
    pub fn within(&self, center: Point, radius: f64) -> Vec<usize> {
        let r_sq = radius * radius;
        let (lo_x, lo_y) = key(Point::new(center.x - radius, center.y - radius), self.cell);
        let (hi_x, hi_y) = key(Point::new(center.x + radius, center.y + radius), self.cell);
        let mut hits = Vec::new();
        for cx in lo_x..=hi_x {
            for cy in lo_y..=hi_y {
                if let Some(bucket) = self.buckets.get(&(cx, cy)) {
                    hits.extend(
                        bucket
                            .iter()
                            .copied()
                            .filter(|&i| self.points[i].distance_sq(center) <= r_sq),
                    );
                }
            }
        }
        hits.sort_unstable();
        hits
    }

    pub fn count_within(&self, center: Point, radius: f64) -> usize {
        self.within(center, radius).len()
    }

    /// Indices bucketed in the square ring at Chebyshev cell distance `ring`
    /// around the cell containing `center`. After visiting rings `0..=k`,
    /// every point closer than `k * cell_size()` has been seen.
    pub fn ring(&self, center: Point, ring: i64) -> Vec<usize> {
        let (kx, ky) = key(center, self.cell);
        let mut out = Vec::new();
        let mut visit = |cx: i64, cy: i64| {
            if let Some(bucket) = self.buckets.get(&(cx, cy)) {
                out.extend_from_slice(bucket);
            }
        };
        if ring == 0 {
            visit(kx, ky);
            return out;
        }
        for dx in -ring..=ring {
            visit(kx + dx, ky - ring);
            visit(kx + dx, ky + ring);
        }
        for dy in -ring + 1..ring {
            visit(kx - ring, ky + dy);
            visit(kx + ring, ky + dy);
        }
        out
    }

    /// Largest ring index that can still hold points.
    pub fn max_ring(&self, center: Point) -> i64 {
        let (kx, ky) = key(center, self.cell);
        self.buckets
            .keys()
            .map(|&(x, y)| (x - kx).abs().max((y - ky).abs()))
            .max()
            .unwrap_or(0)
    }
}

fn key(p: Point, cell: f64) -> (i64, i64) {
    ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
}
