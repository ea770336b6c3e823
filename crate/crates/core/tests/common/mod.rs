//! Brute-force reference implementations shared by the integration tests.
//! None of these use the crate's spatial index, Dijkstra or Voronoi code.

#![allow(dead_code)]

use std::collections::HashMap;

use emsaccess::geometry::{point_in_ring, Point, Polygon};
use emsaccess::network::{EdgeRecord, NodeRecord, RoadNetwork};
use emsaccess::population::CensusTract;
use emsaccess::travel::{Category, RawFacility};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Single-source-set shortest times by repeated relaxation over the edge list.
pub fn bellman_ford(network: &RoadNetwork, weights: &[f64], sources: &[usize], respect_oneway: bool) -> Vec<Option<f64>> {
    let n = network.node_count();
    let mut d = vec![f64::INFINITY; n];
    for &s in sources {
        d[s] = 0.0;
    }
    for _ in 0..n {
        let mut changed = false;
        for (k, e) in network.edges().iter().enumerate() {
            let w = weights[k];
            if d[e.from] + w < d[e.to] {
                d[e.to] = d[e.from] + w;
                changed = true;
            }
            if !(e.oneway && respect_oneway) && d[e.to] + w < d[e.from] {
                d[e.from] = d[e.to] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d.into_iter().map(|t| t.is_finite().then_some(t)).collect()
}

/// Points where two or more segment ends meet after rounding to `grid`.
pub fn brute_intersections(network: &RoadNetwork, grid: f64) -> Vec<Point> {
    let mut ends: HashMap<(i64, i64), usize> = HashMap::new();
    for e in network.edges() {
        let a = network.position(e.from);
        let b = network.position(e.to);
        let ka = ((a.x / grid).round() as i64, (a.y / grid).round() as i64);
        let kb = ((b.x / grid).round() as i64, (b.y / grid).round() as i64);
        *ends.entry(ka).or_insert(0) += 1;
        if kb != ka {
            *ends.entry(kb).or_insert(0) += 1;
        }
    }
    let mut pts: Vec<Point> = ends
        .into_iter()
        .filter(|(_, c)| *c >= 2)
        .map(|((x, y), _)| Point::new(x as f64 * grid, y as f64 * grid))
        .collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts
}

pub fn brute_count(center: Point, points: &[Point], r: f64) -> usize {
    points
        .iter()
        .filter(|p| ((p.x - center.x).powi(2) + (p.y - center.y).powi(2)).sqrt() <= r)
        .count()
}

/// Nearest node by exhaustive scan; ties go to the smaller node id.
pub fn nearest_node(network: &RoadNetwork, p: Point) -> (usize, f64) {
    let mut best = (usize::MAX, f64::INFINITY);
    for i in 0..network.node_count() {
        let q = network.position(i);
        let d = ((q.x - p.x).powi(2) + (q.y - p.y).powi(2)).sqrt();
        let better = d < best.1 || (d == best.1 && network.node(i).node_id < network.node(best.0).node_id);
        if better {
            best = (i, d);
        }
    }
    best
}

/// Uniform samples inside a polygon by rejection from its bounding box.
pub fn sample_polygon(poly: &Polygon, n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let xs = poly.exterior.iter().map(|p| p.x);
    let ys = poly.exterior.iter().map(|p| p.y);
    let (x0, x1) = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max));
    let (y0, y1) = (ys.clone().fold(f64::INFINITY, f64::min), ys.fold(f64::NEG_INFINITY, f64::max));
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point::new(rng.gen_range(x0..x1), rng.gen_range(y0..y1));
        if point_in_ring(p, &poly.exterior) && !poly.holes.iter().any(|h| point_in_ring(p, h)) {
            out.push(p);
        }
    }
    out
}

/// Node populations estimated by dropping `per_tract` random residents into
/// each tract and giving each to its nearest node.
pub fn sampled_weights(network: &RoadNetwork, tracts: &[CensusTract], per_tract: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng(seed);
    let mut w = vec![0.0; network.node_count()];
    for t in tracts {
        let share = t.population / per_tract as f64;
        for p in sample_polygon(&t.polygon, per_tract, &mut rng) {
            w[nearest_node(network, p).0] += share;
        }
    }
    w
}

/// Facility node indices for a category by exhaustive nearest-node search,
/// skipping facilities farther than `max_snap` from every node.
pub fn brute_sources(network: &RoadNetwork, raw: &[RawFacility], category: Category, max_snap: f64) -> Vec<usize> {
    let mut s: Vec<usize> = raw
        .iter()
        .filter(|f| category.includes(f.kind))
        .map(|f| nearest_node(network, Point::new(f.x, f.y)))
        .filter(|&(_, d)| d <= max_snap)
        .map(|(i, _)| i)
        .collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// Random network with some edges turned into oneways and a few random
/// facilities, for shortest-path checks.
pub fn random_case(seed: u64, max_nodes: usize) -> (RoadNetwork, Vec<RawFacility>) {
    use emsaccess::geometry::Bbox;
    use emsaccess::travel::FacilityKind;
    let mut r = rng(seed ^ 0x5eed);
    let n = r.gen_range(2..=max_nodes);
    let base = emsaccess::network::generate_random_planar(
        n,
        seed,
        Bbox {
            min: Point::new(0.0, 0.0),
            max: Point::new(1500.0, 1500.0),
        },
    )
    .unwrap();
    let (nodes, mut edges): (Vec<NodeRecord>, Vec<EdgeRecord>) = base.to_records();
    for e in &mut edges {
        e.oneway = r.gen_bool(0.2);
        e.speed_limit *= r.gen_range(0.5..2.0);
    }
    let network = RoadNetwork::build(nodes, edges).unwrap();
    let k = r.gen_range(1..=3);
    let facilities = (0..k)
        .map(|i| RawFacility {
            facility_id: format!("f{i}"),
            kind: if r.gen_bool(0.5) { FacilityKind::EmsStation } else { FacilityKind::Hospital },
            x: r.gen_range(0.0..1500.0),
            y: r.gen_range(0.0..1500.0),
        })
        .collect();
    (network, facilities)
}
