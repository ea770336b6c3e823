//! Edge travel times with intersection delay, facility snapping, and
//! multi-source shortest travel-time fields.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::RoadNetwork;

/// Default snapping cutoff, meters.
pub const DEFAULT_MAX_SNAP: f64 = 500.0;

/// Free-flow time `length / speed_limit` for every edge, in edge order.
pub fn baseline_times(network: &RoadNetwork) -> Vec<f64> {
    network
        .edges()
        .iter()
        .map(|e| e.length / e.speed_limit)
        .collect()
}

/// Per-edge intersection delays for one value of `alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDelays {
    pub alpha: f64,
    pub seconds: Vec<f64>,
}

/// `alpha * (I(from) + I(to)) / 2` for every edge, with densities in the
/// field's unit scale and `alpha` in seconds times that unit area.
pub fn edge_delays(network: &RoadNetwork, density: &DensityField, alpha: f64) -> Result<EdgeDelays> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", format!("must be finite and >= 0, got {alpha}")));
    }
    density.check_matches(network)?;
    let seconds = network
        .edges()
        .iter()
        .map(|e| alpha * (density.value(e.from) + density.value(e.to)) / 2.0)
        .collect();
    Ok(EdgeDelays { alpha, seconds })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTimes {
    pub alpha: f64,
    pub baseline: Vec<f64>,
    pub delay: Vec<f64>,
    pub adjusted: Vec<f64>,
}

impl EdgeTimes {
    /// Edge times with no intersection delay.
    pub fn free_flow(network: &RoadNetwork) -> Self {
        let baseline = baseline_times(network);
        EdgeTimes {
            alpha: 0.0,
            delay: vec![0.0; baseline.len()],
            adjusted: baseline.clone(),
            baseline,
        }
    }
}

pub fn adjusted_times(baseline: &[f64], delays: &EdgeDelays) -> Result<EdgeTimes> {
    if baseline.len() != delays.seconds.len() {
        return Err(Error::EdgeKeyMismatch(format!(
            "{} baseline times, {} delays",
            baseline.len(),
            delays.seconds.len()
        )));
    }
    let adjusted = baseline
        .iter()
        .zip(&delays.seconds)
        .map(|(t, d)| t + d)
        .collect();
    Ok(EdgeTimes {
        alpha: delays.alpha,
        baseline: baseline.to_vec(),
        delay: delays.seconds.clone(),
        adjusted,
    })
}

/// Baseline, delay and adjusted times for `network` at `alpha`.
pub fn edge_times(network: &RoadNetwork, density: &DensityField, alpha: f64) -> Result<EdgeTimes> {
    let delays = edge_delays(network, density, alpha)?;
    adjusted_times(&baseline_times(network), &delays)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FacilityKind {
    EmsStation,
    Hospital,
}

impl FacilityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FacilityKind::EmsStation => "ems_station",
            FacilityKind::Hospital => "hospital",
        }
    }
}

impl FromStr for FacilityKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ems_station" | "ems" => Ok(FacilityKind::EmsStation),
            "hospital" => Ok(FacilityKind::Hospital),
            other => Err(format!("unknown facility kind `{other}`")),
        }
    }
}

/// Facility category a field is computed for; `Overall` is the union.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    EmsStation,
    Hospital,
    Overall,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::EmsStation, Category::Hospital, Category::Overall];

    pub fn includes(self, kind: FacilityKind) -> bool {
        match self {
            Category::EmsStation => kind == FacilityKind::EmsStation,
            Category::Hospital => kind == FacilityKind::Hospital,
            Category::Overall => true,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::EmsStation => "ems_station",
            Category::Hospital => "hospital",
            Category::Overall => "overall",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "overall" => Ok(Category::Overall),
            other => other.parse::<FacilityKind>().map(|k| match k {
                FacilityKind::EmsStation => Category::EmsStation,
                FacilityKind::Hospital => Category::Hospital,
            }),
        }
    }
}

/// Facility location before snapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawFacility {
    pub facility_id: String,
    pub kind: FacilityKind,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facility {
    pub facility_id: String,
    pub kind: FacilityKind,
    pub position: Point,
    pub snapped_node: usize,
    pub snap_distance: f64,
}

/// Facility left out of a [`FacilitySet`] because no node was close enough.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapExclusion {
    pub facility_id: String,
    pub nearest_node: String,
    pub distance: f64,
}

impl fmt::Display for SnapExclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "facility `{}` excluded: nearest node `{}` is {:.1} m away",
            self.facility_id, self.nearest_node, self.distance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FacilitySet {
    pub facilities: Vec<Facility>,
    pub excluded: Vec<SnapExclusion>,
}

impl FacilitySet {
    pub fn sources(&self, category: Category) -> Vec<usize> {
        self.facilities
            .iter()
            .filter(|f| category.includes(f.kind))
            .map(|f| f.snapped_node)
            .collect()
    }
}

/// Snaps each facility to its nearest node (ties go to the smallest node id).
/// Facilities farther than `max_snap` meters are listed in `excluded`.
pub fn snap_facilities(network: &RoadNetwork, raw: &[RawFacility], max_snap: f64) -> Result<FacilitySet> {
    if !(max_snap >= 0.0) {
        return Err(Error::param("max_snap", format!("must be >= 0, got {max_snap}")));
    }
    let mut set = FacilitySet::default();
    for f in raw {
        let p = Point::new(f.x, f.y);
        if !p.is_finite() {
            return Err(Error::param("facility", format!("`{}` has non-finite coordinates", f.facility_id)));
        }
        let mut best: Option<(f64, usize)> = None;
        for (i, n) in network.nodes().iter().enumerate() {
            let d = n.point().distance_sq(p);
            best = match best {
                None => Some((d, i)),
                Some((bd, bi)) => match d.total_cmp(&bd) {
                    Ordering::Less => Some((d, i)),
                    Ordering::Equal if n.node_id < network.node(bi).node_id => Some((d, i)),
                    _ => Some((bd, bi)),
                },
            };
        }
        let (d_sq, node) = best.expect("network has nodes");
        let distance = d_sq.sqrt();
        if distance > max_snap {
            set.excluded.push(SnapExclusion {
                facility_id: f.facility_id.clone(),
                nearest_node: network.node(node).node_id.clone(),
                distance,
            });
        } else {
            set.facilities.push(Facility {
                facility_id: f.facility_id.clone(),
                kind: f.kind,
                position: p,
                snapped_node: node,
                snap_distance: distance,
            });
        }
    }
    Ok(set)
}

/// Direction semantics for a travel-time field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldOptions {
    /// When false, oneway edges may be driven against their direction.
    pub respect_oneway: bool,
    /// Measure node-to-facility time instead of facility-to-node response time.
    pub toward_facility: bool,
}

impl Default for FieldOptions {
    fn default() -> Self {
        FieldOptions {
            respect_oneway: true,
            toward_facility: false,
        }
    }
}

/// Directed weighted adjacency implied by `options`.
pub fn weighted_arcs(network: &RoadNetwork, weights: &[f64], options: FieldOptions) -> Vec<Vec<(usize, f64)>> {
    let mut arcs = vec![Vec::new(); network.node_count()];
    for (k, e) in network.edges().iter().enumerate() {
        let w = weights[k];
        let forward_only = e.oneway && options.respect_oneway;
        let (a, b) = if options.toward_facility {
            (e.to, e.from)
        } else {
            (e.from, e.to)
        };
        arcs[a].push((b, w));
        if !forward_only {
            arcs[b].push((a, w));
        }
    }
    arcs
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    time: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed for a min-heap on (time, node).
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from every node in `sources` at time zero. `None` marks nodes no
/// source can reach.
pub fn multi_source_times(arcs: &[Vec<(usize, f64)>], sources: &[usize]) -> Vec<Option<f64>> {
    let mut best = vec![f64::INFINITY; arcs.len()];
    let mut done = vec![false; arcs.len()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if best[s] > 0.0 {
            best[s] = 0.0;
            heap.push(Entry { time: 0.0, node: s });
        }
    }
    while let Some(Entry { time, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        for &(next, w) in &arcs[node] {
            let t = time + w;
            if t < best[next] {
                best[next] = t;
                heap.push(Entry { time: t, node: next });
            }
        }
    }
    best.into_iter().map(|t| t.is_finite().then_some(t)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TravelTimeField {
    pub category: Category,
    pub alpha: f64,
    pub times: Vec<Option<f64>>,
}

impl TravelTimeField {
    pub fn reachable_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.times.iter().flatten().copied()
    }
}

pub fn travel_time_field(
    network: &RoadNetwork,
    edge_times: &EdgeTimes,
    facilities: &FacilitySet,
    category: Category,
    options: FieldOptions,
) -> Result<TravelTimeField> {
    if edge_times.adjusted.len() != network.edge_count() {
        return Err(Error::EdgeKeyMismatch(format!(
            "{} edge times for {} edges",
            edge_times.adjusted.len(),
            network.edge_count()
        )));
    }
    if let Some(w) = edge_times.adjusted.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::param("edge_times", format!("weights must be finite and positive, got {w}")));
    }
    let sources = facilities.sources(category);
    if sources.is_empty() {
        return Err(Error::EmptyCategory(category.to_string()));
    }
    let arcs = weighted_arcs(network, &edge_times.adjusted, options);
    Ok(TravelTimeField {
        category,
        alpha: edge_times.alpha,
        times: multi_source_times(&arcs, &sources),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{density_field, derive_intersections, HECTARE};
    use crate::network::{generate_grid, EdgeRecord, NodeRecord, RoadClass};

    fn path(n: usize, seconds: f64) -> RoadNetwork {
        let nodes = (0..n)
            .map(|i| NodeRecord::new(((b'A' + i as u8) as char).to_string(), i as f64 * 100.0, 0.0))
            .collect();
        let edges = (0..n - 1)
            .map(|i| {
                EdgeRecord::street(
                    format!("e{i}"),
                    ((b'A' + i as u8) as char).to_string(),
                    ((b'A' + i as u8 + 1) as char).to_string(),
                    Some(100.0),
                    100.0 / seconds,
                )
            })
            .collect();
        RoadNetwork::build(nodes, edges).unwrap()
    }

    fn facility(id: &str, kind: FacilityKind, x: f64, y: f64) -> RawFacility {
        RawFacility {
            facility_id: id.into(),
            kind,
            x,
            y,
        }
    }

    #[test]
    fn baseline_division() {
        let net = RoadNetwork::build(
            vec![NodeRecord::new("a", 0.0, 0.0), NodeRecord::new("b", 1.0, 0.0)],
            vec![
                EdgeRecord::street("q", "a", "b", Some(402.336), 25.0 * crate::network::MPH),
                EdgeRecord::street("m", "a", "b", Some(1609.344), 55.0 * crate::network::MPH),
            ],
        )
        .unwrap();
        let t = baseline_times(&net);
        assert!((t[0] - 36.0).abs() < 1e-12);
        assert!((t[1] - 65.454_545_454_545).abs() < 1e-9);
        let g = generate_grid(2, 2, 200.0, 10.0).unwrap();
        assert_eq!(baseline_times(&g), vec![20.0; 4]);
    }

    #[test]
    fn delay_is_endpoint_average() {
        let g = generate_grid(2, 2, 200.0, 10.0).unwrap();
        let ids = g.nodes().iter().map(|n| n.node_id.clone()).collect();
        // r0c0, r0c1, r1c0, r1c1
        let field = DensityField::from_values(800.0, HECTARE, ids, vec![0.5, 0.5, 1.0, 0.0]).unwrap();
        let d = edge_delays(&g, &field, 15.0).unwrap();
        // e0: r0c0-r0c1, e1: r0c0-r1c0, e2: r0c1-r1c1, e3: r1c0-r1c1
        assert_eq!(d.seconds, vec![7.5, 11.25, 3.75, 7.5]);
        assert!(edge_delays(&g, &field, 0.0).unwrap().seconds.iter().all(|&s| s == 0.0));
        assert!(edge_delays(&g, &field, -1.0).is_err());
        let t = adjusted_times(&baseline_times(&g), &d).unwrap();
        assert_eq!(t.adjusted[0], 27.5);
    }

    #[test]
    fn mismatched_density_is_rejected() {
        let g = generate_grid(2, 2, 200.0, 10.0).unwrap();
        let field = DensityField::from_values(800.0, HECTARE, vec!["x".into()], vec![0.0]).unwrap();
        assert!(matches!(edge_delays(&g, &field, 1.0), Err(Error::DensityMismatch(_))));
        let short = EdgeDelays {
            alpha: 1.0,
            seconds: vec![0.0],
        };
        assert!(matches!(adjusted_times(&[1.0, 2.0], &short), Err(Error::EdgeKeyMismatch(_))));
    }

    #[test]
    fn uniform_interior_edges_share_adjusted_time() {
        let g = generate_grid(5, 5, 200.0, 10.0).unwrap();
        let set = derive_intersections(&g, &[RoadClass::Street], 1.0).unwrap();
        let field = density_field(&g, &set, 250.0, HECTARE).unwrap();
        let times = edge_times(&g, &field, 15.0).unwrap();
        let interior = |i: usize| {
            let p = g.position(i);
            p.x > 0.0 && p.x < 800.0 && p.y > 0.0 && p.y < 800.0
        };
        let inner: Vec<f64> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| interior(e.from) && interior(e.to))
            .map(|(k, _)| times.adjusted[k])
            .collect();
        assert_eq!(inner.len(), 12);
        assert!(inner.iter().all(|&t| t == inner[0]));
        assert!(inner[0] > 20.0);
    }

    #[test]
    fn snapping_rules() {
        let g = generate_grid(2, 2, 100.0, 10.0).unwrap();
        let set = snap_facilities(
            &g,
            &[
                facility("on", FacilityKind::Hospital, 100.0, 0.0),
                facility("tie", FacilityKind::EmsStation, 50.0, 0.0),
                facility("far", FacilityKind::EmsStation, 700.0, 0.0),
            ],
            DEFAULT_MAX_SNAP,
        )
        .unwrap();
        assert_eq!(set.facilities.len(), 2);
        assert_eq!(g.node(set.facilities[0].snapped_node).node_id, "r0c1");
        assert_eq!(set.facilities[0].snap_distance, 0.0);
        assert_eq!(g.node(set.facilities[1].snapped_node).node_id, "r0c0");
        assert_eq!(set.excluded.len(), 1);
        assert_eq!(set.excluded[0].facility_id, "far");
        assert_eq!(set.excluded[0].distance, 600.0);
    }

    #[test]
    fn line_graph_fields() {
        let net = path(3, 60.0);
        let free = EdgeTimes::free_flow(&net);
        let one = snap_facilities(&net, &[facility("a", FacilityKind::EmsStation, 0.0, 0.0)], 1.0).unwrap();
        let f = travel_time_field(&net, &free, &one, Category::EmsStation, FieldOptions::default()).unwrap();
        assert_eq!(f.times, vec![Some(0.0), Some(60.0), Some(120.0)]);
        let two = snap_facilities(
            &net,
            &[
                facility("a", FacilityKind::EmsStation, 0.0, 0.0),
                facility("c", FacilityKind::Hospital, 200.0, 0.0),
            ],
            1.0,
        )
        .unwrap();
        let f = travel_time_field(&net, &free, &two, Category::Overall, FieldOptions::default()).unwrap();
        assert_eq!(f.times, vec![Some(0.0), Some(60.0), Some(0.0)]);
        let err = travel_time_field(&net, &free, &one, Category::Hospital, FieldOptions::default()).unwrap_err();
        assert!(err.to_string().contains("hospital"));
    }

    #[test]
    fn oneway_and_direction_flags() {
        let nodes = vec![NodeRecord::new("a", 0.0, 0.0), NodeRecord::new("b", 100.0, 0.0)];
        let mut e = EdgeRecord::street("ab", "a", "b", Some(100.0), 10.0);
        e.oneway = true;
        let net = RoadNetwork::build(nodes, vec![e]).unwrap();
        let free = EdgeTimes::free_flow(&net);
        let at_b = snap_facilities(&net, &[facility("f", FacilityKind::EmsStation, 100.0, 0.0)], 1.0).unwrap();
        let respond = travel_time_field(&net, &free, &at_b, Category::Overall, FieldOptions::default()).unwrap();
        assert_eq!(respond.times, vec![None, Some(0.0)]);
        let toward = FieldOptions {
            toward_facility: true,
            ..FieldOptions::default()
        };
        let f = travel_time_field(&net, &free, &at_b, Category::Overall, toward).unwrap();
        assert_eq!(f.times, vec![Some(10.0), Some(0.0)]);
        let contraflow = FieldOptions {
            respect_oneway: false,
            ..FieldOptions::default()
        };
        let f = travel_time_field(&net, &free, &at_b, Category::Overall, contraflow).unwrap();
        assert_eq!(f.times, vec![Some(10.0), Some(0.0)]);
    }

    #[test]
    fn disconnected_nodes_are_unreachable() {
        let nodes = vec![
            NodeRecord::new("a", 0.0, 0.0),
            NodeRecord::new("b", 100.0, 0.0),
            NodeRecord::new("c", 500.0, 0.0),
            NodeRecord::new("d", 600.0, 0.0),
        ];
        let edges = vec![
            EdgeRecord::street("ab", "a", "b", None, 10.0),
            EdgeRecord::street("cd", "c", "d", None, 10.0),
        ];
        let net = RoadNetwork::build(nodes, edges).unwrap();
        let fs = snap_facilities(&net, &[facility("f", FacilityKind::EmsStation, 0.0, 0.0)], 1.0).unwrap();
        let f = travel_time_field(&net, &EdgeTimes::free_flow(&net), &fs, Category::Overall, FieldOptions::default())
            .unwrap();
        assert_eq!(f.times, vec![Some(0.0), Some(10.0), None, None]);
    }
}
