//! Road network graph: validated construction from records plus synthetic
//! generators used by tests and examples.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Bbox, Point};

/// One mile per hour in meters per second (exact).
pub const MPH: f64 = 0.44704;

/// Default urban speed limit, 25 mph.
pub const DEFAULT_STREET_SPEED: f64 = 25.0 * MPH;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoadClass {
    Street,
    Highway,
    Other,
}

impl RoadClass {
    pub fn as_str(self) -> &'static str {
        match self {
            RoadClass::Street => "street",
            RoadClass::Highway => "highway",
            RoadClass::Other => "other",
        }
    }
}

impl fmt::Display for RoadClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoadClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "street" => Ok(RoadClass::Street),
            "highway" => Ok(RoadClass::Highway),
            "other" => Ok(RoadClass::Other),
            other => Err(format!("unknown road class `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub node_id: String,
    pub x: f64,
    pub y: f64,
}

impl NodeRecord {
    pub fn new(node_id: impl Into<String>, x: f64, y: f64) -> Self {
        NodeRecord {
            node_id: node_id.into(),
            x,
            y,
        }
    }

    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

/// Road segment as ingested. `length` may be absent, in which case the
/// endpoint distance is used. `speed_limit` is in m/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub edge_id: String,
    pub from: String,
    pub to: String,
    pub length: Option<f64>,
    pub speed_limit: f64,
    pub road_class: RoadClass,
    pub oneway: bool,
}

impl EdgeRecord {
    pub fn street(
        edge_id: impl Into<String>,
        from: impl Into<String>,
        to: impl Into<String>,
        length: Option<f64>,
        speed_limit: f64,
    ) -> Self {
        EdgeRecord {
            edge_id: edge_id.into(),
            from: from.into(),
            to: to.into(),
            length,
            speed_limit,
            road_class: RoadClass::Street,
            oneway: false,
        }
    }
}

/// Validated edge with resolved endpoint indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub speed_limit: f64,
    pub road_class: RoadClass,
    pub oneway: bool,
}

/// Directed traversal of an edge out of some node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub edge: usize,
    pub to: usize,
}

/// Immutable road multigraph. Nodes and edges keep their input order, which
/// is also the order every per-node or per-edge output follows.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    nodes: Vec<NodeRecord>,
    edges: Vec<Edge>,
    index: HashMap<String, usize>,
    adjacency: Vec<Vec<Arc>>,
}

impl RoadNetwork {
    pub fn build(nodes: Vec<NodeRecord>, edges: Vec<EdgeRecord>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyNetwork("no nodes"));
        }
        if edges.is_empty() {
            return Err(Error::EmptyNetwork("no edges"));
        }
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if !n.point().is_finite() {
                return Err(Error::NonFiniteCoordinate(n.node_id.clone()));
            }
            if index.insert(n.node_id.clone(), i).is_some() {
                return Err(Error::DuplicateNode(n.node_id.clone()));
            }
        }
        let mut seen_edges = HashSet::with_capacity(edges.len());
        let mut built = Vec::with_capacity(edges.len());
        for e in edges {
            if !seen_edges.insert(e.edge_id.clone()) {
                return Err(Error::param("edge_id", format!("duplicate edge id `{}`", e.edge_id)));
            }
            let resolve = |id: &str| {
                index.get(id).copied().ok_or_else(|| Error::DanglingEndpoint {
                    edge: e.edge_id.clone(),
                    node: id.to_string(),
                })
            };
            let from = resolve(&e.from)?;
            let to = resolve(&e.to)?;
            if from == to {
                return Err(Error::SelfLoop(e.edge_id));
            }
            let length = match e.length {
                Some(l) => l,
                None => nodes[from].point().distance(nodes[to].point()),
            };
            if !(length > 0.0 && length.is_finite()) {
                return Err(Error::InvalidEdgeAttribute {
                    edge: e.edge_id,
                    field: "length",
                    value: length,
                });
            }
            if !(e.speed_limit > 0.0 && e.speed_limit.is_finite()) {
                return Err(Error::InvalidEdgeAttribute {
                    edge: e.edge_id,
                    field: "speed_limit",
                    value: e.speed_limit,
                });
            }
            built.push(Edge {
                id: e.edge_id,
                from,
                to,
                length,
                speed_limit: e.speed_limit,
                road_class: e.road_class,
                oneway: e.oneway,
            });
        }
        let mut adjacency = vec![Vec::new(); nodes.len()];
        for (k, e) in built.iter().enumerate() {
            adjacency[e.from].push(Arc { edge: k, to: e.to });
            if !e.oneway {
                adjacency[e.to].push(Arc { edge: k, to: e.from });
            }
        }
        Ok(RoadNetwork {
            nodes,
            edges: built,
            index,
            adjacency,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, i: usize) -> &NodeRecord {
        &self.nodes[i]
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn position(&self, i: usize) -> Point {
        self.nodes[i].point()
    }

    pub fn positions(&self) -> Vec<Point> {
        self.nodes.iter().map(NodeRecord::point).collect()
    }

    /// Outgoing traversals permitted by edge direction.
    pub fn adjacency(&self, i: usize) -> &[Arc] {
        &self.adjacency[i]
    }

    /// Every edge incident to node `i`, regardless of direction.
    pub fn incident_edges(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.from == i || e.to == i)
            .map(|(k, _)| k)
    }

    /// Undirected neighbor lists, used for connectivity questions.
    pub fn undirected_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nbrs = vec![Vec::new(); self.nodes.len()];
        for e in &self.edges {
            nbrs[e.from].push(e.to);
            nbrs[e.to].push(e.from);
        }
        nbrs
    }

    pub fn bbox(&self) -> Bbox {
        Bbox::of(&self.positions()).expect("network has nodes")
    }

    /// Records reproducing this network, with resolved lengths.
    pub fn to_records(&self) -> (Vec<NodeRecord>, Vec<EdgeRecord>) {
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeRecord {
                edge_id: e.id.clone(),
                from: self.nodes[e.from].node_id.clone(),
                to: self.nodes[e.to].node_id.clone(),
                length: Some(e.length),
                speed_limit: e.speed_limit,
                road_class: e.road_class,
                oneway: e.oneway,
            })
            .collect();
        (self.nodes.clone(), edges)
    }

    /// Number of weakly connected components.
    pub fn component_count(&self) -> usize {
        let nbrs = self.undirected_neighbors();
        let mut seen = vec![false; self.nodes.len()];
        let mut count = 0;
        for start in 0..self.nodes.len() {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in &nbrs[u] {
                    if !seen[v] {
                        seen[v] = true;
                        stack.push(v);
                    }
                }
            }
        }
        count
    }
}

/// Node id used by [`generate_grid`] for row `r`, column `c`.
pub fn grid_node_id(r: usize, c: usize) -> String {
    format!("r{r}c{c}")
}

/// Lattice of `rows x cols` nodes spaced `spacing` meters apart with
/// bidirectional street edges between 4-neighbors. Row `r`, column `c`
/// sits at `(c * spacing, r * spacing)`.
pub fn generate_grid(rows: usize, cols: usize, spacing: f64, speed_limit: f64) -> Result<RoadNetwork> {
    if rows < 2 || cols < 2 {
        return Err(Error::param("rows/cols", format!("need at least 2x2, got {rows}x{cols}")));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::param("spacing", format!("must be positive, got {spacing}")));
    }
    let mut nodes = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            nodes.push(NodeRecord::new(
                grid_node_id(r, c),
                c as f64 * spacing,
                r as f64 * spacing,
            ));
        }
    }
    let mut edges = Vec::new();
    let mut push = |a: String, b: String| {
        let id = format!("e{}", edges.len());
        edges.push(EdgeRecord::street(id, a, b, Some(spacing), speed_limit));
    };
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                push(grid_node_id(r, c), grid_node_id(r, c + 1));
            }
            if r + 1 < rows {
                push(grid_node_id(r, c), grid_node_id(r + 1, c));
            }
        }
    }
    RoadNetwork::build(nodes, edges)
}

/// Number of nearest neighbors each node is wired to by
/// [`generate_random_planar`], on top of the spanning tree.
pub const RANDOM_NETWORK_NEIGHBORS: usize = 3;

/// Seeded random street network inside `bbox`.
///
/// Wiring: a Euclidean minimum spanning tree (guarantees connectivity) plus an
/// edge from every node to its [`RANDOM_NETWORK_NEIGHBORS`] nearest
/// neighbors. All edges are bidirectional 25 mph streets whose length is the
/// endpoint distance. Edges may cross, so the result is planar-like rather
/// than strictly planar.
pub fn generate_random_planar(n: usize, seed: u64, bbox: Bbox) -> Result<RoadNetwork> {
    if n < 2 {
        return Err(Error::param("n", format!("need at least 2 nodes, got {n}")));
    }
    if !(bbox.width() > 0.0 && bbox.height() > 0.0) {
        return Err(Error::param("bbox", "must have positive extent"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(n);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::new(
            rng.gen_range(bbox.min.x..bbox.max.x),
            rng.gen_range(bbox.min.y..bbox.max.y),
        );
        if seen.insert((p.x.to_bits(), p.y.to_bits())) {
            pts.push(p);
        }
    }
    let pairs = spanning_and_knn_pairs(&pts, RANDOM_NETWORK_NEIGHBORS);
    let nodes = pts
        .iter()
        .enumerate()
        .map(|(i, p)| NodeRecord::new(format!("n{i}"), p.x, p.y))
        .collect();
    let edges = pairs
        .into_iter()
        .enumerate()
        .map(|(k, (a, b))| {
            EdgeRecord::street(format!("e{k}"), format!("n{a}"), format!("n{b}"), None, DEFAULT_STREET_SPEED)
        })
        .collect();
    RoadNetwork::build(nodes, edges)
}

/// Sorted unique `(a, b)` pairs with `a < b` from Prim's MST and k-nearest
/// neighbors.
pub(crate) fn spanning_and_knn_pairs(pts: &[Point], k: usize) -> BTreeSet<(usize, usize)> {
    let n = pts.len();
    let mut pairs = BTreeSet::new();
    let ordered = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };

    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    best[0] = 0.0;
    for _ in 0..n {
        let mut u = usize::MAX;
        for v in 0..n {
            if !in_tree[v] && (u == usize::MAX || best[v] < best[u]) {
                u = v;
            }
        }
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            pairs.insert(ordered(u, parent[u]));
        }
        for v in 0..n {
            if !in_tree[v] {
                let d = pts[u].distance_sq(pts[v]);
                if d < best[v] {
                    best[v] = d;
                    parent[v] = u;
                }
            }
        }
    }

    for i in 0..n {
        let mut others: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| (pts[i].distance_sq(pts[j]), j))
            .collect();
        let take = k.min(others.len());
        if take == 0 {
            continue;
        }
        others.select_nth_unstable_by(take - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &others[..take] {
            pairs.insert(ordered(i, j));
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_nodes() -> Vec<NodeRecord> {
        vec![NodeRecord::new("A", 0.0, 0.0), NodeRecord::new("B", 100.0, 0.0)]
    }

    #[test]
    fn missing_length_is_euclidean() {
        let net = RoadNetwork::build(two_nodes(), vec![EdgeRecord::street("e", "A", "B", None, 10.0)]).unwrap();
        assert_eq!(net.edges()[0].length, 100.0);
    }

    #[test]
    fn dangling_endpoint_names_node() {
        let err = RoadNetwork::build(two_nodes(), vec![EdgeRecord::street("e", "A", "Z", None, 10.0)]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("`Z`"), "{msg}");
        assert!(msg.contains("`e`"), "{msg}");
    }

    #[test]
    fn rejects_duplicates_loops_and_bad_attributes() {
        let mut dup = two_nodes();
        dup.push(NodeRecord::new("A", 1.0, 1.0));
        assert!(matches!(
            RoadNetwork::build(dup, vec![EdgeRecord::street("e", "A", "B", None, 1.0)]),
            Err(Error::DuplicateNode(id)) if id == "A"
        ));
        assert!(matches!(
            RoadNetwork::build(two_nodes(), vec![EdgeRecord::street("e", "A", "A", Some(1.0), 1.0)]),
            Err(Error::SelfLoop(_))
        ));
        assert!(matches!(
            RoadNetwork::build(two_nodes(), vec![EdgeRecord::street("e", "A", "B", Some(0.0), 1.0)]),
            Err(Error::InvalidEdgeAttribute { field: "length", .. })
        ));
        assert!(matches!(
            RoadNetwork::build(two_nodes(), vec![EdgeRecord::street("e", "A", "B", None, -3.0)]),
            Err(Error::InvalidEdgeAttribute { field: "speed_limit", .. })
        ));
        assert!(matches!(RoadNetwork::build(Vec::new(), Vec::new()), Err(Error::EmptyNetwork(_))));
    }

    #[test]
    fn parallel_edges_are_kept() {
        let edges = vec![
            EdgeRecord::street("fast", "A", "B", None, 20.0),
            EdgeRecord::street("slow", "A", "B", None, 5.0),
        ];
        let net = RoadNetwork::build(two_nodes(), edges).unwrap();
        assert_eq!(net.edge_count(), 2);
        assert_eq!(net.adjacency(0).len(), 2);
    }

    #[test]
    fn oneway_appears_under_from_only() {
        let mut e = EdgeRecord::street("e", "A", "B", None, 10.0);
        e.oneway = true;
        let net = RoadNetwork::build(two_nodes(), vec![e]).unwrap();
        assert_eq!(net.adjacency(0), &[Arc { edge: 0, to: 1 }]);
        assert!(net.adjacency(1).is_empty());
    }

    #[test]
    fn grid_counts() {
        let g = generate_grid(5, 5, 200.0, 11.176).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (25, 40));
        assert!(g.edges().iter().all(|e| e.length == 200.0));
        let g = generate_grid(2, 2, 1.0, 1.0).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (4, 4));
        let g = generate_grid(3, 2, 50.0, 10.0).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (6, 7));
        assert!(generate_grid(1, 5, 1.0, 1.0).is_err());
    }

    #[test]
    fn random_network_is_deterministic_and_connected() {
        let bbox = Bbox {
            min: Point::new(0.0, 0.0),
            max: Point::new(1000.0, 1000.0),
        };
        let a = generate_random_planar(10, 42, bbox).unwrap().to_records();
        let b = generate_random_planar(10, 42, bbox).unwrap().to_records();
        assert_eq!(a, b);
        assert_eq!(generate_random_planar(50, 7, bbox).unwrap().component_count(), 1);
        let unit = Bbox {
            min: Point::new(0.0, 0.0),
            max: Point::new(1.0, 1.0),
        };
        let tiny = generate_random_planar(2, 0, unit).unwrap();
        assert_eq!(tiny.node_count(), 2);
        assert!(tiny.edge_count() >= 1);
    }
}
