//! Population weights for network nodes from census tracts.
//!
//! Every node inside the study boundary owns the Voronoi cell of its
//! location, clipped to the boundary. A node's population is the sum over
//! tracts of `|cell ∩ tract| * population / area`.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    buffered_hull, clip_ring_convex, clip_ring_halfplane, is_convex_ccw, overlap_area_convex, signed_area,
    triangulate, Bbox, Point, Polygon,
};
use crate::network::RoadNetwork;
use crate::spatial::GridIndex;

/// Buffer applied around the node hull when no study area is supplied.
pub const DEFAULT_BOUNDARY_BUFFER: f64 = 100.0;

/// Vertices per full turn when approximating the buffer arcs.
const BUFFER_SEGMENTS: usize = 32;

/// Pieces below this area (m²) are clipping debris.
const SLIVER_AREA: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CensusTract {
    pub tract_id: String,
    pub polygon: Polygon,
    pub population: f64,
    /// Livable area in m²; the polygon area unless overridden.
    pub area: f64,
}

impl CensusTract {
    /// Normalizes ring orientation and validates geometry and attributes.
    pub fn new(
        tract_id: impl Into<String>,
        mut polygon: Polygon,
        population: f64,
        area_override: Option<f64>,
    ) -> Result<Self> {
        let tract_id = tract_id.into();
        polygon.normalize();
        let invalid = |reason: String| Error::InvalidTract {
            tract: tract_id.clone(),
            reason,
        };
        polygon.validate().map_err(invalid)?;
        if !(population >= 0.0 && population.is_finite()) {
            return Err(invalid(format!("population must be >= 0, got {population}")));
        }
        let area = area_override.unwrap_or_else(|| polygon.area());
        if !(area > 0.0 && area.is_finite()) {
            return Err(invalid(format!("area must be > 0, got {area}")));
        }
        Ok(CensusTract {
            tract_id,
            polygon,
            population,
            area,
        })
    }

    pub fn effective_density(&self) -> f64 {
        effective_density(self.population, self.area)
    }
}

/// Persons per unit area.
pub fn effective_density(population: f64, area: f64) -> f64 {
    population / area
}

/// Voronoi cell as a union of convex counter-clockwise pieces. Convex study
/// areas give a single piece.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct VoronoiCell {
    pub pieces: Vec<Vec<Point>>,
}

impl VoronoiCell {
    pub fn area(&self) -> f64 {
        self.pieces.iter().map(|p| signed_area(p)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn bbox(&self) -> Option<Bbox> {
        let all: Vec<Point> = self.pieces.iter().flatten().copied().collect();
        Bbox::of(&all)
    }
}

/// Distinct site location shared by one or more co-located nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Site {
    pub point: Point,
    pub nodes: Vec<usize>,
    pub cell: VoronoiCell,
}

#[derive(Debug, Clone)]
pub struct VoronoiPartition {
    pub boundary: Polygon,
    pub sites: Vec<Site>,
    site_of_node: Vec<Option<usize>>,
}

impl VoronoiPartition {
    /// Cell owned by `node`; `None` for nodes outside the boundary.
    pub fn cell(&self, node: usize) -> Option<&VoronoiCell> {
        self.site_of_node[node].map(|s| &self.sites[s].cell)
    }

    pub fn node_count(&self) -> usize {
        self.site_of_node.len()
    }

    pub fn total_cell_area(&self) -> f64 {
        self.sites.iter().map(|s| s.cell.area()).sum()
    }

    pub fn boundary_area(&self) -> f64 {
        self.boundary.area()
    }
}

/// Convex hull of the network nodes grown by [`DEFAULT_BOUNDARY_BUFFER`].
pub fn default_boundary(network: &RoadNetwork) -> Polygon {
    Polygon::from_ring(buffered_hull(&network.positions(), DEFAULT_BOUNDARY_BUFFER, BUFFER_SEGMENTS))
}

pub fn voronoi_partition(network: &RoadNetwork, boundary: &Polygon) -> Result<VoronoiPartition> {
    voronoi_of_points(&network.positions(), boundary)
}

/// Voronoi partition of arbitrary points clipped to `boundary`, which must
/// be a simple polygon without holes. Points outside get no cell.
pub fn voronoi_of_points(points: &[Point], boundary: &Polygon) -> Result<VoronoiPartition> {
    let mut boundary = boundary.clone();
    boundary.normalize();
    if !boundary.holes.is_empty() {
        return Err(Error::InvalidBoundary("holes are not supported".into()));
    }
    boundary.validate().map_err(Error::InvalidBoundary)?;

    let mut site_of_node = vec![None; points.len()];
    let mut sites: Vec<Site> = Vec::new();
    let mut by_location: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        if !boundary.contains(*p) {
            continue;
        }
        let key = (p.x.to_bits(), p.y.to_bits());
        let s = *by_location.entry(key).or_insert_with(|| {
            sites.push(Site {
                point: *p,
                nodes: Vec::new(),
                cell: VoronoiCell::default(),
            });
            sites.len() - 1
        });
        sites[s].nodes.push(i);
        site_of_node[i] = Some(s);
    }
    if sites.is_empty() {
        return Err(Error::NoSitesInBoundary);
    }

    let frame = boundary.bbox().expect("validated boundary").expand(1.0);
    let site_points: Vec<Point> = sites.iter().map(|s| s.point).collect();
    let cell_size = (frame.width() * frame.height() / site_points.len() as f64)
        .sqrt()
        .max(1e-6);
    let index = GridIndex::new(&site_points, cell_size);

    let windows: Vec<Vec<Point>> = if is_convex_ccw(&boundary.exterior) {
        vec![boundary.exterior.clone()]
    } else {
        triangulate(&boundary.exterior)
            .into_iter()
            .map(|t| t.to_vec())
            .collect()
    };
    let window_boxes: Vec<Bbox> = windows.iter().map(|w| Bbox::of(w).expect("window")).collect();

    let cells: Vec<VoronoiCell> = (0..site_points.len())
        .into_par_iter()
        .map(|s| {
            let region = voronoi_region(s, &site_points, &index, frame);
            let region_box = match Bbox::of(&region) {
                Some(b) => b,
                None => return VoronoiCell::default(),
            };
            let pieces = windows
                .iter()
                .zip(&window_boxes)
                .filter(|(_, b)| b.intersects(&region_box))
                .map(|(w, _)| clip_ring_convex(&region, w))
                .filter(|piece| signed_area(piece) > SLIVER_AREA)
                .collect();
            VoronoiCell { pieces }
        })
        .collect();
    for (site, cell) in sites.iter_mut().zip(cells) {
        site.cell = cell;
    }
    Ok(VoronoiPartition {
        boundary,
        sites,
        site_of_node,
    })
}

/// Unbounded Voronoi region of site `s`, cut down to `frame`. Neighbors are
/// visited ring by ring outward; once the ring radius exceeds twice the
/// farthest region vertex, no remaining site can clip the region.
fn voronoi_region(s: usize, sites: &[Point], index: &GridIndex, frame: Bbox) -> Vec<Point> {
    let p = sites[s];
    let mut region = frame.to_ring();
    let max_ring = index.max_ring(p);
    for k in 0..=max_ring {
        for o in index.ring(p, k) {
            if o == s {
                continue;
            }
            let q = sites[o];
            // Keep points closer to p: (q - p) . x <= (|q|² - |p|²) / 2
            let a = q.x - p.x;
            let b = q.y - p.y;
            let c = (a * (q.x + p.x) + b * (q.y + p.y)) / 2.0;
            region = clip_ring_halfplane(&region, a, b, c);
            if region.is_empty() {
                return region;
            }
        }
        let reach = region
            .iter()
            .map(|v| v.distance(p))
            .fold(0.0_f64, f64::max);
        if k as f64 * index.cell_size() >= 2.0 * reach {
            break;
        }
    }
    region
}

/// Tract population that fell outside every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct UnassignedRemainder {
    pub tract_id: String,
    pub persons: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationWeights {
    pub weights: Vec<f64>,
    pub total_assigned: f64,
    pub unassigned: Vec<UnassignedRemainder>,
}

impl PopulationWeights {
    pub fn from_weights(weights: Vec<f64>) -> Self {
        let total_assigned = weights.iter().sum();
        PopulationWeights {
            weights,
            total_assigned,
            unassigned: Vec::new(),
        }
    }
}

/// Remainders below this fraction of a tract's population are not reported.
const REMAINDER_REPORT_FRACTION: f64 = 1e-6;

pub fn assign_population(partition: &VoronoiPartition, tracts: &[CensusTract]) -> Result<PopulationWeights> {
    for t in tracts {
        // Tracts built through `CensusTract::new` are already valid; struct
        // literals are checked here.
        t.polygon.validate().map_err(|reason| Error::InvalidTract {
            tract: t.tract_id.clone(),
            reason,
        })?;
        if signed_area(&t.polygon.exterior) < 0.0 {
            return Err(Error::InvalidTract {
                tract: t.tract_id.clone(),
                reason: "polygon is not normalized".into(),
            });
        }
    }
    let site_boxes: Vec<Option<Bbox>> = partition.sites.iter().map(|s| s.cell.bbox()).collect();

    let overlaps: Vec<Vec<(usize, f64)>> = tracts
        .par_iter()
        .map(|t| {
            let tract_box = t.polygon.bbox().expect("validated tract");
            let mut hits = Vec::new();
            for (s, site) in partition.sites.iter().enumerate() {
                match site_boxes[s] {
                    Some(b) if b.intersects(&tract_box) => {}
                    _ => continue,
                }
                let area: f64 = site
                    .cell
                    .pieces
                    .iter()
                    .map(|piece| overlap_area_convex(&t.polygon, piece))
                    .sum();
                if area > 0.0 {
                    hits.push((s, area));
                }
            }
            hits
        })
        .collect();

    let mut site_pop = vec![0.0; partition.sites.len()];
    let mut unassigned = Vec::new();
    for (t, hits) in tracts.iter().zip(&overlaps) {
        let rho = t.effective_density();
        let mut assigned = 0.0;
        for &(s, area) in hits {
            site_pop[s] += area * rho;
            assigned += area * rho;
        }
        let remainder = t.population - assigned;
        if remainder > REMAINDER_REPORT_FRACTION * t.population.max(1.0) {
            unassigned.push(UnassignedRemainder {
                tract_id: t.tract_id.clone(),
                persons: remainder,
            });
        }
    }

    let mut weights = vec![0.0; partition.node_count()];
    for (site, pop) in partition.sites.iter().zip(site_pop) {
        let share = pop / site.nodes.len() as f64;
        for &n in &site.nodes {
            weights[n] = share;
        }
    }
    let total_assigned = weights.iter().sum();
    Ok(PopulationWeights {
        weights,
        total_assigned,
        unassigned,
    })
}
