//! Intersection extraction and the per-node intersection density field.
//!
//! Density at a node is the number of intersection points within a disk of
//! radius `r`, divided by the disk area `pi * r^2`, then expressed per
//! `unit_scale` square meters (hectares by default).

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::network::{RoadClass, RoadNetwork};
use crate::spatial::GridIndex;

/// Radius used for intersection density, in meters.
pub const DEFAULT_RADIUS: f64 = 800.0;

/// One hectare in square meters; the default reporting unit for density.
pub const HECTARE: f64 = 1.0e4;

pub const DEFAULT_ROUNDING_GRID: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct IntersectionSet {
    pub points: Vec<Point>,
    pub rounding_grid: f64,
}

impl IntersectionSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Intersection points from edge endpoints.
///
/// Endpoints of edges whose class is in `classes` are snapped to multiples of
/// `rounding_grid` and merged. A snapped point is kept only when at least two
/// distinct segments end there; dead ends are dropped. Output is sorted by
/// snapped grid cell.
pub fn derive_intersections(
    network: &RoadNetwork,
    classes: &[RoadClass],
    rounding_grid: f64,
) -> Result<IntersectionSet> {
    if !(rounding_grid > 0.0 && rounding_grid.is_finite()) {
        return Err(Error::param("rounding_grid", format!("must be positive, got {rounding_grid}")));
    }
    let quantize = |p: Point| {
        (
            (p.x / rounding_grid).round() as i64,
            (p.y / rounding_grid).round() as i64,
        )
    };
    let mut incidence: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for edge in network.edges().iter().filter(|e| classes.contains(&e.road_class)) {
        let a = quantize(network.position(edge.from));
        let b = quantize(network.position(edge.to));
        *incidence.entry(a).or_default() += 1;
        if b != a {
            *incidence.entry(b).or_default() += 1;
        }
    }
    let points = incidence
        .into_iter()
        .filter(|&(_, n)| n >= 2)
        .map(|((qx, qy), _)| Point::new(qx as f64 * rounding_grid, qy as f64 * rounding_grid))
        .collect();
    Ok(IntersectionSet {
        points,
        rounding_grid,
    })
}

/// Per-node intersection density, in intersections per `unit_scale` m².
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub radius: f64,
    pub unit_scale: f64,
    pub node_ids: Vec<String>,
    pub counts: Vec<usize>,
    pub values: Vec<f64>,
}

impl DensityField {
    /// Builds a field from per-node values (for example, re-read from disk).
    pub fn from_values(radius: f64, unit_scale: f64, node_ids: Vec<String>, values: Vec<f64>) -> Result<Self> {
        check_radius_scale(radius, unit_scale)?;
        if node_ids.len() != values.len() {
            return Err(Error::DensityMismatch("ids and values differ in length".into()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::DensityMismatch(format!("invalid density value {v}")));
        }
        let disk = std::f64::consts::PI * radius * radius;
        let counts = values
            .iter()
            .map(|v| (v * disk / unit_scale).round() as usize)
            .collect();
        Ok(DensityField {
            radius,
            unit_scale,
            node_ids,
            counts,
            values,
        })
    }

    pub fn value(&self, node: usize) -> f64 {
        self.values[node]
    }

    /// Errors unless this field was computed for exactly `network`'s nodes.
    pub fn check_matches(&self, network: &RoadNetwork) -> Result<()> {
        if self.node_ids.len() != network.node_count() {
            return Err(Error::DensityMismatch(format!(
                "field has {} nodes, network has {}",
                self.node_ids.len(),
                network.node_count()
            )));
        }
        for (id, node) in self.node_ids.iter().zip(network.nodes()) {
            if *id != node.node_id {
                return Err(Error::DensityMismatch(format!(
                    "field node `{id}` where network has `{}`",
                    node.node_id
                )));
            }
        }
        Ok(())
    }
}

fn check_radius_scale(radius: f64, unit_scale: f64) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param("radius", format!("must be positive, got {radius}")));
    }
    if !(unit_scale > 0.0 && unit_scale.is_finite()) {
        return Err(Error::param("unit_scale", format!("must be positive, got {unit_scale}")));
    }
    Ok(())
}

/// Counts intersections within `radius` of every node (a node coinciding with
/// an intersection counts it) and normalizes by disk area.
pub fn density_field(
    network: &RoadNetwork,
    intersections: &IntersectionSet,
    radius: f64,
    unit_scale: f64,
) -> Result<DensityField> {
    check_radius_scale(radius, unit_scale)?;
    let index = GridIndex::new(&intersections.points, radius);
    let counts: Vec<usize> = network
        .nodes()
        .par_iter()
        .map(|n| index.count_within(n.point(), radius))
        .collect();
    let per_sq_m = 1.0 / (std::f64::consts::PI * radius * radius);
    let values = counts
        .iter()
        .map(|&c| c as f64 * per_sq_m * unit_scale)
        .collect();
    Ok(DensityField {
        radius,
        unit_scale,
        node_ids: network.nodes().iter().map(|n| n.node_id.clone()).collect(),
        counts,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{generate_grid, EdgeRecord, NodeRecord};

    #[test]
    fn grid_keeps_every_lattice_node() {
        let g = generate_grid(5, 5, 200.0, 11.176).unwrap();
        let set = derive_intersections(&g, &[RoadClass::Street], 1.0).unwrap();
        assert_eq!(set.len(), 25);
        let none = derive_intersections(&g, &[RoadClass::Highway], 1.0).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn isolated_segment_has_no_intersections() {
        let net = RoadNetwork::build(
            vec![NodeRecord::new("a", 0.0, 0.0), NodeRecord::new("b", 50.0, 0.0)],
            vec![EdgeRecord::street("e", "a", "b", None, 10.0)],
        )
        .unwrap();
        assert!(derive_intersections(&net, &[RoadClass::Street], 1.0).unwrap().is_empty());
    }

    #[test]
    fn near_endpoints_merge() {
        // b and c are 0.3 m apart and snap to the same 1 m cell.
        let net = RoadNetwork::build(
            vec![
                NodeRecord::new("a", 0.0, 0.0),
                NodeRecord::new("b", 100.1, 0.0),
                NodeRecord::new("c", 100.4, 0.0),
                NodeRecord::new("d", 200.0, 0.0),
            ],
            vec![
                EdgeRecord::street("e1", "a", "b", None, 10.0),
                EdgeRecord::street("e2", "c", "d", None, 10.0),
            ],
        )
        .unwrap();
        let set = derive_intersections(&net, &[RoadClass::Street], 1.0).unwrap();
        assert_eq!(set.points, vec![Point::new(100.0, 0.0)]);
        assert!(derive_intersections(&net, &[RoadClass::Street], 0.0).is_err());
    }

    #[test]
    fn single_intersection_density() {
        let g = generate_grid(2, 2, 10_000.0, 10.0).unwrap();
        let set = IntersectionSet {
            points: vec![Point::new(5.0, 5.0)],
            rounding_grid: 1.0,
        };
        let field = density_field(&g, &set, 800.0, 1.0).unwrap();
        let expected = 1.0 / (std::f64::consts::PI * 800.0 * 800.0);
        assert!((field.values[0] - expected).abs() <= 1e-15 * expected);
        assert!((field.values[0] - 4.974e-7).abs() < 1e-10);
        assert_eq!(field.values[3], 0.0);
    }

    #[test]
    fn lattice_disk_count_at_center() {
        let g = generate_grid(5, 5, 200.0, 10.0).unwrap();
        let set = derive_intersections(&g, &[RoadClass::Street], 1.0).unwrap();
        let field = density_field(&g, &set, 300.0, 1.0).unwrap();
        let center = g.node_index("r2c2").unwrap();
        // Enumerated: self, 4 axis neighbors at 200 m, 4 diagonals at 282.8 m.
        let enumerated = (-2i32..=2)
            .flat_map(|dr| (-2i32..=2).map(move |dc| (dr, dc)))
            .filter(|(dr, dc)| (((dr * dr + dc * dc) as f64).sqrt() * 200.0) <= 300.0)
            .count();
        assert_eq!(enumerated, 9);
        assert_eq!(field.counts[center], enumerated);
        let expected = 9.0 / (std::f64::consts::PI * 300.0 * 300.0);
        assert!((field.values[center] - expected).abs() <= 1e-15 * expected);
    }

    #[test]
    fn rejects_bad_radius() {
        let g = generate_grid(2, 2, 1.0, 1.0).unwrap();
        let set = IntersectionSet {
            points: vec![],
            rounding_grid: 1.0,
        };
        assert!(density_field(&g, &set, 0.0, HECTARE).is_err());
    }
}
