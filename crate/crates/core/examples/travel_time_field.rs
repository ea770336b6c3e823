//! Travel-time field from the bundled 5x5 grid's EMS station, with and
//! without intersection delay.
//!
//!     cargo run --example travel_time_field -- [ALPHA]

use emsaccess::density::{density_field, derive_intersections, DEFAULT_RADIUS, DEFAULT_ROUNDING_GRID, HECTARE};
use emsaccess::io::tables;
use emsaccess::network::{RoadClass, RoadNetwork};
use emsaccess::travel::{edge_times, snap_facilities, travel_time_field, Category, FieldOptions, DEFAULT_MAX_SNAP};

const NODES: &str = include_str!("../data/grid5/nodes.csv");
const EDGES: &str = include_str!("../data/grid5/edges.csv");
const FACILITIES: &str = include_str!("../data/grid5/facilities.csv");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let alpha: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(15.0);
    let network = RoadNetwork::build(
        tables::parse_nodes(NODES, "nodes.csv")?,
        tables::parse_edges(EDGES, "edges.csv")?,
    )?;
    let facilities = snap_facilities(&network, &tables::parse_facilities(FACILITIES, "facilities.csv")?, DEFAULT_MAX_SNAP)?;
    let set = derive_intersections(&network, &[RoadClass::Street], DEFAULT_ROUNDING_GRID)?;
    let density = density_field(&network, &set, DEFAULT_RADIUS, HECTARE)?;

    for a in [0.0, alpha] {
        let times = edge_times(&network, &density, a)?;
        let field = travel_time_field(&network, &times, &facilities, Category::EmsStation, FieldOptions::default())?;
        println!("alpha = {a} s*ha, seconds from the EMS station:");
        for r in (0..5).rev() {
            let row: Vec<String> = (0..5)
                .map(|c| match field.times[network.node_index(&format!("r{r}c{c}")).unwrap()] {
                    Some(t) => format!("{t:6.1}"),
                    None => format!("{:>6}", "-"),
                })
                .collect();
            println!("  {}", row.join(" "));
        }
    }
    Ok(())
}
