//! Census tracts spread over node Voronoi cells on the bundled 5x5 grid.
//!
//!     cargo run --example voronoi_population

use emsaccess::io::{features, tables};
use emsaccess::network::RoadNetwork;
use emsaccess::population::{assign_population, default_boundary, voronoi_partition};

const NODES: &str = include_str!("../data/grid5/nodes.csv");
const EDGES: &str = include_str!("../data/grid5/edges.csv");
const TRACTS: &str = include_str!("../data/grid5/tracts.geojson");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let network = RoadNetwork::build(
        tables::parse_nodes(NODES, "nodes.csv")?,
        tables::parse_edges(EDGES, "edges.csv")?,
    )?;
    let tracts = features::parse_tracts(TRACTS, "tracts.geojson")?;
    let boundary = default_boundary(&network);
    let partition = voronoi_partition(&network, &boundary)?;
    let weights = assign_population(&partition, &tracts)?;

    println!(
        "boundary {:.0} m2, cells {:.0} m2",
        partition.boundary_area(),
        partition.total_cell_area()
    );
    for t in &tracts {
        println!("tract {:>3}: {:>6} people, {:.2} per ha", t.tract_id, t.population, t.effective_density() * 1e4);
    }
    println!("people per node:");
    for r in (0..5).rev() {
        let row: Vec<String> = (0..5).map(|c| format!("{:7.1}", weights.weights[r * 5 + c])).collect();
        println!("  {}", row.join(" "));
    }
    let census: f64 = tracts.iter().map(|t| t.population).sum();
    println!("assigned {:.3} of {census}", weights.total_assigned);
    Ok(())
}
