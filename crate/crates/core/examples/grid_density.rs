//! Intersection density on a street grid, at a few radii.
//!
//!     cargo run --example grid_density -- [ROWS] [SPACING_M]

use emsaccess::density::{density_field, derive_intersections, DEFAULT_ROUNDING_GRID, HECTARE};
use emsaccess::network::{generate_grid, RoadClass, DEFAULT_STREET_SPEED};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rows: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(41);
    let spacing: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(100.0);

    let network = generate_grid(rows, rows, spacing, DEFAULT_STREET_SPEED)?;
    let set = derive_intersections(&network, &[RoadClass::Street, RoadClass::Highway], DEFAULT_ROUNDING_GRID)?;
    let center = network.node_count() / 2;
    println!("{rows}x{rows} grid, {spacing} m blocks: {} intersections", set.len());
    println!("lattice density {:.3} per ha", HECTARE / (spacing * spacing));
    println!("{:>8} {:>8} {:>12}", "radius_m", "count", "density_ha");
    for radius in [200.0, 400.0, 800.0, 1200.0] {
        let field = density_field(&network, &set, radius, HECTARE)?;
        println!("{radius:>8} {:>8} {:>12.3}", field.counts[center], field.values[center]);
    }
    Ok(())
}
