//! Full model on a seeded 2,025-node synthetic city, optionally writing
//! the artifacts to a directory.
//!
//!     cargo run --release --example synthetic_city_pipeline -- [SEED] [OUT_DIR]

use std::path::PathBuf;
use std::time::Instant;

use emsaccess::config::RunConfig;
use emsaccess::fixtures::synthetic_city;
use emsaccess::io::{features, tables};
use emsaccess::pipeline::{analyze, run_pipeline, PipelineInputs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let out: Option<PathBuf> = args.next().map(PathBuf::from);

    let city = synthetic_city(seed)?;
    let config = RunConfig::default();
    let start = Instant::now();
    let a = analyze(&city.network, &city.facilities, &city.tracts, None, &config, true)?;
    println!(
        "{} nodes, {} edges, {} intersections, {} facilities snapped in {:.2?}",
        city.network.node_count(),
        city.network.edge_count(),
        a.intersections.len(),
        a.facilities.facilities.len(),
        start.elapsed()
    );
    let mean_density = a.density.values.iter().sum::<f64>() / a.density.values.len() as f64;
    println!("mean intersection density {mean_density:.2} per ha");
    println!("population {:.0}", a.weights.total_assigned);
    for tau in [120.0, 180.0, 240.0, 300.0, 420.0] {
        println!("  covered within {tau:>3} s: {:.3}", a.curve.fraction_at(tau).unwrap_or(f64::NAN));
    }
    println!(
        "{} vulnerable clusters at {} s, {:.0} people underserved",
        a.report.clusters.len(),
        config.tau,
        a.report.total_underserved
    );
    if let Some(s) = &a.scenario {
        let at = |c: &emsaccess::accessibility::CoverageCurve| c.fraction_at(config.tau).unwrap_or(f64::NAN);
        println!(
            "alpha {} -> {}: coverage at {} s {:.3} -> {:.3}",
            s.base_alpha,
            s.base_alpha * s.scale,
            config.tau,
            at(&s.before),
            at(&s.after)
        );
    }

    if let Some(dir) = out {
        let inputs_dir = dir.join("inputs");
        let (nodes, edges) = city.network.to_records();
        let inputs = PipelineInputs {
            nodes: inputs_dir.join("nodes.csv"),
            edges: inputs_dir.join("edges.csv"),
            facilities: inputs_dir.join("facilities.csv"),
            tracts: inputs_dir.join("tracts.geojson"),
            boundary: None,
        };
        emsaccess::io::write_text(&inputs.nodes, &tables::emit_nodes(&nodes))?;
        emsaccess::io::write_text(&inputs.edges, &tables::emit_edges(&edges))?;
        emsaccess::io::write_text(&inputs.facilities, &tables::emit_facilities(&city.facilities))?;
        emsaccess::io::write_text(&inputs.tracts, &features::emit_tracts(&city.tracts))?;
        let outcome = run_pipeline(&config, &inputs, &dir, true)?;
        println!("wrote {} artifacts and {}", outcome.artifacts.len(), outcome.manifest.display());
    }
    Ok(())
}
