//! Underserved clusters on the synthetic city at several thresholds.
//!
//!     cargo run --release --example vulnerable_regions -- [SEED]

use emsaccess::accessibility::vulnerability_report;
use emsaccess::config::RunConfig;
use emsaccess::fixtures::synthetic_city;
use emsaccess::pipeline::analyze;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let city = synthetic_city(seed)?;
    let config = RunConfig::default();
    let a = analyze(&city.network, &city.facilities, &city.tracts, None, &config, false)?;

    for tau in [180.0, 240.0, 300.0] {
        let r = vulnerability_report(&city.network, &a.field, &a.weights, tau, config.min_cluster_population)?;
        println!(
            "tau {tau} s: {} clusters, {:.0} underserved, {:.0} in clusters under {} people",
            r.clusters.len(),
            r.total_underserved,
            r.filtered_population,
            config.min_cluster_population
        );
        for c in r.clusters.iter().take(5) {
            println!(
                "  {:>4}: {:>4} nodes {:>8.0} people, worst {:.0} s",
                c.cluster_id,
                c.nodes.len(),
                c.population,
                c.max_time.unwrap_or(f64::INFINITY)
            );
        }
    }
    Ok(())
}
