//! Observed trip durations from the bundled trip log against a simulated
//! travel-time field on the synthetic city.
//!
//!     cargo run --example calibrate_ratios

use emsaccess::calibration::{percentile_summary, ratio_table, trip_durations, Statistic};
use emsaccess::config::RunConfig;
use emsaccess::fixtures::synthetic_city;
use emsaccess::io::tables;
use emsaccess::pipeline::analyze;

const TRIPS: &str = include_str!("../data/grid5/trips.csv");

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trips = tables::parse_trips(TRIPS, "trips.csv")?;
    let actual = percentile_summary(&trip_durations(&trips.records)?, &Statistic::STANDARD)?;

    let city = synthetic_city(7)?;
    let a = analyze(&city.network, &city.facilities, &city.tracts, None, &RunConfig::default(), false)?;
    let simulated: Vec<f64> = a.field.reachable_times().collect();
    let simulated = percentile_summary(&simulated, &Statistic::STANDARD)?;

    let table = ratio_table(&actual, &simulated)?;
    println!("{} trips", trips.records.len());
    println!("{:>6} {:>10} {:>10} {:>7}", "stat", "actual_min", "sim_min", "ratio");
    for r in &table.rows {
        println!(
            "{:>6} {:>10.2} {:>10.2} {:>7.3}",
            r.statistic.to_string(),
            r.actual / 60.0,
            r.simulated / 60.0,
            r.ratio
        );
    }
    Ok(())
}
