//! Coverage gained when intersection delay is scaled down, as with signal
//! preemption, on the synthetic city.
//!
//!     cargo run --release --example preemption_scenario -- [SCALE] [SEED]

use emsaccess::config::RunConfig;
use emsaccess::fixtures::synthetic_city;
use emsaccess::pipeline::analyze;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let scale: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0.5);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(7);
    let city = synthetic_city(seed)?;
    let config = RunConfig {
        alpha_scale: scale,
        ..RunConfig::default()
    };
    let a = analyze(&city.network, &city.facilities, &city.tracts, None, &config, true)?;
    let s = a.scenario.expect("scenario requested");
    println!("alpha {} -> {}", s.base_alpha, s.base_alpha * s.scale);
    println!("{:>6} {:>8} {:>8} {:>8}", "tau_s", "before", "after", "gain");
    for ((b, a), d) in s.before.samples.iter().zip(&s.after.samples).zip(&s.deltas) {
        if b.tau <= 480.0 && (b.tau % 60.0 == 0.0) {
            println!("{:>6} {:>8.3} {:>8.3} {:>+8.3}", b.tau, b.covered_fraction, a.covered_fraction, d);
        }
    }
    Ok(())
}
