//! Population coverage against the time threshold on the synthetic city,
//! for each facility category.
//!
//!     cargo run --release --example coverage_curve -- [SEED]

use emsaccess::accessibility::HOSPITAL_TAU;
use emsaccess::config::RunConfig;
use emsaccess::fixtures::synthetic_city;
use emsaccess::pipeline::analyze;
use emsaccess::travel::Category;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(7);
    let city = synthetic_city(seed)?;
    let mut curves = Vec::new();
    for category in Category::ALL {
        let config = RunConfig {
            category,
            ..RunConfig::default()
        };
        let a = analyze(&city.network, &city.facilities, &city.tracts, None, &config, false)?;
        curves.push((category, a.curve));
    }
    print!("{:>6}", "tau_s");
    for (c, _) in &curves {
        print!(" {:>12}", c.to_string());
    }
    println!();
    for tau in (0..=600).step_by(60).map(f64::from).chain([HOSPITAL_TAU]) {
        print!("{tau:>6}");
        for (_, curve) in &curves {
            print!(" {:>12.3}", curve.fraction_at(tau).unwrap_or(f64::NAN));
        }
        println!();
    }
    Ok(())
}
