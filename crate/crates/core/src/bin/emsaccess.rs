//! `emsaccess` command-line front end. Every subcommand reads and writes the
//! same files the full pipeline produces, so stages can be rerun in isolation.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use emsaccess::accessibility::{coverage_curve, scenario_alpha_scale, vulnerability_report, ScenarioInputs};
use emsaccess::calibration::{percentile_summary, ratio_table, trip_durations, Statistic};
use emsaccess::config::RunConfig;
use emsaccess::density::{density_field, derive_intersections};
use emsaccess::geometry::Bbox;
use emsaccess::geometry::Point;
use emsaccess::io::{self, features, tables};
use emsaccess::network::{generate_grid, generate_random_planar, RoadNetwork, MPH};
use emsaccess::pipeline::{run_pipeline, PipelineInputs};
use emsaccess::population::{assign_population, default_boundary, voronoi_partition, PopulationWeights};
use emsaccess::travel::{edge_times, snap_facilities, travel_time_field, Category, TravelTimeField};
use emsaccess::{Error, Result};

#[derive(Parser)]
#[command(name = "emsaccess", version, about = "Emergency vehicle accessibility on road networks")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// TOML run configuration; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Parameter overrides shared by the model subcommands.
#[derive(Args, Default)]
struct Overrides {
    /// Intersection delay factor, seconds per intersection per unit_scale area.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Density radius, meters.
    #[arg(long)]
    radius: Option<f64>,
    /// Density area unit, square meters.
    #[arg(long)]
    unit_scale: Option<f64>,
    /// Accessibility threshold, minutes.
    #[arg(long = "tau-min", allow_hyphen_values = true)]
    tau_min: Option<f64>,
    /// ems_station, hospital or overall.
    #[arg(long)]
    category: Option<Category>,
    #[arg(long)]
    max_snap: Option<f64>,
    #[arg(long)]
    rounding_grid: Option<f64>,
    #[arg(long)]
    min_cluster_population: Option<f64>,
    #[arg(long)]
    alpha_scale: Option<f64>,
    /// Search from nodes toward facilities instead of outward.
    #[arg(long)]
    toward_facility: bool,
    /// Treat oneway edges as two-way.
    #[arg(long)]
    ignore_oneway: bool,
    /// Print a human-readable summary table to stdout.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct NetworkPaths {
    #[arg(long)]
    nodes: PathBuf,
    #[arg(long)]
    edges: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a rectangular street grid, or a random planar network with --random.
    Grid {
        #[arg(long, default_value_t = 5)]
        rows: usize,
        #[arg(long, default_value_t = 5)]
        cols: usize,
        /// Block length, meters.
        #[arg(long, default_value_t = 200.0)]
        spacing: f64,
        #[arg(long, default_value_t = 25.0)]
        speed_mph: f64,
        /// Node count of a seeded random planar network.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Side of the square region for --random, meters.
        #[arg(long, default_value_t = 2000.0)]
        extent: f64,
        /// Output directory for nodes.csv and edges.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Intersection density per node.
    Density {
        #[command(flatten)]
        net: NetworkPaths,
        #[arg(long)]
        out: PathBuf,
        /// Also write the derived intersections as GeoJSON.
        #[arg(long)]
        intersections: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
    /// Travel-time field from the nearest facility of a category.
    TravelTime {
        #[command(flatten)]
        net: NetworkPaths,
        #[arg(long)]
        density: PathBuf,
        #[arg(long)]
        facilities: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        edge_times: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
    /// Node population weights from census tracts via Voronoi cells.
    Population {
        #[command(flatten)]
        net: NetworkPaths,
        #[arg(long)]
        tracts: PathBuf,
        #[arg(long)]
        boundary: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Population coverage as a function of the time threshold.
    Coverage {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Connected regions beyond the threshold, filtered by population.
    Vulnerable {
        #[command(flatten)]
        net: NetworkPaths,
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Observed trip percentiles and their ratio to simulated ones.
    Calibrate {
        /// Trip records: dispatch_ts,arrival_ts[,severity].
        #[arg(long)]
        trips: PathBuf,
        /// Simulated summary CSV (statistic,value in seconds).
        #[arg(long, conflicts_with = "field", required_unless_present = "field")]
        simulated: Option<PathBuf>,
        /// Or a field CSV whose reachable node times are summarized.
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also write the observed summary.
        #[arg(long)]
        actual_summary: Option<PathBuf>,
        #[arg(long)]
        summary: bool,
    },
    /// Coverage before and after scaling alpha.
    Scenario {
        #[command(flatten)]
        net: NetworkPaths,
        #[arg(long)]
        density: PathBuf,
        #[arg(long)]
        facilities: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Every stage end to end, writing all artifacts and a manifest.
    Pipeline {
        #[command(flatten)]
        net: NetworkPaths,
        #[arg(long)]
        facilities: PathBuf,
        #[arg(long)]
        tracts: PathBuf,
        #[arg(long)]
        boundary: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Also run the alpha-scaling scenario.
        #[arg(long)]
        scenario: bool,
        #[command(flatten)]
        o: Overrides,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn label(p: &Path) -> String {
    p.display().to_string()
}

fn load_network(net: &NetworkPaths) -> Result<RoadNetwork> {
    let nodes = tables::parse_nodes(&io::read_text(&net.nodes)?, &label(&net.nodes))?;
    let edges = tables::parse_edges(&io::read_text(&net.edges)?, &label(&net.edges))?;
    RoadNetwork::build(nodes, edges)
}

fn base_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::from_toml(&io::read_text(p)?),
        None => Ok(RunConfig::default()),
    }
}

fn configure(base: Option<&Path>, o: &Overrides) -> Result<RunConfig> {
    let mut c = base_config(base)?;
    let set = |dst: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    set(&mut c.alpha, o.alpha);
    set(&mut c.radius, o.radius);
    set(&mut c.unit_scale, o.unit_scale);
    set(&mut c.tau, o.tau_min.map(|m| m * 60.0));
    set(&mut c.max_snap, o.max_snap);
    set(&mut c.rounding_grid, o.rounding_grid);
    set(&mut c.min_cluster_population, o.min_cluster_population);
    set(&mut c.alpha_scale, o.alpha_scale);
    if let Some(cat) = o.category {
        c.category = cat;
    }
    c.toward_facility |= o.toward_facility;
    c.respect_oneway &= !o.ignore_oneway;
    c.validate()?;
    Ok(c)
}

fn warn_all<I: IntoIterator<Item = String>>(warnings: I) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn read_field(path: &Path, category: Category) -> Result<(Vec<String>, TravelTimeField)> {
    let pairs = tables::parse_field(&io::read_text(path)?, &label(path))?;
    let (ids, times) = pairs.into_iter().unzip();
    Ok((
        ids,
        TravelTimeField {
            category,
            alpha: f64::NAN,
            times,
        },
    ))
}

/// Weights reordered to `ids`; nodes missing from the weights file carry zero.
fn read_weights_for(path: &Path, ids: &[String]) -> Result<PopulationWeights> {
    let pairs = tables::parse_weights(&io::read_text(path)?, &label(path))?;
    let by_id: HashMap<&str, f64> = pairs.iter().map(|(id, w)| (id.as_str(), *w)).collect();
    let source = label(path);
    if let Some((id, _)) = pairs.iter().find(|(id, _)| !ids.iter().any(|k| k == id)) {
        return Err(Error::Parse {
            path: source,
            record: 0,
            reason: format!("node `{id}` is not in the travel-time field"),
        });
    }
    Ok(PopulationWeights::from_weights(
        ids.iter().map(|id| by_id.get(id.as_str()).copied().unwrap_or(0.0)).collect(),
    ))
}

fn run(cli: Cli) -> Result<()> {
    let cfg_path = cli.config.as_deref();
    match cli.command {
        Command::Grid {
            rows,
            cols,
            spacing,
            speed_mph,
            random,
            seed,
            extent,
            out,
        } => {
            let network = match random {
                Some(n) => generate_random_planar(
                    n,
                    seed,
                    Bbox {
                        min: Point::new(0.0, 0.0),
                        max: Point::new(extent, extent),
                    },
                )?,
                None => generate_grid(rows, cols, spacing, speed_mph * MPH)?,
            };
            let (nodes, edges) = network.to_records();
            io::write_text(&out.join("nodes.csv"), &tables::emit_nodes(&nodes))?;
            io::write_text(&out.join("edges.csv"), &tables::emit_edges(&edges))?;
            println!("{} nodes, {} edges -> {}", nodes.len(), edges.len(), out.display());
        }
        Command::Density {
            net,
            out,
            intersections,
            o,
        } => {
            let c = configure(cfg_path, &o)?;
            let network = load_network(&net)?;
            let set = derive_intersections(&network, &c.road_classes, c.rounding_grid)?;
            let field = density_field(&network, &set, c.radius, c.unit_scale)?;
            if let Some(p) = intersections {
                io::write_text(&p, &features::emit_intersections(&set))?;
            }
            io::write_text(&out, &tables::emit_density(&network, &field))?;
            if o.summary {
                let n = field.values.len() as f64;
                println!("intersections  {}", set.len());
                println!("mean density   {:.4}", field.values.iter().sum::<f64>() / n);
                println!("max density    {:.4}", field.values.iter().copied().fold(0.0, f64::max));
            }
        }
        Command::TravelTime {
            net,
            density,
            facilities,
            out,
            edge_times: edge_out,
            o,
        } => {
            let c = configure(cfg_path, &o)?;
            let network = load_network(&net)?;
            let field = tables::parse_density(&io::read_text(&density)?, &label(&density))?;
            field.check_matches(&network)?;
            let raw = tables::parse_facilities(&io::read_text(&facilities)?, &label(&facilities))?;
            let times = edge_times(&network, &field, c.alpha)?;
            let snapped = snap_facilities(&network, &raw, c.max_snap)?;
            warn_all(snapped.excluded.iter().map(ToString::to_string));
            let tt = travel_time_field(&network, &times, &snapped, c.category, c.field_options())?;
            if let Some(p) = edge_out {
                io::write_text(&p, &tables::emit_edge_times(&network, &times))?;
            }
            io::write_text(&out, &tables::emit_field(&network, &tt))?;
            if o.summary {
                let reach: Vec<f64> = tt.reachable_times().collect();
                println!("category     {}", c.category);
                println!("reachable    {} of {}", reach.len(), tt.times.len());
                if !reach.is_empty() {
                    print_summary(&percentile_summary(&reach, &Statistic::STANDARD)?);
                }
            }
        }
        Command::Population {
            net,
            tracts,
            boundary,
            out,
            o,
        } => {
            configure(cfg_path, &o)?;
            let network = load_network(&net)?;
            let tracts = features::parse_tracts(&io::read_text(&tracts)?, &label(&tracts))?;
            let boundary = match &boundary {
                Some(p) => features::parse_boundary(&io::read_text(p)?, &label(p))?,
                None => default_boundary(&network),
            };
            let partition = voronoi_partition(&network, &boundary)?;
            let weights = assign_population(&partition, &tracts)?;
            warn_all(
                weights
                    .unassigned
                    .iter()
                    .map(|r| format!("tract `{}`: {} persons fall outside every Voronoi cell", r.tract_id, r.persons)),
            );
            io::write_text(&out, &tables::emit_weights(&network, &weights))?;
            if o.summary {
                let census: f64 = tracts.iter().map(|t| t.population).sum();
                println!("census population   {census:.1}");
                println!("assigned population {:.1}", weights.total_assigned);
            }
        }
        Command::Coverage { field, weights, out, o } => {
            let c = configure(cfg_path, &o)?;
            let (ids, tt) = read_field(&field, c.category)?;
            let w = read_weights_for(&weights, &ids)?;
            let curve = coverage_curve(&tt, &w, &c.taus())?;
            io::write_text(&out, &tables::emit_curve(&curve))?;
            if o.summary {
                println!("{:>9}  covered", "tau_s");
                for s in &curve.samples {
                    println!("{:>9}  {:.4}", s.tau, s.covered_fraction);
                }
            }
        }
        Command::Vulnerable {
            net,
            field,
            weights,
            out,
            o,
        } => {
            let c = configure(cfg_path, &o)?;
            let network = load_network(&net)?;
            let (ids, tt) = read_field(&field, c.category)?;
            let times = tables::align_to_network(
                &network,
                &ids.iter().cloned().zip(tt.times).collect::<Vec<_>>(),
                &label(&field),
            )?;
            let tt = TravelTimeField { times, ..tt };
            let wpairs = tables::parse_weights(&io::read_text(&weights)?, &label(&weights))?;
            let w = PopulationWeights::from_weights(tables::align_to_network(&network, &wpairs, &label(&weights))?);
            let report = vulnerability_report(&network, &tt, &w, c.tau, c.min_cluster_population)?;
            io::write_text(&out, &features::emit_vulnerability(&network, &report))?;
            if o.summary {
                println!("{:>10} {:>6} {:>12} {:>10}", "cluster", "nodes", "population", "max_s");
                for cl in &report.clusters {
                    let max = cl.max_time.map_or_else(|| io::UNREACHABLE.to_string(), |t| format!("{t:.1}"));
                    println!("{:>10} {:>6} {:>12.1} {:>10}", cl.cluster_id, cl.nodes.len(), cl.population, max);
                }
                println!("underserved {:.1} of {:.1}", report.total_underserved, report.total_population);
            }
        }
        Command::Calibrate {
            trips,
            simulated,
            field,
            out,
            actual_summary,
            summary,
        } => {
            base_config(cfg_path)?;
            let parsed = tables::parse_trips(&io::read_text(&trips)?, &label(&trips))?;
            if !parsed.naive_rows.is_empty() {
                eprintln!(
                    "warning: {}: {} records have timestamps without an offset; read as UTC",
                    trips.display(),
                    parsed.naive_rows.len()
                );
            }
            let actual = percentile_summary(&trip_durations(&parsed.records)?, &Statistic::STANDARD)?;
            let sim = match (simulated, field) {
                (Some(p), _) => tables::parse_summary(&io::read_text(&p)?, &label(&p))?,
                (None, Some(p)) => {
                    let (_, tt) = read_field(&p, Category::Overall)?;
                    let reach: Vec<f64> = tt.reachable_times().collect();
                    percentile_summary(&reach, &Statistic::STANDARD)?
                }
                (None, None) => unreachable!("clap requires one of --simulated/--field"),
            };
            let table = ratio_table(&actual, &sim)?;
            if let Some(p) = actual_summary {
                io::write_text(&p, &tables::emit_summary(&actual))?;
            }
            io::write_text(&out, &tables::emit_ratio_table(&table))?;
            if summary {
                println!("{:>9} {:>10} {:>10} {:>7}", "statistic", "actual_s", "sim_s", "ratio");
                for r in &table.rows {
                    println!(
                        "{:>9} {:>10.1} {:>10.1} {:>7.3}",
                        r.statistic.to_string(),
                        r.actual,
                        r.simulated,
                        r.ratio
                    );
                }
            }
        }
        Command::Scenario {
            net,
            density,
            facilities,
            weights,
            out,
            o,
        } => {
            let c = configure(cfg_path, &o)?;
            let network = load_network(&net)?;
            let dfield = tables::parse_density(&io::read_text(&density)?, &label(&density))?;
            dfield.check_matches(&network)?;
            let raw = tables::parse_facilities(&io::read_text(&facilities)?, &label(&facilities))?;
            let snapped = snap_facilities(&network, &raw, c.max_snap)?;
            warn_all(snapped.excluded.iter().map(ToString::to_string));
            let wpairs = tables::parse_weights(&io::read_text(&weights)?, &label(&weights))?;
            let w = PopulationWeights::from_weights(tables::align_to_network(&network, &wpairs, &label(&weights))?);
            let taus = c.taus();
            let inputs = ScenarioInputs {
                network: &network,
                density: &dfield,
                facilities: &snapped,
                weights: &w,
                category: c.category,
                taus: &taus,
                options: c.field_options(),
            };
            let result = scenario_alpha_scale(c.alpha, c.alpha_scale, inputs)?;
            io::write_text(&out, &tables::emit_scenario(&result))?;
            if o.summary {
                let at = |curve: &emsaccess::accessibility::CoverageCurve| curve.fraction_at(c.tau).unwrap_or(f64::NAN);
                println!(
                    "alpha {} -> {}: covered within {} s {:.4} -> {:.4}",
                    result.base_alpha,
                    result.base_alpha * result.scale,
                    c.tau,
                    at(&result.before),
                    at(&result.after)
                );
            }
        }
        Command::Pipeline {
            net,
            facilities,
            tracts,
            boundary,
            out,
            scenario,
            o,
        } => {
            let c = configure(cfg_path, &o)?;
            let inputs = PipelineInputs {
                nodes: net.nodes,
                edges: net.edges,
                facilities,
                tracts,
                boundary,
            };
            let outcome = run_pipeline(&c, &inputs, &out, scenario)?;
            let a = &outcome.analysis;
            warn_all(a.warnings.iter().cloned());
            if o.summary {
                println!("nodes                {}", a.density.values.len());
                println!("intersections        {}", a.intersections.len());
                println!("facilities snapped   {}", a.facilities.facilities.len());
                println!("population           {:.1}", a.weights.total_assigned);
                println!(
                    "covered within {:>4} s {:.4}",
                    c.tau,
                    a.curve.fraction_at(c.tau).unwrap_or(f64::NAN)
                );
                println!("vulnerable clusters  {}", a.report.clusters.len());
                println!("underserved          {:.1}", a.report.total_underserved);
                if let Some(s) = &a.scenario {
                    println!(
                        "with alpha x {}       {:.4}",
                        s.scale,
                        s.after.fraction_at(c.tau).unwrap_or(f64::NAN)
                    );
                }
                println!("manifest             {}", outcome.manifest.display());
            }
        }
    }
    Ok(())
}

fn print_summary(rows: &[emsaccess::calibration::SummaryRow]) {
    for r in rows {
        println!("{:>9} {:>10.1}", r.statistic.to_string(), r.value);
    }
}
