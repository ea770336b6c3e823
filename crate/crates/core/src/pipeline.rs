//! End-to-end analysis: network → intersections → density → edge times →
//! facilities → travel-time field → population → coverage → vulnerability,
//! with an optional alpha-scaling scenario.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::accessibility::{
    coverage_curve, scenario_alpha_scale, vulnerability_report, CoverageCurve, ScenarioInputs, ScenarioResult,
    VulnerabilityReport,
};
use crate::config::RunConfig;
use crate::density::{density_field, derive_intersections, DensityField, IntersectionSet};
use crate::error::Result;
use crate::geometry::Polygon;
use crate::io::{self, features, tables};
use crate::network::RoadNetwork;
use crate::population::{
    assign_population, default_boundary, voronoi_partition, CensusTract, PopulationWeights, VoronoiPartition,
    DEFAULT_BOUNDARY_BUFFER,
};
use crate::travel::{edge_times, snap_facilities, travel_time_field, EdgeTimes, FacilitySet, RawFacility, TravelTimeField};

#[derive(Debug, Clone)]
pub struct Analysis {
    pub intersections: IntersectionSet,
    pub density: DensityField,
    pub edge_times: EdgeTimes,
    pub facilities: FacilitySet,
    pub field: TravelTimeField,
    pub partition: VoronoiPartition,
    pub weights: PopulationWeights,
    pub curve: CoverageCurve,
    pub report: VulnerabilityReport,
    pub scenario: Option<ScenarioResult>,
    pub boundary_supplied: bool,
    /// Human-readable warnings, each listed once.
    pub warnings: Vec<String>,
}

/// Runs the whole model in memory. Without a `boundary`, the node hull
/// buffered by [`DEFAULT_BOUNDARY_BUFFER`] closes the Voronoi cells.
pub fn analyze(
    network: &RoadNetwork,
    raw_facilities: &[RawFacility],
    tracts: &[CensusTract],
    boundary: Option<&Polygon>,
    config: &RunConfig,
    with_scenario: bool,
) -> Result<Analysis> {
    config.validate()?;
    let mut warnings = Vec::new();

    let intersections = derive_intersections(network, &config.road_classes, config.rounding_grid)?;
    let density = density_field(network, &intersections, config.radius, config.unit_scale)?;
    let times = edge_times(network, &density, config.alpha)?;
    let facilities = snap_facilities(network, raw_facilities, config.max_snap)?;
    warnings.extend(facilities.excluded.iter().map(ToString::to_string));
    let field = travel_time_field(network, &times, &facilities, config.category, config.field_options())?;

    let boundary_supplied = boundary.is_some();
    let boundary = match boundary {
        Some(b) => b.clone(),
        None => {
            warnings.push(format!(
                "no study area supplied; Voronoi cells closed by the node hull buffered by {DEFAULT_BOUNDARY_BUFFER} m"
            ));
            default_boundary(network)
        }
    };
    let partition = voronoi_partition(network, &boundary)?;
    let weights = assign_population(&partition, tracts)?;
    warnings.extend(
        weights
            .unassigned
            .iter()
            .map(|r| format!("tract `{}`: {} persons fall outside every Voronoi cell", r.tract_id, r.persons)),
    );

    let taus = config.taus();
    let curve = coverage_curve(&field, &weights, &taus)?;
    let report = vulnerability_report(network, &field, &weights, config.tau, config.min_cluster_population)?;
    let scenario = if with_scenario {
        let inputs = ScenarioInputs {
            network,
            density: &density,
            facilities: &facilities,
            weights: &weights,
            category: config.category,
            taus: &taus,
            options: config.field_options(),
        };
        Some(scenario_alpha_scale(config.alpha, config.alpha_scale, inputs)?)
    } else {
        None
    };

    let mut unique = Vec::with_capacity(warnings.len());
    for w in warnings {
        if !unique.contains(&w) {
            unique.push(w);
        }
    }
    Ok(Analysis {
        intersections,
        density,
        edge_times: times,
        facilities,
        field,
        partition,
        weights,
        curve,
        report,
        scenario,
        boundary_supplied,
        warnings: unique,
    })
}

#[derive(Debug, Clone)]
pub struct PipelineInputs {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub facilities: PathBuf,
    pub tracts: PathBuf,
    pub boundary: Option<PathBuf>,
}

/// Artifact names written by [`run_pipeline`], in write order.
pub const ARTIFACTS: [&str; 7] = [
    "intersections.geojson",
    "density.csv",
    "edge_times.csv",
    "field.csv",
    "weights.csv",
    "coverage.csv",
    "vulnerable.geojson",
];

pub const SCENARIO_ARTIFACT: &str = "scenario.csv";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct PipelineOutcome {
    pub analysis: Analysis,
    pub artifacts: Vec<PathBuf>,
    pub manifest: PathBuf,
}

fn read_input(path: &Path, role: &str, digests: &mut Vec<serde_json::Value>) -> Result<String> {
    let text = io::read_text(path)?;
    digests.push(json!({
        "role": role,
        "path": path.display().to_string(),
        "sha256": io::sha256_hex(text.as_bytes()),
    }));
    Ok(text)
}

/// Parses inputs, runs [`analyze`], and writes every artifact plus
/// `manifest.json` into `out_dir`.
pub fn run_pipeline(
    config: &RunConfig,
    inputs: &PipelineInputs,
    out_dir: &Path,
    with_scenario: bool,
) -> Result<PipelineOutcome> {
    config.validate()?;
    let mut input_digests = Vec::new();
    let label = |p: &Path| p.display().to_string();

    let nodes = tables::parse_nodes(&read_input(&inputs.nodes, "nodes", &mut input_digests)?, &label(&inputs.nodes))?;
    let edges = tables::parse_edges(&read_input(&inputs.edges, "edges", &mut input_digests)?, &label(&inputs.edges))?;
    let raw_facilities = tables::parse_facilities(
        &read_input(&inputs.facilities, "facilities", &mut input_digests)?,
        &label(&inputs.facilities),
    )?;
    let tracts =
        features::parse_tracts(&read_input(&inputs.tracts, "tracts", &mut input_digests)?, &label(&inputs.tracts))?;
    let boundary = match &inputs.boundary {
        Some(p) => Some(features::parse_boundary(&read_input(p, "boundary", &mut input_digests)?, &label(p))?),
        None => None,
    };

    let network = RoadNetwork::build(nodes, edges)?;
    let analysis = analyze(&network, &raw_facilities, &tracts, boundary.as_ref(), config, with_scenario)?;

    let mut outputs: Vec<(&str, String)> = vec![
        (ARTIFACTS[0], features::emit_intersections(&analysis.intersections)),
        (ARTIFACTS[1], tables::emit_density(&network, &analysis.density)),
        (ARTIFACTS[2], tables::emit_edge_times(&network, &analysis.edge_times)),
        (ARTIFACTS[3], tables::emit_field(&network, &analysis.field)),
        (ARTIFACTS[4], tables::emit_weights(&network, &analysis.weights)),
        (ARTIFACTS[5], tables::emit_curve(&analysis.curve)),
        (ARTIFACTS[6], features::emit_vulnerability(&network, &analysis.report)),
    ];
    if let Some(s) = &analysis.scenario {
        outputs.push((SCENARIO_ARTIFACT, tables::emit_scenario(s)));
    }

    let mut artifacts = Vec::with_capacity(outputs.len());
    let mut digests = Vec::with_capacity(outputs.len());
    for (name, text) in &outputs {
        let path = out_dir.join(name);
        io::write_text(&path, text)?;
        digests.push(FileDigest {
            name: name.to_string(),
            sha256: io::sha256_hex(text.as_bytes()),
        });
        artifacts.push(path);
    }

    let manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "generated_at": chrono::Utc::now().to_rfc3339(),
        "config": config,
        "projection": config.projection,
        "boundary": if analysis.boundary_supplied { "supplied" } else { "buffered_node_hull" },
        "inputs": input_digests,
        "artifacts": digests,
        "warnings": analysis.warnings,
        "summary": {
            "nodes": network.node_count(),
            "edges": network.edge_count(),
            "intersections": analysis.intersections.len(),
            "facilities_snapped": analysis.facilities.facilities.len(),
            "facilities_excluded": analysis.facilities.excluded.len(),
            "total_population": analysis.weights.total_assigned,
            "tau_seconds": config.tau,
            "coverage_at_tau": analysis.curve.fraction_at(config.tau),
            "vulnerable_clusters": analysis.report.clusters.len(),
            "underserved_population": analysis.report.total_underserved,
        },
    });
    let manifest_path = out_dir.join(MANIFEST);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    io::write_text(&manifest_path, &text)?;

    Ok(PipelineOutcome {
        analysis,
        artifacts,
        manifest: manifest_path,
    })
}
