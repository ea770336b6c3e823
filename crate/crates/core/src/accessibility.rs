//! Threshold accessibility, population coverage curves, vulnerable clusters
//! and the alpha-scaling what-if scenario.

use serde::Serialize;

use crate::density::DensityField;
use crate::error::{Error, Result};
use crate::network::RoadNetwork;
use crate::population::PopulationWeights;
use crate::travel::{edge_times, travel_time_field, Category, FacilitySet, FieldOptions, TravelTimeField};

/// Response-time benchmark for EMS stations, seconds (4 minutes).
pub const DEFAULT_TAU: f64 = 240.0;

/// Benchmark preset for hospital access, seconds (5.5 minutes).
pub const HOSPITAL_TAU: f64 = 330.0;

pub const DEFAULT_MIN_CLUSTER_POPULATION: f64 = 100.0;

/// Alpha multiplier modelling citywide signal preemption.
pub const DEFAULT_ALPHA_SCALE: f64 = 0.5;

/// Thresholds 0, 15, ..., 900 seconds.
pub fn default_taus() -> Vec<f64> {
    (0..=60).map(|k| k as f64 * 15.0).collect()
}

/// True iff `time` is reachable and at most `tau`.
pub fn is_accessible(time: Option<f64>, tau: f64) -> bool {
    matches!(time, Some(t) if t <= tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoverageSample {
    pub tau: f64,
    pub covered_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageCurve {
    pub category: Category,
    pub alpha: f64,
    pub samples: Vec<CoverageSample>,
    pub total_population: f64,
}

impl CoverageCurve {
    pub fn fraction_at(&self, tau: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| s.tau == tau)
            .map(|s| s.covered_fraction)
    }
}

fn check_taus(taus: &[f64]) -> Result<()> {
    if let Some(t) = taus.iter().find(|t| !(**t >= 0.0 && t.is_finite())) {
        return Err(Error::param("tau", format!("must be finite and >= 0, got {t}")));
    }
    if taus.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::param("taus", "must be sorted ascending"));
    }
    Ok(())
}

fn check_lengths(field: &TravelTimeField, weights: &PopulationWeights) -> Result<()> {
    if field.times.len() != weights.weights.len() {
        return Err(Error::param(
            "weights",
            format!("{} weights for {} field nodes", weights.weights.len(), field.times.len()),
        ));
    }
    Ok(())
}

/// Population accessible within `tau`, summed in node order.
pub fn accessible_population(field: &TravelTimeField, weights: &PopulationWeights, tau: f64) -> f64 {
    field
        .times
        .iter()
        .zip(&weights.weights)
        .filter(|(t, _)| is_accessible(**t, tau))
        .fold(0.0, |acc, (_, w)| acc + w)
}

pub fn coverage_curve(field: &TravelTimeField, weights: &PopulationWeights, taus: &[f64]) -> Result<CoverageCurve> {
    check_taus(taus)?;
    check_lengths(field, weights)?;
    let total = weights.total_assigned;
    if !(total > 0.0) {
        return Err(Error::ZeroPopulation);
    }
    let samples = taus
        .iter()
        .map(|&tau| CoverageSample {
            tau,
            covered_fraction: (accessible_population(field, weights, tau) / total).clamp(0.0, 1.0),
        })
        .collect();
    Ok(CoverageCurve {
        category: field.category,
        alpha: field.alpha,
        samples,
        total_population: total,
    })
}

/// Connected group of inaccessible nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cluster {
    pub cluster_id: usize,
    pub nodes: Vec<usize>,
    pub population: f64,
    /// Largest finite time in the cluster; `None` when every node is unreachable.
    pub max_time: Option<f64>,
    /// Mean over the cluster's reachable nodes.
    pub mean_time: Option<f64>,
    pub unreachable_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VulnerabilityReport {
    pub tau: f64,
    pub min_population: f64,
    pub clusters: Vec<Cluster>,
    pub total_underserved: f64,
    /// Population on inaccessible clusters below `min_population`.
    pub filtered_population: f64,
    pub accessible_population: f64,
    pub total_population: f64,
}

/// Components of the road graph (edges taken as undirected) restricted to
/// nodes not accessible within `tau`. Each component is sorted; components
/// are ordered by their smallest node.
pub fn inaccessible_components(network: &RoadNetwork, field: &TravelTimeField, tau: f64) -> Vec<Vec<usize>> {
    let n = network.node_count();
    let bad: Vec<bool> = field.times.iter().map(|t| !is_accessible(*t, tau)).collect();
    let nbrs = network.undirected_neighbors();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if !bad[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for &v in &nbrs[u] {
                if bad[v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components
}

pub fn vulnerability_report(
    network: &RoadNetwork,
    field: &TravelTimeField,
    weights: &PopulationWeights,
    tau: f64,
    min_population: f64,
) -> Result<VulnerabilityReport> {
    check_taus(&[tau])?;
    check_lengths(field, weights)?;
    if field.times.len() != network.node_count() {
        return Err(Error::param("field", "node count differs from the network"));
    }
    let mut clusters: Vec<Cluster> = inaccessible_components(network, field, tau)
        .into_iter()
        .map(|nodes| {
            let population = nodes.iter().map(|&v| weights.weights[v]).sum();
            let finite: Vec<f64> = nodes.iter().filter_map(|&v| field.times[v]).collect();
            Cluster {
                cluster_id: 0,
                population,
                max_time: finite.iter().copied().reduce(f64::max),
                mean_time: (!finite.is_empty()).then(|| finite.iter().sum::<f64>() / finite.len() as f64),
                unreachable_nodes: nodes.len() - finite.len(),
                nodes,
            }
        })
        .collect();
    // Components arrive ordered by smallest node, so a stable sort keeps ties deterministic.
    clusters.sort_by(|a, b| b.population.total_cmp(&a.population));
    let (kept, dropped): (Vec<Cluster>, Vec<Cluster>) =
        clusters.into_iter().partition(|c| c.population >= min_population);
    let clusters: Vec<Cluster> = kept
        .into_iter()
        .enumerate()
        .map(|(i, c)| Cluster { cluster_id: i, ..c })
        .collect();
    Ok(VulnerabilityReport {
        tau,
        min_population,
        total_underserved: clusters.iter().fold(0.0, |acc, c| acc + c.population),
        filtered_population: dropped.iter().fold(0.0, |acc, c| acc + c.population),
        accessible_population: accessible_population(field, weights, tau),
        total_population: weights.total_assigned,
        clusters,
    })
}

/// Shared inputs for recomputing coverage at different alpha values.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioInputs<'a> {
    pub network: &'a RoadNetwork,
    pub density: &'a DensityField,
    pub facilities: &'a FacilitySet,
    pub weights: &'a PopulationWeights,
    pub category: Category,
    pub taus: &'a [f64],
    pub options: FieldOptions,
}

impl ScenarioInputs<'_> {
    pub fn field(&self, alpha: f64) -> Result<TravelTimeField> {
        let times = edge_times(self.network, self.density, alpha)?;
        travel_time_field(self.network, &times, self.facilities, self.category, self.options)
    }

    pub fn curve(&self, alpha: f64) -> Result<CoverageCurve> {
        coverage_curve(&self.field(alpha)?, self.weights, self.taus)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub base_alpha: f64,
    pub scale: f64,
    pub before: CoverageCurve,
    pub after: CoverageCurve,
    /// `after - before` per sampled tau.
    pub deltas: Vec<f64>,
}

/// Coverage at `base_alpha` versus `base_alpha * scale`.
pub fn scenario_alpha_scale(base_alpha: f64, scale: f64, inputs: ScenarioInputs<'_>) -> Result<ScenarioResult> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(Error::param("alpha_scale", format!("must be in (0, 1], got {scale}")));
    }
    let (before, after) = rayon::join(|| inputs.curve(base_alpha), || inputs.curve(base_alpha * scale));
    let (before, after) = (before?, after?);
    let deltas = before
        .samples
        .iter()
        .zip(&after.samples)
        .map(|(b, a)| a.covered_fraction - b.covered_fraction)
        .collect();
    Ok(ScenarioResult {
        base_alpha,
        scale,
        before,
        after,
        deltas,
    })
}
