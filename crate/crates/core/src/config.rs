//! Run configuration: model parameters with their defaults and range checks.

use serde::{Deserialize, Serialize};

use crate::accessibility::{DEFAULT_ALPHA_SCALE, DEFAULT_MIN_CLUSTER_POPULATION, DEFAULT_TAU};
use crate::density::{DEFAULT_RADIUS, DEFAULT_ROUNDING_GRID, HECTARE};
use crate::error::{Error, Result};
use crate::network::RoadClass;
use crate::travel::{Category, FieldOptions, DEFAULT_MAX_SNAP};

/// Intersection delay factor used when none is given, seconds per
/// intersection-per-`unit_scale`.
pub const DEFAULT_ALPHA: f64 = 15.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seconds times `unit_scale` square meters per intersection.
    pub alpha: f64,
    /// Density radius, meters.
    pub radius: f64,
    /// Area unit for density, square meters (1e4 = hectare).
    pub unit_scale: f64,
    /// Accessibility threshold, seconds.
    pub tau: f64,
    pub category: Category,
    pub rounding_grid: f64,
    pub max_snap: f64,
    pub min_cluster_population: f64,
    pub alpha_scale: f64,
    pub seed: u64,
    pub road_classes: Vec<RoadClass>,
    pub respect_oneway: bool,
    pub toward_facility: bool,
    /// Coverage curve sampling step and upper end, seconds.
    pub tau_step: f64,
    pub tau_max: f64,
    /// Declared projection of all inputs; recorded, never interpreted.
    pub projection: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            alpha: DEFAULT_ALPHA,
            radius: DEFAULT_RADIUS,
            unit_scale: HECTARE,
            tau: DEFAULT_TAU,
            category: Category::Overall,
            rounding_grid: DEFAULT_ROUNDING_GRID,
            max_snap: DEFAULT_MAX_SNAP,
            min_cluster_population: DEFAULT_MIN_CLUSTER_POPULATION,
            alpha_scale: DEFAULT_ALPHA_SCALE,
            seed: 0,
            road_classes: vec![RoadClass::Street, RoadClass::Highway],
            respect_oneway: true,
            toward_facility: false,
            tau_step: 15.0,
            tau_max: 900.0,
            projection: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, v: f64, rule: &str| Err(Error::Config(format!("{name} = {v}: {rule}")));
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_nonneg(self.alpha) {
            return bad("alpha", self.alpha, "must be finite and >= 0");
        }
        if !finite_pos(self.radius) {
            return bad("radius", self.radius, "must be > 0");
        }
        if !finite_pos(self.unit_scale) {
            return bad("unit_scale", self.unit_scale, "must be > 0");
        }
        if !finite_nonneg(self.tau) {
            return bad("tau", self.tau, "must be finite and >= 0");
        }
        if !finite_pos(self.rounding_grid) {
            return bad("rounding_grid", self.rounding_grid, "must be > 0");
        }
        if !finite_nonneg(self.max_snap) {
            return bad("max_snap", self.max_snap, "must be >= 0");
        }
        if !finite_nonneg(self.min_cluster_population) {
            return bad("min_cluster_population", self.min_cluster_population, "must be >= 0");
        }
        if !(self.alpha_scale > 0.0 && self.alpha_scale <= 1.0) {
            return bad("alpha_scale", self.alpha_scale, "must be in (0, 1]");
        }
        if !finite_pos(self.tau_step) {
            return bad("tau_step", self.tau_step, "must be > 0");
        }
        if !finite_nonneg(self.tau_max) {
            return bad("tau_max", self.tau_max, "must be >= 0");
        }
        if self.road_classes.is_empty() {
            return Err(Error::Config("road_classes must not be empty".into()));
        }
        Ok(())
    }

    /// `0, step, 2 step, ...` up to `tau_max`, plus `tau` itself.
    pub fn taus(&self) -> Vec<f64> {
        let steps = (self.tau_max / self.tau_step + 1e-9).floor() as usize;
        let mut taus: Vec<f64> = (0..=steps).map(|k| k as f64 * self.tau_step).collect();
        if !taus.contains(&self.tau) {
            taus.push(self.tau);
            taus.sort_by(f64::total_cmp);
        }
        taus
    }

    pub fn field_options(&self) -> FieldOptions {
        FieldOptions {
            respect_oneway: self.respect_oneway,
            toward_facility: self.toward_facility,
        }
    }
}
