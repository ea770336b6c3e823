//! Seeded synthetic inputs for examples and tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::geometry::{Point, Polygon};
use crate::network::{generate_grid, EdgeRecord, NodeRecord, RoadClass, RoadNetwork, DEFAULT_STREET_SPEED, MPH};
use crate::population::CensusTract;
use crate::travel::{FacilityKind, RawFacility};

#[derive(Debug, Clone)]
pub struct Scenario {
    pub network: RoadNetwork,
    pub facilities: Vec<RawFacility>,
    pub tracts: Vec<CensusTract>,
}

/// 5x5 street grid, 200 m blocks at 25 mph, an EMS station at one corner,
/// a hospital at the opposite corner, and four quadrant tracts.
pub fn grid_town() -> Result<Scenario> {
    let network = generate_grid(5, 5, 200.0, DEFAULT_STREET_SPEED)?;
    let facilities = vec![
        RawFacility {
            facility_id: "ems-1".into(),
            kind: FacilityKind::EmsStation,
            x: 0.0,
            y: 0.0,
        },
        RawFacility {
            facility_id: "hosp-1".into(),
            kind: FacilityKind::Hospital,
            x: 800.0,
            y: 800.0,
        },
    ];
    let quads = [
        ("sw", -50.0, -50.0, 400.0, 400.0, 1000.0),
        ("se", 400.0, -50.0, 850.0, 400.0, 2000.0),
        ("nw", -50.0, 400.0, 400.0, 850.0, 1500.0),
        ("ne", 400.0, 400.0, 850.0, 850.0, 500.0),
    ];
    let tracts = quads
        .iter()
        .map(|&(id, x0, y0, x1, y1, pop)| {
            CensusTract::new(id, Polygon::rect(Point::new(x0, y0), Point::new(x1, y1)), pop, None)
        })
        .collect::<Result<_>>()?;
    Ok(Scenario {
        network,
        facilities,
        tracts,
    })
}

/// Parameters of [`synthetic_city`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CityParams {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
    /// Node jitter as a fraction of `spacing`.
    pub jitter: f64,
    /// Probability that a street segment is missing.
    pub drop_rate: f64,
    /// Every `arterial_every`-th row and column is a 40 mph highway.
    pub arterial_every: usize,
    pub ems_stations: usize,
    pub hospitals: usize,
    pub tract_rows: usize,
    pub tract_cols: usize,
}

impl Default for CityParams {
    fn default() -> Self {
        CityParams {
            rows: 45,
            cols: 45,
            spacing: 100.0,
            jitter: 0.2,
            drop_rate: 0.08,
            arterial_every: 9,
            ems_stations: 14,
            hospitals: 6,
            tract_rows: 5,
            tract_cols: 10,
        }
    }
}

/// Seeded city: a jittered street lattice (2,025 nodes by default) with
/// missing segments and a few faster arterials, 20 facilities and 50
/// rectangular tracts with varied population, all inside the node hull.
pub fn synthetic_city(seed: u64) -> Result<Scenario> {
    synthetic_city_with(seed, CityParams::default())
}

pub fn synthetic_city_with(seed: u64, p: CityParams) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = |r: usize, c: usize| format!("c{r}_{c}");
    let mut nodes = Vec::with_capacity(p.rows * p.cols);
    for r in 0..p.rows {
        for c in 0..p.cols {
            let jx = rng.gen_range(-p.jitter..=p.jitter) * p.spacing;
            let jy = rng.gen_range(-p.jitter..=p.jitter) * p.spacing;
            nodes.push(NodeRecord::new(id(r, c), c as f64 * p.spacing + jx, r as f64 * p.spacing + jy));
        }
    }
    let mut edges = Vec::new();
    for r in 0..p.rows {
        for c in 0..p.cols {
            let mut link = |r2: usize, c2: usize, arterial: bool, rng: &mut ChaCha8Rng| {
                if !arterial && rng.gen_bool(p.drop_rate) {
                    return;
                }
                let mut e = EdgeRecord::street(format!("s{}", edges.len()), id(r, c), id(r2, c2), None, DEFAULT_STREET_SPEED);
                if arterial {
                    e.road_class = RoadClass::Highway;
                    e.speed_limit = 40.0 * MPH;
                }
                edges.push(e);
            };
            if c + 1 < p.cols {
                link(r, c + 1, r % p.arterial_every == 0, &mut rng);
            }
            if r + 1 < p.rows {
                link(r + 1, c, c % p.arterial_every == 0, &mut rng);
            }
        }
    }
    let network = RoadNetwork::build(nodes, edges)?;

    let width = (p.cols - 1) as f64 * p.spacing;
    let height = (p.rows - 1) as f64 * p.spacing;
    let mut facilities = Vec::with_capacity(p.ems_stations + p.hospitals);
    for k in 0..p.ems_stations + p.hospitals {
        let (kind, label) = if k < p.ems_stations {
            (FacilityKind::EmsStation, "ems")
        } else {
            (FacilityKind::Hospital, "hosp")
        };
        facilities.push(RawFacility {
            facility_id: format!("{label}-{k}"),
            kind,
            x: rng.gen_range(0.0..width),
            y: rng.gen_range(0.0..height),
        });
    }

    // Tracts tile a frame inset from the outermost lattice line, so they stay
    // inside the buffered node hull despite jitter.
    let inset = p.jitter * p.spacing;
    let (x0, y0) = (inset, inset);
    let (tw, th) = (
        (width - 2.0 * inset) / p.tract_cols as f64,
        (height - 2.0 * inset) / p.tract_rows as f64,
    );
    let mut tracts = Vec::with_capacity(p.tract_rows * p.tract_cols);
    for tr in 0..p.tract_rows {
        for tc in 0..p.tract_cols {
            let min = Point::new(x0 + tc as f64 * tw, y0 + tr as f64 * th);
            let max = Point::new(min.x + tw, min.y + th);
            let population = rng.gen_range(500.0..8000.0_f64).round();
            tracts.push(CensusTract::new(
                format!("t{tr}_{tc}"),
                Polygon::rect(min, max),
                population,
                None,
            )?);
        }
    }
    Ok(Scenario {
        network,
        facilities,
        tracts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn city_shape() {
        let city = synthetic_city(1).unwrap();
        assert_eq!(city.network.node_count(), 2025);
        assert_eq!(city.facilities.len(), 20);
        assert_eq!(city.tracts.len(), 50);
        let again = synthetic_city(1).unwrap();
        assert_eq!(city.network.to_records(), again.network.to_records());
    }

    #[test]
    fn grid_town_shape() {
        let town = grid_town().unwrap();
        assert_eq!(town.network.node_count(), 25);
        let total: f64 = town.tracts.iter().map(|t| t.population).sum();
        assert_eq!(total, 5000.0);
    }
}
