use emsaccess::accessibility::{
    default_taus, inaccessible_components, is_accessible, scenario_alpha_scale, vulnerability_report, ScenarioInputs,
};
use emsaccess::config::RunConfig;
use emsaccess::density::{density_field, derive_intersections, HECTARE};
use emsaccess::fixtures::grid_town;
use emsaccess::network::RoadClass;
use emsaccess::pipeline::analyze;
use emsaccess::population::PopulationWeights;
use emsaccess::travel::{edge_times, snap_facilities, travel_time_field, Category, FieldOptions};
use proptest::prelude::*;
use rand::Rng;

mod common;

proptest! {
    #[test]
    fn clusters_partition_the_inaccessible_nodes(seed in 0u64..400, tau in 0.0f64..400.0, min_pop in 0.0f64..300.0) {
        let (net, raw) = common::random_case(seed, 50);
        let set = derive_intersections(&net, &[RoadClass::Street], 1.0).unwrap();
        let dens = density_field(&net, &set, 800.0, HECTARE).unwrap();
        let times = edge_times(&net, &dens, 15.0).unwrap();
        let fac = snap_facilities(&net, &raw, f64::INFINITY).unwrap();
        let field = travel_time_field(&net, &times, &fac, Category::Overall, FieldOptions::default()).unwrap();
        let mut rng = common::rng(seed);
        let weights = PopulationWeights::from_weights((0..net.node_count()).map(|_| rng.gen_range(0.0..100.0)).collect());

        let comps = inaccessible_components(&net, &field, tau);
        let mut owner = vec![None; net.node_count()];
        for (k, c) in comps.iter().enumerate() {
            for &v in c {
                prop_assert!(owner[v].is_none());
                owner[v] = Some(k);
            }
        }
        for (o, t) in owner.iter().zip(&field.times) {
            prop_assert_eq!(o.is_some(), !is_accessible(*t, tau));
        }
        // Maximality: no edge joins two different clusters.
        for e in net.edges() {
            if let (Some(a), Some(b)) = (owner[e.from], owner[e.to]) {
                prop_assert_eq!(a, b);
            }
        }

        let all = vulnerability_report(&net, &field, &weights, tau, 0.0).unwrap();
        let filtered = vulnerability_report(&net, &field, &weights, tau, min_pop).unwrap();
        for c in &filtered.clusters {
            prop_assert!(all.clusters.iter().any(|d| d.nodes == c.nodes));
            prop_assert!(c.population >= min_pop);
        }
        let total = filtered.total_underserved + filtered.accessible_population + filtered.filtered_population;
        prop_assert!((total - weights.total_assigned).abs() <= 1e-9 * weights.total_assigned.max(1.0));
    }
}

#[test]
fn scenario_identities() {
    let town = grid_town().unwrap();
    let a = analyze(&town.network, &town.facilities, &town.tracts, None, &RunConfig::default(), false).unwrap();
    let taus = default_taus();
    let inputs = ScenarioInputs {
        network: &town.network,
        density: &a.density,
        facilities: &a.facilities,
        weights: &a.weights,
        category: Category::EmsStation,
        taus: &taus,
        options: FieldOptions::default(),
    };
    let same = scenario_alpha_scale(15.0, 1.0, inputs).unwrap();
    assert_eq!(same.before, same.after);
    assert!(same.deltas.iter().all(|d| *d == 0.0));
    for scale in [0.1, 0.5, 0.9] {
        let zero = scenario_alpha_scale(0.0, scale, inputs).unwrap();
        assert_eq!(zero.before.samples, zero.after.samples);
        let halved = scenario_alpha_scale(15.0, scale, inputs).unwrap();
        for (b, af) in halved.before.samples.iter().zip(&halved.after.samples) {
            assert!(af.covered_fraction >= b.covered_fraction);
        }
    }
    assert!(scenario_alpha_scale(15.0, 0.0, inputs).is_err());
    assert!(scenario_alpha_scale(15.0, 1.5, inputs).is_err());
}
