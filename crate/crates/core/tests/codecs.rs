use emsaccess::config::RunConfig;
use emsaccess::fixtures::synthetic_city;
use emsaccess::io::{features, tables};
use emsaccess::network::RoadNetwork;
use emsaccess::pipeline::analyze;
use proptest::prelude::*;

mod common;

const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/grid5");

fn read(name: &str) -> String {
    std::fs::read_to_string(format!("{DATA}/{name}")).unwrap()
}

#[test]
fn bundled_grid_round_trips() {
    let nodes = tables::parse_nodes(&read("nodes.csv"), "nodes.csv").unwrap();
    let edges = tables::parse_edges(&read("edges.csv"), "edges.csv").unwrap();
    let net = RoadNetwork::build(nodes, edges).unwrap();
    assert_eq!((net.node_count(), net.edge_count()), (25, 40));
    let (n2, e2) = net.to_records();
    let again = RoadNetwork::build(
        tables::parse_nodes(&tables::emit_nodes(&n2), "n").unwrap(),
        tables::parse_edges(&tables::emit_edges(&e2), "e").unwrap(),
    )
    .unwrap();
    assert_eq!(again.to_records(), net.to_records());

    let fac = tables::parse_facilities(&read("facilities.csv"), "facilities.csv").unwrap();
    assert_eq!(tables::parse_facilities(&tables::emit_facilities(&fac), "f").unwrap(), fac);
    let tracts = features::parse_tracts(&read("tracts.geojson"), "tracts.geojson").unwrap();
    assert_eq!(features::parse_tracts(&features::emit_tracts(&tracts), "t").unwrap(), tracts);
    let trips = tables::parse_trips(&read("trips.csv"), "trips.csv").unwrap();
    assert!(trips.naive_rows.is_empty());
    assert!(!trips.records.is_empty());
}

#[test]
fn city_artifacts_round_trip() {
    let city = synthetic_city(3).unwrap();
    let net = &city.network;
    let a = analyze(net, &city.facilities, &city.tracts, None, &RunConfig::default(), false).unwrap();

    let d = tables::parse_density(&tables::emit_density(net, &a.density), "d").unwrap();
    assert_eq!(d.values, a.density.values);
    assert_eq!((d.radius, d.unit_scale), (a.density.radius, a.density.unit_scale));

    let f = tables::parse_field(&tables::emit_field(net, &a.field), "f").unwrap();
    let times = tables::align_to_network(net, &f, "f").unwrap();
    assert_eq!(times, a.field.times);

    let w = tables::parse_weights(&tables::emit_weights(net, &a.weights), "w").unwrap();
    assert_eq!(tables::align_to_network(net, &w, "w").unwrap(), a.weights.weights);

    let c = tables::parse_curve(&tables::emit_curve(&a.curve), "c").unwrap();
    let expected: Vec<(f64, f64)> = a.curve.samples.iter().map(|s| (s.tau, s.covered_fraction)).collect();
    assert_eq!(c, expected);

    let i = features::parse_intersections(&features::emit_intersections(&a.intersections), "i").unwrap();
    assert_eq!(i, a.intersections);
}

proptest! {
    #[test]
    fn random_networks_round_trip(seed in 0u64..300) {
        let (net, raw) = common::random_case(seed, 50);
        let (nodes, edges) = net.to_records();
        let back = RoadNetwork::build(
            tables::parse_nodes(&tables::emit_nodes(&nodes), "n").unwrap(),
            tables::parse_edges(&tables::emit_edges(&edges), "e").unwrap(),
        ).unwrap();
        prop_assert_eq!(back.to_records(), (nodes, edges));
        prop_assert_eq!(tables::parse_facilities(&tables::emit_facilities(&raw), "f").unwrap(), raw);
    }

    #[test]
    fn field_with_gaps_round_trips(times in prop::collection::vec(prop::option::of(0.0f64..1e5), 1..60)) {
        let ids: Vec<String> = (0..times.len()).map(|i| format!("v{i}")).collect();
        let text = {
            let mut s = String::from("node_id,x,y,seconds\n");
            for (id, t) in ids.iter().zip(&times) {
                let v = t.map_or_else(|| emsaccess::io::UNREACHABLE.to_string(), |t| format!("{t}"));
                s.push_str(&format!("{id},0,0,{v}\n"));
            }
            s
        };
        let parsed = tables::parse_field(&text, "f").unwrap();
        prop_assert_eq!(parsed, ids.into_iter().zip(times).collect::<Vec<_>>());
    }
}
