use emsaccess::density::{density_field, derive_intersections, HECTARE};
use emsaccess::network::{generate_grid, RoadClass, RoadNetwork, DEFAULT_STREET_SPEED};
use proptest::prelude::*;

mod common;

const ALL: [RoadClass; 3] = [RoadClass::Street, RoadClass::Highway, RoadClass::Other];

fn shifted(net: &RoadNetwork, dx: f64, dy: f64) -> RoadNetwork {
    let (mut nodes, edges) = net.to_records();
    for n in &mut nodes {
        n.x += dx;
        n.y += dy;
    }
    RoadNetwork::build(nodes, edges).unwrap()
}

proptest! {
    #[test]
    fn translation_leaves_density_unchanged(seed in 0u64..300, dx in -10_000i32..10_000, dy in -10_000i32..10_000, r in 50.0f64..1500.0) {
        let (net, _) = common::random_case(seed, 50);
        let moved = shifted(&net, dx as f64, dy as f64);
        let a = density_field(&net, &derive_intersections(&net, &ALL, 1.0).unwrap(), r, HECTARE).unwrap();
        let b = density_field(&moved, &derive_intersections(&moved, &ALL, 1.0).unwrap(), r, HECTARE).unwrap();
        prop_assert_eq!(a.counts, b.counts);
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn counts_grow_with_radius(seed in 0u64..300, r1 in 10.0f64..1000.0, extra in 0.0f64..1000.0) {
        let (net, _) = common::random_case(seed, 50);
        let set = derive_intersections(&net, &ALL, 1.0).unwrap();
        let small = density_field(&net, &set, r1, 1.0).unwrap();
        let large = density_field(&net, &set, r1 + extra, 1.0).unwrap();
        for (a, b) in small.counts.iter().zip(&large.counts) {
            prop_assert!(a <= b);
        }
    }

    #[test]
    fn field_matches_brute_force(seed in 0u64..300, r in 10.0f64..2000.0) {
        let (net, _) = common::random_case(seed, 50);
        let set = derive_intersections(&net, &ALL, 1.0).unwrap();
        prop_assert_eq!(&set.points, &common::brute_intersections(&net, 1.0));
        let field = density_field(&net, &set, r, 1.0).unwrap();
        for i in 0..net.node_count() {
            prop_assert_eq!(field.counts[i], common::brute_count(net.position(i), &set.points, r));
        }
    }
}

#[test]
fn interior_density_approaches_lattice_density() {
    let spacing = 50.0;
    let g = generate_grid(81, 81, spacing, DEFAULT_STREET_SPEED).unwrap();
    let set = derive_intersections(&g, &ALL, 1.0).unwrap();
    let want = 1.0 / (spacing * spacing);
    for k in [5.0, 8.0, 12.0] {
        let field = density_field(&g, &set, k * spacing, 1.0).unwrap();
        for (r, c) in [(40, 40), (30, 45), (50, 35)] {
            let got = field.values[g.node_index(&format!("r{r}c{c}")).unwrap()];
            assert!((got - want).abs() / want <= 0.10, "r = {k} spacing at ({r},{c}): {got}");
        }
    }
}
