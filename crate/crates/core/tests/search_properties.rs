use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::ops::ControlFlow;
use std::path::PathBuf;

use regflip::config::PointConfiguration;
use regflip::input::parse_input;
use regflip::search::{self, predecessor, reverse_search, SearchMode};
use regflip::symmetry::{canonical_form, expand_group, stabilizer_order, SymmetryGroup, DEFAULT_ORDER_CAP};
use regflip::triangulation::{gkz, lex_compare, placing_triangulation, GkzVector, Triangulation};

fn load(name: &str) -> (PointConfiguration, SymmetryGroup) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name);
    let doc = parse_input(&fs::read_to_string(path).unwrap()).unwrap();
    let config = PointConfiguration::new(doc.points.clone()).unwrap();
    let group = expand_group(&config, &doc.generators().unwrap(), DEFAULT_ORDER_CAP).unwrap();
    (config, group)
}

fn enumerate(config: &PointConfiguration, seed: Triangulation, capacity: usize) -> Vec<(Triangulation, GkzVector)> {
    let mut oracle = search::geometric_oracle(config, SearchMode::RegularOnly, capacity);
    let g = gkz(config, &seed);
    let mut out = Vec::new();
    reverse_search(&mut oracle, seed, g, |t, g, _| {
        out.push((t.clone(), g.clone()));
        ControlFlow::Continue(())
    })
    .unwrap();
    out
}

fn as_set(found: &[(Triangulation, GkzVector)]) -> BTreeSet<Triangulation> {
    found.iter().map(|(t, _)| t.clone()).collect()
}

#[test]
fn predecessor_chains_end_at_the_root() {
    let (config, _) = load("delta2x2.txt");
    let found = enumerate(&config, placing_triangulation(&config), 256);
    let root = found[0].clone();
    let mut oracle = search::geometric_oracle(&config, SearchMode::RegularOnly, 256);
    for (t, g) in &found {
        let (mut node, mut node_gkz) = (t.clone(), g.clone());
        let mut steps = 0;
        while let Some(m) = predecessor(&mut oracle, &node, &node_gkz).unwrap() {
            assert_eq!(lex_compare(&m.gkz, &node_gkz).unwrap(), std::cmp::Ordering::Greater);
            node = m.target;
            node_gkz = m.gkz;
            steps += 1;
            assert!(steps <= found.len());
        }
        assert_eq!(node, root.0);
    }
}

#[test]
fn cache_capacity_does_not_change_the_output() {
    for name in ["cube3.txt", "nested_triangles.txt", "delta2x2.txt"] {
        let (config, _) = load(name);
        let seed = placing_triangulation(&config);
        let uncached = enumerate(&config, seed.clone(), 0);
        let cached = enumerate(&config, seed.clone(), search::DEFAULT_FLIP_CACHE);
        let tiny = enumerate(&config, seed, 1);
        assert_eq!(uncached, cached, "{name}");
        assert_eq!(uncached, tiny, "{name}");
    }
}

#[test]
fn every_seed_gives_the_same_output() {
    let (config, _) = load("cube3.txt");
    let reference = enumerate(&config, placing_triangulation(&config), 64);
    for (seed, _) in reference.iter().step_by(7) {
        assert_eq!(enumerate(&config, seed.clone(), 64), reference);
    }
}

#[test]
fn orbits_partition_the_output() {
    for name in ["cube3.txt", "delta2x2.txt", "square.txt"] {
        let (config, group) = load(name);
        let found = enumerate(&config, placing_triangulation(&config), 256);
        let all = as_set(&found);
        let mut canonical: BTreeSet<Triangulation> = BTreeSet::new();
        let mut total = 0;
        for (t, _) in &found {
            let c = canonical_form(t, &group);
            if canonical.insert(c.clone()) {
                let size = group.order() / stabilizer_order(&c, &group);
                assert_eq!(group.order() % stabilizer_order(&c, &group), 0);
                total += size;
            }
            for p in group.elements() {
                assert!(all.contains(&t.relabeled(p)), "{name}: orbit leaves the output");
            }
        }
        assert_eq!(total, found.len(), "{name}");
    }
}

#[test]
fn gkz_is_injective_on_regular_triangulations() {
    for name in ["cube3.txt", "delta2x2.txt", "nested_triangles.txt"] {
        let (config, _) = load(name);
        let found = enumerate(&config, placing_triangulation(&config), 256);
        let distinct: HashSet<&GkzVector> = found.iter().map(|(_, g)| g).collect();
        assert_eq!(distinct.len(), found.len(), "{name}");
        for (t, g) in &found {
            assert_eq!(&gkz(&config, t), g);
        }
    }
}

#[test]
fn product_of_simplices_groups() {
    let (config, group) = load("delta2x5.txt");
    assert_eq!(config.len(), 18);
    assert_eq!(group.order(), 4320);
    assert_eq!(load("delta2x2.txt").1.order(), 36);
}

#[test]
fn visit_depths_follow_the_tree() {
    let (config, _) = load("delta2x2.txt");
    let mut oracle = search::geometric_oracle(&config, SearchMode::RegularOnly, 256);
    let (seed, g) = search::seed(&config);
    let mut depths = Vec::new();
    reverse_search(&mut oracle, seed, g, |_, _, d| {
        depths.push(d);
        ControlFlow::Continue(())
    })
    .unwrap();
    assert_eq!(depths.len(), 108);
    assert_eq!(depths[0], 0);
    assert!(depths.windows(2).all(|w| w[1] <= w[0] + 1));
}
