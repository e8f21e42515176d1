use proptest::prelude::*;
use teamsim::names::Labels;
use teamsim::text::{parse_graph, parse_pattern, parse_updates, write_graph, write_pattern, write_updates, GraphDoc, ScriptUnit, UpdateSet};
use teamsim_core::{Capacity, NodeId};
use teamsim_testkit::gen::{cap_family, random_graph, random_pattern, rng};

fn labels(count: u32) -> Labels {
    let mut l = Labels::new();
    for i in 0..count {
        l.intern(&format!("L{i}"));
    }
    l
}

fn unit_strategy() -> impl Strategy<Value = ScriptUnit> {
    let name = "[a-z][a-z0-9_]{0,4}";
    let cap = (1u32..4, proptest::option::of(0u32..3)).prop_map(|(x, d)| Capacity::new(x, d.map(|d| x + d)).unwrap());
    prop_oneof![
        (name, name).prop_map(|(a, b)| ScriptUnit::PatternInsertEdge(a, b)),
        (name, name).prop_map(|(a, b)| ScriptUnit::PatternDeleteEdge(a, b)),
        (name, name, name, cap.clone()).prop_map(|(n, a, l, c)| ScriptUnit::PatternInsertNode {
            name: n,
            anchor: a,
            label: l,
            capacity: c
        }),
        name.prop_map(ScriptUnit::PatternDeleteNode),
        (name, cap).prop_map(|(n, c)| ScriptUnit::PatternSetCapacity(n, c)),
        (name, name).prop_map(|(a, b)| ScriptUnit::DataInsertEdge(a, b)),
        (name, name).prop_map(|(a, b)| ScriptUnit::DataDeleteEdge(a, b)),
        (name, name, prop::collection::vec("[A-Z][a-z]{0,3}", 1..3)).prop_map(|(n, a, ls)| ScriptUnit::DataInsertNode {
            name: n,
            anchor: a,
            labels: ls
        }),
        name.prop_map(ScriptUnit::DataDeleteNode),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graph_text_round_trips(seed in any::<u64>(), n in 1usize..40, deg in 0.0f64..4.0) {
        let mut r = rng(seed);
        let graph = random_graph(&mut r, n, deg, 5);
        let mut table = labels(5);
        let doc = GraphDoc { graph, names: Default::default() };
        let text = write_graph(&doc, &table);
        let back = parse_graph(&text, &mut table).unwrap();
        prop_assert_eq!(&back.graph, &doc.graph);
        prop_assert_eq!(write_graph(&back, &table), text);
    }

    #[test]
    fn pattern_text_round_trips(seed in any::<u64>(), n in 1usize..8) {
        let mut r = rng(seed);
        let p = random_pattern(&mut r, n, 4, &cap_family());
        let mut table = labels(4);
        let text = write_pattern(&p, &table);
        let back = parse_pattern(&text, &mut table).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn scripts_round_trip(sets in prop::collection::vec(prop::collection::vec(unit_strategy(), 0..5), 0..5)) {
        let sets: Vec<UpdateSet> = sets.into_iter().map(|units| UpdateSet { units }).collect();
        let text = write_updates(&sets);
        prop_assert_eq!(parse_updates(&text).unwrap(), sets);
    }
}

#[test]
fn documented_examples() {
    let mut l = Labels::new();
    let doc = parse_graph("node 1 A\nnode 2 B\nedge 1 2", &mut l).unwrap();
    assert_eq!((doc.graph.node_count(), doc.graph.edge_count()), (2, 1));
    let doc = parse_graph("node 1 A,B", &mut l).unwrap();
    assert_eq!(doc.graph.labels(NodeId(0)).len(), 2);
    assert!(parse_graph("node 1 A\nedge 1 1", &mut l).is_err());

    let p = parse_pattern("pnode u1 PM [1,1]\npnode u2 SA [1,2]\npedge u1 u2", &mut l).unwrap();
    assert_eq!(p.node_count(), 2);
    let e = parse_pattern("pnode u1 A [2,1]", &mut l).unwrap_err();
    assert!(e.message.contains("interval") || e.message.contains("capacity"), "{e}");
    let p = parse_pattern("pnode u1 A [1,*]", &mut l).unwrap();
    assert_eq!(p.capacity(p.find("u1").unwrap()).unwrap().upper(), None);

    assert_eq!(
        parse_updates("p-edge u5 u6").unwrap()[0].units,
        vec![ScriptUnit::PatternDeleteEdge("u5".into(), "u6".into())]
    );
    let sets = parse_updates("g+edge 14 27\n---\np.cap u2 [1,3]").unwrap();
    assert_eq!(sets.len(), 2);
    assert_eq!(
        sets[1].units,
        vec![ScriptUnit::PatternSetCapacity("u2".into(), Capacity::bounded(1, 3).unwrap())]
    );
    let sets = parse_updates("p+node u9 anchor=u2 label=ST cap=[1,2]").unwrap();
    assert!(matches!(&sets[0].units[0], ScriptUnit::PatternInsertNode { anchor, .. } if anchor == "u2"));
}
