// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use std::collections::BTreeMap;

use proptest::prelude::*;

use hetgraphlet::aggregate::GlobalCounts;
use hetgraphlet::oracle::{self, Oracle};
use hetgraphlet::sparse::{read_counts, read_lookup, write_sparse};
use hetgraphlet::{
    count_all, CountOptions, Graphlet, HeteroGraph, MotifKey, NodeId, Orbit, Shape, TypeId,
};

/// Random typed graph on up to `max_n` nodes with at least one edge.
fn arb_graph(max_n: usize, max_types: usize) -> impl Strategy<Value = HeteroGraph> {
    (2..=max_n, 1..=max_types).prop_flat_map(|(n, l)| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(1..=l as TypeId, n),
            Just(l),
        )
            .prop_map(move |(mask, types, l)| {
                let mut edges = vec![(0, 1)];
                let mut idx = 0;
                for a in 0..n as NodeId {
                    for b in a + 1..n as NodeId {
                        if mask[idx] {
                            edges.push((a, b));
                        }
                        idx += 1;
                    }
                }
                HeteroGraph::new(l, types, &edges).unwrap()
            })
    })
}

fn opts(workers: usize) -> CountOptions {
    CountOptions { workers, max_k: 4 }
}

fn orbit_total(counts: impl Iterator<Item = (MotifKey, u64)>, o: Orbit) -> u64 {
    counts.filter(|(k, _)| k.shape() == o).map(|(_, c)| c).sum()
}

fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn engine_matches_oracle(g in arb_graph(11, 3), workers in 1usize..4) {
        let r = count_all(&g, opts(workers)).unwrap();
        let report = oracle::verify(&Oracle::default(), &g, &r).unwrap();
        prop_assert!(report.passed(), "{:?}", report.mismatches);
    }

    #[test]
    fn global_counts_match_oracle(g in arb_graph(10, 3)) {
        let r = count_all(&g, opts(1)).unwrap();
        let gc = GlobalCounts::from_edges(&g, &r).unwrap();
        prop_assert_eq!(gc.counts, Oracle::default().global_counts(&g).unwrap());
    }

    #[test]
    fn worker_count_does_not_change_output(g in arb_graph(14, 4)) {
        let one = count_all(&g, opts(1)).unwrap();
        for w in [2, 5] {
            prop_assert_eq!(&one, &count_all(&g, opts(w)).unwrap());
        }
    }

    #[test]
    fn untyped_marginalization(g in arb_graph(12, 4)) {
        let typed = count_all(&g, opts(1)).unwrap();
        let plain = count_all(&g.untyped(), opts(1)).unwrap();
        for (t, u) in typed.per_edge.iter().zip(&plain.per_edge) {
            for &o in Orbit::ALL {
                prop_assert_eq!(orbit_total(t.iter(), o), orbit_total(u.iter(), o));
            }
        }
    }

    #[test]
    fn untyped_orbit_identities(g in arb_graph(12, 3)) {
        // set sizes come from the oracle's partition, not the engine
        let r = count_all(&g, opts(1)).unwrap();
        let oracle = Oracle::default();
        for (e, c) in r.per_edge.iter().enumerate() {
            let p = oracle.edge_partition(&g, e).unwrap();
            let (t, si, sj) = (p.triangle as u64, p.star_i as u64, p.star_j as u64);
            let tot = |o| orbit_total(c.iter(), o);
            let (i, j) = g.edge(e);
            prop_assert_eq!(g.degree(i) + g.degree(j), 2 * p.triangle + p.star_i + p.star_j + 2);
            prop_assert_eq!(g.num_nodes(), p.independent + p.star_i + p.star_j + p.triangle + 2);
            prop_assert_eq!(tot(Orbit::Edge), 1);
            prop_assert_eq!(tot(Orbit::Wedge), si + sj);
            prop_assert_eq!(tot(Orbit::Triangle), t);
            prop_assert_eq!(tot(Orbit::PathCenter) + tot(Orbit::Cycle), si * sj);
            prop_assert_eq!(tot(Orbit::Star) + tot(Orbit::TailedTail), choose2(si) + choose2(sj));
            prop_assert_eq!(tot(Orbit::TailedTriEdge) + tot(Orbit::ChordalEdge), t * (si + sj));
            prop_assert_eq!(tot(Orbit::ChordalCenter) + tot(Orbit::Clique), choose2(t));
        }
    }

    #[test]
    fn codec_permutation_invariance(
        types in proptest::collection::vec(1..=4095 as TypeId, 2..=4),
        seed in any::<u64>(),
    ) {
        let orbits: Vec<Orbit> = Orbit::ALL.iter().copied().filter(|o| o.nodes() == types.len()).collect();
        let o = orbits[(seed % orbits.len() as u64) as usize];
        let key = MotifKey::encode(o, &types);
        let mut rotated = types.clone();
        rotated.rotate_left((seed % types.len() as u64) as usize);
        let mut reversed = types.clone();
        reversed.reverse();
        prop_assert_eq!(key, MotifKey::encode(o, &rotated));
        prop_assert_eq!(key, MotifKey::encode(o, &reversed));
        let mut sorted = types.clone();
        sorted.sort_unstable();
        prop_assert_eq!(key.decode(), (o, sorted));
        prop_assert_eq!(MotifKey::from_raw(key.raw()).unwrap(), key);
    }

    #[test]
    fn graph_round_trip(g in arb_graph(15, 5)) {
        let (mut edges, mut types) = (Vec::new(), Vec::new());
        g.write_edges(&mut edges).unwrap();
        g.write_types(&mut types).unwrap();
        let (back, report) =
            HeteroGraph::load_from_readers(&edges[..], "edges", &types[..], "types").unwrap();
        prop_assert_eq!(report.duplicate_edges + report.self_loops, 0);
        prop_assert_eq!(back.num_nodes(), g.num_nodes());
        prop_assert_eq!(back.edges(), g.edges());
        // labels are the type ids themselves, so they may be remapped densely
        let remap = |h: &HeteroGraph| -> Vec<String> {
            h.node_types().iter().map(|&t| h.type_label(t).to_string()).collect()
        };
        prop_assert_eq!(remap(&back), remap(&g));
    }

    #[test]
    fn counts_file_round_trip(g in arb_graph(12, 3)) {
        let r = count_all(&g, opts(2)).unwrap();
        let (mut counts, mut lookup) = (Vec::new(), Vec::new());
        write_sparse(&g, r.per_edge.iter().map(|e| e.counts.as_slice()), &mut counts, &mut lookup)
            .unwrap();
        let keys = read_lookup::<Orbit>(&lookup[..]).unwrap();
        prop_assert_eq!(keys.len(), r.motifs.len());
        let records = read_counts(&counts[..], &keys).unwrap();
        let parsed: BTreeMap<(u64, u64), Vec<(MotifKey, u64)>> =
            records.into_iter().map(|rec| ((rec.u, rec.v), rec.counts)).collect();
        prop_assert_eq!(parsed.len(), g.num_edges());
        for (e, c) in r.per_edge.iter().enumerate() {
            let (i, j) = g.edge(e);
            let (a, b) = (g.node_label(i), g.node_label(j));
            prop_assert_eq!(&parsed[&(a.min(b), a.max(b))], &c.counts);
        }
    }

    #[test]
    fn graphlet_totals_divide_evenly(g in arb_graph(12, 3)) {
        let r = count_all(&g, opts(1)).unwrap();
        let gc = GlobalCounts::from_edges(&g, &r).unwrap();
        prop_assert_eq!(gc.total(Graphlet::Edge), g.num_edges() as u64);
        let tri: u64 = r.per_edge.iter()
            .map(|c| orbit_total(c.iter(), Orbit::Triangle))
            .sum();
        prop_assert_eq!(gc.total(Graphlet::Triangle) * 3, tri);
    }
}
