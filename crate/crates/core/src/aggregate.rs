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

//! Orbit to graphlet rollup, whole-graph frequencies and typed motif
//! distributions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::codec::{Graphlet, GraphletKey, Shape};
use crate::engine::{CountResult, EdgeCounts};
use crate::graph::HeteroGraph;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AggregateError {
    #[error("{key:?}: edge sum {sum} is not a multiple of {edges} edges")]
    NonDivisible {
        key: GraphletKey,
        sum: u64,
        edges: u32,
    },
    #[error("{0:?}: count overflow")]
    Overflow(GraphletKey),
}

/// Graphlet-level counts of one edge: orbits of the same graphlet and type
/// multiset are summed.
pub fn orbits_to_graphlets(edge: &EdgeCounts) -> Vec<(GraphletKey, u64)> {
    let mut out: BTreeMap<GraphletKey, u64> = BTreeMap::new();
    for (key, count) in edge.iter() {
        *out.entry(key.to_graphlet()).or_insert(0) += count;
    }
    out.into_iter().collect()
}

/// Frequency of every typed graphlet in the whole graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalCounts {
    pub counts: BTreeMap<GraphletKey, u64>,
    pub num_types: usize,
    pub num_nodes: usize,
    pub num_edges: usize,
}

impl GlobalCounts {
    /// Sums per-edge counts and divides each by the graphlet's edge count,
    /// since every instance is seen once from each of its edges.
    pub fn from_edges(g: &HeteroGraph, result: &CountResult) -> Result<Self, AggregateError> {
        let mut sums: BTreeMap<GraphletKey, u64> = BTreeMap::new();
        for edge in &result.per_edge {
            for (key, count) in orbits_to_graphlets(edge) {
                let slot = sums.entry(key).or_insert(0);
                *slot = slot
                    .checked_add(count)
                    .ok_or(AggregateError::Overflow(key))?;
            }
        }
        let mut counts = BTreeMap::new();
        for (key, sum) in sums {
            let edges = key.shape().edges();
            if sum % edges as u64 != 0 {
                return Err(AggregateError::NonDivisible { key, sum, edges });
            }
            counts.insert(key, sum / edges as u64);
        }
        Ok(Self {
            counts,
            num_types: g.num_types(),
            num_nodes: g.num_nodes(),
            num_edges: g.num_edges(),
        })
    }

    pub fn get(&self, key: GraphletKey) -> u64 {
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn variants(&self, h: Graphlet) -> impl Iterator<Item = (GraphletKey, u64)> + '_ {
        self.counts
            .iter()
            .filter(move |(k, _)| k.shape() == h)
            .map(|(&k, &c)| (k, c))
    }

    /// Untyped frequency of `h`, the sum over all of its typed variants.
    pub fn total(&self, h: Graphlet) -> u64 {
        self.variants(h).map(|(_, c)| c).sum()
    }

    /// Fraction of instances of `h` whose nodes all share one type.
    pub fn homogeneous_share(&self, h: Graphlet) -> f64 {
        let total = self.total(h);
        if total == 0 {
            return 0.0;
        }
        let same: u64 = self
            .variants(h)
            .filter(|(k, _)| k.is_homogeneous())
            .map(|(_, c)| c)
            .sum();
        same as f64 / total as f64
    }
}

/// Relative frequencies of the typed variants of one graphlet, most
/// frequent first (ties by key).
#[derive(Debug, Clone, PartialEq)]
pub struct MotifDistribution {
    pub graphlet: Graphlet,
    pub entries: Vec<(GraphletKey, f64)>,
}

impl MotifDistribution {
    pub fn probabilities(&self) -> Vec<f64> {
        self.entries.iter().map(|&(_, p)| p).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        entropy(&self.probabilities())
    }

    pub fn prob(&self, key: GraphletKey) -> f64 {
        self.entries
            .iter()
            .find(|(k, _)| *k == key)
            .map_or(0.0, |&(_, p)| p)
    }
}

pub fn typed_distribution(gc: &GlobalCounts, h: Graphlet) -> MotifDistribution {
    let total = gc.total(h) as f64;
    let mut entries: Vec<(GraphletKey, f64)> =
        gc.variants(h).map(|(k, c)| (k, c as f64 / total)).collect();
    entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    MotifDistribution {
        graphlet: h,
        entries,
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
///
/// Panics unless `probs` is a probability vector (sum within 1e-9 of 1).
pub fn entropy(probs: &[f64]) -> f64 {
    let sum: f64 = probs.iter().sum();
    assert!(
        probs.iter().all(|&p| p >= 0.0) && (sum - 1.0).abs() <= 1e-9,
        "entropy of an unnormalized vector (sum {sum})"
    );
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Number of type multisets of size `k` over `l` types, `C(l + k - 1, k)`.
pub fn num_possible_typed(k: u64, l: u64) -> u64 {
    // C(n, k) built incrementally; each partial product is itself a binomial
    let n = l + k - 1;
    (1..=k).fold(1u64, |acc, step| acc * (n - k + step) / step)
}

/// Observed versus possible typed variants of one graphlet class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSummary {
    pub graphlet: Graphlet,
    pub observed: u64,
    pub possible: u64,
    /// Variants with zero occurrences.
    pub forbidden: u64,
    pub total: u64,
    pub entropy: f64,
    pub homogeneous_share: f64,
}

/// Per-class summary over the 3- and 4-node graphlets.
pub fn unique_counts_summary(gc: &GlobalCounts) -> Vec<ClassSummary> {
    Graphlet::ALL
        .iter()
        .copied()
        .filter(|h| *h != Graphlet::Edge)
        .map(|h| {
            let observed = gc.variants(h).count() as u64;
            let possible = num_possible_typed(h.nodes() as u64, gc.num_types as u64);
            ClassSummary {
                graphlet: h,
                observed,
                possible,
                forbidden: possible - observed,
                total: gc.total(h),
                entropy: typed_distribution(gc, h).entropy(),
                homogeneous_share: gc.homogeneous_share(h),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{MotifKey, Orbit};
    use crate::engine::{count_all, CountOptions};

    fn mk(pairs: &[(Orbit, &[u16], u64)]) -> EdgeCounts {
        let mut counts: Vec<_> = pairs
            .iter()
            .map(|&(o, t, c)| (MotifKey::encode(o, t), c))
            .collect();
        counts.sort();
        EdgeCounts { edge_id: 0, counts }
    }

    #[test]
    fn rollup_sums_orbits() {
        let e = mk(&[
            (Orbit::PathEdge, &[1, 1, 2, 2], 2),
            (Orbit::PathCenter, &[2, 1, 2, 1], 1),
            (Orbit::ChordalEdge, &[1; 4], 1),
        ]);
        let h = orbits_to_graphlets(&e);
        assert_eq!(
            h,
            vec![
                (GraphletKey::encode(Graphlet::Path, &[1, 1, 2, 2]), 3),
                (GraphletKey::encode(Graphlet::ChordalCycle, &[1; 4]), 1),
            ]
        );
    }

    #[test]
    fn tailed_triangle_pendant_edge() {
        let g = HeteroGraph::new(1, vec![1; 4], &[(0, 1), (1, 2), (0, 2), (0, 3)]).unwrap();
        let r = count_all(&g, CountOptions::default()).unwrap();
        let pendant = g.edges().iter().position(|&(a, b)| a.max(b) == 3).unwrap();
        let h = orbits_to_graphlets(&r.per_edge[pendant]);
        let key = GraphletKey::encode(Graphlet::TailedTriangle, &[1; 4]);
        assert_eq!(h.iter().find(|(k, _)| *k == key).unwrap().1, 1);
    }

    #[test]
    fn global_single_triangle_and_clique() {
        let g = HeteroGraph::new(1, vec![1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let gc =
            GlobalCounts::from_edges(&g, &count_all(&g, CountOptions::default()).unwrap()).unwrap();
        assert_eq!(gc.get(GraphletKey::encode(Graphlet::Triangle, &[1; 3])), 1);
        assert_eq!(gc.get(GraphletKey::encode(Graphlet::Edge, &[1; 2])), 3);
        assert_eq!(
            typed_distribution(&gc, Graphlet::Triangle).probabilities(),
            vec![1.0]
        );
        let summary = unique_counts_summary(&gc);
        assert_eq!(summary[1].graphlet, Graphlet::Triangle);
        assert_eq!(summary[1].observed, 1);
        assert!(summary[2..].iter().all(|s| s.observed == 0));
        assert!(summary.iter().all(|s| s.possible == 1));

        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let g = HeteroGraph::new(1, vec![1; 4], &edges).unwrap();
        let gc =
            GlobalCounts::from_edges(&g, &count_all(&g, CountOptions::default()).unwrap()).unwrap();
        assert_eq!(gc.total(Graphlet::Clique), 1);
        assert_eq!(gc.total(Graphlet::Triangle), 4);
    }

    #[test]
    fn non_divisible_sum_rejected() {
        let g = HeteroGraph::new(1, vec![1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut r = count_all(&g, CountOptions::default()).unwrap();
        r.per_edge[0].counts[1].1 += 1;
        assert!(matches!(
            GlobalCounts::from_edges(&g, &r),
            Err(AggregateError::NonDivisible {
                sum: 4,
                edges: 3,
                ..
            })
        ));
    }

    #[test]
    fn absent_graphlet_gives_empty_distribution() {
        let g = HeteroGraph::new(1, vec![1; 2], &[(0, 1)]).unwrap();
        let gc =
            GlobalCounts::from_edges(&g, &count_all(&g, CountOptions::default()).unwrap()).unwrap();
        let d = typed_distribution(&gc, Graphlet::Clique);
        assert!(d.is_empty());
        assert_eq!(d.entropy(), 0.0);
    }

    #[test]
    fn entropy_values() {
        assert_eq!(entropy(&[1.0]), 0.0);
        assert_eq!(entropy(&[0.5, 0.5]), 1.0);
        assert_eq!(entropy(&[0.25; 4]), 2.0);
        assert_eq!(entropy(&[1.0, 0.0]), 0.0);
    }

    #[test]
    #[should_panic]
    fn entropy_rejects_unnormalized() {
        entropy(&[0.5, 0.6]);
    }

    #[test]
    fn multiset_coefficients() {
        assert_eq!(num_possible_typed(4, 7), 210);
        assert_eq!(num_possible_typed(3, 4), 20);
        assert_eq!(num_possible_typed(2, 1), 1);
    }
}
