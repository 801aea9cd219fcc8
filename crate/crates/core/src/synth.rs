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

//! Seeded random graph generators and uniform type assignment.
//!
//! All randomness comes from a ChaCha8 stream seeded with the caller's
//! 64-bit seed, so outputs are reproducible across platforms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{GraphError, HeteroGraph, NodeId, TypeId};

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("need at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("edge probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("weights must be positive and finite")]
    BadWeights,
    #[error("cannot spread {types} types over {nodes} nodes")]
    TooManyTypes { types: usize, nodes: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    ErdosRenyi {
        p: f64,
    },
    /// Power-law expected degrees with the given exponent, scaled to the
    /// target average degree.
    ChungLu {
        exponent: f64,
        avg_degree: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub model: Model,
    pub n: usize,
    pub num_types: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn generate(&self) -> Result<HeteroGraph, SynthError> {
        let g = match self.model {
            Model::ErdosRenyi { p } => gen_er(self.n, p, self.seed)?,
            Model::ChungLu {
                exponent,
                avg_degree,
            } => {
                let w = power_law_weights(self.n, exponent, avg_degree);
                gen_chung_lu(&w, self.seed)?
            }
        };
        // derived stream so types are independent of the structure draw
        assign_types_uniform(&g, self.num_types, self.seed ^ 0x9e37_79b9_7f4a_7c15)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Number of failures before the next success of a Bernoulli(p) stream.
fn geometric_skip(rng: &mut impl Rng, log_q: f64) -> usize {
    let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    (u.ln() / log_q).floor() as usize
}

/// G(n, p) with every node of type 1.
///
/// Uses geometric skipping over the pairs `(u, v)`, `v < u`, so the cost is
/// proportional to the number of edges rather than `n^2`.
pub fn gen_er(n: usize, p: f64, seed: u64) -> Result<HeteroGraph, SynthError> {
    if n < 2 {
        return Err(SynthError::TooFewNodes(n));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(SynthError::BadProbability(p));
    }
    let mut edges = Vec::new();
    if p >= 1.0 {
        for u in 1..n as NodeId {
            for v in 0..u {
                edges.push((v, u));
            }
        }
    } else if p > 0.0 {
        let mut rng = rng(seed);
        let log_q = (1.0 - p).ln();
        let (mut u, mut v) = (1usize, 0usize);
        loop {
            v += geometric_skip(&mut rng, log_q);
            while v >= u && u < n {
                v -= u;
                u += 1;
            }
            if u >= n {
                break;
            }
            edges.push((v as NodeId, u as NodeId));
            v += 1;
        }
    }
    Ok(HeteroGraph::new(1, vec![1; n], &edges)?)
}

/// Expected-degree weights `w_i ∝ (i + 1)^(-1 / (exponent - 1))`, scaled so
/// their mean is `avg_degree`.
pub fn power_law_weights(n: usize, exponent: f64, avg_degree: f64) -> Vec<f64> {
    let alpha = 1.0 / (exponent - 1.0);
    let raw: Vec<f64> = (0..n).map(|i| ((i + 1) as f64).powf(-alpha)).collect();
    let mean = raw.iter().sum::<f64>() / n as f64;
    raw.into_iter().map(|w| w * avg_degree / mean).collect()
}

/// Chung-Lu graph: each pair `(u, v)` is an edge independently with
/// probability `min(1, w_u w_v / Σw)`. All nodes get type 1.
///
/// Pairs are visited in descending weight order with geometric skips
/// against an upper bound, then thinned to the exact probability, which
/// keeps the cost near the number of edges.
pub fn gen_chung_lu(weights: &[f64], seed: u64) -> Result<HeteroGraph, SynthError> {
    let n = weights.len();
    if n < 2 {
        return Err(SynthError::TooFewNodes(n));
    }
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(SynthError::BadWeights);
    }
    let total: f64 = weights.iter().sum();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    let w: Vec<f64> = order.iter().map(|&i| weights[i]).collect();

    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for u in 0..n - 1 {
        let mut v = u + 1;
        let mut p = (w[u] * w[v] / total).min(1.0);
        while v < n && p > 0.0 {
            if p < 1.0 {
                v += geometric_skip(&mut rng, (1.0 - p).ln());
            }
            if v < n {
                let q = (w[u] * w[v] / total).min(1.0);
                if rng.gen::<f64>() < q / p {
                    edges.push((order[u] as NodeId, order[v] as NodeId));
                }
                p = q;
                v += 1;
            }
        }
    }
    Ok(HeteroGraph::new(1, vec![1; n], &edges)?)
}

/// Spreads `num_types` types over the nodes as evenly as possible: the
/// first `N mod L` types receive one extra node. Which node gets which type
/// is a seeded random permutation.
pub fn assign_types_uniform(
    g: &HeteroGraph,
    num_types: usize,
    seed: u64,
) -> Result<HeteroGraph, SynthError> {
    let n = g.num_nodes();
    if num_types == 0 || num_types > n {
        return Err(SynthError::TooManyTypes {
            types: num_types,
            nodes: n,
        });
    }
    let (base, extra) = (n / num_types, n % num_types);
    let mut types: Vec<TypeId> = Vec::with_capacity(n);
    for t in 0..num_types {
        let size = base + usize::from(t < extra);
        types.extend(std::iter::repeat_n((t + 1) as TypeId, size));
    }
    types.shuffle(&mut rng(seed));
    Ok(g.with_node_types(num_types, types)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn type_sizes(g: &HeteroGraph) -> Vec<usize> {
        (1..=g.num_types())
            .map(|t| g.node_types().iter().filter(|&&x| x as usize == t).count())
            .collect()
    }

    #[test]
    fn er_complete_and_empty() {
        let g = gen_er(5, 1.0, 1).unwrap();
        assert_eq!(g.num_edges(), 10);
        assert!(matches!(
            gen_er(10, 0.0, 1),
            Err(SynthError::Graph(GraphError::NoEdges))
        ));
        assert!(matches!(gen_er(1, 0.5, 1), Err(SynthError::TooFewNodes(1))));
        assert!(matches!(
            gen_er(5, 1.5, 1),
            Err(SynthError::BadProbability(_))
        ));
    }

    #[test]
    fn er_edge_count_near_mean() {
        // binomial(4950, 0.1): mean 495, sd sqrt(4950 * 0.1 * 0.9)
        let sd = (4950.0f64 * 0.1 * 0.9).sqrt();
        for seed in 0..10 {
            let m = gen_er(100, 0.1, seed).unwrap().num_edges() as f64;
            assert!((m - 495.0).abs() <= 4.0 * sd, "seed {seed}: {m}");
        }
    }

    #[test]
    fn er_deterministic() {
        assert_eq!(gen_er(200, 0.05, 7).unwrap(), gen_er(200, 0.05, 7).unwrap());
        assert_ne!(gen_er(200, 0.05, 7).unwrap(), gen_er(200, 0.05, 8).unwrap());
    }

    #[test]
    fn chung_lu_uniform_matches_er_density() {
        // w_i = c gives p = c / n for every pair
        let n = 400;
        let c = 8.0;
        let g = gen_chung_lu(&vec![c; n], 3).unwrap();
        let pairs = (n * (n - 1) / 2) as f64;
        let p = c / n as f64;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        assert!((g.num_edges() as f64 - pairs * p).abs() <= 4.0 * sd);
    }

    #[test]
    fn chung_lu_two_nodes() {
        for seed in 0..20 {
            match gen_chung_lu(&[1.0, 1.0], seed) {
                Ok(g) => assert_eq!(g.num_edges(), 1),
                Err(SynthError::Graph(GraphError::NoEdges)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        // w_u w_v / Σw = 6 / 5 is capped at 1
        assert_eq!(gen_chung_lu(&[2.0, 3.0], 0).unwrap().num_edges(), 1);
        assert!(gen_chung_lu(&[1.0, 0.0], 0).is_err());
    }

    #[test]
    fn chung_lu_power_law_is_skewed() {
        let w = power_law_weights(9_200, 1.8, 9.6);
        let g = gen_chung_lu(&w, 11).unwrap();
        let mean = 2.0 * g.num_edges() as f64 / g.num_nodes() as f64;
        assert!(g.max_degree() as f64 > 10.0 * mean);
    }

    #[test]
    fn balanced_types() {
        let g = gen_er(10, 0.5, 2).unwrap();
        assert_eq!(
            type_sizes(&assign_types_uniform(&g, 5, 1).unwrap()),
            vec![2; 5]
        );
        assert_eq!(
            type_sizes(&assign_types_uniform(&g, 3, 1).unwrap()),
            vec![4, 3, 3]
        );
        let one = assign_types_uniform(&g, 1, 1).unwrap();
        assert!(one.node_types().iter().all(|&t| t == 1));
        assert!(matches!(
            assign_types_uniform(&g, 11, 1),
            Err(SynthError::TooManyTypes { .. })
        ));
    }

    #[test]
    fn generate_is_deterministic() {
        let spec = GenSpec {
            model: Model::ChungLu {
                exponent: 2.5,
                avg_degree: 6.0,
            },
            n: 500,
            num_types: 4,
            seed: 99,
        };
        assert_eq!(spec.generate().unwrap(), spec.generate().unwrap());
    }
}
