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

//! Brute-force reference counter.
//!
//! Enumerates every node subset of size 2 to 4 explicitly, checks induced
//! connectivity and classifies the induced subgraph from its degree
//! sequence. Shares nothing with the engine except the key codec; use it
//! only on small graphs.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::codec::{Graphlet, GraphletKey, MotifKey, Orbit};
use crate::engine::{CountResult, EdgeCounts};
use crate::graph::{HeteroGraph, NodeId};

pub const DEFAULT_CAP: usize = 60;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("graph has {nodes} nodes, oracle cap is {cap}")]
    TooLarge { nodes: usize, cap: usize },
}

/// One classified node set containing the edge of interest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitClassification {
    pub nodes: Vec<NodeId>,
    pub orbit: Orbit,
    pub key: MotifKey,
}

/// How the other nodes relate to an edge `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgePartition {
    pub triangle: usize,
    pub star_i: usize,
    pub star_j: usize,
    pub independent: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Oracle {
    cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self { cap: DEFAULT_CAP }
    }
}

/// Induced subgraph on up to four nodes. `adj[a]` is a bitmask over
/// positions; position 0 and 1 are the endpoints of the edge of interest.
struct Induced {
    adj: [u8; 4],
    len: usize,
}

impl Induced {
    fn new(g: &HeteroGraph, nodes: &[NodeId]) -> Self {
        let mut adj = [0u8; 4];
        for a in 0..nodes.len() {
            for b in (a + 1)..nodes.len() {
                if g.has_edge(nodes[a], nodes[b]) {
                    adj[a] |= 1 << b;
                    adj[b] |= 1 << a;
                }
            }
        }
        Self {
            adj,
            len: nodes.len(),
        }
    }

    fn degree(&self, pos: usize) -> u32 {
        self.adj[pos].count_ones()
    }

    fn num_edges(&self) -> u32 {
        (0..self.len).map(|p| self.degree(p)).sum::<u32>() / 2
    }

    fn connected(&self) -> bool {
        let full = (1u8 << self.len) - 1;
        let mut seen = 1u8;
        loop {
            let mut next = seen;
            for p in 0..self.len {
                if seen & (1 << p) != 0 {
                    next |= self.adj[p];
                }
            }
            if next == seen {
                return seen == full;
            }
            seen = next;
        }
    }

    fn graphlet(&self) -> Graphlet {
        let m = self.num_edges();
        let max_deg = (0..self.len).map(|p| self.degree(p)).max().unwrap_or(0);
        match (self.len, m) {
            (2, 1) => Graphlet::Edge,
            (3, 2) => Graphlet::Wedge,
            (3, 3) => Graphlet::Triangle,
            (4, 3) if max_deg == 3 => Graphlet::Star,
            (4, 3) => Graphlet::Path,
            (4, 4) if max_deg == 2 => Graphlet::Cycle,
            (4, 4) => Graphlet::TailedTriangle,
            (4, 5) => Graphlet::ChordalCycle,
            (4, 6) => Graphlet::Clique,
            _ => unreachable!("disconnected or invalid induced subgraph"),
        }
    }

    /// Orbit of the edge between positions 0 and 1.
    fn edge_orbit(&self) -> Orbit {
        debug_assert!(self.adj[0] & 0b10 != 0);
        let (di, dj) = (self.degree(0), self.degree(1));
        let (lo, hi) = (di.min(dj), di.max(dj));
        match self.graphlet() {
            Graphlet::Edge => Orbit::Edge,
            Graphlet::Wedge => Orbit::Wedge,
            Graphlet::Triangle => Orbit::Triangle,
            Graphlet::Star => Orbit::Star,
            // an end edge touches a leaf
            Graphlet::Path if lo == 1 => Orbit::PathEdge,
            Graphlet::Path => Orbit::PathCenter,
            Graphlet::Cycle => Orbit::Cycle,
            // degrees 3,2,2,1: the tail touches the leaf, the edge opposite
            // the degree-3 node has two degree-2 endpoints
            Graphlet::TailedTriangle if lo == 1 => Orbit::TailedTail,
            Graphlet::TailedTriangle if hi == 3 => Orbit::TailedTriEdge,
            Graphlet::TailedTriangle => Orbit::TailedCenter,
            // the chord joins the two degree-3 nodes
            Graphlet::ChordalCycle if lo == 3 => Orbit::ChordalCenter,
            Graphlet::ChordalCycle => Orbit::ChordalEdge,
            Graphlet::Clique => Orbit::Clique,
        }
    }
}

impl Oracle {
    pub fn with_cap(cap: usize) -> Self {
        Self { cap }
    }

    fn check(&self, g: &HeteroGraph) -> Result<(), OracleError> {
        if g.num_nodes() > self.cap {
            Err(OracleError::TooLarge {
                nodes: g.num_nodes(),
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }

    /// Every connected induced subgraph on 2 to 4 nodes that contains both
    /// endpoints of edge `edge_id`, with its orbit.
    pub fn classify_edge(
        &self,
        g: &HeteroGraph,
        edge_id: usize,
    ) -> Result<Vec<OrbitClassification>, OracleError> {
        self.check(g)?;
        let (i, j) = g.edge(edge_id);
        let others: Vec<NodeId> = (0..g.num_nodes() as NodeId)
            .filter(|&v| v != i && v != j)
            .collect();
        let mut out = Vec::new();
        let mut push = |nodes: Vec<NodeId>| {
            let sub = Induced::new(g, &nodes);
            if sub.connected() {
                let orbit = sub.edge_orbit();
                let types: Vec<_> = nodes.iter().map(|&v| g.node_type(v)).collect();
                out.push(OrbitClassification {
                    key: MotifKey::encode(orbit, &types),
                    orbit,
                    nodes,
                });
            }
        };
        push(vec![i, j]);
        for &k in &others {
            push(vec![i, j, k]);
        }
        for (a, &k) in others.iter().enumerate() {
            for &r in &others[a + 1..] {
                push(vec![i, j, k, r]);
            }
        }
        Ok(out)
    }

    pub fn edge_counts(&self, g: &HeteroGraph, edge_id: usize) -> Result<EdgeCounts, OracleError> {
        let mut counts: BTreeMap<MotifKey, u64> = BTreeMap::new();
        for c in self.classify_edge(g, edge_id)? {
            *counts.entry(c.key).or_insert(0) += 1;
        }
        Ok(EdgeCounts {
            edge_id,
            counts: counts.into_iter().collect(),
        })
    }

    /// Each connected induced typed subgraph on 2 to 4 nodes, counted once.
    pub fn global_counts(
        &self,
        g: &HeteroGraph,
    ) -> Result<BTreeMap<GraphletKey, u64>, OracleError> {
        self.check(g)?;
        let n = g.num_nodes() as NodeId;
        let mut counts = BTreeMap::new();
        let mut visit = |nodes: &[NodeId]| {
            let sub = Induced::new(g, nodes);
            if sub.connected() {
                let types: Vec<_> = nodes.iter().map(|&v| g.node_type(v)).collect();
                *counts
                    .entry(GraphletKey::encode(sub.graphlet(), &types))
                    .or_insert(0) += 1;
            }
        };
        for a in 0..n {
            for b in (a + 1)..n {
                visit(&[a, b]);
                for c in (b + 1)..n {
                    visit(&[a, b, c]);
                    for d in (c + 1)..n {
                        visit(&[a, b, c, d]);
                    }
                }
            }
        }
        Ok(counts)
    }

    /// Membership of every other node relative to edge `edge_id`.
    pub fn edge_partition(
        &self,
        g: &HeteroGraph,
        edge_id: usize,
    ) -> Result<EdgePartition, OracleError> {
        self.check(g)?;
        let (i, j) = g.edge(edge_id);
        let mut p = EdgePartition::default();
        for v in 0..g.num_nodes() as NodeId {
            if v == i || v == j {
                continue;
            }
            match (g.has_edge(v, i), g.has_edge(v, j)) {
                (true, true) => p.triangle += 1,
                (true, false) => p.star_i += 1,
                (false, true) => p.star_j += 1,
                (false, false) => p.independent += 1,
            }
        }
        Ok(p)
    }
}

/// A per-edge disagreement between the engine and the oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub edge_id: usize,
    pub key: MotifKey,
    pub engine: u64,
    pub oracle: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub edges_checked: usize,
    pub mismatches: Vec<Mismatch>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compares engine output edge by edge against the oracle.
pub fn verify(
    oracle: &Oracle,
    g: &HeteroGraph,
    result: &CountResult,
) -> Result<VerifyReport, OracleError> {
    let mut report = VerifyReport::default();
    for (edge_id, engine) in result.per_edge.iter().enumerate() {
        let expected = oracle.edge_counts(g, edge_id)?;
        let mut keys: Vec<MotifKey> = engine
            .iter()
            .chain(expected.iter())
            .map(|(k, _)| k)
            .collect();
        keys.sort_unstable();
        keys.dedup();
        for key in keys {
            let (e, o) = (engine.get(key), expected.get(key));
            if e != o {
                report.mismatches.push(Mismatch {
                    edge_id,
                    key,
                    engine: e,
                    oracle: o,
                });
            }
        }
        report.edges_checked += 1;
    }
    Ok(report)
}
