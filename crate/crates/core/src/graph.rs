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

//! Immutable heterogeneous graph in compressed adjacency form.
//!
//! Nodes are dense ids `0..N`, node types are dense ids `1..=L`. Every
//! undirected edge has a stable id `0..M` (ascending by its endpoint pair)
//! and an orientation `(i, j)` with `deg(i) <= deg(j)`, ties broken by the
//! smaller id. Neighbor blocks are strictly ascending.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use thiserror::Error;

pub type NodeId = u32;
pub type TypeId = u16;

/// Largest type id representable in a motif key.
pub const MAX_TYPES: usize = 4095;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("{source_name}:{line}: {msg}")]
    Parse {
        source_name: String,
        line: usize,
        msg: String,
    },
    #[error("node {0} appears in the edge list but has no type")]
    MissingType(u64),
    #[error("graph has no edges")]
    NoEdges,
    #[error("edge endpoint {node} out of range for {num_nodes} nodes")]
    NodeOutOfRange { node: NodeId, num_nodes: usize },
    #[error("node {node} has type {ty}, expected a value in 1..={num_types}")]
    InvalidType {
        node: NodeId,
        ty: TypeId,
        num_types: usize,
    },
    #[error("{0} node types exceed the supported maximum of {MAX_TYPES}")]
    TooManyTypes(usize),
    #[error("graph must have at least one node type")]
    NoTypes,
    #[error("type vector has length {got}, expected {expected}")]
    TypeLength { got: usize, expected: usize },
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// Cleanup performed while building a graph from raw edges.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeteroGraph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
    node_type: Vec<TypeId>,
    num_types: usize,
    edges: Vec<(NodeId, NodeId)>,
    edge_type: Option<Vec<u32>>,
    edge_type_labels: Vec<String>,
    node_labels: Vec<u64>,
    type_labels: Vec<String>,
}

struct RawEdge {
    a: NodeId,
    b: NodeId,
    ty: Option<u32>,
}

impl HeteroGraph {
    /// Builds a graph on nodes `0..node_types.len()` with types in
    /// `1..=num_types`. Self-loops and duplicate edges are dropped.
    pub fn new(
        num_types: usize,
        node_types: Vec<TypeId>,
        edges: &[(NodeId, NodeId)],
    ) -> Result<Self, GraphError> {
        Self::with_report(num_types, node_types, edges).map(|(g, _)| g)
    }

    pub fn with_report(
        num_types: usize,
        node_types: Vec<TypeId>,
        edges: &[(NodeId, NodeId)],
    ) -> Result<(Self, LoadReport), GraphError> {
        let n = node_types.len();
        let raw = edges
            .iter()
            .map(|&(a, b)| RawEdge { a, b, ty: None })
            .collect();
        let node_labels = (0..n as u64).collect();
        let type_labels = (1..=num_types).map(|t| t.to_string()).collect();
        build(
            num_types,
            node_types,
            raw,
            node_labels,
            type_labels,
            Vec::new(),
        )
    }

    /// Same structure and labels, different node typing.
    pub fn with_node_types(
        &self,
        num_types: usize,
        node_types: Vec<TypeId>,
    ) -> Result<Self, GraphError> {
        if node_types.len() != self.num_nodes() {
            return Err(GraphError::TypeLength {
                got: node_types.len(),
                expected: self.num_nodes(),
            });
        }
        validate_types(num_types, &node_types)?;
        Ok(Self {
            node_type: node_types,
            num_types,
            type_labels: (1..=num_types).map(|t| t.to_string()).collect(),
            ..self.clone()
        })
    }

    /// All node types collapsed to a single type.
    pub fn untyped(&self) -> Self {
        self.with_node_types(1, vec![1; self.num_nodes()])
            .expect("single type is always valid")
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.node_type.len()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn num_types(&self) -> usize {
        self.num_types
    }

    #[inline]
    pub fn neighbors(&self, node: NodeId) -> &[NodeId] {
        let node = node as usize;
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    #[inline]
    pub fn degree(&self, node: NodeId) -> usize {
        let node = node as usize;
        self.offsets[node + 1] - self.offsets[node]
    }

    #[inline]
    pub fn node_type(&self, node: NodeId) -> TypeId {
        self.node_type[node as usize]
    }

    pub fn node_types(&self) -> &[TypeId] {
        &self.node_type
    }

    /// Number of neighbors of `node` having type `ty`.
    pub fn typed_degree(&self, node: NodeId, ty: TypeId) -> usize {
        assert!(
            (node as usize) < self.num_nodes(),
            "node {node} out of range"
        );
        assert!(
            ty >= 1 && (ty as usize) <= self.num_types,
            "type {ty} out of range 1..={}",
            self.num_types
        );
        self.neighbors(node)
            .iter()
            .filter(|&&k| self.node_type[k as usize] == ty)
            .count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_nodes() as NodeId)
            .map(|v| self.degree(v))
            .max()
            .unwrap_or(0)
    }

    /// Oriented endpoints of edge `id`.
    #[inline]
    pub fn edge(&self, id: usize) -> (NodeId, NodeId) {
        self.edges[id]
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn edge_type(&self, id: usize) -> Option<u32> {
        self.edge_type.as_ref().map(|t| t[id])
    }

    pub fn num_edge_types(&self) -> usize {
        self.edge_type_labels.len()
    }

    /// Original (input) id of a dense node.
    pub fn node_label(&self, node: NodeId) -> u64 {
        self.node_labels[node as usize]
    }

    /// Original label of a dense type id.
    pub fn type_label(&self, ty: TypeId) -> &str {
        &self.type_labels[ty as usize - 1]
    }

    pub fn type_labels(&self) -> &[String] {
        &self.type_labels
    }

    /// Loads an edge list and a node type file.
    ///
    /// Edge lines are `src dst [edge_type]`, type lines are `node label`.
    /// Tokens may be separated by whitespace or commas; `#` starts a comment.
    pub fn load(
        edges_path: impl AsRef<Path>,
        types_path: impl AsRef<Path>,
    ) -> Result<(Self, LoadReport), GraphError> {
        let open = |p: &Path| {
            File::open(p)
                .map(BufReader::new)
                .map_err(|source| GraphError::Io {
                    path: p.display().to_string(),
                    source,
                })
        };
        let (ep, tp) = (edges_path.as_ref(), types_path.as_ref());
        Self::load_from_readers(
            open(ep)?,
            &ep.display().to_string(),
            open(tp)?,
            &tp.display().to_string(),
        )
    }

    pub fn load_from_readers(
        edges: impl BufRead,
        edges_name: &str,
        types: impl BufRead,
        types_name: &str,
    ) -> Result<(Self, LoadReport), GraphError> {
        let mut raw_types: BTreeMap<u64, String> = BTreeMap::new();
        for (line_no, line) in types.lines().enumerate() {
            let line = line.map_err(|source| GraphError::Io {
                path: types_name.to_string(),
                source,
            })?;
            let tokens = tokenize(&line);
            if tokens.is_empty() {
                continue;
            }
            let parse_err = |msg: String| GraphError::Parse {
                source_name: types_name.to_string(),
                line: line_no + 1,
                msg,
            };
            if tokens.len() < 2 {
                return Err(parse_err("expected `node_id type_label`".into()));
            }
            let node = parse_id(tokens[0]).map_err(parse_err)?;
            let label = tokens[1].to_string();
            match raw_types.get(&node) {
                Some(prev) if *prev != label => {
                    return Err(parse_err(format!(
                        "node {node} typed both `{prev}` and `{label}`"
                    )))
                }
                Some(_) => {}
                None => {
                    raw_types.insert(node, label);
                }
            }
        }

        let mut raw_edges: Vec<(u64, u64, Option<String>)> = Vec::new();
        for (line_no, line) in edges.lines().enumerate() {
            let line = line.map_err(|source| GraphError::Io {
                path: edges_name.to_string(),
                source,
            })?;
            let tokens = tokenize(&line);
            if tokens.is_empty() {
                continue;
            }
            let parse_err = |msg: String| GraphError::Parse {
                source_name: edges_name.to_string(),
                line: line_no + 1,
                msg,
            };
            if tokens.len() < 2 {
                return Err(parse_err("expected `src dst [edge_type]`".into()));
            }
            let a = parse_id(tokens[0]).map_err(parse_err)?;
            let b = parse_id(tokens[1]).map_err(parse_err)?;
            raw_edges.push((a, b, tokens.get(2).map(|s| s.to_string())));
        }
        if raw_edges.is_empty() {
            return Err(GraphError::NoEdges);
        }

        let mut ids: BTreeSet<u64> = raw_types.keys().copied().collect();
        for &(a, b, _) in &raw_edges {
            for v in [a, b] {
                if !raw_types.contains_key(&v) {
                    return Err(GraphError::MissingType(v));
                }
                ids.insert(v);
            }
        }
        let node_labels: Vec<u64> = ids.into_iter().collect();
        let dense = |raw: u64| node_labels.binary_search(&raw).unwrap() as NodeId;

        let type_labels = sorted_labels(raw_types.values());
        if type_labels.len() > MAX_TYPES {
            return Err(GraphError::TooManyTypes(type_labels.len()));
        }
        let node_types: Vec<TypeId> = node_labels
            .iter()
            .map(|v| {
                let label = &raw_types[v];
                type_labels.iter().position(|l| l == label).unwrap() as TypeId + 1
            })
            .collect();

        let edge_type_labels = sorted_labels(raw_edges.iter().filter_map(|e| e.2.as_ref()));
        let has_edge_types = raw_edges.iter().any(|e| e.2.is_some());
        let raw = raw_edges
            .iter()
            .map(|(a, b, ty)| RawEdge {
                a: dense(*a),
                b: dense(*b),
                ty: if has_edge_types {
                    Some(
                        ty.as_ref()
                            .and_then(|t| edge_type_labels.iter().position(|l| l == t))
                            .unwrap_or(0) as u32,
                    )
                } else {
                    None
                },
            })
            .collect();
        build(
            type_labels.len(),
            node_types,
            raw,
            node_labels,
            type_labels,
            edge_type_labels,
        )
    }

    /// Writes the graph in the same text formats [`HeteroGraph::load`] reads.
    pub fn write(
        &self,
        edges_path: impl AsRef<Path>,
        types_path: impl AsRef<Path>,
    ) -> io::Result<()> {
        let mut out = BufWriter::new(File::create(edges_path)?);
        self.write_edges(&mut out)?;
        out.flush()?;
        let mut out = BufWriter::new(File::create(types_path)?);
        self.write_types(&mut out)?;
        out.flush()
    }

    pub fn write_edges(&self, out: &mut impl Write) -> io::Result<()> {
        for (id, &(i, j)) in self.edges.iter().enumerate() {
            let (a, b) = (self.node_label(i.min(j)), self.node_label(i.max(j)));
            match self.edge_type(id) {
                Some(t) => writeln!(out, "{a} {b} {}", self.edge_type_labels[t as usize])?,
                None => writeln!(out, "{a} {b}")?,
            }
        }
        Ok(())
    }

    pub fn write_types(&self, out: &mut impl Write) -> io::Result<()> {
        for v in 0..self.num_nodes() as NodeId {
            writeln!(
                out,
                "{} {}",
                self.node_label(v),
                self.type_label(self.node_type(v))
            )?;
        }
        Ok(())
    }
}

fn tokenize(line: &str) -> Vec<&str> {
    let line = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_id(token: &str) -> Result<u64, String> {
    token
        .parse::<u64>()
        .map_err(|_| format!("`{token}` is not a non-negative integer node id"))
}

/// Distinct labels, numerically ordered when every label is an integer.
fn sorted_labels<'a>(labels: impl Iterator<Item = &'a String>) -> Vec<String> {
    let distinct: BTreeSet<&String> = labels.collect();
    let mut out: Vec<String> = distinct.into_iter().cloned().collect();
    if out.iter().all(|l| l.parse::<i64>().is_ok()) {
        out.sort_by_key(|l| l.parse::<i64>().unwrap());
    }
    out
}

fn validate_types(num_types: usize, node_types: &[TypeId]) -> Result<(), GraphError> {
    if num_types == 0 {
        return Err(GraphError::NoTypes);
    }
    if num_types > MAX_TYPES {
        return Err(GraphError::TooManyTypes(num_types));
    }
    for (v, &ty) in node_types.iter().enumerate() {
        if ty == 0 || ty as usize > num_types {
            return Err(GraphError::InvalidType {
                node: v as NodeId,
                ty,
                num_types,
            });
        }
    }
    Ok(())
}

fn build(
    num_types: usize,
    node_type: Vec<TypeId>,
    raw: Vec<RawEdge>,
    node_labels: Vec<u64>,
    type_labels: Vec<String>,
    edge_type_labels: Vec<String>,
) -> Result<(HeteroGraph, LoadReport), GraphError> {
    let n = node_type.len();
    validate_types(num_types, &node_type)?;

    let mut report = LoadReport::default();
    let mut pairs: Vec<(NodeId, NodeId, Option<u32>)> = Vec::with_capacity(raw.len());
    for e in raw {
        for node in [e.a, e.b] {
            if node as usize >= n {
                return Err(GraphError::NodeOutOfRange { node, num_nodes: n });
            }
        }
        if e.a == e.b {
            report.self_loops += 1;
            continue;
        }
        pairs.push((e.a.min(e.b), e.a.max(e.b), e.ty));
    }
    // stable: the first occurrence of a duplicate keeps its edge type
    pairs.sort_by_key(|&(a, b, _)| (a, b));
    let before = pairs.len();
    pairs.dedup_by_key(|&mut (a, b, _)| (a, b));
    report.duplicate_edges = before - pairs.len();
    if pairs.is_empty() {
        return Err(GraphError::NoEdges);
    }
    if report.self_loops > 0 || report.duplicate_edges > 0 {
        log::warn!(
            "dropped {} self-loops and {} duplicate edges",
            report.self_loops,
            report.duplicate_edges
        );
    }

    let mut degree = vec![0usize; n];
    for &(a, b, _) in &pairs {
        degree[a as usize] += 1;
        degree[b as usize] += 1;
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    for d in &degree {
        offsets.push(offsets.last().unwrap() + d);
    }
    // Pairs are sorted by (min, max), so each block receives its smaller
    // neighbors first and then its larger ones, both ascending.
    let mut cursor = offsets[..n].to_vec();
    let mut neighbors = vec![0 as NodeId; 2 * pairs.len()];
    for &(a, b, _) in &pairs {
        neighbors[cursor[a as usize]] = b;
        cursor[a as usize] += 1;
        neighbors[cursor[b as usize]] = a;
        cursor[b as usize] += 1;
    }

    let edges = pairs
        .iter()
        .map(|&(a, b, _)| {
            let (da, db) = (degree[a as usize], degree[b as usize]);
            if da <= db {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    let edge_type = if pairs.iter().any(|p| p.2.is_some()) {
        Some(pairs.iter().map(|p| p.2.unwrap_or(0)).collect())
    } else {
        None
    };

    Ok((
        HeteroGraph {
            offsets,
            neighbors,
            node_type,
            num_types,
            edges,
            edge_type,
            edge_type_labels,
            node_labels,
            type_labels,
        },
        report,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load_str(edges: &str, types: &str) -> Result<(HeteroGraph, LoadReport), GraphError> {
        HeteroGraph::load_from_readers(edges.as_bytes(), "edges", types.as_bytes(), "types")
    }

    #[test]
    fn triangle_file() {
        let (g, report) = load_str("0 1\n1 2\n0 2\n", "0 1\n1 1\n2 1\n").unwrap();
        assert_eq!((g.num_nodes(), g.num_edges(), g.num_types()), (3, 3, 1));
        assert_eq!(report, LoadReport::default());
        assert_eq!(g.typed_degree(0, 1), 2);
        assert_eq!(g.max_degree(), 2);
    }

    #[test]
    fn duplicate_edge_counted_once() {
        let (g, report) = load_str("0 1\n0 1\n", "0 a\n1 a\n").unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(report.duplicate_edges, 1);
        // reversed duplicates are the same undirected edge
        let (g, report) = load_str("0 1\n1 0\n", "0 a\n1 a\n").unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(report.duplicate_edges, 1);
    }

    #[test]
    fn self_loops_dropped() {
        let (g, report) = load_str("0 0\n0 1\n", "0 a\n1 a\n").unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(report.self_loops, 1);
    }

    #[test]
    fn missing_type_names_node() {
        let err = load_str("0 1\n1 17\n", "0 a\n1 a\n").unwrap_err();
        assert!(matches!(err, GraphError::MissingType(17)), "{err}");
    }

    #[test]
    fn empty_edges_rejected() {
        let err = load_str("# nothing\n\n", "0 a\n").unwrap_err();
        assert!(matches!(err, GraphError::NoEdges));
        let err = load_str("0 0\n", "0 a\n").unwrap_err();
        assert!(matches!(err, GraphError::NoEdges));
    }

    #[test]
    fn parse_error_has_line_number() {
        let err = load_str("0 1\n# c\n1 x\n", "0 a\n1 a\n").unwrap_err();
        match err {
            GraphError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn labels_densified_and_kept() {
        let (g, _) = load_str(
            "10 30\n30 20\n",
            "10 paper\n20 author\n30 paper\n40 venue\n",
        )
        .unwrap();
        // isolated node 40 is kept
        assert_eq!(g.num_nodes(), 4);
        assert_eq!(g.num_types(), 3);
        assert_eq!(g.type_labels(), ["author", "paper", "venue"]);
        assert_eq!(g.node_label(0), 10);
        assert_eq!(g.type_label(g.node_type(0)), "paper");
        assert_eq!(g.degree(3), 0);
        // numeric labels sort numerically
        let (g, _) = load_str("0 1\n1 2\n", "0 10\n1 9\n2 100\n").unwrap();
        assert_eq!(g.type_labels(), ["9", "10", "100"]);
    }

    #[test]
    fn star_typed_degree() {
        let g = HeteroGraph::new(2, vec![1, 1, 1, 2], &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(g.typed_degree(0, 1), 2);
        assert_eq!(g.typed_degree(0, 2), 1);
    }

    #[test]
    fn orientation_and_symmetry() {
        let g = HeteroGraph::new(1, vec![1; 5], &[(4, 0), (0, 1), (0, 2), (3, 2), (1, 2)]).unwrap();
        for &(i, j) in g.edges() {
            let (di, dj) = (g.degree(i), g.degree(j));
            assert!(di < dj || (di == dj && i < j));
        }
        for v in 0..5 {
            let nb = g.neighbors(v);
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &u in nb {
                assert!(g.neighbors(u).contains(&v));
                assert!(g.has_edge(u, v));
            }
        }
        assert!(!g.has_edge(4, 3));
    }

    #[test]
    fn path_max_degree() {
        let g = HeteroGraph::new(1, vec![1; 3], &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(g.max_degree(), 2);
    }

    #[test]
    fn rejects_bad_types() {
        assert!(matches!(
            HeteroGraph::new(2, vec![1, 3], &[(0, 1)]),
            Err(GraphError::InvalidType { node: 1, ty: 3, .. })
        ));
        assert!(matches!(
            HeteroGraph::new(2, vec![0, 1], &[(0, 1)]),
            Err(GraphError::InvalidType { node: 0, .. })
        ));
        assert!(matches!(
            HeteroGraph::new(MAX_TYPES + 1, vec![1, 1], &[(0, 1)]),
            Err(GraphError::TooManyTypes(_))
        ));
    }

    #[test]
    fn edge_types_round_trip() {
        let (g, _) = load_str("0 1 cites\n1 2 wrote\n2 0\n", "0 a\n1 b\n2 a\n").unwrap();
        assert_eq!(g.num_edge_types(), 2);
        let mut e = Vec::new();
        let mut t = Vec::new();
        g.write_edges(&mut e).unwrap();
        g.write_types(&mut t).unwrap();
        let (h, _) = HeteroGraph::load_from_readers(&e[..], "e", &t[..], "t").unwrap();
        assert_eq!(g, h);
    }

    #[test]
    #[should_panic]
    fn typed_degree_out_of_range_type() {
        let g = HeteroGraph::new(1, vec![1, 1], &[(0, 1)]).unwrap();
        g.typed_degree(0, 2);
    }
}
