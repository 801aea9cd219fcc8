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

//! Sparse per-edge count files.
//!
//! Two text files describe a run:
//!
//! - counts: one line per edge, `u v id:count id:count ...`, where `u < v`
//!   are the original node ids, lines sorted by `(u, v)`, pairs by id;
//! - lookup: one line per motif, `id name k |E(H)| t1,t2,...`.
//!
//! Ids are consecutive from 1 in canonical key order over every motif that
//! occurs somewhere, so the files are a pure function of the counts.

use std::collections::BTreeSet;
use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::codec::{Shape, TypedKey};
use crate::graph::{HeteroGraph, TypeId};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: &'static str,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One parsed line of a counts file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseRecord<S: Shape> {
    pub u: u64,
    pub v: u64,
    pub counts: Vec<(TypedKey<S>, u64)>,
}

/// Writes the counts and lookup files for per-edge counts given in edge-id
/// order.
pub fn write_sparse<'a, S: Shape>(
    g: &HeteroGraph,
    per_edge: impl IntoIterator<Item = &'a [(TypedKey<S>, u64)]>,
    counts_out: &mut impl Write,
    lookup_out: &mut impl Write,
) -> io::Result<()> {
    let per_edge: Vec<&[(TypedKey<S>, u64)]> = per_edge.into_iter().collect();
    let ids: Vec<TypedKey<S>> = per_edge
        .iter()
        .flat_map(|e| e.iter().map(|&(k, _)| k))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let id_of = |k: TypedKey<S>| ids.binary_search(&k).unwrap() + 1;

    let mut order: Vec<(u64, u64, usize)> = per_edge
        .iter()
        .enumerate()
        .map(|(e, _)| {
            let (i, j) = g.edge(e);
            let (a, b) = (g.node_label(i), g.node_label(j));
            (a.min(b), a.max(b), e)
        })
        .collect();
    order.sort_unstable();

    let mut line = String::new();
    for (u, v, e) in order {
        line.clear();
        use std::fmt::Write as _;
        write!(line, "{u} {v}").unwrap();
        // keys are sorted per edge and ids follow key order
        for &(k, c) in per_edge[e] {
            write!(line, " {}:{}", id_of(k), c).unwrap();
        }
        line.push('\n');
        counts_out.write_all(line.as_bytes())?;
    }

    for (idx, k) in ids.iter().enumerate() {
        let d = k.describe();
        writeln!(
            lookup_out,
            "{} {} {} {} {}",
            idx + 1,
            d.name,
            d.nodes,
            d.edges,
            d.type_list()
        )?;
    }
    Ok(())
}

/// Parses a lookup file into keys indexed by `id - 1`.
pub fn read_lookup<S: Shape>(lookup: impl BufRead) -> Result<Vec<TypedKey<S>>, FormatError> {
    let mut keys = Vec::new();
    for (n, line) in lookup.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| FormatError::Parse {
            file: "lookup",
            line: n + 1,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, got {}", fields.len())));
        }
        let id: usize = fields[0].parse().map_err(|_| err("bad id".into()))?;
        if id != keys.len() + 1 {
            return Err(err(format!("ids must be consecutive, got {id}")));
        }
        let shape =
            S::from_name(fields[1]).ok_or_else(|| err(format!("unknown motif `{}`", fields[1])))?;
        let types: Vec<TypeId> = fields[4]
            .split(',')
            .map(|t| t.parse().map_err(|_| err(format!("bad type `{t}`"))))
            .collect::<Result<_, _>>()?;
        let key = TypedKey::try_encode(shape, &types).map_err(|e| err(e.to_string()))?;
        if fields[2] != shape.nodes().to_string() || fields[3] != shape.edges().to_string() {
            return Err(err(format!("size fields disagree with `{}`", fields[1])));
        }
        keys.push(key);
    }
    Ok(keys)
}

/// Parses a counts file against the keys from [`read_lookup`].
pub fn read_counts<S: Shape>(
    counts: impl BufRead,
    keys: &[TypedKey<S>],
) -> Result<Vec<SparseRecord<S>>, FormatError> {
    let mut out = Vec::new();
    for (n, line) in counts.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: String| FormatError::Parse {
            file: "counts",
            line: n + 1,
            msg,
        };
        let mut fields = line.split_whitespace();
        let mut node = || -> Result<u64, FormatError> {
            fields
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| err("missing or bad node id".into()))
        };
        let (u, v) = (node()?, node()?);
        let mut pairs = Vec::new();
        for field in fields {
            let (id, count) = field
                .split_once(':')
                .ok_or_else(|| err(format!("bad pair `{field}`")))?;
            let id: usize = id.parse().map_err(|_| err(format!("bad id `{id}`")))?;
            let count: u64 = count
                .parse()
                .map_err(|_| err(format!("bad count `{count}`")))?;
            let key = *id
                .checked_sub(1)
                .and_then(|i| keys.get(i))
                .ok_or_else(|| err(format!("unknown id {id}")))?;
            pairs.push((key, count));
        }
        out.push(SparseRecord {
            u,
            v,
            counts: pairs,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{MotifKey, Orbit};
    use crate::engine::{count_all, CountOptions};

    #[test]
    fn triangle_file_layout() {
        let g = HeteroGraph::new(1, vec![1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = count_all(&g, CountOptions::default()).unwrap();
        let (mut counts, mut lookup) = (Vec::new(), Vec::new());
        write_sparse(
            &g,
            r.per_edge.iter().map(|e| e.counts.as_slice()),
            &mut counts,
            &mut lookup,
        )
        .unwrap();
        assert_eq!(
            String::from_utf8(counts).unwrap(),
            "0 1 1:1 2:1\n0 2 1:1 2:1\n1 2 1:1 2:1\n"
        );
        assert_eq!(
            String::from_utf8(lookup).unwrap(),
            "1 edge 2 1 1,1\n2 triangle 3 3 1,1,1\n"
        );
    }

    #[test]
    fn malformed_input() {
        let keys = read_lookup::<Orbit>("1 edge 2 1 1,1\n".as_bytes()).unwrap();
        assert_eq!(keys, vec![MotifKey::encode(Orbit::Edge, &[1, 1])]);
        assert!(read_counts("0 1 2:1\n".as_bytes(), &keys).is_err());
        assert!(read_counts("0 1 1-1\n".as_bytes(), &keys).is_err());
        assert!(read_counts("0 x 1:1\n".as_bytes(), &keys).is_err());
        assert!(read_lookup::<Orbit>("2 edge 2 1 1,1\n".as_bytes()).is_err());
        assert!(read_lookup::<Orbit>("1 edge 3 1 1,1\n".as_bytes()).is_err());
        assert!(read_lookup::<Orbit>("1 blob 2 1 1,1\n".as_bytes()).is_err());
    }
}
