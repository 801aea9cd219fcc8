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

//! Per-edge typed orbit counting.
//!
//! For an oriented edge `(i, j)` the neighborhood splits into
//!
//! - `T`: common neighbors of `i` and `j` (triangles),
//! - `S_i`: neighbors of `i` only, excluding `j` (wedges centered at `i`),
//! - `S_j`: neighbors of `j` only, excluding `i` (wedges centered at `j`).
//!
//! Scanning the neighbors of `S_i`, `S_j` and `T` yields the 4-path edge,
//! 4-cycle, tailed-triangle tail and center, chordal-cycle edge and 4-clique
//! orbits. The 4-path center, 4-star, tailed-triangle edge and
//! chordal-cycle center orbits then follow per type pair `(t, t')` from the
//! typed set sizes:
//!
//! ```text
//! path-center(t,t')    = |S_i^t||S_j^t'| + |S_i^t'||S_j^t|     - cycle
//! star(t,t')           = |S_i^t||S_i^t'| + |S_j^t||S_j^t'|     - tailed-tail
//! tailed-edge(t,t')    = |T^t|(|S_i^t'|+|S_j^t'|) + |T^t'|(|S_i^t|+|S_j^t|) - chordal-edge
//! chordal-center(t,t') = |T^t||T^t'|                           - clique
//! ```
//!
//! with the products replaced by `x*y` and `C(x, 2)` when `t = t'`. Every
//! subtracted count is looked up under the same key `{φ_i, φ_j, t, t'}`.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::{Mutex, OnceLock};
use std::time::Instant;

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::codec::{MotifKey, Orbit, Shape};
use crate::graph::{HeteroGraph, NodeId, TypeId};

/// Edges handed to a worker per queue pop.
const CHUNK_SIZE: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("edge {edge}: derived {orbit} count for types {types:?} is negative ({value})")]
    NegativeCount {
        edge: usize,
        orbit: &'static str,
        types: Vec<TypeId>,
        value: i64,
    },
    #[error("edge {edge}: count overflow")]
    Overflow { edge: usize },
    #[error("workers must be at least 1")]
    NoWorkers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
enum Mark {
    Unmarked,
    StarI,
    StarJ,
    Triangle,
}

/// Per-worker workspace, reused across edges.
///
/// Between edges every mark is [`Mark::Unmarked`] and all typed
/// cardinalities are zero; only the nodes listed in the three sets are ever
/// marked, so resetting costs `O(|T| + |S_i| + |S_j|)`.
pub struct Scratch {
    marks: Vec<Mark>,
    triangle: Vec<NodeId>,
    star_i: Vec<NodeId>,
    star_j: Vec<NodeId>,
    tri_cnt: Vec<u32>,
    si_cnt: Vec<u32>,
    sj_cnt: Vec<u32>,
    active: Vec<TypeId>,
    is_active: Vec<bool>,
    counts: FxHashMap<MotifKey, u64>,
}

impl Scratch {
    pub fn new(g: &HeteroGraph) -> Self {
        let l = g.num_types() + 1;
        Self {
            marks: vec![Mark::Unmarked; g.num_nodes()],
            triangle: Vec::new(),
            star_i: Vec::new(),
            star_j: Vec::new(),
            tri_cnt: vec![0; l],
            si_cnt: vec![0; l],
            sj_cnt: vec![0; l],
            active: Vec::new(),
            is_active: vec![false; l],
            counts: FxHashMap::default(),
        }
    }

    /// Common neighbors of the current edge.
    pub fn triangle_nodes(&self) -> &[NodeId] {
        &self.triangle
    }

    pub fn star_i_nodes(&self) -> &[NodeId] {
        &self.star_i
    }

    pub fn star_j_nodes(&self) -> &[NodeId] {
        &self.star_j
    }

    /// `|T^t|`, `|S_i^t|`, `|S_j^t|` for type `t`.
    pub fn typed_sizes(&self, t: TypeId) -> (u32, u32, u32) {
        let t = t as usize;
        (self.tri_cnt[t], self.si_cnt[t], self.sj_cnt[t])
    }

    /// Count accumulated so far under `key` for the current edge.
    pub fn count(&self, key: MotifKey) -> u64 {
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn is_clean(&self) -> bool {
        self.triangle.is_empty()
            && self.star_i.is_empty()
            && self.star_j.is_empty()
            && self.active.is_empty()
            && self.counts.is_empty()
            && self.marks.iter().all(|&m| m == Mark::Unmarked)
            && self
                .tri_cnt
                .iter()
                .chain(&self.si_cnt)
                .chain(&self.sj_cnt)
                .all(|&c| c == 0)
    }

    pub fn reset(&mut self) {
        for &v in self.triangle.iter().chain(&self.star_i).chain(&self.star_j) {
            self.marks[v as usize] = Mark::Unmarked;
        }
        for &t in &self.active {
            let t = t as usize;
            self.tri_cnt[t] = 0;
            self.si_cnt[t] = 0;
            self.sj_cnt[t] = 0;
            self.is_active[t] = false;
        }
        self.triangle.clear();
        self.star_i.clear();
        self.star_j.clear();
        self.active.clear();
        self.counts.clear();
    }

    #[inline]
    fn bump(&mut self, key: MotifKey, by: u64) {
        *self.counts.entry(key).or_insert(0) += by;
    }

    #[inline]
    fn activate(&mut self, t: TypeId) {
        if !self.is_active[t as usize] {
            self.is_active[t as usize] = true;
            self.active.push(t);
        }
    }
}

/// Sparse orbit counts of one edge, sorted by key, all counts positive.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeCounts {
    pub edge_id: usize,
    pub counts: Vec<(MotifKey, u64)>,
}

impl EdgeCounts {
    pub fn get(&self, key: MotifKey) -> u64 {
        self.counts
            .binary_search_by_key(&key, |&(k, _)| k)
            .map(|pos| self.counts[pos].1)
            .unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MotifKey, u64)> + '_ {
        self.counts.iter().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub workers: usize,
    /// Largest graphlet size to count, 3 or 4.
    pub max_k: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            workers: 1,
            max_k: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    /// Indexed by edge id.
    pub per_edge: Vec<EdgeCounts>,
    /// Every key with a positive count on some edge.
    pub motifs: BTreeSet<MotifKey>,
}

/// Builds `T`, `S_i`, `S_j` and their typed sizes for the oriented edge
/// `(i, j)`, and records the edge, wedge and triangle orbits.
pub fn classify_neighbors(g: &HeteroGraph, (i, j): (NodeId, NodeId), s: &mut Scratch) {
    // the full `is_clean` scan is O(N), too slow to run per edge
    debug_assert!(s.triangle.is_empty() && s.star_i.is_empty() && s.star_j.is_empty());
    for &k in g.neighbors(i) {
        if k != j {
            s.marks[k as usize] = Mark::StarI;
        }
    }
    for &k in g.neighbors(j) {
        if k == i {
            continue;
        }
        let t = g.node_type(k);
        if s.marks[k as usize] == Mark::StarI {
            s.marks[k as usize] = Mark::Triangle;
            s.triangle.push(k);
            s.tri_cnt[t as usize] += 1;
        } else {
            s.marks[k as usize] = Mark::StarJ;
            s.star_j.push(k);
            s.sj_cnt[t as usize] += 1;
        }
        s.activate(t);
    }
    for &k in g.neighbors(i) {
        if k != j && s.marks[k as usize] == Mark::StarI {
            let t = g.node_type(k);
            s.star_i.push(k);
            s.si_cnt[t as usize] += 1;
            s.activate(t);
        }
    }
    s.active.sort_unstable();

    let (ti, tj) = (g.node_type(i), g.node_type(j));
    s.bump(MotifKey::encode(Orbit::Edge, &[ti, tj]), 1);
    for idx in 0..s.active.len() {
        let t = s.active[idx];
        let (tri, si, sj) = s.typed_sizes(t);
        if tri > 0 {
            s.bump(MotifKey::encode(Orbit::Triangle, &[ti, tj, t]), tri as u64);
        }
        if si + sj > 0 {
            s.bump(
                MotifKey::encode(Orbit::Wedge, &[ti, tj, t]),
                (si + sj) as u64,
            );
        }
    }
}

/// 4-path edge, tailed-triangle tail and 4-cycle orbits from the wedge sets.
pub fn count_path_based(g: &HeteroGraph, (i, j): (NodeId, NodeId), s: &mut Scratch) {
    let (ti, tj) = (g.node_type(i), g.node_type(j));
    for idx in 0..s.star_i.len() {
        let k = s.star_i[idx];
        let tk = g.node_type(k);
        for &r in g.neighbors(k) {
            if r == i || r == j {
                continue;
            }
            let orbit = match s.marks[r as usize] {
                Mark::Unmarked => Orbit::PathEdge,
                Mark::StarI if r < k => Orbit::TailedTail,
                _ => continue,
            };
            s.bump(MotifKey::encode4(orbit, ti, tj, tk, g.node_type(r)), 1);
        }
    }
    for idx in 0..s.star_j.len() {
        let k = s.star_j[idx];
        let tk = g.node_type(k);
        for &r in g.neighbors(k) {
            if r == i || r == j {
                continue;
            }
            let orbit = match s.marks[r as usize] {
                Mark::Unmarked => Orbit::PathEdge,
                Mark::StarJ if r < k => Orbit::TailedTail,
                Mark::StarI => Orbit::Cycle,
                _ => continue,
            };
            s.bump(MotifKey::encode4(orbit, ti, tj, tk, g.node_type(r)), 1);
        }
    }
}

/// 4-clique, chordal-cycle edge and tailed-triangle center orbits from `T`.
pub fn count_triangle_based(g: &HeteroGraph, (i, j): (NodeId, NodeId), s: &mut Scratch) {
    let (ti, tj) = (g.node_type(i), g.node_type(j));
    for idx in 0..s.triangle.len() {
        let k = s.triangle[idx];
        let tk = g.node_type(k);
        for &r in g.neighbors(k) {
            if r == i || r == j {
                continue;
            }
            let orbit = match s.marks[r as usize] {
                Mark::Triangle if r < k => Orbit::Clique,
                Mark::Triangle => continue,
                Mark::StarI | Mark::StarJ => Orbit::ChordalEdge,
                Mark::Unmarked => Orbit::TailedCenter,
            };
            s.bump(MotifKey::encode4(orbit, ti, tj, tk, g.node_type(r)), 1);
        }
    }
}

fn choose2(x: i64) -> i64 {
    x * (x - 1) / 2
}

/// Adds the 4-path center, 4-star, tailed-triangle edge and chordal-cycle
/// center orbits for every pair of types present around the edge.
pub fn derive_constant_time(
    g: &HeteroGraph,
    edge_id: usize,
    s: &mut Scratch,
) -> Result<(), EngineError> {
    let (i, j) = g.edge(edge_id);
    let (ti, tj) = (g.node_type(i), g.node_type(j));
    let mut derived: Vec<(MotifKey, i64)> = Vec::new();
    for a in 0..s.active.len() {
        for b in a..s.active.len() {
            let (t, u) = (s.active[a], s.active[b]);
            let key = |o: Orbit| MotifKey::encode4(o, ti, tj, t, u);
            let size = |t: TypeId| {
                let (tri, si, sj) = s.typed_sizes(t);
                (tri as i64, si as i64, sj as i64)
            };
            let (tri_t, si_t, sj_t) = size(t);
            let (tri_u, si_u, sj_u) = size(u);
            let (path, star, tailed, chordal) = if t == u {
                (
                    si_t * sj_t,
                    choose2(si_t) + choose2(sj_t),
                    tri_t * (si_t + sj_t),
                    choose2(tri_t),
                )
            } else {
                (
                    si_t * sj_u + si_u * sj_t,
                    si_t * si_u + sj_t * sj_u,
                    tri_t * (si_u + sj_u) + tri_u * (si_t + sj_t),
                    tri_t * tri_u,
                )
            };
            for (orbit, total, known) in [
                (Orbit::PathCenter, path, Orbit::Cycle),
                (Orbit::Star, star, Orbit::TailedTail),
                (Orbit::TailedTriEdge, tailed, Orbit::ChordalEdge),
                (Orbit::ChordalCenter, chordal, Orbit::Clique),
            ] {
                let value = total - s.count(key(known)) as i64;
                if value < 0 {
                    return Err(EngineError::NegativeCount {
                        edge: edge_id,
                        orbit: orbit.name(),
                        types: key(orbit).types(),
                        value,
                    });
                }
                if value > 0 {
                    derived.push((key(orbit), value));
                }
            }
        }
    }
    for (key, value) in derived {
        s.bump(key, value as u64);
    }
    Ok(())
}

/// All typed orbit counts of edge `edge_id`. Leaves `s` clean.
pub fn count_edge(
    g: &HeteroGraph,
    edge_id: usize,
    s: &mut Scratch,
    max_k: usize,
) -> Result<EdgeCounts, EngineError> {
    let edge = g.edge(edge_id);
    classify_neighbors(g, edge, s);
    let derived = if max_k >= 4 {
        count_path_based(g, edge, s);
        count_triangle_based(g, edge, s);
        derive_constant_time(g, edge_id, s)
    } else {
        Ok(())
    };
    let result = derived.map(|()| {
        let mut counts: Vec<(MotifKey, u64)> = s.counts.iter().map(|(&k, &c)| (k, c)).collect();
        counts.sort_unstable_by_key(|&(k, _)| k);
        EdgeCounts { edge_id, counts }
    });
    s.reset();
    result
}

/// Counts every edge of `g` with `opts.workers` threads.
///
/// Workers pull fixed-size chunks of edge ids from a shared atomic cursor
/// and write each result into the slot of its edge id, so the output does
/// not depend on scheduling.
pub fn count_all(g: &HeteroGraph, opts: CountOptions) -> Result<CountResult, EngineError> {
    if opts.workers == 0 {
        return Err(EngineError::NoWorkers);
    }
    let start = Instant::now();
    let m = g.num_edges();

    let result = if opts.workers == 1 {
        let mut scratch = Scratch::new(g);
        let mut motifs = BTreeSet::new();
        let mut per_edge = Vec::with_capacity(m);
        for e in 0..m {
            let c = count_edge(g, e, &mut scratch, opts.max_k)?;
            motifs.extend(c.counts.iter().map(|&(k, _)| k));
            per_edge.push(c);
        }
        CountResult { per_edge, motifs }
    } else {
        let slots: Vec<OnceLock<EdgeCounts>> = (0..m).map(|_| OnceLock::new()).collect();
        let cursor = AtomicUsize::new(0);
        let stop = AtomicBool::new(false);
        let failure: Mutex<Option<EngineError>> = Mutex::new(None);

        let worker = || {
            let mut scratch = Scratch::new(g);
            let mut seen = rustc_hash::FxHashSet::default();
            while !stop.load(Ordering::Relaxed) {
                let begin = cursor.fetch_add(CHUNK_SIZE, Ordering::Relaxed);
                if begin >= m {
                    break;
                }
                let end = (begin + CHUNK_SIZE).min(m);
                for (e, slot) in (begin..end).zip(&slots[begin..end]) {
                    match count_edge(g, e, &mut scratch, opts.max_k) {
                        Ok(c) => {
                            seen.extend(c.counts.iter().map(|&(k, _)| k));
                            let _ = slot.set(c);
                        }
                        Err(err) => {
                            stop.store(true, Ordering::Relaxed);
                            failure.lock().unwrap().get_or_insert(err);
                            return seen;
                        }
                    }
                }
            }
            seen
        };

        let mut motifs = BTreeSet::new();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..opts.workers).map(|_| scope.spawn(worker)).collect();
            for h in handles {
                motifs.extend(h.join().expect("counting worker panicked"));
            }
        });
        if let Some(err) = failure.into_inner().unwrap() {
            return Err(err);
        }
        let per_edge = slots
            .into_iter()
            .map(|s| s.into_inner().expect("every edge is counted"))
            .collect();
        CountResult { per_edge, motifs }
    };
    log::info!(
        "counted {} edges with {} workers in {:?}",
        m,
        opts.workers,
        start.elapsed()
    );
    Ok(result)
}
