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

//! Exact typed graphlet counting for heterogeneous graphs.
//!
//! For every edge `(i, j)` the engine computes the number of typed
//! {2,3,4}-node graphlet orbits containing that edge. Only the orbits that
//! need neighborhood scans (4-path edge, 4-cycle, tailed-triangle tail and
//! center, chordal-cycle edge, 4-clique) are enumerated; the remaining
//! 4-node orbits are derived per type pair from the typed cardinalities of
//! the triangle and wedge sets.
//!
//! Modules:
//! - [`graph`]: compressed heterogeneous graph and text loaders.
//! - [`codec`]: canonical motif keys and descriptions.
//! - [`engine`]: per-edge counting and the parallel driver.
//! - [`oracle`]: brute-force reference counter for small graphs.
//! - [`aggregate`]: orbit to graphlet rollup, global counts, distributions.
//! - [`synth`]: Erdős-Rényi / Chung-Lu generators and type assignment.
//! - [`sparse`]: the on-disk sparse per-edge count format.

pub mod aggregate;
pub mod codec;
pub mod engine;
pub mod graph;
pub mod oracle;
pub mod sparse;
pub mod synth;

pub use aggregate::{GlobalCounts, MotifDistribution};
pub use codec::{Graphlet, GraphletKey, MotifKey, Orbit, Shape, TypedKey};
pub use engine::{
    count_all, count_edge, CountOptions, CountResult, EdgeCounts, EngineError, Scratch,
};
pub use graph::{GraphError, HeteroGraph, NodeId, TypeId};
