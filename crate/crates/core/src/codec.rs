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

//! Canonical keys for typed motifs.
//!
//! A key packs a shape code and the sorted multiset of node types into a
//! `u64`:
//!
//! ```text
//!  63      56 55    48 47     36 35     24 23     12 11      0
//! +----------+--------+---------+---------+---------+---------+
//! |  unused  | shape  | type 1  | type 2  | type 3  | type 4  |
//! +----------+--------+---------+---------+---------+---------+
//! ```
//!
//! Types are ascending and unused trailing fields are zero, so two type
//! vectors produce the same key exactly when they are permutations of each
//! other. Keys order first by shape code and then lexicographically by the
//! sorted type vector.

use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;

use thiserror::Error;

use crate::graph::{TypeId, MAX_TYPES};

const TYPE_BITS: u32 = 12;
const TYPE_MASK: u64 = (1 << TYPE_BITS) - 1;
const SHAPE_SHIFT: u32 = 4 * TYPE_BITS;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("type {0} outside 1..={MAX_TYPES}")]
    InvalidType(u32),
    #[error("{shape} takes {expected} types, got {got}")]
    Arity {
        shape: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("malformed key {0:#x}")]
    Malformed(u64),
    #[error("unknown motif name `{0}`")]
    UnknownName(String),
    #[error("decimal hash supports fewer than {limit} types, graph has {num_types}{hint}")]
    DecimalRange {
        limit: u32,
        num_types: usize,
        hint: &'static str,
    },
}

/// Something a typed key can be built over: an edge orbit or a graphlet.
pub trait Shape: Copy + Eq + Ord + Hash + fmt::Debug + Send + Sync + 'static {
    const ALL: &'static [Self];

    fn code(self) -> u8;
    fn from_code(code: u8) -> Option<Self>;
    /// Node count k.
    fn nodes(self) -> usize;
    /// Edge count of the underlying graphlet.
    fn edges(self) -> u32;
    fn name(self) -> &'static str;

    fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|s| s.name() == name)
    }
}

/// Edge orbits of the connected 2-, 3- and 4-node graphlets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Orbit {
    Edge = 0,
    Wedge = 1,
    Triangle = 2,
    PathEdge = 3,
    PathCenter = 4,
    Star = 5,
    Cycle = 6,
    TailedTail = 7,
    TailedCenter = 8,
    TailedTriEdge = 9,
    ChordalEdge = 10,
    ChordalCenter = 11,
    Clique = 12,
}

impl Orbit {
    pub fn graphlet(self) -> Graphlet {
        use Orbit::*;
        match self {
            Edge => Graphlet::Edge,
            Wedge => Graphlet::Wedge,
            Triangle => Graphlet::Triangle,
            PathEdge | PathCenter => Graphlet::Path,
            Star => Graphlet::Star,
            Cycle => Graphlet::Cycle,
            TailedTail | TailedCenter | TailedTriEdge => Graphlet::TailedTriangle,
            ChordalEdge | ChordalCenter => Graphlet::ChordalCycle,
            Clique => Graphlet::Clique,
        }
    }
}

impl Shape for Orbit {
    const ALL: &'static [Orbit] = &[
        Orbit::Edge,
        Orbit::Wedge,
        Orbit::Triangle,
        Orbit::PathEdge,
        Orbit::PathCenter,
        Orbit::Star,
        Orbit::Cycle,
        Orbit::TailedTail,
        Orbit::TailedCenter,
        Orbit::TailedTriEdge,
        Orbit::ChordalEdge,
        Orbit::ChordalCenter,
        Orbit::Clique,
    ];

    fn code(self) -> u8 {
        self as u8
    }

    fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    fn nodes(self) -> usize {
        self.graphlet().nodes()
    }

    fn edges(self) -> u32 {
        self.graphlet().edges()
    }

    fn name(self) -> &'static str {
        use Orbit::*;
        match self {
            Edge => "edge",
            Wedge => "3-path",
            Triangle => "triangle",
            PathEdge => "4-path-edge",
            PathCenter => "4-path-center",
            Star => "4-star",
            Cycle => "4-cycle",
            TailedTail => "tailed-tri-tail-edge",
            TailedCenter => "tailed-tri-center",
            TailedTriEdge => "tailed-tri-edge",
            ChordalEdge => "chordal-cycle-edge",
            ChordalCenter => "chordal-cycle-center",
            Clique => "4-clique",
        }
    }
}

/// Connected graphlets on 2 to 4 nodes, without orbit distinction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Graphlet {
    Edge = 0,
    Wedge = 1,
    Triangle = 2,
    Path = 3,
    Star = 4,
    Cycle = 5,
    TailedTriangle = 6,
    ChordalCycle = 7,
    Clique = 8,
}

impl Shape for Graphlet {
    const ALL: &'static [Graphlet] = &[
        Graphlet::Edge,
        Graphlet::Wedge,
        Graphlet::Triangle,
        Graphlet::Path,
        Graphlet::Star,
        Graphlet::Cycle,
        Graphlet::TailedTriangle,
        Graphlet::ChordalCycle,
        Graphlet::Clique,
    ];

    fn code(self) -> u8 {
        self as u8
    }

    fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    fn nodes(self) -> usize {
        match self {
            Graphlet::Edge => 2,
            Graphlet::Wedge | Graphlet::Triangle => 3,
            _ => 4,
        }
    }

    fn edges(self) -> u32 {
        use Graphlet::*;
        match self {
            Edge => 1,
            Wedge => 2,
            Triangle | Path | Star => 3,
            Cycle | TailedTriangle => 4,
            ChordalCycle => 5,
            Clique => 6,
        }
    }

    fn name(self) -> &'static str {
        use Graphlet::*;
        match self {
            Edge => "edge",
            Wedge => "3-path",
            Triangle => "triangle",
            Path => "4-path",
            Star => "4-star",
            Cycle => "4-cycle",
            TailedTriangle => "tailed-triangle",
            ChordalCycle => "chordal-cycle",
            Clique => "4-clique",
        }
    }
}

/// Canonical key of a shape together with a multiset of node types.
pub struct TypedKey<S> {
    raw: u64,
    _shape: PhantomData<S>,
}

pub type MotifKey = TypedKey<Orbit>;
pub type GraphletKey = TypedKey<Graphlet>;

// Manual impls: derives would put bounds on `S` that PhantomData does not need.
impl<S> Clone for TypedKey<S> {
    fn clone(&self) -> Self {
        *self
    }
}
impl<S> Copy for TypedKey<S> {}
impl<S> PartialEq for TypedKey<S> {
    fn eq(&self, other: &Self) -> bool {
        self.raw == other.raw
    }
}
impl<S> Eq for TypedKey<S> {}
impl<S> PartialOrd for TypedKey<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<S> Ord for TypedKey<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.raw.cmp(&other.raw)
    }
}
impl<S> Hash for TypedKey<S> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.raw.hash(state)
    }
}

impl<S: Shape> TypedKey<S> {
    /// Canonical key for `shape` with the given node types, in any order.
    ///
    /// Panics if the arity does not match `shape.nodes()` or a type is
    /// outside `1..=4095`; see [`TypedKey::try_encode`] for the checked form.
    pub fn encode(shape: S, types: &[TypeId]) -> Self {
        match Self::try_encode(shape, types) {
            Ok(k) => k,
            Err(e) => panic!("invalid motif: {e}"),
        }
    }

    pub fn try_encode(shape: S, types: &[TypeId]) -> Result<Self, CodecError> {
        if types.len() != shape.nodes() {
            return Err(CodecError::Arity {
                shape: shape.name(),
                expected: shape.nodes(),
                got: types.len(),
            });
        }
        let mut sorted = [0 as TypeId; 4];
        for (slot, &t) in sorted.iter_mut().zip(types) {
            if t == 0 || t as usize > MAX_TYPES {
                return Err(CodecError::InvalidType(t as u32));
            }
            *slot = t;
        }
        sorted[..types.len()].sort_unstable();
        Ok(Self::pack(shape, sorted))
    }

    /// 4-node key from already validated types, sorted here.
    #[inline]
    pub(crate) fn encode4(shape: S, a: TypeId, b: TypeId, c: TypeId, d: TypeId) -> Self {
        debug_assert_eq!(shape.nodes(), 4);
        let mut t = [a, b, c, d];
        // sorting network for four elements
        if t[0] > t[1] {
            t.swap(0, 1);
        }
        if t[2] > t[3] {
            t.swap(2, 3);
        }
        if t[0] > t[2] {
            t.swap(0, 2);
        }
        if t[1] > t[3] {
            t.swap(1, 3);
        }
        if t[1] > t[2] {
            t.swap(1, 2);
        }
        Self::pack(shape, t)
    }

    #[inline]
    fn pack(shape: S, sorted: [TypeId; 4]) -> Self {
        let mut raw = (shape.code() as u64) << SHAPE_SHIFT;
        for (pos, &t) in sorted.iter().enumerate() {
            raw |= (t as u64) << (TYPE_BITS * (3 - pos as u32));
        }
        Self {
            raw,
            _shape: PhantomData,
        }
    }

    /// Validates a raw key value.
    pub fn from_raw(raw: u64) -> Result<Self, CodecError> {
        let bad = CodecError::Malformed(raw);
        if raw >> (SHAPE_SHIFT + 8) != 0 {
            return Err(bad);
        }
        let shape = S::from_code((raw >> SHAPE_SHIFT) as u8).ok_or(CodecError::Malformed(raw))?;
        let k = shape.nodes();
        let field = |pos: usize| ((raw >> (TYPE_BITS * (3 - pos as u32))) & TYPE_MASK) as TypeId;
        let types: Vec<TypeId> = (0..4).map(field).collect();
        let used_ok =
            types[..k].iter().all(|&t| t != 0) && types[..k].windows(2).all(|w| w[0] <= w[1]);
        let unused_ok = types[k..].iter().all(|&t| t == 0);
        if used_ok && unused_ok {
            Ok(Self {
                raw,
                _shape: PhantomData,
            })
        } else {
            Err(bad)
        }
    }

    #[inline]
    pub fn raw(self) -> u64 {
        self.raw
    }

    pub fn shape(self) -> S {
        S::from_code((self.raw >> SHAPE_SHIFT) as u8).expect("key holds a valid shape")
    }

    /// Node types in ascending order.
    pub fn types(self) -> Vec<TypeId> {
        (0..self.shape().nodes())
            .map(|pos| ((self.raw >> (TYPE_BITS * (3 - pos as u32))) & TYPE_MASK) as TypeId)
            .collect()
    }

    /// Inverse of [`TypedKey::encode`].
    pub fn decode(self) -> (S, Vec<TypeId>) {
        (self.shape(), self.types())
    }

    /// True when every node carries the same type.
    pub fn is_homogeneous(self) -> bool {
        let t = self.types();
        t.windows(2).all(|w| w[0] == w[1])
    }

    pub fn describe(self) -> Description {
        let shape = self.shape();
        Description {
            name: shape.name(),
            nodes: shape.nodes(),
            edges: shape.edges(),
            types: self.types(),
        }
    }
}

impl MotifKey {
    pub fn to_graphlet(self) -> GraphletKey {
        let shape = self.shape().graphlet();
        let mask = (1u64 << SHAPE_SHIFT) - 1;
        GraphletKey {
            raw: ((shape.code() as u64) << SHAPE_SHIFT) | (self.raw & mask),
            _shape: PhantomData,
        }
    }
}

impl<S: Shape> fmt::Debug for TypedKey<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.shape().name(), self.types())
    }
}

impl<S: Shape> fmt::Display for TypedKey<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.describe().fmt(f)
    }
}

/// Human-readable record of a key, as written to the lookup table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Description {
    pub name: &'static str,
    pub nodes: usize,
    pub edges: u32,
    pub types: Vec<TypeId>,
}

impl Description {
    /// Types joined by commas, e.g. `1,1,2`.
    pub fn type_list(&self) -> String {
        let parts: Vec<String> = self.types.iter().map(|t| t.to_string()).collect();
        parts.join(",")
    }
}

impl fmt::Display for Description {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}, k={}, |E|={}, types {{{}}}",
            self.name,
            self.nodes,
            self.edges,
            self.type_list()
        )
    }
}

/// Decimal motif hash `g*10^4 + t1*10^3 + t2*10^2 + t3*10 + t4` for graphs
/// with fewer than 10 types. Missing trailing types count as zero.
///
/// The caller fixes the order of `types`; no sorting happens here.
pub fn decimal_hash(orbit: Orbit, types: &[TypeId], num_types: usize) -> Result<u64, CodecError> {
    if num_types >= 10 {
        return Err(CodecError::DecimalRange {
            limit: 10,
            num_types,
            hint: "; use decimal_hash_wide",
        });
    }
    decimal(orbit, types, 10)
}

/// Two-digit-per-type variant `g*10^8 + t1*10^6 + t2*10^4 + t3*10^2 + t4`,
/// valid for fewer than 100 types.
pub fn decimal_hash_wide(
    orbit: Orbit,
    types: &[TypeId],
    num_types: usize,
) -> Result<u64, CodecError> {
    if num_types >= 100 {
        return Err(CodecError::DecimalRange {
            limit: 100,
            num_types,
            hint: "",
        });
    }
    decimal(orbit, types, 100)
}

fn decimal(orbit: Orbit, types: &[TypeId], base: u64) -> Result<u64, CodecError> {
    if types.len() > 4 {
        return Err(CodecError::Arity {
            shape: orbit.name(),
            expected: 4,
            got: types.len(),
        });
    }
    let mut h = orbit as u64;
    for pos in 0..4 {
        let t = types.get(pos).copied().unwrap_or(0) as u64;
        if t >= base {
            return Err(CodecError::InvalidType(t as u32));
        }
        h = h * base + t;
    }
    Ok(h)
}
