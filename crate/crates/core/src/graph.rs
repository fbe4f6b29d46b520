//! Node and edge types plus the simple-graph pre-processing shared by every
//! engine.

use std::fmt;
use std::str::FromStr;

use rustc_hash::FxHashSet;

/// A vertex identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for NodeId {
    type Err = std::num::ParseIntError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse().map(NodeId)
    }
}

/// An undirected edge as it appeared in the stream.
///
/// The endpoint order is kept: the dynamic pipeline seeds a new filter with
/// `first` as its responsible node. Identity (dedup, grouping) goes through
/// [`EdgeKey`], which ignores orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub first: NodeId,
    pub second: NodeId,
}

impl Edge {
    #[inline]
    pub fn new(first: impl Into<NodeId>, second: impl Into<NodeId>) -> Self {
        Edge {
            first: first.into(),
            second: second.into(),
        }
    }

    #[inline]
    pub fn is_self_loop(&self) -> bool {
        self.first == self.second
    }

    #[inline]
    pub fn is_incident_to(&self, node: NodeId) -> bool {
        self.first == node || self.second == node
    }

    /// Returns the endpoint that is not `node`, if `node` is an endpoint.
    #[inline]
    pub fn other(&self, node: NodeId) -> Option<NodeId> {
        if self.first == node {
            Some(self.second)
        } else if self.second == node {
            Some(self.first)
        } else {
            None
        }
    }

    #[inline]
    pub fn reversed(&self) -> Edge {
        Edge {
            first: self.second,
            second: self.first,
        }
    }

    /// Canonical key of this edge. Panics on a self-loop; run the stream
    /// through [`dedup_stream`] first.
    #[inline]
    pub fn key(&self) -> EdgeKey {
        edge_key(*self)
    }
}

impl From<(u32, u32)> for Edge {
    fn from((a, b): (u32, u32)) -> Self {
        Edge::new(a, b)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.first, self.second)
    }
}

/// Orientation-free identity of an edge, `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeKey {
    lo: NodeId,
    hi: NodeId,
}

impl EdgeKey {
    /// Builds the key for an unordered pair, or `None` for a self-loop.
    #[inline]
    pub fn try_new(a: NodeId, b: NodeId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(EdgeKey { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(EdgeKey { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    #[inline]
    pub fn lo(&self) -> NodeId {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> NodeId {
        self.hi
    }

    #[inline]
    pub fn as_edge(&self) -> Edge {
        Edge {
            first: self.lo,
            second: self.hi,
        }
    }
}

/// Canonical `(min, max)` key of an edge.
///
/// Panics if `e` is a self-loop; callers are expected to dedup first.
#[inline]
pub fn edge_key(e: Edge) -> EdgeKey {
    EdgeKey::try_new(e.first, e.second)
        .unwrap_or_else(|| panic!("edge_key called on self-loop {e}"))
}

/// Iterator adapter returned by [`dedup_stream`].
#[derive(Debug)]
pub struct Dedup<I> {
    inner: I,
    seen: FxHashSet<EdgeKey>,
}

impl<I: Iterator<Item = Edge>> Iterator for Dedup<I> {
    type Item = Edge;

    fn next(&mut self) -> Option<Edge> {
        for e in self.inner.by_ref() {
            if let Some(k) = EdgeKey::try_new(e.first, e.second) {
                if self.seen.insert(k) {
                    return Some(e);
                }
            }
        }
        None
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        (0, self.inner.size_hint().1)
    }
}

/// Turns a raw edge stream into a simple-graph stream.
///
/// Keeps the first occurrence of every key, in its original orientation, and
/// drops self-loops and later duplicates in either orientation.
pub fn dedup_stream<I>(edges: I) -> Dedup<I::IntoIter>
where
    I: IntoIterator<Item = Edge>,
{
    let inner = edges.into_iter();
    let cap = inner.size_hint().0;
    Dedup {
        inner,
        seen: FxHashSet::with_capacity_and_hasher(cap, Default::default()),
    }
}

/// Fallible counterpart of [`Dedup`] used over parsed files.
#[derive(Debug)]
pub struct TryDedup<I> {
    inner: I,
    seen: FxHashSet<EdgeKey>,
}

impl<I, E> Iterator for TryDedup<I>
where
    I: Iterator<Item = Result<Edge, E>>,
{
    type Item = Result<Edge, E>;

    fn next(&mut self) -> Option<Self::Item> {
        for item in self.inner.by_ref() {
            match item {
                Ok(e) => {
                    if let Some(k) = EdgeKey::try_new(e.first, e.second) {
                        if self.seen.insert(k) {
                            return Some(Ok(e));
                        }
                    }
                }
                Err(err) => return Some(Err(err)),
            }
        }
        None
    }
}

pub fn try_dedup_stream<I, E>(edges: I) -> TryDedup<I::IntoIter>
where
    I: IntoIterator<Item = Result<Edge, E>>,
{
    TryDedup {
        inner: edges.into_iter(),
        seen: FxHashSet::default(),
    }
}

/// Size and density of a simple graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphStats {
    pub num_vertices: u64,
    pub num_edges: u64,
    /// Each undirected edge counted in both directions.
    pub num_arcs: u64,
    /// `num_arcs / (n (n - 1))`, or 0 with fewer than two vertices.
    pub density: f64,
}

impl GraphStats {
    pub fn from_counts(num_vertices: u64, num_edges: u64) -> Self {
        let num_arcs = 2 * num_edges;
        let density = if num_vertices >= 2 {
            num_arcs as f64 / (num_vertices as f64 * (num_vertices - 1) as f64)
        } else {
            0.0
        };
        GraphStats {
            num_vertices,
            num_edges,
            num_arcs,
            density,
        }
    }
}

impl fmt::Display for GraphStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vertices={} edges={} arcs={} density={:.4}",
            self.num_vertices, self.num_edges, self.num_arcs, self.density
        )
    }
}

/// Vertex/edge counts of an already deduplicated stream. Vertices are the
/// distinct endpoints seen; isolated vertices cannot be represented.
pub fn graph_stats<I>(edges: I) -> GraphStats
where
    I: IntoIterator<Item = Edge>,
{
    let mut vertices = FxHashSet::default();
    let mut num_edges = 0u64;
    for e in edges {
        vertices.insert(e.first);
        vertices.insert(e.second);
        num_edges += 1;
    }
    GraphStats::from_counts(vertices.len() as u64, num_edges)
}
