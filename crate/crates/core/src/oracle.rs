//! Sequential reference implementations used to check both engines.
//!
//! Nothing here shares code with the concurrent engines beyond the basic
//! graph types.

use std::collections::{BTreeMap, BTreeSet};

use rustc_hash::{FxHashMap, FxHashSet};

use crate::graph::{Edge, NodeId};
use crate::mapreduce::PathTriple;

/// Graphs up to this many vertices are counted with a bit matrix.
pub const DENSE_LIMIT: usize = 4096;

/// A triangle with its vertices in increasing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Triangle {
    a: NodeId,
    b: NodeId,
    c: NodeId,
}

impl Triangle {
    pub fn new(x: NodeId, y: NodeId, z: NodeId) -> Self {
        let mut v = [x, y, z];
        v.sort_unstable();
        assert!(v[0] < v[1] && v[1] < v[2], "triangle needs three distinct vertices");
        Triangle { a: v[0], b: v[1], c: v[2] }
    }

    pub fn vertices(&self) -> [NodeId; 3] {
        [self.a, self.b, self.c]
    }
}

/// Vertices relabelled to `0..n` in first-seen order, with the edges
/// rewritten as dense index pairs.
struct Dense {
    ids: Vec<NodeId>,
    edges: Vec<(u32, u32)>,
}

impl Dense {
    fn new(edges: &[Edge]) -> Self {
        let mut index: FxHashMap<NodeId, u32> = FxHashMap::default();
        let mut ids = Vec::new();
        let mut intern = |n: NodeId| {
            *index.entry(n).or_insert_with(|| {
                ids.push(n);
                (ids.len() - 1) as u32
            })
        };
        let edges = edges.iter().map(|e| (intern(e.first), intern(e.second))).collect();
        Dense { ids, edges }
    }

    /// Sorted neighbours with a larger dense index than the owner.
    fn forward_adjacency(&self) -> Vec<Vec<u32>> {
        let mut fwd = vec![Vec::new(); self.ids.len()];
        for &(u, v) in &self.edges {
            let (lo, hi) = if u < v { (u, v) } else { (v, u) };
            fwd[lo as usize].push(hi);
        }
        for list in &mut fwd {
            list.sort_unstable();
        }
        fwd
    }
}

fn intersect_sorted(a: &[u32], b: &[u32], mut hit: impl FnMut(u32)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                hit(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
}

fn count_dense(g: &Dense) -> u64 {
    let n = g.ids.len();
    let words = n.div_ceil(64);
    let mut rows = vec![0u64; n * words];
    for &(u, v) in &g.edges {
        let (u, v) = (u as usize, v as usize);
        rows[u * words + v / 64] |= 1 << (v % 64);
        rows[v * words + u / 64] |= 1 << (u % 64);
    }
    let mut total = 0u64;
    for &(u, v) in &g.edges {
        let (u, v) = (u as usize, v as usize);
        // Only third vertices above both endpoints, so each triangle is seen
        // once, from its lowest edge.
        let above = u.max(v) + 1;
        if above >= n {
            continue;
        }
        let ru = &rows[u * words..(u + 1) * words];
        let rv = &rows[v * words..(v + 1) * words];
        let first = above / 64;
        let mut mask = !0u64 << (above % 64);
        for w in first..words {
            total += (ru[w] & rv[w] & mask).count_ones() as u64;
            mask = !0;
        }
    }
    total
}

fn count_sparse(g: &Dense) -> u64 {
    let fwd = g.forward_adjacency();
    let mut total = 0u64;
    for out in &fwd {
        for &v in out {
            intersect_sorted(out, &fwd[v as usize], |_| total += 1);
        }
    }
    total
}

/// Exact number of triangles in a deduplicated edge list.
pub fn count_triangles_exact(edges: &[Edge]) -> u64 {
    let g = Dense::new(edges);
    if g.ids.len() <= DENSE_LIMIT {
        count_dense(&g)
    } else {
        count_sparse(&g)
    }
}

/// Sparse-path count regardless of graph size; exposed so the two counting
/// routes can be checked against each other.
pub fn count_triangles_intersection(edges: &[Edge]) -> u64 {
    count_sparse(&Dense::new(edges))
}

/// Every triangle of a deduplicated edge list.
pub fn list_triangles(edges: &[Edge]) -> BTreeSet<Triangle> {
    let g = Dense::new(edges);
    let fwd = g.forward_adjacency();
    let mut out = BTreeSet::new();
    for (u, list) in fwd.iter().enumerate() {
        for &v in list {
            intersect_sorted(list, &fwd[v as usize], |w| {
                out.insert(Triangle::new(g.ids[u], g.ids[v as usize], g.ids[w as usize]));
            });
        }
    }
    out
}

/// All 2-length paths `(x, mid, y)` with `x < y`, grouped by middle vertex in
/// increasing order.
pub fn enumerate_2paths(edges: &[Edge]) -> Vec<PathTriple> {
    let mut adj: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.first).or_default().push(e.second);
        adj.entry(e.second).or_default().push(e.first);
    }
    let mut out = Vec::new();
    for (mid, mut nbrs) in adj {
        nbrs.sort_unstable();
        for (i, &x) in nbrs.iter().enumerate() {
            for &y in &nbrs[i + 1..] {
                out.push(PathTriple::path(x, mid, y));
            }
        }
    }
    out
}

/// One filter of the sequential partition replay.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionEntry {
    pub responsible: NodeId,
    /// In the order the neighbours were absorbed.
    pub adjacency: Vec<NodeId>,
}

/// Filters in creation order.
pub type PartitionResult = Vec<PartitionEntry>;

/// Replays the pipeline's partition phase sequentially.
///
/// Each edge goes to the earliest filter whose responsible node is one of its
/// endpoints; if there is none, a new filter is appended with the edge's
/// first endpoint as responsible node.
pub fn simulate_partition(edges: &[Edge]) -> PartitionResult {
    let mut filters: PartitionResult = Vec::new();
    let mut by_node: FxHashMap<NodeId, usize> = FxHashMap::default();
    for e in edges {
        let owner = match (by_node.get(&e.first), by_node.get(&e.second)) {
            (Some(&a), Some(&b)) => Some(a.min(b)),
            (Some(&a), None) | (None, Some(&a)) => Some(a),
            (None, None) => None,
        };
        match owner {
            Some(i) => {
                let f = &mut filters[i];
                let other = e.other(f.responsible).expect("owner is an endpoint");
                f.adjacency.push(other);
            }
            None => {
                by_node.insert(e.first, filters.len());
                filters.push(PartitionEntry {
                    responsible: e.first,
                    adjacency: vec![e.second],
                });
            }
        }
    }
    filters
}

/// Per filter, the number of edges with both endpoints in its adjacency.
pub fn simulate_filter_counts(partition: &PartitionResult, edges: &[Edge]) -> Vec<(NodeId, u64)> {
    // For each vertex, the (increasing) indices of filters holding it.
    let mut holders: FxHashMap<NodeId, Vec<u32>> = FxHashMap::default();
    for (i, f) in partition.iter().enumerate() {
        let distinct: FxHashSet<NodeId> = f.adjacency.iter().copied().collect();
        for n in distinct {
            holders.entry(n).or_default().push(i as u32);
        }
    }
    let mut counts = vec![0u64; partition.len()];
    let empty = Vec::new();
    for e in edges {
        let a = holders.get(&e.first).unwrap_or(&empty);
        let b = holders.get(&e.second).unwrap_or(&empty);
        intersect_sorted(a, b, |i| counts[i as usize] += 1);
    }
    partition.iter().map(|f| f.responsible).zip(counts).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(pairs: &[(u32, u32)]) -> Vec<Edge> {
        pairs.iter().copied().map(Edge::from).collect()
    }

    fn running_example() -> Vec<Edge> {
        g(&[(2, 1), (1, 3), (4, 5), (2, 3), (4, 7), (4, 6)])
    }

    fn complete(n: u32) -> Vec<Edge> {
        let mut out = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                out.push(Edge::new(a, b));
            }
        }
        out
    }

    fn ids(v: &[u32]) -> Vec<NodeId> {
        v.iter().copied().map(NodeId).collect()
    }

    #[test]
    fn counts_small_graphs() {
        assert_eq!(count_triangles_exact(&running_example()), 1);
        assert_eq!(count_triangles_exact(&complete(4)), 4);
        assert_eq!(count_triangles_exact(&complete(10)), 120);
        assert_eq!(count_triangles_exact(&[]), 0);
        assert_eq!(count_triangles_intersection(&complete(10)), 120);
    }

    #[test]
    fn dense_word_boundaries() {
        // K_70 straddles a 64-bit word in the bit matrix.
        assert_eq!(count_triangles_exact(&complete(70)), 70 * 69 * 68 / 6);
        assert_eq!(count_triangles_intersection(&complete(70)), 70 * 69 * 68 / 6);
    }

    #[test]
    fn lists_triangles() {
        let t = list_triangles(&running_example());
        assert_eq!(t.into_iter().collect::<Vec<_>>(), vec![Triangle::new(NodeId(1), NodeId(2), NodeId(3))]);
        assert!(list_triangles(&[]).is_empty());
        let k4: Vec<_> = list_triangles(&complete(4)).into_iter().map(|t| t.vertices()).collect();
        assert_eq!(
            k4,
            vec![ids(&[1, 2, 3]), ids(&[1, 2, 4]), ids(&[1, 3, 4]), ids(&[2, 3, 4])]
                .into_iter()
                .map(|v| [v[0], v[1], v[2]])
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn two_paths_of_running_example() {
        let mut got = enumerate_2paths(&running_example());
        got.sort();
        let mut want = vec![
            PathTriple::path(NodeId(2), NodeId(1), NodeId(3)),
            PathTriple::path(NodeId(1), NodeId(2), NodeId(3)),
            PathTriple::path(NodeId(1), NodeId(3), NodeId(2)),
            PathTriple::path(NodeId(5), NodeId(4), NodeId(6)),
            PathTriple::path(NodeId(5), NodeId(4), NodeId(7)),
            PathTriple::path(NodeId(6), NodeId(4), NodeId(7)),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(enumerate_2paths(&g(&[(1, 2)])).is_empty());
        assert_eq!(enumerate_2paths(&g(&[(4, 5), (4, 6), (4, 7)])).len(), 3);
    }

    #[test]
    fn partition_of_running_example() {
        let p = simulate_partition(&running_example());
        assert_eq!(
            p,
            vec![
                PartitionEntry { responsible: NodeId(2), adjacency: ids(&[1, 3]) },
                PartitionEntry { responsible: NodeId(1), adjacency: ids(&[3]) },
                PartitionEntry { responsible: NodeId(4), adjacency: ids(&[5, 7, 6]) },
            ]
        );
        let counts = simulate_filter_counts(&p, &running_example());
        assert_eq!(counts, vec![(NodeId(2), 1), (NodeId(1), 0), (NodeId(4), 0)]);
    }

    #[test]
    fn partition_small_cases() {
        assert_eq!(
            simulate_partition(&g(&[(1, 2)])),
            vec![PartitionEntry { responsible: NodeId(1), adjacency: ids(&[2]) }]
        );
        let k3 = g(&[(1, 2), (2, 3), (3, 1)]);
        let p = simulate_partition(&k3);
        assert_eq!(
            p,
            vec![
                PartitionEntry { responsible: NodeId(1), adjacency: ids(&[2, 3]) },
                PartitionEntry { responsible: NodeId(2), adjacency: ids(&[3]) },
            ]
        );
        assert_eq!(simulate_filter_counts(&p, &k3), vec![(NodeId(1), 1), (NodeId(2), 0)]);
        assert!(simulate_partition(&[]).is_empty());
        assert!(simulate_filter_counts(&Vec::new(), &[]).is_empty());
    }
}
