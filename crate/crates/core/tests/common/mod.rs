#![allow(dead_code)]

use std::collections::HashSet;

use tricount::{Edge, NodeId};

pub fn edges(pairs: &[(u32, u32)]) -> Vec<Edge> {
    pairs.iter().copied().map(Edge::from).collect()
}

pub fn running_example() -> Vec<Edge> {
    edges(&[(2, 1), (1, 3), (4, 5), (2, 3), (4, 7), (4, 6)])
}

/// Triangle count by checking every vertex triple.
pub fn brute_force_count(g: &[Edge]) -> u64 {
    let adj: HashSet<(NodeId, NodeId)> = g
        .iter()
        .flat_map(|e| [(e.first, e.second), (e.second, e.first)])
        .collect();
    let mut nodes: Vec<NodeId> = g.iter().flat_map(|e| [e.first, e.second]).collect();
    nodes.sort();
    nodes.dedup();
    let mut count = 0;
    for (i, &a) in nodes.iter().enumerate() {
        for (j, &b) in nodes.iter().enumerate().skip(i + 1) {
            if !adj.contains(&(a, b)) {
                continue;
            }
            for &c in &nodes[j + 1..] {
                if adj.contains(&(a, c)) && adj.contains(&(b, c)) {
                    count += 1;
                }
            }
        }
    }
    count
}

pub fn permute(g: &[Edge], seed: u64) -> Vec<Edge> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    let mut out = g.to_vec();
    out.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    out
}
