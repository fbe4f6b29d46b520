use std::fmt;

use crate::graph::{Edge, EdgeKey, NodeId};

/// A 2-length path `a - mid - b`, or an original edge when `mid` is empty.
///
/// Endpoints are stored in increasing order, so `(3, 1, 2)` and `(2, 1, 3)`
/// are the same path and the grouping key is just `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathTriple {
    key: EdgeKey,
    mid: Option<NodeId>,
}

impl PathTriple {
    pub fn path(a: NodeId, mid: NodeId, b: NodeId) -> Self {
        let key = EdgeKey::try_new(a, b).expect("path endpoints must differ");
        assert!(mid != a && mid != b, "path middle must differ from its endpoints");
        PathTriple { key, mid: Some(mid) }
    }

    pub fn edge(e: Edge) -> Self {
        PathTriple {
            key: e.key(),
            mid: None,
        }
    }

    pub fn a(&self) -> NodeId {
        self.key.lo()
    }

    pub fn b(&self) -> NodeId {
        self.key.hi()
    }

    pub fn mid(&self) -> Option<NodeId> {
        self.mid
    }

    pub fn key(&self) -> EdgeKey {
        self.key
    }

    pub fn is_edge(&self) -> bool {
        self.mid.is_none()
    }
}

impl fmt::Display for PathTriple {
    /// The spill line form: `A MID B`, with `-` for an empty middle.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mid {
            Some(m) => write!(f, "{} {} {}", self.a(), m, self.b()),
            None => write!(f, "{} - {}", self.a(), self.b()),
        }
    }
}

/// All shuffled neighbours of one node; expands into its 2-length paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathGroup {
    pub mid: NodeId,
    pub neighbours: Vec<NodeId>,
}

impl PathGroup {
    pub fn path_count(&self) -> u64 {
        let d = self.neighbours.len() as u64;
        d * d.saturating_sub(1) / 2
    }

    pub fn triples(&self) -> impl Iterator<Item = PathTriple> + '_ {
        let mid = self.mid;
        self.neighbours
            .iter()
            .enumerate()
            .flat_map(move |(i, &x)| self.neighbours[i + 1..].iter().map(move |&y| PathTriple::path(x, mid, y)))
    }
}
