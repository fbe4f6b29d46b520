//! Seeded uniform random graphs with a fixed edge count, shaped after the
//! benchmark table (fixed nodes with varying density, or fixed arcs).
//!
//! The generator is ChaCha8 seeded through `SeedableRng::seed_from_u64`, so a
//! given spec produces the same edge sequence on every platform.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeKey, NodeId};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GenMode {
    /// `nodes` vertices, `round(density * n(n-1)/2)` edges.
    ByNodes { nodes: u32, density: f64 },
    /// `arcs / 2` edges on the largest vertex count still reaching `density`.
    ByArcs { arcs: u64, density: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenSpec {
    pub mode: GenMode,
    pub seed: u64,
}

impl GenSpec {
    pub fn by_nodes(nodes: u32, density: f64, seed: u64) -> Self {
        GenSpec {
            mode: GenMode::ByNodes { nodes, density },
            seed,
        }
    }

    pub fn by_arcs(arcs: u64, density: f64, seed: u64) -> Self {
        GenSpec {
            mode: GenMode::ByArcs { arcs, density },
            seed,
        }
    }

    /// Resolved `(vertex count, edge count)` for this spec.
    pub fn shape(&self) -> Result<(u32, u64)> {
        let (nodes, edges, density) = match self.mode {
            GenMode::ByNodes { nodes, density } => {
                check_density(density)?;
                if nodes < 2 {
                    return Err(Error::InfeasibleSpec(format!("need at least 2 nodes, got {nodes}")));
                }
                let e = (density * max_edges(nodes) as f64).round() as u64;
                (nodes, e, density)
            }
            GenMode::ByArcs { arcs, density } => {
                check_density(density)?;
                if arcs < 2 {
                    return Err(Error::InfeasibleSpec(format!("need at least 2 arcs, got {arcs}")));
                }
                (nodes_for_arcs(arcs, density)?, arcs / 2, density)
            }
        };
        if edges > max_edges(nodes) {
            return Err(Error::InfeasibleSpec(format!(
                "{edges} edges do not fit on {nodes} vertices at density {density}"
            )));
        }
        Ok((nodes, edges))
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mode {
            GenMode::ByNodes { nodes, density } => {
                write!(f, "gen:nodes={nodes},density={density},seed={}", self.seed)
            }
            GenMode::ByArcs { arcs, density } => {
                write!(f, "gen:arcs={arcs},density={density},seed={}", self.seed)
            }
        }
    }
}

/// Parses the `gen:nodes=N,density=D,seed=S` / `gen:arcs=M,density=D,seed=S`
/// form used in benchmark manifests. `seed` defaults to 0.
impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Config(format!("bad generator spec {s:?}: {why}"));
        let body = s.strip_prefix("gen:").ok_or_else(|| bad("missing gen: prefix"))?;
        let (mut nodes, mut arcs, mut density, mut seed) = (None, None, None, 0u64);
        for field in body.split(',') {
            let (k, v) = field.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match k {
                "nodes" => nodes = Some(v.parse::<u32>().map_err(|_| bad("nodes"))?),
                "arcs" => arcs = Some(v.parse::<u64>().map_err(|_| bad("arcs"))?),
                "density" => density = Some(v.parse::<f64>().map_err(|_| bad("density"))?),
                "seed" => seed = v.parse().map_err(|_| bad("seed"))?,
                _ => return Err(bad("unknown key")),
            }
        }
        let density = density.ok_or_else(|| bad("density is required"))?;
        match (nodes, arcs) {
            (Some(n), None) => Ok(GenSpec::by_nodes(n, density, seed)),
            (None, Some(m)) => Ok(GenSpec::by_arcs(m, density, seed)),
            _ => Err(bad("exactly one of nodes/arcs is required")),
        }
    }
}

fn check_density(d: f64) -> Result<()> {
    if d > 0.0 && d <= 1.0 {
        Ok(())
    } else {
        Err(Error::InfeasibleSpec(format!("density must be in (0, 1], got {d}")))
    }
}

fn max_edges(n: u32) -> u64 {
    let n = n as u64;
    n * (n.saturating_sub(1)) / 2
}

/// Largest `n` with `arcs / (n (n - 1)) >= density`.
fn nodes_for_arcs(arcs: u64, density: f64) -> Result<u32> {
    let fits = |n: u64| arcs as f64 >= density * (n * (n - 1)) as f64;
    let approx = ((1.0 + (1.0 + 4.0 * arcs as f64 / density).sqrt()) / 2.0).floor() as u64;
    let mut n = approx.max(2);
    while n > 2 && !fits(n) {
        n -= 1;
    }
    while fits(n + 1) {
        n += 1;
    }
    if !fits(n) {
        return Err(Error::InfeasibleSpec(format!("{arcs} arcs cannot reach density {density}")));
    }
    u32::try_from(n).map_err(|_| Error::InfeasibleSpec(format!("{n} vertices exceed the id range")))
}

/// Generates the edge list for `spec` on vertices `1..=n`.
///
/// Sparse targets (at most half of all pairs) rejection-sample edges
/// directly; denser ones sample the pairs to leave out and emit the rest in
/// shuffled order. Orientation is random in both cases.
pub fn generate(spec: &GenSpec) -> Result<Vec<Edge>> {
    let (n, e) = spec.shape()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total = max_edges(n);
    if e * 2 <= total {
        let mut seen = FxHashSet::with_capacity_and_hasher(e as usize, Default::default());
        let mut out = Vec::with_capacity(e as usize);
        while (out.len() as u64) < e {
            let a = NodeId(rng.gen_range(1..=n));
            let b = NodeId(rng.gen_range(1..=n));
            if let Some(k) = EdgeKey::try_new(a, b) {
                if seen.insert(k) {
                    out.push(Edge { first: a, second: b });
                }
            }
        }
        Ok(out)
    } else {
        let skip = total - e;
        let mut excluded = FxHashSet::with_capacity_and_hasher(skip as usize, Default::default());
        while (excluded.len() as u64) < skip {
            let a = NodeId(rng.gen_range(1..=n));
            let b = NodeId(rng.gen_range(1..=n));
            if let Some(k) = EdgeKey::try_new(a, b) {
                excluded.insert(k);
            }
        }
        let mut out = Vec::with_capacity(e as usize);
        for lo in 1..n {
            for hi in lo + 1..=n {
                let k = EdgeKey::try_new(NodeId(lo), NodeId(hi)).expect("lo < hi");
                if !excluded.contains(&k) {
                    out.push(k.as_edge());
                }
            }
        }
        out.shuffle(&mut rng);
        for edge in &mut out {
            if rng.gen::<bool>() {
                *edge = edge.reversed();
            }
        }
        Ok(out)
    }
}
