//! Two-round MapReduce triangle counting.
//!
//! Round I maps every edge to both `(endpoint, neighbour)` pairs, shuffles by
//! node and reduces each adjacency list to its 2-length paths. Round II merges
//! those paths with the original edges (as triples with an empty middle),
//! shuffles by endpoint pair and, per pair, reports `group size - 1` when the
//! group holds both the edge and at least one path. Every triangle is
//! reported once per side, so the reducer sum is divided by 3.

mod shuffle;
mod spill;
mod triple;

use std::path::PathBuf;
use std::thread;

use flume::{Receiver, Sender};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeKey, NodeId};
use crate::source::EdgeSource;

pub use shuffle::{reducer_for, ShuffleKey};
pub use spill::parse_triple;
pub use triple::{PathGroup, PathTriple};

use spill::{read_spill, SpillWriter};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MrConfig {
    pub mappers: usize,
    pub reducers: usize,
    /// Capacity, in messages, of every mapper-to-reducer queue.
    pub channel_capacity: usize,
    /// Records per message.
    pub batch_size: usize,
    /// When set, Round I output goes through files in a temporary directory
    /// created here.
    pub spill_dir: Option<PathBuf>,
}

impl Default for MrConfig {
    fn default() -> Self {
        MrConfig {
            mappers: 1,
            reducers: 1,
            channel_capacity: 16,
            batch_size: 256,
            spill_dir: None,
        }
    }
}

impl MrConfig {
    pub fn with_workers(workers: usize) -> Self {
        MrConfig {
            mappers: workers,
            reducers: workers,
            ..MrConfig::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.mappers == 0 || self.reducers == 0 {
            return Err(Error::Config("mappers and reducers must be at least 1".into()));
        }
        if self.channel_capacity == 0 {
            return Err(Error::Config("MapReduce channel capacity must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("MapReduce batch size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MrOutcome {
    pub triangles: u64,
    /// Sum of the Round II reducer outputs; three times `triangles`.
    pub raw_sum: u64,
    /// Number of Round I path triples.
    pub paths: u64,
}

pub fn round1_map(e: Edge) -> [(NodeId, NodeId); 2] {
    [(e.first, e.second), (e.second, e.first)]
}

/// The 2-length paths through `node`, one per unordered pair of neighbours.
pub fn round1_reduce(node: NodeId, adj: &[NodeId]) -> Vec<PathTriple> {
    let group = PathGroup {
        mid: node,
        neighbours: adj.to_vec(),
    };
    group.triples().collect()
}

pub fn round2_map(e: Edge) -> PathTriple {
    PathTriple::edge(e)
}

/// Streaming form of the Round II reduce for one key.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GroupCounter {
    has_edge: bool,
    size: u64,
}

impl GroupCounter {
    #[inline]
    pub fn add(&mut self, t: &PathTriple) {
        self.has_edge |= t.is_edge();
        self.size += 1;
    }

    /// `size - 1` when the edge and at least one path are present, else 0.
    #[inline]
    pub fn triangles(&self) -> u64 {
        if self.has_edge && self.size >= 2 {
            self.size - 1
        } else {
            0
        }
    }
}

pub fn round2_reduce<'a>(key: EdgeKey, group: impl IntoIterator<Item = &'a PathTriple>) -> u64 {
    let mut c = GroupCounter::default();
    for t in group {
        debug_assert_eq!(t.key(), key);
        c.add(t);
    }
    c.triangles()
}

/// Where Round I left its output.
enum Boundary {
    /// Per reducer, the adjacency groups; paths are expanded on read.
    Memory(Vec<Vec<PathGroup>>),
    Spill { _dir: tempfile::TempDir, files: Vec<PathBuf> },
}

impl Boundary {
    fn for_each_triple(&self, mut f: impl FnMut(PathTriple) -> Result<()>) -> Result<()> {
        match self {
            Boundary::Memory(parts) => {
                for g in parts.iter().flatten() {
                    for t in g.triples() {
                        f(t)?;
                    }
                }
                Ok(())
            }
            Boundary::Spill { files, .. } => files.iter().try_for_each(|p| read_spill(p, &mut f)),
        }
    }
}

fn join<T>(h: thread::ScopedJoinHandle<'_, Result<T>>, what: &str) -> Result<T> {
    h.join()
        .unwrap_or_else(|_| Err(Error::Runtime(format!("{what} thread panicked"))))
}

/// Buffers records per reducer and ships them in batches.
struct Router<T> {
    outs: Vec<Sender<Vec<T>>>,
    bufs: Vec<Vec<T>>,
    batch: usize,
}

impl<T> Router<T> {
    fn new(outs: Vec<Sender<Vec<T>>>, batch: usize) -> Self {
        let bufs = outs.iter().map(|_| Vec::with_capacity(batch)).collect();
        Router { outs, bufs, batch }
    }

    #[inline]
    fn push(&mut self, reducer: usize, item: T) -> Result<()> {
        let buf = &mut self.bufs[reducer];
        buf.push(item);
        if buf.len() >= self.batch {
            let full = std::mem::replace(buf, Vec::with_capacity(self.batch));
            self.outs[reducer].send(full).map_err(|_| hung_up())?;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        for (buf, out) in self.bufs.drain(..).zip(&self.outs) {
            if !buf.is_empty() {
                out.send(buf).map_err(|_| hung_up())?;
            }
        }
        Ok(())
    }
}

fn hung_up() -> Error {
    Error::Runtime("reducer stopped early".into())
}

fn feed_edges<S: EdgeSource + ?Sized, W>(
    edges: &S,
    batch: usize,
    tx: &Sender<W>,
    wrap: impl Fn(Vec<Edge>) -> W,
) -> Result<()> {
    let mut buf = Vec::with_capacity(batch);
    for e in edges.pass()? {
        buf.push(e?);
        if buf.len() == batch {
            let full = std::mem::replace(&mut buf, Vec::with_capacity(batch));
            tx.send(wrap(full)).map_err(|_| hung_up())?;
        }
    }
    if !buf.is_empty() {
        tx.send(wrap(buf)).map_err(|_| hung_up())?;
    }
    Ok(())
}

/// One Round I reducer's output: in-memory groups, its spill file, and its
/// path count.
type ReducerOutput = (Vec<PathGroup>, Option<PathBuf>, u64);

fn round_one<S: EdgeSource + ?Sized>(edges: &S, cfg: &MrConfig) -> Result<(Boundary, u64)> {
    let spill = match &cfg.spill_dir {
        Some(dir) => Some(
            tempfile::Builder::new()
                .prefix("tricount-spill-")
                .tempdir_in(dir)
                .map_err(|e| Error::file(dir, e))?,
        ),
        None => None,
    };
    let spill_root = spill.as_ref().map(|d| d.path().to_owned());

    let (work_tx, work_rx) = flume::bounded::<Vec<Edge>>(cfg.channel_capacity);
    let (reduce_txs, reduce_rxs): (Vec<_>, Vec<_>) =
        (0..cfg.reducers).map(|_| flume::bounded::<Vec<(NodeId, NodeId)>>(cfg.channel_capacity)).unzip();

    let outputs = thread::scope(|s| -> Result<Vec<ReducerOutput>> {
        let mappers: Vec<_> = (0..cfg.mappers)
            .map(|_| {
                let rx = work_rx.clone();
                let mut router = Router::new(reduce_txs.clone(), cfg.batch_size);
                s.spawn(move || -> Result<()> {
                    for chunk in rx.iter() {
                        for e in chunk {
                            for (k, v) in round1_map(e) {
                                router.push(reducer_for(&k, cfg.reducers), (k, v))?;
                            }
                        }
                    }
                    router.finish()
                })
            })
            .collect();
        drop(work_rx);
        drop(reduce_txs);

        let reducers: Vec<_> = reduce_rxs
            .into_iter()
            .enumerate()
            .map(|(r, rx)| {
                let root = spill_root.clone();
                s.spawn(move || reduce_round_one(rx, root.map(|d| d.join(format!("round1-{r}.txt")))))
            })
            .collect();

        let fed = feed_edges(edges, cfg.batch_size, &work_tx, |v| v);
        drop(work_tx);
        let mapped: Vec<_> = mappers.into_iter().map(|h| join(h, "mapper")).collect();
        let reduced: Vec<_> = reducers.into_iter().map(|h| join(h, "reducer")).collect();
        fed?;
        mapped.into_iter().collect::<Result<Vec<()>>>()?;
        reduced.into_iter().collect()
    })?;

    let paths = outputs.iter().map(|(_, _, n)| n).sum();
    let boundary = match spill {
        Some(dir) => Boundary::Spill {
            _dir: dir,
            files: outputs.into_iter().filter_map(|(_, f, _)| f).collect(),
        },
        None => Boundary::Memory(outputs.into_iter().map(|(g, _, _)| g).collect()),
    };
    Ok((boundary, paths))
}

fn reduce_round_one(
    rx: Receiver<Vec<(NodeId, NodeId)>>,
    spill: Option<PathBuf>,
) -> Result<(Vec<PathGroup>, Option<PathBuf>, u64)> {
    let mut adj: FxHashMap<NodeId, Vec<NodeId>> = FxHashMap::default();
    for batch in rx.iter() {
        for (k, v) in batch {
            adj.entry(k).or_default().push(v);
        }
    }
    let groups: Vec<PathGroup> = adj
        .into_iter()
        .filter(|(_, n)| n.len() >= 2)
        .map(|(mid, neighbours)| PathGroup { mid, neighbours })
        .collect();
    let paths = groups.iter().map(PathGroup::path_count).sum();
    match spill {
        None => Ok((groups, None, paths)),
        Some(path) => {
            let mut w = SpillWriter::create(path)?;
            for g in &groups {
                for t in g.triples() {
                    w.write(&t)?;
                }
            }
            Ok((Vec::new(), Some(w.finish()?), paths))
        }
    }
}

enum Work<'a> {
    Edges(Vec<Edge>),
    Groups(&'a [PathGroup]),
    File(&'a std::path::Path),
}

fn round_two<S: EdgeSource + ?Sized>(edges: &S, boundary: &Boundary, cfg: &MrConfig) -> Result<u64> {
    let (work_tx, work_rx) = flume::bounded::<Work<'_>>(cfg.channel_capacity);
    let (reduce_txs, reduce_rxs): (Vec<_>, Vec<_>) =
        (0..cfg.reducers).map(|_| flume::bounded::<Vec<PathTriple>>(cfg.channel_capacity)).unzip();

    thread::scope(|s| -> Result<u64> {
        let mappers: Vec<_> = (0..cfg.mappers)
            .map(|_| {
                let rx = work_rx.clone();
                let mut router = Router::new(reduce_txs.clone(), cfg.batch_size);
                s.spawn(move || -> Result<()> {
                    let reducers = cfg.reducers;
                    let mut route = |t: PathTriple| router.push(reducer_for(&t.key(), reducers), t);
                    for work in rx.iter() {
                        match work {
                            Work::Edges(chunk) => {
                                for e in chunk {
                                    route(round2_map(e))?;
                                }
                            }
                            Work::Groups(groups) => {
                                for g in groups {
                                    for t in g.triples() {
                                        route(t)?;
                                    }
                                }
                            }
                            Work::File(path) => read_spill(path, &mut route)?,
                        }
                    }
                    router.finish()
                })
            })
            .collect();
        drop(work_rx);
        drop(reduce_txs);

        let reducers: Vec<_> = reduce_rxs
            .into_iter()
            .map(|rx| {
                s.spawn(move || -> Result<u64> {
                    let mut groups: FxHashMap<EdgeKey, GroupCounter> = FxHashMap::default();
                    for batch in rx.iter() {
                        for t in batch {
                            groups.entry(t.key()).or_default().add(&t);
                        }
                    }
                    Ok(groups.values().map(GroupCounter::triangles).sum())
                })
            })
            .collect();

        let fed = (|| -> Result<()> {
            match boundary {
                Boundary::Memory(parts) => {
                    for part in parts {
                        for chunk in part.chunks(cfg.batch_size.max(1)) {
                            work_tx.send(Work::Groups(chunk)).map_err(|_| hung_up())?;
                        }
                    }
                }
                Boundary::Spill { files, .. } => {
                    for f in files {
                        work_tx.send(Work::File(f)).map_err(|_| hung_up())?;
                    }
                }
            }
            feed_edges(edges, cfg.batch_size, &work_tx, Work::Edges)
        })();
        drop(work_tx);
        let mapped: Vec<_> = mappers.into_iter().map(|h| join(h, "mapper")).collect();
        let reduced: Vec<_> = reducers.into_iter().map(|h| join(h, "reducer")).collect();
        fed?;
        mapped.into_iter().collect::<Result<Vec<()>>>()?;
        reduced.into_iter().sum()
    })
}

/// Counts triangles with the two-round MapReduce.
pub fn count_triangles_mapreduce<S: EdgeSource + ?Sized>(edges: &S, cfg: &MrConfig) -> Result<MrOutcome> {
    cfg.validate()?;
    let (boundary, paths) = round_one(edges, cfg)?;
    let raw_sum = round_two(edges, &boundary, cfg)?;
    if raw_sum % 3 != 0 {
        return Err(Error::Runtime(format!("reducer sum {raw_sum} is not a multiple of 3")));
    }
    Ok(MrOutcome {
        triangles: raw_sum / 3,
        raw_sum,
        paths,
    })
}

/// Runs Round I only and returns its path triples, read back through the
/// configured round boundary.
pub fn round_one_triples<S: EdgeSource + ?Sized>(edges: &S, cfg: &MrConfig) -> Result<Vec<PathTriple>> {
    cfg.validate()?;
    let (boundary, _) = round_one(edges, cfg)?;
    let mut out = Vec::new();
    boundary.for_each_triple(|t| {
        out.push(t);
        Ok(())
    })?;
    Ok(out)
}
