use std::future::Future;
use std::num::NonZeroUsize;
use std::pin::Pin;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use flume::{Receiver, Sender};

use super::filter::{Emission, Event, FilterState, ProtocolViolation};
use crate::error::{Error, Result};
use crate::graph::{Edge, NodeId};
use crate::source::EdgeSource;

type Batch = Vec<Edge>;
type BoxFuture = Pin<Box<dyn Future<Output = ()> + Send + 'static>>;

const FILTER_STACK: usize = 256 * 1024;

/// How filters are mapped onto OS threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduling {
    /// Every filter gets a dedicated thread.
    ThreadPerFilter,
    /// Filters run as tasks multiplexed over a fixed pool of worker threads.
    Pool { workers: NonZeroUsize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    /// Queue capacity of the counting-phase edge channel. 0 is a rendezvous.
    pub ch2_capacity: usize,
    /// Queue capacity of the partition-phase edge channel. 0 is a rendezvous.
    pub ch3_capacity: usize,
    /// Edges carried per ch2/ch3 message.
    pub batch_size: usize,
    pub scheduling: Scheduling,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            ch2_capacity: 0,
            ch3_capacity: 0,
            batch_size: 1,
            scheduling: Scheduling::ThreadPerFilter,
        }
    }
}

impl PipelineConfig {
    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.ch2_capacity = capacity;
        self.ch3_capacity = capacity;
        self
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size;
        self
    }

    pub fn with_pool(mut self, workers: usize) -> Self {
        self.scheduling = match NonZeroUsize::new(workers) {
            Some(workers) => Scheduling::Pool { workers },
            None => Scheduling::ThreadPerFilter,
        };
        self
    }
}

/// Final state of one filter, as it reported itself before terminating.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterReport {
    /// 1-based position in the pipeline, i.e. creation order.
    pub position: usize,
    pub responsible: NodeId,
    /// Neighbours in absorption order.
    pub adjacency: Vec<NodeId>,
    pub tally: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineOutcome {
    pub triangles: u64,
    pub filters_created: usize,
    pub peak_live_filters: usize,
    /// Sorted by position.
    pub filters: Vec<FilterReport>,
}

struct Outbound {
    ch1: Sender<u64>,
    ch2: Option<Sender<Batch>>,
    ch3: Option<Sender<Batch>>,
}

struct Inbound {
    ch1: Receiver<u64>,
    ch2: Receiver<Batch>,
    ch3: Receiver<Batch>,
}

fn channel_triple(cfg: &PipelineConfig) -> (Outbound, Inbound) {
    let (tx1, rx1) = flume::bounded(0);
    let (tx2, rx2) = flume::bounded(cfg.ch2_capacity);
    let (tx3, rx3) = flume::bounded(cfg.ch3_capacity);
    (
        Outbound {
            ch1: tx1,
            ch2: Some(tx2),
            ch3: Some(tx3),
        },
        Inbound {
            ch1: rx1,
            ch2: rx2,
            ch3: rx3,
        },
    )
}

enum Exec {
    Threads,
    Pool(tokio::runtime::Handle),
}

type Report = (usize, Result<FilterReport>);

struct Shared {
    cfg: PipelineConfig,
    exec: Exec,
    live: AtomicUsize,
    peak: AtomicUsize,
}

#[derive(Clone)]
struct Spawner {
    shared: Arc<Shared>,
    reports: Sender<Report>,
}

impl Spawner {
    fn spawn_filter(&self, seed: Edge, position: usize, inbound: Inbound, outbound: Outbound) -> Result<()> {
        let live = self.shared.live.fetch_add(1, Ordering::SeqCst) + 1;
        self.shared.peak.fetch_max(live, Ordering::SeqCst);
        let link = Link {
            out: outbound,
            has_successor: false,
            position,
            spawner: self.clone(),
        };
        let task = filter_task(FilterState::new(seed), inbound, link);
        match &self.shared.exec {
            Exec::Pool(handle) => {
                handle.spawn(task);
            }
            Exec::Threads => {
                std::thread::Builder::new()
                    .name(format!("filter-{position}"))
                    .stack_size(FILTER_STACK)
                    .spawn(move || futures::executor::block_on(task))
                    .map_err(|e| Error::Runtime(format!("cannot spawn filter {position}: {e}")))?;
            }
        }
        Ok(())
    }
}

/// The outbound side of a stage: the source or a filter.
///
/// Until the stage forwards its first ch3 edge its outbound triple leads
/// straight to the sink. Forwarding that edge creates the successor: the
/// successor inherits the triple to the sink and a fresh triple is put
/// between the two.
struct Link {
    out: Outbound,
    has_successor: bool,
    position: usize,
    spawner: Spawner,
}

impl Link {
    fn hung_up(&self, channel: &str) -> Error {
        ProtocolViolation::new(stage_name(self.position), format!("downstream {channel} hung up")).into()
    }

    async fn send_ch3(&mut self, mut batch: Batch) -> Result<()> {
        if batch.is_empty() {
            return Ok(());
        }
        if !self.has_successor {
            let seed = batch[0];
            batch.drain(..1);
            let (out, inbound) = channel_triple(&self.spawner.shared.cfg);
            let to_sink = std::mem::replace(&mut self.out, out);
            self.spawner.spawn_filter(seed, self.position + 1, inbound, to_sink)?;
            self.has_successor = true;
            if batch.is_empty() {
                return Ok(());
            }
        }
        let tx = self.out.ch3.as_ref().ok_or_else(|| self.closed("ch3"))?;
        tx.send_async(batch).await.map_err(|_| self.hung_up("ch3"))
    }

    async fn send_ch2(&self, batch: Batch) -> Result<()> {
        let tx = self.out.ch2.as_ref().ok_or_else(|| self.closed("ch2"))?;
        tx.send_async(batch).await.map_err(|_| self.hung_up("ch2"))
    }

    async fn send_total(self, total: u64) -> Result<()> {
        self.out.ch1.send_async(total).await.map_err(|_| self.hung_up("ch1"))
    }

    fn closed(&self, channel: &str) -> Error {
        ProtocolViolation::new(stage_name(self.position), format!("send on closed {channel}")).into()
    }
}

fn stage_name(position: usize) -> String {
    if position == 0 {
        "source".to_owned()
    } else {
        format!("filter #{position}")
    }
}

fn filter_task(state: FilterState, inbound: Inbound, link: Link) -> BoxFuture {
    Box::pin(async move {
        let position = link.position;
        let reports = link.spawner.reports.clone();
        let shared = Arc::clone(&link.spawner.shared);
        let result = drive_filter(state, inbound, link, position).await;
        shared.live.fetch_sub(1, Ordering::SeqCst);
        let _ = reports.send((position, result));
    })
}

fn unexpected(position: usize, emission: Emission) -> Error {
    ProtocolViolation::new(stage_name(position), format!("unexpected emission {emission:?}")).into()
}

async fn drive_filter(mut state: FilterState, inbound: Inbound, mut link: Link, position: usize) -> Result<FilterReport> {
    // Partition: ch2 is left undrained until ch3 has closed.
    while let Ok(batch) = inbound.ch3.recv_async().await {
        let mut forward = Vec::new();
        for e in batch {
            match state.step(Event::Ch3Edge(e))? {
                Emission::Nothing => {}
                Emission::Ch3(e) => forward.push(e),
                other => return Err(unexpected(position, other)),
            }
        }
        link.send_ch3(forward).await?;
    }
    match state.step(Event::Ch3Closed)? {
        Emission::CloseCh3 => link.out.ch3 = None,
        other => return Err(unexpected(position, other)),
    }

    while let Ok(batch) = inbound.ch2.recv_async().await {
        for &e in &batch {
            match state.step(Event::Ch2Edge(e))? {
                Emission::Ch2(_) => {}
                other => return Err(unexpected(position, other)),
            }
        }
        link.send_ch2(batch).await?;
    }
    match state.step(Event::Ch2Closed)? {
        Emission::CloseCh2 => link.out.ch2 = None,
        other => return Err(unexpected(position, other)),
    }

    let event = match inbound.ch1.recv_async().await {
        Ok(n) => Event::Ch1Count(n),
        Err(_) => Event::Ch1Closed,
    };
    let report = FilterReport {
        position,
        responsible: state.responsible(),
        adjacency: state.adjacency().collect(),
        tally: state.tally(),
    };
    match state.step(event)? {
        Emission::Ch1Total(total) => link.send_total(total).await?,
        other => return Err(unexpected(position, other)),
    }
    Ok(report)
}

async fn drive_source<S: EdgeSource + ?Sized>(edges: &S, mut link: Link, batch_size: usize) -> Result<()> {
    let mut batch = Vec::with_capacity(batch_size);
    for e in edges.pass()? {
        batch.push(e?);
        if batch.len() == batch_size {
            link.send_ch3(std::mem::replace(&mut batch, Vec::with_capacity(batch_size))).await?;
        }
    }
    link.send_ch3(std::mem::take(&mut batch)).await?;
    link.out.ch3 = None;

    for e in edges.pass()? {
        batch.push(e?);
        if batch.len() == batch_size {
            link.send_ch2(std::mem::replace(&mut batch, Vec::with_capacity(batch_size))).await?;
        }
    }
    if !batch.is_empty() {
        link.send_ch2(batch).await?;
    }
    link.out.ch2 = None;

    // The initial count goes last so a rendezvous ch1 cannot stall the
    // edge passes.
    link.send_total(0).await
}

async fn drive_sink(inbound: Inbound) -> Result<u64> {
    let violation = |detail: &str| -> Error { ProtocolViolation::new("sink", detail).into() };
    if inbound.ch3.recv_async().await.is_ok() {
        return Err(violation("partition edge reached the sink"));
    }
    while inbound.ch2.recv_async().await.is_ok() {}
    let total = inbound
        .ch1
        .recv_async()
        .await
        .map_err(|_| violation("ch1 closed without a count"))?;
    if inbound.ch1.recv_async().await.is_ok() {
        return Err(violation("more than one count on ch1"));
    }
    Ok(total)
}

/// Counts the triangles of a deduplicated edge stream with the dynamic
/// pipeline.
///
/// The source sends every edge on ch3, then every edge again on ch2, then the
/// initial count 0 on ch1. Filters are created on demand as edges arrive that
/// no existing filter absorbs. The sink at the tail returns the final ch1
/// value.
pub fn run_pipeline<S: EdgeSource + ?Sized>(edges: &S, cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    if cfg.batch_size == 0 {
        return Err(Error::Config("pipeline batch size must be at least 1".into()));
    }
    let runtime = match cfg.scheduling {
        Scheduling::ThreadPerFilter => None,
        Scheduling::Pool { workers } => Some(
            tokio::runtime::Builder::new_multi_thread()
                .worker_threads(workers.get())
                .thread_name("pipeline-worker")
                .build()?,
        ),
    };
    let exec = match &runtime {
        Some(rt) => Exec::Pool(rt.handle().clone()),
        None => Exec::Threads,
    };
    let (reports_tx, reports_rx) = flume::unbounded();
    let shared = Arc::new(Shared {
        cfg: *cfg,
        exec,
        live: AtomicUsize::new(0),
        peak: AtomicUsize::new(0),
    });
    let (out, inbound) = channel_triple(cfg);
    let link = Link {
        out,
        has_successor: false,
        position: 0,
        spawner: Spawner {
            shared: Arc::clone(&shared),
            reports: reports_tx,
        },
    };

    let (source_result, sink_result) = std::thread::scope(|scope| {
        let source = std::thread::Builder::new()
            .name("pipeline-source".into())
            .spawn_scoped(scope, move || futures::executor::block_on(drive_source(edges, link, cfg.batch_size)))
            .map_err(|e| Error::Runtime(format!("cannot spawn source: {e}")));
        let sink = futures::executor::block_on(drive_sink(inbound));
        let source = source.and_then(|h| {
            h.join()
                .unwrap_or_else(|_| Err(Error::Runtime("pipeline source panicked".into())))
        });
        (source, sink)
    });

    let mut filters = Vec::new();
    let mut failures = Vec::new();
    for (position, report) in reports_rx.iter() {
        match report {
            Ok(r) => filters.push(r),
            Err(e) => failures.push((position, e)),
        }
    }
    drop(runtime);

    source_result?;
    if let Some((_, e)) = failures.into_iter().min_by_key(|(p, _)| *p) {
        return Err(e);
    }
    let triangles = sink_result?;
    filters.sort_by_key(|r| r.position);
    Ok(PipelineOutcome {
        triangles,
        filters_created: filters.len(),
        peak_live_filters: shared.peak.load(Ordering::SeqCst),
        filters,
    })
}
