//! The filter state machine.
//!
//! A filter owns one responsible node and moves through three phases:
//! partition (absorb incident edges from ch3, pass the rest on), counting
//! (tally ch2 edges whose endpoints are both adjacent), aggregation (add its
//! tally to the running total on ch1 and terminate). [`FilterState::step`]
//! is the whole protocol; the runtime only moves messages.

use std::fmt;

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;
use thiserror::Error;

use crate::graph::{Edge, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Partition,
    Counting,
    Aggregation,
    Terminated,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Phase::Partition => "partition",
            Phase::Counting => "counting",
            Phase::Aggregation => "aggregation",
            Phase::Terminated => "terminated",
        };
        f.write_str(s)
    }
}

/// Something a filter observed on one of its inbound channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    Ch3Edge(Edge),
    Ch3Closed,
    Ch2Edge(Edge),
    Ch2Closed,
    Ch1Count(u64),
    Ch1Closed,
}

/// What a filter wants sent downstream in response to one event.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emission {
    Nothing,
    /// Pass an unconsumed edge on (spawning a successor if there is none).
    Ch3(Edge),
    CloseCh3,
    Ch2(Edge),
    CloseCh2,
    /// Send the running total on ch1, close ch1, and terminate.
    Ch1Total(u64),
}

/// A message or close arrived that the protocol does not allow here.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("protocol violation at {stage}: {detail}")]
pub struct ProtocolViolation {
    pub stage: String,
    pub detail: String,
}

impl ProtocolViolation {
    pub(crate) fn new(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        ProtocolViolation {
            stage: stage.into(),
            detail: detail.into(),
        }
    }
}

type Adjacency = IndexSet<NodeId, FxBuildHasher>;

#[derive(Debug, Clone)]
pub struct FilterState {
    responsible: NodeId,
    adjacency: Adjacency,
    phase: Phase,
    tally: u64,
}

impl FilterState {
    /// A filter specialised by the first edge it received: `seed.first`
    /// becomes the responsible node, `seed.second` its first neighbour.
    pub fn new(seed: Edge) -> Self {
        assert!(!seed.is_self_loop(), "filter seeded with self-loop {seed}");
        let mut adjacency = Adjacency::default();
        adjacency.insert(seed.second);
        FilterState {
            responsible: seed.first,
            adjacency,
            phase: Phase::Partition,
            tally: 0,
        }
    }

    pub fn responsible(&self) -> NodeId {
        self.responsible
    }

    /// Neighbours in the order they were absorbed.
    pub fn adjacency(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        self.adjacency.iter().copied()
    }

    pub fn holds(&self, node: NodeId) -> bool {
        self.adjacency.contains(&node)
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn tally(&self) -> u64 {
        self.tally
    }

    fn violation(&self, event: &Event) -> ProtocolViolation {
        ProtocolViolation::new(
            format!("filter {}", self.responsible),
            format!("{event:?} during {} phase", self.phase),
        )
    }

    /// Applies one inbound event.
    pub fn step(&mut self, event: Event) -> Result<Emission, ProtocolViolation> {
        match (self.phase, event) {
            (Phase::Partition, Event::Ch3Edge(e)) => match e.other(self.responsible) {
                Some(other) => {
                    self.adjacency.insert(other);
                    Ok(Emission::Nothing)
                }
                None => Ok(Emission::Ch3(e)),
            },
            (Phase::Partition, Event::Ch3Closed) => {
                self.phase = Phase::Counting;
                Ok(Emission::CloseCh3)
            }
            (Phase::Counting, Event::Ch2Edge(e)) => {
                if self.adjacency.contains(&e.first) && self.adjacency.contains(&e.second) {
                    self.tally += 1;
                }
                Ok(Emission::Ch2(e))
            }
            (Phase::Counting, Event::Ch2Closed) => {
                self.phase = Phase::Aggregation;
                Ok(Emission::CloseCh2)
            }
            (Phase::Aggregation, Event::Ch1Count(upstream)) => {
                self.phase = Phase::Terminated;
                Ok(Emission::Ch1Total(upstream + self.tally))
            }
            _ => Err(self.violation(&event)),
        }
    }
}

/// Functional form of [`FilterState::step`].
pub fn filter_step(
    mut state: FilterState,
    event: Event,
) -> Result<(FilterState, Emission), ProtocolViolation> {
    let out = state.step(event)?;
    Ok((state, out))
}
