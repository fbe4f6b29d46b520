//! Dynamic pipeline of self-specialising filters.

mod filter;
mod runtime;

pub use filter::{filter_step, Emission, Event, FilterState, Phase, ProtocolViolation};
pub use runtime::{run_pipeline, FilterReport, PipelineConfig, PipelineOutcome, Scheduling};
