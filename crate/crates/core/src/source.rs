//! Replayable edge streams.
//!
//! Both engines read their input more than once (the pipeline's partition
//! and counting passes, the two MapReduce rounds). An [`EdgeSource`] hands
//! out a fresh pass each time it is asked, so a file can be re-read instead
//! of buffered.

use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::graph::{try_dedup_stream, Edge};
use crate::io::{parse, GraphFormat};

pub type EdgeIter<'a> = Box<dyn Iterator<Item = Result<Edge>> + Send + 'a>;

pub trait EdgeSource: Sync {
    /// Opens a new pass over the (deduplicated) edges. Every pass must yield
    /// the same sequence.
    fn pass(&self) -> Result<EdgeIter<'_>>;
}

impl EdgeSource for [Edge] {
    fn pass(&self) -> Result<EdgeIter<'_>> {
        Ok(Box::new(self.iter().copied().map(Ok)))
    }
}

impl EdgeSource for Vec<Edge> {
    fn pass(&self) -> Result<EdgeIter<'_>> {
        self.as_slice().pass()
    }
}

impl<S: EdgeSource + ?Sized> EdgeSource for &S {
    fn pass(&self) -> Result<EdgeIter<'_>> {
        (**self).pass()
    }
}

/// An edge-list file, parsed and deduplicated on every pass.
#[derive(Debug, Clone)]
pub struct EdgeFile {
    path: PathBuf,
    format: GraphFormat,
}

impl EdgeFile {
    pub fn new(path: impl Into<PathBuf>, format: GraphFormat) -> Self {
        EdgeFile {
            path: path.into(),
            format,
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn format(&self) -> GraphFormat {
        self.format
    }

    /// Reads the whole file into memory, deduplicated.
    pub fn load(&self) -> Result<Vec<Edge>> {
        self.pass()?.collect()
    }
}

impl EdgeSource for EdgeFile {
    fn pass(&self) -> Result<EdgeIter<'_>> {
        let raw = parse(&self.path, self.format)?;
        Ok(Box::new(try_dedup_stream(raw)))
    }
}
