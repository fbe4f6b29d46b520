//! Benchmark cases, measurement records and their CSV form.
//!
//! Process management (timeouts, one process per run) lives in the CLI; this
//! module holds the pieces that are plain data.

use std::fmt;
use std::fs::OpenOptions;
use std::io::{Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gen::{generate, GenSpec};
use crate::graph::Edge;
use crate::io::GraphFormat;
use crate::mapreduce::{count_triangles_mapreduce, MrConfig};
use crate::oracle::count_triangles_exact;
use crate::pipeline::{run_pipeline, PipelineConfig};
use crate::source::EdgeFile;

pub const CSV_HEADER: [&str; 8] = [
    "name",
    "engine",
    "workers",
    "run",
    "triangles",
    "elapsed_ms",
    "peak_mem_bytes",
    "timed_out",
];

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Engine {
    Pipeline,
    MapReduce,
    Oracle,
}

impl Engine {
    pub fn as_str(&self) -> &'static str {
        match self {
            Engine::Pipeline => "pipeline",
            Engine::MapReduce => "mapreduce",
            Engine::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pipeline" => Ok(Engine::Pipeline),
            "mapreduce" => Ok(Engine::MapReduce),
            "oracle" => Ok(Engine::Oracle),
            other => Err(Error::Config(format!("unknown engine {other:?}"))),
        }
    }
}

/// A graph file or a generator spec.
#[derive(Debug, Clone, PartialEq)]
pub enum BenchInput {
    File(PathBuf, GraphFormat),
    Generated(GenSpec),
}

impl BenchInput {
    /// Accepts `gen:...`, `dimacs:PATH`, `snap:PATH`, `edgelist:PATH`, or a
    /// bare path whose format is guessed from its extension. Relative paths
    /// are resolved against `base`.
    pub fn parse(s: &str, base: &Path) -> Result<Self> {
        if s.starts_with("gen:") {
            return Ok(BenchInput::Generated(s.parse()?));
        }
        let (format, path) = match s.split_once(':') {
            Some((tag, rest)) if tag.parse::<GraphFormat>().is_ok() => {
                (tag.parse::<GraphFormat>()?, PathBuf::from(rest))
            }
            _ => {
                let p = PathBuf::from(s);
                (GraphFormat::from_extension(&p), p)
            }
        };
        let path = if path.is_relative() { base.join(path) } else { path };
        Ok(BenchInput::File(path, format))
    }

    /// Loads (and deduplicates) or generates the edge list.
    pub fn load(&self) -> Result<Vec<Edge>> {
        match self {
            BenchInput::File(path, format) => EdgeFile::new(path, *format).load(),
            BenchInput::Generated(spec) => generate(spec),
        }
    }
}

impl fmt::Display for BenchInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchInput::File(p, format) => write!(f, "{format}:{}", p.display()),
            BenchInput::Generated(spec) => spec.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchCase {
    pub name: String,
    pub engine: Engine,
    pub input: BenchInput,
    pub workers: usize,
    pub repeat: usize,
    pub timeout: Duration,
}

/// Parses a manifest: one case per line,
/// `name engine input_or_genspec workers repeat timeout_s`. Blank lines and
/// `#` comments are skipped.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<BenchCase>> {
    let mut cases = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = || Error::MalformedLine {
            line: i + 1,
            content: raw.to_owned(),
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [name, engine, input, workers, repeat, timeout] = fields[..] else {
            return Err(malformed());
        };
        let engine: Engine = engine.parse().map_err(|_| malformed())?;
        let input = BenchInput::parse(input, base).map_err(|_| malformed())?;
        let workers: usize = workers.parse().map_err(|_| malformed())?;
        let repeat: usize = repeat.parse().map_err(|_| malformed())?;
        let timeout: f64 = timeout.parse().map_err(|_| malformed())?;
        if workers == 0 || repeat == 0 || !(timeout.is_finite() && timeout > 0.0) {
            return Err(malformed());
        }
        cases.push(BenchCase {
            name: name.to_owned(),
            engine,
            input,
            workers,
            repeat,
            timeout: Duration::from_secs_f64(timeout),
        });
    }
    Ok(cases)
}

/// Knobs applied to every case of a benchmark run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineTuning {
    pub batch_size: usize,
    /// `None` picks each engine's default (rendezvous for the pipeline).
    pub channel_capacity: Option<usize>,
    pub spill_dir: Option<PathBuf>,
}

impl Default for EngineTuning {
    fn default() -> Self {
        EngineTuning {
            batch_size: 256,
            channel_capacity: None,
            spill_dir: None,
        }
    }
}

pub const DEFAULT_MR_CAPACITY: usize = 16;

pub fn pipeline_config(workers: usize, tuning: &EngineTuning) -> PipelineConfig {
    PipelineConfig::default()
        .with_batch_size(tuning.batch_size)
        .with_capacity(tuning.channel_capacity.unwrap_or(0))
        .with_pool(workers)
}

pub fn mapreduce_config(workers: usize, tuning: &EngineTuning) -> MrConfig {
    MrConfig {
        mappers: workers,
        reducers: workers,
        channel_capacity: tuning.channel_capacity.unwrap_or(DEFAULT_MR_CAPACITY),
        batch_size: tuning.batch_size,
        spill_dir: tuning.spill_dir.clone(),
    }
}

/// Runs one engine on an in-memory edge list; returns the count and the
/// wall-clock time of the engine call alone.
pub fn run_engine(engine: Engine, edges: &[Edge], workers: usize, tuning: &EngineTuning) -> Result<(u64, Duration)> {
    let start = Instant::now();
    let triangles = match engine {
        Engine::Pipeline => run_pipeline(edges, &pipeline_config(workers, tuning))?.triangles,
        Engine::MapReduce => count_triangles_mapreduce(edges, &mapreduce_config(workers, tuning))?.triangles,
        Engine::Oracle => count_triangles_exact(edges),
    };
    Ok((triangles, start.elapsed()))
}

/// Peak resident set of the current process in bytes, or -1 where the
/// platform does not expose it.
pub fn peak_rss_bytes() -> i64 {
    std::fs::read_to_string("/proc/self/status")
        .ok()
        .and_then(|s| {
            s.lines()
                .find_map(|l| l.strip_prefix("VmHWM:"))
                .and_then(|v| v.trim().trim_end_matches("kB").trim().parse::<i64>().ok())
        })
        .map_or(-1, |kb| kb * 1024)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub name: String,
    pub engine: String,
    pub workers: usize,
    /// 0-based run index, or `mean` on the aggregate row.
    pub run: String,
    pub triangles: Option<u64>,
    pub elapsed_ms: Option<f64>,
    pub peak_mem_bytes: i64,
    pub timed_out: bool,
}

impl BenchRecord {
    pub fn completed(case: &BenchCase, run: usize, triangles: u64, elapsed: Duration, peak_mem_bytes: i64) -> Self {
        BenchRecord {
            name: case.name.clone(),
            engine: case.engine.to_string(),
            workers: case.workers,
            run: run.to_string(),
            triangles: Some(triangles),
            elapsed_ms: Some(elapsed.as_secs_f64() * 1e3),
            peak_mem_bytes,
            timed_out: false,
        }
    }

    pub fn timed_out(case: &BenchCase, run: usize, elapsed: Duration) -> Self {
        BenchRecord {
            name: case.name.clone(),
            engine: case.engine.to_string(),
            workers: case.workers,
            run: run.to_string(),
            triangles: None,
            elapsed_ms: Some(elapsed.as_secs_f64() * 1e3),
            peak_mem_bytes: -1,
            timed_out: true,
        }
    }

    pub fn is_aggregate(&self) -> bool {
        self.run == "mean"
    }
}

/// The per-case summary row: mean elapsed over completed runs, maximum peak
/// memory, `timed_out` when no run completed.
pub fn aggregate(case: &BenchCase, runs: &[BenchRecord]) -> BenchRecord {
    let done: Vec<&BenchRecord> = runs.iter().filter(|r| !r.timed_out).collect();
    let elapsed_ms = if done.is_empty() {
        None
    } else {
        Some(done.iter().filter_map(|r| r.elapsed_ms).sum::<f64>() / done.len() as f64)
    };
    BenchRecord {
        name: case.name.clone(),
        engine: case.engine.to_string(),
        workers: case.workers,
        run: "mean".to_owned(),
        triangles: done.first().and_then(|r| r.triangles),
        elapsed_ms,
        peak_mem_bytes: runs.iter().map(|r| r.peak_mem_bytes).max().unwrap_or(-1),
        timed_out: done.is_empty(),
    }
}

/// Appends records to a CSV file, writing the header only when the file is
/// new or empty.
pub struct CsvSink {
    writer: csv::Writer<std::fs::File>,
}

impl CsvSink {
    pub fn open(path: &Path) -> Result<Self> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .read(true)
            .open(path)
            .map_err(|e| Error::file(path, e))?;
        let len = file.seek(SeekFrom::End(0)).map_err(|e| Error::file(path, e))?;
        let needs_newline = if len > 0 {
            let mut last = [0u8; 1];
            file.seek(SeekFrom::End(-1)).map_err(|e| Error::file(path, e))?;
            file.read_exact(&mut last).map_err(|e| Error::file(path, e))?;
            last[0] != b'\n'
        } else {
            false
        };
        let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(file);
        if len == 0 {
            writer.write_record(CSV_HEADER).map_err(csv_err)?;
        } else if needs_newline {
            writer.write_record(None::<&[u8]>).map_err(csv_err)?;
        }
        Ok(CsvSink { writer })
    }

    pub fn write(&mut self, record: &BenchRecord) -> Result<()> {
        self.writer.serialize(record).map_err(csv_err)?;
        self.writer.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Runtime(format!("csv: {other:?}")),
    }
}
