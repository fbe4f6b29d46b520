//! Benchmark driver. Every measured run is a fresh `tricount bench-run`
//! child process, so peak memory is per run and a run that exceeds its
//! timeout can be killed.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use tricount::bench::{
    aggregate, parse_manifest, peak_rss_bytes, run_engine, BenchCase, BenchInput, BenchRecord, CsvSink, Engine,
    EngineTuning,
};
use tricount::Error;
use wait_timeout::ChildExt;

use crate::Failure;

/// What a child reported on stdout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunReport {
    pub triangles: u64,
    pub elapsed_ms: f64,
    pub peak_mem_bytes: i64,
}

impl RunReport {
    fn to_line(self) -> String {
        format!(
            "triangles={} elapsed_ms={:.3} peak_mem_bytes={}",
            self.triangles, self.elapsed_ms, self.peak_mem_bytes
        )
    }

    fn from_line(line: &str) -> Option<Self> {
        let mut fields: HashMap<&str, &str> = HashMap::new();
        for kv in line.split_whitespace() {
            let (k, v) = kv.split_once('=')?;
            fields.insert(k, v);
        }
        Some(RunReport {
            triangles: fields.get("triangles")?.parse().ok()?,
            elapsed_ms: fields.get("elapsed_ms")?.parse().ok()?,
            peak_mem_bytes: fields.get("peak_mem_bytes")?.parse().ok()?,
        })
    }
}

enum Outcome {
    Done(RunReport),
    TimedOut(Duration),
}

pub fn bench_run(engine: &str, input: &str, workers: usize, tuning: &EngineTuning) -> Result<(), Failure> {
    let engine: Engine = engine.parse()?;
    let input = BenchInput::parse(input, Path::new("."))?;
    let edges = input.load()?;
    let (triangles, elapsed) = run_engine(engine, &edges, workers, tuning)?;
    let report = RunReport {
        triangles,
        elapsed_ms: elapsed.as_secs_f64() * 1e3,
        peak_mem_bytes: peak_rss_bytes(),
    };
    println!("{}", report.to_line());
    Ok(())
}

fn tuning_args(tuning: &EngineTuning) -> Vec<String> {
    let mut args = vec!["--batch".to_owned(), tuning.batch_size.to_string()];
    if let Some(cap) = tuning.channel_capacity {
        args.extend(["--channel-cap".to_owned(), cap.to_string()]);
    }
    if let Some(dir) = &tuning.spill_dir {
        args.extend(["--spill".to_owned(), dir.display().to_string()]);
    }
    args
}

fn spawn_run(
    engine: Engine,
    input: &BenchInput,
    workers: usize,
    timeout: Duration,
    tuning: &EngineTuning,
) -> Result<Outcome, Error> {
    let exe = std::env::current_exe()?;
    let start = Instant::now();
    let mut child = Command::new(exe)
        .arg("bench-run")
        .args(["--engine", engine.as_str()])
        .args(["--input", &input.to_string()])
        .args(["--workers", &workers.to_string()])
        .args(tuning_args(tuning))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()?;
    let status = match child.wait_timeout(timeout)? {
        Some(status) => status,
        None => {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(Outcome::TimedOut(start.elapsed()));
        }
    };
    let mut stdout = String::new();
    let mut stderr = String::new();
    if let Some(mut out) = child.stdout.take() {
        out.read_to_string(&mut stdout)?;
    }
    if let Some(mut err) = child.stderr.take() {
        err.read_to_string(&mut stderr)?;
    }
    if !status.success() {
        return Err(Error::Runtime(format!("{engine} run on {input} failed ({status}): {}", stderr.trim())));
    }
    RunReport::from_line(stdout.trim())
        .map(Outcome::Done)
        .ok_or_else(|| Error::Runtime(format!("unreadable run report {stdout:?}")))
}

pub fn bench(manifest: &Path, out: &Path, tuning: &EngineTuning) -> Result<(), Failure> {
    let text = std::fs::read_to_string(manifest).map_err(Error::Io)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let cases = parse_manifest(&text, base).map_err(|e| Failure {
        code: 2,
        error: Error::Config(format!("{}: {e}", manifest.display())),
    })?;
    let mut sink = CsvSink::open(out)?;
    // Oracle counts keyed by input, computed once.
    let mut expected: HashMap<String, Option<u64>> = HashMap::new();
    for case in &cases {
        let key = case.input.to_string();
        if case.engine != Engine::Oracle && !expected.contains_key(&key) {
            let count = match spawn_run(Engine::Oracle, &case.input, 1, case.timeout, tuning)? {
                Outcome::Done(r) => Some(r.triangles),
                Outcome::TimedOut(_) => {
                    eprintln!("warning: oracle timed out on {key}; counts for {} are unverified", case.name);
                    None
                }
            };
            expected.insert(key.clone(), count);
        }
        let records = run_case(case, tuning, expected.get(&key).copied().flatten())?;
        for r in &records {
            sink.write(r)?;
        }
        let agg = aggregate(case, &records);
        sink.write(&agg)?;
        println!(
            "{} engine={} workers={} triangles={} mean_elapsed_ms={} timed_out={}",
            case.name,
            case.engine,
            case.workers,
            agg.triangles.map_or("-".to_owned(), |t| t.to_string()),
            agg.elapsed_ms.map_or("-".to_owned(), |e| format!("{e:.3}")),
            agg.timed_out
        );
    }
    Ok(())
}

fn run_case(case: &BenchCase, tuning: &EngineTuning, expected: Option<u64>) -> Result<Vec<BenchRecord>, Error> {
    let mut records = Vec::with_capacity(case.repeat);
    for run in 0..case.repeat {
        let record = match spawn_run(case.engine, &case.input, case.workers, case.timeout, tuning)? {
            Outcome::Done(r) => {
                if let Some(want) = expected {
                    if r.triangles != want {
                        return Err(Error::Runtime(format!(
                            "{} run {run}: {} counted {} triangles, oracle says {want}",
                            case.name, case.engine, r.triangles
                        )));
                    }
                }
                BenchRecord::completed(
                    case,
                    run,
                    r.triangles,
                    Duration::from_secs_f64(r.elapsed_ms / 1e3),
                    r.peak_mem_bytes,
                )
            }
            Outcome::TimedOut(elapsed) => BenchRecord::timed_out(case, run, elapsed),
        };
        records.push(record);
    }
    Ok(records)
}
