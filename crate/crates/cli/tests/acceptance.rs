//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! each and exits non-zero if a blocking criterion fails.
//!
//! `cargo test -p tricount-cli --test acceptance -- 3 7` runs only the named
//! criteria.

use std::collections::{BTreeSet, HashSet};
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::Command;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tricount::io::{parse_str, write_to};
use tricount::mapreduce::round_one_triples;
use tricount::oracle::{enumerate_2paths, simulate_partition};
use tricount::{
    count_triangles_exact, count_triangles_mapreduce, edge_key, generate, run_pipeline, Edge, EdgeKey, GenSpec,
    GraphFormat, MrConfig, NodeId, PipelineConfig, Scheduling,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

struct Graph {
    label: String,
    edges: Vec<Edge>,
}

/// n in 5..=60, densities 0.1/0.5/0.9, two seeds each: 336 graphs.
fn equivalence_suite() -> Vec<Graph> {
    let mut graphs = Vec::new();
    for n in 5..=60u32 {
        for density in [0.1, 0.5, 0.9] {
            for k in 0..2u64 {
                let seed = u64::from(n) * 1000 + (density * 10.0) as u64 * 10 + k;
                let spec = GenSpec::by_nodes(n, density, seed);
                graphs.push(Graph {
                    label: spec.to_string(),
                    edges: generate(&spec).expect("suite spec is feasible"),
                });
            }
        }
    }
    graphs
}

fn sample() -> Vec<Edge> {
    [(2, 1), (1, 3), (4, 5), (2, 3), (4, 7), (4, 6)].into_iter().map(Edge::from).collect()
}

fn sorted(mut v: Vec<NodeId>) -> Vec<NodeId> {
    v.sort();
    v
}

fn pool(workers: usize) -> Scheduling {
    Scheduling::Pool {
        workers: NonZeroUsize::new(workers).unwrap(),
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let g = sample();
    let oracle = count_triangles_exact(&g);
    let pipe = run_pipeline(&g, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    let mr = count_triangles_mapreduce(&g, &MrConfig::default()).map_err(|e| e.to_string())?;
    ensure!(oracle == 1, "oracle counted {oracle}");
    ensure!(pipe.triangles == 1, "pipeline counted {}", pipe.triangles);
    ensure!(mr.triangles == 1 && mr.raw_sum == 3, "mapreduce gave {mr:?}");
    let paths = enumerate_2paths(&g);
    ensure!(paths.len() == 6, "{} two-paths", paths.len());

    let want: [(u32, &[u32]); 3] = [(2, &[1, 3]), (1, &[3]), (4, &[5, 7, 6])];
    let partition = simulate_partition(&g);
    ensure!(partition.len() == 3, "{} simulated filters", partition.len());
    for ((entry, report), (resp, adj)) in partition.iter().zip(&pipe.filters).zip(want) {
        let adj: Vec<NodeId> = adj.iter().copied().map(NodeId).collect();
        ensure!(entry.responsible == NodeId(resp), "simulated responsible {}", entry.responsible);
        ensure!(entry.adjacency == adj, "simulated adjacency of {resp}: {:?}", entry.adjacency);
        ensure!(report.responsible == NodeId(resp), "pipeline responsible {}", report.responsible);
        ensure!(sorted(report.adjacency.clone()) == sorted(adj), "pipeline adjacency of {resp}");
    }
    ensure!(pipe.filters.len() == 3, "pipeline created {} filters", pipe.filters.len());
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("1 triangle, raw_sum 3, 6 paths, filters 2/1/4 in {elapsed:.2?}"))
}

/// Pipeline configs for the equivalence runs, cycled by graph index.
fn pipeline_variants() -> [PipelineConfig; 4] {
    [
        PipelineConfig::default(),
        PipelineConfig::default().with_capacity(4).with_batch_size(8),
        PipelineConfig {
            scheduling: pool(2),
            ..PipelineConfig::default()
        },
        PipelineConfig {
            scheduling: pool(1),
            ..PipelineConfig::default().with_capacity(64).with_batch_size(32)
        },
    ]
}

fn equivalence(graphs: &[Graph], pipeline: &[PipelineConfig], mr: &MrConfig) -> Result<(), String> {
    for (i, g) in graphs.iter().enumerate() {
        let want = count_triangles_exact(&g.edges);
        let cfg = &pipeline[i % pipeline.len()];
        let pipe = run_pipeline(&g.edges, cfg).map_err(|e| format!("{}: {e}", g.label))?;
        ensure!(pipe.triangles == want, "{}: pipeline {} vs oracle {want} ({cfg:?})", g.label, pipe.triangles);
        let got = count_triangles_mapreduce(&g.edges, mr).map_err(|e| format!("{}: {e}", g.label))?;
        ensure!(got.triangles == want, "{}: mapreduce {} vs oracle {want}", g.label, got.triangles);
    }
    Ok(())
}

fn criterion_2(graphs: &[Graph]) -> Check {
    ensure!(graphs.len() >= 200, "only {} graphs", graphs.len());
    let start = Instant::now();
    let mr = MrConfig {
        mappers: 2,
        reducers: 3,
        channel_capacity: 16,
        batch_size: 8,
        spill_dir: None,
    };
    equivalence(graphs, &pipeline_variants(), &mr)?;
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(60), "suite took {elapsed:?}");
    Ok(format!("{} graphs, both engines equal the oracle, {elapsed:.2?}", graphs.len()))
}

fn shuffled(edges: &[Edge], rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let mut out: Vec<Edge> = edges.iter().map(|e| if rng.gen() { e.reversed() } else { *e }).collect();
    out.shuffle(rng);
    out
}

fn criterion_3(graphs: &[Graph]) -> Check {
    let start = Instant::now();
    let cfg = PipelineConfig {
        scheduling: pool(1),
        ..PipelineConfig::default().with_capacity(8).with_batch_size(16)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut runs = 0;
    for g in graphs {
        let out = run_pipeline(&g.edges, &cfg).map_err(|e| format!("{}: {e}", g.label))?;
        let vertices: BTreeSet<NodeId> = g.edges.iter().flat_map(|e| [e.first, e.second]).collect();
        ensure!(
            out.filters_created < vertices.len().max(1),
            "{}: {} filters for {} vertices",
            g.label,
            out.filters_created,
            vertices.len()
        );
        ensure!(out.filters.len() == out.filters_created, "{}: reports missing", g.label);

        let responsible: HashSet<NodeId> = out.filters.iter().map(|f| f.responsible).collect();
        ensure!(responsible.len() == out.filters.len(), "{}: repeated responsible node", g.label);
        let dominated: HashSet<NodeId> = g
            .edges
            .iter()
            .flat_map(|e| {
                let mut hit = Vec::new();
                if responsible.contains(&e.first) {
                    hit.push(e.second);
                }
                if responsible.contains(&e.second) {
                    hit.push(e.first);
                }
                hit
            })
            .chain(responsible.iter().copied())
            .collect();
        ensure!(dominated.len() == vertices.len(), "{}: responsible set does not dominate", g.label);

        let mut cover: Vec<EdgeKey> =
            out.filters.iter().flat_map(|f| f.adjacency.iter().map(|&a| edge_key(Edge::new(f.responsible, a)))).collect();
        let held = cover.len();
        cover.sort();
        cover.dedup();
        let mut keys: Vec<EdgeKey> = g.edges.iter().map(Edge::key).collect();
        keys.sort();
        ensure!(held == keys.len() && cover == keys, "{}: partition is not an exact cover", g.label);

        let tallies: u64 = out.filters.iter().map(|f| f.tally).sum();
        ensure!(tallies == out.triangles, "{}: tallies {tallies} vs total {}", g.label, out.triangles);

        for p in 0..5 {
            let perm = shuffled(&g.edges, &mut rng);
            let again = run_pipeline(&perm, &cfg).map_err(|e| format!("{}: {e}", g.label))?;
            ensure!(again.triangles == out.triangles, "{}: permutation {p} counted {}", g.label, again.triangles);
            runs += 1;
        }
    }
    Ok(format!("{} graphs, {runs} permuted runs, {:.2?}", graphs.len(), start.elapsed()))
}

fn criterion_4(graphs: &[Graph]) -> Check {
    let start = Instant::now();
    let spill_root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let spill_dir = spill_root.path().to_path_buf();
    let mut configs = Vec::new();
    for mappers in [1, 2, 8] {
        for reducers in [1, 3, 8] {
            for channel_capacity in [1, 64] {
                for spill in [false, true] {
                    configs.push(MrConfig {
                        mappers,
                        reducers,
                        channel_capacity,
                        batch_size: 4,
                        spill_dir: spill.then(|| spill_dir.clone()),
                    });
                }
            }
        }
    }
    for g in graphs {
        let want = count_triangles_exact(&g.edges);
        for cfg in &configs {
            let out = count_triangles_mapreduce(&g.edges, cfg).map_err(|e| format!("{}: {e}", g.label))?;
            ensure!(out.raw_sum % 3 == 0, "{}: raw_sum {} under {cfg:?}", g.label, out.raw_sum);
            ensure!(out.triangles == want, "{}: {} vs {want} under {cfg:?}", g.label, out.triangles);
        }
        let mut expected = enumerate_2paths(&g.edges);
        expected.sort();
        for spill in [None, Some(spill_dir.clone())] {
            let cfg = MrConfig {
                mappers: 3,
                reducers: 2,
                spill_dir: spill,
                ..MrConfig::default()
            };
            let mut got = round_one_triples(&g.edges, &cfg).map_err(|e| format!("{}: {e}", g.label))?;
            got.sort();
            ensure!(got == expected, "{}: Round I multiset differs", g.label);
        }
    }
    let leftovers = std::fs::read_dir(&spill_dir).map_err(|e| e.to_string())?.count();
    ensure!(leftovers == 0, "{leftovers} spill entries left behind");
    Ok(format!("{} graphs x {} configs, Round I multisets equal, {:.2?}", graphs.len(), configs.len(), start.elapsed()))
}

fn criterion_5() -> Check {
    let g = generate(&GenSpec::by_nodes(1000, 0.9, 1)).map_err(|e| e.to_string())?;
    ensure!(g.len() == 449_550, "{} edges", g.len());
    let want = count_triangles_exact(&g);

    let start = Instant::now();
    let cfg = PipelineConfig::default().with_batch_size(256);
    let pipe = run_pipeline(&g, &cfg).map_err(|e| e.to_string())?;
    let pipe_time = start.elapsed();
    ensure!(pipe.triangles == want, "pipeline {} vs oracle {want}", pipe.triangles);
    ensure!(pipe_time < Duration::from_secs(600), "pipeline took {pipe_time:?}");

    let start = Instant::now();
    let mr = count_triangles_mapreduce(&g, &MrConfig::default()).map_err(|e| e.to_string())?;
    let mr_time = start.elapsed();
    ensure!(mr.triangles == want, "mapreduce {} vs oracle {want}", mr.triangles);
    Ok(format!(
        "{want} triangles; pipeline {pipe_time:.1?} ({} filters), mapreduce {mr_time:.1?}",
        pipe.filters_created
    ))
}

fn results_csv() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("dense_n1000.csv")
}

/// Ok((csv line, whether pipeline was faster at both densities)).
fn criterion_6() -> Result<(String, bool), String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut manifest = String::new();
    for d in ["0.5", "0.9"] {
        for engine in ["pipeline", "mapreduce"] {
            manifest.push_str(&format!("d{d}-{engine} {engine} gen:nodes=1000,density={d},seed=1 {workers} 5 300\n"));
        }
    }
    let manifest_path = dir.path().join("dense.txt");
    std::fs::write(&manifest_path, manifest).map_err(|e| e.to_string())?;
    let csv_path = results_csv();
    let _ = std::fs::remove_file(&csv_path);
    let out = Command::new(env!("CARGO_BIN_EXE_tricount"))
        .arg("bench")
        .arg("--manifest")
        .arg(&manifest_path)
        .arg("--out")
        .arg(&csv_path)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "bench failed: {}", String::from_utf8_lossy(&out.stderr));

    let mut reader = csv::Reader::from_path(&csv_path).map_err(|e| e.to_string())?;
    let mut means = std::collections::HashMap::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        rows += 1;
        if &record[3] == "mean" {
            let ms: f64 = record[5].parse().map_err(|_| format!("{} has no mean", &record[0]))?;
            means.insert(record[0].to_owned(), ms);
        }
    }
    ensure!(rows == 4 * 6, "CSV has {rows} rows");
    let mut faster = true;
    let mut summary = Vec::new();
    for d in ["0.5", "0.9"] {
        let p = means[&format!("d{d}-pipeline")];
        let m = means[&format!("d{d}-mapreduce")];
        faster &= p <= m;
        summary.push(format!("d={d} pipeline {:.0} ms vs mapreduce {:.0} ms", p, m));
    }
    Ok((format!("{}; csv {}", summary.join(", "), csv_path.display()), faster))
}

fn criterion_7(graphs: Vec<Graph>) -> Check {
    let (tx, rx) = mpsc::channel();
    let start = Instant::now();
    std::thread::spawn(move || {
        let rendezvous = [
            PipelineConfig::default(),
            PipelineConfig {
                scheduling: pool(1),
                ..PipelineConfig::default()
            },
        ];
        let mr = MrConfig {
            mappers: 2,
            reducers: 3,
            channel_capacity: 1,
            batch_size: 1,
            spill_dir: None,
        };
        let _ = tx.send(equivalence(&graphs, &rendezvous, &mr).map(|()| graphs.len()));
    });
    match rx.recv_timeout(Duration::from_secs(60)) {
        Ok(Ok(n)) => Ok(format!("{n} graphs at capacity 0 in {:.2?}", start.elapsed())),
        Ok(Err(e)) => Err(e),
        Err(_) => Err("watchdog fired after 60 s".to_owned()),
    }
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..20 {
        let n = rng.gen_range(2..=80);
        let d = rng.gen_range(0.05..=1.0);
        let spec = GenSpec::by_nodes(n, d, rng.gen());
        let g = generate(&spec).map_err(|e| e.to_string())?;
        for format in GraphFormat::ALL {
            let mut buf = Vec::new();
            write_to(&g, &mut buf, format).map_err(|e| e.to_string())?;
            let text = String::from_utf8(buf).map_err(|e| e.to_string())?;
            let parsed = parse_str(&text, format).map_err(|e| format!("graph {i} {format}: {e}"))?;
            let back: Vec<Edge> = tricount::dedup_stream(parsed).collect();
            ensure!(back == g, "graph {i} ({spec}) changed through {format}");
            if format == GraphFormat::Dimacs {
                let arcs = text.lines().filter(|l| l.starts_with("a ")).count();
                ensure!(arcs == 2 * g.len(), "graph {i}: {arcs} arcs for {} edges", g.len());
            }
        }
    }
    Ok("20 graphs through dimacs, snap and edgelist".to_owned())
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |n: u32| filter.is_empty() || filter.iter().any(|f| f == &n.to_string());
    let graphs = equivalence_suite();

    let mut failed = 0;
    let mut report = |n: u32, title: &str, result: Check| {
        match result {
            Ok(detail) => println!("criterion {n} {title}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} {title}: FAIL ({why})");
            }
        }
    };
    if wanted(1) {
        report(1, "golden example", criterion_1());
    }
    if wanted(2) {
        report(2, "oracle equivalence", criterion_2(&graphs));
    }
    if wanted(3) {
        report(3, "pipeline invariants", criterion_3(&graphs));
    }
    if wanted(4) {
        report(4, "mapreduce invariants", criterion_4(&graphs));
    }
    if wanted(5) {
        report(5, "n=1000 d=0.9 smoke test", criterion_5());
    }
    if wanted(6) {
        match criterion_6() {
            Ok((detail, true)) => report(6, "dense timing comparison", Ok(detail)),
            Ok((detail, false)) => {
                println!("criterion 6 dense timing comparison: FAIL, non-blocking (pipeline slower: {detail})")
            }
            Err(why) => report(6, "dense timing comparison", Err(why)),
        }
    }
    if wanted(7) {
        let graphs = equivalence_suite();
        report(7, "deadlock freedom", criterion_7(graphs));
    }
    if wanted(8) {
        report(8, "format round trip", criterion_8());
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
