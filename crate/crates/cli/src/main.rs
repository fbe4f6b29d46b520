use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use tricount::bench::{Engine, EngineTuning};
use tricount::io::write;
use tricount::mapreduce::{count_triangles_mapreduce, MrConfig};
use tricount::pipeline::{run_pipeline, PipelineConfig};
use tricount::{count_triangles_exact, generate, graph_stats, EdgeFile, Error, GenSpec, GraphFormat};

mod harness;

#[derive(Parser)]
#[command(name = "tricount", version, about = "Exact triangle counting with a dynamic pipeline or a two-round MapReduce")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count the triangles of an edge-list file.
    Count(CountArgs),
    /// Generate a random graph with a fixed edge count.
    Gen(GenArgs),
    /// Run a benchmark manifest and write CSV.
    Bench(BenchArgs),
    /// Run one measured engine invocation (used by `bench`).
    #[command(hide = true)]
    BenchRun(BenchRunArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Pipeline,
    Mapreduce,
    Oracle,
}

impl From<Algo> for Engine {
    fn from(a: Algo) -> Engine {
        match a {
            Algo::Pipeline => Engine::Pipeline,
            Algo::Mapreduce => Engine::MapReduce,
            Algo::Oracle => Engine::Oracle,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dimacs,
    Snap,
    Edgelist,
}

impl From<Format> for GraphFormat {
    fn from(f: Format) -> GraphFormat {
        match f {
            Format::Dimacs => GraphFormat::Dimacs,
            Format::Snap => GraphFormat::Snap,
            Format::Edgelist => GraphFormat::EdgeList,
        }
    }
}

#[derive(Args)]
struct TuningArgs {
    /// Edges (or records) per channel message.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u64).range(1..))]
    batch: u64,
    /// Channel capacity; defaults to rendezvous for the pipeline and 16 for MapReduce.
    #[arg(long = "channel-cap")]
    channel_cap: Option<usize>,
    /// Spill the MapReduce round boundary to files under this directory.
    #[arg(long)]
    spill: Option<PathBuf>,
}

impl TuningArgs {
    fn tuning(&self) -> EngineTuning {
        EngineTuning {
            batch_size: self.batch as usize,
            channel_capacity: self.channel_cap,
            spill_dir: self.spill.clone(),
        }
    }
}

#[derive(Args)]
struct CountArgs {
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "edgelist")]
    format: Format,
    #[arg(long)]
    mappers: Option<usize>,
    #[arg(long)]
    reducers: Option<usize>,
    /// Run pipeline filters as tasks on this many worker threads instead of
    /// one thread per filter.
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Args)]
#[command(group(ArgGroup::new("size").required(true).args(["nodes", "arcs"])))]
struct GenArgs {
    #[arg(long)]
    nodes: Option<u32>,
    #[arg(long)]
    arcs: Option<u64>,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "edgelist")]
    format: Format,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// CSV destination; rows are appended.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    tuning: TuningArgs,
}

#[derive(Args)]
struct BenchRunArgs {
    #[arg(long)]
    engine: String,
    #[arg(long)]
    input: String,
    #[arg(long)]
    workers: usize,
    #[command(flatten)]
    tuning: TuningArgs,
}

/// Exit 1 for input/runtime failures, 2 for unusable arguments.
struct Failure {
    code: u8,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::InfeasibleSpec(_) | Error::Config(_) => 2,
            _ => 1,
        };
        Failure { code, error }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(args) => count(args),
        Command::Gen(args) => gen(args),
        Command::Bench(args) => harness::bench(&args.manifest, &args.out, &args.tuning.tuning()),
        Command::BenchRun(args) => harness::bench_run(&args.engine, &args.input, args.workers, &args.tuning.tuning()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tricount: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn count(args: CountArgs) -> Result<(), Failure> {
    let source = EdgeFile::new(&args.input, args.format.into());
    let tuning = args.tuning.tuning();
    let triangles = match args.algo {
        Algo::Pipeline => {
            let cfg = PipelineConfig::default()
                .with_batch_size(tuning.batch_size)
                .with_capacity(tuning.channel_capacity.unwrap_or(0))
                .with_pool(args.workers.unwrap_or(0));
            run_pipeline(&source, &cfg)?.triangles
        }
        Algo::Mapreduce => {
            let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
            let cfg = MrConfig {
                mappers: args.mappers.unwrap_or(default_workers),
                reducers: args.reducers.unwrap_or(default_workers),
                channel_capacity: tuning.channel_capacity.unwrap_or(tricount::bench::DEFAULT_MR_CAPACITY),
                batch_size: tuning.batch_size,
                spill_dir: tuning.spill_dir,
            };
            count_triangles_mapreduce(&source, &cfg)?.triangles
        }
        Algo::Oracle => count_triangles_exact(&source.load()?),
    };
    println!("{triangles}");
    Ok(())
}

fn gen(args: GenArgs) -> Result<(), Failure> {
    let spec = match (args.nodes, args.arcs) {
        (Some(n), _) => GenSpec::by_nodes(n, args.density, args.seed),
        (None, Some(m)) => GenSpec::by_arcs(m, args.density, args.seed),
        (None, None) => unreachable!("clap enforces one of --nodes/--arcs"),
    };
    let edges = generate(&spec)?;
    write(&edges, &args.out, args.format.into())?;
    println!("{}", graph_stats(edges.iter().copied()));
    Ok(())
}
