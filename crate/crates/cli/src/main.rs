// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! `hetgraphlet` command-line tool.
//!
//! Exit status is 0 on success, 1 when `verify` finds a mismatch and 2 for
//! bad input (unreadable or malformed files, invalid flags).

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use hetgraphlet::aggregate::{orbits_to_graphlets, typed_distribution, unique_counts_summary};
use hetgraphlet::oracle::{self, Oracle};
use hetgraphlet::sparse::write_sparse;
use hetgraphlet::synth::{GenSpec, Model};
use hetgraphlet::{count_all, CountOptions, CountResult, GlobalCounts, HeteroGraph, Shape};

#[derive(Parser)]
#[command(
    name = "hetgraphlet",
    version,
    about = "Typed graphlet counting for heterogeneous graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-edge typed orbit (or graphlet) counts in the sparse text format.
    Count(CountArgs),
    /// Whole-graph frequency of every typed graphlet.
    Global(GlobalArgs),
    /// Observed, possible and forbidden typed variants per graphlet class.
    Summary(SummaryArgs),
    /// Write a random typed graph.
    Generate(GenerateArgs),
    /// Compare the engine against brute-force enumeration.
    Verify(VerifyArgs),
    /// Time counting on generated graphs and print CSV.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Input {
    /// Edge list, one `src dst [edge_type]` per line.
    #[arg(long)]
    graph: PathBuf,
    /// Node types, one `node type_label` per line.
    #[arg(long)]
    types: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    threads: u32,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Orbit,
    Graphlet,
}

#[derive(Args)]
struct CountArgs {
    #[command(flatten)]
    input: Input,
    /// Output directory for counts.txt, lookup.txt and manifest.txt.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u8).range(3..=4))]
    max_k: u8,
    #[arg(long, value_enum, default_value_t = Emit::Orbit)]
    emit: Emit,
}

#[derive(Args)]
struct GlobalArgs {
    #[command(flatten)]
    input: Input,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SummaryArgs {
    #[command(flatten)]
    input: Input,
    /// Typed variants listed per class.
    #[arg(long, default_value_t = 5)]
    top: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    Er,
    Cl,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelKind::Er)]
    model: ModelKind,
    /// Edge probability for `er`; overrides --avg-degree.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    avg_degree: f64,
    /// Power-law exponent for `cl`.
    #[arg(long, default_value_t = 2.5)]
    exponent: f64,
    /// Number of node types.
    #[arg(long = "L", default_value_t = 1)]
    num_types: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModelArgs {
    fn spec(&self, n: usize) -> Result<GenSpec> {
        let model = match self.model {
            ModelKind::Er => {
                if n < 2 {
                    bail!("need at least 2 nodes");
                }
                Model::ErdosRenyi {
                    p: self.p.unwrap_or(self.avg_degree / (n - 1) as f64).min(1.0),
                }
            }
            ModelKind::Cl => {
                if self.p.is_some() {
                    bail!("--p only applies to --model er");
                }
                Model::ChungLu {
                    exponent: self.exponent,
                    avg_degree: self.avg_degree,
                }
            }
        };
        Ok(GenSpec {
            model,
            n,
            num_types: self.num_types,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    n: usize,
    /// Output directory for edges.txt and types.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    input: Input,
    /// Largest graph the brute-force side accepts.
    #[arg(long, default_value_t = oracle::DEFAULT_CAP)]
    cap: usize,
    /// Adds one to the first count of this edge before comparing.
    #[arg(long, hide = true)]
    inject_fault: Option<usize>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Graph sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    n: Vec<usize>,
    /// Worker counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    threads: Vec<usize>,
    /// Runs per point; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(input: &Input) -> Result<HeteroGraph> {
    let (g, report) = HeteroGraph::load(&input.graph, &input.types)?;
    if report.duplicate_edges > 0 || report.self_loops > 0 {
        log::warn!(
            "dropped {} duplicate edges and {} self-loops",
            report.duplicate_edges,
            report.self_loops
        );
    }
    log::info!(
        "loaded {} nodes, {} edges, {} types",
        g.num_nodes(),
        g.num_edges(),
        g.num_types()
    );
    Ok(g)
}

fn count(g: &HeteroGraph, threads: u32, max_k: u8) -> Result<CountResult> {
    Ok(count_all(
        g,
        CountOptions {
            workers: threads as usize,
            max_k: max_k as usize,
        },
    )?)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run_count(args: &CountArgs) -> Result<()> {
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let g = load(&args.input)?;
    let start = Instant::now();
    let result = count(&g, args.input.threads, args.max_k)?;
    let wall = start.elapsed().as_secs_f64();

    let mut counts = create(&args.out.join("counts.txt"))?;
    let mut lookup = create(&args.out.join("lookup.txt"))?;
    let motifs = match args.emit {
        Emit::Orbit => {
            let edges = result.per_edge.iter().map(|e| e.counts.as_slice());
            write_sparse(&g, edges, &mut counts, &mut lookup)?;
            result.motifs.len()
        }
        Emit::Graphlet => {
            let rolled: Vec<_> = result.per_edge.iter().map(orbits_to_graphlets).collect();
            write_sparse(
                &g,
                rolled.iter().map(Vec::as_slice),
                &mut counts,
                &mut lookup,
            )?;
            let mut keys: Vec<_> = rolled.iter().flatten().map(|&(k, _)| k).collect();
            keys.sort_unstable();
            keys.dedup();
            keys.len()
        }
    };
    counts.flush()?;
    lookup.flush()?;

    let mut manifest = create(&args.out.join("manifest.txt"))?;
    writeln!(manifest, "nodes {}", g.num_nodes())?;
    writeln!(manifest, "edges {}", g.num_edges())?;
    writeln!(manifest, "types {}", g.num_types())?;
    writeln!(manifest, "workers {}", args.input.threads)?;
    writeln!(manifest, "max_k {}", args.max_k)?;
    writeln!(
        manifest,
        "emit {}",
        if args.emit == Emit::Orbit {
            "orbit"
        } else {
            "graphlet"
        }
    )?;
    writeln!(manifest, "motifs {motifs}")?;
    writeln!(manifest, "wall_secs {wall:.6}")?;
    for (t, label) in g.type_labels().iter().enumerate() {
        writeln!(manifest, "type {} {}", t + 1, label)?;
    }
    manifest.flush()?;
    eprintln!(
        "{} edges, {} motifs, {:.3} s -> {}",
        g.num_edges(),
        motifs,
        wall,
        args.out.display()
    );
    Ok(())
}

fn global_counts(input: &Input) -> Result<(HeteroGraph, GlobalCounts)> {
    let g = load(input)?;
    let result = count(&g, input.threads, 4)?;
    let gc = GlobalCounts::from_edges(&g, &result)?;
    Ok((g, gc))
}

fn run_global(args: &GlobalArgs) -> Result<()> {
    let (_, gc) = global_counts(&args.input)?;
    let mut out = output(args.out.as_deref())?;
    for (key, c) in &gc.counts {
        let d = key.describe();
        writeln!(
            out,
            "{} {} {} {} {}",
            d.name,
            d.nodes,
            d.edges,
            d.type_list(),
            c
        )?;
    }
    out.flush()?;
    Ok(())
}

fn run_summary(args: &SummaryArgs) -> Result<()> {
    let (g, gc) = global_counts(&args.input)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(
        out,
        "nodes {} edges {} types {}",
        g.num_nodes(),
        g.num_edges(),
        g.num_types()
    )?;
    for s in unique_counts_summary(&gc) {
        writeln!(
            out,
            "{}: observed {}/{} forbidden {} total {} entropy {:.4} homogeneous {:.4}",
            s.graphlet.name(),
            s.observed,
            s.possible,
            s.forbidden,
            s.total,
            s.entropy,
            s.homogeneous_share
        )?;
        for (key, p) in typed_distribution(&gc, s.graphlet)
            .entries
            .iter()
            .take(args.top)
        {
            let labels: Vec<&str> = key.types().iter().map(|&t| g.type_label(t)).collect();
            writeln!(out, "  {{{}}} {:.4}", labels.join(","), p)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn run_generate(args: &GenerateArgs) -> Result<()> {
    let g = args.model.spec(args.n)?.generate()?;
    fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    g.write(args.out.join("edges.txt"), args.out.join("types.txt"))?;
    eprintln!(
        "{} nodes, {} edges, {} types -> {}",
        g.num_nodes(),
        g.num_edges(),
        g.num_types(),
        args.out.display()
    );
    Ok(())
}

/// Returns whether the engine matched the oracle on every edge.
fn run_verify(args: &VerifyArgs) -> Result<bool> {
    let g = load(&args.input)?;
    let oracle = Oracle::with_cap(args.cap);
    let mut result = count(&g, args.input.threads, 4)?;
    if let Some(e) = args.inject_fault {
        match result
            .per_edge
            .get_mut(e)
            .and_then(|c| c.counts.first_mut())
        {
            Some(slot) => slot.1 += 1,
            None => bail!("no edge {e} to corrupt"),
        }
    }
    let report = oracle::verify(&oracle, &g, &result)?;
    let mut out = io::stdout().lock();
    for m in &report.mismatches {
        let (i, j) = g.edge(m.edge_id);
        writeln!(
            out,
            "edge {} ({} {}): {} engine {} oracle {}",
            m.edge_id,
            g.node_label(i),
            g.node_label(j),
            m.key,
            m.engine,
            m.oracle
        )?;
    }
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    writeln!(
        out,
        "{verdict}: {} edges, {} mismatches",
        report.edges_checked,
        report.mismatches.len()
    )?;
    Ok(report.passed())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    if args.threads.contains(&0) || args.reps == 0 {
        bail!("--threads and --reps must be at least 1");
    }
    let mut out = output(args.out.as_deref())?;
    writeln!(out, "n,M,workers,wall_secs")?;
    for &n in &args.n {
        let g = args.model.spec(n)?.generate()?;
        for &workers in &args.threads {
            let mut best = f64::INFINITY;
            for _ in 0..args.reps {
                let start = Instant::now();
                count_all(&g, CountOptions { workers, max_k: 4 })?;
                best = best.min(start.elapsed().as_secs_f64());
            }
            writeln!(out, "{},{},{},{:.6}", n, g.num_edges(), workers, best)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Count(a) => run_count(a).map(|()| true),
        Command::Global(a) => run_global(a).map(|()| true),
        Command::Summary(a) => run_summary(a).map(|()| true),
        Command::Generate(a) => run_generate(a).map(|()| true),
        Command::Verify(a) => run_verify(a),
        Command::Bench(a) => run_bench(a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
