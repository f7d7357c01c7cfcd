use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use laplacian_sketch::generate::{generate, GraphKind, Weights};
use laplacian_sketch::seed::derive_seed;
use laplacian_sketch::sketch::{build_sketch, relative_error, Algorithm, Sketch};
use laplacian_sketch::sketchfile::{load, save};
use laplacian_sketch::textio::{read_edge_list, read_vector, write_edge_list};
use laplacian_sketch::{quadratic_form, BuildOptions, Result, SketchParams, SparsifierKind, SparsifyOptions, WeightedGraph};

#[derive(Parser)]
#[command(name = "lsketch", version, about = "Spectral sketches for Laplacian quadratic-form queries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a sketch from an edge list.
    Build(BuildArgs),
    /// Answer x^T L x from a sketch.
    Query {
        #[arg(short = 's', long)]
        sketch: PathBuf,
        #[arg(short = 'x', long)]
        vector: PathBuf,
        /// Edge list to compute the exact value against.
        #[arg(long)]
        exact_against: Option<PathBuf>,
        /// Print every replica estimate.
        #[arg(long)]
        verbose: bool,
    },
    /// Report record counts and bit sizes of a sketch.
    Size {
        #[arg(short = 's', long)]
        sketch: PathBuf,
    },
    /// Sweep ε and emit CSV measurements.
    Bench(BenchArgs),
    /// Write a synthetic graph as an edge list.
    Generate {
        /// random-regular[:d], barbell, power-law[:m], complete, dense-core[:k]
        #[arg(long)]
        kind: String,
        #[arg(short = 'n', long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = WeightArg::Constant)]
        weights: WeightArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Basic,
    Improved,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Basic => Algorithm::Basic,
            AlgoArg::Improved => Algorithm::Improved,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SparsifierArg {
    Resistance,
    None,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Constant,
    LogUniform,
}

#[derive(Args)]
struct SketchOpts {
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, value_enum, default_value_t = SparsifierArg::Resistance)]
    sparsifier: SparsifierArg,
    /// Run the sparsifier and the estimator at ε/3 each.
    #[arg(long)]
    tight: bool,
    /// Replace the basic sketch's preprocessing threshold.
    #[arg(long)]
    h_override: Option<f64>,
    /// Spot-check the sparsifier against random queries.
    #[arg(long)]
    verify: bool,
    #[arg(long, default_value_t = laplacian_sketch::params::DEFAULT_C_ALPHA)]
    c_alpha: f64,
    #[arg(long, default_value_t = laplacian_sketch::params::DEFAULT_C_BETA)]
    c_beta: f64,
}

impl SketchOpts {
    fn params(&self, eps: f64) -> Result<SketchParams> {
        let eps = if self.tight { eps / 3.0 } else { eps };
        SketchParams::new(eps, self.delta)?.with_constants(self.c_alpha, self.c_beta)
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions {
            sparsify: SparsifyOptions {
                kind: match self.sparsifier {
                    SparsifierArg::Resistance => SparsifierKind::Resistance,
                    SparsifierArg::None => SparsifierKind::None,
                },
                verify: self.verify,
            },
            h_override: self.h_override,
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[arg(long, value_enum)]
    algo: AlgoArg,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short = 'i', long)]
    input: PathBuf,
    #[arg(short = 'o', long)]
    output: PathBuf,
    #[command(flatten)]
    opts: SketchOpts,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated ε values.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.35,0.25,0.18")]
    sweep: Vec<f64>,
    /// Edge list to benchmark on; otherwise a generated graph.
    #[arg(short = 'i', long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "dense-core:300")]
    kind: String,
    #[arg(short = 'n', long, default_value_t = 500)]
    n: usize,
    #[arg(long, value_enum, default_value_t = WeightArg::Constant)]
    weights: WeightArg,
    /// Restrict to one algorithm.
    #[arg(long, value_enum)]
    algo: Option<AlgoArg>,
    /// Random queries per sketch.
    #[arg(long, default_value_t = 50)]
    queries: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    opts: SketchOpts,
}

fn weights(w: WeightArg) -> Weights {
    match w {
        WeightArg::Constant => Weights::Constant(1.0),
        WeightArg::LogUniform => Weights::LogUniform,
    }
}

fn build_cmd(a: &BuildArgs) -> Result<()> {
    let g = read_edge_list(&a.input)?;
    let params = a.opts.params(a.eps)?;
    let t = Instant::now();
    let sk = build_sketch(&g, a.algo.into(), &params, &a.opts.build_options(), a.seed)?;
    info!(
        "built {} replicas of the {} sketch in {:.1?}",
        sk.replicas.len(),
        sk.algorithm,
        t.elapsed()
    );
    save(&sk, &a.output)?;
    let size = sk.size();
    println!(
        "wrote {} ({} replicas, {} records, {} bits)",
        a.output.display(),
        sk.replicas.len(),
        size.records(),
        size.total_bits()
    );
    Ok(())
}

fn query_cmd(sketch: &Path, vector: &Path, exact_against: Option<&PathBuf>, verbose: bool) -> Result<()> {
    let sk = load(sketch)?;
    let x = read_vector(vector)?;
    let mut report = sk.query(&x)?;
    if let Some(path) = exact_against {
        let g = read_edge_list(path)?;
        report = report.with_exact(quadratic_form(&g, &x)?);
    }
    println!("estimate\t{}", report.estimate);
    println!("replicas\t{}", report.replicas.len());
    if let (Some(exact), Some(rel)) = (report.exact, report.relative_error) {
        println!("exact\t{exact}");
        println!("relative_error\t{rel}");
    }
    if verbose {
        for (i, v) in report.replicas.iter().enumerate() {
            println!("replica[{i}]\t{v}");
        }
    }
    Ok(())
}

fn size_cmd(path: &Path) -> Result<()> {
    let sk = load(path)?;
    let s = sk.size();
    let p = &sk.params;
    println!("algorithm\t{}", sk.algorithm);
    println!("n\t{}", sk.n);
    println!("eps\t{}", p.eps);
    println!("delta\t{}", p.delta);
    println!("replicas\t{}", sk.replicas.len());
    println!("draws_per_vertex\t{}", match sk.algorithm {
        Algorithm::Basic => p.alpha(),
        Algorithm::Improved => p.beta(),
    });
    println!("stored_edges\t{}", s.stored_edges);
    println!("sample_records\t{}", s.sample_records);
    println!("draws\t{}", s.draws);
    println!("records\t{}", s.records());
    println!("stored_edge_bits\t{}", s.stored_edge_bits);
    println!("sample_bits\t{}", s.sample_bits);
    println!("degree_table_bits\t{}", s.degree_table_bits);
    println!("total_bits\t{}", s.total_bits());
    Ok(())
}

fn bench_query_vectors(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = StdRng::seed_from_u64(derive_seed(seed, &[0xBE]));
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect()
}

fn bench_row(g: &WeightedGraph, algo: Algorithm, eps: f64, a: &BenchArgs, queries: &[Vec<f64>]) -> Result<String> {
    let params = a.opts.params(eps)?;
    let t = Instant::now();
    let sk: Sketch = build_sketch(g, algo, &params, &a.opts.build_options(), a.seed)?;
    let build_ms = t.elapsed().as_secs_f64() * 1e3;
    let mut errs = Vec::with_capacity(queries.len());
    let t = Instant::now();
    for x in queries {
        let est = sk.query(x)?.estimate;
        errs.push((est, quadratic_form(g, x)?));
    }
    let query_us = t.elapsed().as_secs_f64() * 1e6 / queries.len().max(1) as f64;
    let mut rel: Vec<f64> = errs.iter().map(|&(e, x)| relative_error(e, x)).collect();
    rel.sort_by(f64::total_cmp);
    let mean = if rel.is_empty() { 0.0 } else { rel.iter().sum::<f64>() / rel.len() as f64 };
    let p95 = if rel.is_empty() {
        0.0
    } else {
        rel[((0.95 * rel.len() as f64).ceil() as usize).clamp(1, rel.len()) - 1]
    };
    let size = sk.size();
    Ok(format!(
        "{algo},{eps},{},{},{mean:.6},{p95:.6},{build_ms:.3},{query_us:.3}",
        size.records(),
        size.total_bits()
    ))
}

fn bench_cmd(a: &BenchArgs) -> Result<()> {
    let g = match &a.input {
        Some(p) => read_edge_list(p)?,
        None => generate(a.kind.parse::<GraphKind>()?, a.n, weights(a.weights), a.seed)?,
    };
    let queries = bench_query_vectors(g.n(), a.queries, a.seed);
    let algos: Vec<Algorithm> = match a.algo {
        Some(x) => vec![x.into()],
        None => vec![Algorithm::Basic, Algorithm::Improved],
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    writeln!(out, "algo,eps,records,bits,mean_rel_err,p95_rel_err,build_ms,query_us")?;
    for &eps in &a.sweep {
        for &algo in &algos {
            writeln!(out, "{}", bench_row(&g, algo, eps, a, &queries)?)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build(a) => build_cmd(&a),
        Command::Query {
            sketch,
            vector,
            exact_against,
            verbose,
        } => query_cmd(&sketch, &vector, exact_against.as_ref(), verbose),
        Command::Size { sketch } => size_cmd(&sketch),
        Command::Bench(a) => bench_cmd(&a),
        Command::Generate {
            kind,
            n,
            weights: w,
            seed,
            output,
        } => {
            let g = generate(kind.parse()?, n, weights(w), seed)?;
            write_edge_list(&g, &output)?;
            println!("wrote {} ({} vertices, {} edges)", output.display(), g.n(), g.edge_count());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lsketch: {e}");
            ExitCode::FAILURE
        }
    }
}
