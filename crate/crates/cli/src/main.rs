//! `bsbl` command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage or configuration errors, 2 on runtime failures.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bsbl::bench::{emit_report, render, run_experiment, selftest, ExperimentConfig, ReportFormat};
use bsbl::classifier::{build_dictionary, classify, classify_robust};
use bsbl::data_io::{load_directory, read_csv_matrix, read_image, save_dataset, synth_dataset, ImageFormat, SynthSpec};
use bsbl::features::{downsample, ImageMatrix};
use bsbl::solver::{BlockPartition, SensingProblem, SolverKind, SolverOptions};
use bsbl::Error;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use nalgebra::DVector;

#[derive(Parser)]
#[command(name = "bsbl", version, about = "Block-sparse recovery and sparse-representation face recognition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment grid from a TOML config and emit the report.
    Bench(BenchArgs),
    /// Recover a block-sparse vector from a sensing matrix and measurements stored as CSV.
    Recover(RecoverArgs),
    /// Classify one image against a directory of labelled training images.
    Classify(ClassifyArgs),
    /// Write a synthetic face-like dataset to a directory.
    Synth(SynthArgs),
    /// Check the solvers against the brute-force oracle on planted instances.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct BenchArgs {
    config: PathBuf,
    /// Override the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Report file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json or markdown. Defaults to the extension of --out, else csv.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RecoverArgs {
    /// m x n sensing matrix.
    #[arg(long)]
    phi: PathBuf,
    /// Measurements, one value per row (or a single row).
    #[arg(long)]
    y: PathBuf,
    /// Comma-separated block sizes, e.g. "4,4,4,4".
    #[arg(long, conflicts_with = "block_size")]
    blocks: Option<String>,
    /// Uniform block size.
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long, default_value = "bsbl")]
    solver: String,
    /// Residual bound for the l1 baselines.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// Write the estimate as a one-column CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Training images, one subdirectory per class.
    #[arg(long)]
    dict: PathBuf,
    image: PathBuf,
    #[arg(long, default_value = "bsbl")]
    solver: String,
    /// Solve on [Phi, I] and subtract the estimated outliers.
    #[arg(long)]
    robust: bool,
    /// Downsample images to HxW before classification.
    #[arg(long)]
    downsample: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// text or json.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// pgm or csv.
    #[arg(long, default_value = "pgm")]
    format: String,
    #[arg(long, default_value_t = 5)]
    classes: usize,
    #[arg(long, default_value_t = 10)]
    per_class: usize,
    #[arg(long, default_value_t = 32)]
    height: usize,
    #[arg(long, default_value_t = 28)]
    width: usize,
    #[arg(long, default_value_t = 3)]
    subspace_dim: usize,
    #[arg(long, default_value_t = 4.0)]
    noise: f64,
}

#[derive(Args)]
struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Recover(a) => recover(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Synth(a) => synth(a),
        Command::Selftest(a) => selftest_cmd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_solver(name: &str) -> Result<SolverKind, Failure> {
    name.parse().map_err(|e: Error| usage(e.to_string()))
}

fn report_format(format: Option<&str>, out: Option<&Path>) -> Result<ReportFormat, Failure> {
    let name = match (format, out.and_then(|p| p.extension()).and_then(|e| e.to_str())) {
        (Some(f), _) => f.to_string(),
        (None, Some("md")) => "markdown".into(),
        (None, Some(ext @ ("csv" | "json" | "markdown"))) => ext.into(),
        _ => "csv".into(),
    };
    name.parse().map_err(|e: Error| usage(e.to_string()))
}

fn bench(a: BenchArgs) -> CliResult {
    let format = report_format(a.format.as_deref(), a.out.as_deref())?;
    let mut config = ExperimentConfig::from_file(&a.config).map_err(|e| usage(e.to_string()))?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(threads) = a.threads {
        if threads == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        config.threads = Some(threads);
    }
    config.validate().map_err(|e| usage(e.to_string()))?;
    let report = run_experiment(&config)?;
    let failed = report.rows.iter().filter(|r| r.error.is_some()).count();
    match &a.out {
        Some(path) => emit_report(&report, format, path)?,
        None => print!("{}", render(&report, format)),
    }
    eprintln!("{} cells, {failed} failed", report.rows.len());
    Ok(())
}

fn vector_from_csv(path: &Path) -> Result<DVector<f64>, Failure> {
    let m = read_csv_matrix(path)?;
    if m.ncols() != 1 && m.nrows() != 1 {
        return Err(usage(format!("{}: expected a single row or column, got {}x{}", path.display(), m.nrows(), m.ncols())));
    }
    Ok(DVector::from_iterator(m.len(), m.iter().copied()))
}

fn partition_arg(blocks: Option<&str>, block_size: Option<usize>, n: usize) -> Result<BlockPartition, Failure> {
    let sizes = match (blocks, block_size) {
        (Some(list), _) => list
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| usage(format!("bad block size '{s}'"))))
            .collect::<Result<Vec<_>, _>>()?,
        (None, Some(size)) if size > 0 && n.is_multiple_of(size) => vec![size; n / size],
        (None, Some(size)) => return Err(usage(format!("block size {size} does not divide n = {n}"))),
        (None, None) => return Err(usage("one of --blocks or --block-size is required")),
    };
    let partition = BlockPartition::new(sizes).map_err(|e| usage(e.to_string()))?;
    if partition.total() != n {
        return Err(usage(format!("block sizes sum to {}, matrix has {n} columns", partition.total())));
    }
    Ok(partition)
}

fn format_list(values: impl IntoIterator<Item = String>) -> String {
    values.into_iter().collect::<Vec<_>>().join(", ")
}

fn recover(a: RecoverArgs) -> CliResult {
    let solver = parse_solver(&a.solver)?;
    if a.format != "text" && a.format != "json" {
        return Err(usage(format!("unknown format '{}'", a.format)));
    }
    let phi = read_csv_matrix(&a.phi)?;
    let y = vector_from_csv(&a.y)?;
    let partition = partition_arg(a.blocks.as_deref(), a.block_size, phi.ncols())?;
    let problem = SensingProblem::new(phi, y, partition).map_err(|e| usage(e.to_string()))?;
    let mut opts = SolverOptions::default();
    if let Some(eps) = a.epsilon {
        opts.epsilon = eps;
    }
    if let Some(iters) = a.max_iters {
        opts.max_iters = iters;
    }
    let result = solver.solve(&problem, &opts)?;
    let support = result.support(problem.partition());
    if a.format == "json" {
        let value = serde_json::json!({
            "solver": solver.name(),
            "iterations": result.iterations,
            "converged": result.converged,
            "final_cost": result.final_cost,
            "support": support,
            "gamma": result.gamma,
            "x_hat": result.x_hat.as_slice(),
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("json values serialize"));
    } else {
        println!("solver: {}", solver.name());
        println!("iterations: {}", result.iterations);
        println!("converged: {}", result.converged);
        println!("final_cost: {:.6e}", result.final_cost);
        println!("support: {{{}}}", format_list(support.iter().map(|b| b.to_string())));
        println!("gamma: [{}]", format_list(result.gamma.iter().map(|g| format!("{g:.4e}"))));
        println!("x_hat: [{}]", format_list(result.x_hat.iter().map(|v| format!("{v:.6}"))));
    }
    if let Some(out) = &a.out {
        let column = nalgebra::DMatrix::from_column_slice(result.x_hat.len(), 1, result.x_hat.as_slice());
        bsbl::data_io::write_csv_matrix(out, &column)?;
    }
    Ok(())
}

fn parse_dims(text: &str) -> Result<(usize, usize), Failure> {
    let bad = || usage(format!("expected HxW, got '{text}'"));
    let (h, w) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((h.trim().parse().map_err(|_| bad())?, w.trim().parse().map_err(|_| bad())?))
}

fn classify_cmd(a: ClassifyArgs) -> CliResult {
    let solver = parse_solver(&a.solver)?;
    if a.format != "text" && a.format != "json" {
        return Err(usage(format!("unknown format '{}'", a.format)));
    }
    let dims = a.downsample.as_deref().map(parse_dims).transpose()?;
    let data = load_directory(&a.dict)?;
    let test = read_image(&a.image)?;
    if test.dims() != data.dims() {
        return Err(Failure::Runtime(Error::Dimension(format!(
            "test image is {:?}, training images are {:?}",
            test.dims(),
            data.dims()
        ))));
    }
    let feature = |img: &ImageMatrix| -> Result<DVector<f64>, Error> {
        match dims {
            Some((h, w)) => downsample(img, h, w),
            None => Ok(img.as_vector()),
        }
    };
    let train = data
        .images()
        .iter()
        .zip(data.labels())
        .map(|(img, &l)| feature(img).map(|f| (f, l)))
        .collect::<Result<Vec<_>, _>>()?;
    let dict = build_dictionary(&train)?;
    let y = feature(&test)?;
    let mut opts = SolverOptions::default();
    if solver != SolverKind::Bsbl {
        opts.epsilon = a.epsilon.unwrap_or(bsbl::bench::DEFAULT_EPSILON);
    }
    let result = if a.robust {
        classify_robust(&dict, &y, solver, &opts)?
    } else {
        classify(&dict, &y, solver, &opts)?
    };
    let names = data.class_names();
    let predicted = &names[result.predicted_class];
    if a.format == "json" {
        let residuals: serde_json::Map<String, serde_json::Value> = dict
            .class_ids()
            .iter()
            .zip(&result.residuals)
            .map(|(&c, &r)| (names[c].clone(), serde_json::json!(r)))
            .collect();
        let value = serde_json::json!({
            "predicted": predicted,
            "solver": result.solver_name,
            "robust": a.robust,
            "residuals": residuals,
        });
        println!("{}", serde_json::to_string_pretty(&value).expect("json values serialize"));
    } else {
        println!("predicted: {predicted}");
        for (&c, r) in dict.class_ids().iter().zip(&result.residuals) {
            println!("residual {}: {r:.6}", names[c]);
        }
    }
    Ok(())
}

fn synth(a: SynthArgs) -> CliResult {
    let format = match a.format.as_str() {
        "pgm" => ImageFormat::Pgm,
        "csv" => ImageFormat::Csv,
        other => return Err(usage(format!("unknown image format '{other}'"))),
    };
    let spec = SynthSpec {
        classes: a.classes,
        per_class: a.per_class,
        height: a.height,
        width: a.width,
        subspace_dim: a.subspace_dim,
        noise_sigma: a.noise,
        seed: a.seed,
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    let data = synth_dataset(&spec)?;
    save_dataset(&data, &a.out, format)?;
    eprintln!("wrote {} images in {} classes to {}", data.len(), data.num_classes(), a.out.display());
    Ok(())
}

fn selftest_cmd(a: SelftestArgs) -> CliResult {
    let report = selftest(a.seed)?;
    println!("instances: {}", report.instances);
    println!("bsbl matches oracle: {}/{}", report.bsbl_matches, report.instances);
    println!("block_l1 matches oracle: {}/{}", report.block_l1_matches, report.instances);
    if report.passed() {
        println!("selftest passed");
        Ok(())
    } else {
        println!("selftest FAILED");
        Err(Failure::Runtime(Error::Numeric("solver disagrees with the oracle too often".into())))
    }
}
