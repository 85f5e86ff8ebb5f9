//! `hgsp` command-line front end. Metrics go to stdout as `key=value` lines;
//! results are written with `--output` in the library's text formats.

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hgsp::apps::classify::{lp_hgsp_classify, lp_hgsp_train, TrainOptions};
use hgsp::apps::cluster::{spectral_cluster, ClusterOptions};
use hgsp::apps::compression::{compress, decompress, CompressionMode};
use hgsp::apps::denoising::{default_gamma_grid, denoise_sweep, GammaSelection};
use hgsp::filters::{apply_matrix_poly, apply_tensor_poly};
use hgsp::hypergraph::{build_knn_hypergraph, Metric};
use hgsp::sampling::{build_plan, interpolate, sample};
use hgsp::spectrum::{bandlimit_boundary, bandwidth, hgft, ihgft, total_variation_component, total_variation_signal};
use hgsp::{adjacency_tensor, decompose, io, DecomposeOptions, HgspError, PolySpec, Signal, Spectrum};
use nalgebra::DMatrix;

#[derive(Parser)]
#[command(name = "hgsp", version, about = "Hypergraph signal processing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a hypergraph's adjacency tensor and write its spectrum.
    Spectrum(SpectrumArgs),
    /// Hypergraph Fourier transform of a signal.
    Transform(SignalArgs),
    /// Inverse hypergraph Fourier transform.
    Inverse(SignalArgs),
    /// Total variation of a basis vector or of a signal.
    Tv(TvArgs),
    /// Bandwidth of a signal.
    Bandwidth(BandwidthArgs),
    /// Choose sampling nodes for bandlimited signals.
    Sample(SampleArgs),
    /// Recover a signal from its samples.
    Reconstruct(ReconstructArgs),
    /// Apply a polynomial filter.
    Filter(FilterArgs),
    /// Denoise a signal over a grid of regularization strengths.
    Denoise(DenoiseArgs),
    /// Spectral clustering of the nodes.
    Cluster(ClusterArgs),
    /// Semi-supervised +1/-1 classification.
    Classify(ClassifyArgs),
    /// Keep the leading spectral coefficients of a signal.
    Compress(CompressArgs),
    /// Rebuild a signal from a compressed file.
    Decompress(DecompressArgs),
    /// Build a k-nearest-neighbour hypergraph from a feature CSV.
    BuildHypergraph(BuildArgs),
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long)]
    hypergraph: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
}

#[derive(Args)]
struct SignalArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TvArgs {
    #[arg(long)]
    spectrum: PathBuf,
    /// 1-based basis index.
    #[arg(long, conflicts_with = "signal")]
    component: Option<usize>,
    #[arg(long, requires = "hypergraph")]
    signal: Option<PathBuf>,
    #[arg(long)]
    hypergraph: Option<PathBuf>,
}

#[derive(Args)]
struct BandwidthArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    spectrum: PathBuf,
    /// Bandwidth K.
    #[arg(long)]
    k: usize,
    /// Number of samples Q; defaults to K.
    #[arg(long)]
    q: Option<usize>,
    /// Where to write the sampling plan.
    #[arg(long)]
    plan: PathBuf,
    /// Signal to sample; its samples go to `--output`.
    #[arg(long, requires = "output")]
    signal: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    /// Sampled values, one per sampled node.
    #[arg(long)]
    signal: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long)]
    spectrum: Option<PathBuf>,
    /// Required for `--form tensor`.
    #[arg(long)]
    hypergraph: Option<PathBuf>,
    #[arg(long)]
    signal: PathBuf,
    /// Comma-separated; `beta_0,beta_1,..` for matrix form, `alpha_1,..` for
    /// tensor form.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    coeffs: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Form::Matrix)]
    form: Form,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Form {
    Matrix,
    Tensor,
}

#[derive(Args)]
struct DenoiseArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    /// Single strength; overrides the grid.
    #[arg(long)]
    gamma: Option<f64>,
    /// log10 of the smallest non-zero grid value.
    #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
    gamma_lo: f64,
    #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
    gamma_hi: f64,
    #[arg(long, default_value_t = 25)]
    gamma_steps: usize,
    /// Clean signal; selects by squared error instead of cross-validation.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// CSV of `gamma,score` for every grid value.
    #[arg(long)]
    curve: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    /// Leading non-zero components to embed; defaults to all.
    #[arg(long)]
    embedding_dim: Option<usize>,
    /// Cluster ids (1-based), one per line.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    spectrum: PathBuf,
    /// `1`, `-1`, or `0` for unlabeled, one per node.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, default_value_t = 15)]
    degree: usize,
    #[arg(long, default_value_t = 1e-3)]
    ridge: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompressArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    signal: PathBuf,
    /// Keep every coefficient up to the bandwidth (the default).
    #[arg(long, conflicts_with = "epsilon")]
    lossless: bool,
    /// Allowed fraction of discarded energy.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DecompressArgs {
    #[arg(long)]
    spectrum: PathBuf,
    #[arg(long)]
    compressed: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    /// CSV with a header row; the first column is the node id.
    #[arg(long)]
    features: PathBuf,
    /// Hyperedge size.
    #[arg(long)]
    m: usize,
    /// Column holding class labels, excluded from the features.
    #[arg(long)]
    label_column: Option<String>,
    #[arg(long)]
    output: PathBuf,
    /// Where to write the label column as +1/-1.
    #[arg(long, requires = "label_column")]
    labels_output: Option<PathBuf>,
}

/// A failed run: exit 1 for bad input, 2 for numerical breakdown.
struct Failure {
    numerical: bool,
    message: String,
}

impl Failure {
    fn input(message: impl Display) -> Self {
        Self {
            numerical: false,
            message: message.to_string(),
        }
    }
}

impl From<HgspError> for Failure {
    fn from(e: HgspError) -> Self {
        Self {
            numerical: e.is_numerical(),
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Tags a library error with the input it came from.
fn ctx<T>(what: &str, path: &Path, r: hgsp::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| Failure {
        numerical: e.is_numerical(),
        message: format!("{what} {}: {e}", path.display()),
    })
}

fn read<T>(flag: &str, path: &Path, parse: impl FnOnce(&str) -> hgsp::Result<T>) -> Result<T, Failure> {
    let text = ctx(flag, path, io::read_text(path))?;
    ctx(flag, path, parse(&text))
}

fn load_spectrum(path: &Path) -> Result<Spectrum, Failure> {
    read("--spectrum", path, io::parse_spectrum)
}

fn load_signal(path: &Path) -> Result<Signal, Failure> {
    read("--signal", path, io::parse_signal)
}

fn load_hypergraph(path: &Path) -> Result<hgsp::Hypergraph, Failure> {
    read("--hypergraph", path, io::parse_hypergraph)
}

fn check_len(flag: &str, path: &Path, expected: usize, got: usize) -> Outcome {
    if expected == got {
        Ok(())
    } else {
        Err(Failure::input(format!(
            "{flag} {}: has {got} values, expected {expected}",
            path.display()
        )))
    }
}

/// Writes to `path`, or to stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => Ok(io::write_text(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Spectrum(a) => {
            let h = load_hypergraph(&a.hypergraph)?;
            let opts = DecomposeOptions {
                tol: a.tol,
                seed: a.seed,
                restarts: a.restarts,
                max_iter: a.max_iter,
                ..DecomposeOptions::default()
            };
            let sp = decompose(&adjacency_tensor(&h), &opts)?;
            io::write_text(&a.output, &io::format_spectrum(&sp))?;
            println!("order={}", sp.order());
            println!("dim={}", sp.dim());
            println!("rank={}", sp.rank());
            println!("lambda_max={}", sp.lambda_max());
            println!("residual={}", sp.residual());
            println!("id={}", sp.id());
        }
        Command::Transform(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let s = load_signal(&a.signal)?;
            check_len("--signal", &a.signal, sp.dim(), s.len())?;
            emit(a.output.as_deref(), &io::format_signal(&hgft(&sp, &s)?))?;
        }
        Command::Inverse(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let s = load_signal(&a.signal)?;
            check_len("--signal", &a.signal, sp.dim(), s.len())?;
            let back = ctx("--signal", &a.signal, ihgft(&sp, &s))?;
            emit(a.output.as_deref(), &io::format_signal(&back))?;
        }
        Command::Tv(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let tv = match (a.component, a.signal, a.hypergraph) {
                (Some(r), _, _) => {
                    if r == 0 || r > sp.dim() {
                        return Err(Failure::input(format!(
                            "--component {r}: out of range 1..={}",
                            sp.dim()
                        )));
                    }
                    total_variation_component(&sp, r - 1)?
                }
                (None, Some(sig), Some(hg)) => {
                    let s = load_signal(&sig)?;
                    let h = load_hypergraph(&hg)?;
                    check_len("--signal", &sig, sp.dim(), s.len())?;
                    check_len("--hypergraph", &hg, sp.dim(), h.num_nodes())?;
                    total_variation_signal(&adjacency_tensor(&h), sp.lambda_max(), &s)?
                }
                _ => {
                    return Err(Failure::input(
                        "tv needs --component, or --signal with --hypergraph",
                    ))
                }
            };
            println!("tv={tv}");
        }
        Command::Bandwidth(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let s = load_signal(&a.signal)?;
            check_len("--signal", &a.signal, sp.dim(), s.len())?;
            let k = bandwidth(&sp, &s, a.tol)?;
            println!("bandwidth={k}");
            if k > 0 {
                println!("boundary={}", bandlimit_boundary(&sp, k)?);
            }
        }
        Command::Sample(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let plan = build_plan(&sp, a.k, a.q.unwrap_or(a.k))?;
            io::write_text(&a.plan, &io::format_plan(&plan))?;
            let idx: Vec<String> = plan.indices().iter().map(|i| (i + 1).to_string()).collect();
            println!("k={}", plan.bandwidth());
            println!("q={}", plan.num_samples());
            println!("indices={}", idx.join(","));
            if let Some(sig) = a.signal {
                let s = load_signal(&sig)?;
                check_len("--signal", &sig, sp.dim(), s.len())?;
                emit(a.output.as_deref(), &io::format_signal(&sample(&plan, &s)?))?;
            }
        }
        Command::Reconstruct(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let plan = read("--plan", &a.plan, |t| io::parse_plan(t, &sp))?;
            let sq = load_signal(&a.signal)?;
            check_len("--signal", &a.signal, plan.num_samples(), sq.len())?;
            emit(a.output.as_deref(), &io::format_signal(&interpolate(&plan, &sq)?))?;
        }
        Command::Filter(a) => {
            let s = load_signal(&a.signal)?;
            let out = match a.form {
                Form::Matrix => {
                    let path = a
                        .spectrum
                        .ok_or_else(|| Failure::input("--form matrix needs --spectrum"))?;
                    let sp = load_spectrum(&path)?;
                    check_len("--signal", &a.signal, sp.dim(), s.len())?;
                    apply_matrix_poly(&sp, &PolySpec::matrix(a.coeffs)?, &s)?
                }
                Form::Tensor => {
                    let path = a
                        .hypergraph
                        .ok_or_else(|| Failure::input("--form tensor needs --hypergraph"))?;
                    let h = load_hypergraph(&path)?;
                    check_len("--signal", &a.signal, h.num_nodes(), s.len())?;
                    apply_tensor_poly(&adjacency_tensor(&h), &PolySpec::tensor(a.coeffs)?, &s)?
                }
            };
            emit(a.output.as_deref(), &io::format_signal(&out))?;
        }
        Command::Denoise(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let y = load_signal(&a.signal)?;
            check_len("--signal", &a.signal, sp.dim(), y.len())?;
            let grid = match a.gamma {
                Some(g) => vec![g],
                None => default_gamma_grid(a.gamma_lo, a.gamma_hi, a.gamma_steps),
            };
            let select = match &a.reference {
                Some(p) => {
                    let r = read("--reference", p, io::parse_signal)?;
                    check_len("--reference", p, sp.dim(), r.len())?;
                    GammaSelection::Reference(r)
                }
                None => GammaSelection::Gcv,
            };
            let report = denoise_sweep(&sp, &y, &grid, &select)?;
            if let Some(p) = &a.curve {
                write_curve(p, &report.curve)?;
            }
            emit(a.output.as_deref(), &io::format_signal(&report.signal))?;
            if a.output.is_some() {
                println!("gamma={}", report.gamma);
            }
        }
        Command::Cluster(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let opts = ClusterOptions {
                seed: a.seed,
                restarts: a.restarts,
                embedding_dim: a.embedding_dim,
            };
            let res = spectral_cluster(&sp, a.k, &opts)?;
            let ids: String = res.assignments.iter().map(|c| format!("{}\n", c + 1)).collect();
            if let Some(p) = &a.output {
                io::write_text(p, &ids)?;
            }
            println!("embedding_dim={}", res.embedding_dim);
            println!("intra_variance={}", res.intra_variance);
            println!("silhouette={}", res.silhouette);
        }
        Command::Classify(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let labels = read("--labels", &a.labels, io::parse_labels)?;
            check_len("--labels", &a.labels, sp.dim(), labels.len())?;
            let opts = TrainOptions {
                degree: a.degree,
                ridge: a.ridge,
            };
            let model = ctx("--labels", &a.labels, lp_hgsp_train(&sp, &labels, &opts))?;
            let pred = lp_hgsp_classify(&model, &sp, &labels)?;
            if let Some(p) = &a.output {
                io::write_text(p, &io::format_labels(&pred))?;
            }
            let fit = (0..labels.len())
                .filter(|&i| labels[i] != 0)
                .filter(|&i| pred[i] == labels[i])
                .count();
            println!("labeled={}", labels.iter().filter(|&&l| l != 0).count());
            println!("training_fit={fit}");
            println!("positive={}", pred.iter().filter(|&&l| l == 1).count());
            println!("negative={}", pred.iter().filter(|&&l| l == -1).count());
        }
        Command::Compress(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let s = load_signal(&a.signal)?;
            check_len("--signal", &a.signal, sp.dim(), s.len())?;
            let mode = match a.epsilon {
                Some(epsilon) => CompressionMode::Energy { epsilon },
                None => CompressionMode::Lossless { tol: a.tol },
            };
            let c = compress(&sp, &s, mode)?;
            if let Some(p) = &a.output {
                io::write_text(p, &io::format_compressed(&c))?;
            }
            println!("k={}", c.bandwidth());
            println!("n={}", c.dim);
            println!("cr={}", c.compression_ratio());
            println!("lossless={}", c.lossless);
            println!("mse={}", c.mse);
        }
        Command::Decompress(a) => {
            let sp = load_spectrum(&a.spectrum)?;
            let c = read("--compressed", &a.compressed, io::parse_compressed)?;
            let s = ctx("--compressed", &a.compressed, decompress(&c, &sp))?;
            emit(a.output.as_deref(), &io::format_signal(&s))?;
        }
        Command::BuildHypergraph(a) => {
            let (features, labels) = read_features(&a.features, a.label_column.as_deref())?;
            let h = ctx("--features", &a.features, build_knn_hypergraph(&features, a.m, Metric::Euclidean))?;
            io::write_text(&a.output, &io::format_hypergraph(&h))?;
            if let (Some(p), Some(raw)) = (&a.labels_output, labels) {
                let signs = binary_labels(&raw).map_err(|e| Failure::input(format!("--features {}: {e}", a.features.display())))?;
                io::write_text(p, &io::format_labels(&signs))?;
            }
            println!("nodes={}", h.num_nodes());
            println!("hyperedges={}", h.edges().len());
        }
    }
    Ok(())
}

fn write_curve(path: &Path, curve: &[(f64, f64)]) -> Outcome {
    let fail = |e: csv::Error| Failure::input(format!("--curve {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(["gamma", "score"]).map_err(fail)?;
    for (g, s) in curve {
        w.write_record([g.to_string(), s.to_string()]).map_err(fail)?;
    }
    w.flush().map_err(|e| Failure::input(format!("--curve {}: {e}", path.display())))
}

/// Feature matrix (rows in file order) and the optional raw label column.
fn read_features(path: &Path, label_column: Option<&str>) -> Result<(DMatrix<f64>, Option<Vec<String>>), Failure> {
    let fail = |m: String| Failure::input(format!("--features {}: {m}", path.display()));
    let mut rdr = csv::Reader::from_path(path).map_err(|e| fail(e.to_string()))?;
    let headers = rdr.headers().map_err(|e| fail(e.to_string()))?.clone();
    let label_idx = match label_column {
        Some(name) => Some(
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| fail(format!("no column named {name:?}")))?,
        ),
        None => None,
    };
    if label_idx == Some(0) {
        return Err(fail("the label column cannot be the id column".into()));
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| fail(e.to_string()))?;
        let line = i + 2;
        let mut row = Vec::new();
        for (j, field) in rec.iter().enumerate().skip(1) {
            if Some(j) == label_idx {
                labels.push(field.trim().to_string());
                continue;
            }
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| fail(format!("line {line}, column {:?}: cannot parse {field:?}", &headers[j])))?;
            if !v.is_finite() {
                return Err(fail(format!("line {line}, column {:?}: value is not finite", &headers[j])));
            }
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(fail("no feature values".into()));
    }
    let d = rows[0].len();
    let m = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    Ok((m, label_idx.map(|_| labels)))
}

/// `-1/0/1` columns pass through; any other two-valued column maps its
/// first value to `1` and the other to `-1`.
fn binary_labels(raw: &[String]) -> Result<Vec<i8>, String> {
    let numeric: Option<Vec<i8>> = raw
        .iter()
        .map(|s| match s.as_str() {
            "1" | "+1" => Some(1),
            "-1" => Some(-1),
            "0" => Some(0),
            _ => None,
        })
        .collect();
    if let Some(v) = numeric {
        return Ok(v);
    }
    let mut classes: Vec<&str> = Vec::new();
    for s in raw {
        if !classes.contains(&s.as_str()) {
            classes.push(s);
        }
    }
    if classes.len() != 2 {
        return Err(format!(
            "label column has {} classes; +1/-1 output needs exactly 2",
            classes.len()
        ));
    }
    Ok(raw.iter().map(|s| if s == classes[0] { 1 } else { -1 }).collect())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("{first}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(if f.numerical { 2 } else { 1 })
        }
    }
}
