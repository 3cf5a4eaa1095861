//! The `mispace` command-line tool.
//!
//! Exit codes: 0 success (certified / preserving / ok), 1 not certified,
//! 2 usage, input or hypothesis error.

pub mod load;
pub mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::container::Encoding;
use crate::error::{Error, Result};
use crate::fiberization::{boxspline, fiberize_group, translate, FiniteAbelianGroup, Subgroup, TranslateSystem};
use crate::model::{self, io, scenarios, FiberField, OmegaGrid};
use crate::numerics::{ComplexMatrix, Tolerance};
use crate::reduction::{self, CertifyOptions, Distribution, ReductionMatrix};
use load::{load_matrix, load_model, sha256_hex, LoadedModel};
use report::{point_row, strip_per_point, Conventions, CsvTable, ModelInfo, ReportEnvelope, Timing, ToolInfo};

#[derive(Debug, Parser)]
#[command(name = "mispace", version, about = "Fiberwise analysis of MI spaces and certification of generator reductions")]
pub struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Relative rank cutoff (times the largest singular value).
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol_rank: f64,
    /// Absolute floor of the rank cutoff.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol_abs: f64,
    /// Fraction of grid points allowed to fail a pointwise test.
    #[arg(long, global = true, default_value_t = 0.0)]
    ae_fraction: f64,
    /// Worker threads for per-point work (0: one per core).
    #[arg(long, global = true, env = "MISPACE_THREADS")]
    threads: Option<usize>,
    /// Include per-point diagnostics in JSON reports.
    #[arg(long, global = true)]
    full: bool,
    /// Write the report here instead of stdout (for `demo`, the model file).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Generator,
    Frame,
    MoorePenrose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoName {
    Sincos,
    Orthonormal,
    Boxspline,
    #[value(name = "lca-z8")]
    LcaZ8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RefineName {
    Sincos,
    Orthonormal,
    Boxspline,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistributionArg {
    Gaussian,
    Uniform,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dimension profile, length and uniform frame bounds of a model.
    Analyze { model: PathBuf },
    /// Certify a reduction matrix against a model.
    Certify {
        model: PathBuf,
        matrix: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Generator)]
        mode: Mode,
    },
    /// Count random reductions that preserve the generated space.
    Sample {
        model: PathBuf,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = DistributionArg::Gaussian)]
        distribution: DistributionArg,
    },
    /// Write a built-in model (lca-z8 writes a translate-system file).
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        /// Grid points per axis.
        #[arg(long)]
        n: Option<usize>,
        /// Number of generators.
        #[arg(long)]
        m: Option<usize>,
        /// Real-line truncation.
        #[arg(long = "K")]
        k: Option<usize>,
        /// Subgroup generators of Z_8, comma separated.
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<usize>>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = EncodingArg::Csv)]
        encoding: EncodingArg,
    },
    /// Frame certificate of a fixed reduction on successively finer grids.
    Refine {
        #[arg(value_enum)]
        name: RefineName,
        #[arg(long, value_delimiter = ',', default_values_t = [4usize, 16, 64])]
        ns: Vec<usize>,
        /// Reduction matrix file; default `(1, 0)` for sincos, identity otherwise.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long = "K", default_value_t = 100)]
        k: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EncodingArg {
    Csv,
    Binary,
}

struct Outcome {
    model: Option<ModelInfo>,
    results: Value,
    csv: CsvTable,
    exit: u8,
    /// Written to stdout instead of a report (`demo` without `--out`).
    raw: Option<Vec<u8>>,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn options(g: &GlobalArgs) -> Result<CertifyOptions> {
    CertifyOptions { tol: Tolerance::new(g.tol_rank, g.tol_abs)?, ae_exception_fraction: g.ae_fraction }.validated()
}

fn execute(cli: &Cli) -> Result<u8> {
    let g = &cli.global;
    if let Some(t) = g.threads {
        // Fails only if a pool already exists (repeated calls in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let opts = options(g)?;
    let start = Instant::now();
    let (name, outcome) = match &cli.command {
        Command::Analyze { model } => ("analyze", analyze(model, &opts)?),
        Command::Certify { model, matrix, mode } => ("certify", certify(model, matrix, *mode, &opts)?),
        Command::Sample { model, l, trials, seed, distribution } => {
            let dist = match distribution {
                DistributionArg::Gaussian => Distribution::Gaussian,
                DistributionArg::Uniform => Distribution::Uniform,
            };
            ("sample", sample(model, *l, *trials, *seed, dist, &opts)?)
        }
        Command::Demo { name, n, m, k, h, seed, encoding } => {
            let enc = match encoding {
                EncodingArg::Csv => Encoding::Csv,
                EncodingArg::Binary => Encoding::Binary,
            };
            ("demo", demo(*name, *n, *m, *k, h.as_deref(), *seed, enc, g.out.as_deref())?)
        }
        Command::Refine { name, ns, matrix, m, k } => ("refine", refine(*name, ns, matrix.as_deref(), *m, *k, &opts)?),
    };
    if let Some(raw) = outcome.raw {
        std::io::stdout().write_all(&raw)?;
        return Ok(outcome.exit);
    }
    let mut results = outcome.results;
    if !g.full {
        strip_per_point(&mut results);
    }
    let envelope = ReportEnvelope {
        schema_version: report::REPORT_SCHEMA_VERSION,
        tool: ToolInfo::default(),
        command: name.into(),
        model: outcome.model,
        tolerances: (&opts).into(),
        conventions: Conventions::default(),
        results,
        timing: Timing { seconds: start.elapsed().as_secs_f64() },
    };
    let text = match g.format {
        Format::Json => serde_json::to_string_pretty(&envelope)? + "\n",
        Format::Csv => outcome.csv.render(),
    };
    // `demo --out` names the model file; its report always goes to stdout.
    match (&g.out, &cli.command) {
        (Some(path), cmd) if !matches!(cmd, Command::Demo { .. }) => std::fs::write(path, text)?,
        _ => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(outcome.exit)
}

fn model_info(path: Option<&Path>, loaded: &LoadedModel) -> ModelInfo {
    let f = &loaded.field;
    ModelInfo {
        path: path.map(|p| p.display().to_string()),
        format: loaded.format.clone(),
        digest: loaded.digest.clone(),
        name: f.metadata.name.clone(),
        grid_kind: f.grid().kind,
        points: f.grid().len(),
        fiber_dim: f.fiber_dim(),
        generators: f.generator_count(),
    }
}

fn coords(grid: &OmegaGrid, p: Option<usize>) -> Value {
    p.map_or(Value::Null, |p| json!(grid.coords[p]))
}

fn analyze(path: &Path, opts: &CertifyOptions) -> Result<Outcome> {
    let loaded = load_model(path)?;
    let field = &loaded.field;
    let g = model::gramian_field(field);
    let profile = model::dimension_profile(&g, &opts.tol);
    let spectra = g.spectra();
    let bounds = model::frame_bounds_from_spectra(&spectra, &opts.tol);
    let grid = field.grid();
    let mut csv = CsvTable::per_point(grid, &["rank"]);
    csv.header.extend((0..g.generator_count()).map(|i| format!("lambda_{i}")));
    let mut per_point = Vec::with_capacity(grid.len());
    for (p, (rank, eig)) in profile.ranks.iter().zip(&spectra).enumerate() {
        csv.push(point_row(grid, p, std::iter::once(rank.to_string()).chain(eig.iter().map(|e| e.to_string()))));
        per_point.push(json!({ "omega": grid.coords[p], "rank": rank, "eigenvalues": eig }));
    }
    let results = json!({
        "length": profile.length,
        "rank_histogram": profile.rank_histogram,
        "frame_bounds": bounds,
        "alpha_point_coords": coords(grid, bounds.alpha_point),
        "beta_point_coords": coords(grid, bounds.beta_point),
        "metadata": field.metadata,
        "per_point": per_point,
    });
    Ok(Outcome { model: Some(model_info(Some(path), &loaded)), results, csv, exit: 0, raw: None })
}

fn certify(model_path: &Path, matrix_path: &Path, mode: Mode, opts: &CertifyOptions) -> Result<Outcome> {
    let loaded = load_model(model_path)?;
    let a = load_matrix(matrix_path)?;
    let field = &loaded.field;
    let g = model::gramian_field(field);
    let grid = field.grid();
    let length = reduction::model_length(&g, &opts.tol);
    let info = Some(model_info(Some(model_path), &loaded));
    let matrix_info = json!({ "path": matrix_path.display().to_string(), "rows": a.rows(), "cols": a.cols() });
    let (results, csv, exit) = match mode {
        Mode::Generator => {
            let cert = reduction::is_generator_preserving(&g, &a, opts)?;
            let mut csv = CsvTable::per_point(grid, &["rank_g", "rank_reduced"]);
            for (p, (r, s)) in cert.per_point.iter().enumerate() {
                csv.push(point_row(grid, p, [r.to_string(), s.to_string()]));
            }
            let failing: Vec<&Vec<f64>> = cert.failing_points.iter().map(|&p| &grid.coords[p]).collect();
            let mut v = serde_json::to_value(&cert)?;
            v["failing_point_coords"] = json!(failing);
            (json!({ "mode": "generator", "model_length": length, "matrix": matrix_info, "certificate": v }), csv, u8::from(!cert.preserving))
        }
        Mode::Frame => match reduction::certify_frame_reduction(&g, &a, opts) {
            Ok(cert) => {
                let mut csv = CsvTable::per_point(grid, &["rank_g", "rank_reduced", "friedrichs_sine"]);
                for (p, ((r, s), f)) in cert.condition1.per_point.iter().zip(&cert.per_point_sine).enumerate() {
                    csv.push(point_row(grid, p, [r.to_string(), s.to_string(), f.to_string()]));
                }
                let ok = cert.certified && cert.sandwich_holds != Some(false);
                let mut v = serde_json::to_value(&cert)?;
                v["delta_point_coords"] = coords(grid, cert.delta_point);
                (json!({ "mode": "frame", "model_length": length, "matrix": matrix_info, "certificate": v }), csv, u8::from(!ok))
            }
            Err(Error::ZeroMatrix(norm)) => {
                let reason = Error::ZeroMatrix(norm).to_string();
                let v = json!({ "certified": false, "zero_matrix": true, "reason": reason, "norm": norm });
                let mut csv = CsvTable::new(vec!["certified".into(), "reason".into()]);
                csv.push(vec!["false".into(), "zero matrix".into()]);
                (json!({ "mode": "frame", "model_length": length, "matrix": matrix_info, "certificate": v }), csv, 1)
            }
            Err(e) => return Err(e),
        },
        Mode::MoorePenrose => {
            let r = reduction::moore_penrose_criterion(&g, &a, opts)?;
            let mut csv = CsvTable::per_point(grid, &["projected_norm"]);
            for (p, v) in r.per_point.iter().enumerate() {
                csv.push(point_row(grid, p, [v.to_string()]));
            }
            let mut v = serde_json::to_value(&r)?;
            v["sup_point_coords"] = coords(grid, r.sup_point);
            (json!({ "mode": "moore-penrose", "model_length": length, "matrix": matrix_info, "certificate": v }), csv, u8::from(!r.passes))
        }
    };
    Ok(Outcome { model: info, results, csv, exit, raw: None })
}

fn sample(path: &Path, l: usize, trials: usize, seed: u64, dist: Distribution, opts: &CertifyOptions) -> Result<Outcome> {
    let loaded = load_model(path)?;
    let g = model::gramian_field(&loaded.field);
    let r = reduction::sample_random_reductions(&g, l, trials, seed, dist, opts)?;
    let mut csv = CsvTable::new(["trials", "seed", "distribution", "l", "preserving_count"].map(String::from).to_vec());
    csv.push(vec![
        r.trials.to_string(),
        r.seed.to_string(),
        format!("{:?}", r.distribution).to_lowercase(),
        r.l.to_string(),
        r.preserving_count.to_string(),
    ]);
    let mut v = serde_json::to_value(&r)?;
    v["preserving_fraction"] = json!(r.preserving_fraction());
    v["model_length"] = json!(reduction::model_length(&g, &opts.tol));
    Ok(Outcome { model: Some(model_info(Some(path), &loaded)), results: v, csv, exit: 0, raw: None })
}

#[allow(clippy::too_many_arguments)]
fn demo(
    name: DemoName,
    n: Option<usize>,
    m: Option<usize>,
    k: Option<usize>,
    h: Option<&[usize]>,
    seed: u64,
    encoding: Encoding,
    out: Option<&Path>,
) -> Result<Outcome> {
    let (bytes, params, field) = match name {
        DemoName::Sincos => {
            let n = n.unwrap_or(64);
            let f = scenarios::sincos(n)?;
            (io::to_bytes(&f, encoding)?, json!({ "n": n }), f)
        }
        DemoName::Orthonormal => {
            let (n, m) = (n.unwrap_or(64), m.unwrap_or(3));
            let f = scenarios::orthonormal(m, n)?;
            (io::to_bytes(&f, encoding)?, json!({ "n": n, "m": m }), f)
        }
        DemoName::Boxspline => {
            let (n, k) = (n.unwrap_or(128), k.unwrap_or(100));
            let f = boxspline(n, k)?;
            (io::to_bytes(&f, encoding)?, json!({ "n": n, "K": k, "tail_bound": crate::fiberization::box_tail_bound(k) }), f)
        }
        DemoName::LcaZ8 => {
            let group = FiniteAbelianGroup::cyclic(8)?;
            let gens = h.unwrap_or(&[0, 4]).iter().map(|&x| vec![x]).collect();
            let sub = Subgroup::generated(&group, gens)?;
            let m = m.unwrap_or(2);
            let ts = TranslateSystem::random(sub.clone(), m, seed);
            let f = fiberize_group(&ts)?;
            (translate::to_bytes(&ts, encoding)?, json!({ "h": sub.elements(), "m": m, "seed": seed }), f)
        }
    };
    let format = if name == DemoName::LcaZ8 { translate::TRANSLATE_FORMAT } else { io::MODEL_FORMAT };
    let loaded = LoadedModel { field, format: format.into(), digest: format!("sha256:{}", sha256_hex(&bytes)) };
    let Some(out) = out else {
        return Ok(Outcome { model: None, results: Value::Null, csv: CsvTable::default(), exit: 0, raw: Some(bytes) });
    };
    std::fs::write(out, &bytes)?;
    let name_str = name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let mut csv = CsvTable::new(vec!["name".into(), "path".into(), "digest".into()]);
    csv.push(vec![name_str.clone(), out.display().to_string(), loaded.digest.clone()]);
    let results = json!({ "name": name_str, "params": params });
    Ok(Outcome { model: Some(model_info(Some(out), &loaded)), results, csv, exit: 0, raw: None })
}

fn refine(name: RefineName, ns: &[usize], matrix: Option<&Path>, m: usize, k: usize, opts: &CertifyOptions) -> Result<Outcome> {
    let build = |n: usize| -> Result<FiberField> {
        match name {
            RefineName::Sincos => scenarios::sincos(n),
            RefineName::Orthonormal => scenarios::orthonormal(m, n),
            RefineName::Boxspline => boxspline(n, k),
        }
    };
    let a = match matrix {
        Some(p) => load_matrix(p)?,
        None => match name {
            RefineName::Sincos => ReductionMatrix::new(ComplexMatrix::new(1, 2, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])?),
            RefineName::Orthonormal => ReductionMatrix::new(ComplexMatrix::identity(m)),
            RefineName::Boxspline => ReductionMatrix::new(ComplexMatrix::identity(1)),
        },
    };
    let study = reduction::refinement_study(ns, build, &a, opts)?;
    let mut csv = CsvTable::new(["grid_n", "points", "delta", "certified", "moore_penrose_sup"].map(String::from).to_vec());
    for e in &study.entries {
        csv.push(vec![
            e.grid_n.to_string(),
            e.points.to_string(),
            e.delta.to_string(),
            e.certified.to_string(),
            e.moore_penrose_sup.map(|v| v.to_string()).unwrap_or_default(),
        ]);
    }
    let name_str = name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let results = json!({ "name": name_str, "matrix": a, "study": study });
    Ok(Outcome { model: None, results, csv, exit: 0, raw: None })
}

