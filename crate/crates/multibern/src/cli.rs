//! The `multibern` command line.
//!
//! Exit codes: `0` on success, `2` on usage errors (bad flags, unknown
//! function, malformed lists), `1` on domain or precondition failures and
//! when `lemma-check` exceeds its tolerance.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use multibern_core::finite_diff::lemma1_check;
use multibern_core::harness::{builtin_corpus, convergence_table, corpus_function, CORPUS_NAMES};
use multibern_core::stochastic::{mc_deriv, mc_eval};
use multibern_core::{
    BernsteinModel, DerivativeModel, DiffSpec, Domain, FunctionSpec, GridSpec, MultiIndex, RngSeed,
};

use crate::{model_io, report};

#[derive(Debug, Parser)]
#[command(name = "multibern", version, about = "Multivariate Bernstein polynomials: evaluation, derivatives and convergence studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the Bernstein polynomial of a corpus function at a point.
    Eval(PointArgs),
    /// Evaluate a mixed partial derivative of the Bernstein polynomial.
    Deriv(DerivArgs),
    /// Sup-grid errors along a list of degrees, with a fitted rate.
    Converge(ConvergeArgs),
    /// Monte Carlo estimate against the deterministic value.
    Mc(McArgs),
    /// Compare a mixed difference with the iterated integral of the partial.
    LemmaCheck(LemmaArgs),
    /// List the built-in test functions.
    Corpus(CorpusArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Cube,
    Simplex,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Comma-separated reals.
#[derive(Debug, Clone)]
struct Reals(Vec<f64>);

/// Comma-separated non-negative integers.
#[derive(Debug, Clone)]
struct Counts(Vec<usize>);

fn parse_reals(s: &str) -> Result<Reals, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("invalid number `{t}`"))
        })
        .collect::<Result<_, _>>()
        .map(Reals)
}

fn parse_counts(s: &str) -> Result<Counts, String> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<usize>()
                .map_err(|_| format!("invalid non-negative integer `{t}`"))
        })
        .collect::<Result<_, _>>()
        .map(Counts)
}

#[derive(Debug, Args)]
struct Target {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    dim: u64,
    /// Simplex axes of a mixed domain (the leading ones).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    d1: Option<u64>,
    #[arg(long)]
    function: String,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, value_parser = parse_reals)]
    point: Reals,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Reuse (or create) a model file at this path.
    #[arg(long)]
    model_cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DerivArgs {
    #[command(flatten)]
    at: PointArgs,
    #[arg(long, value_parser = parse_counts)]
    k: Counts,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_parser = parse_counts)]
    n_list: Counts,
    /// Derivative order; zero when omitted.
    #[arg(long, value_parser = parse_counts)]
    k: Option<Counts>,
    /// Grid points per axis.
    #[arg(long, default_value_t = GridSpec::DEFAULT_POINTS)]
    grid: usize,
    /// Margin kept from the domain boundary.
    #[arg(long, default_value_t = 0.0)]
    inset: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Debug, Args)]
struct McArgs {
    #[command(flatten)]
    target: Target,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    #[arg(long, value_parser = parse_reals)]
    point: Reals,
    /// Derivative order; plain evaluation when omitted.
    #[arg(long, value_parser = parse_counts)]
    k: Option<Counts>,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(2..))]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct LemmaArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    dim: u64,
    #[arg(long)]
    function: String,
    #[arg(long, value_parser = parse_reals)]
    point: Reals,
    #[arg(long, value_parser = parse_counts)]
    k: Counts,
    /// Steps per axis, or one step for every axis.
    #[arg(long, value_parser = parse_reals, default_value = "0.1")]
    z: Reals,
    /// Gauss-Legendre nodes per integration level.
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    quad_points: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    dim: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl From<multibern_core::Error> for Failure {
    fn from(e: multibern_core::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<crate::FormatError> for Failure {
    fn from(e: crate::FormatError) -> Self {
        Failure::Domain(e.to_string())
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut text = String::new();
    let result = execute(cli.command, &mut text);
    let _ = out.write_all(text.as_bytes());
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn execute(command: Command, out: &mut String) -> Result<i32, Failure> {
    match command {
        Command::Eval(a) => eval(a, out),
        Command::Deriv(a) => deriv(a, out),
        Command::Converge(a) => converge(a, out),
        Command::Mc(a) => mc(a, out),
        Command::LemmaCheck(a) => lemma(a, out),
        Command::Corpus(a) => corpus(a, out),
    }
}

fn domain_of(t: &Target) -> Result<Domain, Failure> {
    match (t.kind, t.d1) {
        (Kind::Cube, None) => Ok(Domain::Cube),
        (Kind::Simplex, None) => Ok(Domain::Simplex),
        (Kind::Mixed, Some(d1)) if d1 <= t.dim => Ok(Domain::Mixed { simplex_dims: d1 as usize }),
        (Kind::Mixed, Some(d1)) => Err(Failure::Usage(format!("--d1 {d1} exceeds --dim {}", t.dim))),
        (Kind::Mixed, None) => Err(Failure::Usage("--kind mixed needs --d1".into())),
        (_, Some(_)) => Err(Failure::Usage("--d1 only applies to --kind mixed".into())),
    }
}

fn function(name: &str, dim: u64) -> Result<FunctionSpec, Failure> {
    corpus_function(name, dim as usize).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown function `{name}`; available: {}",
            CORPUS_NAMES.join(", ")
        ))
    })
}

fn check_len(flag: &str, len: usize, dim: u64) -> Result<(), Failure> {
    if len as u64 != dim {
        return Err(Failure::Usage(format!("--{flag} has {len} entries but --dim is {dim}")));
    }
    Ok(())
}

fn order(k: &Counts, dim: u64) -> Result<MultiIndex, Failure> {
    check_len("k", k.0.len(), dim)?;
    Ok(MultiIndex::new(k.0.clone())?)
}

/// Builds the model, going through the cache file when one is given. A
/// cached model is used only when its recorded function and header match.
fn model_for(
    f: &FunctionSpec,
    domain: Domain,
    n: usize,
    cache: Option<&Path>,
) -> Result<BernsteinModel, Failure> {
    let tag = format!("function={}", f.name());
    if let Some(path) = cache {
        if let Ok(text) = std::fs::read_to_string(path) {
            if let Ok(file) = model_io::from_str(&text) {
                let m = &file.model;
                if file.comments.contains(&tag)
                    && m.domain() == domain
                    && m.degree() == n
                    && m.dim() == f.dim()
                {
                    return Ok(file.model);
                }
            }
        }
    }
    let model = BernsteinModel::build(f, domain, n, f.dim())?;
    if let Some(path) = cache {
        let file = std::fs::File::create(path).map_err(crate::FormatError::from)?;
        model_io::write(std::io::BufWriter::new(file), &model, &[tag])?;
    }
    Ok(model)
}

fn emit<T: Serialize>(value: &T, format: Format, out: &mut String) {
    match format {
        Format::Json => {
            out.push_str(&serde_json::to_string_pretty(value).expect("report serializes"));
            out.push('\n');
        }
        Format::Csv => {
            let v = serde_json::to_value(value).expect("report serializes");
            let map = v.as_object().expect("reports are objects");
            let cell = |v: &serde_json::Value| match v {
                serde_json::Value::Null => "NA".to_string(),
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(a) => a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "),
                other => other.to_string(),
            };
            out.push_str(&map.keys().cloned().collect::<Vec<_>>().join(","));
            out.push('\n');
            out.push_str(&map.values().map(cell).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
    }
}

#[derive(Serialize)]
struct ValueReport<'a> {
    command: &'static str,
    function: &'a str,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    d1: Option<usize>,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<&'a [usize]>,
    point: &'a [f64],
    value: f64,
}

fn d1_of(domain: Domain) -> Option<usize> {
    match domain {
        Domain::Mixed { simplex_dims } => Some(simplex_dims),
        _ => None,
    }
}

fn eval(a: PointArgs, out: &mut String) -> Result<i32, Failure> {
    let domain = domain_of(&a.target)?;
    let f = function(&a.target.function, a.target.dim)?;
    check_len("point", a.point.0.len(), a.target.dim)?;
    let p = domain.point(&a.point.0)?;
    let model = model_for(&f, domain, a.n as usize, a.model_cache.as_deref())?;
    let value = model.eval_point(&p);
    emit(
        &ValueReport {
            command: "eval",
            function: f.name(),
            kind: domain.name(),
            d1: d1_of(domain),
            n: a.n as usize,
            k: None,
            point: p.coords(),
            value,
        },
        a.format,
        out,
    );
    Ok(0)
}

fn deriv(a: DerivArgs, out: &mut String) -> Result<i32, Failure> {
    let at = &a.at;
    let domain = domain_of(&at.target)?;
    let f = function(&at.target.function, at.target.dim)?;
    check_len("point", at.point.0.len(), at.target.dim)?;
    let k = order(&a.k, at.target.dim)?;
    let p = domain.point(&at.point.0)?;
    let model = model_for(&f, domain, at.n as usize, at.model_cache.as_deref())?;
    let value = DerivativeModel::from_model(&model, &k)?.eval_point(&p);
    emit(
        &ValueReport {
            command: "deriv",
            function: f.name(),
            kind: domain.name(),
            d1: d1_of(domain),
            n: at.n as usize,
            k: Some(k.as_slice()),
            point: p.coords(),
            value,
        },
        at.format,
        out,
    );
    Ok(0)
}

fn converge(a: ConvergeArgs, out: &mut String) -> Result<i32, Failure> {
    let domain = domain_of(&a.target)?;
    let f = function(&a.target.function, a.target.dim)?;
    let k = match &a.k {
        Some(k) => order(k, a.target.dim)?,
        None => MultiIndex::zeros(a.target.dim as usize),
    };
    let grid = GridSpec::new(domain, a.grid, a.inset)?;
    let r = convergence_table(domain, &f, &k, &a.n_list.0, &grid)?;
    match a.format {
        Format::Csv => out.push_str(&report::to_csv(&r)),
        Format::Json => {
            out.push_str(&report::to_json(&r));
            out.push('\n');
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct McOut<'a> {
    command: &'static str,
    function: &'a str,
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    d1: Option<usize>,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<&'a [usize]>,
    point: &'a [f64],
    samples: usize,
    seed: u64,
    estimate: f64,
    std_error: f64,
    reference: f64,
    z_score: Option<f64>,
}

fn mc(a: McArgs, out: &mut String) -> Result<i32, Failure> {
    let domain = domain_of(&a.target)?;
    let f = function(&a.target.function, a.target.dim)?;
    check_len("point", a.point.0.len(), a.target.dim)?;
    let k = a.k.as_ref().map(|k| order(k, a.target.dim)).transpose()?;
    let p = domain.point(&a.point.0)?;
    let n = a.n as usize;
    let seed = RngSeed(a.seed);
    let samples = a.samples as usize;
    let model = BernsteinModel::build(&f, domain, n, f.dim())?;
    let (r, reference) = match &k {
        None => (
            mc_eval(domain, &f, n, p.coords(), samples, seed)?,
            model.eval_point(&p),
        ),
        Some(k) => (
            mc_deriv(domain, &f, k, n, p.coords(), samples, seed)?,
            DerivativeModel::from_model(&model, k)?.eval_point(&p),
        ),
    };
    let r = r.with_reference(reference);
    emit(
        &McOut {
            command: "mc",
            function: f.name(),
            kind: domain.name(),
            d1: d1_of(domain),
            n,
            k: k.as_ref().map(|k| k.as_slice()),
            point: p.coords(),
            samples: r.samples,
            seed: a.seed,
            estimate: r.estimate,
            std_error: r.std_error,
            reference,
            z_score: r.z_score().filter(|z| z.is_finite()),
        },
        a.format,
        out,
    );
    Ok(0)
}

#[derive(Serialize)]
struct LemmaOut<'a> {
    command: &'static str,
    function: &'a str,
    point: &'a [f64],
    k: &'a [usize],
    z: &'a [f64],
    quad_points: usize,
    lhs: f64,
    rhs: f64,
    abs_diff: f64,
    tol: f64,
    pass: bool,
}

fn lemma(a: LemmaArgs, out: &mut String) -> Result<i32, Failure> {
    let f = function(&a.function, a.dim)?;
    check_len("point", a.point.0.len(), a.dim)?;
    let k = order(&a.k, a.dim)?;
    let z = match a.z.0.as_slice() {
        [step] => vec![*step; a.dim as usize],
        steps => {
            check_len("z", steps.len(), a.dim)?;
            steps.to_vec()
        }
    };
    if a.tol.is_nan() || a.tol < 0.0 {
        return Err(Failure::Usage("--tol must be non-negative".into()));
    }
    let df = f.partial(&k)?;
    let spec = DiffSpec::new(k.clone(), z.clone())?;
    let (lhs, rhs) = lemma1_check(&f, &df, &a.point.0, &spec, a.quad_points as usize)?;
    let abs_diff = (lhs - rhs).abs();
    let pass = abs_diff <= a.tol;
    emit(
        &LemmaOut {
            command: "lemma-check",
            function: f.name(),
            point: &a.point.0,
            k: k.as_slice(),
            z: &z,
            quad_points: a.quad_points as usize,
            lhs,
            rhs,
            abs_diff,
            tol: a.tol,
            pass,
        },
        a.format,
        out,
    );
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct CorpusEntry {
    name: String,
    dim: usize,
    smoothness: usize,
}

fn corpus(a: CorpusArgs, out: &mut String) -> Result<i32, Failure> {
    let entries: Vec<CorpusEntry> = builtin_corpus(a.dim as usize)
        .iter()
        .map(|f| CorpusEntry {
            name: f.name().to_string(),
            dim: f.dim(),
            smoothness: f.smoothness(),
        })
        .collect();
    match a.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Listing {
                functions: Vec<CorpusEntry>,
            }
            out.push_str(&serde_json::to_string_pretty(&Listing { functions: entries }).unwrap());
            out.push('\n');
        }
        Format::Csv => {
            out.push_str("name,dim,smoothness\n");
            for e in entries {
                out.push_str(&format!("{},{},{}\n", e.name, e.dim, e.smoothness));
            }
        }
    }
    Ok(0)
}
