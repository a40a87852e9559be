//! The `berezin-lab` command line.
//!
//! Exit codes: 0 success, 1 an inequality violation was found, 2 usage
//! error, 3 input, format or precondition error.

mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{parse_bound_list, BoundEvaluation, BoundId, BoundInstance, BoundParams};
use crate::error::{Error, Result};
use crate::harness::{paper_suite, run_campaign, FamilyKind, TrialConfig, TrialReport};
use crate::linalg::Matrix;
use crate::rkhs::{berezin_range, load_family, standard_family, szego_family, BerezinContext, KernelFamily};

pub use format::{complex12, sig12, table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "berezin-lab", version, about = "Berezin number and Berezin norm bound laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Berezin number of one operator.
    Ber(Single),
    /// Berezin norm of one operator.
    Norm(Single),
    /// Berezin transform at every family point.
    Range(Single),
    /// Evaluate bounds on the given operators.
    Bound(Evaluate),
    /// Evaluate bounds and compare them after exponent normalization.
    Compare(Evaluate),
    /// Run a randomized soundness campaign.
    Fuzz(Fuzz),
    /// Replay a saved evaluation, instance or fuzz report.
    Reproduce(Reproduce),
    /// Evaluate the worked examples.
    Paper(Output),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    #[default]
    Table,
    Csv,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// `standard`, `szego`, or a kernel family file.
    #[arg(long, default_value = "standard")]
    family: String,
    /// Comma separated points of the open unit disk, e.g. `0.5,0.1-0.2i`.
    #[arg(long)]
    szego_points: Option<String>,
    /// Number of Taylor coefficients kept by the Szegő family.
    #[arg(long)]
    truncation: Option<usize>,
}

#[derive(Args, Debug)]
struct Single {
    #[arg(short = 'm', long = "matrix")]
    matrix: Vec<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ParamArgs {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "r")]
    r: Option<f64>,
    #[arg(long = "s")]
    s: Option<f64>,
    /// Hölder exponent; its conjugate is derived.
    #[arg(long)]
    gamma: Option<f64>,
    /// Number of product terms for `thm-ram44`.
    #[arg(long = "n")]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct Evaluate {
    /// Comma separated bound ids, or `all`.
    #[arg(long)]
    bounds: Option<String>,
    /// Operators in the order the inequality names them.
    #[arg(short = 'm', long = "matrix")]
    matrix: Vec<PathBuf>,
    #[command(flatten)]
    family: FamilyArgs,
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Fuzz {
    #[arg(long, default_value = "all")]
    bounds: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, env = "BEREZIN_LAB_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4, 5, 6])]
    dims: Vec<usize>,
    /// `standard`, `random-unit`, `szego`, or `default` for the first two.
    #[arg(long, default_value = "default")]
    family: String,
    /// Only sample full-rank operators.
    #[arg(long)]
    full_rank: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct Reproduce {
    #[arg(long)]
    from: PathBuf,
    #[command(flatten)]
    output: Output,
}

/// An evaluation together with the instance it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub instance: BoundInstance,
    pub evaluation: BoundEvaluation,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Replay {
    Report(TrialReport),
    Records(Vec<BoundRecord>),
    Record(BoundRecord),
    Instance(BoundInstance),
}

enum Failure {
    Usage(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::UnknownBound(_) => Failure::Usage(e.to_string()),
            other => Failure::Input(other),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

/// Runs the command line with process stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the command line with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult<i32> {
    match command {
        Command::Ber(a) => single(a, out, Quantity::Number),
        Command::Norm(a) => single(a, out, Quantity::Norm),
        Command::Range(a) => single(a, out, Quantity::Range),
        Command::Bound(a) => evaluate(a, out, false),
        Command::Compare(a) => evaluate(a, out, true),
        Command::Fuzz(a) => fuzz(a, out),
        Command::Reproduce(a) => reproduce(a, out),
        Command::Paper(a) => paper(a, out),
    }
}

fn emit(output: &Output, text: &str, out: &mut dyn Write) -> CliResult<()> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Input(e.into())),
        None => out.write_all(text.as_bytes()).map_err(|e| Failure::Input(e.into())),
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn parse_points(list: &str) -> CliResult<Vec<Complex64>> {
    list.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let compact: String = p.chars().filter(|c| !c.is_whitespace()).collect();
            compact.parse::<Complex64>().map_err(|_| Failure::Usage(format!("cannot parse disk point `{p}`")))
        })
        .collect()
}

fn resolve_family(args: &FamilyArgs, dim: usize) -> CliResult<KernelFamily> {
    match args.family.as_str() {
        "standard" => Ok(standard_family(dim)?),
        "szego" => {
            let list = args
                .szego_points
                .as_deref()
                .ok_or_else(|| Failure::Usage("--family szego requires --szego-points".into()))?;
            let points = parse_points(list)?;
            Ok(szego_family(&points, args.truncation.unwrap_or(dim))?)
        }
        path => Ok(load_family(path)?),
    }
}

fn load_matrices(paths: &[PathBuf]) -> CliResult<Vec<Matrix>> {
    paths.iter().map(|p| Matrix::load(p).map_err(Failure::Input)).collect()
}

enum Quantity {
    Number,
    Norm,
    Range,
}

fn single(args: Single, out: &mut dyn Write, q: Quantity) -> CliResult<i32> {
    if args.matrix.len() != 1 {
        return Err(Failure::Usage("exactly one --matrix is required".into()));
    }
    let a = Matrix::load(&args.matrix[0]).map_err(Failure::Input)?;
    let family = resolve_family(&args.family, a.rows())?;
    let ctx = BerezinContext::new(a, family)?;
    let fmt = args.output.format;
    let text = match q {
        Quantity::Number | Quantity::Norm => {
            let (name, value) = match q {
                Quantity::Number => ("berezin_number", ctx.family().ber(ctx.operator())?),
                _ => ("berezin_norm", ctx.family().ber_norm(ctx.operator())?),
            };
            match fmt {
                Format::Table => format!("{}\n", sig12(value)),
                Format::Csv => format!("{name}\n{value}\n"),
                Format::Json => json(&serde_json::json!({ name: value })),
            }
        }
        Quantity::Range => match fmt {
            Format::Csv => range_csv(&ctx),
            Format::Table => {
                let rows: Vec<Vec<String>> = ctx
                    .family()
                    .points()
                    .iter()
                    .zip(berezin_range(&ctx))
                    .map(|(p, z)| vec![p.clone(), complex12(z)])
                    .collect();
                table(&["point", "value"], &rows)
            }
            Format::Json => {
                let rows: Vec<_> = ctx
                    .family()
                    .points()
                    .iter()
                    .zip(berezin_range(&ctx))
                    .map(|(p, z)| serde_json::json!({"point": p, "re": z.re, "im": z.im}))
                    .collect();
                json(&rows)
            }
        },
    };
    emit(&args.output, &text, out)?;
    Ok(EXIT_OK)
}

/// Berezin range as CSV with header `point,re,im`.
pub fn range_csv(ctx: &BerezinContext) -> String {
    let mut s = String::from("point,re,im\n");
    for (p, z) in ctx.family().points().iter().zip(berezin_range(ctx)) {
        s.push_str(&format!("{p},{},{}\n", z.re, z.im));
    }
    s
}

pub fn emit_range_csv(ctx: &BerezinContext, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, range_csv(ctx))?;
    Ok(())
}

fn build_params(args: &ParamArgs, id: BoundId, operators: usize) -> BoundParams {
    let mut p = BoundParams::default();
    if let Some(l) = args.lambda {
        p.lambda = l;
    }
    if let Some(r) = args.r {
        p.r = r;
    }
    if let Some(s) = args.s {
        p.s = s;
    }
    if let Some(g) = args.gamma {
        p = p.with_gamma(g);
    }
    p.n_terms = match (args.n, id) {
        (Some(n), _) => n,
        (None, BoundId::ThmRam44) => operators / 3,
        (None, _) => 1,
    };
    p
}

fn evaluate(args: Evaluate, out: &mut dyn Write, compare: bool) -> CliResult<i32> {
    let list = args.bounds.as_deref().ok_or_else(|| Failure::Usage("--bounds is required".into()))?;
    let ids = parse_bound_list(list)?;
    if args.matrix.is_empty() {
        return Err(Failure::Usage("at least one --matrix is required".into()));
    }
    for &id in &ids {
        let want = id.arity(build_params(&args.params, id, args.matrix.len()).n_terms);
        if want != args.matrix.len() {
            return Err(Failure::Usage(format!("{id} takes {want} --matrix argument(s), got {}", args.matrix.len())));
        }
    }
    let operators = load_matrices(&args.matrix)?;
    let family = resolve_family(&args.family, operators[0].rows())?;
    let mut records = Vec::new();
    for &id in &ids {
        let params = build_params(&args.params, id, operators.len());
        let instance = BoundInstance::new(id, params, operators.clone(), family.clone());
        let evaluation = instance.evaluate()?;
        records.push(BoundRecord { instance, evaluation });
    }
    let text = match args.output.format {
        Format::Json => json(&records),
        Format::Table if compare => compare_table(&records),
        Format::Table => bound_table(&records),
        Format::Csv => bound_csv(&records),
    };
    emit(&args.output, &text, out)?;
    Ok(EXIT_OK)
}

fn opt12(x: Option<f64>) -> String {
    x.map_or_else(|| "-".into(), sig12)
}

fn bound_table(records: &[BoundRecord]) -> String {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let e = &r.evaluation;
            let branches: Vec<String> = e.branches.iter().map(|b| format!("{}={}", b.name, sig12(b.value))).collect();
            vec![
                e.bound_id.to_string(),
                sig12(e.exponent),
                sig12(e.lhs),
                sig12(e.bound),
                branches.join(" "),
                e.reference_id.map_or_else(|| "-".into(), |id| id.to_string()),
                opt12(e.reference_bound),
                e.satisfied.to_string(),
            ]
        })
        .collect();
    table(&["bound_id", "exponent", "lhs", "bound", "branches", "reference_id", "reference_bound", "satisfied"], &rows)
}

fn bound_csv(records: &[BoundRecord]) -> String {
    let mut s = String::from("bound_id,exponent,lhs,bound,normalized_bound,reference_id,reference_bound,satisfied\n");
    for r in records {
        let e = &r.evaluation;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            e.bound_id,
            e.exponent,
            e.lhs,
            e.bound,
            e.normalized_bound,
            e.reference_id.map_or(String::new(), |id| id.to_string()),
            e.reference_bound.map_or(String::new(), |v| v.to_string()),
            e.satisfied
        ));
    }
    s
}

fn compare_table(records: &[BoundRecord]) -> String {
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let e = &r.evaluation;
            vec![
                e.bound_id.to_string(),
                sig12(e.exponent),
                sig12(e.normalized_bound),
                opt12(e.normalized_reference()),
                sig12(crate::bounds::root(e.lhs, e.exponent)),
                e.satisfied.to_string(),
            ]
        })
        .collect();
    table(&["bound_id", "exponent", "normalized_bound", "normalized_reference", "normalized_lhs", "satisfied"], &rows)
}

fn fuzz(args: Fuzz, out: &mut dyn Write) -> CliResult<i32> {
    let ids = parse_bound_list(&args.bounds)?;
    let kinds = match args.family.as_str() {
        "default" => vec![FamilyKind::Standard, FamilyKind::RandomUnit],
        other => vec![other.parse::<FamilyKind>()?],
    };
    let configs: Vec<TrialConfig> = kinds
        .into_iter()
        .map(|family_kind| TrialConfig {
            seed: args.seed,
            trials: args.trials,
            dims: args.dims.clone(),
            allow_rank_deficient: !args.full_rank,
            family_kind,
            bound_ids: ids.iter().map(|id| id.as_str().to_string()).collect(),
            ..TrialConfig::default()
        })
        .collect();
    let report = run_campaign(&configs)?;
    let text = match args.output.format {
        Format::Json => json(&report),
        Format::Table => fuzz_table(&report),
        Format::Csv => fuzz_csv(&report),
    };
    emit(&args.output, &text, out)?;
    Ok(if report.overall_pass { EXIT_OK } else { EXIT_VIOLATION })
}

fn fuzz_table(report: &TrialReport) -> String {
    let rows: Vec<Vec<String>> = report
        .bounds
        .iter()
        .map(|b| {
            vec![
                b.bound_id.clone(),
                b.family_kind.map_or_else(|| "-".into(), |k| k.as_str().into()),
                b.trials_run.to_string(),
                b.skipped.to_string(),
                b.violations.len().to_string(),
                opt12(b.min_slack),
                opt12(b.mean_tightness),
                opt12(b.max_tightness),
            ]
        })
        .collect();
    let mut s = table(
        &["bound_id", "family", "trials", "skipped", "violations", "min_slack", "mean_tightness", "max_tightness"],
        &rows,
    );
    s.push_str(&format!("overall_pass: {}\n", report.overall_pass));
    s
}

fn fuzz_csv(report: &TrialReport) -> String {
    let mut s = String::from("bound_id,family,trials,skipped,violations,min_slack,mean_tightness,max_tightness\n");
    let opt = |x: Option<f64>| x.map_or(String::new(), |v| v.to_string());
    for b in &report.bounds {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            b.bound_id,
            b.family_kind.map_or("", |k| k.as_str()),
            b.trials_run,
            b.skipped,
            b.violations.len(),
            opt(b.min_slack),
            opt(b.mean_tightness),
            opt(b.max_tightness)
        ));
    }
    s
}

fn reproduce(args: Reproduce, out: &mut dyn Write) -> CliResult<i32> {
    let text = std::fs::read_to_string(&args.from).map_err(|e| Failure::Input(e.into()))?;
    let replay: Replay = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(Error::Format(format!("unrecognized replay file: {e}"))))?;
    let instances: Vec<(BoundInstance, Option<BoundEvaluation>)> = match replay {
        Replay::Report(report) => report
            .bounds
            .into_iter()
            .flat_map(|b| b.violations)
            .filter_map(|v| v.instance.map(|i| (i, v.evaluation)))
            .collect(),
        Replay::Records(records) => records.into_iter().map(|r| (r.instance, Some(r.evaluation))).collect(),
        Replay::Record(r) => vec![(r.instance, Some(r.evaluation))],
        Replay::Instance(i) => vec![(i, None)],
    };
    let mut records = Vec::new();
    let mut violated = false;
    for (instance, recorded) in instances {
        match instance.evaluate() {
            Ok(evaluation) => {
                if recorded.as_ref().is_some_and(|r| *r != evaluation) {
                    return Err(Failure::Input(Error::Format(format!(
                        "replayed {} evaluation differs from the recorded one",
                        instance.bound_id
                    ))));
                }
                violated |= !evaluation.satisfied;
                records.push(BoundRecord { instance, evaluation });
            }
            Err(Error::InvalidParameter(m)) => return Err(Failure::Usage(m)),
            Err(_) => violated = true,
        }
    }
    let text = match args.output.format {
        Format::Json => json(&records),
        Format::Table => bound_table(&records),
        Format::Csv => bound_csv(&records),
    };
    emit(&args.output, &text, out)?;
    Ok(if violated { EXIT_VIOLATION } else { EXIT_OK })
}

fn paper(args: Output, out: &mut dyn Write) -> CliResult<i32> {
    let report = paper_suite();
    let text = match args.format {
        Format::Json => json(&report),
        Format::Table => {
            let rows: Vec<Vec<String>> = report
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.bound_id.clone(),
                        r.quantity.clone(),
                        sig12(r.expected),
                        sig12(r.actual),
                        if r.pass { "ok".into() } else { "FAIL".into() },
                    ]
                })
                .collect();
            table(&["bound_id", "quantity", "expected", "actual", "status"], &rows)
        }
        Format::Csv => {
            let mut s = String::from("bound_id,quantity,expected,actual,pass\n");
            for r in &report.rows {
                s.push_str(&format!("{},{},{},{},{}\n", r.bound_id, r.quantity, r.expected, r.actual, r.pass));
            }
            s
        }
    };
    emit(&args, &text, out)?;
    Ok(if report.overall_pass { EXIT_OK } else { EXIT_VIOLATION })
}
