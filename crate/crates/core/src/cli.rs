//! `schatten` command-line front end: one JSON document in, one JSON document out.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 usage or document error,
//! 3 numerical failure, 4 precondition violation.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::divdiff::divided_difference;
use crate::embed::{lambda_bound, verify_isometry};
use crate::error::ErrorKind;
use crate::io::{
    AlgebraDocument, DocError, ElementDocument, ExponentToken, MapDocument, MapSource,
    MatrixDocument, ReportDocument, SymbolDocument,
};
use crate::matrix::{singular_values, DEFAULT_GROUP_TOL};
use crate::moi::{fd_second_derivative, moi_apply, second_derivative_schatten, MoiProblem};
use crate::obstruct::{check_candidate, CheckConfig, DEFAULT_TOL, DEFAULT_T_GRID};
use crate::schatten::schatten_norm;

pub const EXIT_OUTPUT: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_PRECONDITION: u8 = 4;

/// Default tolerance of `verify`.
pub const VERIFY_TOL: f64 = 1e-9;
pub const VERIFY_SAMPLES: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "schatten", version, about = "Schatten-class numerics with JSON input and output", after_help = SCHEMA_HELP)]
pub struct Cli {
    /// Seed for randomized operations; echoed in every output.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for `verify` (default 1e-9) and `obstruct` (default 1e-6).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output path, or `-` for standard output.
    #[arg(long, global = true, default_value = "-")]
    pub output: String,
    /// Input document path; standard input when absent.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// {"matrix": M, "p": P} -> {"norm", "p", "singular_values", "seed"}
    Norm,
    /// {"matrix": M} -> {"singular_values", "seed"}
    Svals,
    /// {"symbol": S, "nodes": [x..]} -> {"value", "seed"}
    Divdiff,
    /// {"anchors": [M..], "perturbations": [M..], "symbol": S, "group_tol"?} -> {"result": M, "seed"}
    Moi,
    /// {"a": M, "b": M, "p": P, "fd_step"?} -> {"d2", "p", "fd"?, "seed"}
    D2,
    /// {"map": MAP, "x"?: X} -> {"map": explicit MAP, "image"?, "domain_norm"?, "codomain_norm"?, "seed"}
    Embed,
    /// {"map": MAP, "samples"?} -> {"max_relative_residual", "pass", "samples_checked", "tol", "seed"}
    Verify,
    /// {"m", "p", "field": "R"|"C"|"H"} -> {"lambda", "m", "p", "field", "seed"}
    Lambda,
    /// {"map": MAP, "q"?, "p"?, "t_grid"?} -> obstruction report with residual profile and verdict
    Obstruct,
}

const SCHEMA_HELP: &str = "Documents:
  M      {\"rows\", \"cols\", \"re\": [[..]], \"im\"?: [[..]]}
  X      a matrix M, or a vector {\"re\": [..], \"im\"?: [..]}
  P      a number > 0 or \"inf\"
  S      {\"kind\": \"abs_pow\", \"p\"} or {\"kind\": \"polynomial\", \"coeffs\": [c0, c1, ..]}
  MAP    {\"kind\": diag|corner|sumdiff|firstrow|vec|s2sp|cubature243, \"m\"?, \"n\"?, \"p\"?}
         or {\"domain\": SPACE, \"codomain\": SPACE, \"basis_images\": [X..]}
  SPACE  {\"kind\": \"vector\"|\"matrix\", \"dim\", \"exponent\": P, \"field\"?: \"R\"|\"C\"}

Exit codes: 0 ok, 1 output not written, 2 usage or document error, 3 numerical failure,
4 precondition violation.";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Document(#[from] DocError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write output: {0}")]
    Output(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Document(DocError::Library(e)) => match e.kind() {
                ErrorKind::Numerical => EXIT_NUMERICAL,
                ErrorKind::Precondition => EXIT_PRECONDITION,
            },
            CliError::Document(_) | CliError::Usage(_) => EXIT_USAGE,
            CliError::Output(_) => EXIT_OUTPUT,
        }
    }
}

impl From<crate::error::Error> for CliError {
    fn from(e: crate::error::Error) -> Self {
        CliError::Document(DocError::Library(e))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NormInput {
    matrix: MatrixDocument,
    p: ExponentToken,
}

#[derive(Serialize)]
struct NormOutput {
    norm: f64,
    p: ExponentToken,
    singular_values: Vec<f64>,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SvalsInput {
    matrix: MatrixDocument,
}

#[derive(Serialize)]
struct SvalsOutput {
    singular_values: Vec<f64>,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DivdiffInput {
    symbol: SymbolDocument,
    nodes: Vec<f64>,
}

#[derive(Serialize)]
struct DivdiffOutput {
    value: f64,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MoiInput {
    anchors: Vec<MatrixDocument>,
    perturbations: Vec<MatrixDocument>,
    symbol: SymbolDocument,
    #[serde(default)]
    group_tol: Option<f64>,
}

#[derive(Serialize)]
struct MoiOutput {
    result: MatrixDocument,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct D2Input {
    a: MatrixDocument,
    b: MatrixDocument,
    p: ExponentToken,
    #[serde(default)]
    fd_step: Option<f64>,
}

#[derive(Serialize)]
struct D2Output {
    d2: f64,
    p: ExponentToken,
    #[serde(skip_serializing_if = "Option::is_none")]
    fd: Option<f64>,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EmbedInput {
    map: MapSource,
    #[serde(default)]
    x: Option<ElementDocument>,
}

#[derive(Serialize)]
struct EmbedOutput {
    map: MapDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    image: Option<ElementDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    domain_norm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    codomain_norm: Option<f64>,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyInput {
    map: MapSource,
    #[serde(default)]
    samples: Option<usize>,
}

#[derive(Serialize)]
struct VerifyOutput {
    max_relative_residual: f64,
    pass: bool,
    samples_checked: usize,
    tol: f64,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LambdaInput {
    m: u64,
    p: u64,
    field: AlgebraDocument,
}

#[derive(Serialize)]
struct LambdaOutput {
    lambda: u128,
    m: u64,
    p: u64,
    field: AlgebraDocument,
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObstructInput {
    map: MapSource,
    #[serde(default)]
    q: Option<ExponentToken>,
    #[serde(default)]
    p: Option<ExponentToken>,
    #[serde(default)]
    t_grid: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct ObstructOutput {
    #[serde(flatten)]
    report: ReportDocument,
    seed: u64,
}

fn parse<T: DeserializeOwned>(input: &str) -> Result<T, CliError> {
    Ok(serde_json::from_str(input).map_err(DocError::from)?)
}

fn render<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("output documents serialize");
    text.push('\n');
    text
}

/// Runs one subcommand on an input document and returns the output document.
pub fn execute(
    command: Command,
    input: &str,
    seed: u64,
    tol: Option<f64>,
) -> Result<String, CliError> {
    if let Some(t) = tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Usage(format!(
                "--tol must be a finite non-negative number, got {t}"
            )));
        }
    }
    let out = match command {
        Command::Norm => {
            let doc: NormInput = parse(input)?;
            let m = doc.matrix.to_matrix()?;
            render(&NormOutput {
                norm: schatten_norm(&m, doc.p.0),
                p: doc.p,
                singular_values: singular_values(&m),
                seed,
            })
        }
        Command::Svals => {
            let doc: SvalsInput = parse(input)?;
            render(&SvalsOutput {
                singular_values: singular_values(&doc.matrix.to_matrix()?),
                seed,
            })
        }
        Command::Divdiff => {
            let doc: DivdiffInput = parse(input)?;
            let value = divided_difference(&doc.symbol.to_symbol()?, &doc.nodes)?;
            render(&DivdiffOutput { value, seed })
        }
        Command::Moi => {
            let doc: MoiInput = parse(input)?;
            let matrices = |docs: &[MatrixDocument]| {
                docs.iter()
                    .map(MatrixDocument::to_matrix)
                    .collect::<Result<Vec<_>, _>>()
            };
            let problem = MoiProblem::new(
                matrices(&doc.anchors)?,
                matrices(&doc.perturbations)?,
                doc.symbol.to_symbol()?,
            )?;
            let result = moi_apply(&problem, doc.group_tol.unwrap_or(DEFAULT_GROUP_TOL))?;
            render(&MoiOutput {
                result: MatrixDocument::from_matrix(&result),
                seed,
            })
        }
        Command::D2 => {
            let doc: D2Input = parse(input)?;
            let (a, b) = (doc.a.to_matrix()?, doc.b.to_matrix()?);
            let d2 = second_derivative_schatten(&a, &b, doc.p.0.to_f64())?;
            let fd = doc
                .fd_step
                .map(|h| fd_second_derivative(&a, &b, doc.p.0, h))
                .transpose()?;
            render(&D2Output {
                d2,
                p: doc.p,
                fd,
                seed,
            })
        }
        Command::Embed => {
            let doc: EmbedInput = parse(input)?;
            let map = doc.map.build()?;
            let (mut image, mut domain_norm, mut codomain_norm) = (None, None, None);
            if let Some(x) = &doc.x {
                let x = x.to_element()?;
                let y = map.apply(&x)?;
                domain_norm = Some(map.domain().norm(&x)?);
                codomain_norm = Some(map.codomain().norm(&y)?);
                image = Some(ElementDocument::from_element(&y));
            }
            render(&EmbedOutput {
                map: MapDocument::from_map(&map),
                image,
                domain_norm,
                codomain_norm,
                seed,
            })
        }
        Command::Verify => {
            let doc: VerifyInput = parse(input)?;
            let tol = tol.unwrap_or(VERIFY_TOL);
            let verdict = verify_isometry(
                &doc.map.build()?,
                doc.samples.unwrap_or(VERIFY_SAMPLES),
                seed,
                tol,
            )?;
            render(&VerifyOutput {
                max_relative_residual: verdict.max_relative_residual,
                pass: verdict.pass,
                samples_checked: verdict.samples_checked,
                tol,
                seed,
            })
        }
        Command::Lambda => {
            let doc: LambdaInput = parse(input)?;
            render(&LambdaOutput {
                lambda: lambda_bound(doc.m, doc.p, doc.field.into())?,
                m: doc.m,
                p: doc.p,
                field: doc.field,
                seed,
            })
        }
        Command::Obstruct => {
            let doc: ObstructInput = parse(input)?;
            let mut map = doc.map.build()?;
            if doc.q.is_some() || doc.p.is_some() {
                let q = doc.q.map_or(map.domain().exponent, |t| t.0);
                let p = doc.p.map_or(map.codomain().exponent, |t| t.0);
                map = map.with_exponents(q, p);
            }
            let config = CheckConfig {
                t_grid: doc.t_grid.unwrap_or_else(|| DEFAULT_T_GRID.to_vec()),
                tol: tol.unwrap_or(DEFAULT_TOL),
            };
            let report = check_candidate(&map, &config)?;
            render(&ObstructOutput {
                report: ReportDocument::from_report(&report),
                seed,
            })
        }
    };
    Ok(out)
}

fn read_input(path: Option<&Path>) -> Result<String, CliError> {
    let mut text = String::new();
    let res = match path {
        Some(p) => std::fs::File::open(p).and_then(|mut f| f.read_to_string(&mut text)),
        None => std::io::stdin().read_to_string(&mut text),
    };
    res.map_err(|e| CliError::Usage(format!("cannot read input: {e}")))?;
    Ok(text)
}

/// Writes the whole document at once; files are replaced atomically via a sibling temp file.
fn write_output(target: &str, text: &str) -> Result<(), CliError> {
    if target == "-" {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(text.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(CliError::Output);
    }
    let path = Path::new(target);
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::Output)?;
    tmp.write_all(text.as_bytes()).map_err(CliError::Output)?;
    tmp.persist(path).map_err(|e| CliError::Output(e.error))?;
    Ok(())
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let input = read_input(cli.input.as_deref())?;
    let text = execute(cli.command, &input, cli.seed, cli.tol)?;
    write_output(&cli.output, &text)
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("schatten: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
