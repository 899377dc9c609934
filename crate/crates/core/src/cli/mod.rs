//! The `monobound` command line front end.
//!
//! Every subcommand prints one JSON document (or a flattened table with
//! `--format table`) on stdout. Failures print `{"error": {...}}` and exit
//! with a nonzero status:
//!
//! | code | meaning                                             |
//! |------|-----------------------------------------------------|
//! | 0    | success                                             |
//! | 1    | internal error                                      |
//! | 2    | validation error (e.g. a negative middle Betti number) |
//! | 3    | a `C_d` scan did not produce a stable certificate   |
//! | 4    | malformed input (bad JSON, bad rationals, bad flags) |

pub mod cache;
pub mod render;

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::chern_invariants::{euler_characteristic, invariants_of, ChernError, FamilySpec};
use crate::compat_bounds::{self, refined_bound_from, CdResult, ScanError, DEFAULT_SCAN_DEPTH};
use crate::group_orders::c_ell_d;
use crate::numtheory::NumError;
use crate::variety_bounds::{VarietyError, VarietyInvariants};
use crate::wd_matrix::{
    format_rational, is_unipotent, parse_rational, semisimple_order, trace_criterion, wd_pair,
    RationalMatrix, WdError,
};

use cache::{CacheKey, CdCache};
use render::ValueOptions;

pub const CACHE_ENV: &str = "MONOBOUND_CACHE";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_UNSTABLE: i32 = 3;
pub const EXIT_MALFORMED: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "monobound",
    version,
    about = "Uniform bounds on the index of unipotent local monodromy"
)]
pub struct Cli {
    /// Number of primes ℓ ≠ p scanned when computing C_d
    #[arg(long, global = true, default_value_t = DEFAULT_SCAN_DEPTH)]
    pub scan_depth: usize,

    /// Cache file for C_d scans (disabled when unset)
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// Print factored integers without their decimal expansion
    #[arg(long, global = true)]
    pub no_value_expansion: bool,

    /// Decimal expansions longer than this are omitted
    #[arg(long, global = true, default_value_t = 200)]
    pub max_value_digits: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// C_{ℓ,d}: |GL_d(F_ℓ)|, or |GL_d(Z/4Z)| when ℓ = 2
    Cld {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        d: u32,
    },
    /// C_d = gcd of C_{ℓ,d} over primes ℓ ≠ p, with its scan certificate
    Cd {
        #[arg(long)]
        d: u32,
        /// Residue characteristic to exclude (omit to take every prime)
        #[arg(long)]
        p: Option<u64>,
    },
    /// C_{b,c,h} for explicit invariants or a standard family
    VarietyBound {
        /// JSON text, @file, or - for stdin
        #[arg(long)]
        input: String,
        #[arg(long)]
        p: u64,
        /// Number of factors; defaults to the dimension
        #[arg(long)]
        h: Option<u32>,
    },
    /// Betti numbers and section invariants of a standard family
    Invariants {
        #[arg(long)]
        input: String,
    },
    /// Invariants of iterated smooth hyperplane sections
    Descend {
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 1)]
        steps: u32,
    },
    /// Jordan-Chevalley and Weil-Deligne decomposition of a rational matrix
    WdDecompose {
        /// JSON array of rows of rational strings, e.g. [["1","1"],["0","1"]]
        #[arg(long)]
        matrix: String,
        #[arg(long, default_value = "1")]
        tau: String,
    },
    /// Tame and wild refinements of C_d for dimension d and characteristic p
    Refined {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Chern(#[from] ChernError),
    #[error(transparent)]
    Matrix(#[from] WdError),
    #[error(transparent)]
    Num(#[from] NumError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => EXIT_MALFORMED,
            CliError::Validation(_) | CliError::Num(_) => EXIT_VALIDATION,
            CliError::Scan(e) | CliError::Variety(VarietyError::Scan(e)) => scan_exit(e),
            CliError::Variety(_) => EXIT_VALIDATION,
            CliError::Chern(ChernError::Variety(VarietyError::Scan(e))) => scan_exit(e),
            CliError::Chern(ChernError::InvalidFamily(_) | ChernError::IndexOutOfRange { .. })
            | CliError::Chern(ChernError::Variety(_)) => EXIT_VALIDATION,
            CliError::Chern(_) => EXIT_INTERNAL,
            CliError::Matrix(WdError::Parse(_) | WdError::Empty | WdError::NotSquare) => {
                EXIT_MALFORMED
            }
            CliError::Matrix(WdError::NewtonDidNotConverge(_)) => EXIT_INTERNAL,
            CliError::Matrix(_) => EXIT_VALIDATION,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Malformed(_) => "malformed_input",
            CliError::Validation(_) => "validation",
            CliError::Variety(VarietyError::NegativeBetti { .. })
            | CliError::Chern(ChernError::Variety(VarietyError::NegativeBetti { .. })) => {
                "negative_betti"
            }
            _ if self.exit_code() == EXIT_UNSTABLE => "unstable_certificate",
            CliError::Matrix(WdError::PreconditionViolated(_)) => "precondition_violated",
            CliError::Matrix(WdError::SingularInput) => "singular_input",
            _ if self.exit_code() == EXIT_VALIDATION => "validation",
            _ => "internal",
        }
    }
}

fn scan_exit(e: &ScanError) -> i32 {
    match e {
        ScanError::Unstable { .. } => EXIT_UNSTABLE,
        _ => EXIT_VALIDATION,
    }
}

/// Resolved settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct JobConfig {
    pub scan_depth: usize,
    pub cache_path: Option<PathBuf>,
    pub format: OutputFormat,
    pub values: ValueOptions,
}

impl JobConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        if cli.scan_depth < 2 {
            return Err(ScanError::DepthTooSmall(cli.scan_depth).into());
        }
        Ok(JobConfig {
            scan_depth: cli.scan_depth,
            cache_path: cli.cache.clone(),
            format: cli.format,
            values: ValueOptions {
                expand: !cli.no_value_expansion,
                max_digits: cli.max_value_digits,
            },
        })
    }
}

/// Rendered stdout text plus process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub exit_code: i32,
}

struct Session {
    config: JobConfig,
    cache: Option<CdCache>,
    all_hits: bool,
}

impl Session {
    fn new(config: JobConfig) -> Self {
        let cache = config.cache_path.as_ref().map(CdCache::open);
        Session {
            config,
            cache,
            all_hits: true,
        }
    }

    fn fact(&self, f: &crate::numtheory::FactoredInt) -> Value {
        render::factored(f, self.config.values)
    }

    fn c_d(&mut self, d: u32, p: Option<u64>) -> Result<CdResult, ScanError> {
        let key = CacheKey {
            d,
            p,
            scan_depth: self.config.scan_depth,
        };
        if let Some(hit) = self.cache.as_ref().and_then(|c| c.get(&key)) {
            return Ok(hit.clone());
        }
        self.all_hits = false;
        let result = compat_bounds::c_d(d, p, self.config.scan_depth)?;
        if let Some(cache) = self.cache.as_mut() {
            if let Err(e) = cache.insert(key, result.clone()) {
                eprintln!(
                    "warning: could not write cache {}: {e}",
                    cache.path().display()
                );
            }
        }
        Ok(result)
    }

    fn cached_flag(&self) -> Value {
        Value::Bool(self.cache.is_some() && self.all_hits)
    }
}

fn read_input(arg: &str) -> Result<String, CliError> {
    if arg == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::Malformed(format!("reading stdin: {e}")))?;
        Ok(s)
    } else if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Malformed(format!("reading {path}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantsInput {
    n: u32,
    b: Vec<u64>,
    #[serde(default)]
    c: Vec<i64>,
}

/// Accepts `{"n", "b", "c"}`, a family `{"kind": ...}`, or `{"family": {...}}`.
pub fn parse_variety_input(
    text: &str,
) -> Result<(Option<FamilySpec>, VarietyInvariants), CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Malformed(format!("invalid JSON: {e}")))?;
    let value = match value.get("family") {
        Some(f) => f.clone(),
        None => value,
    };
    if value.get("kind").is_some() {
        let family: FamilySpec = serde_json::from_value(value)
            .map_err(|e| CliError::Malformed(format!("invalid family: {e}")))?;
        let inv = invariants_of(&family)?;
        Ok((Some(family), inv))
    } else {
        let raw: InvariantsInput = serde_json::from_value(value)
            .map_err(|e| CliError::Malformed(format!("invalid invariants: {e}")))?;
        Ok((None, VarietyInvariants::new(raw.n, raw.b, raw.c)?))
    }
}

pub fn parse_matrix(text: &str) -> Result<RationalMatrix, CliError> {
    let rows: Vec<Vec<Value>> = serde_json::from_str(text)
        .map_err(|e| CliError::Malformed(format!("matrix must be a JSON array of rows: {e}")))?;
    let rows = rows
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|cell| match cell {
                    Value::String(s) => parse_rational(&s),
                    Value::Number(n) if n.is_i64() => parse_rational(&n.to_string()),
                    other => Err(WdError::Parse(format!("bad matrix entry {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RationalMatrix::from_rows(rows)?)
}

fn invariants_json(inv: &VarietyInvariants) -> Value {
    serde_json::to_value(inv).expect("invariants serialize")
}

fn execute(session: &mut Session, command: &Command) -> Result<(Value, i32), CliError> {
    match command {
        Command::Cld { ell, d } => {
            let c = c_ell_d(*ell, *d)?;
            Ok((
                json!({ "ell": ell, "d": d, "c_ell_d": session.fact(&c) }),
                EXIT_OK,
            ))
        }
        Command::Cd { d, p } => {
            let r = session.c_d(*d, *p)?;
            let code = if r.is_stable() {
                EXIT_OK
            } else {
                EXIT_UNSTABLE
            };
            let out = json!({
                "d": d,
                "p": p,
                "scan_depth": session.config.scan_depth,
                "c_d": session.fact(&r.value),
                "stable": r.is_stable(),
                "certificate": r.certificate,
                "cached": session.cached_flag(),
            });
            Ok((out, code))
        }
        Command::VarietyBound { input, p, h } => {
            let (family, inv) = parse_variety_input(&read_input(input)?)?;
            let h = h.unwrap_or(inv.dim());
            let p = *p;
            let report = inv.bound_with(h, |d| session.c_d(d, Some(p)))?;
            let out = json!({
                "family": family,
                "invariants": invariants_json(&inv),
                "p": p,
                "h": h,
                "scan_depth": session.config.scan_depth,
                "d_vector": report.d_vector,
                "factors": report.factors.iter().map(|f| session.fact(f)).collect::<Vec<_>>(),
                "product": session.fact(&report.product),
                "stable": true,
                "cached": session.cached_flag(),
            });
            Ok((out, EXIT_OK))
        }
        Command::Invariants { input } => {
            let (family, inv) = parse_variety_input(&read_input(input)?)?;
            let chi = match &family {
                Some(f) => i128::from(euler_characteristic(f)?),
                None => inv.euler_char_section(0)?,
            };
            let out = json!({
                "family": family,
                "invariants": invariants_json(&inv),
                "full_betti": inv.full_betti(),
                "euler_characteristic": chi.to_string(),
                "d_vector": inv.d_vector()?,
            });
            Ok((out, EXIT_OK))
        }
        Command::Descend { input, steps } => {
            let (_, inv) = parse_variety_input(&read_input(input)?)?;
            let mut chain = Vec::new();
            let mut current = inv.clone();
            for _ in 0..*steps {
                current = current.descend()?;
                chain.push(invariants_json(&current));
            }
            Ok((
                json!({ "input": invariants_json(&inv), "sections": chain }),
                EXIT_OK,
            ))
        }
        Command::WdDecompose { matrix, tau } => {
            let m = parse_matrix(&read_input(matrix)?)?;
            let tau = parse_rational(tau)?;
            let pair = wd_pair(&m, &tau)?;
            let order = semisimple_order(&m)?.map(|o| o.to_string());
            let mut out = serde_json::to_value(&pair).expect("pair serializes");
            let obj = out.as_object_mut().expect("object");
            obj.insert(
                "input".into(),
                serde_json::to_value(&m).expect("matrix serializes"),
            );
            obj.insert("trace".into(), Value::String(format_rational(&m.trace())));
            obj.insert("unipotent".into(), Value::Bool(is_unipotent(&m)));
            obj.insert("trace_criterion".into(), Value::Bool(trace_criterion(&m)?));
            obj.insert("semisimple_order".into(), json!(order));
            obj.insert("reconstructs".into(), Value::Bool(pair.reconstruct() == m));
            Ok((out, EXIT_OK))
        }
        Command::Refined { d, p } => {
            if *d == 0 {
                return Err(CliError::Validation("refined bound needs d >= 1".into()));
            }
            let cd = session
                .c_d(*d, Some(*p))?
                .certified(session.config.scan_depth)?;
            let r = refined_bound_from(&cd)?;
            let out = json!({
                "d": r.d,
                "p": r.p,
                "scan_depth": session.config.scan_depth,
                "tame_set": r.tame_set,
                "tame_max": r.tame_max,
                "tame_lcm": session.fact(&r.tame_lcm),
                "wild_part": session.fact(&r.wild_part),
                "wild_trivial": r.wild_trivial,
                "p_exceeds_d_plus_one": r.p_exceeds_d_plus_one,
                "p_below_2d_plus_one": r.p_below_2d_plus_one,
                "c_d": session.fact(&cd.value),
                "cached": session.cached_flag(),
            });
            Ok((out, EXIT_OK))
        }
    }
}

fn render(value: &Value, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("JSON renders");
            s.push('\n');
            s
        }
        OutputFormat::Table => render::table(value),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    stdout: e.to_string(),
                    exit_code: EXIT_OK,
                },
                _ => Outcome {
                    stdout: render(
                        &render::error("malformed_input", e.to_string().trim(), EXIT_MALFORMED),
                        OutputFormat::Json,
                    ),
                    exit_code: EXIT_MALFORMED,
                },
            };
        }
    };
    let format = cli.format;
    let result = JobConfig::from_cli(&cli).and_then(|config| {
        let mut session = Session::new(config);
        execute(&mut session, &cli.command)
    });
    match result {
        Ok((value, exit_code)) => Outcome {
            stdout: render(&value, format),
            exit_code,
        },
        Err(e) => {
            let code = e.exit_code();
            Outcome {
                stdout: render(
                    &render::error(e.kind(), &e.to_string(), code),
                    OutputFormat::Json,
                ),
                exit_code: code,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Value, i32) {
        let mut full = vec!["monobound"];
        full.extend_from_slice(args);
        let out = run(full);
        let value = serde_json::from_str(&out.stdout).unwrap_or(Value::Null);
        (value, out.exit_code)
    }

    #[test]
    fn cld_command() {
        let (v, code) = run_args(&["cld", "--ell", "3", "--d", "2"]);
        assert_eq!(code, 0);
        assert_eq!(
            v["c_ell_d"],
            json!({"factors": {"2": 4, "3": 1}, "value": "48"})
        );
        let (v, _) = run_args(&["cld", "--ell", "2", "--d", "1"]);
        assert_eq!(v["c_ell_d"]["value"], "2");
        let (v, _) = run_args(&["cld", "--ell", "7", "--d", "0"]);
        assert_eq!(v["c_ell_d"]["value"], "1");
        let (v, code) = run_args(&["cld", "--ell", "4", "--d", "2"]);
        assert_eq!(code, EXIT_VALIDATION);
        assert!(v["error"]["message"]
            .as_str()
            .unwrap()
            .contains("not prime"));
    }

    #[test]
    fn cd_command() {
        let (v, code) = run_args(&["cd", "--d", "2", "--p", "7"]);
        assert_eq!(code, 0);
        assert_eq!(v["c_d"]["value"], "48");
        assert_eq!(v["stable"], true);
        let (v, _) = run_args(&["cd", "--d", "1", "--p", "3"]);
        assert_eq!(v["c_d"]["value"], "2");
        let (v, _) = run_args(&["cd", "--d", "0", "--p", "5"]);
        assert_eq!(v["c_d"]["value"], "1");
        let (v, code) = run_args(&["--scan-depth", "2", "cd", "--d", "2"]);
        assert_eq!(code, EXIT_UNSTABLE);
        assert_eq!(v["stable"], false);
        let (_, code) = run_args(&["--scan-depth", "1", "cd", "--d", "2"]);
        assert_eq!(code, EXIT_VALIDATION);
    }

    #[test]
    fn variety_bound_command() {
        let (v, code) = run_args(&[
            "variety-bound",
            "--input",
            r#"{"kind":"projective_space","n":2}"#,
            "--p",
            "5",
        ]);
        assert_eq!(code, 0);
        assert_eq!(v["product"]["value"], "2");
        assert_eq!(v["d_vector"], json!([0, 1]));

        let (v, code) = run_args(&["variety-bound", "--input", r#"{"n":1,"b":[2]}"#, "--p", "7"]);
        assert_eq!(code, 0);
        assert_eq!(v["product"]["value"], "48");

        let (v, code) = run_args(&[
            "variety-bound",
            "--input",
            r#"{"n":2,"b":[0,1],"c":[5]}"#,
            "--p",
            "5",
        ]);
        assert_eq!(code, EXIT_VALIDATION);
        assert_eq!(v["error"]["kind"], "negative_betti");

        let (_, code) = run_args(&["variety-bound", "--input", "{not json", "--p", "5"]);
        assert_eq!(code, EXIT_MALFORMED);
    }

    #[test]
    fn descend_command() {
        let (v, code) = run_args(&[
            "descend",
            "--input",
            r#"{"n":3,"b":[0,1,0],"c":[3,2]}"#,
            "--steps",
            "2",
        ]);
        assert_eq!(code, 0);
        assert_eq!(
            v["sections"],
            json!([{"n":2,"b":[0,1],"c":[2]}, {"n":1,"b":[0],"c":[]}])
        );
        let (_, code) = run_args(&["descend", "--input", r#"{"n":1,"b":[2]}"#]);
        assert_eq!(code, EXIT_VALIDATION);
        let (v, _) = run_args(&[
            "descend",
            "--input",
            r#"{"kind":"hypersurface","n":2,"degree":4}"#,
        ]);
        assert_eq!(v["sections"], json!([{"n":1,"b":[6],"c":[]}]));
    }

    #[test]
    fn wd_command() {
        let (v, code) = run_args(&["wd-decompose", "--matrix", r#"[["-1","1"],["0","-1"]]"#]);
        assert_eq!(code, 0);
        assert_eq!(v["r"], json!([["-1", "0"], ["0", "-1"]]));
        assert_eq!(v["n"], json!([["0", "-1"], ["0", "0"]]));
        assert_eq!(v["semisimple_order"], "2");
        assert_eq!(v["reconstructs"], true);
        let (v, _) = run_args(&[
            "wd-decompose",
            "--matrix",
            r#"[["1","2"],["0","1"]]"#,
            "--tau",
            "2",
        ]);
        assert_eq!(v["n"], json!([["0", "1"], ["0", "0"]]));
        let (_, code) = run_args(&["wd-decompose", "--matrix", r#"[["1","2"]]"#]);
        assert_eq!(code, EXIT_MALFORMED);
        let (_, code) = run_args(&["wd-decompose", "--matrix", r#"[["2","0"],["0","1"]]"#]);
        assert_eq!(code, EXIT_VALIDATION);
        let (_, code) = run_args(&["wd-decompose", "--matrix", r#"[["1"]]"#, "--tau", "0"]);
        assert_eq!(code, EXIT_VALIDATION);
    }

    #[test]
    fn refined_command() {
        let (v, code) = run_args(&["refined", "--d", "2", "--p", "3"]);
        assert_eq!(code, 0);
        assert_eq!(v["tame_max"], 6);
        assert_eq!(v["wild_part"]["value"], "3");
        let (v, _) = run_args(&["refined", "--d", "1", "--p", "5"]);
        assert_eq!(v["tame_set"], json!([1, 2]));
        assert_eq!(v["wild_part"]["value"], "1");
    }

    #[test]
    fn bad_flags_are_malformed() {
        let (v, code) = run_args(&["cld", "--ell", "x", "--d", "1"]);
        assert_eq!(code, EXIT_MALFORMED);
        assert_eq!(v["error"]["kind"], "malformed_input");
        let (_, code) = run_args(&["--format", "xml", "cld", "--ell", "3", "--d", "1"]);
        assert_eq!(code, EXIT_MALFORMED);
    }

    #[test]
    fn table_format() {
        let out = run([
            "monobound",
            "--format",
            "table",
            "cld",
            "--ell",
            "3",
            "--d",
            "2",
        ]);
        assert_eq!(out.exit_code, 0);
        assert!(out.stdout.contains("2^4 * 3 = 48"));
    }
}
