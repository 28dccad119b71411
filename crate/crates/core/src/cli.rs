//! The `asm` command line.
//!
//! Exit codes: 0 success, 1 I/O and other errors, 2 usage, 3 parse error,
//! 4 check error, 5 a run that did not produce output, 6 a failed
//! verification.

use std::fs;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::algorithm::Algorithm;
use crate::bundle::{AlgorithmBundle, BundleError};
use crate::cosim::{run_suite, Pass, SuiteConfig};
use crate::dispatch::{oracle_dispatch_run, DispatchOptions};
use crate::interp::{run, OracleEnv, RunOptions, RunResult, RunStatus};
use crate::parser::{parse, parse_value, SourceError};
use crate::passes::normalize::normalize_algorithm;
use crate::passes::prune::{prune_with, PruneOptions};
use crate::passes::separate::{separate_all, separate_only};
use crate::passes::serialize::serialize;
use crate::printer::print;
use crate::structure::Datastructure;
use crate::tables::parse_oracle_tables;
use crate::trace::{failure_json, write_trace};
use crate::value::{name, Value};

pub const EXIT_OTHER: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_CHECK: i32 = 4;
pub const EXIT_RUN: i32 = 5;
pub const EXIT_VERIFY: i32 = 6;

#[derive(Parser, Debug)]
#[command(name = "asm", version, about = "Sequential abstract state machine workbench")]
pub struct Cli {
    /// Report results and errors as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write a JSON-lines step trace of `run` to this file.
    #[arg(long, global = true, value_name = "PATH")]
    trace: Option<PathBuf>,
    /// Seed for `cosim`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PassArg {
    Separate,
    Normalize,
    Serialize,
    Prune,
}

impl From<PassArg> for Pass {
    fn from(p: PassArg) -> Pass {
        match p {
            PassArg::Separate => Pass::Separate,
            PassArg::Normalize => Pass::Normalize,
            PassArg::Serialize => Pass::Serialize,
            PassArg::Prune => Pass::Prune,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and check a program.
    Check { file: PathBuf },
    /// Run a program, or the entry member of a bundle (`.json`).
    Run {
        file: PathBuf,
        /// One input value; repeat for several inputs.
        #[arg(long = "input", value_name = "VALUE", allow_hyphen_values = true)]
        inputs: Vec<String>,
        /// JSON tables answering extrinsic queries.
        #[arg(long, value_name = "FILE")]
        oracle: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        max_steps: usize,
        /// Nesting limit when members of a bundle call each other.
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
    },
    /// Replace dynamic functions by initially uninformative ones.
    Separate {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Separate only these symbols (repeatable).
        #[arg(long, value_name = "SYMBOL")]
        only: Vec<String>,
        /// Write the renaming certificate as JSON.
        #[arg(long, value_name = "PATH")]
        cert: Option<PathBuf>,
    },
    /// Rewrite the program into an if/elseif cascade of parallel updates.
    Normalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Rewrite the program so each step issues at most one extrinsic query.
    Serialize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the pure/tainted clause classification as JSON.
        #[arg(long, value_name = "PATH")]
        emit_classification: Option<PathBuf>,
    },
    /// Merge a bundle into one algorithm with an explicit call stack.
    Prune {
        bundle: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Members are already serialized; do not normalize and serialize.
        #[arg(long)]
        assume_serialized: bool,
        /// Return after the callee's first mega-step rather than when its
        /// output exists.
        #[arg(long)]
        return_on_first_done: bool,
    },
    /// Co-simulate a pass on generated cases and print a JSON report.
    Cosim {
        #[arg(long, value_enum)]
        pass: PassArg,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// An error with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl Failure {
    fn new(code: i32, kind: &'static str, message: impl Into<String>) -> Failure {
        Failure {
            code,
            kind,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: io::Error) -> Failure {
        Failure::new(EXIT_OTHER, "io", format!("{}: {e}", path.display()))
    }
}

impl From<SourceError> for Failure {
    fn from(e: SourceError) -> Failure {
        match e {
            SourceError::Parse(p) => Failure::new(EXIT_PARSE, "parse", format!("parse error at {p}")),
            SourceError::Check(c) => Failure::new(EXIT_CHECK, "check", c.to_string()),
        }
    }
}

impl From<BundleError> for Failure {
    fn from(e: BundleError) -> Failure {
        match e {
            BundleError::Source { path, source } => {
                let inner = Failure::from(source);
                Failure::new(inner.code, inner.kind, format!("{path}: {}", inner.message))
            }
            BundleError::Io { .. } => Failure::new(EXIT_OTHER, "io", e.to_string()),
            BundleError::Json(_) => Failure::new(EXIT_PARSE, "parse", e.to_string()),
            _ => Failure::new(EXIT_CHECK, "check", e.to_string()),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn load(path: &Path) -> Result<Algorithm, Failure> {
    Ok(parse(&read(path)?)?)
}

/// Writes `text` to `path`, or to stdout without one.
fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::io(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(path: &Path, j: &Json) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(j).expect("JSON serializes") + "\n";
    emit(Some(path), &text)
}

fn input_values(ds: &Datastructure, raw: &[String]) -> Result<Vec<Value>, Failure> {
    raw.iter()
        .map(|s| {
            parse_value(ds, s).map_err(|e| Failure::new(EXIT_USAGE, "usage", format!("input `{s}`: {e}")))
        })
        .collect()
}

fn oracle_env(ds: &Datastructure, path: Option<&Path>) -> Result<OracleEnv, Failure> {
    let Some(p) = path else {
        return Ok(OracleEnv::new());
    };
    let tables = parse_oracle_tables(ds, &read(p)?)
        .map_err(|e| Failure::new(EXIT_PARSE, "parse", format!("{}: {e}", p.display())))?;
    Ok(OracleEnv::from_tables(tables))
}

fn status_line(result: &RunResult) -> Json {
    let mut j = json!({
        "status": result.status.name(),
        "output": result.status.output().map_or(Json::Null, Value::to_json),
    });
    match &result.status {
        RunStatus::Failed(f) => j["failure"] = failure_json(f),
        RunStatus::Stuck { symbol, args } => {
            j["stuck"] = json!({"symbol": &**symbol, "args": args.iter().map(Value::to_json).collect::<Vec<_>>()})
        }
        _ => {}
    }
    j
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    file: &Path,
    inputs: &[String],
    oracle: Option<&Path>,
    max_steps: usize,
    max_depth: usize,
    trace: Option<&Path>,
) -> Outcome {
    let is_bundle = file.extension().is_some_and(|e| e == "json");
    let result = if is_bundle {
        let bundle = AlgorithmBundle::load(file)?;
        let ds = &bundle.entry().structure.datastructure;
        let xs = input_values(ds, inputs)?;
        let env = oracle_env(ds, oracle)?;
        let opts = DispatchOptions { max_steps, max_depth };
        oracle_dispatch_run(&bundle, 0, &xs, &env, opts)
            .map_err(|e| Failure::new(EXIT_RUN, "run", e.to_string()))?
    } else {
        let alg = load(file)?;
        let ds = &alg.structure.datastructure;
        let xs = input_values(ds, inputs)?;
        let env = oracle_env(ds, oracle)?;
        let mut opts = RunOptions::budget(max_steps);
        if trace.is_some() {
            opts = opts.recording();
        }
        run(&alg, &xs, &env, opts).map_err(|e| Failure::new(EXIT_USAGE, "usage", e.to_string()))?
    };
    if let Some(p) = trace {
        let mut f = fs::File::create(p).map_err(|e| Failure::io(p, e))?;
        write_trace(&mut f, &result).map_err(|e| Failure::io(p, e))?;
    }
    println!("{}", status_line(&result));
    Ok(if result.status.output().is_some() { 0 } else { EXIT_RUN })
}

fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Check { file } => {
            load(file)?;
            if cli.json {
                println!("{}", json!({"status": "ok"}));
            } else {
                println!("ok");
            }
            Ok(0)
        }
        Command::Run {
            file,
            inputs,
            oracle,
            max_steps,
            max_depth,
        } => cmd_run(file, inputs, oracle.as_deref(), *max_steps, *max_depth, cli.trace.as_deref()),
        Command::Separate {
            file,
            output,
            only,
            cert,
        } => {
            let alg = load(file)?;
            let c = if only.is_empty() {
                separate_all(&alg)
            } else {
                let syms: Vec<_> = only.iter().map(name).collect();
                separate_only(&alg, &syms).map_err(|e| Failure::new(EXIT_CHECK, "check", e.to_string()))?
            };
            if let Some(p) = cert {
                emit_json(p, &c.to_json())?;
            }
            emit(output.as_deref(), &print(&c.algorithm))?;
            Ok(0)
        }
        Command::Normalize { file, output } => {
            let alg = load(file)?;
            emit(output.as_deref(), &print(&normalize_algorithm(&alg)))?;
            Ok(0)
        }
        Command::Serialize {
            file,
            output,
            emit_classification,
        } => {
            let alg = load(file)?;
            let s = serialize(&alg);
            if let Some(p) = emit_classification {
                emit_json(p, &s.classification_json())?;
            }
            emit(output.as_deref(), &print(&s.algorithm))?;
            Ok(0)
        }
        Command::Prune {
            bundle,
            output,
            assume_serialized,
            return_on_first_done,
        } => {
            let b = AlgorithmBundle::load(bundle)?;
            let opts = PruneOptions {
                assume_serialized: *assume_serialized,
                return_on_first_done: *return_on_first_done,
            };
            let p = prune_with(&b, opts).map_err(|e| Failure::new(EXIT_CHECK, "check", e.to_string()))?;
            emit(output.as_deref(), &print(&p.algorithm))?;
            Ok(0)
        }
        Command::Cosim {
            pass,
            count,
            steps,
            output,
        } => {
            let report = run_suite(&SuiteConfig::new((*pass).into(), cli.seed, *count, *steps));
            let text = serde_json::to_string_pretty(&report.to_json()).expect("JSON serializes") + "\n";
            emit(output.as_deref(), &text)?;
            Ok(if report.ok() { 0 } else { EXIT_VERIFY })
        }
    }
}

fn colored() -> bool {
    match std::env::var("ASM_COLOR").as_deref() {
        Ok("always") | Ok("1") => true,
        Ok("auto") => io::stderr().is_terminal(),
        _ => false,
    }
}

fn report(cli_json: bool, f: &Failure) {
    let mut err = io::stderr().lock();
    let _ = if cli_json {
        writeln!(err, "{}", json!({"error": f.kind, "message": f.message, "exit": f.code}))
    } else if colored() {
        writeln!(err, "\x1b[31merror\x1b[0m: {}", f.message)
    } else {
        writeln!(err, "error: {}", f.message)
    };
}

/// Runs the command line and returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let args: Vec<String> = args.into_iter().collect();
    crate::stack::with_deep_stack(move || main_inner(args))
}

fn main_inner(args: Vec<String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(f) => {
            report(cli.json, &f);
            f.code
        }
    }
}
