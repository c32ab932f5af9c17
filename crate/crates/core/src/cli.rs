//! Command-line front end: `check`, `synth`, `certify` and `simulate`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::codegen::{emit, CodegenError};
use crate::engine::{build_check, run, EngineConfig, EngineError, Realization, RealizationDto, SynthesisResult};
use crate::frontend::{load, ElabOptions, FrontendError, SynthesisProblem};
use crate::harness::{run_traces, HarnessConfig, HarnessError};
use crate::skolem::{certify, SkolemError};
use crate::smt::{SmtError, SolverConfig, SolverHandle, Validity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "agsynth", version, about = "Synthesize C implementations from assume-guarantee contracts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide realizability.
    Check(Common),
    /// Synthesize and emit a C implementation.
    Synth {
        #[command(flatten)]
        common: Common,
        /// Destination of the C source (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the initial state and Skolem cascades as JSON.
        #[arg(long)]
        dump_skolem: Option<PathBuf>,
        /// Certify every Skolem with independent solver checks.
        #[arg(long)]
        check: bool,
    },
    /// Re-run the certificate checks on a dumped Skolem bundle.
    Certify {
        #[command(flatten)]
        common: Common,
        /// Bundle written by `synth --dump-skolem`.
        #[arg(long)]
        skolem: PathBuf,
    },
    /// Run randomized conformance traces against the guarantees.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Use a dumped bundle instead of synthesizing.
        #[arg(long)]
        skolem: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        traces: usize,
        #[arg(long, default_value_t = 50)]
        len: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Write the report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Certify the Skolems before simulating.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Contract file.
    input: PathBuf,
    /// Solver command line, e.g. "z3 -in -smt2" (default: $SYNT_SOLVER, then z3).
    #[arg(long)]
    solver: Option<String>,
    #[arg(long, default_value_t = 8)]
    max_k: usize,
    #[arg(long, default_value_t = 30_000, value_parser = clap::value_parser!(u64).range(1..))]
    timeout_ms: u64,
    /// Write every quantified check as an SMT-LIB2 file into this directory.
    #[arg(long)]
    dump_queries: Option<PathBuf>,
    /// Keep boolean definitions as state variables instead of substituting them.
    #[arg(long)]
    no_inline: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Frontend { path: PathBuf, source: FrontendError },
    #[error("{0}")]
    Bundle(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Skolem(#[from] SkolemError),
    #[error(transparent)]
    Codegen(#[from] CodegenError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Smt(#[from] SmtError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        let spawn = |e: &SmtError| matches!(e, SmtError::Spawn { .. });
        match self {
            CliError::Io { .. } | CliError::Frontend { .. } | CliError::Bundle(_) => EXIT_USAGE,
            CliError::Smt(e) | CliError::Engine(EngineError::Smt(e)) | CliError::Harness(HarnessError::Smt(e))
                if spawn(e) =>
            {
                EXIT_USAGE
            }
            CliError::Engine(EngineError::Skolem(SkolemError::Smt(e))) | CliError::Skolem(SkolemError::Smt(e))
                if spawn(e) =>
            {
                EXIT_USAGE
            }
            _ => EXIT_UNKNOWN,
        }
    }
}

impl Common {
    fn solver(&self) -> SolverConfig {
        SolverConfig::new(self.solver.as_deref()).with_timeout(self.timeout_ms)
    }

    fn engine(&self, certify: bool) -> EngineConfig {
        let mut cfg = EngineConfig::new(self.solver());
        cfg.max_k = self.max_k;
        cfg.certify = certify;
        cfg.dump_queries = self.dump_queries.clone();
        cfg
    }

    fn problem(&self) -> Result<SynthesisProblem, CliError> {
        let src = read(&self.input)?;
        load(&src, ElabOptions { inline_booleans: !self.no_inline })
            .map_err(|source| CliError::Frontend { path: self.input.clone(), source })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// The status line printed by `check` and `synth`, with its exit code.
pub fn status_line(r: &SynthesisResult) -> (String, i32) {
    match r {
        SynthesisResult::Realizable(real) => (format!("REALIZABLE k={}", real.k), EXIT_OK),
        SynthesisResult::Unrealizable { depth, .. } => (format!("UNREALIZABLE at depth {depth}"), EXIT_FAIL),
        SynthesisResult::Unknown { stage, reason } => (format!("UNKNOWN ({stage}: {reason})"), EXIT_UNKNOWN),
    }
}

fn report_result(r: &SynthesisResult) -> i32 {
    let (line, code) = status_line(r);
    println!("{line}");
    if let SynthesisResult::Unrealizable { witness, .. } = r {
        if witness.is_empty() {
            println!("the initial-state guarantees are unsatisfiable");
        } else {
            println!("witness: {witness}");
        }
    }
    code
}

fn load_bundle(path: &Path, p: &SynthesisProblem) -> Result<Realization, CliError> {
    let dto: RealizationDto =
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Bundle(format!("{}: {e}", path.display())))?;
    if dto.contract != p.name {
        return Err(CliError::Bundle(format!(
            "{}: bundle is for `{}`, contract is `{}`",
            path.display(),
            dto.contract,
            p.name
        )));
    }
    Realization::from_dto(&dto, p).map_err(|e| CliError::Bundle(format!("{}: {e}", path.display())))
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Check(common) => {
            let p = common.problem()?;
            Ok(report_result(&run(&p, &common.engine(false))?.result))
        }
        Command::Synth { common, out, dump_skolem, check } => {
            let p = common.problem()?;
            let report = run(&p, &common.engine(check))?;
            let (line, code) = status_line(&report.result);
            let SynthesisResult::Realizable(r) = &report.result else {
                return Ok(report_result(&report.result));
            };
            let prog = emit(&p, r)?;
            match &out {
                Some(path) => {
                    write(path, &prog.source)?;
                    println!("{line}");
                }
                None => {
                    eprintln!("{line}");
                    print!("{}", prog.source);
                }
            }
            if let Some(path) = &dump_skolem {
                let json = serde_json::to_string_pretty(&r.to_dto(&p.name)).expect("bundle serializes");
                write(path, &json)?;
            }
            Ok(code)
        }
        Command::Certify { common, skolem } => {
            let p = common.problem()?;
            let r = load_bundle(&skolem, &p)?;
            let mut h = SolverHandle::start(&common.solver())?;
            let mut passed = 0;
            for g in &r.skolems {
                let cert = certify(&mut h, &build_check(&p, g.tag), g)?;
                if cert.passed() {
                    passed += 1;
                } else {
                    println!("{}: certificate failed", g.tag);
                    for c in &cert.cases {
                        if !matches!(c.sound, Validity::Valid) {
                            println!("  case {}: {:?}", c.index, c.sound);
                        }
                    }
                    if !matches!(cert.coverage, Validity::Valid) {
                        println!("  coverage: {:?}", cert.coverage);
                    }
                }
            }
            let total = r.skolems.len();
            if passed == total {
                println!("CERTIFIED {passed}/{total}");
                Ok(EXIT_OK)
            } else {
                println!("FAILED {}/{total}", total - passed);
                Ok(EXIT_FAIL)
            }
        }
        Command::Simulate { common, skolem, traces, len, seed, out, check } => {
            let p = common.problem()?;
            let r = match &skolem {
                Some(path) => load_bundle(path, &p)?,
                None => match run(&p, &common.engine(check))?.result {
                    SynthesisResult::Realizable(r) => r,
                    other => return Ok(report_result(&other)),
                },
            };
            let mut cfg = HarnessConfig::new(common.solver());
            cfg.traces = traces;
            cfg.len = len;
            cfg.seed = seed;
            let (report, _) = run_traces(&p, &r, &cfg)?;
            println!("{}", report.summary());
            for v in report.violations.iter().take(10) {
                println!("  trace {} step {}: {}", v.trace, v.step, v.conjunct);
            }
            if let Some(path) = &out {
                write(path, &serde_json::to_string_pretty(&report).expect("report serializes"))?;
            }
            Ok(if report.pass() { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
