//! `muwork`: one binary, one verb per invocation.
//!
//! Exit codes: 0 success, 1 usage error, 2 analysis error. Results go to
//! standard output, diagnostics to standard error. With `--format json`
//! standard output carries exactly one JSON document.

mod report;
mod verbs;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CliError, Report};

#[derive(Parser, Debug)]
#[command(name = "muwork", version, about = "Partial recursive functions, counter machines and halting verdicts")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Evaluator fuel, and the step limit of machine runs
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub fuel: u64,
    /// Snapshot budget for cycle detection, and the trace length cap
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_snapshots: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Do not try to prove searches undefined by polynomial root isolation
    #[arg(long, global = true)]
    pub no_root_search: bool,
    #[arg(long, global = true, value_enum, default_value_t = Cycle::Floyd)]
    pub cycle_mode: Cycle,
    /// Evaluation fuel spent looking for a proof in `godel isdef`
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cycle {
    Floyd,
    Hash,
}

/// An expression over a definition file.
#[derive(Args, Debug)]
pub struct ExprArgs {
    /// A defined name, or an expression such as `comp(succ, zero)`
    #[arg(long)]
    pub expr: String,
    /// `.rf` file to resolve names in; the built-in corpus library by default
    #[arg(long)]
    pub file: Option<PathBuf>,
}

/// Either an expression or an `.imp` program.
#[derive(Args, Debug)]
pub struct SubjectArgs {
    /// A defined name, or an expression such as `comp(succ, zero)`
    #[arg(long, conflicts_with = "program")]
    pub expr: Option<String>,
    /// `.rf` file to resolve names in; the built-in corpus library by default
    #[arg(long, requires = "expr")]
    pub file: Option<PathBuf>,
    /// Counter-machine program (`.imp`)
    #[arg(long)]
    pub program: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Parse an `.rf` or `.imp` file and list what it defines
    Parse { file: PathBuf },
    /// Evaluate an expression on an input
    Eval {
        #[command(flatten)]
        expr: ExprArgs,
        /// Comma-separated arguments, e.g. `2,3`
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Compile an expression to a counter-machine program
    Compile {
        #[command(flatten)]
        expr: ExprArgs,
    },
    /// Run a program, compiling an expression first if one is given
    Run {
        #[command(flatten)]
        subject: SubjectArgs,
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Run and print every snapshot, up to --max-snapshots of them
    Trace {
        #[command(flatten)]
        subject: SubjectArgs,
        #[arg(long, default_value = "")]
        input: String,
    },
    /// Ask whether a computation halts
    Analyze {
        #[command(flatten)]
        subject: SubjectArgs,
        #[arg(long, conflicts_with_all = ["any_input", "every_input"])]
        input: Option<String>,
        /// Does it halt on some input?
        #[arg(long, conflicts_with = "every_input")]
        any_input: bool,
        /// Does it halt on every input?
        #[arg(long)]
        every_input: bool,
    },
    /// Gödel numbering, substitution, proofs
    #[command(subcommand)]
    Godel(GodelVerb),
    /// Diagonal constructions over a finite list of functions
    #[command(subcommand)]
    Demo(DemoVerb),
    /// Labelled example corpus
    #[command(subcommand)]
    Corpus(CorpusVerb),
}

#[derive(Subcommand, Debug)]
pub enum GodelVerb {
    /// Code of a term or formula
    Encode {
        text: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Term or formula with the given code
    Decode {
        code: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Sub(y, u, v): put the term coded u for the variable coded v in y
    Sub {
        y: String,
        u: String,
        v: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Check a JSON proof file against a target formula
    Check {
        proof: PathBuf,
        target: String,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// IsDef(#Fml, u), with a proof of the substituted formula when one is found
    Isdef {
        /// A formula `∃k (f(x) = k)`, or its code
        fml: String,
        u: String,
        #[arg(long)]
        file: Option<PathBuf>,
        /// Include the proof itself in the output
        #[arg(long)]
        emit_proof: bool,
    },
    /// Code of the template ¬IsDef(x, x) and what self-application means
    Negation,
}

#[derive(Subcommand, Debug)]
pub enum DemoVerb {
    /// Tabulate ∂(i) = θ(i, i) and ask for ∂(∂)
    Diagonal {
        #[arg(long)]
        list: PathBuf,
    },
    /// α(z) = μy[θ(z, z) = 0]
    Alpha {
        #[arg(long)]
        list: PathBuf,
        #[arg(long)]
        z: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum CorpusVerb {
    /// Analyze every labelled probe and compare with its label
    Run {
        #[arg(long, default_value = "corpus")]
        dir: PathBuf,
        /// Only entries carrying this tag
        #[arg(long)]
        tag: Option<String>,
        /// Worker threads; all available cores by default
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = verbs::verb_name(&cli.verb);
    let result = verbs::dispatch(&cli.verb, &cli.opts);
    emit(name, cli.opts.format, result)
}

fn emit(verb: &str, format: Format, result: Result<Report, CliError>) -> ExitCode {
    match result {
        Ok(r) => {
            let out = match format {
                Format::Json => r.to_json(verb) + "\n",
                Format::Text => r.text,
            };
            // a closed pipe downstream is not our failure
            let _ = io::stdout().lock().write_all(out.as_bytes());
            ExitCode::from(if r.failed { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("muwork {verb}: {e}");
            if format == Format::Json {
                let _ = writeln!(io::stdout().lock(), "{}", e.to_json(verb));
            }
            ExitCode::from(e.exit_code())
        }
    }
}
