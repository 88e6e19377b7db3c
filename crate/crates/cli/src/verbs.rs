//! Verb implementations. Each returns a [`Report`] or a [`CliError`].

mod corpus;
mod demo;
mod godel;

use std::fs;
use std::path::Path;

use muwork_core::compile::compile;
use muwork_core::corpus::load_rf_file;
use muwork_core::eval::{eval, EvalError};
use muwork_core::halt::{AnalyzeError, Analyzer, AnalyzerConfig, CycleMode, Mode, ProblemSpec, Target};
use muwork_core::imp::{parse_imp, run_with_cap, ImpProgram, MachineError, RunStatus};
use muwork_core::nat::Nat;
use muwork_core::rf::{check, is_primitive_recursive, parse_expr, parse_into, DefEnv, RfExpr};
use serde_json::Value;

use crate::report::{analysis_fields, analysis_text, failed, obj, to_value, usage, CliError, Report};
use crate::{Cycle, Opts, SubjectArgs, Verb};

/// The corpus files every name lookup sees when no `--file` is given.
const BUILTIN: [&str; 3] = [
    include_str!("../../../corpus/arith.rf"),
    include_str!("../../../corpus/goldbach.rf"),
    include_str!("../../../corpus/roots.rf"),
];

pub fn verb_name(v: &Verb) -> &'static str {
    use crate::{DemoVerb, GodelVerb};
    match v {
        Verb::Parse { .. } => "parse",
        Verb::Eval { .. } => "eval",
        Verb::Compile { .. } => "compile",
        Verb::Run { .. } => "run",
        Verb::Trace { .. } => "trace",
        Verb::Analyze { .. } => "analyze",
        Verb::Godel(g) => match g {
            GodelVerb::Encode { .. } => "godel encode",
            GodelVerb::Decode { .. } => "godel decode",
            GodelVerb::Sub { .. } => "godel sub",
            GodelVerb::Check { .. } => "godel check",
            GodelVerb::Isdef { .. } => "godel isdef",
            GodelVerb::Negation => "godel negation",
        },
        Verb::Demo(DemoVerb::Diagonal { .. }) => "demo diagonal",
        Verb::Demo(DemoVerb::Alpha { .. }) => "demo alpha",
        Verb::Corpus(crate::CorpusVerb::Run { .. }) => "corpus run",
    }
}

pub fn dispatch(v: &Verb, o: &Opts) -> Result<Report, CliError> {
    match v {
        Verb::Parse { file } => parse(file),
        Verb::Eval { expr, input } => {
            let env = env_for(expr.file.as_deref())?;
            eval_verb(&expr.expr, &env, input, o)
        }
        Verb::Compile { expr } => {
            let env = env_for(expr.file.as_deref())?;
            compile_verb(&expr.expr, &env)
        }
        Verb::Run { subject, input } => run_verb(subject, input, o, false),
        Verb::Trace { subject, input } => run_verb(subject, input, o, true),
        Verb::Analyze { subject, input, any_input, every_input } => {
            let mode = match (input, any_input, every_input) {
                (Some(i), _, _) => Mode::OnInput(parse_input(i)?),
                (None, true, _) => Mode::OnAnyInput,
                (None, _, true) => Mode::OnEveryInput,
                _ => return Err(usage("give one of --input, --any-input, --every-input")),
            };
            analyze_verb(subject, mode, o)
        }
        Verb::Godel(g) => godel::dispatch(g, o),
        Verb::Demo(d) => demo::dispatch(d, o),
        Verb::Corpus(c) => corpus::dispatch(c, o),
    }
}

pub fn config(o: &Opts) -> AnalyzerConfig {
    AnalyzerConfig {
        fuel: o.fuel,
        max_snapshots: o.max_snapshots,
        root_search: !o.no_root_search,
        cycle_mode: match o.cycle_mode {
            Cycle::Floyd => CycleMode::Floyd,
            Cycle::Hash => CycleMode::Hash,
        },
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| failed(format!("{}: {e}", path.display())))
}

pub fn builtin_env() -> DefEnv {
    let mut env = DefEnv::new();
    for text in BUILTIN {
        parse_into(text, &mut env).expect("built-in corpus parses");
    }
    env
}

/// The definitions of an `.rf` file (over the library next to it), or the
/// built-in ones.
pub fn env_for(file: Option<&Path>) -> Result<DefEnv, CliError> {
    match file {
        None => Ok(builtin_env()),
        Some(p) => Ok(load_rf_file(p).map_err(failed)?.env),
    }
}

/// `"2,3"` as arguments; the empty string is no arguments.
pub fn parse_input(s: &str) -> Result<Vec<Nat>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|t| t.trim().parse::<Nat>().map_err(|_| usage(format!("`{t}` is not a natural number")))).collect()
}

fn words(args: &[Nat]) -> Result<Vec<u64>, CliError> {
    args.iter()
        .map(|n| n.to_u64().ok_or_else(|| usage(format!("machine input {n} does not fit in a register"))))
        .collect()
}

fn nat_values(args: &[Nat]) -> Value {
    Value::Array(args.iter().map(to_value).collect())
}

pub fn resolve(text: &str, env: &DefEnv) -> Result<RfExpr, CliError> {
    let e = parse_expr(text, env).map_err(|e| usage(format!("--expr: {e}")))?;
    check(&e, env).map_err(|e| usage(format!("--expr: {e}")))?;
    Ok(e)
}

fn parse(file: &Path) -> Result<Report, CliError> {
    let ext = file.extension().and_then(|e| e.to_str()).unwrap_or("");
    let shown = file.display().to_string();
    match ext {
        "rf" => {
            let f = load_rf_file(file).map_err(failed)?;
            let mut text = String::new();
            let defs: Vec<Value> = f
                .own
                .iter()
                .map(|n| {
                    let e = f.env.get(n).expect("own names are defined");
                    let arity = check(e, &f.env).expect("parsed definitions check");
                    let pr = is_primitive_recursive(e, &f.env);
                    text += &format!("{n}/{arity}{}  = {e}\n", if pr { " [pr]" } else { "" });
                    serde_json::json!({ "name": n, "arity": arity, "primitive_recursive": pr, "expr": e.to_string() })
                })
                .collect();
            let json = obj([("file", shown.into()), ("kind", "rf".into()), ("definitions", Value::Array(defs))]);
            Ok(Report::new(json, text))
        }
        "imp" => {
            let p = load_program(file)?;
            let json = obj([
                ("file", shown.into()),
                ("kind", "imp".into()),
                ("inputs", p.inputs().into()),
                ("instructions", p.len().into()),
                ("program", p.to_string().into()),
            ]);
            let text = format!("inputs: {}\ninstructions: {}\n{p}", p.inputs(), p.len());
            Ok(Report::new(json, text))
        }
        _ => Err(usage(format!("{shown}: expected an .rf or .imp file"))),
    }
}

pub fn load_program(path: &Path) -> Result<ImpProgram, CliError> {
    parse_imp(&read(path)?).map_err(|e| failed(format!("{}: {e}", path.display())))
}

fn eval_err(e: EvalError) -> CliError {
    match e {
        EvalError::ArityMismatch { .. } => usage(e),
        EvalError::UnknownCall(_) => failed(e),
    }
}

fn eval_verb(text: &str, env: &DefEnv, input: &str, o: &Opts) -> Result<Report, CliError> {
    let e = resolve(text, env)?;
    let args = parse_input(input)?;
    let out = eval(&e, &args, o.fuel, env).map_err(eval_err)?;
    let text_out = match out.value() {
        Some(v) => format!("{v}\n"),
        None => format!("{}\n", to_value(&out)),
    };
    let mut json = obj([("expr", text.into()), ("input", nat_values(&args))]);
    json.insert("result".into(), to_value(&out));
    Ok(Report::new(json, text_out))
}

fn compile_verb(text: &str, env: &DefEnv) -> Result<Report, CliError> {
    let e = resolve(text, env)?;
    let p = compile(&e, env);
    let json = obj([
        ("expr", text.into()),
        ("inputs", p.inputs().into()),
        ("scratch", p.scratch().into()),
        ("instructions", p.len().into()),
        ("program", p.to_string().into()),
    ]);
    Ok(Report::new(json, p.to_string()))
}

/// The program named by `--program`, or the compiled `--expr`, and a label for it.
fn subject_program(s: &SubjectArgs) -> Result<(ImpProgram, String), CliError> {
    match (&s.expr, &s.program) {
        (Some(x), None) => {
            let env = env_for(s.file.as_deref())?;
            Ok((compile(&resolve(x, &env)?, &env), x.clone()))
        }
        (None, Some(p)) => Ok((load_program(p)?, p.display().to_string())),
        _ => Err(usage("give exactly one of --expr, --program")),
    }
}

fn machine_err(e: MachineError) -> CliError {
    match e {
        MachineError::InputCount { .. } => usage(e),
        other => failed(other),
    }
}

fn run_verb(s: &SubjectArgs, input: &str, o: &Opts, trace: bool) -> Result<Report, CliError> {
    let (p, label) = subject_program(s)?;
    let args = parse_input(input)?;
    let cap = trace.then_some(usize::try_from(o.max_snapshots).unwrap_or(usize::MAX));
    let r = run_with_cap(&p, &words(&args)?, o.fuel, cap).map_err(machine_err)?;
    let mut text = String::new();
    let mut json = obj([("subject", label.into()), ("input", nat_values(&args))]);
    if let Some(t) = &r.trace {
        let snaps: Vec<Value> = t
            .iter()
            .map(|s| {
                let line = p.snapshot_json(s);
                text += &line;
                text.push('\n');
                serde_json::from_str(&line).expect("snapshots render as JSON")
            })
            .collect();
        json.insert("trace".into(), Value::Array(snaps));
    }
    json.extend(match to_value(&r.status) {
        Value::Object(m) => m,
        _ => unreachable!(),
    });
    text += &match &r.status {
        RunStatus::Halted { output, steps } => format!("halted with {output} after {steps} steps\n"),
        RunStatus::StillRunning { steps, .. } => format!("still running after {steps} steps\n"),
    };
    Ok(Report::new(json, text))
}

fn analyze_err(e: AnalyzeError) -> CliError {
    match e {
        AnalyzeError::InputCount { .. } => usage(e),
        AnalyzeError::Machine(m) => machine_err(m),
        other => failed(other),
    }
}

fn analyze_verb(s: &SubjectArgs, mode: Mode, o: &Opts) -> Result<Report, CliError> {
    let (target, label) = match (&s.expr, &s.program) {
        (Some(x), None) => {
            let env = env_for(s.file.as_deref())?;
            (Target::Rf { expr: resolve(x, &env)?, env }, x.clone())
        }
        (None, Some(p)) => (Target::Program(load_program(p)?), p.display().to_string()),
        _ => return Err(usage("give exactly one of --expr, --program")),
    };
    let (mode_name, input) = match &mode {
        Mode::OnInput(a) => ("input", nat_values(a)),
        Mode::OnAnyInput => ("any-input", Value::Null),
        Mode::OnEveryInput => ("every-input", Value::Null),
    };
    let a = Analyzer::new(config(o)).analyze(&ProblemSpec { target, mode }).map_err(analyze_err)?;
    let mut json = obj([("subject", label.into()), ("mode", mode_name.into())]);
    if !input.is_null() {
        json.insert("input".into(), input);
    }
    json.extend(analysis_fields(&a));
    Ok(Report::new(json, analysis_text(&a)))
}
