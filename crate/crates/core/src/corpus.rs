//! The example corpus: `.rf` and `.imp` files with ground-truth labels in
//! `<stem>.labels.json` sidecars.
//!
//! `arith.rf` is the arithmetic library. Every other `.rf` file is parsed
//! with the library already defined. A labels file lists the entries of its
//! source file:
//!
//! ```json
//! {"entries": [{"name": "plus", "note": "addition", "tags": ["library"],
//!   "probes": [{"input": [2, 3], "label": "halts", "value": 5, "source": "oracle"}]}]}
//! ```
//!
//! `label` is `halts` (with `value`), `diverges` or `open`. `source` says
//! where the label comes from: `oracle` for values computed by an
//! independent brute-force program, `construction` for divergence that
//! holds by how the entry is built, `conjecture` for open problems.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::{EvalOutcome, Evaluator};
use crate::halt::ProblemSpec;
use crate::imp::{parse_imp, run, ImpProgram};
use crate::nat::Nat;
use crate::rf::{is_primitive_recursive, parse_into, parse_rf, DefEnv, RfError, RfExpr};

pub const LIBRARY_FILE: &str = "arith.rf";

/// Bound used by the bounded quantifiers of the library: large enough that
/// no feasible computation reaches it.
pub const QUANTIFIER_BOUND: &str = "18446744073709551616";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "lowercase")]
pub enum Label {
    Halts { value: Nat },
    Diverges,
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Oracle,
    Construction,
    Conjecture,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    pub input: Vec<Nat>,
    #[serde(flatten)]
    pub label: Label,
    pub source: LabelSource,
}

#[derive(Debug, Clone, Deserialize)]
struct LabelEntry {
    name: String,
    note: String,
    #[serde(default)]
    tags: Vec<String>,
    probes: Vec<Probe>,
}

#[derive(Debug, Clone, Deserialize)]
struct LabelFile {
    entries: Vec<LabelEntry>,
}

#[derive(Debug, Clone)]
pub enum Subject {
    Rf { expr: RfExpr, env: Arc<DefEnv> },
    Program(ImpProgram),
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub source: PathBuf,
    pub arity: usize,
    pub subject: Subject,
    pub note: String,
    pub tags: Vec<String>,
    pub probes: Vec<Probe>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("{path}: {msg}")]
    Labels { path: PathBuf, msg: String },
    #[error("{entry} at {input:?}: {msg}")]
    Inconsistent { entry: String, input: Vec<Nat>, msg: String },
}

impl CorpusEntry {
    pub fn has_tag(&self, tag: &str) -> bool {
        self.tags.iter().any(|t| t == tag)
    }

    pub fn is_primitive_recursive(&self) -> bool {
        match &self.subject {
            Subject::Rf { expr, env } => is_primitive_recursive(expr, env),
            Subject::Program(_) => false,
        }
    }

    /// The entry as a counter-machine program, compiling RF entries.
    pub fn program(&self) -> ImpProgram {
        match &self.subject {
            Subject::Rf { expr, env } => crate::compile::compile(expr, env),
            Subject::Program(p) => p.clone(),
        }
    }

    /// Problem instance for the analyzer at `input`. Program inputs that
    /// do not fit a register are `None`.
    pub fn problem(&self, input: &[Nat]) -> Option<ProblemSpec> {
        Some(match &self.subject {
            Subject::Rf { expr, env } => ProblemSpec::rf(expr.clone(), env, input),
            Subject::Program(p) => {
                let words = input.iter().map(Nat::to_u64).collect::<Option<Vec<_>>>()?;
                ProblemSpec::program(p.clone(), &words)
            }
        })
    }
}

/// A parsed `.rf` file and the names it defines itself.
#[derive(Debug, Clone)]
pub struct RfFile {
    pub path: PathBuf,
    pub env: DefEnv,
    pub own: Vec<String>,
}

fn read(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|e| CorpusError::Io { path: path.into(), msg: e.to_string() })
}

/// The library environment of the corpus directory `dir`.
pub fn library_env(dir: &Path) -> Result<DefEnv, CorpusError> {
    let path = dir.join(LIBRARY_FILE);
    parse_rf(&read(&path)?).map_err(|e| CorpusError::Parse { path, msg: e.to_string() })
}

/// Parses an `.rf` file. When its directory holds the library, the file is
/// parsed on top of it (unless it is the library itself).
pub fn load_rf_file(path: &Path) -> Result<RfFile, CorpusError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let is_lib = path.file_name().is_some_and(|n| n == LIBRARY_FILE);
    let mut env = if !is_lib && dir.join(LIBRARY_FILE).exists() { library_env(dir)? } else { DefEnv::new() };
    let before = env.len();
    parse_into(&read(path)?, &mut env).map_err(|e| CorpusError::Parse { path: path.into(), msg: e.to_string() })?;
    let own = (before..env.len()).map(|i| env.definition(i).expect("in range").name.clone()).collect();
    Ok(RfFile { path: path.into(), env, own })
}

fn labels_path(source: &Path) -> PathBuf {
    let stem = source.file_stem().unwrap_or_default().to_string_lossy();
    source.with_file_name(format!("{stem}.labels.json"))
}

fn load_labels(source: &Path) -> Result<LabelFile, CorpusError> {
    let path = labels_path(source);
    if !path.exists() {
        return Err(CorpusError::Labels { path, msg: "missing labels file".into() });
    }
    serde_json::from_str(&read(&path)?).map_err(|e| CorpusError::Labels { path, msg: e.to_string() })
}

/// Loads and validates every entry of the corpus in `dir`, ordered by file
/// name and then by position in the labels file.
pub fn load_corpus(dir: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let io = |e: std::io::Error| CorpusError::Io { path: dir.into(), msg: e.to_string() };
    let mut files: Vec<PathBuf> =
        fs::read_dir(dir).map_err(io)?.map(|d| d.map(|d| d.path())).collect::<Result<_, _>>().map_err(io)?;
    files.sort();
    let mut entries = Vec::new();
    for path in &files {
        let name = path.file_name().unwrap_or_default().to_string_lossy().to_string();
        if let Some(stem) = name.strip_suffix(".labels.json") {
            if !files
                .iter()
                .any(|f| f.file_stem().is_some_and(|s| s == stem) && !f.to_string_lossy().ends_with(".json"))
            {
                return Err(CorpusError::Labels { path: path.clone(), msg: "no source file for these labels".into() });
            }
            continue;
        }
        match path.extension().and_then(|e| e.to_str()) {
            Some("rf") => entries.extend(rf_entries(path)?),
            Some("imp") => entries.extend(imp_entries(path)?),
            _ => continue,
        }
    }
    let mut seen = HashSet::new();
    for e in &entries {
        if !seen.insert(e.name.clone()) {
            return Err(CorpusError::Labels {
                path: e.source.clone(),
                msg: format!("entry `{}` appears twice", e.name),
            });
        }
    }
    Ok(entries)
}

fn rf_entries(path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let file = load_rf_file(path)?;
    let labels = load_labels(path)?;
    let env = Arc::new(file.env);
    labels
        .entries
        .into_iter()
        .map(|l| {
            if !file.own.contains(&l.name) {
                let msg = format!("`{}` is not defined in this file", l.name);
                return Err(CorpusError::Labels { path: labels_path(path), msg });
            }
            let expr = env.call(&l.name).expect("defined");
            let entry = CorpusEntry {
                name: l.name,
                source: path.into(),
                arity: expr.arity(),
                subject: Subject::Rf { expr, env: env.clone() },
                note: l.note,
                tags: l.tags,
                probes: l.probes,
            };
            check_entry(&entry)?;
            Ok(entry)
        })
        .collect()
}

fn imp_entries(path: &Path) -> Result<Vec<CorpusEntry>, CorpusError> {
    let program = parse_imp(&read(path)?).map_err(|e| CorpusError::Parse { path: path.into(), msg: e.to_string() })?;
    let labels = load_labels(path)?;
    let stem = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
    let [l] = <[LabelEntry; 1]>::try_from(labels.entries).map_err(|_| CorpusError::Labels {
        path: labels_path(path),
        msg: "a program file has exactly one entry".into(),
    })?;
    if l.name != stem {
        return Err(CorpusError::Labels { path: labels_path(path), msg: format!("entry must be named `{stem}`") });
    }
    let entry = CorpusEntry {
        name: l.name,
        source: path.into(),
        arity: program.inputs(),
        subject: Subject::Program(program),
        note: l.note,
        tags: l.tags,
        probes: l.probes,
    };
    check_entry(&entry)?;
    Ok(vec![entry])
}

fn check_entry(e: &CorpusEntry) -> Result<(), CorpusError> {
    let bad = |p: &Probe, msg: &str| CorpusError::Inconsistent {
        entry: e.name.clone(),
        input: p.input.clone(),
        msg: msg.into(),
    };
    let total = e.is_primitive_recursive();
    let mut inputs = HashSet::new();
    if e.probes.is_empty() {
        return Err(CorpusError::Labels { path: labels_path(&e.source), msg: format!("`{}` has no probes", e.name) });
    }
    for p in &e.probes {
        if p.input.len() != e.arity {
            return Err(bad(p, &format!("expected {} inputs", e.arity)));
        }
        if !inputs.insert(p.input.clone()) {
            return Err(bad(p, "input probed twice"));
        }
        match (&p.label, p.source) {
            (Label::Halts { .. }, LabelSource::Oracle) => {}
            (Label::Diverges, LabelSource::Construction) if total => {
                return Err(bad(p, "a primitive recursive function cannot diverge"))
            }
            (Label::Diverges, LabelSource::Construction) => {}
            (Label::Open, LabelSource::Conjecture) if total => {
                return Err(bad(p, "a primitive recursive function is not open"))
            }
            (Label::Open, LabelSource::Conjecture) => {}
            _ => return Err(bad(p, "label and source do not match")),
        }
    }
    Ok(())
}

/// Re-confirms labels by running every probe: `halts` must evaluate to its
/// value within `fuel`, and `diverges` must not halt within `fuel`.
pub fn confirm_labels(entries: &[CorpusEntry], fuel: u64) -> Result<(), CorpusError> {
    let mut evaluators: Vec<(*const DefEnv, Evaluator)> = Vec::new();
    for e in entries {
        for p in &e.probes {
            let bad = |msg: String| CorpusError::Inconsistent { entry: e.name.clone(), input: p.input.clone(), msg };
            let got: Option<Nat> = match &e.subject {
                Subject::Rf { expr, env } => {
                    let key = Arc::as_ptr(env);
                    let ev = match evaluators.iter().position(|(k, _)| *k == key) {
                        Some(i) => &mut evaluators[i].1,
                        None => {
                            evaluators.push((key, Evaluator::new(env)));
                            &mut evaluators.last_mut().expect("just pushed").1
                        }
                    };
                    match ev.eval(expr, &p.input, fuel).map_err(|err| bad(err.to_string()))? {
                        EvalOutcome::Defined { value, .. } => Some(value),
                        EvalOutcome::ProvenUndefined { .. } => None,
                        EvalOutcome::Exhausted { .. } if matches!(p.label, Label::Halts { .. }) => {
                            return Err(bad("did not halt within the fuel".into()))
                        }
                        EvalOutcome::Exhausted { .. } => None,
                    }
                }
                Subject::Program(prog) => {
                    let words = p.input.iter().map(Nat::to_u64).collect::<Option<Vec<_>>>();
                    let words = words.ok_or_else(|| bad("input too large for a register".into()))?;
                    let r = run(prog, &words, fuel, false).map_err(|err| bad(err.to_string()))?;
                    if r.output().is_none() && matches!(p.label, Label::Halts { .. }) {
                        return Err(bad("did not halt within the fuel".into()));
                    }
                    r.output().map(Nat::from)
                }
            };
            match (&p.label, got) {
                (Label::Halts { value }, Some(v)) if *value == v => {}
                (Label::Halts { value }, Some(v)) => return Err(bad(format!("labelled {value}, computed {v}"))),
                (Label::Halts { .. }, None) => return Err(bad("labelled halting, proven undefined".into())),
                (Label::Diverges, Some(v)) => return Err(bad(format!("labelled divergent, halted with {v}"))),
                (Label::Diverges, None) | (Label::Open, None) => {}
                (Label::Open, Some(v)) => return Err(bad(format!("open entry halted with {v}"))),
            }
        }
    }
    Ok(())
}

/// `load_corpus` followed by [`confirm_labels`].
pub fn load_corpus_confirmed(dir: &Path, fuel: u64) -> Result<Vec<CorpusEntry>, CorpusError> {
    let entries = load_corpus(dir)?;
    confirm_labels(&entries, fuel)?;
    Ok(entries)
}

/// `E(x̄) = 1` iff `∃ y ≤ x_k. P(x̄, y) ≠ 0`, where `P` has arity `k + 1`.
///
/// Built as a bounded search for the first `y` that satisfies `P` or
/// exceeds `x_k`, the property holding iff that `y ≤ x_k`. Uses `nsg`,
/// `disj` and `le` from `env`.
pub fn bounded_exists(pred: &RfExpr, env: &DefEnv) -> Result<RfExpr, RfError> {
    let k = pred.arity().checked_sub(1).filter(|&k| k >= 1).ok_or_else(|| RfError::ArityMismatch {
        expr: pred.to_string(),
        detail: "a bounded quantifier needs a predicate of at least two arguments".into(),
    })?;
    let (nsg, disj, le) = (env.call("nsg")?, env.call("disj")?, env.call("le")?);
    let past = RfExpr::comp(
        le.clone(),
        vec![RfExpr::comp(RfExpr::Succ, vec![RfExpr::proj(k + 1, k)]), RfExpr::proj(k + 1, k + 1)],
    );
    let cond = RfExpr::comp(nsg, vec![RfExpr::comp(disj, vec![past, pred.clone()])]);
    let bound: Nat = QUANTIFIER_BOUND.parse().expect("decimal");
    let wit = RfExpr::Mu { body: Box::new(cond), bound: Some(bound) };
    Ok(RfExpr::comp(le, vec![wit, RfExpr::proj(k, k)]))
}
