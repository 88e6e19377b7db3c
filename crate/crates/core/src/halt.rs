//! The halting analyzer: a sound, incomplete decision procedure for
//! "does this computation halt", reporting how certain the answer is.
//!
//! Every `Halts` and `Diverges*` verdict is backed by evidence that can be
//! re-checked: a value, a repeating snapshot pair, or an undefinedness
//! certificate. Anything else is `Unknown`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::compile::compile;
use crate::diagonal::FnList;
use crate::eval::{EvalOutcome, Evaluator, UndefReason};
use crate::imp::{ImpProgram, MachineError, Snapshot};
use crate::nat::Nat;
use crate::poly::prove_empty_search;
use crate::recognize::recognize;
use crate::rf::{check, is_primitive_recursive, DefEnv, RfExpr};

/// Advisory attached to some `Unknown` verdicts: a loop revisited with
/// every register at least as large and the same zero pattern. Suggestive of
/// unbounded growth, but not a proof.
pub const MONOTONE_ADVISORY: &str = "suspect: B.1";
/// Note on the `Unknown` produced when an analysis re-enters itself.
pub const REGRESS_NOTE: &str = "infinite regress";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    Halts {
        value: Nat,
        steps: u64,
    },
    DivergesPeriodic {
        start: u64,
        period: u64,
    },
    DivergesProven {
        reason: UndefReason,
    },
    NonRecursiveDefinition {
        explanation: String,
    },
    Unknown {
        fuel_spent: u64,
        snapshots_checked: u64,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        note: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        advisory: Option<String>,
    },
}

impl Verdict {
    pub fn is_decided(&self) -> bool {
        matches!(self, Verdict::Halts { .. } | Verdict::DivergesPeriodic { .. } | Verdict::DivergesProven { .. })
    }

    pub fn is_divergence(&self) -> bool {
        matches!(self, Verdict::DivergesPeriodic { .. } | Verdict::DivergesProven { .. })
    }

    fn unknown(fuel_spent: u64, snapshots_checked: u64) -> Verdict {
        Verdict::Unknown { fuel_spent, snapshots_checked, note: None, advisory: None }
    }
}

/// How much is known about definedness at a point:
/// 1 total by construction, 2 shown defined, 3 shown undefined, 4 open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Degree {
    Total = 1,
    ShownDefined = 2,
    ShownUndefined = 3,
    Open = 4,
}

impl From<Degree> for u8 {
    fn from(d: Degree) -> u8 {
        d as u8
    }
}

impl TryFrom<u8> for Degree {
    type Error = String;
    fn try_from(v: u8) -> Result<Self, String> {
        match v {
            1 => Ok(Degree::Total),
            2 => Ok(Degree::ShownDefined),
            3 => Ok(Degree::ShownUndefined),
            4 => Ok(Degree::Open),
            _ => Err(format!("degree must be 1..4, got {v}")),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// A verdict with its degree. Definition-level rejections carry no degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Analysis {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub degree: Option<Degree>,
}

impl Analysis {
    fn new(verdict: Verdict, degree: Degree) -> Self {
        Analysis { verdict, degree: Some(degree) }
    }

    /// The pairing rules between degrees and verdicts.
    pub fn is_consistent(&self, primitive_recursive: bool) -> bool {
        match (self.degree, &self.verdict) {
            (None, Verdict::NonRecursiveDefinition { .. }) => true,
            (None, _) | (Some(_), Verdict::NonRecursiveDefinition { .. }) => false,
            (Some(Degree::Total), v) => primitive_recursive && !v.is_divergence(),
            (Some(Degree::ShownDefined), v) => matches!(v, Verdict::Halts { .. }),
            (Some(Degree::ShownUndefined), v) => v.is_divergence(),
            (Some(Degree::Open), v) => matches!(v, Verdict::Unknown { .. }),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Target {
    Program(ImpProgram),
    Rf {
        expr: RfExpr,
        env: DefEnv,
    },
    /// `∂(n) = θ(n, n)` over a finite list. The argument `list.len()`
    /// stands for `∂` itself, so `∂(∂)` can be asked.
    Diagonal(FnList),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    OnInput(Vec<Nat>),
    OnAnyInput,
    OnEveryInput,
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub target: Target,
    pub mode: Mode,
}

impl ProblemSpec {
    pub fn rf(expr: RfExpr, env: &DefEnv, args: &[Nat]) -> Self {
        ProblemSpec { target: Target::Rf { expr, env: env.clone() }, mode: Mode::OnInput(args.to_vec()) }
    }

    pub fn program(p: ImpProgram, inputs: &[u64]) -> Self {
        let args = inputs.iter().map(|&v| Nat::from(v)).collect();
        ProblemSpec { target: Target::Program(p), mode: Mode::OnInput(args) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CycleMode {
    /// Two pointers, constant memory.
    #[default]
    Floyd,
    /// Remembers every snapshot seen; finds the first repeat directly.
    Hash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzerConfig {
    /// Evaluator fuel, and machine steps for direct runs.
    pub fuel: u64,
    /// Snapshot budget for cycle detection.
    pub max_snapshots: u64,
    pub root_search: bool,
    pub cycle_mode: CycleMode,
}

impl Default for AnalyzerConfig {
    fn default() -> Self {
        AnalyzerConfig { fuel: 1_000_000, max_snapshots: 100_000, root_search: true, cycle_mode: CycleMode::Floyd }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalyzeError {
    #[error("expected {expected} input(s), got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("ill-formed expression: {0}")]
    Expr(#[from] crate::rf::RfError),
    #[error("{0}")]
    Machine(#[from] MachineError),
    #[error("diagonal argument {index} out of range (list has {len} entries)")]
    IndexOutOfRange { index: String, len: usize },
}

/// Analyzes one problem. Every call gets a fresh context stack.
pub fn analyze(spec: &ProblemSpec, config: &AnalyzerConfig) -> Result<Analysis, AnalyzeError> {
    Analyzer::new(*config).analyze(spec)
}

/// Carries the stack of analyses in progress, so that a request that
/// re-enters an analysis already underway is answered instead of looped on.
pub struct Analyzer {
    config: AnalyzerConfig,
    stack: Vec<String>,
    regress_events: usize,
}

impl Analyzer {
    pub fn new(config: AnalyzerConfig) -> Self {
        Analyzer { config, stack: Vec::new(), regress_events: 0 }
    }

    pub fn config(&self) -> &AnalyzerConfig {
        &self.config
    }

    /// Number of re-entrant requests answered with [`REGRESS_NOTE`].
    pub fn regress_events(&self) -> usize {
        self.regress_events
    }

    pub fn analyze(&mut self, spec: &ProblemSpec) -> Result<Analysis, AnalyzeError> {
        let args = match &spec.mode {
            Mode::OnInput(a) => a,
            Mode::OnAnyInput | Mode::OnEveryInput => {
                return Ok(Analysis { verdict: non_recursive(&spec.mode), degree: None });
            }
        };
        let (a, primrec) = match &spec.target {
            Target::Program(p) => (self.program(p, args)?, false),
            Target::Rf { expr, env } => {
                check(expr, env)?;
                let pr = is_primitive_recursive(expr, env);
                (self.rf(expr, env, args)?, pr)
            }
            Target::Diagonal(list) => (self.diagonal(list, args)?, false),
        };
        assert!(a.is_consistent(primrec), "degree/verdict mismatch: {a:?}");
        Ok(a)
    }

    fn program(&mut self, p: &ImpProgram, args: &[Nat]) -> Result<Analysis, AnalyzeError> {
        let inputs = machine_inputs(args)?;
        let r = crate::imp::run(p, &inputs, self.config.fuel, false)?;
        if let crate::imp::RunStatus::Halted { output, steps } = r.status {
            return Ok(Analysis::new(Verdict::Halts { value: Nat::from(output), steps }, Degree::ShownDefined));
        }
        let fuel_spent = r.steps();
        if let Some(v) = self.cycle(p, &inputs)? {
            return Ok(v);
        }
        let advisory = monotone_growth(p, &inputs, self.config.max_snapshots)?;
        Ok(Analysis::new(
            Verdict::Unknown {
                fuel_spent,
                snapshots_checked: self.config.max_snapshots,
                note: None,
                advisory: advisory.then(|| MONOTONE_ADVISORY.to_string()),
            },
            Degree::Open,
        ))
    }

    fn cycle(&self, p: &ImpProgram, inputs: &[u64]) -> Result<Option<Analysis>, AnalyzeError> {
        let found = match self.config.cycle_mode {
            CycleMode::Floyd => detect_cycle(p, inputs, self.config.max_snapshots)?,
            CycleMode::Hash => detect_cycle_hashed(p, inputs, self.config.max_snapshots)?,
        };
        Ok(found
            .map(|(start, period)| Analysis::new(Verdict::DivergesPeriodic { start, period }, Degree::ShownUndefined)))
    }

    fn rf(&mut self, expr: &RfExpr, env: &DefEnv, args: &[Nat]) -> Result<Analysis, AnalyzeError> {
        if expr.arity() != args.len() {
            return Err(AnalyzeError::InputCount { expected: expr.arity(), got: args.len() });
        }
        let mut ev = Evaluator::new(env);
        let out = ev.eval(expr, args, self.config.fuel).expect("checked above");
        let primrec = is_primitive_recursive(expr, env);
        let fuel_spent = match out {
            EvalOutcome::Defined { value, steps } => {
                let d = if primrec { Degree::Total } else { Degree::ShownDefined };
                return Ok(Analysis::new(Verdict::Halts { value, steps }, d));
            }
            EvalOutcome::ProvenUndefined { reason } => {
                return Ok(Analysis::new(Verdict::DivergesProven { reason }, Degree::ShownUndefined));
            }
            EvalOutcome::Exhausted { fuel_spent } => fuel_spent,
        };
        if primrec {
            // total by construction; the value is merely out of reach
            return Ok(Analysis::new(Verdict::unknown(fuel_spent, 0), Degree::Total));
        }
        let inputs: Option<Vec<u64>> = args.iter().map(Nat::to_u64).collect();
        let mut snapshots = 0;
        let mut advisory = false;
        if let Some(inputs) = &inputs {
            let p = compile(expr, env);
            if let Some(v) = self.cycle(&p, inputs)? {
                return Ok(v);
            }
            snapshots = self.config.max_snapshots;
            advisory = monotone_growth(&p, inputs, self.config.max_snapshots)?;
        }
        if self.config.root_search {
            if let Some(reason) = polynomial_search_is_empty(expr, env, args) {
                return Ok(Analysis::new(Verdict::DivergesProven { reason }, Degree::ShownUndefined));
            }
        }
        Ok(Analysis::new(
            Verdict::Unknown {
                fuel_spent,
                snapshots_checked: snapshots,
                note: None,
                advisory: advisory.then(|| MONOTONE_ADVISORY.to_string()),
            },
            Degree::Open,
        ))
    }

    fn diagonal(&mut self, list: &FnList, args: &[Nat]) -> Result<Analysis, AnalyzeError> {
        if args.len() != 1 {
            return Err(AnalyzeError::InputCount { expected: 1, got: args.len() });
        }
        let n = &args[0];
        let key = format!("diagonal:{}:{n}", list.fingerprint());
        if self.stack.contains(&key) {
            self.regress_events += 1;
            return Ok(regress());
        }
        let index = n
            .to_u64()
            .map(|i| i as usize)
            .filter(|&i| i <= list.len())
            .ok_or_else(|| AnalyzeError::IndexOutOfRange { index: n.to_string(), len: list.len() })?;
        self.stack.push(key);
        let r = if index == list.len() {
            // ∂(∂) = θ(∂, ∂): the same question again
            self.diagonal(list, args)
        } else {
            let inner = ProblemSpec::rf(list.get(index).clone(), list.env(), std::slice::from_ref(n));
            self.analyze(&inner).map(|a| theta(&a))
        };
        self.stack.pop();
        r
    }
}

fn regress() -> Analysis {
    Analysis::new(
        Verdict::Unknown { fuel_spent: 0, snapshots_checked: 0, note: Some(REGRESS_NOTE.into()), advisory: None },
        Degree::Open,
    )
}

/// θ read off an analysis: 1 when it halts, 0 when it provably does not.
fn theta(a: &Analysis) -> Analysis {
    match &a.verdict {
        Verdict::Halts { steps, .. } => {
            Analysis::new(Verdict::Halts { value: Nat::from(1u64), steps: *steps }, Degree::ShownDefined)
        }
        v if v.is_divergence() => Analysis::new(Verdict::Halts { value: Nat::ZERO, steps: 0 }, Degree::ShownDefined),
        Verdict::Unknown { note: Some(n), .. } if n == REGRESS_NOTE => regress(),
        Verdict::Unknown { fuel_spent, snapshots_checked, .. } => {
            Analysis::new(Verdict::unknown(*fuel_spent, *snapshots_checked), Degree::Open)
        }
        _ => Analysis::new(Verdict::unknown(0, 0), Degree::Open),
    }
}

fn non_recursive(mode: &Mode) -> Verdict {
    let q = match mode {
        Mode::OnAnyInput => "halts on some input",
        _ => "halts on every input",
    };
    Verdict::NonRecursiveDefinition {
        explanation: format!(
            "the question whether the target {q} quantifies over all naturals; \
             it is not a recursive definition, so nothing is run"
        ),
    }
}

fn machine_inputs(args: &[Nat]) -> Result<Vec<u64>, MachineError> {
    args.iter().map(|a| a.to_u64().ok_or_else(|| MachineError::InputTooLarge(a.to_string()))).collect()
}

/// Resolves calls at the root and, if the expression is an unbounded search
/// over a recognizable polynomial body, tries to certify that it is empty.
fn polynomial_search_is_empty(expr: &RfExpr, env: &DefEnv, args: &[Nat]) -> Option<UndefReason> {
    let mut e = expr;
    while let RfExpr::Call { name, .. } = e {
        e = env.get(name)?;
    }
    let RfExpr::Mu { body, bound: None } = e else {
        return None;
    };
    let search = recognize(body, args, env)?;
    search
        .equations
        .iter()
        .find_map(|p| prove_empty_search(p, &search.lower))
        .map(|certificate| UndefReason::NoIntegerRoot { certificate })
}

/// Floyd's two-pointer search over the snapshot sequence `s_0, s_1, ...`.
/// Returns the first index `start` that recurs and the least `period` with
/// `s_start = s_{start+period}`, provided a repeat shows up with the slow
/// pointer within `max_steps`. `None` if the program halts or no repeat is
/// found in time.
pub fn detect_cycle(program: &ImpProgram, inputs: &[u64], max_steps: u64) -> Result<Option<(u64, u64)>, MachineError> {
    let x0 = program.initial(inputs)?;
    let mut slow = x0.clone();
    let mut fast = x0.clone();
    let mut meet = false;
    for _ in 0..max_steps {
        for _ in 0..2 {
            if program.is_halted(&fast) {
                return Ok(None);
            }
            program.step_mut(&mut fast);
        }
        program.step_mut(&mut slow);
        if slow == fast {
            meet = true;
            break;
        }
    }
    if !meet {
        return Ok(None);
    }
    let mut start = 0u64;
    let mut a = x0;
    while a != slow {
        program.step_mut(&mut a);
        program.step_mut(&mut slow);
        start += 1;
    }
    let mut period = 1u64;
    let mut b = a.clone();
    program.step_mut(&mut b);
    while b != a {
        program.step_mut(&mut b);
        period += 1;
    }
    Ok(Some((start, period)))
}

/// Same answer as [`detect_cycle`], found by remembering every snapshot
/// among the first `max_steps + 1`.
pub fn detect_cycle_hashed(
    program: &ImpProgram,
    inputs: &[u64],
    max_steps: u64,
) -> Result<Option<(u64, u64)>, MachineError> {
    let mut s = program.initial(inputs)?;
    let mut seen: HashMap<Snapshot, u64> = HashMap::new();
    for i in 0..=max_steps.saturating_mul(2) {
        if let Some(&j) = seen.get(&s) {
            return Ok(Some((j, i - j)));
        }
        if program.is_halted(&s) {
            return Ok(None);
        }
        seen.insert(s.clone(), i);
        program.step_mut(&mut s);
    }
    Ok(None)
}

/// Re-simulates and compares `s_start` with `s_{start+period}`.
pub fn verify_period(program: &ImpProgram, inputs: &[u64], start: u64, period: u64) -> Result<bool, MachineError> {
    if period == 0 {
        return Ok(false);
    }
    let mut s = program.initial(inputs)?;
    for _ in 0..start {
        if program.is_halted(&s) {
            return Ok(false);
        }
        program.step_mut(&mut s);
    }
    let first = s.clone();
    for _ in 0..period {
        if program.is_halted(&s) {
            return Ok(false);
        }
        program.step_mut(&mut s);
    }
    Ok(s == first)
}

/// The growth heuristic behind [`MONOTONE_ADVISORY`]: some instruction is
/// revisited with every register at least as large, at least one strictly
/// larger, and the same set of zero registers.
fn monotone_growth(program: &ImpProgram, inputs: &[u64], max_steps: u64) -> Result<bool, MachineError> {
    let mut s = program.initial(inputs)?;
    let mut last: HashMap<usize, Vec<u64>> = HashMap::new();
    for _ in 0..max_steps {
        if program.is_halted(&s) {
            return Ok(false);
        }
        if let Some(prev) = last.get(&s.pc) {
            let grows = prev.iter().zip(&s.vars).all(|(a, b)| a <= b && (*a == 0) == (*b == 0)) && prev != &s.vars;
            if grows {
                return Ok(true);
            }
        }
        last.insert(s.pc, s.vars.clone());
        program.step_mut(&mut s);
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::nats;
    use crate::imp::parse_imp;
    use crate::recognize::CANONICAL;
    use crate::rf::{parse_into, parse_rf};

    fn arith(extra: &str) -> DefEnv {
        let mut env = parse_rf(CANONICAL).unwrap();
        parse_into(extra, &mut env).unwrap();
        env
    }

    fn on(env: &DefEnv, name: &str, args: &[u64]) -> Analysis {
        analyze(&ProblemSpec::rf(env.call(name).unwrap(), env, &nats(args)), &AnalyzerConfig::default()).unwrap()
    }

    #[test]
    fn plus_is_degree_one() {
        let env = arith("");
        let a = on(&env, "plus", &[2, 3]);
        assert_eq!(a.degree, Some(Degree::Total));
        assert!(matches!(a.verdict, Verdict::Halts { ref value, .. } if *value == Nat::from(5u64)));
    }

    #[test]
    fn general_recursive_point_that_halts_is_degree_two() {
        let env = arith("def s = mu(comp(absdiff, proj(2,2), comp(const(3), proj(2,1))))");
        let a = on(&env, "s", &[9]);
        assert_eq!(a.degree, Some(Degree::ShownDefined));
        assert_eq!(
            a.verdict,
            Verdict::Halts {
                value: Nat::from(3u64),
                steps: match a.verdict {
                    Verdict::Halts { steps, .. } => steps,
                    _ => unreachable!(),
                }
            }
        );
    }

    #[test]
    fn polynomial_without_roots_above_limit() {
        // g(y) = μx[x² + 1 = 0 ∧ x > y]
        let env = arith(
            "def g = mu(comp(plus, comp(plus, comp(times, proj(2,2), proj(2,2)), comp(const(1), proj(2,1))), comp(le, proj(2,2), proj(2,1))))",
        );
        let a = on(&env, "g", &[0]);
        assert_eq!(a.degree, Some(Degree::ShownUndefined));
        let Verdict::DivergesProven { reason: UndefReason::NoIntegerRoot { certificate } } = &a.verdict else {
            panic!("{a:?}")
        };
        assert!(certificate.verify());
        assert_eq!(certificate.bound, 2.into());
        assert!(certificate.roots.is_empty());
    }

    #[test]
    fn root_below_limit_only() {
        // μx[x = 3 ∧ x > y]
        let env = arith(
            "def h = mu(comp(plus, comp(absdiff, proj(2,2), comp(const(3), proj(2,1))), comp(le, proj(2,2), proj(2,1))))",
        );
        assert!(matches!(on(&env, "h", &[5]).verdict, Verdict::DivergesProven { .. }));
        assert!(matches!(on(&env, "h", &[1]).verdict, Verdict::Halts { .. }));
    }

    #[test]
    fn root_search_can_be_switched_off() {
        let env = arith("def f = mu(comp(plus, comp(times, proj(1,1), proj(1,1)), const(1)))");
        let cfg = AnalyzerConfig { root_search: false, fuel: 10_000, max_snapshots: 1_000, ..Default::default() };
        let a = analyze(&ProblemSpec::rf(env.call("f").unwrap(), &env, &[]), &cfg).unwrap();
        assert_eq!(a.degree, Some(Degree::Open));
    }

    #[test]
    fn self_loop_is_periodic() {
        let p = parse_imp("INPUTS 1\n[A] IFNZ X1 GOTO A\n").unwrap();
        let a = analyze(&ProblemSpec::program(p.clone(), &[1]), &AnalyzerConfig::default()).unwrap();
        assert_eq!(a.verdict, Verdict::DivergesPeriodic { start: 0, period: 1 });
        assert_eq!(a.degree, Some(Degree::ShownUndefined));
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"verdict":"DivergesPeriodic","start":0,"period":1,"degree":3}"#
        );
    }

    #[test]
    fn flip_flop_loops() {
        // goto ping-pong: states alternate between two instructions
        let p = parse_imp("INPUTS 1\n[A] IFNZ X1 GOTO B\n[B] IFNZ X1 GOTO A\n").unwrap();
        assert_eq!(detect_cycle(&p, &[1], 100).unwrap(), Some((0, 2)));
        // INC then DEC of one register inside a jump loop: three instructions per turn
        let p = parse_imp("INPUTS 0\nINC Z1\n[A] INC Z2\nDEC Z2\nIFNZ Z1 GOTO A\n").unwrap();
        assert_eq!(detect_cycle(&p, &[], 100).unwrap(), Some((1, 3)));
        assert!(verify_period(&p, &[], 1, 3).unwrap());
        assert!(!verify_period(&p, &[], 1, 2).unwrap());
    }

    #[test]
    fn halting_program_has_no_cycle() {
        let p = parse_imp("INPUTS 1\nINC Y\nHALT\n").unwrap();
        assert_eq!(detect_cycle(&p, &[4], 100).unwrap(), None);
        assert_eq!(detect_cycle_hashed(&p, &[4], 100).unwrap(), None);
    }

    #[test]
    fn floyd_and_hash_modes_agree() {
        let progs = [
            "INPUTS 1\n[A] IFNZ X1 GOTO A\n",
            "INPUTS 0\nINC Z1\nINC Z1\nINC Z1\n[A] DEC Z1\nIFNZ Z1 GOTO A\n[B] INC Z2\nDEC Z2\nIFNZ Z3 GOTO B\nINC Z3\nIFNZ Z3 GOTO B\n",
            "INPUTS 1\n[A] DEC X1\nIFNZ X1 GOTO A\nINC Z4\n[B] INC Z1\nINC Z2\nDEC Z1\nDEC Z2\nIFNZ Z4 GOTO B\n",
        ];
        for src in progs {
            let p = parse_imp(src).unwrap();
            let ins: Vec<u64> = vec![5; p.inputs()];
            let f = detect_cycle(&p, &ins, 1000).unwrap();
            let h = detect_cycle_hashed(&p, &ins, 1000).unwrap();
            assert!(f.is_some());
            assert_eq!(f, h, "{src}");
            let (s, q) = f.unwrap();
            assert!(verify_period(&p, &ins, s, q).unwrap());
        }
    }

    #[test]
    fn growing_loop_is_unknown_with_advisory() {
        let p = parse_imp("INPUTS 0\nINC Z1\n[A] INC Y\nIFNZ Z1 GOTO A\n").unwrap();
        let cfg = AnalyzerConfig { fuel: 1000, max_snapshots: 1000, ..Default::default() };
        let a = analyze(&ProblemSpec::program(p, &[]), &cfg).unwrap();
        assert_eq!(a.degree, Some(Degree::Open));
        let Verdict::Unknown { advisory, .. } = a.verdict else { panic!() };
        assert_eq!(advisory.as_deref(), Some(MONOTONE_ADVISORY));
    }

    #[test]
    fn quantified_modes_are_rejected_without_running() {
        let env = arith("def f = mu(proj(2,2))");
        for mode in [Mode::OnAnyInput, Mode::OnEveryInput] {
            let spec = ProblemSpec { target: Target::Rf { expr: env.call("f").unwrap(), env: env.clone() }, mode };
            let a = analyze(&spec, &AnalyzerConfig::default()).unwrap();
            assert!(matches!(a.verdict, Verdict::NonRecursiveDefinition { .. }));
            assert_eq!(a.degree, None);
        }
    }

    #[test]
    fn bounded_search_exhaustion() {
        let env = DefEnv::new();
        let e = RfExpr::bounded_mu(RfExpr::comp(RfExpr::constant(1), vec![RfExpr::proj(1, 1)]), 50);
        let a = analyze(&ProblemSpec::rf(e, &env, &[]), &AnalyzerConfig::default()).unwrap();
        assert_eq!(
            a.verdict,
            Verdict::DivergesProven { reason: UndefReason::BoundedSearchExhausted { bound: Nat::from(50u64) } }
        );
    }

    #[test]
    fn input_count_is_checked() {
        let env = arith("");
        let r = analyze(&ProblemSpec::rf(env.call("plus").unwrap(), &env, &nats(&[1])), &AnalyzerConfig::default());
        assert!(matches!(r, Err(AnalyzeError::InputCount { expected: 2, got: 1 })));
    }

    #[test]
    fn degree_json_is_a_number() {
        assert_eq!(serde_json::to_string(&Degree::Open).unwrap(), "4");
        assert_eq!(serde_json::from_str::<Degree>("2").unwrap(), Degree::ShownDefined);
        assert!(serde_json::from_str::<Degree>("5").is_err());
    }
}
