//! Diagonal constructions over a finite list of unary functions.
//!
//! `h(i) = g_i(i) + 1`, `θ(i, x)`, `∂(x) = θ(x, x)` and
//! `α(z) = μy[θ(z, z) = 0 ∧ y = y]` are built on the host side from
//! analyzer verdicts. None of them is added to the list: they talk about
//! the list, and a list entry is an expression over naturals.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::eval::{eval, EvalOutcome};
use crate::halt::{Analysis, AnalyzeError, Analyzer, AnalyzerConfig, Mode, ProblemSpec, Target, Verdict};
use crate::nat::Nat;
use crate::rf::{check, DefEnv, RfError, RfExpr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagError {
    #[error("index {index} out of range (list has {len} entries)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("list entry `{0}` is not unary")]
    NotUnary(String),
    #[error("unknown function `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Expr(#[from] RfError),
    #[error(transparent)]
    Analyze(#[from] AnalyzeError),
}

/// `g_0, g_1, ...`: unary expressions over one environment.
#[derive(Debug, Clone)]
pub struct FnList {
    env: DefEnv,
    names: Vec<String>,
    entries: Vec<RfExpr>,
}

impl FnList {
    /// Entries are `(label, expression)`; every expression must be unary.
    pub fn new(env: DefEnv, entries: Vec<(String, RfExpr)>) -> Result<Self, DiagError> {
        let mut names = Vec::new();
        let mut exprs = Vec::new();
        for (n, e) in entries {
            if check(&e, &env)? != 1 {
                return Err(DiagError::NotUnary(n));
            }
            names.push(n);
            exprs.push(e);
        }
        Ok(FnList { env, names, entries: exprs })
    }

    /// The named definitions of `env`, in order.
    pub fn from_names(env: DefEnv, names: &[&str]) -> Result<Self, DiagError> {
        let entries = names
            .iter()
            .map(|n| env.call(n).map(|e| (n.to_string(), e)).map_err(|_| DiagError::Unknown(n.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        FnList::new(env, entries)
    }

    /// Every unary definition of `env`, in definition order.
    pub fn from_env(env: DefEnv) -> Self {
        let names: Vec<String> = env.iter().filter(|d| d.expr.arity() == 1).map(|d| d.name.clone()).collect();
        let entries = names.iter().map(|n| env.call(n).unwrap()).collect();
        FnList { env, names, entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, i: usize) -> &RfExpr {
        &self.entries[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn env(&self) -> &DefEnv {
        &self.env
    }

    /// Identifies the list's contents.
    pub fn fingerprint(&self) -> String {
        self.entries.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(";")
    }

    fn index(&self, i: usize) -> Result<&RfExpr, DiagError> {
        self.entries.get(i).ok_or(DiagError::IndexOutOfRange { index: i, len: self.len() })
    }
}

/// `h(i) = g_i(i) + 1`, or `g_i(i)`'s failure.
pub fn finite_diagonal(list: &FnList, i: usize, config: &AnalyzerConfig) -> Result<EvalOutcome, DiagError> {
    let g = list.index(i)?;
    Ok(match eval(g, &[Nat::from(i)], config.fuel, &list.env).expect("entries are checked") {
        EvalOutcome::Defined { value, steps } => EvalOutcome::Defined { value: value.succ(), steps },
        other => other,
    })
}

/// θ restricted to what the analyzer can decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theta {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "0")]
    Zero,
    Unknown,
}

impl Theta {
    fn of(a: &Analysis) -> Theta {
        match &a.verdict {
            Verdict::Halts { .. } => Theta::One,
            v if v.is_divergence() => Theta::Zero,
            _ => Theta::Unknown,
        }
    }
}

impl fmt::Display for Theta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theta::One => "1",
            Theta::Zero => "0",
            Theta::Unknown => "unknown",
        })
    }
}

fn analyze_entry(list: &FnList, i: usize, x: &Nat, config: &AnalyzerConfig) -> Result<Analysis, DiagError> {
    let g = list.index(i)?;
    let spec = ProblemSpec::rf(g.clone(), &list.env, std::slice::from_ref(x));
    Ok(Analyzer::new(*config).analyze(&spec)?)
}

/// `θ(i, x)`: 1 if `g_i(x)` is shown to halt, 0 if shown to diverge.
pub fn theta_finite(list: &FnList, i: usize, x: &Nat, config: &AnalyzerConfig) -> Result<Theta, DiagError> {
    Ok(Theta::of(&analyze_entry(list, i, x, config)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub index: usize,
    pub name: String,
    /// The analysis of `g_i(i)` backing this row.
    pub analysis: Analysis,
    pub theta: Theta,
    /// The construction's value at `i`, rendered.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagonalReport {
    pub construction: String,
    pub rows: Vec<ReportRow>,
    pub regress_events: usize,
    /// Whether the constructed function occurs among the entries.
    pub in_list: bool,
    pub conclusion: String,
}

fn row(
    list: &FnList,
    i: usize,
    config: &AnalyzerConfig,
    value: impl Fn(Theta) -> String,
) -> Result<ReportRow, DiagError> {
    let analysis = analyze_entry(list, i, &Nat::from(i), config)?;
    let theta = Theta::of(&analysis);
    Ok(ReportRow { index: i, name: list.name(i).to_string(), analysis, theta, value: value(theta) })
}

/// Tabulates `∂(i) = θ(i, i)` and then asks for `∂(∂)`, which the analyzer
/// answers with a regress event instead of recursing forever.
pub fn diag_self_demo(list: &FnList, config: &AnalyzerConfig) -> Result<DiagonalReport, DiagError> {
    let rows = (0..list.len()).map(|i| row(list, i, config, |t| t.to_string())).collect::<Result<Vec<_>, _>>()?;
    let mut analyzer = Analyzer::new(*config);
    let spec = ProblemSpec { target: Target::Diagonal(list.clone()), mode: Mode::OnInput(vec![Nat::from(list.len())]) };
    let selfapp = analyzer.analyze(&spec)?;
    let regress_events = analyzer.regress_events();
    let note = match &selfapp.verdict {
        Verdict::Unknown { note: Some(n), .. } => n.clone(),
        _ => "no regress".into(),
    };
    let conclusion = format!(
        "∂(x) = θ(x, x) is defined over indices of a list of {n} functions, while every entry maps \
         naturals to naturals; ∂ is therefore not one of the entries. Evaluating ∂(∂) asks the \
         analyzer the question it is already answering: {note} ({regress_events} event).",
        n = list.len()
    );
    Ok(DiagonalReport { construction: "diagonal".into(), rows, regress_events, in_list: false, conclusion })
}

/// `α(z)`, computed by actually running the search `μy[c(y) = 0]` where
/// `c` is the constant `θ(z, z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "alpha")]
pub enum Alpha {
    Value { outcome: EvalOutcome },
    Unknown,
}

pub fn alpha(list: &FnList, z: usize, config: &AnalyzerConfig) -> Result<(Theta, Alpha), DiagError> {
    let t = theta_finite(list, z, &Nat::from(z), config)?;
    let c = match t {
        Theta::One => 1,
        Theta::Zero => 0,
        Theta::Unknown => return Ok((t, Alpha::Unknown)),
    };
    let search = RfExpr::mu(RfExpr::comp(RfExpr::constant(c), vec![RfExpr::proj(1, 1)]));
    let outcome = eval(&search, &[], config.fuel, &DefEnv::new()).expect("closed search");
    Ok((t, Alpha::Value { outcome }))
}

fn render_alpha(a: &Alpha) -> String {
    match a {
        Alpha::Value { outcome: EvalOutcome::Defined { value, .. } } => value.to_string(),
        Alpha::Value { outcome: EvalOutcome::ProvenUndefined { reason } } => {
            format!("undefined ({})", serde_json::to_value(reason).unwrap()["kind"].as_str().unwrap_or("?"))
        }
        Alpha::Value { outcome: EvalOutcome::Exhausted { .. } } | Alpha::Unknown => "unknown".into(),
    }
}

pub fn alpha_demo(list: &FnList, z: usize, config: &AnalyzerConfig) -> Result<(DiagonalReport, Alpha), DiagError> {
    let (_, a) = alpha(list, z, config)?;
    let r = row(list, z, config, |_| render_alpha(&a))?;
    let conclusion = match r.theta {
        Theta::One => {
            format!("g_{z}({z}) is defined, so the search condition of α({z}) is never met: α({z}) is undefined.")
        }
        Theta::Zero => format!("g_{z}({z}) is undefined, so y = 0 satisfies the search: α({z}) = 0."),
        Theta::Unknown => format!("θ({z}, {z}) is not decided, and neither is α({z})."),
    };
    let report =
        DiagonalReport { construction: "alpha".into(), rows: vec![r], regress_events: 0, in_list: false, conclusion };
    Ok((report, a))
}

impl fmt::Display for DiagonalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "construction: {}", self.construction)?;
        writeln!(f, "{:>5}  {:<16} {:<22} {:<8} value", "i", "g_i", "verdict on g_i(i)", "theta")?;
        for r in &self.rows {
            let v = match &r.analysis.verdict {
                Verdict::Halts { value, .. } => format!("Halts({value})"),
                Verdict::DivergesPeriodic { .. } => "DivergesPeriodic".into(),
                Verdict::DivergesProven { .. } => "DivergesProven".into(),
                Verdict::NonRecursiveDefinition { .. } => "NonRecursive".into(),
                Verdict::Unknown { .. } => "Unknown".into(),
            };
            writeln!(f, "{:>5}  {:<16} {:<22} {:<8} {}", r.index, r.name, v, r.theta, r.value)?;
        }
        writeln!(f, "regress events: {}", self.regress_events)?;
        writeln!(f, "in list: {}", self.in_list)?;
        write!(f, "{}", self.conclusion)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::UndefReason;
    use crate::recognize::CANONICAL;
    use crate::rf::{parse_into, parse_rf};

    fn basic() -> FnList {
        let env = DefEnv::new();
        FnList::new(
            env,
            vec![
                ("zero".into(), RfExpr::constant(0)),
                ("succ".into(), RfExpr::Succ),
                ("id".into(), RfExpr::proj(1, 1)),
            ],
        )
        .unwrap()
    }

    fn with_search() -> FnList {
        let mut env = parse_rf(CANONICAL).unwrap();
        parse_into(
            "def succ_of = succ
             def id = proj(1,1)
             def g = mu(comp(plus, comp(plus, comp(times, proj(2,2), proj(2,2)), comp(const(1), proj(2,1))), comp(le, proj(2,2), proj(2,1))))",
            &mut env,
        )
        .unwrap();
        FnList::from_names(env, &["succ_of", "id", "g"]).unwrap()
    }

    fn cfg() -> AnalyzerConfig {
        AnalyzerConfig { fuel: 20_000, max_snapshots: 5_000, ..Default::default() }
    }

    #[test]
    fn diagonal_values() {
        let l = basic();
        assert_eq!(finite_diagonal(&l, 0, &cfg()).unwrap().value(), Some(&Nat::from(1u64)));
        assert_eq!(finite_diagonal(&l, 1, &cfg()).unwrap().value(), Some(&Nat::from(3u64)));
        assert_eq!(finite_diagonal(&l, 2, &cfg()).unwrap().value(), Some(&Nat::from(3u64)));
        assert!(matches!(finite_diagonal(&l, 3, &cfg()), Err(DiagError::IndexOutOfRange { index: 3, len: 3 })));
    }

    #[test]
    fn diagonal_differs_at_every_index() {
        let l = basic();
        for i in 0..l.len() {
            let g = eval(l.get(i), &[Nat::from(i)], 1000, l.env()).unwrap();
            assert_ne!(finite_diagonal(&l, i, &cfg()).unwrap().value(), g.value());
        }
    }

    #[test]
    fn theta_on_total_and_empty_search() {
        let l = with_search();
        assert_eq!(theta_finite(&l, 0, &Nat::from(1u64), &cfg()).unwrap(), Theta::One);
        assert_eq!(theta_finite(&l, 2, &Nat::ZERO, &cfg()).unwrap(), Theta::Zero);
    }

    #[test]
    fn self_application_regresses_once() {
        let l = with_search();
        let r = diag_self_demo(&l, &cfg()).unwrap();
        assert_eq!(r.regress_events, 1);
        assert!(!r.in_list);
        for row in &r.rows {
            let t = theta_finite(&l, row.index, &Nat::from(row.index), &cfg()).unwrap();
            assert_eq!(row.theta, t);
            assert_eq!(row.value, t.to_string());
        }
    }

    #[test]
    fn alpha_is_the_converse() {
        let l = with_search();
        let (t, a) = alpha(&l, 0, &cfg()).unwrap();
        assert_eq!(t, Theta::One);
        assert_eq!(
            a,
            Alpha::Value { outcome: EvalOutcome::ProvenUndefined { reason: UndefReason::ConstantFalseCondition } }
        );
        let (t, a) = alpha(&l, 2, &cfg()).unwrap();
        assert_eq!(t, Theta::Zero);
        assert!(matches!(a, Alpha::Value { outcome: EvalOutcome::Defined { ref value, .. } } if value.is_zero()));
    }

    #[test]
    fn non_unary_entries_are_rejected() {
        let env = parse_rf(CANONICAL).unwrap();
        assert!(matches!(FnList::from_names(env, &["plus"]), Err(DiagError::NotUnary(_))));
    }

    #[test]
    fn report_is_deterministic() {
        let l = with_search();
        let a = serde_json::to_string(&diag_self_demo(&l, &cfg()).unwrap()).unwrap();
        let b = serde_json::to_string(&diag_self_demo(&l, &cfg()).unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
