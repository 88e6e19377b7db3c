//! Proofs in the equational arithmetic, the checker `Pf`, proof emission
//! from evaluation, and the `IsDef` search.
//!
//! Rules (line references are 1-based and must point backwards):
//!
//! * `DefiningEquation`: an instance, at numeral arguments, of the defining
//!   equation of a function symbol. For a search symbol `f = μ body` the
//!   line is `f(a) = z` and its references are lines `body(a, i) = v_i` for
//!   `i = 0..=z`, with `v_i ≠ 0` for `i < z` and `v_z = 0`.
//! * `Reflexivity`: `t = t`.
//! * `Symmetry(l)`: from `s = t`, `t = s`.
//! * `Transitivity(l, m)`: from `r = s` and `s = t`, `r = t`.
//! * `Congruence(l, p)`: from `s = t`, `F(.., s, ..) = F(.., t, ..)` with the
//!   replaced argument at position `p` (1-based; `S` has position 1).
//! * `ExistsIntro(l, w)`: from `t = w`, `∃v (t = v)`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::code::{
    code_of_symbols, formula_symbols, ref_code, rule_code, symbols_of_code, term_symbols, CodeError, GNum, Reader,
};
use super::code::{decode, encode_term, sub, Syntax};
use super::sig::{Node, Signature};
use super::syntax::{parse_formula, parse_term, Formula, Term};
use crate::eval::{eval, EvalError, EvalOutcome};
use crate::nat::Nat;
use crate::rf::{parse_expr, DefEnv, RfExpr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    DefiningEquation { refs: Vec<usize> },
    Reflexivity,
    Symmetry(usize),
    Transitivity(usize, usize),
    Congruence { line: usize, position: usize },
    ExistsIntro { line: usize, witness: Term },
}

impl Rule {
    fn number(&self) -> u64 {
        match self {
            Rule::DefiningEquation { .. } => 0,
            Rule::Reflexivity => 1,
            Rule::Symmetry(_) => 2,
            Rule::Transitivity(..) => 3,
            Rule::Congruence { .. } => 4,
            Rule::ExistsIntro { .. } => 5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Rule::DefiningEquation { .. } => "DefiningEquation",
            Rule::Reflexivity => "Reflexivity",
            Rule::Symmetry(_) => "Symmetry",
            Rule::Transitivity(..) => "Transitivity",
            Rule::Congruence { .. } => "Congruence",
            Rule::ExistsIntro { .. } => "ExistsIntro",
        }
    }

    pub fn refs(&self) -> Vec<usize> {
        match self {
            Rule::DefiningEquation { refs } => refs.clone(),
            Rule::Reflexivity => vec![],
            Rule::Symmetry(l) | Rule::Congruence { line: l, .. } | Rule::ExistsIntro { line: l, .. } => vec![*l],
            Rule::Transitivity(a, b) => vec![*a, *b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub formula: Formula,
    pub rule: Rule,
}

/// A proof. `main` is the definition of the `main` symbol when the proved
/// expression was not a named function.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Proof {
    pub lines: Vec<Line>,
    pub main: Option<RfExpr>,
}

impl Proof {
    pub fn conclusion(&self) -> Option<&Formula> {
        self.lines.last().map(|l| &l.formula)
    }

    pub fn signature(&self, env: &DefEnv) -> Signature {
        let mut sig = Signature::from_env(env);
        if let Some(m) = &self.main {
            sig.add_root(m);
        }
        sig
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct CheckError {
    /// 1-based; 0 when the proof as a whole is at fault.
    pub line: usize,
    pub msg: String,
}

fn wf_term(t: &Term, sig: &Signature) -> Result<(), String> {
    match t {
        Term::Zero | Term::Var(_) => Ok(()),
        Term::Succ(_, inner) => wf_term(inner, sig),
        Term::App(f, args) => {
            let i = sig.index_of(f).ok_or_else(|| format!("unknown function `{f}`"))?;
            if sig.arity(i) != args.len() {
                return Err(format!("`{f}` takes {} argument(s)", sig.arity(i)));
            }
            args.iter().try_for_each(|a| wf_term(a, sig))
        }
    }
}

fn wf_formula(f: &Formula, sig: &Signature) -> Result<(), String> {
    match f {
        Formula::Eq(a, b) | Formula::NegIsDef(a, b) => {
            wf_term(a, sig)?;
            wf_term(b, sig)
        }
        Formula::ExistsEq { var, lhs } => {
            if lhs.contains_var(var) {
                return Err(format!("`{var}` is free on the left of its own equation"));
            }
            wf_term(lhs, sig)
        }
    }
}

fn nums(args: &[Nat]) -> Vec<Term> {
    args.iter().map(Term::num).collect()
}

/// The right-hand side of the defining equation of symbol `f` at numeral
/// arguments, for every symbol except searches.
fn defining_rhs(sig: &Signature, f: usize, args: &[Nat]) -> Result<Term, String> {
    let sym = sig.symbol(f);
    let a = nums(args);
    Ok(match &sym.node {
        Node::Zero => Term::Zero,
        Node::Const(k) => Term::num(k),
        Node::Succ => Term::num(&args[0].succ()),
        Node::Proj(i) => a[i - 1].clone(),
        Node::Call(c) => Term::App(sig.name(*c).into(), a),
        Node::Compose(h, gs) => {
            Term::App(sig.name(*h).into(), gs.iter().map(|&g| Term::App(sig.name(g).into(), a.clone())).collect())
        }
        Node::PrimRec(b, s) => {
            let (init, last) = a.split_at(a.len() - 1);
            let n = &args[args.len() - 1];
            if n.is_zero() {
                Term::App(sig.name(*b).into(), init.to_vec())
            } else {
                let m = Term::num(&n.pred());
                let mut prev = init.to_vec();
                prev.push(m.clone());
                let mut sargs = prev.clone();
                sargs.push(Term::App(sym.name.clone(), prev));
                let _ = last;
                Term::App(sig.name(*s).into(), sargs)
            }
        }
        Node::Mu(..) => return Err("search symbols have no closed defining equation".into()),
    })
}

fn numeral_args(t: &Term, sig: &Signature) -> Option<(usize, Vec<Nat>)> {
    let Term::App(f, args) = t else { return None };
    let i = sig.index_of(f)?;
    let vals = args.iter().map(Term::as_numeral).collect::<Option<Vec<_>>>()?;
    Some((i, vals))
}

fn check_line(lines: &[Line], k: usize, sig: &Signature) -> Result<(), String> {
    let line = &lines[k];
    wf_formula(&line.formula, sig)?;
    let get = |r: usize| -> Result<&Formula, String> {
        if r == 0 || r > k {
            return Err(format!("reference {r} does not point to an earlier line"));
        }
        Ok(&lines[r - 1].formula)
    };
    let eq = |f: &Formula| -> Result<(Term, Term), String> {
        match f {
            Formula::Eq(a, b) => Ok((a.clone(), b.clone())),
            _ => Err("referenced line is not an equation".into()),
        }
    };
    match (&line.rule, &line.formula) {
        (Rule::Reflexivity, Formula::Eq(a, b)) if a == b => Ok(()),
        (Rule::Symmetry(l), Formula::Eq(a, b)) => {
            let (s, t) = eq(get(*l)?)?;
            if (a, b) == (&t, &s) {
                Ok(())
            } else {
                Err("not the reverse of the referenced equation".into())
            }
        }
        (Rule::Transitivity(l, m), Formula::Eq(a, b)) => {
            let (r, s) = eq(get(*l)?)?;
            let (s2, t) = eq(get(*m)?)?;
            if s != s2 {
                return Err("middle terms differ".into());
            }
            if (a, b) != (&r, &t) {
                return Err("conclusion does not chain the two equations".into());
            }
            Ok(())
        }
        (Rule::Congruence { line: l, position }, Formula::Eq(lhs, rhs)) => {
            let (s, t) = eq(get(*l)?)?;
            let p = position.checked_sub(1).ok_or("positions start at 1")?;
            match (lhs, rhs) {
                (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() && p < xs.len() => {
                    let others_same = xs.iter().zip(ys).enumerate().all(|(i, (x, y))| i == p || x == y);
                    if others_same && xs[p] == s && ys[p] == t {
                        Ok(())
                    } else {
                        Err(format!("not obtained by replacing argument {position}"))
                    }
                }
                (Term::Succ(..), Term::Succ(..)) if p == 0 => {
                    if lhs.unsucc() == Some(s) && rhs.unsucc() == Some(t) {
                        Ok(())
                    } else {
                        Err("not obtained by replacing the argument of S".into())
                    }
                }
                _ => Err("congruence needs matching applications".into()),
            }
        }
        (Rule::ExistsIntro { line: l, witness }, Formula::ExistsEq { lhs, .. }) => {
            let (t, w) = eq(get(*l)?)?;
            if &t == lhs && &w == witness {
                Ok(())
            } else {
                Err("referenced line is not an instance with this witness".into())
            }
        }
        (Rule::DefiningEquation { refs }, Formula::Eq(lhs, rhs)) => {
            let (f, args) = numeral_args(lhs, sig).ok_or("left side is not a function at numerals")?;
            match &sig.symbol(f).node {
                Node::Mu(body, bound) => {
                    let z = rhs.as_numeral().ok_or("search value is not a numeral")?;
                    if bound.as_ref().is_some_and(|b| &z > b) {
                        return Err("search value exceeds the bound".into());
                    }
                    let zu = z.to_u64().ok_or("search value too large")?;
                    if refs.len() as u64 != zu + 1 {
                        return Err(format!("expected {} premise(s), got {}", zu + 1, refs.len()));
                    }
                    for (i, &r) in refs.iter().enumerate() {
                        let (l, v) = eq(get(r)?)?;
                        let mut want = nums(&args);
                        want.push(Term::num(&Nat::from(i)));
                        if l != Term::App(sig.name(*body).into(), want) {
                            return Err(format!("premise {r} is not the search condition at {i}"));
                        }
                        let v = v.as_numeral().ok_or_else(|| format!("premise {r} has no numeral value"))?;
                        if v.is_zero() != (i as u64 == zu) {
                            return Err(format!("premise {r} breaks minimality"));
                        }
                    }
                    Ok(())
                }
                _ => {
                    if !refs.is_empty() {
                        return Err("only search equations take premises".into());
                    }
                    if *rhs == defining_rhs(sig, f, &args)? {
                        Ok(())
                    } else {
                        Err(format!("not the defining equation of `{}`", sig.name(f)))
                    }
                }
            }
        }
        (r, _) => Err(format!("{} does not apply to this formula", r.name())),
    }
}

/// `Pf`: checks every line and that the last one is `target`. Reports the
/// first failing line.
pub fn check_proof_detailed(p: &Proof, target: &Formula, env: &DefEnv) -> Result<(), CheckError> {
    let sig = p.signature(env);
    if p.lines.is_empty() {
        return Err(CheckError { line: 0, msg: "empty proof".into() });
    }
    for k in 0..p.lines.len() {
        check_line(&p.lines, k, &sig).map_err(|msg| CheckError { line: k + 1, msg })?;
    }
    if p.conclusion() != Some(target) {
        return Err(CheckError { line: p.lines.len(), msg: format!("last line is not `{target}`") });
    }
    Ok(())
}

pub fn check_proof(p: &Proof, target: &Formula, env: &DefEnv) -> bool {
    check_proof_detailed(p, target, env).is_ok()
}

/// Writes the proof of a computation, mirroring the evaluator. Only used on
/// points where evaluation is known to succeed.
struct Prover<'s> {
    sig: &'s Signature,
    lines: Vec<Line>,
    max_lines: usize,
}

struct TooLong;

impl Prover<'_> {
    fn push(&mut self, formula: Formula, rule: Rule) -> Result<usize, TooLong> {
        if self.lines.len() >= self.max_lines {
            return Err(TooLong);
        }
        self.lines.push(Line { formula, rule });
        Ok(self.lines.len())
    }

    fn trans(&mut self, l: usize, m: usize) -> Result<usize, TooLong> {
        let (Formula::Eq(r, _), Formula::Eq(_, t)) = (&self.lines[l - 1].formula, &self.lines[m - 1].formula) else {
            unreachable!()
        };
        let f = Formula::Eq(r.clone(), t.clone());
        self.push(f, Rule::Transitivity(l, m))
    }

    fn app(&self, f: usize, args: Vec<Term>) -> Term {
        Term::App(self.sig.name(f).to_string(), args)
    }

    /// Proves `f(args) = v` and returns `(v, line)`.
    fn prove(&mut self, f: usize, args: &[Nat]) -> Result<(Nat, usize), TooLong> {
        let lhs = self.app(f, nums(args));
        let node = self.sig.symbol(f).node.clone();
        let def = Rule::DefiningEquation { refs: vec![] };
        match node {
            Node::Zero | Node::Const(_) | Node::Succ | Node::Proj(_) => {
                let rhs = defining_rhs(self.sig, f, args).unwrap();
                let v = rhs.as_numeral().unwrap();
                let l = self.push(Formula::Eq(lhs, rhs), def)?;
                Ok((v, l))
            }
            Node::Call(c) => {
                let d = self.push(Formula::Eq(lhs, self.app(c, nums(args))), def)?;
                let (v, l) = self.prove(c, args)?;
                Ok((v, self.trans(d, l)?))
            }
            Node::Compose(h, gs) => {
                let inner: Vec<Term> = gs.iter().map(|&g| self.app(g, nums(args))).collect();
                let mut cur_args = inner.clone();
                let mut cur = self.push(Formula::Eq(lhs, self.app(h, inner)), def)?;
                let mut vals = Vec::with_capacity(gs.len());
                for (j, &g) in gs.iter().enumerate() {
                    let (v, l) = self.prove(g, args)?;
                    let before = self.app(h, cur_args.clone());
                    cur_args[j] = Term::num(&v);
                    let after = self.app(h, cur_args.clone());
                    let c = self.push(Formula::Eq(before, after), Rule::Congruence { line: l, position: j + 1 })?;
                    cur = self.trans(cur, c)?;
                    vals.push(v);
                }
                let (w, l) = self.prove(h, &vals)?;
                Ok((w, self.trans(cur, l)?))
            }
            Node::PrimRec(b, s) => {
                let (init, last) = args.split_at(args.len() - 1);
                let n = last[0].to_u64().expect("recursion counts fit a word");
                let at = |k: u64| {
                    let mut a = nums(init);
                    a.push(Term::num(&Nat::from(k)));
                    a
                };
                let d = self.push(Formula::Eq(self.app(f, at(0)), self.app(b, nums(init))), def.clone())?;
                let (mut v, l) = self.prove(b, init)?;
                let mut cur = self.trans(d, l)?;
                for k in 0..n {
                    let mut sargs = at(k);
                    sargs.push(self.app(f, at(k)));
                    let before = self.app(s, sargs.clone());
                    let d = self.push(Formula::Eq(self.app(f, at(k + 1)), before.clone()), def.clone())?;
                    let last_pos = sargs.len();
                    sargs[last_pos - 1] = Term::num(&v);
                    let after = self.app(s, sargs);
                    let c =
                        self.push(Formula::Eq(before, after), Rule::Congruence { line: cur, position: last_pos })?;
                    let t = self.trans(d, c)?;
                    let mut vals = init.to_vec();
                    vals.push(Nat::from(k));
                    vals.push(v);
                    let (w, l) = self.prove(s, &vals)?;
                    cur = self.trans(t, l)?;
                    v = w;
                }
                Ok((v, cur))
            }
            Node::Mu(body, _) => {
                let mut refs = Vec::new();
                let mut z = 0u64;
                loop {
                    let mut a = args.to_vec();
                    a.push(Nat::from(z));
                    let (v, l) = self.prove(body, &a)?;
                    refs.push(l);
                    if v.is_zero() {
                        break;
                    }
                    z += 1;
                }
                let l = self.push(Formula::Eq(lhs, Term::num(&Nat::from(z))), Rule::DefiningEquation { refs })?;
                Ok((Nat::from(z), l))
            }
        }
    }
}

/// Default cap on proof length, per unit of fuel.
const LINES_PER_FUEL: u64 = 4;

/// Evaluates and, when the value is defined, emits a proof ending in
/// `f(numerals) = numeral`. The outcome is exactly that of [`eval`]. No
/// proof is returned if it would exceed `4 · fuel` lines.
pub fn eval_with_proof(
    expr: &RfExpr,
    args: &[Nat],
    fuel: u64,
    env: &DefEnv,
) -> Result<(EvalOutcome, Option<Proof>), EvalError> {
    let out = eval(expr, args, fuel, env)?;
    if !out.is_defined() {
        return Ok((out, None));
    }
    let mut sig = Signature::from_env(env);
    let root = sig.add_root(expr);
    let main = (!matches!(expr, RfExpr::Call { .. })).then(|| expr.clone());
    let max_lines = fuel.saturating_mul(LINES_PER_FUEL).min(usize::MAX as u64) as usize;
    let mut pr = Prover { sig: &sig, lines: Vec::new(), max_lines };
    let proof = match pr.prove(root, args) {
        Ok((v, _)) => {
            debug_assert_eq!(Some(&v), out.value());
            Some(Proof { lines: pr.lines, main })
        }
        Err(TooLong) => None,
    };
    Ok((out, proof))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GodelError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error("expected a formula ∃k (f(...) = k) whose arguments are numerals or x, got {0}")]
    WrongShape(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("bad proof file: {0}")]
    ProofFormat(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IsDef {
    Proved(Proof),
    Unknown,
}

/// `IsDef(#Fml, u)`: forms `w = Sub(#Fml, #u, 13)` and looks for a proof of
/// the formula coded `w` by evaluating with `budget` fuel.
pub fn is_def(fml: &GNum, u: &Nat, budget: u64, env: &DefEnv) -> Result<(IsDef, GNum), GodelError> {
    let sig = Signature::from_env(env);
    let shape_err = |s: &dyn std::fmt::Display| GodelError::WrongShape(s.to_string());
    let Syntax::Formula(f) = decode(fml, &sig)? else {
        return Err(shape_err(&"a term"));
    };
    let Formula::ExistsEq { lhs: Term::App(name, targs), .. } = &f else {
        return Err(shape_err(&f));
    };
    if !targs.iter().all(|t| t.as_numeral().is_some() || *t == Term::var("x")) {
        return Err(shape_err(&f));
    }
    let name = name.clone();
    let w = sub(fml, &encode_term(&Term::num(u), &sig)?, &BigUint::from(13u32), &sig)?;
    let Syntax::Formula(target) = decode(&w, &sig)? else { unreachable!() };
    let Formula::ExistsEq { lhs: Term::App(_, closed), .. } = &target else { unreachable!() };
    let args: Vec<Nat> = closed.iter().map(|t| t.as_numeral().unwrap()).collect();
    let expr = env.call(&name).map_err(|_| shape_err(&name))?;
    let (out, proof) = eval_with_proof(&expr, &args, budget, env)?;
    let (Some(mut proof), Some(v)) = (proof, out.value()) else {
        return Ok((IsDef::Unknown, w));
    };
    let last = proof.lines.len();
    proof.lines.push(Line { formula: target.clone(), rule: Rule::ExistsIntro { line: last, witness: Term::num(v) } });
    debug_assert!(check_proof(&proof, &target, env));
    Ok((IsDef::Proved(proof), w))
}

/// One proof line in the JSON file format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonLine {
    pub formula: String,
    pub rule: String,
    #[serde(default)]
    pub refs: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub position: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonProof {
    Lines(Vec<JsonLine>),
    WithMain { main: String, lines: Vec<JsonLine> },
}

impl Proof {
    /// A JSON array of lines, or `{"main": ..., "lines": [...]}` when the
    /// proof needs a `main` symbol.
    pub fn to_json(&self) -> serde_json::Value {
        let lines: Vec<JsonLine> = self
            .lines
            .iter()
            .map(|l| JsonLine {
                formula: l.formula.to_string(),
                rule: l.rule.name().into(),
                refs: l.rule.refs(),
                position: match &l.rule {
                    Rule::Congruence { position, .. } => Some(*position),
                    _ => None,
                },
                witness: match &l.rule {
                    Rule::ExistsIntro { witness, .. } => Some(witness.to_string()),
                    _ => None,
                },
            })
            .collect();
        let j = match &self.main {
            None => JsonProof::Lines(lines),
            Some(m) => JsonProof::WithMain { main: m.to_string(), lines },
        };
        serde_json::to_value(j).unwrap()
    }

    pub fn from_json(v: &serde_json::Value, env: &DefEnv) -> Result<Proof, GodelError> {
        let bad = |m: String| GodelError::ProofFormat(m);
        let j: JsonProof = serde_json::from_value(v.clone()).map_err(|e| bad(e.to_string()))?;
        let (lines, main) = match j {
            JsonProof::Lines(l) => (l, None),
            JsonProof::WithMain { main, lines } => {
                (lines, Some(parse_expr(&main, env).map_err(|e| bad(format!("main: {e}")))?))
            }
        };
        let lines = lines
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                let at = |m: String| bad(format!("line {}: {m}", i + 1));
                let formula = parse_formula(&l.formula).map_err(|e| at(e.to_string()))?;
                let one = || match l.refs[..] {
                    [r] => Ok(r),
                    _ => Err(at(format!("{} takes one reference", l.rule))),
                };
                let rule = match l.rule.as_str() {
                    "DefiningEquation" => Rule::DefiningEquation { refs: l.refs.clone() },
                    "Reflexivity" => Rule::Reflexivity,
                    "Symmetry" => Rule::Symmetry(one()?),
                    "Transitivity" => match l.refs[..] {
                        [a, b] => Rule::Transitivity(a, b),
                        _ => return Err(at("Transitivity takes two references".into())),
                    },
                    "Congruence" => Rule::Congruence {
                        line: one()?,
                        position: l.position.ok_or_else(|| at("Congruence needs a position".into()))?,
                    },
                    "ExistsIntro" => Rule::ExistsIntro {
                        line: one()?,
                        witness: parse_term(
                            l.witness.as_deref().ok_or_else(|| at("ExistsIntro needs a witness".into()))?,
                        )
                        .map_err(|e| at(e.to_string()))?,
                    },
                    other => return Err(at(format!("unknown rule `{other}`"))),
                };
                Ok(Line { formula, rule })
            })
            .collect::<Result<Vec<_>, GodelError>>()?;
        Ok(Proof { lines, main })
    }
}

/// Symbol sequence of a proof: each line is its rule code, its references
/// (and the congruence position, the existential witness), then the formula.
pub fn proof_symbols(p: &Proof, sig: &Signature) -> Result<Vec<u64>, CodeError> {
    let mut out = Vec::new();
    for l in &p.lines {
        out.push(rule_code(l.rule.number()));
        out.extend(l.rule.refs().iter().map(|&r| ref_code(r as u64)));
        match &l.rule {
            Rule::Congruence { position, .. } => out.push(ref_code(*position as u64)),
            Rule::ExistsIntro { witness, .. } => term_symbols(witness, sig, &mut out)?,
            _ => {}
        }
        formula_symbols(&l.formula, sig, &mut out)?;
    }
    Ok(out)
}

pub fn encode_proof(p: &Proof, env: &DefEnv) -> Result<GNum, CodeError> {
    code_of_symbols(&proof_symbols(p, &p.signature(env))?)
}

/// Decodes a proof code. `main` must be supplied when the proof uses it.
pub fn decode_proof(code: &GNum, env: &DefEnv, main: Option<RfExpr>) -> Result<Proof, CodeError> {
    let skeleton = Proof { lines: vec![], main };
    let sig = skeleton.signature(env);
    let syms = symbols_of_code(code)?;
    let mut r = Reader { syms: &syms, pos: 0, sig: &sig };
    let mut lines = Vec::new();
    let bad = |m: &str| CodeError::NotACode(m.into());
    let is_ref = |c: u64| c >= 19 && c % 8 == 3;
    while let Some(tag) = r.peek() {
        r.pos += 1;
        if tag < 17 || tag % 8 != 1 || tag > rule_code(5) {
            return Err(bad("expected a rule symbol"));
        }
        let mut refs = Vec::new();
        while r.peek().is_some_and(is_ref) {
            refs.push(((r.peek().unwrap() - 19) / 8) as usize);
            r.pos += 1;
        }
        let rule = match ((tag - 17) / 8, &refs[..]) {
            (0, _) => Rule::DefiningEquation { refs },
            (1, []) => Rule::Reflexivity,
            (2, [l]) => Rule::Symmetry(*l),
            (3, [a, b]) => Rule::Transitivity(*a, *b),
            (4, [l, p]) => Rule::Congruence { line: *l, position: *p },
            (5, [l]) => Rule::ExistsIntro { line: *l, witness: r.term()? },
            _ => return Err(bad("wrong number of references for the rule")),
        };
        let formula = r.formula()?;
        lines.push(Line { formula, rule });
    }
    Ok(Proof { lines, main: skeleton.main })
}
