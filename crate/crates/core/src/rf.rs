//! Partial recursive function expressions, their definition environment,
//! and the `.rf` surface syntax.
//!
//! ```text
//! file    := { def } ;
//! def     := "def" IDENT "=" expr ;
//! expr    := "zero" | "succ" | "const" "(" NAT ")"
//!          | "proj" "(" NAT "," NAT ")"
//!          | "comp" "(" expr { "," expr } ")"
//!          | "primrec" "(" expr "," expr ")"
//!          | "mu" "(" expr [ "," "bound" "=" NAT ] ")"
//!          | IDENT ;
//! ```
//!
//! `#` starts a comment that runs to the end of the line. Projections are
//! 1-based: `proj(3,2)` returns the second of three arguments.
//!
//! `zero` and `const(k)` are unary. The one exception is the base case of a
//! unary `primrec`, which needs a nullary function; there a `zero` or
//! `const(k)` is read as the bare constant.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RfExpr {
    Zero,
    Const(Nat),
    Succ,
    /// `index` is 1-based and at most `arity`.
    Proj {
        arity: usize,
        index: usize,
    },
    Compose(Box<RfExpr>, Vec<RfExpr>),
    /// `h(x̄, 0) = base(x̄)`, `h(x̄, y+1) = step(x̄, y, h(x̄, y))`.
    PrimRec(Box<RfExpr>, Box<RfExpr>),
    /// Least `z` with `body(x̄, z) = 0`; with a bound, only `z ≤ bound` is searched.
    Mu {
        body: Box<RfExpr>,
        bound: Option<Nat>,
    },
    /// Reference to a named definition. The arity is cached from the
    /// environment when the reference is built.
    Call {
        name: String,
        arity: usize,
    },
}

impl RfExpr {
    pub fn proj(arity: usize, index: usize) -> RfExpr {
        RfExpr::Proj { arity, index }
    }

    pub fn constant(k: u64) -> RfExpr {
        RfExpr::Const(Nat::from(k))
    }

    pub fn comp(f: RfExpr, gs: Vec<RfExpr>) -> RfExpr {
        RfExpr::Compose(Box::new(f), gs)
    }

    pub fn primrec(base: RfExpr, step: RfExpr) -> RfExpr {
        RfExpr::PrimRec(Box::new(base), Box::new(step))
    }

    pub fn mu(body: RfExpr) -> RfExpr {
        RfExpr::Mu { body: Box::new(body), bound: None }
    }

    pub fn bounded_mu(body: RfExpr, bound: u64) -> RfExpr {
        RfExpr::Mu { body: Box::new(body), bound: Some(Nat::from(bound)) }
    }

    /// Zero and constants, which may stand for a nullary base case.
    pub fn is_constant_leaf(&self) -> bool {
        matches!(self, RfExpr::Zero | RfExpr::Const(_))
    }

    /// Number of arguments. Total on expressions accepted by [`check`].
    pub fn arity(&self) -> usize {
        match self {
            RfExpr::Zero | RfExpr::Const(_) | RfExpr::Succ => 1,
            RfExpr::Proj { arity, .. } => *arity,
            RfExpr::Compose(_, gs) => gs.first().map_or(0, RfExpr::arity),
            RfExpr::PrimRec(_, step) => step.arity().saturating_sub(1),
            RfExpr::Mu { body, .. } => body.arity().saturating_sub(1),
            RfExpr::Call { arity, .. } => *arity,
        }
    }

    /// Immediate subexpressions, in a fixed order: head before arguments,
    /// base before step.
    pub fn children(&self) -> Vec<&RfExpr> {
        match self {
            RfExpr::Compose(f, gs) => std::iter::once(f.as_ref()).chain(gs.iter()).collect(),
            RfExpr::PrimRec(b, s) => vec![b.as_ref(), s.as_ref()],
            RfExpr::Mu { body, .. } => vec![body.as_ref()],
            _ => Vec::new(),
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(RfExpr::depth).max().unwrap_or(0)
    }
}

impl fmt::Display for RfExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RfExpr::Zero => write!(f, "zero"),
            RfExpr::Const(k) => write!(f, "const({k})"),
            RfExpr::Succ => write!(f, "succ"),
            RfExpr::Proj { arity, index } => write!(f, "proj({arity},{index})"),
            RfExpr::Compose(h, gs) => {
                write!(f, "comp({h}")?;
                for g in gs {
                    write!(f, ", {g}")?;
                }
                write!(f, ")")
            }
            RfExpr::PrimRec(b, s) => write!(f, "primrec({b}, {s})"),
            RfExpr::Mu { body, bound: None } => write!(f, "mu({body})"),
            RfExpr::Mu { body, bound: Some(b) } => write!(f, "mu({body}, bound={b})"),
            RfExpr::Call { name, .. } => write!(f, "{name}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub expr: RfExpr,
}

/// Named definitions in declaration order. The position of a definition
/// is its enumeration index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DefEnv {
    defs: Vec<Definition>,
    index: HashMap<String, usize>,
}

impl DefEnv {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a definition after checking it against the definitions already
    /// present.
    pub fn define(&mut self, name: &str, expr: RfExpr) -> Result<usize, RfError> {
        if self.index.contains_key(name) {
            return Err(RfError::DuplicateName(name.to_string()));
        }
        if is_keyword(name) || !is_ident(name) {
            return Err(RfError::BadName(name.to_string()));
        }
        check(&expr, self)?;
        let i = self.defs.len();
        self.defs.push(Definition { name: name.to_string(), expr });
        self.index.insert(name.to_string(), i);
        Ok(i)
    }

    pub fn get(&self, name: &str) -> Option<&RfExpr> {
        self.index.get(name).map(|&i| &self.defs[i].expr)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn definition(&self, i: usize) -> Option<&Definition> {
        self.defs.get(i)
    }

    pub fn len(&self) -> usize {
        self.defs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Definition> {
        self.defs.iter()
    }

    /// A reference to a defined name.
    pub fn call(&self, name: &str) -> Result<RfExpr, RfError> {
        let expr = self.get(name).ok_or_else(|| RfError::UnknownCall(name.to_string()))?;
        Ok(RfExpr::Call { name: name.to_string(), arity: expr.arity() })
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.get(name).map(RfExpr::arity)
    }

    /// Appends every definition of `other` not already present by name.
    pub fn extend_from(&mut self, other: &DefEnv) -> Result<(), RfError> {
        for d in other.iter() {
            match self.get(&d.name) {
                Some(e) if e == &d.expr => {}
                Some(_) => return Err(RfError::DuplicateName(d.name.clone())),
                None => {
                    self.define(&d.name, d.expr.clone())?;
                }
            }
        }
        Ok(())
    }

    /// Replaces every call by the body it names.
    pub fn inline(&self, expr: &RfExpr) -> RfExpr {
        match expr {
            RfExpr::Call { name, .. } => match self.get(name) {
                Some(body) => self.inline(body),
                None => expr.clone(),
            },
            RfExpr::Compose(f, gs) => RfExpr::comp(self.inline(f), gs.iter().map(|g| self.inline(g)).collect()),
            RfExpr::PrimRec(b, s) => RfExpr::primrec(self.inline(b), self.inline(s)),
            RfExpr::Mu { body, bound } => RfExpr::Mu { body: Box::new(self.inline(body)), bound: bound.clone() },
            leaf => leaf.clone(),
        }
    }
}

impl fmt::Display for DefEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.defs {
            writeln!(f, "def {} = {}", d.name, d.expr)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RfError {
    #[error("{line}:{col}: syntax error: expected {}, found {found}", expected.join(" or "))]
    Syntax { line: usize, col: usize, expected: Vec<String>, found: String },
    #[error("arity mismatch in `{expr}`: {detail}")]
    ArityMismatch { expr: String, detail: String },
    #[error("unknown function `{0}`")]
    UnknownCall(String),
    #[error("`{name}` refers to `{target}`, which is defined later")]
    ForwardReference { name: String, target: String },
    #[error("recursive reference cycle: {}", .0.join(" -> "))]
    RecursiveCall(Vec<String>),
    #[error("duplicate definition `{0}`")]
    DuplicateName(String),
    #[error("`{0}` is not a usable definition name")]
    BadName(String),
}

fn arity_err(expr: &RfExpr, detail: impl Into<String>) -> RfError {
    RfError::ArityMismatch { expr: expr.to_string(), detail: detail.into() }
}

/// Checks the arity invariants of `expr` against `env`.
pub fn check(expr: &RfExpr, env: &DefEnv) -> Result<usize, RfError> {
    match expr {
        RfExpr::Zero | RfExpr::Const(_) | RfExpr::Succ => Ok(1),
        RfExpr::Proj { arity, index } => {
            if *index == 0 || index > arity {
                Err(arity_err(expr, format!("projection index must lie in 1..={arity}")))
            } else {
                Ok(*arity)
            }
        }
        RfExpr::Compose(f, gs) => {
            let fa = check(f, env)?;
            if gs.is_empty() {
                return Err(arity_err(expr, "composition needs at least one inner function"));
            }
            if fa != gs.len() {
                return Err(arity_err(
                    expr,
                    format!("head `{f}` takes {fa} argument(s) but {} are supplied", gs.len()),
                ));
            }
            let n = check(&gs[0], env)?;
            for g in &gs[1..] {
                let ga = check(g, env)?;
                if ga != n {
                    return Err(arity_err(
                        expr,
                        format!("inner functions disagree on arity: `{}` has {n}, `{g}` has {ga}", gs[0]),
                    ));
                }
            }
            Ok(n)
        }
        RfExpr::PrimRec(base, step) => {
            let sa = check(step, env)?;
            if sa < 2 {
                return Err(arity_err(expr, format!("step `{step}` must take at least 2 arguments")));
            }
            let n = sa - 2;
            let ba = check(base, env)?;
            if ba != n && !(n == 0 && base.is_constant_leaf()) {
                return Err(arity_err(expr, format!("base `{base}` takes {ba} argument(s), expected {n}")));
            }
            Ok(n + 1)
        }
        RfExpr::Mu { body, .. } => {
            let ba = check(body, env)?;
            if ba == 0 {
                return Err(arity_err(expr, "search body must take the searched variable"));
            }
            Ok(ba - 1)
        }
        RfExpr::Call { name, arity } => match env.get(name) {
            None => Err(RfError::UnknownCall(name.clone())),
            Some(e) if e.arity() != *arity => {
                Err(arity_err(expr, format!("`{name}` has arity {}, reference assumed {arity}", e.arity())))
            }
            Some(_) => Ok(*arity),
        },
    }
}

/// True when no unbounded search occurs in `expr` or in anything it calls.
/// Bounded searches count as primitive recursive.
pub fn is_primitive_recursive(expr: &RfExpr, env: &DefEnv) -> bool {
    fn go<'a>(e: &'a RfExpr, env: &'a DefEnv, seen: &mut HashSet<&'a str>) -> bool {
        match e {
            RfExpr::Mu { bound: None, .. } => false,
            RfExpr::Call { name, .. } => {
                if !seen.insert(name.as_str()) {
                    return true;
                }
                env.get(name).is_some_and(|body| go(body, env, seen))
            }
            _ => e.children().into_iter().all(|c| go(c, env, seen)),
        }
    }
    go(expr, env, &mut HashSet::new())
}

const KEYWORDS: &[&str] = &["def", "zero", "succ", "const", "proj", "comp", "primrec", "mu", "bound"];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Nat(s) => write!(f, "`{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, RfError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(s), line: l0, col: c0 });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Nat(s), line: l0, col: c0 });
        } else if "(),=".contains(c) {
            chars.next();
            col += 1;
            out.push(Spanned { tok: Tok::Punct(c), line: l0, col: c0 });
        } else {
            return Err(RfError::Syntax {
                line: l0,
                col: c0,
                expected: vec!["a token".into()],
                found: format!("`{c}`"),
            });
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

/// Surface syntax before name resolution.
#[derive(Debug, Clone)]
enum Raw {
    Zero,
    Const(Nat),
    Succ,
    Proj(usize, usize),
    Comp(Box<Raw>, Vec<Raw>),
    PrimRec(Box<Raw>, Box<Raw>),
    Mu(Box<Raw>, Option<Nat>),
    Name(String),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T, RfError> {
        let t = self.peek();
        Err(RfError::Syntax {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.to_string(),
        })
    }

    fn punct(&mut self, c: char) -> Result<(), RfError> {
        if self.peek().tok == Tok::Punct(c) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{c}`")])
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), RfError> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == k) {
            self.bump();
            Ok(())
        } else {
            self.fail(&[&format!("`{k}`")])
        }
    }

    fn nat(&mut self) -> Result<Nat, RfError> {
        match &self.peek().tok {
            Tok::Nat(s) => {
                let n = s.parse().expect("lexer only yields digits");
                self.bump();
                Ok(n)
            }
            _ => self.fail(&["a natural number"]),
        }
    }

    fn small(&mut self) -> Result<usize, RfError> {
        let t = self.peek().clone();
        let n = self.nat()?;
        n.to_u64().and_then(|v| usize::try_from(v).ok()).ok_or(RfError::Syntax {
            line: t.line,
            col: t.col,
            expected: vec!["a small natural number".into()],
            found: t.tok.to_string(),
        })
    }

    fn ident(&mut self) -> Result<String, RfError> {
        match &self.peek().tok {
            Tok::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["an identifier"]),
        }
    }

    fn expr(&mut self) -> Result<Raw, RfError> {
        let word = match &self.peek().tok {
            Tok::Ident(s) => s.clone(),
            _ => return self.fail(&["an expression"]),
        };
        self.bump();
        match word.as_str() {
            "zero" => Ok(Raw::Zero),
            "succ" => Ok(Raw::Succ),
            "const" => {
                self.punct('(')?;
                let k = self.nat()?;
                self.punct(')')?;
                Ok(Raw::Const(k))
            }
            "proj" => {
                self.punct('(')?;
                let n = self.small()?;
                self.punct(',')?;
                let i = self.small()?;
                self.punct(')')?;
                Ok(Raw::Proj(n, i))
            }
            "comp" => {
                self.punct('(')?;
                let head = self.expr()?;
                let mut args = Vec::new();
                while self.peek().tok == Tok::Punct(',') {
                    self.bump();
                    args.push(self.expr()?);
                }
                self.punct(')')?;
                Ok(Raw::Comp(Box::new(head), args))
            }
            "primrec" => {
                self.punct('(')?;
                let b = self.expr()?;
                self.punct(',')?;
                let s = self.expr()?;
                self.punct(')')?;
                Ok(Raw::PrimRec(Box::new(b), Box::new(s)))
            }
            "mu" => {
                self.punct('(')?;
                let body = self.expr()?;
                let mut bound = None;
                if self.peek().tok == Tok::Punct(',') {
                    self.bump();
                    self.keyword("bound")?;
                    self.punct('=')?;
                    bound = Some(self.nat()?);
                }
                self.punct(')')?;
                Ok(Raw::Mu(Box::new(body), bound))
            }
            "def" | "bound" => {
                self.pos -= 1;
                self.fail(&["an expression"])
            }
            _ => Ok(Raw::Name(word)),
        }
    }
}

fn names_in(raw: &Raw, out: &mut Vec<String>) {
    match raw {
        Raw::Name(n) => out.push(n.clone()),
        Raw::Comp(h, gs) => {
            names_in(h, out);
            gs.iter().for_each(|g| names_in(g, out));
        }
        Raw::PrimRec(b, s) => {
            names_in(b, out);
            names_in(s, out);
        }
        Raw::Mu(b, _) => names_in(b, out),
        _ => {}
    }
}

fn resolve(raw: &Raw, env: &DefEnv) -> Result<RfExpr, RfError> {
    Ok(match raw {
        Raw::Zero => RfExpr::Zero,
        Raw::Const(k) => RfExpr::Const(k.clone()),
        Raw::Succ => RfExpr::Succ,
        Raw::Proj(n, i) => RfExpr::proj(*n, *i),
        Raw::Comp(h, gs) => {
            RfExpr::comp(resolve(h, env)?, gs.iter().map(|g| resolve(g, env)).collect::<Result<_, _>>()?)
        }
        Raw::PrimRec(b, s) => RfExpr::primrec(resolve(b, env)?, resolve(s, env)?),
        Raw::Mu(b, bound) => RfExpr::Mu { body: Box::new(resolve(b, env)?), bound: bound.clone() },
        Raw::Name(n) => env.call(n)?,
    })
}

/// Finds a reference cycle through `start`, if any, in the raw definitions.
fn cycle_from(start: &str, deps: &HashMap<String, Vec<String>>) -> Option<Vec<String>> {
    fn dfs(
        cur: &str,
        start: &str,
        deps: &HashMap<String, Vec<String>>,
        path: &mut Vec<String>,
        seen: &mut HashSet<String>,
    ) -> bool {
        for next in deps.get(cur).into_iter().flatten() {
            if next == start {
                path.push(next.clone());
                return true;
            }
            if seen.insert(next.clone()) {
                path.push(next.clone());
                if dfs(next, start, deps, path, seen) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let mut path = vec![start.to_string()];
    dfs(start, start, deps, &mut path, &mut HashSet::new()).then_some(path)
}

/// Parses a `.rf` file into a checked environment.
pub fn parse_rf(text: &str) -> Result<DefEnv, RfError> {
    let mut env = DefEnv::new();
    parse_into(text, &mut env)?;
    Ok(env)
}

/// Parses definitions and appends them to an existing environment.
pub fn parse_into(text: &str, env: &mut DefEnv) -> Result<(), RfError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut raws = Vec::new();
    while p.peek().tok != Tok::Eof {
        p.keyword("def")?;
        let name_tok = p.peek().clone();
        let name = p.ident()?;
        p.punct('=')?;
        let body = p.expr()?;
        raws.push((name, body, name_tok));
    }

    let mut deps: HashMap<String, Vec<String>> = HashMap::new();
    for (name, body, _) in &raws {
        let mut ns = Vec::new();
        names_in(body, &mut ns);
        deps.entry(name.clone()).or_default().extend(ns);
    }
    let declared: HashSet<&str> = raws.iter().map(|(n, _, _)| n.as_str()).collect();

    for (name, body, _) in &raws {
        if env.get(name).is_some() {
            return Err(RfError::DuplicateName(name.clone()));
        }
        if let Some(cycle) = cycle_from(name, &deps) {
            return Err(RfError::RecursiveCall(cycle));
        }
        let mut ns = Vec::new();
        names_in(body, &mut ns);
        for target in ns {
            if env.get(&target).is_none() {
                if declared.contains(target.as_str()) {
                    return Err(RfError::ForwardReference { name: name.clone(), target });
                }
                return Err(RfError::UnknownCall(target));
            }
        }
        let expr = resolve(body, env)?;
        env.define(name, expr)?;
    }
    Ok(())
}

/// Parses a single expression whose names resolve in `env`.
pub fn parse_expr(text: &str, env: &DefEnv) -> Result<RfExpr, RfError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let raw = p.expr()?;
    if p.peek().tok != Tok::Eof {
        return p.fail(&["end of input"]);
    }
    let e = resolve(&raw, env)?;
    check(&e, env)?;
    Ok(e)
}
