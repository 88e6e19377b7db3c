//! Terms and formulas of the equational arithmetic, with a text syntax.
//!
//! ```text
//! term    := "0" | NAT | "S(" term ")" | "S^" NAT "(" term ")"
//!          | VAR | NAME "(" [ term { "," term } ] ")"
//! formula := term "=" term
//!          | ("∃" | "exists") VAR "(" term "=" VAR ")"
//!          | ("¬" | "~") "IsDef(" term "," term ")"
//! ```
//!
//! Variables are `x`, `y`, `z`, `k` and `v5`, `v6`, ...; a bare number is
//! the numeral `S^n(0)`.

use std::fmt;

use thiserror::Error;

use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    /// `S^n(t)` with `n ≥ 1`; `t` is never itself a successor. Build with
    /// [`Term::succ`] or [`Term::succ_n`] to keep this form.
    Succ(Nat, Box<Term>),
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn num(n: &Nat) -> Term {
        Term::succ_n(n.clone(), Term::Zero)
    }

    pub fn succ(t: Term) -> Term {
        Term::succ_n(Nat::from(1u64), t)
    }

    pub fn succ_n(n: Nat, t: Term) -> Term {
        if n.is_zero() {
            return t;
        }
        match t {
            Term::Succ(m, inner) => Term::Succ(Nat::from(n.to_biguint() + m.to_biguint()), inner),
            t => Term::Succ(n, Box::new(t)),
        }
    }

    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.to_string(), args)
    }

    /// The value of a closed numeral.
    pub fn as_numeral(&self) -> Option<Nat> {
        match self {
            Term::Zero => Some(Nat::ZERO),
            Term::Succ(n, t) if **t == Term::Zero => Some(n.clone()),
            _ => None,
        }
    }

    /// `t` when `self` is `S(t)`.
    pub fn unsucc(&self) -> Option<Term> {
        match self {
            Term::Succ(n, t) => Some(Term::succ_n(n.pred(), (**t).clone())),
            _ => None,
        }
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Term::Zero => false,
            Term::Succ(_, t) => t.contains_var(v),
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    /// Replaces every occurrence of variable `v` by `by`.
    pub fn substitute(&self, v: &str, by: &Term) -> Term {
        match self {
            Term::Zero => Term::Zero,
            Term::Succ(n, t) => Term::succ_n(n.clone(), t.substitute(v, by)),
            Term::Var(w) if w == v => by.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute(v, by)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    /// `∃var (lhs = var)`.
    ExistsEq {
        var: String,
        lhs: Term,
    },
    /// `¬IsDef(a, b)`: only used to name the negation template.
    NegIsDef(Term, Term),
}

impl Formula {
    pub fn substitute(&self, v: &str, by: &Term) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::Eq(a.substitute(v, by), b.substitute(v, by)),
            Formula::ExistsEq { var, .. } if var == v => self.clone(),
            Formula::ExistsEq { var, lhs } => Formula::ExistsEq { var: var.clone(), lhs: lhs.substitute(v, by) },
            Formula::NegIsDef(a, b) => Formula::NegIsDef(a.substitute(v, by), b.substitute(v, by)),
        }
    }
}

/// Index of a variable name: `x` 1, `y` 2, `z` 3, `k` 4, `vN` N for N ≥ 5.
pub fn var_index(name: &str) -> Option<u64> {
    match name {
        "x" => Some(1),
        "y" => Some(2),
        "z" => Some(3),
        "k" => Some(4),
        _ => {
            let n: u64 = name.strip_prefix('v')?.parse().ok()?;
            (n >= 5 && !name[1..].starts_with('0')).then_some(n)
        }
    }
}

pub fn var_name(index: u64) -> Option<String> {
    match index {
        0 => None,
        1 => Some("x".into()),
        2 => Some("y".into()),
        3 => Some("z".into()),
        4 => Some("k".into()),
        n => Some(format!("v{n}")),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => f.write_str("0"),
            Term::Succ(n, t) => match n.to_u64() {
                Some(k) if k <= 3 => {
                    for _ in 0..k {
                        f.write_str("S(")?;
                    }
                    write!(f, "{t}")?;
                    (0..k).try_for_each(|_| f.write_str(")"))
                }
                _ => write!(f, "S^{n}({t})"),
            },
            Term::Var(v) => f.write_str(v),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::ExistsEq { var, lhs } => write!(f, "∃{var} ({lhs} = {var})"),
            Formula::NegIsDef(a, b) => write!(f, "¬IsDef({a}, {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {col}: {msg}")]
pub struct SyntaxError {
    pub col: usize,
    pub msg: String,
}

struct P<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> P<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { col: self.s[..self.pos].chars().count() + 1, msg: msg.into() })
    }

    fn ws(&mut self) {
        while let Some(c) = self.s[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    fn word(&mut self) -> Option<&'a str> {
        self.ws();
        let rest = &self.s[self.pos..];
        let first = rest.chars().next()?;
        if !(first.is_ascii_alphanumeric() || first == '_') {
            return None;
        }
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '.')).unwrap_or(rest.len());
        self.pos += len;
        Some(&rest[..len])
    }

    fn nat(&mut self, w: &str) -> Result<Nat, SyntaxError> {
        w.parse().or_else(|_| self.err(format!("bad number `{w}`")))
    }

    fn term(&mut self) -> Result<Term, SyntaxError> {
        let Some(w) = self.word() else {
            return self.err("expected a term");
        };
        if w.as_bytes()[0].is_ascii_digit() {
            return Ok(Term::num(&self.nat(w)?));
        }
        if w == "S" {
            let n = if self.eat("^") {
                let Some(d) = self.word() else { return self.err("expected an exponent") };
                self.nat(d)?
            } else {
                Nat::from(1u64)
            };
            self.expect("(")?;
            let t = self.term()?;
            self.expect(")")?;
            return Ok(Term::succ_n(n, t));
        }
        if self.eat("(") {
            let mut args = Vec::new();
            if !self.eat(")") {
                loop {
                    args.push(self.term()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(Term::App(w.to_string(), args));
        }
        if var_index(w).is_none() {
            return self.err(format!("`{w}` is not a variable (x, y, z, k, v5, v6, ...)"));
        }
        Ok(Term::Var(w.to_string()))
    }

    fn var(&mut self) -> Result<String, SyntaxError> {
        match self.word() {
            Some(w) if var_index(w).is_some() => Ok(w.to_string()),
            _ => self.err("expected a variable"),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        if self.eat("∃") || self.eat("exists ") {
            let var = self.var()?;
            self.expect("(")?;
            let lhs = self.term()?;
            self.expect("=")?;
            let v2 = self.var()?;
            self.expect(")")?;
            if v2 != var {
                return self.err(format!("expected `{var}` on the right"));
            }
            if lhs.contains_var(&var) {
                return self.err(format!("`{var}` occurs on the left of its own equation"));
            }
            return Ok(Formula::ExistsEq { var, lhs });
        }
        if self.eat("¬") || self.eat("~") {
            self.expect("IsDef")?;
            self.expect("(")?;
            let a = self.term()?;
            self.expect(",")?;
            let b = self.term()?;
            self.expect(")")?;
            return Ok(Formula::NegIsDef(a, b));
        }
        let a = self.term()?;
        self.expect("=")?;
        let b = self.term()?;
        Ok(Formula::Eq(a, b))
    }

    fn end(&mut self) -> Result<(), SyntaxError> {
        self.ws();
        if self.pos < self.s.len() {
            return self.err("unexpected trailing input");
        }
        Ok(())
    }
}

pub fn parse_term(s: &str) -> Result<Term, SyntaxError> {
    let mut p = P { s, pos: 0 };
    let t = p.term()?;
    p.end()?;
    Ok(t)
}

pub fn parse_formula(s: &str) -> Result<Formula, SyntaxError> {
    let mut p = P { s, pos: 0 };
    let f = p.formula()?;
    p.end()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerals_are_compact() {
        let three = Term::succ(Term::succ(Term::succ(Term::Zero)));
        assert_eq!(three, Term::num(&Nat::from(3u64)));
        assert_eq!(three.as_numeral(), Some(Nat::from(3u64)));
        assert_eq!(three.to_string(), "S(S(S(0)))");
        assert_eq!(Term::num(&Nat::from(5u64)).to_string(), "S^5(0)");
        assert_eq!(three.unsucc(), Some(Term::num(&Nat::from(2u64))));
    }

    #[test]
    fn text_round_trip() {
        for s in [
            "plus(S(S(0)), S(S(S(0)))) = S^5(0)",
            "∃k (double(S^4(0)) = k)",
            "¬IsDef(x, x)",
            "f(x, S(y)) = g()",
            "S^7(v12) = 0",
        ] {
            let f = parse_formula(s).unwrap();
            assert_eq!(f.to_string(), s);
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        }
        assert_eq!(parse_formula("exists k (f(2) = k)").unwrap().to_string(), "∃k (f(S(S(0))) = k)");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_formula("x =").is_err());
        assert!(parse_formula("foo = 0").is_err());
        assert!(parse_formula("∃k (f(k) = k)").is_err());
        assert!(parse_formula("∃k (f(x) = y)").is_err());
        assert!(parse_term("v4").is_err());
        assert!(parse_term("v05").is_err());
        assert!(parse_term("S(0").is_err());
    }

    #[test]
    fn substitution_respects_binding() {
        let f = parse_formula("∃k (f(x) = k)").unwrap();
        let two = Term::num(&Nat::from(2u64));
        assert_eq!(f.substitute("x", &two).to_string(), "∃k (f(S(S(0))) = k)");
        assert_eq!(f.substitute("k", &two), f);
    }

    #[test]
    fn variable_names() {
        for i in 1..40 {
            assert_eq!(var_index(&var_name(i).unwrap()), Some(i));
        }
        assert_eq!(var_name(0), None);
    }
}
