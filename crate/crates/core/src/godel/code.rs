//! Gödel numbering.
//!
//! Symbol codes (all odd, distinct residue classes mod 8 keep the families
//! apart):
//!
//! | symbol                      | code        |
//! |-----------------------------|-------------|
//! | `0`                         | 1           |
//! | `=`                         | 3           |
//! | `∃`                         | 5           |
//! | `¬`                         | 7           |
//! | `S`                         | 9           |
//! | `IsDef`                     | 11          |
//! | variable number k (x = 1)   | 5 + 8k      |
//! | function symbol number i    | 15 + 8i     |
//! | proof rule number r         | 17 + 8r     |
//! | line reference / position n | 19 + 8n     |
//!
//! Objects are written in prefix order: `s = t` is `= s t`, `∃v (t = v)` is
//! `∃ v = t v`, `¬IsDef(a, b)` is `¬ IsDef a b`. A symbol sequence
//! `c_1 .. c_k` is coded as `2^c_1 · 3^c_2 · ... · p_k^c_k`, except that a
//! lone variable or `0` is coded by its symbol code. So `x` is 13 and every
//! compound object has an even code.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::sig::Signature;
use super::syntax::{var_index, var_name, Formula, Term};
use crate::nat::Nat;

pub type GNum = BigUint;

pub const ZERO: u64 = 1;
pub const EQ: u64 = 3;
pub const EXISTS: u64 = 5;
pub const NOT: u64 = 7;
pub const SUCC: u64 = 9;
pub const ISDEF: u64 = 11;

pub fn var_code(k: u64) -> u64 {
    5 + 8 * k
}

pub fn fn_code(i: usize) -> u64 {
    15 + 8 * i as u64
}

pub fn rule_code(r: u64) -> u64 {
    17 + 8 * r
}

pub fn ref_code(n: u64) -> u64 {
    19 + 8 * n
}

/// Sequences longer than this are not coded; the numbers become unwieldy
/// long before.
pub const MAX_SYMBOLS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("not a code: {0}")]
    NotACode(String),
    #[error("unknown function symbol `{0}`")]
    UnknownFunction(String),
    #[error("`{name}` takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("bad variable `{0}`")]
    BadVariable(String),
    #[error("sequence of {0} symbols is too long to code")]
    TooLong(usize),
}

fn not_a_code<T>(why: impl Into<String>) -> Result<T, CodeError> {
    Err(CodeError::NotACode(why.into()))
}

/// Appends the symbols of `t`.
pub fn term_symbols(t: &Term, sig: &Signature, out: &mut Vec<u64>) -> Result<(), CodeError> {
    match t {
        Term::Zero => out.push(ZERO),
        Term::Succ(n, inner) => {
            let n = n.to_u64().filter(|&n| (n as usize) < MAX_SYMBOLS).ok_or(CodeError::TooLong(usize::MAX))?;
            if out.len() + n as usize > MAX_SYMBOLS {
                return Err(CodeError::TooLong(out.len() + n as usize));
            }
            out.extend(std::iter::repeat_n(SUCC, n as usize));
            term_symbols(inner, sig, out)?;
        }
        Term::Var(v) => out.push(var_code(var_index(v).ok_or_else(|| CodeError::BadVariable(v.clone()))?)),
        Term::App(f, args) => {
            let i = sig.index_of(f).ok_or_else(|| CodeError::UnknownFunction(f.clone()))?;
            let expected = sig.arity(i);
            if expected != args.len() {
                return Err(CodeError::Arity { name: f.clone(), expected, got: args.len() });
            }
            out.push(fn_code(i));
            for a in args {
                term_symbols(a, sig, out)?;
            }
        }
    }
    Ok(())
}

pub fn formula_symbols(f: &Formula, sig: &Signature, out: &mut Vec<u64>) -> Result<(), CodeError> {
    match f {
        Formula::Eq(a, b) => {
            out.push(EQ);
            term_symbols(a, sig, out)?;
            term_symbols(b, sig, out)?;
        }
        Formula::ExistsEq { var, lhs } => {
            let v = var_code(var_index(var).ok_or_else(|| CodeError::BadVariable(var.clone()))?);
            out.extend([EXISTS, v, EQ]);
            term_symbols(lhs, sig, out)?;
            out.push(v);
        }
        Formula::NegIsDef(a, b) => {
            out.extend([NOT, ISDEF]);
            term_symbols(a, sig, out)?;
            term_symbols(b, sig, out)?;
        }
    }
    Ok(())
}

/// The first `n` primes.
pub fn primes(n: usize) -> Vec<u64> {
    if n == 0 {
        return Vec::new();
    }
    let mut limit = 16usize.max(n * ((n as f64).ln() as usize + (n as f64).ln().ln().max(0.0) as usize + 3));
    loop {
        let mut sieve = vec![true; limit + 1];
        let mut out = Vec::with_capacity(n);
        for i in 2..=limit {
            if sieve[i] {
                out.push(i as u64);
                if out.len() == n {
                    return out;
                }
                let mut j = i * i;
                while j <= limit {
                    sieve[j] = false;
                    j += i;
                }
            }
        }
        limit *= 2;
    }
}

fn product(factors: &[BigUint]) -> BigUint {
    match factors.len() {
        0 => BigUint::one(),
        1 => factors[0].clone(),
        n => product(&factors[..n / 2]) * product(&factors[n / 2..]),
    }
}

/// Codes a symbol sequence.
pub fn code_of_symbols(symbols: &[u64]) -> Result<GNum, CodeError> {
    match symbols {
        [] => not_a_code("empty sequence"),
        [c] if *c == ZERO || is_var_code(*c) => Ok(BigUint::from(*c)),
        _ if symbols.len() > MAX_SYMBOLS => Err(CodeError::TooLong(symbols.len())),
        _ => {
            let ps = primes(symbols.len());
            let factors: Vec<BigUint> = ps.iter().zip(symbols).map(|(&p, &c)| BigUint::from(p).pow(c as u32)).collect();
            Ok(product(&factors))
        }
    }
}

fn is_var_code(c: u64) -> bool {
    c >= 13 && c % 8 == 5
}

/// Recovers the symbol sequence of a code.
pub fn symbols_of_code(code: &GNum) -> Result<Vec<u64>, CodeError> {
    if code.is_zero() {
        return not_a_code("0");
    }
    if code.is_odd() {
        return match code.to_u64() {
            Some(c) if c == ZERO || is_var_code(c) => Ok(vec![c]),
            _ => not_a_code(format!("odd number {code} is not a variable or 0")),
        };
    }
    let mut n = code.clone();
    let mut out = Vec::new();
    let mut ps = primes(64);
    let mut i = 0;
    while !n.is_one() {
        if i == ps.len() {
            ps = primes(ps.len() * 2);
        }
        let p = BigUint::from(ps[i]);
        let mut e = 0u64;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
            if e > u32::MAX as u64 {
                return not_a_code("exponent too large");
            }
        }
        if e == 0 {
            return not_a_code(format!("prime {p} missing from the sequence"));
        }
        out.push(e);
        i += 1;
        if out.len() > MAX_SYMBOLS {
            return Err(CodeError::TooLong(out.len()));
        }
    }
    if let [c] = out[..] {
        if c == ZERO || is_var_code(c) {
            return not_a_code(format!("2^{c} is not the canonical code of a single symbol"));
        }
    }
    Ok(out)
}

/// Reads terms and formulas back from a symbol stream.
pub(crate) struct Reader<'a> {
    pub syms: &'a [u64],
    pub pos: usize,
    pub sig: &'a Signature,
}

impl Reader<'_> {
    pub fn peek(&self) -> Option<u64> {
        self.syms.get(self.pos).copied()
    }

    fn next(&mut self) -> Result<u64, CodeError> {
        let c = self.peek().ok_or_else(|| CodeError::NotACode("sequence ends early".into()))?;
        self.pos += 1;
        Ok(c)
    }

    fn var(&mut self) -> Result<String, CodeError> {
        let c = self.next()?;
        if !is_var_code(c) {
            return not_a_code(format!("expected a variable, found symbol {c}"));
        }
        Ok(var_name((c - 5) / 8).unwrap())
    }

    pub fn term(&mut self) -> Result<Term, CodeError> {
        let mut succs = 0u64;
        while self.peek() == Some(SUCC) {
            self.pos += 1;
            succs += 1;
        }
        let c = self.next()?;
        let t = if c == ZERO {
            Term::Zero
        } else if is_var_code(c) {
            Term::Var(var_name((c - 5) / 8).unwrap())
        } else if c >= 15 && c % 8 == 7 {
            let i = ((c - 15) / 8) as usize;
            if i >= self.sig.len() {
                return not_a_code(format!("function symbol {c} is not in the signature"));
            }
            let args = (0..self.sig.arity(i)).map(|_| self.term()).collect::<Result<Vec<_>, _>>()?;
            Term::App(self.sig.name(i).to_string(), args)
        } else {
            return not_a_code(format!("symbol {c} cannot start a term"));
        };
        Ok(Term::succ_n(Nat::from(succs), t))
    }

    pub fn formula(&mut self) -> Result<Formula, CodeError> {
        match self.next()? {
            EQ => Ok(Formula::Eq(self.term()?, self.term()?)),
            EXISTS => {
                let v = self.var()?;
                if self.next()? != EQ {
                    return not_a_code("expected `=` after the bound variable");
                }
                let lhs = self.term()?;
                if self.var()? != v || lhs.contains_var(&v) {
                    return not_a_code("malformed existential");
                }
                Ok(Formula::ExistsEq { var: v, lhs })
            }
            NOT => {
                if self.next()? != ISDEF {
                    return not_a_code("expected IsDef after ¬");
                }
                Ok(Formula::NegIsDef(self.term()?, self.term()?))
            }
            c => not_a_code(format!("symbol {c} cannot start a formula")),
        }
    }
}

/// A decoded object.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Syntax {
    Term(Term),
    Formula(Formula),
}

pub fn encode_term(t: &Term, sig: &Signature) -> Result<GNum, CodeError> {
    let mut s = Vec::new();
    term_symbols(t, sig, &mut s)?;
    code_of_symbols(&s)
}

pub fn encode_formula(f: &Formula, sig: &Signature) -> Result<GNum, CodeError> {
    let mut s = Vec::new();
    formula_symbols(f, sig, &mut s)?;
    code_of_symbols(&s)
}

pub fn encode(x: &Syntax, sig: &Signature) -> Result<GNum, CodeError> {
    match x {
        Syntax::Term(t) => encode_term(t, sig),
        Syntax::Formula(f) => encode_formula(f, sig),
    }
}

fn parse_symbols(syms: &[u64], sig: &Signature) -> Result<Syntax, CodeError> {
    let mut r = Reader { syms, pos: 0, sig };
    let x = match r.peek() {
        Some(EQ | EXISTS | NOT) => Syntax::Formula(r.formula()?),
        _ => Syntax::Term(r.term()?),
    };
    if r.pos != syms.len() {
        return not_a_code("trailing symbols");
    }
    Ok(x)
}

/// Decodes a term or formula. Anything else is reported, never a panic.
pub fn decode(code: &GNum, sig: &Signature) -> Result<Syntax, CodeError> {
    parse_symbols(&symbols_of_code(code)?, sig)
}

/// `Sub(y, u, v)`: the code of the result of putting the term coded `u`
/// for every free occurrence of the variable with symbol code `v` in the
/// object coded `y`. Works on the symbol sequences directly.
pub fn sub(y: &GNum, u: &GNum, v: &GNum, sig: &Signature) -> Result<GNum, CodeError> {
    let ys = symbols_of_code(y)?;
    parse_symbols(&ys, sig)?;
    let us = symbols_of_code(u)?;
    if !matches!(parse_symbols(&us, sig)?, Syntax::Term(_)) {
        return not_a_code("substituted object must be a term");
    }
    let v = match v.to_u64() {
        Some(c) if is_var_code(c) => c,
        _ => return not_a_code(format!("{v} is not a variable's code")),
    };
    if ys.len() > 1 && ys[0] == EXISTS && ys[1] == v {
        // v is bound throughout
        return Ok(y.clone());
    }
    if ys.len() > 1 && ys[0] == EXISTS && us.contains(&ys[1]) && ys.contains(&v) {
        return not_a_code("substitution would capture the bound variable");
    }
    let mut out = Vec::with_capacity(ys.len());
    for &c in &ys {
        if c == v {
            out.extend_from_slice(&us);
        } else {
            out.push(c);
        }
    }
    code_of_symbols(&out)
}

/// The negation template `¬IsDef(x, x)` and its code `#Neg`.
pub fn negation_template() -> Formula {
    Formula::NegIsDef(Term::var("x"), Term::var("x"))
}

/// `#Neg` together with a report describing what applying it to itself
/// would mean. Nothing is searched for and nothing is decided.
pub fn negated_self_code() -> (GNum, String) {
    let sig = Signature::default();
    let f = negation_template();
    let code = encode_formula(&f, &sig).expect("template is well formed");
    let digits = code.to_string().len();
    let report = format!(
        "template: {f}\n\
         symbols: ¬ IsDef x x = [{NOT}, {ISDEF}, 13, 13]\n\
         #Neg = 2^{NOT} · 3^{ISDEF} · 5^13 · 7^13 = {code}\n\
         Substituting the numeral of #Neg for x gives the sentence ¬IsDef(#Neg, #Neg) \
         ({digits}-digit numeral, so its own code is far too large to write down). \
         It has the shape of the classical undecidable sentence: if it were provable, \
         IsDef(#Neg, #Neg) would be provable too, and conversely. No proof search is \
         attempted here."
    );
    (code, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::godel::syntax::{parse_formula, parse_term};
    use crate::rf::parse_rf;

    fn sig() -> Signature {
        Signature::from_env(
            &parse_rf(
                "def plus = primrec(proj(1,1), comp(succ, proj(3,3)))\ndef double = comp(plus, proj(1,1), proj(1,1))",
            )
            .unwrap(),
        )
    }

    #[test]
    fn variable_x_is_13() {
        assert_eq!(encode_term(&Term::var("x"), &sig()).unwrap(), BigUint::from(13u32));
        assert_eq!(encode_term(&Term::Zero, &sig()).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn successor_of_zero() {
        // S 0 = 2^9 · 3^1
        let c = encode_term(&Term::succ(Term::Zero), &sig()).unwrap();
        assert_eq!(c, BigUint::from(1536u32));
    }

    #[test]
    fn equation_of_zeros() {
        // = 0 0 = 2^3 · 3 · 5
        let f = Formula::Eq(Term::Zero, Term::Zero);
        let c = encode_formula(&f, &sig()).unwrap();
        assert_eq!(c, BigUint::from(120u32));
        assert_eq!(decode(&c, &sig()).unwrap(), Syntax::Formula(f));
    }

    #[test]
    fn round_trips() {
        let s = sig();
        for text in ["plus(x, S(0)) = S(plus(x, 0))", "∃k (double(x) = k)", "¬IsDef(x, x)", "plus.1(y, z, k) = 0"] {
            let f = parse_formula(text).unwrap();
            let c = encode_formula(&f, &s).unwrap();
            assert_eq!(decode(&c, &s).unwrap(), Syntax::Formula(f));
        }
        for text in ["x", "0", "v9", "S^4(y)", "double(plus(x, y))"] {
            let t = parse_term(text).unwrap();
            assert_eq!(decode(&encode_term(&t, &s).unwrap(), &s).unwrap(), Syntax::Term(t));
        }
    }

    #[test]
    fn non_codes_are_reported() {
        let s = sig();
        for n in [0u64, 3, 7, 9, 15, 2 * 3, 8 * 5, 1 << 13, 1 << 9, 4 * 9 * 25 * 7] {
            assert!(decode(&BigUint::from(n), &s).is_err(), "{n}");
        }
        // a function symbol outside the signature
        assert!(decode(&BigUint::from(2u32).pow(15 + 8 * 40), &s).is_err());
    }

    #[test]
    fn sub_examples() {
        let s = sig();
        let two = encode_term(&Term::num(&Nat::from(2u64)), &s).unwrap();
        let x = BigUint::from(13u32);
        let y = encode_formula(&parse_formula("x = x").unwrap(), &s).unwrap();
        let want = encode_formula(&parse_formula("S(S(0)) = S(S(0))").unwrap(), &s).unwrap();
        assert_eq!(sub(&y, &two, &x, &s).unwrap(), want);
        // no occurrence: unchanged
        let z = encode_formula(&parse_formula("y = 0").unwrap(), &s).unwrap();
        assert_eq!(sub(&z, &two, &x, &s).unwrap(), z);
        // bound variable is left alone
        let e = encode_formula(&parse_formula("∃x (double(y) = x)").unwrap(), &s).unwrap();
        assert_eq!(sub(&e, &two, &x, &s).unwrap(), e);
        // a lone variable
        assert_eq!(sub(&x, &two, &x, &s).unwrap(), two);
        assert!(sub(&y, &two, &BigUint::from(14u32), &s).is_err());
    }

    #[test]
    fn negation_code() {
        let (c, report) = negated_self_code();
        let want = BigUint::from(2u32).pow(7)
            * BigUint::from(3u32).pow(11)
            * BigUint::from(5u32).pow(13)
            * BigUint::from(7u32).pow(13);
        assert_eq!(c, want);
        assert_eq!(c.to_string(), "2681812113526379531250000000");
        assert_eq!(decode(&c, &Signature::default()).unwrap(), Syntax::Formula(negation_template()));
        assert!(report.contains("undecidable sentence"));
    }

    #[test]
    fn primes_are_primes() {
        assert_eq!(primes(10), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(primes(1000)[999], 7919);
    }
}
