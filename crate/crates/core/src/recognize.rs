//! Syntactic recognition of search bodies that are polynomial equations in
//! the searched variable.
//!
//! A body is recognized when, after fixing its leading arguments, it is a
//! sum (via `plus`) of terms of these shapes:
//!
//! * `P` where `P` is a ring expression in the searched variable: the term
//!   is zero iff `P(x) = 0`;
//! * `absdiff(P, Q)`: zero iff `P(x) − Q(x) = 0`;
//! * `le(x, c)` with `c` constant: zero iff `x > c`.
//!
//! Ring expressions are built from `zero`, `const`, `succ`, projections,
//! `plus` and `times`. Library functions are recognized by comparing their
//! fully inlined definition with the canonical definitions in [`CANONICAL`],
//! so the names used in a file do not matter. A sum of naturals is zero iff
//! every summand is, so the body vanishes at `x` iff every equation holds
//! and every constraint is met.

use std::sync::OnceLock;

use num_bigint::BigInt;

use crate::nat::Nat;
use crate::poly::Polynomial;
use crate::rf::{parse_rf, DefEnv, RfExpr};

/// Canonical arithmetic definitions understood by the recognizer.
pub const CANONICAL: &str = "\
def plus = primrec(proj(1,1), comp(succ, proj(3,3)))
def times = primrec(zero, comp(plus, proj(3,3), proj(3,1)))
def pred = primrec(zero, proj(2,1))
def monus = primrec(proj(1,1), comp(pred, proj(3,3)))
def nsg = primrec(const(1), comp(zero, proj(2,1)))
def absdiff = comp(plus, comp(monus, proj(2,1), proj(2,2)), comp(monus, proj(2,2), proj(2,1)))
def le = comp(nsg, comp(monus, proj(2,1), proj(2,2)))
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Lib {
    Plus,
    Times,
    AbsDiff,
    Le,
}

struct Canon {
    plus: RfExpr,
    times: RfExpr,
    absdiff: RfExpr,
    le: RfExpr,
}

fn canon() -> &'static Canon {
    static C: OnceLock<Canon> = OnceLock::new();
    C.get_or_init(|| {
        let env = parse_rf(CANONICAL).expect("canonical library parses");
        let get = |n: &str| env.inline(&env.call(n).unwrap());
        Canon { plus: get("plus"), times: get("times"), absdiff: get("absdiff"), le: get("le") }
    })
}

fn library(f: &RfExpr, env: &DefEnv) -> Option<Lib> {
    if !matches!(f, RfExpr::Call { .. } | RfExpr::PrimRec(..) | RfExpr::Compose(..)) {
        return None;
    }
    let c = canon();
    let full = env.inline(f);
    [(&c.plus, Lib::Plus), (&c.times, Lib::Times), (&c.absdiff, Lib::AbsDiff), (&c.le, Lib::Le)]
        .into_iter()
        .find(|(e, _)| **e == full)
        .map(|(_, l)| l)
}

/// A recognized search body: equations `p = 0` that must all hold, and an
/// exclusive lower limit on the searched variable (`-1` when unconstrained).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolySearch {
    pub equations: Vec<Polynomial>,
    pub lower: BigInt,
}

/// Recognizes `body(prefix, x)` as a polynomial search in `x`.
pub fn recognize(body: &RfExpr, prefix: &[Nat], env: &DefEnv) -> Option<PolySearch> {
    let mut vars: Vec<Polynomial> = prefix.iter().map(|n| Polynomial::constant(BigInt::from(n.to_biguint()))).collect();
    vars.push(Polynomial::x());
    let mut out = PolySearch { equations: Vec::new(), lower: BigInt::from(-1) };
    sum_terms(body, &vars, env, &mut out)?;
    if out.equations.is_empty() {
        return None;
    }
    Some(out)
}

fn resolve<'a>(e: &'a RfExpr, env: &'a DefEnv) -> &'a RfExpr {
    let mut e = e;
    while let RfExpr::Call { name, .. } = e {
        match env.get(name) {
            Some(b) if library(e, env).is_none() => e = b,
            _ => break,
        }
    }
    e
}

fn sum_terms(e: &RfExpr, vars: &[Polynomial], env: &DefEnv, out: &mut PolySearch) -> Option<()> {
    let e = resolve(e, env);
    if let Some(p) = ring(e, vars, env) {
        out.equations.push(p);
        return Some(());
    }
    if let RfExpr::Compose(f, gs) = e {
        match library(f, env) {
            Some(Lib::Plus) => {
                sum_terms(&gs[0], vars, env, out)?;
                return sum_terms(&gs[1], vars, env, out);
            }
            Some(Lib::AbsDiff) => {
                let p = ring(&gs[0], vars, env)?;
                let q = ring(&gs[1], vars, env)?;
                out.equations.push(p.sub(&q));
                return Some(());
            }
            Some(Lib::Le) => {
                let a = ring(&gs[0], vars, env)?;
                let c = ring(&gs[1], vars, env)?;
                if a != Polynomial::x() || c.degree().unwrap_or(0) > 0 {
                    return None;
                }
                let c = c.coeffs().first().cloned().unwrap_or_default();
                if c > out.lower {
                    out.lower = c;
                }
                return Some(());
            }
            _ => {}
        }
    }
    None
}

fn ring(e: &RfExpr, vars: &[Polynomial], env: &DefEnv) -> Option<Polynomial> {
    let e = resolve(e, env);
    match e {
        RfExpr::Zero => Some(Polynomial::zero()),
        RfExpr::Const(k) => Some(Polynomial::constant(BigInt::from(k.to_biguint()))),
        RfExpr::Succ => Some(vars[0].add(&Polynomial::from_i64(&[1]))),
        RfExpr::Proj { index, .. } => Some(vars[index - 1].clone()),
        RfExpr::Compose(f, gs) => {
            let args = gs.iter().map(|g| ring(g, vars, env)).collect::<Option<Vec<_>>>()?;
            match library(f, env) {
                Some(Lib::Plus) => Some(args[0].add(&args[1])),
                Some(Lib::Times) => Some(args[0].mul(&args[1])),
                Some(_) => None,
                None => ring(f, &args, env),
            }
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::parse_into;

    fn env_with(extra: &str) -> DefEnv {
        let mut env = parse_rf(CANONICAL).unwrap();
        parse_into(extra, &mut env).unwrap();
        env
    }

    #[test]
    fn square_plus_one() {
        let env = env_with("def f = comp(plus, comp(times, proj(1,1), proj(1,1)), const(1))");
        let r = recognize(env.get("f").unwrap(), &[], &env).unwrap();
        assert_eq!(r.equations, vec![Polynomial::from_i64(&[1, 0, 1])]);
        assert_eq!(r.lower, BigInt::from(-1));
    }

    #[test]
    fn equation_with_lower_limit() {
        let env = env_with(
            "def b = comp(plus, comp(absdiff, proj(2,2), comp(const(3), proj(2,1))), comp(le, proj(2,2), proj(2,1)))",
        );
        let r = recognize(env.get("b").unwrap(), &[Nat::from(5u64)], &env).unwrap();
        assert_eq!(r.equations, vec![Polynomial::from_i64(&[-3, 1])]);
        assert_eq!(r.lower, BigInt::from(5));
    }

    #[test]
    fn renamed_library_functions_are_recognized() {
        let env = parse_rf(
            "def add = primrec(proj(1,1), comp(succ, proj(3,3)))
             def mul = primrec(zero, comp(add, proj(3,3), proj(3,1)))
             def f = comp(mul, succ, succ)",
        )
        .unwrap();
        let r = recognize(env.get("f").unwrap(), &[], &env).unwrap();
        assert_eq!(r.equations, vec![Polynomial::from_i64(&[1, 2, 1])]);
    }

    #[test]
    fn other_bodies_are_not_recognized() {
        let env = env_with("def m = comp(monus, proj(1,1), const(3))");
        assert!(recognize(env.get("m").unwrap(), &[], &env).is_none());
        assert!(recognize(&RfExpr::mu(RfExpr::proj(2, 1)), &[], &env).is_none());
        // a bare constraint carries no equation
        let env = env_with("def c = comp(le, proj(1,1), const(4))");
        assert!(recognize(env.get("c").unwrap(), &[], &env).is_none());
    }
}
