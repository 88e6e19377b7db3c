//! Fuelled big-step evaluation.
//!
//! Cost model: every expression node evaluated costs one unit, every
//! iteration of a recursion costs one unit, and every candidate tried by a
//! search costs one unit, on top of whatever the subexpressions cost. The
//! evaluator memoises named calls and recursion prefixes, but a cache hit
//! charges exactly the cost the original evaluation was charged, so
//! outcomes and step counts are those of a plain evaluation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nat::Nat;
use crate::poly::RootCertificate;
use crate::rf::{DefEnv, RfExpr};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome")]
pub enum EvalOutcome {
    Defined { value: Nat, steps: u64 },
    ProvenUndefined { reason: UndefReason },
    Exhausted { fuel_spent: u64 },
}

impl EvalOutcome {
    pub fn value(&self) -> Option<&Nat> {
        match self {
            EvalOutcome::Defined { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, EvalOutcome::Defined { .. })
    }
}

/// Why a value provably does not exist. Each variant carries what is
/// needed to re-check the claim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum UndefReason {
    /// Every candidate `0..=bound` was tried and none satisfied the search.
    BoundedSearchExhausted { bound: Nat },
    /// The search condition can never evaluate to zero.
    ConstantFalseCondition,
    /// The search condition is a polynomial with no admissible integer root.
    NoIntegerRoot { certificate: RootCertificate },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("expected {expected} argument(s), got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("unknown function `{0}`")]
    UnknownCall(String),
}

/// Why an evaluation stopped short of a value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Stop {
    Exhausted,
    Undefined(UndefReason),
}

/// Fuel counter for one evaluation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Meter {
    pub used: u64,
    pub limit: u64,
}

impl Meter {
    pub fn new(limit: u64) -> Self {
        Meter { used: 0, limit }
    }

    #[inline]
    pub fn charge(&mut self, n: u64) -> Result<(), Stop> {
        match self.used.checked_add(n) {
            Some(u) if u <= self.limit => {
                self.used = u;
                Ok(())
            }
            _ => {
                self.used = self.limit;
                Err(Stop::Exhausted)
            }
        }
    }
}

/// True when `e` is nonzero wherever it is defined, judged syntactically.
pub fn never_zero(e: &RfExpr, env: &DefEnv) -> bool {
    match e {
        RfExpr::Const(k) => !k.is_zero(),
        RfExpr::Succ => true,
        RfExpr::Compose(f, _) => never_zero(f, env),
        RfExpr::PrimRec(b, s) => never_zero(b, env) && never_zero(s, env),
        RfExpr::Call { name, .. } => env.get(name).is_some_and(|b| never_zero(b, env)),
        RfExpr::Zero | RfExpr::Proj { .. } | RfExpr::Mu { .. } => false,
    }
}

/// Cached value of `φ(params, k)` for a recursion node: `(value, cost)`
/// where `cost` counts everything after the node's own unit.
type Table = Vec<(Nat, u64)>;

/// Recursions shorter than this are not tabled.
const TABLE_MIN: u64 = 4;
/// Calls cheaper than this are not memoised.
const CALL_MIN_COST: u64 = 16;

/// An evaluator bound to one environment. Its caches persist across
/// [`Evaluator::eval`] calls, which is what makes long scans affordable.
pub struct Evaluator<'e> {
    env: &'e DefEnv,
    calls: HashMap<(usize, Vec<Nat>), (Nat, u64)>,
    tables: HashMap<(usize, Vec<Nat>), Table>,
    cached: usize,
    capacity: usize,
}

impl<'e> Evaluator<'e> {
    pub fn new(env: &'e DefEnv) -> Self {
        Self::with_capacity(env, 8_000_000)
    }

    /// `capacity` bounds the number of cached entries; zero disables caching.
    pub fn with_capacity(env: &'e DefEnv, capacity: usize) -> Self {
        Evaluator { env, calls: HashMap::new(), tables: HashMap::new(), cached: 0, capacity }
    }

    pub fn env(&self) -> &'e DefEnv {
        self.env
    }

    pub fn eval(&mut self, expr: &RfExpr, args: &[Nat], fuel: u64) -> Result<EvalOutcome, EvalError> {
        self.precheck(expr, args)?;
        let mut m = Meter::new(fuel);
        let r = self.ev(expr, args, &mut m);
        Ok(finish(r, &m))
    }

    pub fn mu_search(
        &mut self,
        body: &RfExpr,
        prefix: &[Nat],
        bound: Option<&Nat>,
        fuel: u64,
    ) -> Result<EvalOutcome, EvalError> {
        if body.arity() != prefix.len() + 1 {
            return Err(EvalError::ArityMismatch { expected: body.arity() - 1, got: prefix.len() });
        }
        let mut m = Meter::new(fuel);
        let r = self.search(body, prefix, bound, &mut m);
        Ok(finish(r, &m))
    }

    fn precheck(&self, expr: &RfExpr, args: &[Nat]) -> Result<(), EvalError> {
        if let RfExpr::Call { name, .. } = expr {
            if self.env.get(name).is_none() {
                return Err(EvalError::UnknownCall(name.clone()));
            }
        }
        if expr.arity() != args.len() {
            return Err(EvalError::ArityMismatch { expected: expr.arity(), got: args.len() });
        }
        Ok(())
    }

    fn room(&self) -> bool {
        self.cached < self.capacity
    }

    pub(crate) fn ev(&mut self, e: &RfExpr, args: &[Nat], m: &mut Meter) -> Result<Nat, Stop> {
        m.charge(1)?;
        match e {
            RfExpr::Zero => Ok(Nat::ZERO),
            RfExpr::Const(k) => Ok(k.clone()),
            RfExpr::Succ => Ok(args[0].succ()),
            RfExpr::Proj { index, .. } => Ok(args[index - 1].clone()),
            RfExpr::Compose(f, gs) => {
                let mut vals = Vec::with_capacity(gs.len());
                for g in gs {
                    vals.push(self.ev(g, args, m)?);
                }
                self.ev(f, &vals, m)
            }
            RfExpr::PrimRec(base, step) => self.primrec(e, base, step, args, m),
            RfExpr::Mu { body, bound } => self.search(body, args, bound.as_ref(), m),
            RfExpr::Call { name, .. } => {
                let idx = self.env.index_of(name).expect("calls are resolved at parse time");
                let body = &self.env.definition(idx).expect("index in range").expr;
                if self.capacity == 0 {
                    return self.ev(body, args, m);
                }
                let key = (idx, args.to_vec());
                if let Some((v, cost)) = self.calls.get(&key) {
                    let v = v.clone();
                    m.charge(*cost)?;
                    return Ok(v);
                }
                let start = m.used;
                let v = self.ev(body, args, m)?;
                let cost = m.used - start;
                if cost >= CALL_MIN_COST && self.room() {
                    self.calls.insert(key, (v.clone(), cost));
                    self.cached += 1;
                }
                Ok(v)
            }
        }
    }

    fn primrec(
        &mut self,
        node: &RfExpr,
        base: &RfExpr,
        step: &RfExpr,
        args: &[Nat],
        m: &mut Meter,
    ) -> Result<Nat, Stop> {
        let (params, count) = args.split_at(args.len() - 1);
        let Some(count) = count[0].to_u64() else {
            // more iterations than any fuel budget can pay for
            m.used = m.limit;
            return Err(Stop::Exhausted);
        };
        let use_table = self.capacity > 0 && count >= TABLE_MIN;
        let key = (node as *const RfExpr as usize, params.to_vec());

        let start = m.used;
        let (mut k, mut acc, mut table) = match use_table.then(|| self.tables.remove(&key)).flatten() {
            Some(t) if (t.len() as u64) > count => {
                let (v, cost) = t[count as usize].clone();
                self.tables.insert(key, t);
                m.charge(cost)?;
                return Ok(v);
            }
            Some(t) => {
                let (v, cost) = t.last().expect("tables are never empty").clone();
                if let Err(s) = m.charge(cost) {
                    self.tables.insert(key, t);
                    return Err(s);
                }
                (t.len() as u64 - 1, v, t)
            }
            None => {
                let v = self.ev(base, params, m)?;
                let t = if use_table { vec![(v.clone(), m.used - start)] } else { Vec::new() };
                (0, v, t)
            }
        };

        let mut step_args: Vec<Nat> = Vec::with_capacity(params.len() + 2);
        let result = loop {
            if k == count {
                break Ok(acc);
            }
            if let Err(s) = m.charge(1) {
                break Err(s);
            }
            step_args.clear();
            step_args.extend_from_slice(params);
            step_args.push(Nat::from(k));
            step_args.push(acc);
            match self.ev(step, &step_args, m) {
                Ok(v) => acc = v,
                Err(s) => break Err(s),
            }
            k += 1;
            if use_table && self.room() {
                table.push((acc.clone(), m.used - start));
                self.cached += 1;
            }
        };
        if use_table && !table.is_empty() {
            self.tables.insert(key, table);
        }
        result
    }

    pub(crate) fn search(
        &mut self,
        body: &RfExpr,
        prefix: &[Nat],
        bound: Option<&Nat>,
        m: &mut Meter,
    ) -> Result<Nat, Stop> {
        if bound.is_none() && never_zero(body, self.env) {
            return Err(Stop::Undefined(UndefReason::ConstantFalseCondition));
        }
        let mut args: Vec<Nat> = prefix.to_vec();
        args.push(Nat::ZERO);
        let last = prefix.len();
        loop {
            if let Some(b) = bound {
                if &args[last] > b {
                    return Err(Stop::Undefined(UndefReason::BoundedSearchExhausted { bound: b.clone() }));
                }
            }
            m.charge(1)?;
            if self.ev(body, &args, m)?.is_zero() {
                return Ok(args[last].clone());
            }
            args[last] = args[last].succ();
        }
    }
}

fn finish(r: Result<Nat, Stop>, m: &Meter) -> EvalOutcome {
    match r {
        Ok(value) => EvalOutcome::Defined { value, steps: m.used },
        Err(Stop::Exhausted) => EvalOutcome::Exhausted { fuel_spent: m.used },
        Err(Stop::Undefined(reason)) => EvalOutcome::ProvenUndefined { reason },
    }
}

/// Evaluates `expr` at `args` with `fuel` units.
pub fn eval(expr: &RfExpr, args: &[Nat], fuel: u64, env: &DefEnv) -> Result<EvalOutcome, EvalError> {
    Evaluator::new(env).eval(expr, args, fuel)
}

/// Least `z` (up to `bound`, if given) with `body(prefix, z) = 0`.
pub fn mu_search(
    body: &RfExpr,
    prefix: &[Nat],
    bound: Option<&Nat>,
    fuel: u64,
    env: &DefEnv,
) -> Result<EvalOutcome, EvalError> {
    Evaluator::new(env).mu_search(body, prefix, bound, fuel)
}

/// Convenience for tests and tools: naturals from small integers.
pub fn nats(xs: &[u64]) -> Vec<Nat> {
    xs.iter().map(|&x| Nat::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rf::parse_rf;

    const LIB: &str = "
        def plus  = primrec(proj(1,1), comp(succ, proj(3,3)))
        def pred  = primrec(zero, proj(2,1))
        def monus = primrec(proj(1,1), comp(pred, proj(3,3)))
        def times = primrec(zero, comp(plus, proj(3,3), proj(3,1)))
        def sq1   = comp(plus, comp(times, proj(1,1), proj(1,1)), const(1))
        def nosol = mu(comp(sq1, proj(1,1)))
        def m3    = mu(comp(monus, proj(1,1), const(3)))
    ";

    fn lib() -> DefEnv {
        parse_rf(LIB).unwrap()
    }

    /// Independent reference semantics: direct recursion, no fuel, no caches.
    fn oracle(e: &RfExpr, args: &[u64], env: &DefEnv) -> Option<u64> {
        match e {
            RfExpr::Zero => Some(0),
            RfExpr::Const(k) => k.to_u64(),
            RfExpr::Succ => Some(args[0] + 1),
            RfExpr::Proj { index, .. } => Some(args[index - 1]),
            RfExpr::Compose(f, gs) => {
                let vs: Option<Vec<u64>> = gs.iter().map(|g| oracle(g, args, env)).collect();
                oracle(f, &vs?, env)
            }
            RfExpr::PrimRec(b, s) => {
                let (p, n) = args.split_at(args.len() - 1);
                if n[0] == 0 {
                    oracle(b, p, env)
                } else {
                    let mut a = p.to_vec();
                    a.push(n[0] - 1);
                    let prev = oracle(e, &a, env)?;
                    a.push(prev);
                    oracle(s, &a, env)
                }
            }
            RfExpr::Mu { body, bound } => {
                let lim = bound.as_ref().and_then(Nat::to_u64).unwrap_or(1000);
                (0..=lim).find(|&z| {
                    let mut a = args.to_vec();
                    a.push(z);
                    oracle(body, &a, env) == Some(0)
                })
            }
            RfExpr::Call { name, .. } => oracle(env.get(name)?, args, env),
        }
    }

    #[test]
    fn successor() {
        let env = DefEnv::new();
        let out = eval(&RfExpr::Succ, &nats(&[4]), 100, &env).unwrap();
        assert_eq!(out.value(), Some(&Nat::from(5u64)));
    }

    #[test]
    fn plus_matches_oracle() {
        let env = lib();
        let plus = env.call("plus").unwrap();
        assert_eq!(oracle(&plus, &[2, 3], &env), Some(5));
        let out = eval(&plus, &nats(&[2, 3]), 10_000, &env).unwrap();
        assert_eq!(out.value(), Some(&Nat::from(5u64)));
        for a in 0..6 {
            for b in 0..6 {
                let o = eval(&plus, &nats(&[a, b]), 10_000, &env).unwrap();
                assert_eq!(o.value().and_then(Nat::to_u64), oracle(&plus, &[a, b], &env));
            }
        }
    }

    #[test]
    fn plus_step_count_is_exact() {
        // call 1, primrec 1, base proj 1, then per iteration 1 + comp 1 + proj 1 + succ 1
        let env = lib();
        let out = eval(&env.call("plus").unwrap(), &nats(&[2, 3]), 10_000, &env).unwrap();
        assert_eq!(out, EvalOutcome::Defined { value: Nat::from(5u64), steps: 3 + 3 * 4 });
    }

    #[test]
    fn unsatisfiable_search_runs_out_of_fuel() {
        let env = lib();
        let out = eval(&env.call("nosol").unwrap(), &[], 1000, &env).unwrap();
        assert_eq!(out, EvalOutcome::Exhausted { fuel_spent: 1000 });
    }

    #[test]
    fn search_finds_first_zero() {
        let env = lib();
        let body = RfExpr::comp(env.call("monus").unwrap(), vec![RfExpr::proj(1, 1), RfExpr::constant(3)]);
        // brute force: 0∸3, 1∸3, 2∸3 are 0 too, so minimality gives 0
        let out = mu_search(&body, &[], None, 10_000, &env).unwrap();
        assert_eq!(out.value(), Some(&Nat::from(0u64)));
        // the "zero first at 3" body is 3 ∸ z
        let body = RfExpr::comp(env.call("monus").unwrap(), vec![RfExpr::constant(3), RfExpr::proj(1, 1)]);
        for z in 0..3u64 {
            assert_ne!(oracle(&body, &[z], &env), Some(0));
        }
        let out = mu_search(&body, &[], None, 10_000, &env).unwrap();
        assert_eq!(out.value(), Some(&Nat::from(3u64)));
    }

    #[test]
    fn bounded_search_exhaustion_is_proven() {
        let env = DefEnv::new();
        let bound = Nat::from(50u64);
        let out = mu_search(&RfExpr::constant(1), &[], Some(&bound), 10_000, &env).unwrap();
        assert_eq!(out, EvalOutcome::ProvenUndefined { reason: UndefReason::BoundedSearchExhausted { bound } });
        let out = mu_search(&RfExpr::constant(0), &[], None, 10, &env).unwrap();
        assert_eq!(out.value(), Some(&Nat::ZERO));
    }

    #[test]
    fn constant_false_condition() {
        let env = DefEnv::new();
        let out = mu_search(&RfExpr::constant(1), &[], None, 10_000, &env).unwrap();
        assert_eq!(out, EvalOutcome::ProvenUndefined { reason: UndefReason::ConstantFalseCondition });
        let e = RfExpr::mu(RfExpr::comp(RfExpr::Succ, vec![RfExpr::proj(2, 1)]));
        let out = eval(&e, &nats(&[3]), 100, &env).unwrap();
        assert!(matches!(out, EvalOutcome::ProvenUndefined { .. }));
    }

    #[test]
    fn undefined_candidate_blocks_search() {
        // body(z) = nosol-like search that never returns, so z = 0 never resolves
        let env = lib();
        let body = RfExpr::comp(env.call("nosol").unwrap(), vec![]);
        assert!(crate::rf::check(&body, &env).is_err());
        let stuck = RfExpr::comp(
            RfExpr::mu(RfExpr::comp(env.call("sq1").unwrap(), vec![RfExpr::proj(2, 2)])),
            vec![RfExpr::proj(1, 1)],
        );
        let out = mu_search(&stuck, &[], None, 5000, &env).unwrap();
        assert_eq!(out, EvalOutcome::Exhausted { fuel_spent: 5000 });
    }

    #[test]
    fn arity_is_checked() {
        let env = lib();
        let err = eval(&env.call("plus").unwrap(), &nats(&[1]), 10, &env).unwrap_err();
        assert_eq!(err, EvalError::ArityMismatch { expected: 2, got: 1 });
    }

    #[test]
    fn caching_does_not_change_outcomes() {
        let env = lib();
        let times = env.call("times").unwrap();
        let mut warm = Evaluator::new(&env);
        for a in 0..8u64 {
            for b in 0..8u64 {
                let cold = Evaluator::with_capacity(&env, 0).eval(&times, &nats(&[a, b]), 1_000_000).unwrap();
                let hot = warm.eval(&times, &nats(&[a, b]), 1_000_000).unwrap();
                assert_eq!(cold, hot);
                assert_eq!(cold.value().and_then(Nat::to_u64), Some(a * b));
            }
        }
        // the exhaustion boundary survives caching too
        let cold = Evaluator::with_capacity(&env, 0).eval(&times, &nats(&[7, 7]), 1_000_000).unwrap();
        let EvalOutcome::Defined { steps, .. } = cold else { panic!() };
        for fuel in [steps - 1, steps, steps + 1] {
            let c = Evaluator::with_capacity(&env, 0).eval(&times, &nats(&[7, 7]), fuel).unwrap();
            let h = warm.eval(&times, &nats(&[7, 7]), fuel).unwrap();
            assert_eq!(c, h, "fuel {fuel}");
        }
    }

    #[test]
    fn m3_search() {
        let env = lib();
        let out = eval(&env.call("m3").unwrap(), &[], 10_000, &env).unwrap();
        assert_eq!(out.value(), Some(&Nat::ZERO));
    }
}
