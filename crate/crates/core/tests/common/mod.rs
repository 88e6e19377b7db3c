//! Random generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use muwork_core::godel::{Formula, Signature, Term};
use muwork_core::nat::Nat;
use muwork_core::rf::RfExpr;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub const MAX_ARITY: usize = 6;

/// A random primitive recursive expression of the given arity (at least 1), at most
/// `depth` levels deep, with every subexpression of arity at most
/// [`MAX_ARITY`].
pub fn random_pr<R: Rng>(rng: &mut R, arity: usize, depth: usize) -> RfExpr {
    if depth <= 1 || rng.gen_bool(0.3) {
        return random_leaf(rng, arity);
    }
    match rng.gen_range(0..2) {
        0 => {
            let m = rng.gen_range(1..=3);
            let h = random_pr(rng, m, depth - 1);
            let gs = (0..m).map(|_| random_pr(rng, arity, depth - 1)).collect();
            RfExpr::comp(h, gs)
        }
        _ if (1..MAX_ARITY).contains(&arity) => {
            let base = if arity == 1 {
                if rng.gen_bool(0.5) {
                    RfExpr::Zero
                } else {
                    RfExpr::constant(rng.gen_range(0..4))
                }
            } else {
                random_pr(rng, arity - 1, depth - 1)
            };
            RfExpr::primrec(base, random_pr(rng, arity + 1, depth - 1))
        }
        _ => random_leaf(rng, arity),
    }
}

fn random_leaf<R: Rng>(rng: &mut R, arity: usize) -> RfExpr {
    if arity == 1 {
        match rng.gen_range(0..4) {
            0 => return RfExpr::Zero,
            1 => return RfExpr::Succ,
            2 => return RfExpr::constant(rng.gen_range(0..5)),
            _ => {}
        }
    }
    RfExpr::proj(arity, rng.gen_range(1..=arity))
}

pub fn random_args<R: Rng>(rng: &mut R, arity: usize, max: u64) -> Vec<Nat> {
    (0..arity).map(|_| Nat::from(rng.gen_range(0..=max))).collect()
}

const VARS: [&str; 4] = ["x", "y", "z", "k"];

pub fn random_term<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Term {
    let leaf = depth == 0 || rng.gen_bool(0.35);
    match rng.gen_range(0..if leaf { 2 } else { 4 }) {
        0 => Term::var(VARS.choose(rng).unwrap()),
        1 => Term::num(&Nat::from(rng.gen_range(0..5u64))),
        2 => Term::succ(random_term(rng, sig, depth - 1)),
        _ => {
            let i = rng.gen_range(0..sig.len());
            let args = (0..sig.arity(i)).map(|_| random_term(rng, sig, depth - 1)).collect();
            Term::App(sig.name(i).to_string(), args)
        }
    }
}

pub fn random_formula<R: Rng>(rng: &mut R, sig: &Signature, depth: usize) -> Formula {
    match rng.gen_range(0..3) {
        0 => Formula::Eq(random_term(rng, sig, depth), random_term(rng, sig, depth)),
        1 => {
            let var = VARS.choose(rng).unwrap().to_string();
            let mut lhs = random_term(rng, sig, depth);
            // the bound variable may not occur on the left
            while lhs.contains_var(&var) {
                lhs = random_term(rng, sig, depth);
            }
            Formula::ExistsEq { var, lhs }
        }
        _ => Formula::NegIsDef(random_term(rng, sig, depth), random_term(rng, sig, depth)),
    }
}

/// Coefficients, constant term first, of a random polynomial of degree
/// 0..=5 with |coefficients| <= 20 and a nonzero leading coefficient. Half
/// of them are products of linear factors, so that roots actually occur.
pub fn random_poly<R: Rng>(rng: &mut R) -> Vec<i64> {
    loop {
        let c = if rng.gen_bool(0.5) {
            let deg = rng.gen_range(0..=5);
            let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-20..=20)).collect();
            while c[deg] == 0 {
                c[deg] = rng.gen_range(-20..=20);
            }
            c
        } else {
            let mut c = vec![*[-2i64, -1, 1, 2].choose(rng).unwrap()];
            for _ in 0..rng.gen_range(1..=5) {
                let r: i64 = rng.gen_range(-4..=4);
                // multiply by (x - r)
                let mut next = vec![0; c.len() + 1];
                for (i, &a) in c.iter().enumerate() {
                    next[i + 1] += a;
                    next[i] -= r * a;
                }
                c = next;
            }
            c
        };
        if c.iter().all(|a| a.abs() <= 20) {
            return c;
        }
    }
}
