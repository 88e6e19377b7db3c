//! Function symbols of the object language.
//!
//! Every named definition is a function symbol, and so is every
//! subexpression of a definition that is not a call: the `j`-th child of
//! symbol `f` is named `f.j`. Children are numbered as follows:
//! `comp(h, g1, ..)` has `h` as child 0 and `g_j` as child `j`;
//! `primrec(b, s)` has `b` 0 and `s` 1; `mu(body)` has `body` 0. A call
//! child is the callee's own symbol. Symbols are numbered in that
//! pre-order, definition by definition, which fixes their codes.

use std::collections::HashMap;

use crate::nat::Nat;
use crate::rf::{DefEnv, RfExpr};

/// How a symbol is defined, with children given as symbol numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Node {
    Zero,
    Const(Nat),
    Succ,
    Proj(usize),
    Compose(usize, Vec<usize>),
    PrimRec(usize, usize),
    Mu(usize, Option<Nat>),
    Call(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    pub node: Node,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<Symbol>,
    index: HashMap<String, usize>,
}

/// Name given to an anonymous expression that needs a symbol.
pub const MAIN: &str = "main";

impl Signature {
    pub fn from_env(env: &DefEnv) -> Self {
        let mut s = Signature::default();
        for d in env.iter() {
            s.add(&d.name, &d.expr, d.expr.arity());
        }
        s
    }

    /// Adds `expr` under [`MAIN`] (or `main2`, ... if taken) unless it is
    /// already a call; returns the symbol standing for `expr`.
    pub fn add_root(&mut self, expr: &RfExpr) -> usize {
        if let RfExpr::Call { name, .. } = expr {
            if let Some(i) = self.index_of(name) {
                return i;
            }
        }
        let mut name = MAIN.to_string();
        let mut n = 1;
        while self.index.contains_key(&name) {
            n += 1;
            name = format!("{MAIN}{n}");
        }
        self.add(&name, expr, expr.arity())
    }

    fn add(&mut self, name: &str, e: &RfExpr, arity: usize) -> usize {
        let me = self.symbols.len();
        self.symbols.push(Symbol { name: name.to_string(), arity, node: Node::Zero });
        self.index.insert(name.to_string(), me);
        let child = |s: &mut Self, j: usize, c: &RfExpr, ar: usize| match c {
            RfExpr::Call { name: callee, .. } => s.index[callee],
            _ => s.add(&format!("{name}.{j}"), c, ar),
        };
        let node = match e {
            RfExpr::Zero => Node::Zero,
            RfExpr::Const(k) => Node::Const(k.clone()),
            RfExpr::Succ => Node::Succ,
            RfExpr::Proj { index, .. } => Node::Proj(*index),
            RfExpr::Compose(h, gs) => {
                let h = child(self, 0, h, gs.len());
                let gs = gs.iter().enumerate().map(|(j, g)| child(self, j + 1, g, arity)).collect();
                Node::Compose(h, gs)
            }
            RfExpr::PrimRec(b, st) => {
                let b = child(self, 0, b, arity - 1);
                let st = child(self, 1, st, arity + 1);
                Node::PrimRec(b, st)
            }
            RfExpr::Mu { body, bound } => Node::Mu(child(self, 0, body, arity + 1), bound.clone()),
            RfExpr::Call { name: callee, .. } => Node::Call(self.index[callee]),
        };
        self.symbols[me].node = node;
        me
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn symbol(&self, i: usize) -> &Symbol {
        &self.symbols[i]
    }

    pub fn name(&self, i: usize) -> &str {
        &self.symbols[i].name
    }

    pub fn arity(&self, i: usize) -> usize {
        self.symbols[i].arity
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }
}
