//! Transcription of partial recursive expressions into counter-machine
//! programs.
//!
//! Scheme (fixed, so step counts are reproducible):
//!
//! * `Z1` is set to 1 by the first instruction and never changes; an
//!   unconditional jump is `IFNZ Z1 GOTO L`.
//! * `Z2` is the scratch register of the copy macro and is zero between
//!   copies.
//! * Code for a subexpression reads its input registers without changing
//!   them and leaves its result in a fresh output register, which it clears
//!   first. Every other scratch register is allocated fresh, in emission
//!   order, as `Z3, Z4, ...`.
//! * Composition evaluates the inner functions left to right; projections
//!   among them are passed through as the input register itself.
//! * Recursion is a counting loop over a copy of the recursion argument.
//! * Search is a loop that tests the body's output register and increments
//!   the candidate. A bounded search keeps its remaining budget as a binary
//!   counter spread over 0/1 registers, so a large bound costs a few
//!   registers rather than a unary count. A search that runs past its bound
//!   falls into a one-instruction self-loop, so the compiled program
//!   diverges exactly where the expression is undefined.
//! * Named definitions are expanded inline.

use num_bigint::BigUint;

use crate::imp::{ImpProgram, Instr};
use crate::nat::Nat;
use crate::rf::{DefEnv, RfExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Label(usize);

#[derive(Debug, Clone, Copy)]
enum Item {
    Mark(Label),
    Inc(usize),
    Dec(usize),
    IfNz(usize, Label),
    Halt,
}

const ONE: usize = 1;
const COPY_TMP: usize = 2;

struct Gen<'e> {
    env: &'e DefEnv,
    items: Vec<Item>,
    labels: usize,
    /// Highest scratch index handed out so far.
    z: usize,
}

/// Registers are addressed as `Reg::In(i)`, `Reg::Out` and `Reg::Z(k)`
/// during generation and mapped to slots once the input count is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reg {
    In(usize),
    Out,
    Z(usize),
}

impl<'e> Gen<'e> {
    fn label(&mut self) -> Label {
        self.labels += 1;
        Label(self.labels - 1)
    }

    fn fresh(&mut self) -> Reg {
        self.z += 1;
        Reg::Z(self.z)
    }

    fn enc(&self, r: Reg) -> usize {
        // Encoded as a tagged index; resolved in `finish`.
        match r {
            Reg::In(i) => i << 2,
            Reg::Out => 1,
            Reg::Z(k) => (k << 2) | 2,
        }
    }

    fn mark(&mut self, l: Label) {
        self.items.push(Item::Mark(l));
    }

    fn inc(&mut self, r: Reg) {
        let s = self.enc(r);
        self.items.push(Item::Inc(s));
    }

    fn dec(&mut self, r: Reg) {
        let s = self.enc(r);
        self.items.push(Item::Dec(s));
    }

    fn ifnz(&mut self, r: Reg, l: Label) {
        let s = self.enc(r);
        self.items.push(Item::IfNz(s, l));
    }

    fn goto(&mut self, l: Label) {
        self.ifnz(Reg::Z(ONE), l);
    }

    /// `[A] DEC r; IFNZ r GOTO A`
    fn clear(&mut self, r: Reg) {
        let a = self.label();
        self.mark(a);
        self.dec(r);
        self.ifnz(r, a);
    }

    /// `dst <- src`, leaving `src` intact.
    fn copy(&mut self, src: Reg, dst: Reg) {
        if src == dst {
            return;
        }
        let tmp = Reg::Z(COPY_TMP);
        let (a, b, c, d, e) = (self.label(), self.label(), self.label(), self.label(), self.label());
        self.clear(dst);
        self.mark(a);
        self.ifnz(src, b);
        self.goto(c);
        self.mark(b);
        self.dec(src);
        self.inc(dst);
        self.inc(tmp);
        self.goto(a);
        self.mark(c);
        self.ifnz(tmp, d);
        self.goto(e);
        self.mark(d);
        self.dec(tmp);
        self.inc(src);
        self.goto(c);
        self.mark(e);
    }

    /// `dst <- dst + src`, consuming `src`.
    fn drain_into(&mut self, src: Reg, dst: Reg) {
        let (a, b, c) = (self.label(), self.label(), self.label());
        self.mark(a);
        self.ifnz(src, b);
        self.goto(c);
        self.mark(b);
        self.dec(src);
        self.inc(dst);
        self.goto(a);
        self.mark(c);
    }

    fn set_const(&mut self, dst: Reg, k: &Nat) {
        self.clear(dst);
        match k.to_u64() {
            Some(v) if v <= 16 => (0..v).for_each(|_| self.inc(dst)),
            _ => {
                // binary expansion, most significant bit first: doubling by
                // copy-and-add keeps the code logarithmic in k
                let big: BigUint = k.to_biguint();
                let bits = big.bits();
                let t = self.fresh();
                for i in (0..bits).rev() {
                    self.copy(dst, t);
                    self.drain_into(t, dst);
                    if big.bit(i) {
                        self.inc(dst);
                    }
                }
            }
        }
    }

    fn gen(&mut self, e: &RfExpr, ins: &[Reg], out: Reg) {
        match e {
            RfExpr::Zero => self.clear(out),
            RfExpr::Const(k) => self.set_const(out, k),
            RfExpr::Succ => {
                self.copy(ins[0], out);
                self.inc(out);
            }
            RfExpr::Proj { index, .. } => self.copy(ins[index - 1], out),
            RfExpr::Compose(f, gs) => {
                let mut regs = Vec::with_capacity(gs.len());
                for g in gs {
                    match g {
                        RfExpr::Proj { index, .. } => regs.push(ins[index - 1]),
                        _ => {
                            let t = self.fresh();
                            self.gen(g, ins, t);
                            regs.push(t);
                        }
                    }
                }
                self.gen(f, &regs, out);
            }
            RfExpr::PrimRec(base, step) => {
                let (params, x) = ins.split_at(ins.len() - 1);
                let (acc, k, r, t) = (self.fresh(), self.fresh(), self.fresh(), self.fresh());
                let (lp, body, end) = (self.label(), self.label(), self.label());
                self.gen(base, params, acc);
                self.clear(k);
                self.copy(x[0], r);
                self.mark(lp);
                self.ifnz(r, body);
                self.goto(end);
                self.mark(body);
                let mut step_ins = params.to_vec();
                step_ins.push(k);
                step_ins.push(acc);
                self.gen(step, &step_ins, t);
                self.copy(t, acc);
                self.inc(k);
                self.dec(r);
                self.goto(lp);
                self.mark(end);
                self.copy(acc, out);
            }
            RfExpr::Mu { body, bound } => {
                let (z, t) = (self.fresh(), self.fresh());
                let (lp, next, end) = (self.label(), self.label(), self.label());
                // Remaining candidates after the current one, in binary,
                // one 0/1 register per bit, least significant first.
                let budget: Option<Vec<Reg>> = bound.as_ref().map(|b| {
                    let b = b.to_biguint();
                    let bits = b.bits().max(1);
                    let regs: Vec<Reg> = (0..bits).map(|_| self.fresh()).collect();
                    for (i, &r) in regs.iter().enumerate() {
                        self.clear(r);
                        if b.bit(i as u64) {
                            self.inc(r);
                        }
                    }
                    regs
                });
                self.clear(z);
                self.mark(lp);
                let mut body_ins = ins.to_vec();
                body_ins.push(z);
                self.gen(body, &body_ins, t);
                self.ifnz(t, next);
                self.copy(z, out);
                self.goto(end);
                self.mark(next);
                self.inc(z);
                match budget {
                    None => self.goto(lp),
                    Some(regs) => {
                        // Binary decrement: a set bit is cleared and the
                        // search continues; a clear bit is set and the
                        // borrow moves up. A borrow out of the top bit
                        // means the bound is passed.
                        let have: Vec<Label> = regs.iter().map(|_| self.label()).collect();
                        for (&r, &h) in regs.iter().zip(&have) {
                            self.ifnz(r, h);
                            self.inc(r);
                        }
                        let dead = self.label();
                        self.mark(dead);
                        self.goto(dead);
                        for (&r, &h) in regs.iter().zip(&have) {
                            self.mark(h);
                            self.dec(r);
                            self.goto(lp);
                        }
                    }
                }
                self.mark(end);
            }
            RfExpr::Call { name, .. } => {
                let body = self.env.get(name).expect("calls are resolved at parse time");
                self.gen(body, ins, out);
            }
        }
    }

    fn finish(self, inputs: usize) -> ImpProgram {
        let slot = |tagged: usize| match tagged & 3 {
            0 => tagged >> 2,
            1 => inputs,
            2 => inputs + (tagged >> 2),
            _ => unreachable!(),
        };
        let mut at = vec![usize::MAX; self.labels];
        let mut n = 0;
        for it in &self.items {
            match it {
                Item::Mark(l) => at[l.0] = n,
                _ => n += 1,
            }
        }
        let instrs: Vec<Instr> = self
            .items
            .iter()
            .filter_map(|it| match *it {
                Item::Mark(_) => None,
                Item::Inc(s) => Some(Instr::Inc(slot(s))),
                Item::Dec(s) => Some(Instr::Dec(slot(s))),
                Item::IfNz(s, l) => Some(Instr::IfNz(slot(s), at[l.0])),
                Item::Halt => Some(Instr::Halt),
            })
            .collect();
        let labels = vec![None; instrs.len()];
        ImpProgram::new(inputs, self.z, instrs, labels).expect("generated programs are well formed")
    }
}

/// Compiles a checked expression into a program with inputs `X1..Xn`
/// (n = arity) and output `Y`.
pub fn compile(expr: &RfExpr, env: &DefEnv) -> ImpProgram {
    let mut g = Gen { env, items: Vec::new(), labels: 0, z: COPY_TMP };
    let n = expr.arity();
    let ins: Vec<Reg> = (0..n).map(Reg::In).collect();
    g.inc(Reg::Z(ONE));
    g.gen(expr, &ins, Reg::Out);
    g.items.push(Item::Halt);
    g.finish(n)
}

/// Number of scratch registers a compiled program uses beyond the fixed two.
pub fn scratch_beyond_fixed(p: &ImpProgram) -> usize {
    p.scratch().saturating_sub(COPY_TMP)
}
