//! A counter-machine language in the style of Davis's 𝔏: increment,
//! decrement (0 stays 0), conditional jump, and an explicit halt.
//!
//! Variables are the inputs `X1..Xn`, the output `Y`, and scratch `Z1..Zk`.
//! Everything except the inputs starts at zero.
//!
//! Text format, one instruction per line with an optional label:
//!
//! ```text
//! # comment
//! INPUTS 1          # optional; defaults to the highest Xi used
//! [A] INC Y
//!     DEC X1
//!     IFNZ X1 GOTO A
//!     HALT
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A variable name. Slots are laid out as `X1..Xn, Y, Z1..Zk`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X(u32),
    Y,
    Z(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "X{i}"),
            Var::Y => write!(f, "Y"),
            Var::Z(i) => write!(f, "Z{i}"),
        }
    }
}

impl FromStr for Var {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if s == "Y" {
            return Ok(Var::Y);
        }
        let (head, num) = s.split_at(1.min(s.len()));
        let i: u32 = num.parse().map_err(|_| ())?;
        if i == 0 || num.starts_with('0') {
            return Err(());
        }
        match head {
            "X" => Ok(Var::X(i)),
            "Z" => Ok(Var::Z(i)),
            _ => Err(()),
        }
    }
}

/// An instruction over variable slots and instruction indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instr {
    Inc(usize),
    Dec(usize),
    IfNz(usize, usize),
    Halt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpProgram {
    inputs: usize,
    scratch: usize,
    instrs: Vec<Instr>,
    labels: Vec<Option<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("program expects {expected} input(s), got {got}")]
    InputCount { expected: usize, got: usize },
    #[error("input {0} does not fit a machine register")]
    InputTooLarge(String),
    #[error("cannot step a halted snapshot")]
    Halted,
    #[error("invalid program: {0}")]
    Invalid(String),
}

impl ImpProgram {
    /// Builds a program, checking slots and jump targets.
    pub fn new(
        inputs: usize,
        scratch: usize,
        instrs: Vec<Instr>,
        labels: Vec<Option<String>>,
    ) -> Result<Self, MachineError> {
        let p = ImpProgram { inputs, scratch, instrs, labels };
        if p.labels.len() != p.instrs.len() {
            return Err(MachineError::Invalid("one label slot per instruction".into()));
        }
        let nvars = p.var_count();
        for (i, ins) in p.instrs.iter().enumerate() {
            let (v, t) = match *ins {
                Instr::Inc(v) | Instr::Dec(v) => (Some(v), None),
                Instr::IfNz(v, t) => (Some(v), Some(t)),
                Instr::Halt => (None, None),
            };
            if v.is_some_and(|v| v >= nvars) {
                return Err(MachineError::Invalid(format!("instruction {i} uses an undeclared variable")));
            }
            if t.is_some_and(|t| t >= p.instrs.len()) {
                return Err(MachineError::Invalid(format!("instruction {i} jumps outside the program")));
            }
        }
        let mut seen = HashMap::new();
        for (i, l) in p.labels.iter().enumerate() {
            if let Some(l) = l {
                if seen.insert(l.clone(), i).is_some() {
                    return Err(MachineError::Invalid(format!("duplicate label {l}")));
                }
            }
        }
        Ok(p)
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn scratch(&self) -> usize {
        self.scratch
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn len(&self) -> usize {
        self.instrs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instrs.is_empty()
    }

    pub fn var_count(&self) -> usize {
        self.inputs + 1 + self.scratch
    }

    pub fn output_slot(&self) -> usize {
        self.inputs
    }

    pub fn var(&self, slot: usize) -> Var {
        match slot.cmp(&self.inputs) {
            std::cmp::Ordering::Less => Var::X(slot as u32 + 1),
            std::cmp::Ordering::Equal => Var::Y,
            std::cmp::Ordering::Greater => Var::Z((slot - self.inputs) as u32),
        }
    }

    pub fn slot(&self, v: Var) -> Option<usize> {
        let s = match v {
            Var::X(i) => i as usize - 1,
            Var::Y => self.inputs,
            Var::Z(i) => self.inputs + i as usize,
        };
        (s < self.var_count() && self.var(s) == v).then_some(s)
    }

    /// Label of instruction `i`, generated as `L<i>` when it has none.
    pub fn label_of(&self, i: usize) -> String {
        self.labels[i].clone().unwrap_or_else(|| format!("L{i}"))
    }

    /// The starting snapshot for the given inputs.
    pub fn initial(&self, inputs: &[u64]) -> Result<Snapshot, MachineError> {
        if inputs.len() != self.inputs {
            return Err(MachineError::InputCount { expected: self.inputs, got: inputs.len() });
        }
        let mut vars = vec![0u64; self.var_count()];
        vars[..self.inputs].copy_from_slice(inputs);
        Ok(Snapshot { pc: 0, vars })
    }

    pub fn is_halted(&self, s: &Snapshot) -> bool {
        s.pc >= self.instrs.len()
    }

    /// Applies one instruction in place.
    #[inline]
    pub fn step_mut(&self, s: &mut Snapshot) {
        match self.instrs[s.pc] {
            Instr::Inc(v) => {
                s.vars[v] += 1;
                s.pc += 1;
            }
            Instr::Dec(v) => {
                s.vars[v] = s.vars[v].saturating_sub(1);
                s.pc += 1;
            }
            Instr::IfNz(v, t) => {
                s.pc = if s.vars[v] != 0 { t } else { s.pc + 1 };
            }
            Instr::Halt => s.pc = self.instrs.len(),
        }
    }

    /// Renders a snapshot as one JSON line: `{"pc":0,"vars":{"X1":1,"Y":0}}`.
    pub fn snapshot_json(&self, s: &Snapshot) -> String {
        let mut out = format!("{{\"pc\":{},\"vars\":{{", s.pc);
        for (i, v) in s.vars.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("\"{}\":{v}", self.var(i)));
        }
        out.push_str("}}");
        out
    }
}

/// One applied instruction. Stepping a halted snapshot is rejected.
pub fn step(program: &ImpProgram, s: &Snapshot) -> Result<Snapshot, MachineError> {
    if program.is_halted(s) {
        return Err(MachineError::Halted);
    }
    let mut next = s.clone();
    program.step_mut(&mut next);
    Ok(next)
}

/// Instantaneous description: next instruction plus every variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Snapshot {
    pub pc: usize,
    /// Indexed by slot.
    pub vars: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status")]
pub enum RunStatus {
    Halted { output: u64, steps: u64 },
    StillRunning { last: Snapshot, steps: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    pub trace: Option<Vec<Snapshot>>,
}

impl RunResult {
    pub fn output(&self) -> Option<u64> {
        match self.status {
            RunStatus::Halted { output, .. } => Some(output),
            RunStatus::StillRunning { .. } => None,
        }
    }

    pub fn steps(&self) -> u64 {
        match self.status {
            RunStatus::Halted { steps, .. } | RunStatus::StillRunning { steps, .. } => steps,
        }
    }
}

pub const DEFAULT_TRACE_CAP: usize = 100_000;

/// Runs at most `fuel` steps. With `capture_trace`, the trace holds the
/// initial snapshot and each following one, up to [`DEFAULT_TRACE_CAP`].
pub fn run(program: &ImpProgram, inputs: &[u64], fuel: u64, capture_trace: bool) -> Result<RunResult, MachineError> {
    run_with_cap(program, inputs, fuel, capture_trace.then_some(DEFAULT_TRACE_CAP))
}

pub fn run_with_cap(
    program: &ImpProgram,
    inputs: &[u64],
    fuel: u64,
    trace_cap: Option<usize>,
) -> Result<RunResult, MachineError> {
    let mut s = program.initial(inputs)?;
    let mut trace = trace_cap.map(|_| vec![s.clone()]);
    let cap = trace_cap.unwrap_or(0);
    let mut steps = 0u64;
    while steps < fuel && !program.is_halted(&s) {
        program.step_mut(&mut s);
        steps += 1;
        if let Some(t) = trace.as_mut() {
            if t.len() < cap {
                t.push(s.clone());
            }
        }
    }
    let status = if program.is_halted(&s) {
        RunStatus::Halted { output: s.vars[program.output_slot()], steps }
    } else {
        RunStatus::StillRunning { last: s, steps }
    };
    Ok(RunResult { status, trace })
}

impl fmt::Display for ImpProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut targets = vec![false; self.instrs.len()];
        for ins in &self.instrs {
            if let Instr::IfNz(_, t) = ins {
                targets[*t] = true;
            }
        }
        writeln!(f, "INPUTS {}", self.inputs)?;
        for (i, ins) in self.instrs.iter().enumerate() {
            if self.labels[i].is_some() || targets[i] {
                write!(f, "[{}] ", self.label_of(i))?;
            } else {
                write!(f, "    ")?;
            }
            match *ins {
                Instr::Inc(v) => writeln!(f, "INC {}", self.var(v))?,
                Instr::Dec(v) => writeln!(f, "DEC {}", self.var(v))?,
                Instr::IfNz(v, t) => writeln!(f, "IFNZ {} GOTO {}", self.var(v), self.label_of(t))?,
                Instr::Halt => writeln!(f, "HALT")?,
            }
        }
        Ok(())
    }
}

fn is_label(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_uppercase())
        && cs.all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_')
}

/// Parses the `.imp` text format.
pub fn parse_imp(text: &str) -> Result<ImpProgram, MachineError> {
    enum Raw {
        Inc(Var),
        Dec(Var),
        IfNz(Var, String, usize),
        Halt,
    }
    let mut declared_inputs = None;
    let mut raws = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut label_index = HashMap::new();
    let (mut max_x, mut max_z) = (0u32, 0u32);

    for (n, line) in text.lines().enumerate() {
        let lineno = n + 1;
        let err = |msg: String| MachineError::Parse { line: lineno, msg };
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut rest = line;
        let mut label = None;
        if let Some(r) = rest.strip_prefix('[') {
            let close = r.find(']').ok_or_else(|| err("unclosed label".into()))?;
            let name = r[..close].trim();
            if !is_label(name) {
                return Err(err(format!("bad label `{name}`")));
            }
            if label_index.insert(name.to_string(), raws.len()).is_some() {
                return Err(err(format!("duplicate label `{name}`")));
            }
            label = Some(name.to_string());
            rest = r[close + 1..].trim();
        }
        let words: Vec<&str> = rest.split_whitespace().collect();
        let var = |w: &str| w.parse::<Var>().map_err(|_| err(format!("bad variable `{w}`")));
        let raw = match words.as_slice() {
            ["INPUTS", k] if label.is_none() => {
                if declared_inputs.is_some() || !raws.is_empty() {
                    return Err(err("INPUTS must come first, once".into()));
                }
                declared_inputs = Some(k.parse::<u32>().map_err(|_| err(format!("bad count `{k}`")))?);
                continue;
            }
            ["INC", v] => Raw::Inc(var(v)?),
            ["DEC", v] => Raw::Dec(var(v)?),
            ["IFNZ", v, "GOTO", l] => Raw::IfNz(var(v)?, l.to_string(), lineno),
            ["HALT"] => Raw::Halt,
            _ => return Err(err(format!("cannot parse `{rest}`"))),
        };
        if let Raw::Inc(v) | Raw::Dec(v) | Raw::IfNz(v, _, _) = &raw {
            match v {
                Var::X(i) => max_x = max_x.max(*i),
                Var::Z(i) => max_z = max_z.max(*i),
                Var::Y => {}
            }
        }
        raws.push(raw);
        labels.push(label);
    }

    let inputs = match declared_inputs {
        Some(k) if k < max_x => {
            return Err(MachineError::Parse { line: 0, msg: format!("X{max_x} used but INPUTS is {k}") })
        }
        Some(k) => k as usize,
        None => max_x as usize,
    };
    let shape = ImpProgram { inputs, scratch: max_z as usize, instrs: Vec::new(), labels: Vec::new() };
    let slot = |v: Var| shape.slot(v).expect("variables were range-checked");
    let mut instrs = Vec::with_capacity(raws.len());
    for raw in raws {
        instrs.push(match raw {
            Raw::Inc(v) => Instr::Inc(slot(v)),
            Raw::Dec(v) => Instr::Dec(slot(v)),
            Raw::IfNz(v, l, line) => {
                let t =
                    *label_index.get(&l).ok_or(MachineError::Parse { line, msg: format!("unknown label `{l}`") })?;
                Instr::IfNz(slot(v), t)
            }
            Raw::Halt => Instr::Halt,
        });
    }
    ImpProgram::new(inputs, max_z as usize, instrs, labels)
}

pub use crate::compile::compile;

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(text: &str) -> ImpProgram {
        parse_imp(text).unwrap()
    }

    #[test]
    fn step_examples() {
        let p = prog("INC Y\nDEC Z1\n[L] IFNZ X1 GOTO L\n");
        let y = p.slot(Var::Y).unwrap();
        let z = p.slot(Var::Z(1)).unwrap();
        let mut s = p.initial(&[2]).unwrap();
        s.vars[y] = 4;
        let s = step(&p, &s).unwrap();
        assert_eq!((s.pc, s.vars[y]), (1, 5));
        let s = step(&p, &s).unwrap();
        assert_eq!((s.pc, s.vars[z]), (2, 0));
        let s = step(&p, &s).unwrap();
        assert_eq!(s.pc, 2);
    }

    #[test]
    fn halted_snapshot_cannot_step() {
        let p = prog("HALT");
        let s = step(&p, &p.initial(&[]).unwrap()).unwrap();
        assert!(p.is_halted(&s));
        assert_eq!(step(&p, &s), Err(MachineError::Halted));
    }

    #[test]
    fn self_loop_never_changes_state() {
        let p = prog("[A] IFNZ X1 GOTO A");
        let r = run(&p, &[1], 50, true).unwrap();
        let RunStatus::StillRunning { ref last, steps } = r.status else { panic!() };
        assert_eq!(steps, 50);
        let trace = r.trace.unwrap();
        assert_eq!(trace.len(), 51);
        assert!(trace.iter().all(|s| s == last));
    }

    #[test]
    fn zero_fuel_stays_at_start() {
        let p = prog("INC Y\nHALT");
        let r = run(&p, &[], 0, false).unwrap();
        assert_eq!(r.status, RunStatus::StillRunning { last: p.initial(&[]).unwrap(), steps: 0 });
    }

    #[test]
    fn davis_copy_loop() {
        // Y <- X1 for X1 > 0
        let p = prog("[A] INC Y\nDEC X1\nIFNZ X1 GOTO A\n");
        let r = run(&p, &[3], 100, false).unwrap();
        assert_eq!(r.status, RunStatus::Halted { output: 3, steps: 9 });
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_imp("IFNZ X1 GOTO B"), Err(MachineError::Parse { line: 1, .. })));
        assert!(matches!(parse_imp("[A] INC Y\n[A] HALT"), Err(MachineError::Parse { line: 2, .. })));
        assert!(matches!(parse_imp("INC W1"), Err(MachineError::Parse { .. })));
        assert!(matches!(parse_imp("INC X0"), Err(MachineError::Parse { .. })));
        assert!(matches!(parse_imp("INPUTS 1\nINC X2"), Err(MachineError::Parse { .. })));
    }

    #[test]
    fn input_count_checked() {
        let p = prog("INPUTS 2\nHALT");
        assert_eq!(run(&p, &[1], 10, false).unwrap_err(), MachineError::InputCount { expected: 2, got: 1 });
    }

    #[test]
    fn text_round_trip() {
        let src = "INPUTS 1\n[A] INC Y\n    DEC X1\n    IFNZ X1 GOTO A\n[B] IFNZ Z2 GOTO B\n    HALT\n";
        let p = prog(src);
        assert_eq!(p.to_string(), src);
        assert_eq!(prog(&p.to_string()), p);
    }

    #[test]
    fn snapshot_json_line() {
        let p = prog("[A] IFNZ X1 GOTO A");
        let s = p.initial(&[1]).unwrap();
        assert_eq!(p.snapshot_json(&s), r#"{"pc":0,"vars":{"X1":1,"Y":0}}"#);
    }
}
