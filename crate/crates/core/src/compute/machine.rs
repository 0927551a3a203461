//! A minimal register machine over shortlex ranks.
//!
//! Register `r0` starts holding the rank of the input string; every other
//! register starts at zero. Each executed instruction costs one step. Running
//! off the end of the program (or jumping past it) halts rejecting, also for
//! one step.
//!
//! Text form, one instruction per line, `#` starts a comment:
//!
//! ```text
//! inc r1
//! decjz r0 4     # if r0 == 0 jump to 4, else r0 -= 1
//! copy r2 r0     # r2 := r0
//! accept r1      # halt, output the string whose rank is r1
//! reject
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::{Eval, Outcome};
use crate::strings::{cantor_pair, cantor_unpair, lex_rank, lex_unrank, LexString, Natural};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Instr {
    Reject,
    Accept(u64),
    Inc(u64),
    DecJz(u64, u64),
    Copy(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct DecodeError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    instrs: Vec<Instr>,
}

impl Program {
    pub fn new(instrs: Vec<Instr>) -> Self {
        Self { instrs }
    }

    pub fn instrs(&self) -> &[Instr] {
        &self.instrs
    }

    /// Decodes a machine index. Total and bijective: index 0 is the empty
    /// program, and `n > 0` splits as `⟨head, tail⟩ = unpair(n - 1)`.
    pub fn from_index(index: &Natural) -> Self {
        let mut instrs = Vec::new();
        let mut n = index.clone();
        while !n.is_zero() {
            let (head, tail) = cantor_unpair(&(n - 1u32));
            instrs.push(decode_instr(&head));
            n = tail;
        }
        Self { instrs }
    }

    /// Inverse of [`Program::from_index`].
    pub fn index(&self) -> Natural {
        self.instrs.iter().rev().fold(Natural::zero(), |tail, instr| {
            cantor_pair(&encode_instr(instr), &tail) + 1u32
        })
    }

    pub(crate) fn compile(&self) -> Compiled {
        let mut slots: BTreeMap<u64, usize> = BTreeMap::new();
        slots.insert(0, 0);
        let mut slot = |r: u64| {
            let next = slots.len();
            *slots.entry(r).or_insert(next)
        };
        let code = self
            .instrs
            .iter()
            .map(|instr| match *instr {
                Instr::Reject => Op::Reject,
                Instr::Accept(r) => Op::Accept(slot(r)),
                Instr::Inc(r) => Op::Inc(slot(r)),
                Instr::DecJz(r, t) => Op::DecJz(slot(r), usize::try_from(t).unwrap_or(usize::MAX)),
                Instr::Copy(d, s) => Op::Copy(slot(d), slot(s)),
            })
            .collect();
        Compiled {
            code,
            registers: slots.len(),
        }
    }
}

fn decode_instr(code: &Natural) -> Instr {
    if code.is_zero() {
        return Instr::Reject;
    }
    let d = code - 1u32;
    let op = (&d % 4u32).to_u32().unwrap_or(0);
    let arg: Natural = d / 4u32;
    let small = |n: &Natural| n.to_u64().unwrap_or(u64::MAX);
    match op {
        0 => Instr::Accept(small(&arg)),
        1 => Instr::Inc(small(&arg)),
        2 => {
            let (r, t) = cantor_unpair(&arg);
            Instr::DecJz(small(&r), small(&t))
        }
        _ => {
            let (dst, src) = cantor_unpair(&arg);
            Instr::Copy(small(&dst), small(&src))
        }
    }
}

fn encode_instr(instr: &Instr) -> Natural {
    let n = |v: u64| Natural::from(v);
    let (op, arg) = match *instr {
        Instr::Reject => return Natural::zero(),
        Instr::Accept(r) => (0u32, n(r)),
        Instr::Inc(r) => (1, n(r)),
        Instr::DecJz(r, t) => (2, cantor_pair(&n(r), &n(t))),
        Instr::Copy(d, s) => (3, cantor_pair(&n(d), &n(s))),
    };
    arg * 4u32 + op + 1u32
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Reject => write!(f, "reject"),
            Instr::Accept(r) => write!(f, "accept r{r}"),
            Instr::Inc(r) => write!(f, "inc r{r}"),
            Instr::DecJz(r, t) => write!(f, "decjz r{r} {t}"),
            Instr::Copy(d, s) => write!(f, "copy r{d} r{s}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for instr in &self.instrs {
            writeln!(f, "{instr}")?;
        }
        Ok(())
    }
}

impl FromStr for Program {
    type Err = DecodeError;

    fn from_str(text: &str) -> Result<Self, DecodeError> {
        let mut instrs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| DecodeError { line, message };
            let words: Vec<&str> = body.split_whitespace().collect();
            let reg = |w: &str| -> Result<u64, DecodeError> {
                w.strip_prefix('r')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| err(format!("expected a register like r0, found {w:?}")))
            };
            let num = |w: &str| -> Result<u64, DecodeError> {
                w.parse()
                    .map_err(|_| err(format!("expected a jump target, found {w:?}")))
            };
            let arity = |n: usize| -> Result<(), DecodeError> {
                if words.len() == n + 1 {
                    Ok(())
                } else {
                    Err(err(format!("{} takes {n} operand(s)", words[0])))
                }
            };
            let instr = match words[0] {
                "reject" => {
                    arity(0)?;
                    Instr::Reject
                }
                "accept" => {
                    arity(1)?;
                    Instr::Accept(reg(words[1])?)
                }
                "inc" => {
                    arity(1)?;
                    Instr::Inc(reg(words[1])?)
                }
                "decjz" => {
                    arity(2)?;
                    Instr::DecJz(reg(words[1])?, num(words[2])?)
                }
                "copy" => {
                    arity(2)?;
                    Instr::Copy(reg(words[1])?, reg(words[2])?)
                }
                other => return Err(err(format!("unknown instruction {other:?}"))),
            };
            instrs.push(instr);
        }
        Ok(Self { instrs })
    }
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Reject,
    Accept(usize),
    Inc(usize),
    DecJz(usize, usize),
    Copy(usize, usize),
}

/// A program with registers renumbered densely; `r0` stays slot 0.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    code: Vec<Op>,
    registers: usize,
}

trait Register: Clone {
    fn cleared() -> Self;
    fn is_clear(&self) -> bool;
    fn inc(&mut self);
    fn dec(&mut self);
    fn to_string_value(&self) -> LexString;
}

impl Register for u64 {
    fn cleared() -> Self {
        0
    }
    fn is_clear(&self) -> bool {
        *self == 0
    }
    fn inc(&mut self) {
        *self += 1;
    }
    fn dec(&mut self) {
        *self -= 1;
    }
    fn to_string_value(&self) -> LexString {
        LexString::from_index(*self)
    }
}

impl Register for BigUint {
    fn cleared() -> Self {
        BigUint::zero()
    }
    fn is_clear(&self) -> bool {
        self.is_zero()
    }
    fn inc(&mut self) {
        *self += 1u32;
    }
    fn dec(&mut self) {
        *self -= 1u32;
    }
    fn to_string_value(&self) -> LexString {
        lex_unrank(self)
    }
}

// Registers grow by at most one per step, so u64 cannot overflow while both
// the input rank and the budget stay below this bound.
const NARROW_LIMIT: u64 = 1 << 62;

impl Compiled {
    pub(crate) fn run(&self, x: &LexString, budget: u64) -> Eval {
        match x.index_u64() {
            Some(rank) if rank < NARROW_LIMIT && budget < NARROW_LIMIT => self.exec(rank, budget),
            _ => self.exec(lex_rank(x), budget),
        }
    }

    fn exec<R: Register>(&self, input: R, budget: u64) -> Eval {
        let mut regs = vec![R::cleared(); self.registers];
        regs[0] = input;
        let mut pc = 0usize;
        let mut steps = 0u64;
        while steps < budget {
            steps += 1;
            match self.code.get(pc) {
                None | Some(Op::Reject) => {
                    return Eval {
                        outcome: Outcome::Reject,
                        steps,
                    }
                }
                Some(Op::Accept(r)) => {
                    return Eval {
                        outcome: Outcome::Halt(regs[*r].to_string_value()),
                        steps,
                    }
                }
                Some(Op::Inc(r)) => {
                    regs[*r].inc();
                    pc += 1;
                }
                Some(Op::DecJz(r, t)) => {
                    if regs[*r].is_clear() {
                        pc = *t;
                    } else {
                        regs[*r].dec();
                        pc += 1;
                    }
                }
                Some(Op::Copy(d, s)) => {
                    if d != s {
                        let v = regs[*s].clone();
                        regs[*d] = v;
                    }
                    pc += 1;
                }
            }
        }
        Eval::pending(budget)
    }
}
