//! Step-budgeted evaluation of partial computable functions.
//!
//! A [`BudgetedFn`] is either a register-machine program or a host closure
//! with a declared step cost. Both follow the same contract: evaluation is
//! deterministic, and once an input halts (or rejects) at some budget it does
//! so at every larger budget.

mod dovetail;
pub mod machine;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::strings::{lex_rank, LexString, Natural};

pub use dovetail::{Dovetail, Emission, OutOfBudget};
pub use machine::{DecodeError, Instr, Program};

/// Result of one budgeted evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Halted accepting with this output.
    Halt(LexString),
    /// Halted in a rejecting state: no output.
    Reject,
    /// Still running after this many steps.
    Pending(u64),
}

impl Outcome {
    pub fn output(&self) -> Option<&LexString> {
        match self {
            Outcome::Halt(y) => Some(y),
            _ => None,
        }
    }

    pub fn is_pending(&self) -> bool {
        matches!(self, Outcome::Pending(_))
    }
}

/// An outcome together with the steps it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Eval {
    pub outcome: Outcome,
    pub steps: u64,
}

impl Eval {
    pub fn halt(y: LexString, steps: u64) -> Self {
        Self {
            outcome: Outcome::Halt(y),
            steps,
        }
    }

    pub fn reject(steps: u64) -> Self {
        Self {
            outcome: Outcome::Reject,
            steps,
        }
    }

    pub fn pending(budget: u64) -> Self {
        Self {
            outcome: Outcome::Pending(budget),
            steps: budget,
        }
    }
}

/// Ideal behaviour of a host closure on one input, with its synthetic cost.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Timed {
    Halt(LexString, u64),
    Reject(u64),
    Diverge,
}

type NativeBody = dyn Fn(&LexString, u64) -> Eval + Send + Sync;

#[derive(Clone)]
enum Body {
    Native(Arc<NativeBody>),
    Machine(Arc<machine::Compiled>, Arc<Program>),
}

/// A partial function Σ* → Σ* evaluated under explicit step budgets.
#[derive(Clone)]
pub struct BudgetedFn {
    name: Arc<str>,
    body: Body,
}

impl fmt::Debug for BudgetedFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BudgetedFn({})", self.name)
    }
}

impl BudgetedFn {
    /// A budget-aware host closure. The closure sees the budget and must
    /// respect it; results claiming more steps than allowed are turned into
    /// `Pending`.
    pub fn native<F>(name: impl Into<Arc<str>>, f: F) -> Self
    where
        F: Fn(&LexString, u64) -> Eval + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            body: Body::Native(Arc::new(f)),
        }
    }

    /// A host closure described by its ideal result and cost per input.
    pub fn timed<F>(name: impl Into<Arc<str>>, f: F) -> Self
    where
        F: Fn(&LexString) -> Timed + Send + Sync + 'static,
    {
        Self::native(name, move |x, budget| match f(x) {
            Timed::Halt(y, t) if t <= budget => Eval::halt(y, t),
            Timed::Reject(t) if t <= budget => Eval::reject(t),
            _ => Eval::pending(budget),
        })
    }

    /// A total host function charged `cost` steps per call.
    pub fn total<F>(name: impl Into<Arc<str>>, cost: u64, f: F) -> Self
    where
        F: Fn(&LexString) -> LexString + Send + Sync + 'static,
    {
        Self::timed(name, move |x| Timed::Halt(f(x), cost))
    }

    pub fn machine(program: Program) -> Self {
        let name = format!("machine#{}", program.index());
        Self::machine_named(name, program)
    }

    pub fn machine_named(name: impl Into<Arc<str>>, program: Program) -> Self {
        Self {
            name: name.into(),
            body: Body::Machine(Arc::new(program.compile()), Arc::new(program)),
        }
    }

    pub fn identity() -> Self {
        Self::total("identity", 1, |x| x.clone())
    }

    pub fn constant(y: LexString) -> Self {
        Self::total(format!("constant({y})"), 1, move |_| y.clone())
    }

    pub fn never() -> Self {
        Self::timed("never", |_| Timed::Diverge)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn program(&self) -> Option<&Program> {
        match &self.body {
            Body::Machine(_, p) => Some(p),
            Body::Native(_) => None,
        }
    }

    /// Evaluates `self(x)` for at most `budget` steps.
    pub fn eval(&self, x: &LexString, budget: u64) -> Eval {
        let e = match &self.body {
            Body::Native(f) => f(x, budget),
            Body::Machine(code, _) => code.run(x, budget),
        };
        if e.outcome.is_pending() || e.steps > budget {
            Eval::pending(budget)
        } else {
            e
        }
    }

    pub fn run(&self, x: &LexString, budget: u64) -> Outcome {
        self.eval(x, budget).outcome
    }
}

/// `run(f, x, budget)`.
pub fn run(f: &BudgetedFn, x: &LexString, budget: u64) -> Outcome {
    f.run(x, budget)
}

/// `M_i` of the fixed machine enumeration.
pub fn machine(index: &Natural) -> BudgetedFn {
    BudgetedFn::machine_named(format!("M{index}"), Program::from_index(index))
}

/// The first `count` machines of the enumeration, `M0 … M(count-1)`.
pub fn enumerate_machines(count: usize) -> Vec<BudgetedFn> {
    (0..count as u64).map(|i| machine(&Natural::from(i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Probe {
    Yes,
    Unknown,
}

/// Accept time of `M_x` on `x` within `budget`, where `x` names the machine
/// whose index is its shortlex rank.
pub fn self_acceptance(x: &LexString, budget: u64) -> Eval {
    machine(&lex_rank(x)).eval(x, budget)
}

/// Budgeted approximation of `K = {x | M_x accepts x}`.
pub fn halting_probe(x: &LexString, budget: u64) -> Probe {
    match self_acceptance(x, budget).outcome {
        Outcome::Halt(_) => Probe::Yes,
        _ => Probe::Unknown,
    }
}
