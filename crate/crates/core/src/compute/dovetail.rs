//! Triangular dovetailing: round `r` runs each of the first `r` inputs for
//! `r` steps. An input at (1-based) position `p` that halts after `t` steps is
//! emitted in round `max(p, t)`; ties within a round go in input order.
//!
//! Cost is charged as for resumable computations: an input is billed for the
//! steps it has actually been advanced, so reaching round `R` costs at most
//! `R` per input rather than `R` per input per round.

use thiserror::Error;

use super::{BudgetedFn, Outcome};
use crate::strings::LexString;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emission {
    pub input: LexString,
    pub outcome: Outcome,
    /// 1-based position in the input stream.
    pub position: usize,
    pub round: u64,
    /// Steps the computation took.
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("dovetail budget of {budget} steps exhausted")]
pub struct OutOfBudget {
    pub budget: u64,
}

#[derive(Debug)]
struct Slot {
    input: LexString,
    /// Largest budget at which the input is known to be still running.
    probed: u64,
    /// Halting outcome and time, once observed at some budget.
    result: Option<(Outcome, u64)>,
    /// Steps billed so far.
    progress: u64,
    emitted: bool,
}

pub struct Dovetail {
    f: BudgetedFn,
    inputs: Box<dyn Iterator<Item = LexString> + Send>,
    inputs_done: bool,
    slots: Vec<Slot>,
    round: u64,
    cursor: usize,
    charged: u64,
    live: usize,
}

impl Dovetail {
    pub fn new<I>(f: BudgetedFn, inputs: I) -> Self
    where
        I: IntoIterator<Item = LexString>,
        I::IntoIter: Send + 'static,
    {
        Self {
            f,
            inputs: Box::new(inputs.into_iter()),
            inputs_done: false,
            slots: Vec::new(),
            round: 0,
            cursor: 0,
            charged: 0,
            live: 0,
        }
    }

    /// Steps billed so far.
    pub fn charged(&self) -> u64 {
        self.charged
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Next halting (or rejecting) input, or `Ok(None)` once every input has
    /// been emitted. Fails when more than `budget` steps in total would be
    /// billed; the cursor can be resumed with a larger budget.
    pub fn next_within(&mut self, budget: u64) -> Result<Option<Emission>, OutOfBudget> {
        loop {
            if self.cursor == 0 && !self.start_round() {
                return Ok(None);
            }
            let r = self.round;
            while self.cursor < self.slots.len().min(r as usize) {
                let i = self.cursor;
                if self.slots[i].emitted {
                    self.cursor += 1;
                    continue;
                }
                let halted_at = self.halts_within(i, r);
                let target = halted_at.map_or(r, |t| t.min(r));
                let slot = &mut self.slots[i];
                let bill = target.saturating_sub(slot.progress);
                if self.charged + bill > budget {
                    return Err(OutOfBudget { budget });
                }
                self.charged += bill;
                slot.progress = target;
                self.cursor += 1;
                if let Some(t) = halted_at.filter(|&t| t <= r) {
                    slot.emitted = true;
                    self.live -= 1;
                    let (outcome, _) = slot.result.clone().expect("halted slot has a result");
                    return Ok(Some(Emission {
                        input: slot.input.clone(),
                        outcome,
                        position: i + 1,
                        round: r,
                        steps: t,
                    }));
                }
            }
            self.cursor = 0;
        }
    }

    /// Advances to the next round; false when nothing is left to run.
    fn start_round(&mut self) -> bool {
        self.round += 1;
        if !self.inputs_done && self.slots.len() < self.round as usize {
            match self.inputs.next() {
                Some(input) => {
                    self.slots.push(Slot {
                        input,
                        probed: 0,
                        result: None,
                        progress: 0,
                        emitted: false,
                    });
                    self.live += 1;
                }
                None => self.inputs_done = true,
            }
        }
        !(self.inputs_done && self.live == 0)
    }

    /// Halting time of slot `i` if it is at most `r`, probing lazily with
    /// doubling budgets so that re-evaluation stays logarithmic per input.
    fn halts_within(&mut self, i: usize, r: u64) -> Option<u64> {
        let slot = &mut self.slots[i];
        if slot.result.is_none() && slot.probed < r {
            let probe = r.max(slot.probed.saturating_mul(2));
            let e = self.f.eval(&slot.input, probe);
            if e.outcome.is_pending() {
                slot.probed = probe;
            } else {
                slot.result = Some((e.outcome, e.steps));
            }
        }
        slot.result.as_ref().map(|(_, t)| *t)
    }
}

impl Iterator for Dovetail {
    type Item = Emission;

    /// Unbounded: may never return if no further input halts.
    fn next(&mut self) -> Option<Emission> {
        self.next_within(u64::MAX).ok().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compute::Timed;
    use crate::strings::{s, LexString, Shortlex};
    use proptest::prelude::*;

    #[test]
    fn identity_emits_epsilon_first() {
        let mut d = Dovetail::new(BudgetedFn::identity(), Shortlex::new());
        let e = d.next().unwrap();
        assert_eq!(e.input, LexString::empty());
        assert_eq!(e.outcome, Outcome::Halt(LexString::empty()));
        assert_eq!(e.round, 1);
    }

    #[test]
    fn sole_emission_for_single_domain_point() {
        let f = BudgetedFn::timed("only-00", |x| {
            if *x == s("00") {
                Timed::Halt(x.clone(), 3)
            } else {
                Timed::Diverge
            }
        });
        let mut d = Dovetail::new(f, Shortlex::new());
        let e = d.next_within(10_000).unwrap().unwrap();
        assert_eq!(e.input, s("00"));
        assert!(d.next_within(10_000).is_err());
    }

    #[test]
    fn cheap_later_input_overtakes_expensive_earlier_one() {
        // ε costs 5 steps, "0" costs 1: round 2 emits "0", round 5 emits ε
        let f = BudgetedFn::timed("costs", |x| match x.len() {
            0 => Timed::Halt(x.clone(), 5),
            _ if *x == s("0") => Timed::Halt(x.clone(), 1),
            _ => Timed::Diverge,
        });
        let order: Vec<_> = Dovetail::new(f, Shortlex::new())
            .take(2)
            .map(|e| (e.input, e.round))
            .collect();
        assert_eq!(order, vec![(s("0"), 2), (LexString::empty(), 5)]);
    }

    #[test]
    fn finite_inputs_terminate() {
        let f = BudgetedFn::identity();
        let got: Vec<_> = Dovetail::new(f, vec![s("1"), s("0")]).map(|e| e.input).collect();
        assert_eq!(got, vec![s("1"), s("0")]);
    }

    #[test]
    fn budget_is_resumable() {
        let f = BudgetedFn::timed("slow", |x| Timed::Halt(x.clone(), 40));
        let mut d = Dovetail::new(f, Shortlex::new());
        assert!(d.next_within(100).is_err());
        let e = d.next_within(10_000).unwrap().unwrap();
        assert_eq!(e.input, LexString::empty());
        assert_eq!(e.round, 40);
    }

    proptest! {
        /// Every halting input is emitted exactly once, no later than round max(p, t).
        #[test]
        fn fairness(costs in proptest::collection::vec(proptest::option::of(1u64..30), 1..25)) {
            let table = costs.clone();
            let f = BudgetedFn::timed("table", move |x| {
                let i = x.index_u64().unwrap() as usize;
                match table.get(i).copied().flatten() {
                    Some(t) => Timed::Halt(x.clone(), t),
                    None => Timed::Diverge,
                }
            });
            let inputs: Vec<_> = (0..costs.len() as u64).map(LexString::from_index).collect();
            let mut d = Dovetail::new(f, inputs);
            let halting = costs.iter().filter(|c| c.is_some()).count();
            let mut seen = std::collections::HashSet::new();
            for _ in 0..halting {
                let e = d.next_within(1_000_000).unwrap().unwrap();
                let t = costs[e.position - 1].unwrap();
                prop_assert!(e.round <= (e.position as u64).max(t));
                prop_assert_eq!(e.round, (e.position as u64).max(t));
                prop_assert!(seen.insert(e.position));
            }
            let rest = d.next_within(10_000);
            if halting == costs.len() {
                prop_assert_eq!(rest, Ok(None));
            } else {
                prop_assert!(rest.is_err());
            }
        }
    }
}
