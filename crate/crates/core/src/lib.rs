//! Ranking and compression of sets of binary strings, executed over a
//! step-budgeted model of partial computable functions and checked against
//! brute-force oracles on finite prefixes of Σ*.

pub mod checkers;
pub mod compute;
pub mod constructions;
pub mod procedures;
pub mod sets;
pub mod strings;

pub use compute::{BudgetedFn, Eval, Outcome, Timed};
pub use sets::{Enumerator, Membership, SetSpec};
pub use strings::{LexString, Natural};
