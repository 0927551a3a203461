//! Ground-truth checks for ranking and compression functions, and for
//! 1-truth-table reductions, over finite shortlex prefixes.
//!
//! The checkers never look at non-members: a ranking or compression function
//! may do anything there. A finite prefix can refute a candidate but never
//! certify it, so `Pass` always means "no violation on this prefix".

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::compute::{BudgetedFn, Eval, Outcome, Timed};
use crate::sets::{Membership, SetSpec};
use crate::strings::{lex_rank, up_to_len, LexString, Shortlex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Refuted,
    Inconclusive,
}

/// What a refutation points at. Every variant names the evaluations needed
/// to re-check it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Witness {
    /// A member whose output is not its rank.
    WrongRank {
        x: LexString,
        expected: LexString,
        got: Outcome,
    },
    /// A member on which the function has no value.
    Undefined { x: LexString, outcome: Outcome },
    /// Two members with the same value.
    Collision {
        first: LexString,
        second: LexString,
        output: LexString,
    },
    /// An input on which the reduction answers wrongly.
    Reduction {
        x: LexString,
        query: Option<LexString>,
        table: TruthTable,
        in_source: bool,
        predicted: bool,
    },
    /// A diagonalization stage whose recorded witness does not re-verify.
    Stage { stage: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverAudit {
    pub targets: u64,
    pub hit: u64,
    /// The first few targets no member in the prefix was seen to reach.
    pub unwitnessed: Vec<LexString>,
}

impl CoverAudit {
    pub fn full(&self) -> bool {
        self.hit == self.targets
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub examined: u64,
    pub steps: u64,
    /// Strings whose membership or value stayed unresolved at the budget.
    pub unresolved: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverAudit>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    fn finish(witness: Option<Witness>, examined: u64, steps: u64, unresolved: u64) -> Self {
        let verdict = match (&witness, unresolved) {
            (Some(_), _) => Verdict::Refuted,
            (None, 0) => Verdict::Pass,
            (None, _) => Verdict::Inconclusive,
        };
        Self {
            verdict,
            witness,
            examined,
            steps,
            unresolved,
            cover: None,
        }
    }
}

/// Brute-force rank of a set under a fixed budget per membership query.
#[derive(Debug, Clone)]
pub struct RankOracle {
    pub set: SetSpec,
    pub budget: u64,
    /// `(count of members ≤ s_i, s_i is a member)` for a resolved prefix.
    prefix: Arc<Mutex<Vec<(u64, bool)>>>,
}

impl RankOracle {
    pub fn new(set: SetSpec, budget: u64) -> Self {
        Self {
            set,
            budget,
            prefix: Arc::new(Mutex::new(Vec::new())),
        }
    }

    /// `‖A^{≤x}‖`, or `None` if some membership at or below `x` is unknown.
    pub fn true_rank(&self, x: &LexString) -> Option<u64> {
        true_rank(&self.set, x, self.budget)
    }

    /// A total ranking function that counts members; its value on a
    /// non-member is the count of members below it (arbitrary but fixed).
    pub fn ranker(&self) -> BudgetedFn {
        self.make("oracle-ranker", |_| true)
    }

    /// Halts only on members; diverges elsewhere.
    pub fn partial_ranker(&self) -> BudgetedFn {
        self.make("oracle-partial-ranker", |member| member)
    }

    /// Halts with the rank on members and rejects on non-members.
    pub fn variant_a_ranker(&self) -> BudgetedFn {
        let oracle = self.clone();
        BudgetedFn::native("oracle-variant-a-ranker", move |x, budget| {
            match oracle.count_to(x, budget) {
                Some((count, true, cost)) => Eval::halt(rank_string(count), cost),
                Some((_, false, cost)) => Eval::reject(cost),
                None => Eval::pending(budget),
            }
        })
    }

    fn make(&self, name: &str, halts: fn(bool) -> bool) -> BudgetedFn {
        let oracle = self.clone();
        BudgetedFn::native(name, move |x, budget| match oracle.count_to(x, budget) {
            Some((count, member, cost)) if halts(member) => {
                Eval::halt(rank_string(count), cost)
            }
            _ => Eval::pending(budget),
        })
    }

    /// Count of members `≤ x`, whether `x` is a member, and the synthetic
    /// cost (one step per string examined).
    fn count_to(&self, x: &LexString, budget: u64) -> Option<(u64, bool, u64)> {
        let index = x.index_u64()?;
        let cost = index.checked_add(1)?;
        if cost > budget {
            return None;
        }
        let mut prefix = self.prefix.lock().expect("oracle lock");
        while prefix.len() as u64 <= index {
            let y = LexString::from_index(prefix.len() as u64);
            let member = self.set.member(&y, self.budget).known()?;
            let before = prefix.last().map_or(0, |p| p.0);
            prefix.push((before + member as u64, member));
        }
        let (count, member) = prefix[index as usize];
        Some((count, member, cost))
    }
}

/// The string `lex_unrank(count − 1)` that names a 1-based rank; rank 0 has
/// no name and maps to `ε`.
pub fn rank_string(count: u64) -> LexString {
    LexString::from_index(count.saturating_sub(1))
}

/// `‖A^{≤x}‖`, or `None` if any membership at or below `x` is unknown.
pub fn true_rank(set: &SetSpec, x: &LexString, budget: u64) -> Option<u64> {
    let mut count = 0;
    for y in Shortlex::new() {
        if y > *x {
            break;
        }
        count += set.member(&y, budget).known()? as u64;
    }
    Some(count)
}

/// Checks `f(x) = lex_unrank(‖A^{≤x}‖ − 1)` for every member `x` with
/// `|x| ≤ max_len`.
pub fn check_ranking(f: &BudgetedFn, set: &SetSpec, max_len: usize, budget: u64) -> VerifyReport {
    let mut known = 0u64;
    let mut unknown_below = 0u64;
    let mut examined = 0;
    let mut steps = 0;
    let mut unresolved = 0;
    for x in up_to_len(max_len) {
        examined += 1;
        let m = set.member(&x, budget);
        match m {
            Membership::No => continue,
            Membership::Unknown => {
                unresolved += 1;
                unknown_below += 1;
            }
            Membership::Yes => known += 1,
        }
        if m != Membership::Yes {
            continue;
        }
        let e = f.eval(&x, budget);
        steps += e.steps;
        match &e.outcome {
            Outcome::Pending(_) => unresolved += 1,
            Outcome::Reject => {
                let w = Witness::Undefined { x, outcome: e.outcome };
                return VerifyReport::finish(Some(w), examined, steps, unresolved);
            }
            Outcome::Halt(y) => {
                // with unknown memberships below, the true rank lies in
                // [known, known + unknown_below]
                let got = lex_rank(y).to_u64().map(|r| r + 1);
                let fits = got.is_some_and(|g| g >= known && g <= known + unknown_below);
                if !fits {
                    let w = Witness::WrongRank {
                        x,
                        expected: rank_string(known),
                        got: e.outcome.clone(),
                    };
                    return VerifyReport::finish(Some(w), examined, steps, unresolved);
                }
                if unknown_below > 0 {
                    unresolved += 1;
                }
            }
        }
    }
    VerifyReport::finish(None, examined, steps, unresolved)
}

const UNWITNESSED_SHOWN: usize = 16;

/// Checks the compression clauses on members with `|x| ≤ max_len`: the
/// function is defined on each, no two collide. The cover of the first
/// `cover_count` strings of Σ* is audited but never refuted.
pub fn check_compression(
    f: &BudgetedFn,
    set: &SetSpec,
    max_len: usize,
    cover_count: u64,
    budget: u64,
) -> VerifyReport {
    let mut seen: HashMap<LexString, LexString> = HashMap::new();
    let mut examined = 0;
    let mut steps = 0;
    let mut unresolved = 0;
    let mut witness = None;
    for x in up_to_len(max_len) {
        examined += 1;
        match set.member(&x, budget) {
            Membership::No => continue,
            Membership::Unknown => {
                unresolved += 1;
                continue;
            }
            Membership::Yes => {}
        }
        let e = f.eval(&x, budget);
        steps += e.steps;
        match e.outcome {
            Outcome::Pending(_) => unresolved += 1,
            Outcome::Reject => {
                witness = Some(Witness::Undefined { x, outcome: e.outcome });
                break;
            }
            Outcome::Halt(y) => {
                if let Some(first) = seen.get(&y) {
                    witness = Some(Witness::Collision {
                        first: first.clone(),
                        second: x,
                        output: y,
                    });
                    break;
                }
                seen.insert(y, x);
            }
        }
    }
    let mut report = VerifyReport::finish(witness, examined, steps, unresolved);
    let mut hit = 0;
    let mut unwitnessed = Vec::new();
    for t in Shortlex::new().take(cover_count as usize) {
        if seen.contains_key(&t) {
            hit += 1;
        } else if unwitnessed.len() < UNWITNESSED_SHOWN {
            unwitnessed.push(t);
        }
    }
    report.cover = Some(CoverAudit {
        targets: cover_count,
        hit,
        unwitnessed,
    });
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthTable {
    Identity,
    Negation,
    ConstantTrue,
    ConstantFalse,
}

impl TruthTable {
    /// Whether the table consults the oracle at all.
    pub fn queries(self) -> bool {
        matches!(self, TruthTable::Identity | TruthTable::Negation)
    }

    pub fn apply(self, answer: bool) -> bool {
        match self {
            TruthTable::Identity => answer,
            TruthTable::Negation => !answer,
            TruthTable::ConstantTrue => true,
            TruthTable::ConstantFalse => false,
        }
    }
}

type TableFn = dyn Fn(&LexString) -> TruthTable + Send + Sync;

/// A reduction asking at most one oracle question per input.
#[derive(Clone)]
pub struct OneTTReduction {
    pub query: BudgetedFn,
    table: Arc<TableFn>,
}

impl fmt::Debug for OneTTReduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OneTTReduction({})", self.query.name())
    }
}

impl OneTTReduction {
    pub fn uniform(query: BudgetedFn, table: TruthTable) -> Self {
        Self {
            query,
            table: Arc::new(move |_| table),
        }
    }

    pub fn per_input<T>(query: BudgetedFn, table: T) -> Self
    where
        T: Fn(&LexString) -> TruthTable + Send + Sync + 'static,
    {
        Self {
            query,
            table: Arc::new(table),
        }
    }

    pub fn table(&self, x: &LexString) -> TruthTable {
        (self.table)(x)
    }
}

/// Checks `A(x) = table(x)(B(query(x)))` for every `|x| ≤ max_len` whose
/// memberships resolve.
pub fn check_1tt(
    r: &OneTTReduction,
    a: &SetSpec,
    b: &SetSpec,
    max_len: usize,
    budget: u64,
) -> VerifyReport {
    let mut examined = 0;
    let mut steps = 0;
    let mut unresolved = 0;
    for x in up_to_len(max_len) {
        examined += 1;
        let Some(in_source) = a.member(&x, budget).known() else {
            unresolved += 1;
            continue;
        };
        let table = r.table(&x);
        let (query, predicted) = if table.queries() {
            let e = r.query.eval(&x, budget);
            steps += e.steps;
            let q = match e.outcome {
                Outcome::Halt(q) => q,
                Outcome::Pending(_) => {
                    unresolved += 1;
                    continue;
                }
                Outcome::Reject => {
                    let w = Witness::Undefined { x, outcome: Outcome::Reject };
                    return VerifyReport::finish(Some(w), examined, steps, unresolved);
                }
            };
            let Some(answer) = b.member(&q, budget).known() else {
                unresolved += 1;
                continue;
            };
            (Some(q), table.apply(answer))
        } else {
            (None, table.apply(false))
        };
        if predicted != in_source {
            let w = Witness::Reduction {
                x,
                query,
                table,
                in_source,
                predicted,
            };
            return VerifyReport::finish(Some(w), examined, steps, unresolved);
        }
    }
    VerifyReport::finish(None, examined, steps, unresolved)
}

/// Re-verifies a ranking or compression witness by re-running the cited
/// evaluations and recounting from scratch. `true` means the refutation
/// stands.
pub fn recheck(w: &Witness, f: &BudgetedFn, set: &SetSpec, budget: u64) -> bool {
    let member = |x: &LexString| set.member(x, budget) == Membership::Yes;
    match w {
        Witness::WrongRank { x, expected, got } => {
            let Some(count) = true_rank(set, x, budget) else {
                return false;
            };
            let now = f.run(x, budget);
            member(x)
                && rank_string(count) == *expected
                && now == *got
                && now != Outcome::Halt(expected.clone())
        }
        Witness::Undefined { x, .. } => {
            member(x) && matches!(f.run(x, budget), Outcome::Reject)
        }
        Witness::Collision { first, second, output } => {
            first != second
                && member(first)
                && member(second)
                && f.run(first, budget) == Outcome::Halt(output.clone())
                && f.run(second, budget) == Outcome::Halt(output.clone())
        }
        Witness::Reduction { .. } | Witness::Stage { .. } => false,
    }
}

/// Re-verifies a 1-tt witness.
pub fn recheck_1tt(w: &Witness, r: &OneTTReduction, a: &SetSpec, b: &SetSpec, budget: u64) -> bool {
    match w {
        Witness::Reduction {
            x,
            query,
            table,
            in_source,
            predicted,
        } => {
            if r.table(x) != *table || a.member(x, budget).known() != Some(*in_source) {
                return false;
            }
            let answer = match query {
                Some(q) => {
                    if r.query.run(x, budget) != Outcome::Halt(q.clone()) {
                        return false;
                    }
                    match b.member(q, budget).known() {
                        Some(v) => v,
                        None => return false,
                    }
                }
                None => false,
            };
            table.apply(answer) == *predicted && predicted != in_source
        }
        Witness::Undefined { x, .. } => {
            r.table(x).queries() && matches!(r.query.run(x, budget), Outcome::Reject)
        }
        _ => false,
    }
}

/// Members of `set` with `|x| ≤ max_len`, or `None` if any is unknown.
pub fn members_up_to(set: &SetSpec, max_len: usize, budget: u64) -> Option<BTreeSet<LexString>> {
    let mut out = BTreeSet::new();
    for x in up_to_len(max_len) {
        if set.member(&x, budget).known()? {
            out.insert(x);
        }
    }
    Some(out)
}

/// A finite-table ranker with synthetic costs, for tests and demos.
pub fn table_fn(name: &str, table: HashMap<LexString, Timed>) -> BudgetedFn {
    BudgetedFn::timed(name, move |x| table.get(x).cloned().unwrap_or(Timed::Diverge))
}
