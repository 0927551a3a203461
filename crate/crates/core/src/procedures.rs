//! Decision procedures that use a ranking function together with
//! enumerations, and the stage construction of a set no candidate
//! compresses.
//!
//! Every procedure runs under an explicit budget and answers
//! `Inconclusive` when it runs out. An observation that contradicts the
//! procedure's premises (say, two enumerated members with the same rank) is
//! a [`PremiseViolation`], never an answer.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checkers::{Verdict, VerifyReport, Witness};
use crate::compute::{BudgetedFn, Dovetail, Eval, Outcome};
use crate::sets::{Enumerator, Lookup};
use crate::strings::{lex_rank, successor, LexString, Natural, Shortlex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Accept,
    Reject,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub answer: Answer,
    /// Which rule fired.
    pub clause: String,
    /// The strings the rule points at.
    pub witness: Vec<LexString>,
    pub steps: u64,
}

impl Decision {
    fn new(answer: Answer, clause: &str, witness: Vec<LexString>, steps: u64) -> Self {
        Self {
            answer,
            clause: clause.to_string(),
            witness,
            steps,
        }
    }

    fn out_of_budget(steps: u64) -> Self {
        Self::new(Answer::Inconclusive, "budget", Vec::new(), steps)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("premise violated: {message}")]
pub struct PremiseViolation {
    pub message: String,
    pub witness: Vec<LexString>,
}

fn violation(message: impl Into<String>, witness: Vec<LexString>) -> PremiseViolation {
    PremiseViolation {
        message: message.into(),
        witness,
    }
}

pub type DecideResult = Result<Decision, PremiseViolation>;

/// Ranks seen so far, kept consistent with shortlex order.
#[derive(Default)]
struct RankBook {
    by_rank: BTreeMap<Natural, LexString>,
}

impl RankBook {
    /// Records `f(y) = rank`; fails if the ranks seen so far cannot all be
    /// correct.
    fn record(&mut self, y: &LexString, rank: Natural) -> Result<(), PremiseViolation> {
        if let Some(other) = self.by_rank.get(&rank) {
            if other != y {
                return Err(violation("two members share a rank", vec![other.clone(), y.clone()]));
            }
            return Ok(());
        }
        let below = self.by_rank.range(..&rank).next_back();
        let above = self.by_rank.range(&rank..).next();
        for (z, z_below) in below.map(|(_, z)| (z, true)).into_iter().chain(above.map(|(_, z)| (z, false))) {
            if (*z < *y) != z_below {
                return Err(violation("ranks disagree with shortlex order", vec![z.clone(), y.clone()]));
            }
        }
        self.by_rank.insert(rank, y.clone());
        Ok(())
    }

    /// Members with consecutive ranks strictly around `x`.
    fn bracket(&self, rank: &Natural, x: &LexString) -> Option<(LexString, LexString)> {
        let y = self.by_rank.get(rank)?;
        let around = |lo: &LexString, hi: &LexString| *lo < *x && *x < *hi;
        if let Some(z) = self.by_rank.get(&(rank + 1u32)) {
            if around(y, z) {
                return Some((y.clone(), z.clone()));
            }
        }
        if *rank > Natural::from(0u32) {
            if let Some(z) = self.by_rank.get(&(rank - 1u32)) {
                if around(z, y) {
                    return Some((z.clone(), y.clone()));
                }
            }
        }
        None
    }
}

/// Decides membership in an r.e. set from a repetition-free enumerator `e`
/// and a ranking function `f`. Each enumerated string is ranked; accept once
/// `x` is enumerated, reject once a member above `x` has the least rank, or
/// once two members around `x` have consecutive ranks. If the enumeration
/// ends without `x`, the set was finite and `x` is not in it.
pub fn decide_re_with_ranker(e: &Enumerator, f: &BudgetedFn, x: &LexString, budget: u64) -> DecideResult {
    let mut book = RankBook::default();
    let mut f_steps = 0u64;
    let mut ticks = 0u64;
    for i in 0.. {
        let (y, tick) = match e.nth(i, budget.saturating_sub(f_steps)) {
            Ok(found) => found,
            Err(true) => return Ok(Decision::new(Answer::Reject, "exhausted", Vec::new(), ticks + f_steps)),
            Err(false) => return Ok(Decision::out_of_budget(budget)),
        };
        ticks = tick;
        if y == *x {
            return Ok(Decision::new(Answer::Accept, "a", vec![y], ticks + f_steps));
        }
        let ev = f.eval(&y, budget.saturating_sub(ticks + f_steps));
        f_steps += ev.steps;
        let rank = match ev.outcome {
            Outcome::Halt(r) => lex_rank(&r),
            Outcome::Reject => return Err(violation("ranker has no value on a member", vec![y])),
            Outcome::Pending(_) => return Ok(Decision::out_of_budget(budget)),
        };
        book.record(&y, rank.clone())?;
        let spent = ticks + f_steps;
        if rank == Natural::from(0u32) && y > *x {
            return Ok(Decision::new(Answer::Reject, "b", vec![y], spent));
        }
        if let Some((lo, hi)) = book.bracket(&rank, x) {
            return Ok(Decision::new(Answer::Reject, "c", vec![lo, hi], spent));
        }
    }
    unreachable!("the enumeration loop only exits by returning")
}

/// The fixed output for inputs the complement enumerator claims first.
pub const TOTALIZE_FALLBACK: &str = "101010";

/// Races `f(x)` against the complement enumerator reaching `x`, one step
/// each in turn. Outputs `f(x)` if it arrives first (ties go to `f`),
/// `fallback` if the enumerator does.
pub fn totalize_ranker(f: BudgetedFn, e_comp: Enumerator, fallback: LexString) -> BudgetedFn {
    let name = format!("total({})", f.name());
    BudgetedFn::native(name, move |x, budget| {
        let half = budget / 2;
        let ev = f.eval(x, half);
        let seen = match e_comp.lookup(x, half) {
            Lookup::Found { tick, .. } => Some(tick),
            _ => None,
        };
        match (ev.outcome, seen) {
            (Outcome::Halt(y), seen) if seen.map_or(true, |p| ev.steps <= p) => {
                Eval::halt(y, 2 * ev.steps)
            }
            (_, Some(p)) => Eval::halt(fallback.clone(), 2 * p),
            _ => Eval::pending(budget),
        }
    })
}

/// Decides a co-r.e. set from a repetition-free enumerator `e` of its
/// complement, an enumerator `f` of an infinite subset, and a total ranker
/// `g`: find `s_n > x` in the subset; exactly `n − rank(g(s_n))` strings up
/// to `s_n` are outside the set, so wait for `e` to list them.
pub fn decide_core_with_subset(
    e: &Enumerator,
    f: &Enumerator,
    g: &BudgetedFn,
    x: &LexString,
    budget: u64,
) -> DecideResult {
    let mut spent = 0u64;
    let mut found = None;
    for i in 0.. {
        match f.nth(i, budget) {
            Ok((y, tick)) if y > *x => {
                spent = tick;
                found = Some(y);
                break;
            }
            Ok(_) => {}
            Err(true) => return Err(violation("the subset enumeration is finite", Vec::new())),
            Err(false) => return Ok(Decision::out_of_budget(budget)),
        }
    }
    let s_n = found.expect("loop breaks with a string");
    let ev = g.eval(&s_n, budget - spent);
    spent += ev.steps;
    let g_rank = match ev.outcome {
        Outcome::Halt(r) => lex_rank(&r),
        Outcome::Reject => return Err(violation("ranker has no value on a member", vec![s_n])),
        Outcome::Pending(_) => return Ok(Decision::out_of_budget(budget)),
    };
    let n = lex_rank(&s_n);
    if g_rank > n {
        return Err(violation("rank exceeds the number of strings below", vec![s_n]));
    }
    let wanted = n - g_rank;
    let mut outside = Vec::new();
    let e_budget = budget - spent;
    let mut e_ticks = 0;
    for j in 0.. {
        if Natural::from(outside.len()) == wanted {
            break;
        }
        match e.nth(j, e_budget) {
            Ok((z, tick)) => {
                e_ticks = tick;
                if z == s_n {
                    return Err(violation("a subset member was enumerated as a non-member", vec![z]));
                }
                if z <= s_n {
                    outside.push(z);
                }
            }
            Err(true) => {
                return Err(violation("the complement enumeration ended early", vec![s_n]));
            }
            Err(false) => return Ok(Decision::out_of_budget(budget)),
        }
    }
    let steps = spent + e_ticks;
    if outside.contains(x) {
        Ok(Decision::new(Answer::Reject, "listed", vec![s_n, x.clone()], steps))
    } else {
        Ok(Decision::new(Answer::Accept, "not-listed", vec![s_n], steps))
    }
}

/// Decides membership from a ranker that halts only on members (and may
/// reject elsewhere), by dovetailing it over all of Σ*.
pub fn variant_a_decider(f: &BudgetedFn, x: &LexString, budget: u64) -> DecideResult {
    let mut dove = Dovetail::new(f.clone(), Shortlex::new());
    let mut book = RankBook::default();
    loop {
        let emission = match dove.next_within(budget) {
            Ok(Some(e)) => e,
            Ok(None) | Err(_) => return Ok(Decision::out_of_budget(dove.charged())),
        };
        let steps = dove.charged();
        let y = emission.input;
        let out = match emission.outcome {
            Outcome::Halt(out) => out,
            Outcome::Reject if y == *x => {
                return Ok(Decision::new(Answer::Reject, "declared", vec![y], steps));
            }
            _ => continue,
        };
        if y == *x {
            return Ok(Decision::new(Answer::Accept, "computed", vec![y], steps));
        }
        let rank = lex_rank(&out);
        book.record(&y, rank.clone())?;
        if rank == Natural::from(0u32) && y > *x {
            return Ok(Decision::new(Answer::Reject, "least-above", vec![y], steps));
        }
        if let Some((lo, hi)) = book.bracket(&rank, x) {
            return Ok(Decision::new(Answer::Reject, "bracket", vec![lo, hi], steps));
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageCase {
    Collision,
    Hole,
    FiniteDomain,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StageWitness {
    /// Two committed members with the same value.
    Collision { x: LexString, y: LexString, output: LexString },
    /// A frozen-out string whose value no committed member reaches.
    Hole { x: LexString, image: LexString },
    /// No string of the scanned window halts.
    FiniteDomain { from: LexString, horizon: u64 },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub case: StageCase,
    pub candidate: String,
    pub witness: StageWitness,
    /// Strings this stage put into the set.
    pub added: Vec<LexString>,
    /// Everything below this string is fixed from now on.
    pub frontier: LexString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageState {
    pub stages: Vec<Stage>,
    /// The committed set, in shortlex order.
    pub members: Vec<LexString>,
    pub stage_budget: u64,
    pub horizon: u64,
}

impl StageState {
    pub fn certified(&self) -> usize {
        self.stages.iter().filter(|s| s.case != StageCase::Inconclusive).count()
    }

    /// Checks growth and the freeze frontier at every stage.
    pub fn check_invariants(&self) -> Result<(), String> {
        let members: BTreeSet<_> = self.members.iter().collect();
        let mut frontier = LexString::empty();
        let mut committed = BTreeSet::new();
        for (i, stage) in self.stages.iter().enumerate() {
            let fresh: Vec<_> = stage.added.iter().filter(|a| !committed.contains(*a)).collect();
            if fresh.is_empty() {
                return Err(format!("stage {i} adds nothing"));
            }
            if let Some(a) = fresh.iter().find(|a| ***a < frontier || ***a >= stage.frontier) {
                return Err(format!("stage {i} adds {a} outside its window"));
            }
            if stage.frontier <= frontier {
                return Err(format!("stage {i} does not advance the frontier"));
            }
            if let Some(a) = stage.added.iter().find(|a| !members.contains(a)) {
                return Err(format!("stage {i} added {a}, which is not a member"));
            }
            committed.extend(stage.added.iter().cloned());
            frontier = stage.frontier.clone();
        }
        if members.iter().any(|m| !committed.contains(*m)) {
            return Err("a member was never added by any stage".into());
        }
        Ok(())
    }
}

/// One stage per candidate. Each stage looks, at `stage_budget` steps per
/// evaluation, for a collision among the committed members and the
/// `horizon` strings from the frontier on; failing that, for the least
/// halting string in that window to freeze out of the set; failing that,
/// it records that nothing in the window halts.
pub fn diagonalize(candidates: &[BudgetedFn], stage_budget: u64, horizon: u64) -> StageState {
    let mut members: BTreeSet<LexString> = BTreeSet::new();
    let mut w = LexString::empty();
    let mut stages = Vec::new();
    for phi in candidates {
        let window: Vec<LexString> = Shortlex::from(w.clone()).take(horizon as usize).collect();
        let mut values: HashMap<LexString, Outcome> = HashMap::new();
        for x in members.iter().chain(window.iter()) {
            values.insert(x.clone(), phi.run(x, stage_budget));
        }
        let collision = first_collision(members.iter().chain(window.iter()), &values);
        let (case, witness, added, next) = if let Some((x, y, output)) = collision {
            let top = x.clone().max(y.clone()).max(w.clone());
            let added = vec![x.clone(), y.clone(), w.clone()];
            (StageCase::Collision, StageWitness::Collision { x, y, output }, added, successor(&top))
        } else if let Some(x) = window.iter().find(|x| matches!(values[*x], Outcome::Halt(_))) {
            let image = values[x].output().expect("halted").clone();
            let kept = successor(x);
            let resolves_elsewhere = |m: &LexString| {
                let v = values.get(m).cloned().unwrap_or_else(|| phi.run(m, stage_budget));
                !v.is_pending() && v.output() != Some(&image)
            };
            if members.iter().chain([&kept]).all(resolves_elsewhere) {
                let next = successor(&kept);
                (StageCase::Hole, StageWitness::Hole { x: x.clone(), image }, vec![kept], next)
            } else {
                let reason = format!("cannot certify that no member reaches {image}");
                inconclusive(&w, reason)
            }
        } else {
            let witness = StageWitness::FiniteDomain {
                from: w.clone(),
                horizon,
            };
            (StageCase::FiniteDomain, witness, vec![w.clone()], successor(&w))
        };
        members.extend(added.iter().cloned());
        let mut added = added;
        added.sort();
        added.dedup();
        stages.push(Stage {
            case,
            candidate: phi.name().to_string(),
            witness,
            added,
            frontier: next.clone(),
        });
        w = next;
    }
    StageState {
        stages,
        members: members.into_iter().collect(),
        stage_budget,
        horizon,
    }
}

fn inconclusive(
    w: &LexString,
    reason: String,
) -> (StageCase, StageWitness, Vec<LexString>, LexString) {
    (
        StageCase::Inconclusive,
        StageWitness::Inconclusive { reason },
        vec![w.clone()],
        successor(w),
    )
}

/// The pair `(x, y)`, `x < y`, with equal values, least by `y` then `x`.
fn first_collision<'a>(
    order: impl Iterator<Item = &'a LexString>,
    values: &HashMap<LexString, Outcome>,
) -> Option<(LexString, LexString, LexString)> {
    let mut first_with: HashMap<&LexString, &LexString> = HashMap::new();
    for z in order {
        if let Outcome::Halt(out) = &values[z] {
            if let Some(x) = first_with.get(out) {
                return Some(((*x).clone(), z.clone(), out.clone()));
            }
            first_with.insert(out, z);
        }
    }
    None
}

/// Re-verifies every certified stage against the candidates at `budget`
/// steps, plus the growth and frontier invariants.
pub fn audit_diagonal(state: &StageState, candidates: &[BudgetedFn], budget: u64) -> VerifyReport {
    let mut steps = 0;
    let fail = |stage: usize, reason: String, examined: u64, steps: u64| VerifyReport {
        verdict: Verdict::Refuted,
        witness: Some(Witness::Stage { stage, reason }),
        examined,
        steps,
        unresolved: 0,
        cover: None,
    };
    if let Err(reason) = state.check_invariants() {
        return fail(0, reason, 0, 0);
    }
    let members: BTreeSet<&LexString> = state.members.iter().collect();
    let mut unresolved = 0;
    for (i, stage) in state.stages.iter().enumerate() {
        let Some(phi) = candidates.get(i) else {
            return fail(i, "no candidate for this stage".into(), i as u64, steps);
        };
        let mut run = |x: &LexString| {
            let e: Eval = phi.eval(x, budget);
            steps += e.steps;
            e.outcome
        };
        match &stage.witness {
            StageWitness::Collision { x, y, output } => {
                let ok = x != y
                    && members.contains(x)
                    && members.contains(y)
                    && run(x) == Outcome::Halt(output.clone())
                    && run(y) == Outcome::Halt(output.clone());
                if !ok {
                    return fail(i, format!("collision {x}, {y} does not re-verify"), i as u64, steps);
                }
            }
            StageWitness::Hole { x, image } => {
                if members.contains(x) || *x >= stage.frontier || run(x) != Outcome::Halt(image.clone()) {
                    return fail(i, format!("hole at {x} does not re-verify"), i as u64, steps);
                }
                for m in &state.members {
                    let v = run(m);
                    if v.output() == Some(image) {
                        return fail(i, format!("member {m} reaches {image}"), i as u64, steps);
                    }
                    if v.is_pending() {
                        if *m < stage.frontier {
                            return fail(i, format!("frozen member {m} is unresolved"), i as u64, steps);
                        }
                        unresolved += 1;
                    }
                }
            }
            StageWitness::FiniteDomain { from, horizon } => {
                let window = Shortlex::from(from.clone()).take(*horizon as usize);
                if let Some(z) = window.into_iter().find(|z| matches!(run(z), Outcome::Halt(_))) {
                    return fail(i, format!("{z} halts inside the window"), i as u64, steps);
                }
            }
            StageWitness::Inconclusive { .. } => {}
        }
    }
    VerifyReport {
        verdict: Verdict::Pass,
        witness: None,
        examined: state.stages.len() as u64,
        steps,
        unresolved,
        cover: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::RankOracle;
    use crate::compute::{enumerate_machines, Timed};
    use crate::sets::{Membership, SetSpec};
    use crate::strings::{s, up_to_len};

    fn starts_with_one() -> SetSpec {
        SetSpec::decidable("starts-with-1", |x| x.bits().first() == Some(&true))
    }

    fn even_index() -> SetSpec {
        SetSpec::decidable("even-index", |x| x.index_u64().unwrap() % 2 == 0)
    }

    fn enumerate(set: &SetSpec) -> Enumerator {
        let set = set.clone();
        Enumerator::filter("E", move |x| set.member(x, 1) == Membership::Yes)
    }

    #[test]
    fn decide_re_examples() {
        let all = Enumerator::filter("all", |_| true);
        let d = decide_re_with_ranker(&all, &BudgetedFn::identity(), &s("01"), 1_000).unwrap();
        assert_eq!((d.answer, d.clause.as_str()), (Answer::Accept, "a"));

        let a = starts_with_one();
        let f = RankOracle::new(a.clone(), 1).ranker();
        let d = decide_re_with_ranker(&enumerate(&a), &f, &s("0"), 10_000).unwrap();
        assert_eq!((d.answer, d.clause.as_str()), (Answer::Reject, "b"));

        let a = even_index();
        let f = RankOracle::new(a.clone(), 1).ranker();
        let d = decide_re_with_ranker(&enumerate(&a), &f, &LexString::from_index(3), 10_000).unwrap();
        assert_eq!((d.answer, d.clause.as_str()), (Answer::Reject, "c"));
        assert_eq!(d.witness, vec![LexString::from_index(2), LexString::from_index(4)]);
    }

    #[test]
    fn decide_re_on_finite_enumerations() {
        let e = Enumerator::finite("E", vec![s("0"), s("10")]);
        let f = RankOracle::new(SetSpec::finite([s("0"), s("10")]), 0).ranker();
        let d = decide_re_with_ranker(&e, &f, &s("1"), 100_000).unwrap();
        assert_eq!(d.answer, Answer::Reject);
        let d = decide_re_with_ranker(&e, &f, &s("111"), 100_000).unwrap();
        assert_eq!((d.answer, d.clause.as_str()), (Answer::Reject, "exhausted"));
    }

    #[test]
    fn decide_re_flags_inconsistent_ranker() {
        let e = Enumerator::filter("all", |_| true);
        let eps = BudgetedFn::constant(LexString::empty());
        let err = decide_re_with_ranker(&e, &eps, &s("11"), 1_000).unwrap_err();
        assert_eq!(err.witness, vec![LexString::empty(), s("0")]);
    }

    #[test]
    fn totalize_examples() {
        let holes = Enumerator::finite("holes", vec![s("0"), s("11")]);
        let a = SetSpec::co_enumerated(holes.clone());
        let f = RankOracle::new(a.clone(), 10).partial_ranker();
        let fallback = s(TOTALIZE_FALLBACK);
        let t = totalize_ranker(f, holes, fallback.clone());
        assert_eq!(t.run(&s("0"), 1_000), Outcome::Halt(fallback));
        for x in up_to_len(6) {
            assert!(!t.run(&x, 1_000).is_pending());
        }
        assert!(crate::checkers::check_ranking(&t, &a, 8, 10_000).passed());
    }

    #[test]
    fn decide_core_examples() {
        let holes = Enumerator::finite("holes", vec![s("0")]);
        let a = SetSpec::co_enumerated(holes.clone());
        let subset = Enumerator::filter("all-but-0", |x| *x != s("0"));
        let g = RankOracle::new(a, 10).ranker();
        let d = decide_core_with_subset(&holes, &subset, &g, &s("0"), 10_000).unwrap();
        assert_eq!(d.answer, Answer::Reject);
        let d = decide_core_with_subset(&holes, &subset, &g, &s("1"), 10_000).unwrap();
        assert_eq!(d.answer, Answer::Accept);
    }

    #[test]
    fn decide_core_matches_ground_truth_on_even_index() {
        let a = even_index();
        let e = enumerate(&a.complement());
        let f = enumerate(&a);
        let g = RankOracle::new(a.clone(), 1).ranker();
        for x in up_to_len(6) {
            let d = decide_core_with_subset(&e, &f, &g, &x, 100_000).unwrap();
            let truth = a.member(&x, 1) == Membership::Yes;
            assert_eq!(d.answer, if truth { Answer::Accept } else { Answer::Reject }, "{x}");
        }
    }

    #[test]
    fn variant_a_examples() {
        let d = variant_a_decider(&BudgetedFn::identity(), &s("010"), 10_000).unwrap();
        assert_eq!(d.answer, Answer::Accept);

        let a = starts_with_one();
        let f = RankOracle::new(a, 1).variant_a_ranker();
        let d = variant_a_decider(&f, &s("0"), 10_000).unwrap();
        assert_eq!(d.answer, Answer::Reject);

        // a ranker that diverges on non-members leaves only the other clauses
        let a = even_index();
        let f = RankOracle::new(a, 1).partial_ranker();
        let d = variant_a_decider(&f, &LexString::from_index(3), 10_000).unwrap();
        assert_eq!((d.answer, d.clause.as_str()), (Answer::Reject, "bracket"));
        let f = RankOracle::new(starts_with_one(), 1).partial_ranker();
        let d = variant_a_decider(&f, &s("0"), 10_000).unwrap();
        assert_eq!((d.answer, d.clause.as_str()), (Answer::Reject, "least-above"));
    }

    fn stage_of(phi: BudgetedFn) -> (StageState, Vec<BudgetedFn>) {
        let cands = vec![phi];
        (diagonalize(&cands, 100, 50), cands)
    }

    #[test]
    fn diagonal_cases() {
        let (st, c) = stage_of(BudgetedFn::constant(LexString::empty()));
        assert_eq!(st.stages[0].case, StageCase::Collision);
        assert_eq!(
            st.stages[0].witness,
            StageWitness::Collision { x: LexString::empty(), y: s("0"), output: LexString::empty() }
        );
        assert!(audit_diagonal(&st, &c, 100).passed());

        let (st, c) = stage_of(BudgetedFn::identity());
        assert_eq!(st.stages[0].case, StageCase::Hole);
        assert_eq!(st.stages[0].witness, StageWitness::Hole { x: LexString::empty(), image: LexString::empty() });
        assert_eq!(st.members, vec![s("0")]);
        assert_eq!(st.stages[0].frontier, s("1"));
        assert!(audit_diagonal(&st, &c, 100).passed());

        let (st, c) = stage_of(BudgetedFn::never());
        assert_eq!(st.stages[0].case, StageCase::FiniteDomain);
        assert_eq!(st.members, vec![LexString::empty()]);
        assert!(audit_diagonal(&st, &c, 100).passed());
    }

    #[test]
    fn tampered_state_is_refuted() {
        let (mut st, c) = stage_of(BudgetedFn::constant(LexString::empty()));
        st.members.retain(|m| *m != s("0"));
        assert_eq!(audit_diagonal(&st, &c, 100).verdict, Verdict::Refuted);
    }

    #[test]
    fn hole_needs_resolved_members() {
        // halts everywhere except on ε, which the first stage commits
        let slow = BudgetedFn::timed("slow-eps", |x| {
            if x.is_empty() { Timed::Diverge } else { Timed::Halt(x.clone(), 1) }
        });
        let cands = vec![BudgetedFn::never(), slow];
        let st = diagonalize(&cands, 100, 20);
        assert_eq!(st.stages[1].case, StageCase::Inconclusive);
        st.check_invariants().unwrap();
        assert!(audit_diagonal(&st, &cands, 100).passed());
    }

    #[test]
    fn diagonal_over_first_machines_keeps_invariants() {
        let cands = enumerate_machines(12);
        let st = diagonalize(&cands, 1_000, 100);
        st.check_invariants().unwrap();
        assert!(st.certified() >= 9);
        assert!(audit_diagonal(&st, &cands, 1_000).passed());
        let json = serde_json::to_string(&st).unwrap();
        let back: StageState = serde_json::from_str(&json).unwrap();
        assert_eq!(back, st);
    }
}
