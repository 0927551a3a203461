//! Constructive results as factories: each returns the constructed set or
//! function together with the maps and checks needed to verify it.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::checkers::{
    check_1tt, check_compression, check_ranking, OneTTReduction, TruthTable, VerifyReport,
};
use crate::compute::{BudgetedFn, Eval, Outcome};
use crate::sets::{Enumerator, Lookup, Membership, SetSpec};
use crate::strings::{lex_rank, lex_unrank, pair, unpair, LexString, Natural, Shortlex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("{map} is not injective: {first} and {second} both map to {image}")]
    NotInjective {
        map: String,
        first: LexString,
        second: LexString,
        image: LexString,
    },
    #[error("{map} did not halt on {input} within the budget")]
    Pending { map: String, input: LexString },
    #[error("{map} has no value on {input}")]
    Undefined { map: String, input: LexString },
    #[error("witness inverse fails at {input}")]
    BadInverse { input: LexString },
}

/// A check a bundle promises to pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Ranking,
    Compression,
    /// Every listed reduction, read as a 1-tt reduction.
    Reductions,
}

/// A reduction carried by a bundle, read as `x ∈ from ⟺ table(to(map(x)))`.
#[derive(Debug, Clone)]
pub struct NamedReduction {
    pub name: String,
    pub from: SetSpec,
    pub to: SetSpec,
    pub reduction: OneTTReduction,
    /// Whether the map is meant to be one-one.
    pub one_one: bool,
}

#[derive(Debug, Clone)]
pub struct ConstructionBundle {
    pub tag: &'static str,
    pub set: Option<SetSpec>,
    pub function: Option<BudgetedFn>,
    pub reductions: Vec<NamedReduction>,
    pub checks: Vec<Check>,
}

impl ConstructionBundle {
    /// Runs every promised check; reports come back labelled.
    pub fn verify(&self, max_len: usize, cover_count: u64, budget: u64) -> Vec<(String, VerifyReport)> {
        let mut out = Vec::new();
        for check in &self.checks {
            match check {
                Check::Ranking | Check::Compression => {
                    let (Some(set), Some(f)) = (&self.set, &self.function) else {
                        continue;
                    };
                    let report = if *check == Check::Ranking {
                        check_ranking(f, set, max_len, budget)
                    } else {
                        check_compression(f, set, max_len, cover_count, budget)
                    };
                    let label = if *check == Check::Ranking { "ranking" } else { "compression" };
                    out.push((label.to_string(), report));
                }
                Check::Reductions => {
                    for r in &self.reductions {
                        let report = check_1tt(&r.reduction, &r.from, &r.to, max_len, budget);
                        out.push((r.name.clone(), report));
                    }
                }
            }
        }
        out
    }
}

/// `f(ε) = ε`, `f(z0) = z`, `f(z1) = z`.
pub fn join_hat_ranker() -> BudgetedFn {
    BudgetedFn::total("join-hat-ranker", 1, |x| x.pop())
}

/// `s_4i ↦ s_3i`, `s_4i+1 ↦ s_3i+1`, `s_4i+2 ↦ s_3i+2`, `s_4i+3 ↦ s_3i+1`.
pub fn interleave4_compressor() -> BudgetedFn {
    BudgetedFn::total("interleave4-compressor", 1, |x| {
        let i = lex_rank(x);
        let q: Natural = &i / 4u32;
        let offset = [0u32, 1, 2, 1][(&i % 4u32).to_usize().expect("residue below 4")];
        lex_unrank(&(q * 3u32 + offset))
    })
}

/// Decides `A` from a ranker `g` of `interleave4(A)`: `s_i ∈ A` iff
/// `g(s_4i+2)` and `g(s_4i)` are two ranks apart. Accepts by halting with
/// `ε`, rejects by rejecting.
pub fn recover_via_ranker(g: BudgetedFn) -> BudgetedFn {
    let name = format!("recover({})", g.name());
    BudgetedFn::native(name, move |x, budget| {
        let i = lex_rank(x) * 4u32;
        let low = g.eval(&lex_unrank(&i), budget);
        let Outcome::Halt(a) = low.outcome else {
            return Eval::pending(budget);
        };
        let high = g.eval(&lex_unrank(&(i + 2u32)), budget - low.steps);
        let Outcome::Halt(b) = high.outcome else {
            return Eval::pending(budget);
        };
        let steps = low.steps + high.steps;
        if lex_rank(&b) == lex_rank(&a) + 2u32 {
            Eval::halt(LexString::empty(), steps)
        } else {
            Eval::reject(steps)
        }
    })
}

/// Maps the `i`-th string `E` prints to the `i`-th string of Σ*; undefined
/// on strings never printed. Each tick of `E` is one step.
pub fn re_compressor(e: Enumerator) -> BudgetedFn {
    let name = format!("re-compressor({})", e.name());
    BudgetedFn::native(name, move |x, budget| match e.lookup(x, budget) {
        Lookup::Found { position, tick } => Eval::halt(LexString::from_index(position as u64), tick),
        _ => Eval::pending(budget),
    })
}

/// `⟨x, y⟩ ↦ x`.
pub fn projection() -> BudgetedFn {
    BudgetedFn::total("projection", 1, |z| unpair(z).0)
}

/// `x ↦ ⟨x, ε⟩`.
pub fn embed_first() -> BudgetedFn {
    BudgetedFn::total("embed-first", 1, |x| pair(x, &LexString::empty()))
}

/// Builds `L_A = {⟨x,ε⟩ | x ∈ A} ∪ {⟨x,s_i⟩ | i ≥ 1, x is the i-th string
/// E prints}` for a set `A` whose complement `E` enumerates without
/// repetition, with `x0 ∈ A` and `x1 ∉ A`.
///
/// The bundle carries `L_A`, the projection compressor, the one-one map
/// `A → L_A` and the many-one map `L_A → A`.
pub fn l_a_construction(
    a: &SetSpec,
    e: &Enumerator,
    x0: &LexString,
    x1: &LexString,
    budget: u64,
) -> Result<ConstructionBundle, ConstructionError> {
    if a.member(x0, budget) != Membership::Yes {
        return Err(ConstructionError::Precondition(format!("{x0} is not known to be in the set")));
    }
    if a.member(x1, budget) != Membership::No {
        return Err(ConstructionError::Precondition(format!(
            "{x1} is not known to be outside the set"
        )));
    }
    let l_a = SetSpec::enumeration_graph(a.clone(), e.clone());
    let back = graph_to_base(e.clone(), x0.clone(), x1.clone());
    Ok(ConstructionBundle {
        tag: "beta1",
        set: Some(l_a.clone()),
        function: Some(projection()),
        reductions: vec![
            NamedReduction {
                name: "A->L_A".into(),
                from: a.clone(),
                to: l_a.clone(),
                reduction: OneTTReduction::uniform(embed_first(), TruthTable::Identity),
                one_one: true,
            },
            NamedReduction {
                name: "L_A->A".into(),
                from: l_a,
                to: a.clone(),
                reduction: OneTTReduction::uniform(back, TruthTable::Identity),
                one_one: false,
            },
        ],
        checks: vec![Check::Compression, Check::Reductions],
    })
}

/// On `⟨x, s_i⟩`: `x` if `i = 0`; otherwise `x0` if `x` is the `i`-th string
/// `E` prints, else `x1`.
pub fn graph_to_base(e: Enumerator, x0: LexString, x1: LexString) -> BudgetedFn {
    BudgetedFn::native("L_A->A", move |z, budget| {
        let (x, tag) = unpair(z);
        if tag.is_empty() {
            return Eval::halt(x, 1);
        }
        let Some(i) = lex_rank(&tag).to_usize() else {
            return Eval::pending(budget);
        };
        match e.nth(i - 1, budget) {
            Ok((w, tick)) => Eval::halt(if w == x { x0.clone() } else { x1.clone() }, tick.max(1)),
            Err(true) => Eval::halt(x1.clone(), 1),
            Err(false) => Eval::pending(budget),
        }
    })
}

/// A bijection `h` of Σ* with `x ∈ A ⟺ h(x) ∈ cylinderize(B)`.
#[derive(Debug, Clone)]
pub struct CylinderWitness {
    pub forward: BudgetedFn,
    pub inverse: BudgetedFn,
}

impl CylinderWitness {
    /// For a set that literally is `cylinderize(B)`.
    pub fn identity() -> Self {
        Self {
            forward: BudgetedFn::identity(),
            inverse: BudgetedFn::identity(),
        }
    }
}

fn eval_total(f: &BudgetedFn, x: &LexString, budget: u64) -> Result<Eval, ConstructionError> {
    let e = f.eval(x, budget);
    match e.outcome {
        Outcome::Halt(_) => Ok(e),
        Outcome::Reject => Err(ConstructionError::Undefined {
            map: f.name().to_string(),
            input: x.clone(),
        }),
        Outcome::Pending(_) => Err(ConstructionError::Pending {
            map: f.name().to_string(),
            input: x.clone(),
        }),
    }
}

/// Upgrades a many-one reduction `m : L → A` to a one-one reduction when
/// `A` is a cylinder: `x ↦ h⁻¹(⟨first(h(m(x))), x⟩)`. The input itself is
/// the fresh padding index, so distinct inputs land on distinct codes.
///
/// The witness is checked on the first `probes` strings.
pub fn mto1_via_cylinder(
    m: BudgetedFn,
    witness: CylinderWitness,
    probes: usize,
    budget: u64,
) -> Result<BudgetedFn, ConstructionError> {
    let mut images: HashMap<LexString, LexString> = HashMap::new();
    for x in Shortlex::new().take(probes) {
        let e = eval_total(&witness.forward, &x, budget)?;
        let y = e.outcome.output().expect("halted").clone();
        if let Some(first) = images.insert(y.clone(), x.clone()) {
            return Err(ConstructionError::NotInjective {
                map: witness.forward.name().to_string(),
                first,
                second: x,
                image: y,
            });
        }
        let back = eval_total(&witness.inverse, &y, budget)?;
        if back.outcome != Outcome::Halt(x.clone()) {
            return Err(ConstructionError::BadInverse { input: x });
        }
    }
    let name = format!("one-one({})", m.name());
    Ok(BudgetedFn::native(name, move |x, budget| {
        let mut spent = 0;
        let mut step = |f: &BudgetedFn, arg: &LexString| -> Option<LexString> {
            let e = f.eval(arg, budget - spent);
            spent += e.steps;
            e.outcome.output().cloned()
        };
        let Some(y) = step(&m, x) else {
            return Eval::pending(budget);
        };
        let Some(code) = step(&witness.forward, &y) else {
            return Eval::pending(budget);
        };
        let padded = pair(&unpair(&code).0, x);
        match step(&witness.inverse, &padded) {
            Some(z) => Eval::halt(z, spent.max(1)),
            None => Eval::pending(budget),
        }
    }))
}

/// A finite partial bijection produced by the back-and-forth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Bijection {
    /// `(x, h(x))`, sorted by `x`.
    pub pairs: Vec<(LexString, LexString)>,
}

impl Bijection {
    pub fn get(&self, x: &LexString) -> Option<&LexString> {
        self.pairs
            .binary_search_by(|(a, _)| a.cmp(x))
            .ok()
            .map(|i| &self.pairs[i].1)
    }

    pub fn is_bijective(&self) -> bool {
        let range: BTreeSet<_> = self.pairs.iter().map(|(_, b)| b).collect();
        range.len() == self.pairs.len()
    }

    /// Pairs whose memberships both resolve and disagree.
    pub fn membership_violations(
        &self,
        a: &SetSpec,
        b: &SetSpec,
        budget: u64,
    ) -> (Vec<(LexString, LexString)>, usize) {
        let mut bad = Vec::new();
        let mut resolved = 0;
        for (x, y) in &self.pairs {
            if let (Some(p), Some(q)) = (a.member(x, budget).known(), b.member(y, budget).known()) {
                resolved += 1;
                if p != q {
                    bad.push((x.clone(), y.clone()));
                }
            }
        }
        (bad, resolved)
    }
}

struct Memo<'a> {
    f: &'a BudgetedFn,
    budget: u64,
    values: HashMap<LexString, LexString>,
    preimages: HashMap<LexString, LexString>,
}

impl<'a> Memo<'a> {
    fn new(f: &'a BudgetedFn, budget: u64) -> Self {
        Self {
            f,
            budget,
            values: HashMap::new(),
            preimages: HashMap::new(),
        }
    }

    fn apply(&mut self, x: &LexString) -> Result<LexString, ConstructionError> {
        if let Some(y) = self.values.get(x) {
            return Ok(y.clone());
        }
        let y = eval_total(self.f, x, self.budget)?
            .outcome
            .output()
            .expect("halted")
            .clone();
        if let Some(first) = self.preimages.insert(y.clone(), x.clone()) {
            return Err(ConstructionError::NotInjective {
                map: self.f.name().to_string(),
                first,
                second: x.clone(),
                image: y,
            });
        }
        self.values.insert(x.clone(), y.clone());
        Ok(y)
    }
}

/// Back-and-forth: from one-one reductions `f : A → B` and `g : B → A`,
/// builds `h` with `x ∈ A ⟺ h(x) ∈ B` until the first `n` strings lie in
/// both its domain and its range. Unmatched strings are taken shortlex-first,
/// alternating sides.
pub fn myhill_isomorphism(
    f: &BudgetedFn,
    g: &BudgetedFn,
    n: usize,
    budget: u64,
) -> Result<Bijection, ConstructionError> {
    let mut fm = Memo::new(f, budget);
    let mut gm = Memo::new(g, budget);
    let mut forward: BTreeMap<LexString, LexString> = BTreeMap::new();
    let mut backward: BTreeMap<LexString, LexString> = BTreeMap::new();
    let firsts: Vec<LexString> = Shortlex::new().take(n).collect();
    let mut next_dom = 0;
    let mut next_ran = 0;
    loop {
        while next_dom < n && forward.contains_key(&firsts[next_dom]) {
            next_dom += 1;
        }
        if next_dom < n {
            let x = firsts[next_dom].clone();
            // follow the f-chain out of the current range
            let mut y = fm.apply(&x)?;
            let mut hops = 0;
            while let Some(prev) = backward.get(&y) {
                hops += 1;
                if hops > forward.len() + 1 {
                    return Err(cycle(f, &x, &y));
                }
                y = fm.apply(&prev.clone())?;
            }
            forward.insert(x.clone(), y.clone());
            backward.insert(y, x);
        }
        while next_ran < n && backward.contains_key(&firsts[next_ran]) {
            next_ran += 1;
        }
        if next_ran < n {
            let y = firsts[next_ran].clone();
            let mut x = gm.apply(&y)?;
            let mut hops = 0;
            while let Some(img) = forward.get(&x) {
                hops += 1;
                if hops > forward.len() + 1 {
                    return Err(cycle(g, &y, &x));
                }
                x = gm.apply(&img.clone())?;
            }
            forward.insert(x.clone(), y.clone());
            backward.insert(y, x);
        }
        if next_dom >= n && next_ran >= n {
            break;
        }
    }
    Ok(Bijection {
        pairs: forward.into_iter().collect(),
    })
}

fn cycle(f: &BudgetedFn, start: &LexString, at: &LexString) -> ConstructionError {
    ConstructionError::NotInjective {
        map: f.name().to_string(),
        first: start.clone(),
        second: at.clone(),
        image: at.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RetraceMode {
    /// Follow the chain for as long as the budget lasts.
    Partial,
    /// Give up as soon as the chain fails to descend.
    Total,
}

/// The output a total-mode retrace gives when the chain stops descending.
pub const RETRACE_ABORT: &str = "0";

/// Ranks a retraceable set by chain length: follows `f` from the input down
/// to `a0`; `k` applications give the rank string `lex_unrank(k)`.
pub fn retrace_to_rank(f: BudgetedFn, a0: LexString, mode: RetraceMode) -> BudgetedFn {
    let name = format!("retrace({}, {a0})", f.name());
    let abort: LexString = RETRACE_ABORT.parse().expect("literal");
    BudgetedFn::native(name, move |x, budget| {
        let mut y = x.clone();
        let mut spent = 0u64;
        let mut k = 0u64;
        loop {
            spent += 1;
            if spent > budget {
                return Eval::pending(budget);
            }
            if y == a0 {
                return Eval::halt(LexString::from_index(k), spent);
            }
            let e = f.eval(&y, budget - spent);
            spent += e.steps;
            let z = match e.outcome {
                Outcome::Halt(z) => z,
                Outcome::Reject => return Eval::reject(spent),
                Outcome::Pending(_) => return Eval::pending(budget),
            };
            if mode == RetraceMode::Total && z >= y {
                return Eval::halt(abort.clone(), spent);
            }
            y = z;
            k += 1;
        }
    })
}

/// Separates the two sides of a pair via a 1-tt reduction `r` of the first
/// side to some set, and finite `L_A` (identity-table queries of the first
/// side) and `L_B` (negation-table queries of the second side). Outputs
/// `"1"` or `"0"`.
pub fn inseparable_separator(r: OneTTReduction, l_a: SetSpec, l_b: SetSpec) -> BudgetedFn {
    let one: LexString = "1".parse().expect("literal");
    let zero: LexString = "0".parse().expect("literal");
    BudgetedFn::native("separator", move |x, budget| {
        let table = r.table(x);
        let answer = |q: &LexString, set: &SetSpec| set.member(q, budget) == Membership::Yes;
        let bit = match table {
            TruthTable::ConstantTrue => return Eval::halt(one.clone(), 1),
            TruthTable::ConstantFalse => return Eval::halt(zero.clone(), 1),
            TruthTable::Identity | TruthTable::Negation => {
                let e = r.query.eval(x, budget);
                let Outcome::Halt(q) = &e.outcome else {
                    return Eval::pending(budget);
                };
                if table == TruthTable::Identity {
                    answer(q, &l_a)
                } else {
                    !answer(q, &l_b)
                }
            }
        };
        Eval::halt(if bit { one.clone() } else { zero.clone() }, 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::{check_ranking, members_up_to, RankOracle, Verdict};
    use crate::compute::Timed;
    use crate::sets::{cylinderize, interleave4, join_hat};
    use crate::strings::{s, successor, up_to_len};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_finite(rng: &mut StdRng, max_len: usize) -> SetSpec {
        SetSpec::finite(up_to_len(max_len).filter(|_| rng.gen_bool(0.5)))
    }

    #[test]
    fn join_hat_ranker_examples() {
        let f = join_hat_ranker();
        assert_eq!(f.run(&s("0"), 1), Outcome::Halt(LexString::empty()));
        assert_eq!(f.run(&s("101"), 1), Outcome::Halt(s("10")));
        assert_eq!(f.run(&LexString::empty(), 1), Outcome::Halt(LexString::empty()));
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let set = random_finite(&mut rng, 6);
            let a = join_hat(&set, &set.complement());
            assert!(check_ranking(&f, &a, 10, 10).passed());
        }
    }

    #[test]
    fn interleave4_compressor_examples() {
        let f = interleave4_compressor();
        assert_eq!(f.run(&LexString::empty(), 1), Outcome::Halt(LexString::empty()));
        assert_eq!(f.run(&s("01"), 1), Outcome::Halt(s("00")));
        assert_eq!(f.run(&s("000"), 1), Outcome::Halt(s("01")));
    }

    #[test]
    fn interleave4_image_of_first_4n_is_first_3n() {
        let f = interleave4_compressor();
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..10 {
            let a = random_finite(&mut rng, 6);
            let b = interleave4(&a);
            for n in [1u64, 7, 64] {
                let image: BTreeSet<u64> = (0..4 * n)
                    .map(LexString::from_index)
                    .filter(|x| b.member(x, 0) == Membership::Yes)
                    .map(|x| f.run(&x, 1).output().unwrap().index_u64().unwrap())
                    .collect();
                let members = (0..4 * n)
                    .filter(|&i| b.member(&LexString::from_index(i), 0) == Membership::Yes)
                    .count();
                assert_eq!(image.len(), members);
                assert_eq!(image, (0..3 * n).collect());
            }
        }
    }

    #[test]
    fn recover_via_oracle_ranker() {
        let all = RankOracle::new(interleave4(&SetSpec::all()), 0).ranker();
        let none = RankOracle::new(interleave4(&SetSpec::empty()), 0).ranker();
        let (yes, no) = (recover_via_ranker(all), recover_via_ranker(none));
        for i in 0..=100 {
            let x = LexString::from_index(i);
            assert!(matches!(yes.run(&x, 10_000), Outcome::Halt(_)));
            assert_eq!(no.run(&x, 10_000), Outcome::Reject);
        }
    }

    #[test]
    fn re_compressor_examples() {
        let e = Enumerator::from_strings("E", vec![s("11"), s("0"), s("101")]);
        let f = re_compressor(e);
        assert_eq!(f.run(&s("11"), 100), Outcome::Halt(LexString::empty()));
        assert_eq!(f.run(&s("101"), 100), Outcome::Halt(s("1")));
        for budget in [1, 10, 100_000] {
            assert!(f.run(&s("1"), budget).is_pending());
        }
    }

    fn cofinite(holes: &[&str]) -> (SetSpec, Enumerator) {
        let e = Enumerator::finite("holes", holes.iter().map(|h| s(h)).collect());
        (SetSpec::co_enumerated(e.clone()), e)
    }

    #[test]
    fn l_a_bundle() {
        let (a, e) = cofinite(&["1", "00", "110"]);
        let bundle = l_a_construction(&a, &e, &LexString::empty(), &s("1"), 100).unwrap();
        let l_a = bundle.set.clone().unwrap();
        for x in up_to_len(6) {
            let embedded = pair(&x, &LexString::empty());
            assert_eq!(l_a.member(&embedded, 100), a.member(&x, 100));
        }
        assert_eq!(l_a.member(&pair(&s("1"), &s("0")), 100), Membership::Yes);
        assert_eq!(l_a.member(&pair(&s("00"), &s("0")), 100), Membership::No);
        for (label, report) in bundle.verify(10, 64, 1_000) {
            assert!(report.passed(), "{label}: {report:?}");
            if label == "compression" {
                assert!(report.cover.unwrap().full());
            }
        }
        assert!(matches!(
            l_a_construction(&a, &e, &s("1"), &s("0"), 100),
            Err(ConstructionError::Precondition(_))
        ));
    }

    fn swap() -> BudgetedFn {
        BudgetedFn::total("swap", 1, |x| {
            LexString::from_bits(x.bits().iter().map(|b| !b).collect())
        })
    }

    #[test]
    fn myhill_examples() {
        let id = BudgetedFn::identity();
        let h = myhill_isomorphism(&id, &id, 50, 10).unwrap();
        assert!(h.pairs.iter().all(|(x, y)| x == y));

        let h = myhill_isomorphism(&swap(), &swap(), 3, 10).unwrap();
        assert_eq!(h.get(&s("0")), Some(&s("1")));
        assert!(h.is_bijective());
        let (bad, _) = h.membership_violations(
            &SetSpec::finite([s("0")]),
            &SetSpec::finite([s("1")]),
            0,
        );
        assert!(bad.is_empty());
    }

    #[test]
    fn myhill_reports_non_injective_maps() {
        let eps = BudgetedFn::constant(LexString::empty());
        let err = myhill_isomorphism(&eps, &BudgetedFn::identity(), 5, 10).unwrap_err();
        assert!(matches!(err, ConstructionError::NotInjective { .. }));
    }

    #[test]
    fn cylinder_padding_is_one_one_and_sound() {
        let base = SetSpec::finite([s("0"), s("11")]);
        let a = cylinderize(&base);
        let x0 = pair(&s("0"), &LexString::empty());
        let x1 = pair(&s("1"), &LexString::empty());
        let m = BudgetedFn::constant(x0.clone());
        let r = mto1_via_cylinder(m, CylinderWitness::identity(), 100, 10).unwrap();
        let images: BTreeSet<_> = Shortlex::new()
            .take(100)
            .map(|x| r.run(&x, 100).output().unwrap().clone())
            .collect();
        assert_eq!(images.len(), 100);
        assert!(images.iter().all(|y| a.member(y, 0) == Membership::Yes));

        // many-one: x ↦ x0 if x ∈ L else x1, with L = finite{ε, 01}
        let l = SetSpec::finite([LexString::empty(), s("01")]);
        let lc = l.clone();
        let m = BudgetedFn::total("to-A", 1, move |x| {
            if lc.member(x, 0) == Membership::Yes { x0.clone() } else { x1.clone() }
        });
        let r = mto1_via_cylinder(m, CylinderWitness::identity(), 100, 10).unwrap();
        for x in up_to_len(5) {
            let y = r.run(&x, 100).output().unwrap().clone();
            assert_eq!(l.member(&x, 0), a.member(&y, 0));
        }
    }

    #[test]
    fn cylinder_padding_rejects_bad_witness() {
        let bad = CylinderWitness {
            forward: BudgetedFn::constant(LexString::empty()),
            inverse: BudgetedFn::identity(),
        };
        let err = mto1_via_cylinder(BudgetedFn::identity(), bad, 10, 10).unwrap_err();
        assert!(matches!(err, ConstructionError::NotInjective { .. }));
    }

    #[test]
    fn retrace_examples() {
        // f: 00 -> 0 -> ε -> ε
        let f = BudgetedFn::timed("chain", |y| match y.len() {
            0 => Timed::Halt(LexString::empty(), 1),
            _ if y.bits().iter().all(|b| !b) => Timed::Halt(y.pop(), 1),
            _ => Timed::Halt(y.clone(), 1),
        });
        let partial = retrace_to_rank(f.clone(), LexString::empty(), RetraceMode::Partial);
        assert_eq!(partial.run(&s("00"), 100), Outcome::Halt(s("1")));
        assert_eq!(partial.run(&LexString::empty(), 100), Outcome::Halt(LexString::empty()));
        assert!(partial.run(&s("1"), 1_000).is_pending());

        let total = retrace_to_rank(f, LexString::empty(), RetraceMode::Total);
        assert_eq!(total.run(&s("1"), 100), Outcome::Halt(s(RETRACE_ABORT)));
        let set = SetSpec::finite([LexString::empty(), s("0"), s("00")]);
        assert!(check_ranking(&total, &set, 8, 1_000).passed());
    }

    #[test]
    fn separator_cases() {
        let l_a = SetSpec::finite([s("1")]);
        let l_b = SetSpec::finite([s("0")]);
        let id = OneTTReduction::uniform(BudgetedFn::identity(), TruthTable::Identity);
        let g = inseparable_separator(id, l_a.clone(), l_b.clone());
        assert_eq!(g.run(&s("1"), 10), Outcome::Halt(s("1")));
        assert_eq!(g.run(&s("0"), 10), Outcome::Halt(s("0")));
        let neg = OneTTReduction::uniform(BudgetedFn::identity(), TruthTable::Negation);
        let g = inseparable_separator(neg, l_a, l_b);
        assert_eq!(g.run(&s("0"), 10), Outcome::Halt(s("0")));
        assert_eq!(g.run(&s("1"), 10), Outcome::Halt(s("1")));
    }

    #[test]
    fn bundle_reductions_hold_on_cofinite_sets() {
        let (a, e) = cofinite(&["", "01"]);
        let bundle = l_a_construction(&a, &e, &s("0"), &LexString::empty(), 100).unwrap();
        let reports = bundle.verify(8, 32, 1_000);
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|(_, r)| r.verdict == Verdict::Pass));
        let members = members_up_to(&a, 3, 100).unwrap();
        assert!(!members.contains(&LexString::empty()));
        assert!(members.contains(&successor(&LexString::empty())));
    }
}
