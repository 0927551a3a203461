//! Set presentations with three-valued, budgeted membership.
//!
//! Every presentation answers `Yes`, `No` or `Unknown`. Answers are sound
//! with respect to the unbudgeted set and never flip once definite: raising
//! the budget can only turn `Unknown` into a definite answer.

mod enumerator;
mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::compute::{self_acceptance, BudgetedFn, Eval, Outcome};
use crate::strings::{lex_rank, lex_unrank, predecessor, unpair, LexString, Natural};

pub use enumerator::{Enumerator, Lookup, Tick};
pub use parse::{parse_set, SetParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

impl Membership {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Membership::Yes
        } else {
            Membership::No
        }
    }

    pub fn negate(self) -> Self {
        match self {
            Membership::Yes => Membership::No,
            Membership::No => Membership::Yes,
            Membership::Unknown => Membership::Unknown,
        }
    }

    pub fn known(self) -> Option<bool> {
        match self {
            Membership::Yes => Some(true),
            Membership::No => Some(false),
            Membership::Unknown => None,
        }
    }
}

pub enum Presentation {
    Finite(BTreeSet<LexString>),
    All,
    /// Accepting halt means member, rejecting halt means non-member.
    Predicate { f: BudgetedFn, budget: u64 },
    Enumerated(Enumerator),
    /// Presented by an enumeration of the complement.
    CoEnumerated(Enumerator),
    Complement(SetSpec),
    JoinHat(SetSpec, SetSpec),
    Interleave4(SetSpec),
    Cylinder(SetSpec),
    HaltingApprox { budget: u64 },
    CoKCylinder { budget: u64 },
    /// `{⟨x,ε⟩ | x ∈ base} ∪ {⟨x,s_i⟩ | i ≥ 1, x is the i-th string the
    /// complement enumerator prints}`.
    EnumerationGraph { base: SetSpec, complement: Enumerator },
}

/// An immutable, cheaply clonable set description.
#[derive(Clone)]
pub struct SetSpec(Arc<Presentation>);

impl SetSpec {
    pub fn new(p: Presentation) -> Self {
        Self(Arc::new(p))
    }

    pub fn presentation(&self) -> &Presentation {
        &self.0
    }

    pub fn finite<I: IntoIterator<Item = LexString>>(items: I) -> Self {
        Self::new(Presentation::Finite(items.into_iter().collect()))
    }

    pub fn all() -> Self {
        Self::new(Presentation::All)
    }

    pub fn empty() -> Self {
        Self::finite([])
    }

    pub fn predicate(f: BudgetedFn, budget: u64) -> Self {
        Self::new(Presentation::Predicate { f, budget })
    }

    /// A decidable set given by a host predicate, one step per query.
    pub fn decidable<P>(name: &str, pred: P) -> Self
    where
        P: Fn(&LexString) -> bool + Send + Sync + 'static,
    {
        let f = BudgetedFn::native(name, move |x, budget| {
            if budget == 0 {
                Eval::pending(0)
            } else if pred(x) {
                Eval::halt(LexString::empty(), 1)
            } else {
                Eval::reject(1)
            }
        });
        Self::predicate(f, 1)
    }

    pub fn enumerated(e: Enumerator) -> Self {
        Self::new(Presentation::Enumerated(e))
    }

    pub fn co_enumerated(complement: Enumerator) -> Self {
        Self::new(Presentation::CoEnumerated(complement))
    }

    pub fn complement(&self) -> Self {
        Self::new(Presentation::Complement(self.clone()))
    }

    pub fn halting_approx(budget: u64) -> Self {
        Self::new(Presentation::HaltingApprox { budget })
    }

    pub fn enumeration_graph(base: SetSpec, complement: Enumerator) -> Self {
        Self::new(Presentation::EnumerationGraph { base, complement })
    }

    pub fn member(&self, x: &LexString, budget: u64) -> Membership {
        use Membership::*;
        match self.presentation() {
            Presentation::Finite(items) => Membership::from_bool(items.contains(x)),
            Presentation::All => Yes,
            Presentation::Predicate { f, budget: own } => match f.run(x, budget.max(*own)) {
                Outcome::Halt(_) => Yes,
                Outcome::Reject => No,
                Outcome::Pending(_) => Unknown,
            },
            Presentation::Enumerated(e) => match e.lookup(x, budget) {
                Lookup::Found { .. } => Yes,
                Lookup::Absent => No,
                Lookup::NotYet => Unknown,
            },
            Presentation::CoEnumerated(e) => match e.lookup(x, budget) {
                Lookup::Found { .. } => No,
                Lookup::Absent => Yes,
                Lookup::NotYet => Unknown,
            },
            Presentation::Complement(a) => a.member(x, budget).negate(),
            Presentation::JoinHat(a, b) => match x.last_bit() {
                None => No,
                Some(false) => a.member(&x.pop(), budget),
                Some(true) => b.member(&x.pop(), budget),
            },
            Presentation::Interleave4(a) => {
                let i = lex_rank(x);
                let q: Natural = &i / 4u32;
                match (&i % 4u32).to_u32() {
                    Some(1) => a.member(&lex_unrank(&q), budget),
                    Some(3) => a.member(&lex_unrank(&q), budget).negate(),
                    _ => Yes,
                }
            }
            Presentation::Cylinder(b) => b.member(&unpair(x).0, budget),
            Presentation::HaltingApprox { budget: own } => {
                match self_acceptance(x, budget.max(*own)).outcome {
                    Outcome::Halt(_) => Yes,
                    Outcome::Reject => No,
                    Outcome::Pending(_) => Unknown,
                }
            }
            Presentation::CoKCylinder { budget: own } => co_k_member(x, budget.max(*own)),
            Presentation::EnumerationGraph { base, complement } => {
                let (first, second) = unpair(x);
                if second.is_empty() {
                    return base.member(&first, budget);
                }
                let Some(i) = lex_rank(&second).to_usize() else {
                    return Unknown;
                };
                match complement.nth(i - 1, budget) {
                    Ok((w, _)) => Membership::from_bool(w == first),
                    Err(true) => No,
                    Err(false) => Unknown,
                }
            }
        }
    }

    /// Short text description; grammar-level sets print in the grammar.
    pub fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.presentation() {
            Presentation::Finite(items) => {
                if items.is_empty() {
                    return f.write_str("empty");
                }
                let parts: Vec<_> = items.iter().map(|x| x.to_string()).collect();
                write!(f, "finite{{{}}}", parts.join(","))
            }
            Presentation::All => f.write_str("all"),
            Presentation::Predicate { f: p, .. } => write!(f, "decide[{}]", p.name()),
            Presentation::Enumerated(e) => write!(f, "re[{}]", e.name()),
            Presentation::CoEnumerated(e) => write!(f, "core[{}]", e.name()),
            Presentation::Complement(a) => write!(f, "complement({a})"),
            Presentation::JoinHat(a, b) => write!(f, "joinhat({a},{b})"),
            Presentation::Interleave4(a) => write!(f, "interleave4({a})"),
            Presentation::Cylinder(a) => write!(f, "cylinder({a})"),
            Presentation::HaltingApprox { budget } => write!(f, "K_approx({budget})"),
            Presentation::CoKCylinder { budget } => write!(f, "coK_cyl({budget})"),
            Presentation::EnumerationGraph { base, complement } => {
                write!(f, "L[{base};{}]", complement.name())
            }
        }
    }
}

impl fmt::Debug for SetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetSpec({self})")
    }
}

/// `{x0 | x ∈ A} ∪ {x1 | x ∈ B}`.
pub fn join_hat(a: &SetSpec, b: &SetSpec) -> SetSpec {
    SetSpec::new(Presentation::JoinHat(a.clone(), b.clone()))
}

/// `{s_4i} ∪ {s_4i+1 | s_i ∈ A} ∪ {s_4i+2} ∪ {s_4i+3 | s_i ∉ A}`.
pub fn interleave4(a: &SetSpec) -> SetSpec {
    SetSpec::new(Presentation::Interleave4(a.clone()))
}

/// `{⟨x,y⟩ | x ∈ B, y ∈ Σ*}`.
pub fn cylinderize(b: &SetSpec) -> SetSpec {
    SetSpec::new(Presentation::Cylinder(b.clone()))
}

pub fn complement(a: &SetSpec) -> SetSpec {
    a.complement()
}

pub fn member(set: &SetSpec, x: &LexString, budget: u64) -> Membership {
    set.member(x, budget)
}

/// `{⟨x,ε⟩ | x ∉ K} ∪ {⟨x,successor(y)⟩ | M_x(x) accepts in exactly y steps}`,
/// where "y steps" reads `y` as its shortlex rank.
pub fn co_k_cylinder_set(budget: u64) -> SetSpec {
    SetSpec::new(Presentation::CoKCylinder { budget })
}

fn co_k_member(code: &LexString, budget: u64) -> Membership {
    let (x, tag) = unpair(code);
    let Eval { outcome, steps } = self_acceptance(&x, budget);
    let Some(y) = predecessor(&tag) else {
        // ⟨x, ε⟩ ∈ A iff x ∉ K
        return match outcome {
            Outcome::Halt(_) => Membership::No,
            Outcome::Reject => Membership::Yes,
            Outcome::Pending(_) => Membership::Unknown,
        };
    };
    let wanted = lex_rank(&y).to_u64();
    match outcome {
        Outcome::Halt(_) => Membership::from_bool(wanted == Some(steps)),
        Outcome::Reject => Membership::No,
        Outcome::Pending(_) => match wanted {
            Some(t) if t <= budget => Membership::No,
            _ => Membership::Unknown,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compute::Program;
    use crate::strings::{pair, s, successor, up_to_len, LexString};
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn table(items: &[&str]) -> SetSpec {
        SetSpec::finite(items.iter().map(|t| s(t)))
    }

    fn index_string(text: &str) -> LexString {
        lex_unrank(&text.parse::<Program>().unwrap().index())
    }

    #[test]
    fn presentation_examples() {
        assert_eq!(table(&["0", "10"]).member(&s("10"), 0), Membership::Yes);
        let powers = SetSpec::enumerated(Enumerator::from_strings(
            "zeros",
            (1usize..).map(|n| LexString::from_bits(vec![false; n])),
        ));
        for b in [0u64, 10, 1000] {
            assert_eq!(powers.member(&s("1"), b), Membership::Unknown);
        }
        assert_eq!(powers.member(&s("000"), 3), Membership::Yes);
        let co = SetSpec::co_enumerated(Enumerator::from_strings(
            "c",
            std::iter::once(s("1")).chain((3u64..).map(LexString::from_index)),
        ));
        assert_eq!(co.member(&s("1"), 5), Membership::No);
        assert_eq!(co.member(&s("0"), 5), Membership::Unknown);
    }

    #[test]
    fn join_hat_examples() {
        let j = join_hat(&table(&[""]), &SetSpec::empty());
        let members: Vec<_> = up_to_len(6).filter(|x| j.member(x, 0) == Membership::Yes).collect();
        assert_eq!(members, vec![s("0")]);

        let a = table(&["", "1", "01", "110", "0000"]);
        let j = join_hat(&a, &a.complement());
        assert_eq!(j.member(&LexString::empty(), 0), Membership::No);
        for x in up_to_len(7) {
            let in0 = j.member(&x.push(false), 0) == Membership::Yes;
            let in1 = j.member(&x.push(true), 0) == Membership::Yes;
            assert!(in0 ^ in1, "{x:?}");
        }
    }

    #[test]
    fn interleave4_examples() {
        let b = interleave4(&SetSpec::empty());
        assert_eq!(b.member(&LexString::empty(), 0), Membership::Yes);
        assert_eq!(b.member(&LexString::from_index(3), 0), Membership::Yes);
        assert_eq!(b.member(&LexString::from_index(1), 0), Membership::No);
        let a = table(&["0", "11", "010"]);
        let b = interleave4(&a);
        for i in 0u64..=200 {
            let second = b.member(&LexString::from_index(4 * i + 1), 0) == Membership::Yes;
            let fourth = b.member(&LexString::from_index(4 * i + 3), 0) == Membership::Yes;
            assert!(second ^ fourth);
            assert_eq!(second, a.member(&LexString::from_index(i), 0) == Membership::Yes);
        }
    }

    #[test]
    fn cylinder_examples() {
        let none = cylinderize(&SetSpec::empty());
        assert!(up_to_len(6).all(|x| none.member(&x, 0) == Membership::No));

        let c = cylinderize(&table(&[""]));
        let members: BTreeSet<_> = (0u64..64)
            .map(LexString::from_index)
            .filter(|x| c.member(x, 0) == Membership::Yes)
            .collect();
        let expected: BTreeSet<_> = (0u64..64)
            .map(|j| pair(&LexString::empty(), &LexString::from_index(j)))
            .filter(|z| z.index_u64().unwrap() < 64)
            .collect();
        assert_eq!(members, expected);
    }

    #[test]
    fn co_k_cylinder_examples() {
        let set = co_k_cylinder_set(0);
        let accepts = index_string("accept r0");
        assert_eq!(set.member(&pair(&accepts, &LexString::empty()), 10), Membership::No);
        // accepts after exactly one step: ⟨x, successor(s_1)⟩
        let one = LexString::from_index(1);
        assert_eq!(set.member(&pair(&accepts, &successor(&one)), 10), Membership::Yes);
        let loops = index_string("decjz r1 0");
        for b in [10u64, 1000, 20_000] {
            assert_eq!(set.member(&pair(&loops, &LexString::empty()), b), Membership::Unknown);
        }
        let rejects = index_string("reject");
        assert_eq!(set.member(&pair(&rejects, &LexString::empty()), 10), Membership::Yes);
    }

    #[test]
    fn co_k_cylinder_has_at_most_one_timed_member_per_index() {
        let set = co_k_cylinder_set(0);
        for i in 0u64..50 {
            let x = LexString::from_index(i);
            let accept_time = match self_acceptance(&x, 10_000) {
                Eval { outcome: Outcome::Halt(_), steps } => Some(steps),
                _ => None,
            };
            let hits: Vec<u64> = (0u64..64)
                .filter(|&t| {
                    let tag = successor(&LexString::from_index(t));
                    set.member(&pair(&x, &tag), 10_000) == Membership::Yes
                })
                .collect();
            assert!(hits.len() <= 1);
            match accept_time {
                Some(t) if t < 64 => assert_eq!(hits, vec![t]),
                _ => assert!(hits.is_empty()),
            }
        }
    }

    #[test]
    fn enumeration_graph_membership() {
        let e = Enumerator::finite("e", vec![s("1"), s("00")]);
        let base = SetSpec::co_enumerated(e.clone());
        let g = SetSpec::enumeration_graph(base, e);
        let eps = LexString::empty();
        assert_eq!(g.member(&pair(&s("0"), &eps), 10), Membership::Yes);
        assert_eq!(g.member(&pair(&s("1"), &eps), 10), Membership::No);
        assert_eq!(g.member(&pair(&s("1"), &LexString::from_index(1)), 10), Membership::Yes);
        assert_eq!(g.member(&pair(&s("00"), &LexString::from_index(2)), 10), Membership::Yes);
        assert_eq!(g.member(&pair(&s("00"), &LexString::from_index(1)), 10), Membership::No);
        assert_eq!(g.member(&pair(&s("0"), &LexString::from_index(3)), 10), Membership::No);
        assert_eq!(g.member(&pair(&s("00"), &LexString::from_index(2)), 1), Membership::Unknown);
    }

    fn arb_table() -> impl Strategy<Value = BTreeSet<LexString>> {
        proptest::collection::btree_set((0u64..512).prop_map(LexString::from_index), 0..40)
    }

    fn arb_budget_pair() -> impl Strategy<Value = (u64, u64)> {
        (0u64..400, 0u64..400).prop_map(|(a, b)| (a.min(b), a.max(b)))
    }

    proptest! {
        #[test]
        fn combinators_match_definitions(items in arb_table()) {
            let a = SetSpec::finite(items.iter().cloned());
            let inside = |x: &LexString| items.contains(x);
            let jh = join_hat(&a, &a.complement());
            let il = interleave4(&a);
            let cy = cylinderize(&a);
            for x in up_to_len(10) {
                let want_jh = match x.last_bit() {
                    None => false,
                    Some(false) => inside(&x.pop()),
                    Some(true) => !inside(&x.pop()),
                };
                prop_assert_eq!(jh.member(&x, 0), Membership::from_bool(want_jh));
                let i = x.index_u64().unwrap();
                let si = LexString::from_index(i / 4);
                let want_il = match i % 4 { 1 => inside(&si), 3 => !inside(&si), _ => true };
                prop_assert_eq!(il.member(&x, 0), Membership::from_bool(want_il));
                prop_assert_eq!(cy.member(&x, 0), Membership::from_bool(inside(&unpair(&x).0)));
            }
        }

        #[test]
        fn membership_is_budget_monotone((lo, hi) in arb_budget_pair(), x in 0u64..300) {
            let x = LexString::from_index(x);
            let sets = [
                SetSpec::halting_approx(0),
                co_k_cylinder_set(0),
                cylinderize(&SetSpec::halting_approx(0)).complement(),
                SetSpec::enumerated(Enumerator::acceptance_of("dom-M7", crate::compute::machine(&Natural::from(7u32)))),
                SetSpec::co_enumerated(Enumerator::filter("odd", |y| y.index_u64().unwrap() % 2 == 1)),
            ];
            for set in &sets {
                let early = set.member(&x, lo);
                if early != Membership::Unknown {
                    prop_assert_eq!(set.member(&x, hi), early);
                }
            }
        }
    }
}
