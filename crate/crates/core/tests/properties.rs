//! Cross-module properties on random finite and cofinite tables.

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;

use rankkit::checkers::{check_compression, check_ranking, rank_string, recheck, table_fn, RankOracle, Verdict};
use rankkit::compute::Timed;
use rankkit::constructions::{embed_first, graph_to_base, l_a_construction, mto1_via_cylinder, myhill_isomorphism, CylinderWitness};
use rankkit::procedures::{decide_core_with_subset, decide_re_with_ranker, totalize_ranker, variant_a_decider, Answer, TOTALIZE_FALLBACK};
use rankkit::sets::{cylinderize, Enumerator, Membership, SetSpec};
use rankkit::strings::{pair, up_to_len, LexString, Shortlex};

fn universe(max_len: usize) -> Vec<LexString> {
    up_to_len(max_len).collect()
}

/// A subset of the strings up to `max_len`, as a bitmask over shortlex order.
fn arb_table(max_len: usize) -> impl Strategy<Value = BTreeSet<LexString>> {
    let n = universe(max_len).len();
    proptest::collection::vec(any::<bool>(), n)
        .prop_map(move |bits| universe(max_len).into_iter().zip(bits).filter(|(_, b)| *b).map(|(x, _)| x).collect())
}

/// Outputs per string: a small index, a diverging marker, or a reject marker.
fn arb_outputs(max_len: usize) -> impl Strategy<Value = HashMap<LexString, Timed>> {
    let n = universe(max_len).len();
    proptest::collection::vec(prop_oneof![8 => (0u64..12).prop_map(Some), 1 => Just(None)], n).prop_map(move |outs| {
        universe(max_len)
            .into_iter()
            .zip(outs)
            .map(|(x, o)| {
                let t = match o {
                    Some(11) => Timed::Reject(1),
                    Some(i) => Timed::Halt(LexString::from_index(i), 1),
                    None => Timed::Diverge,
                };
                (x, t)
            })
            .collect()
    })
}

fn truth(set: &BTreeSet<LexString>, x: &LexString) -> Answer {
    if set.contains(x) { Answer::Accept } else { Answer::Reject }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn refutations_recheck(members in arb_table(5), outs in arb_outputs(5)) {
        let set = SetSpec::finite(members);
        let f = table_fn("random", outs);
        for report in [check_ranking(&f, &set, 5, 10), check_compression(&f, &set, 5, 0, 10)] {
            if let Some(w) = &report.witness {
                prop_assert_eq!(report.verdict, Verdict::Refuted);
                prop_assert!(recheck(w, &f, &set, 10));
            }
        }
    }

    #[test]
    fn exact_rankers_compress(members in arb_table(6)) {
        let mut table = HashMap::new();
        for (i, x) in members.iter().enumerate() {
            table.insert(x.clone(), Timed::Halt(rank_string(i as u64 + 1), 1));
        }
        let set = SetSpec::finite(members);
        let f = table_fn("exact", table);
        prop_assert!(check_ranking(&f, &set, 6, 10).passed());
        prop_assert!(check_compression(&f, &set, 6, 0, 10).passed());
    }

    #[test]
    fn deciders_match_finite_tables(members in arb_table(4)) {
        let set = SetSpec::finite(members.iter().cloned());
        let e = Enumerator::finite("members", members.iter().cloned().collect());
        let oracle = RankOracle::new(set.clone(), 1);
        let ranker = oracle.ranker();
        let variant = oracle.variant_a_ranker();
        for x in up_to_len(4) {
            let want = truth(&members, &x);
            prop_assert_eq!(decide_re_with_ranker(&e, &ranker, &x, 100_000).unwrap().answer, want);
            prop_assert_eq!(variant_a_decider(&variant, &x, 100_000).unwrap().answer, want);
        }
    }

    #[test]
    fn core_decider_and_totalizer_match_cofinite_tables(holes in arb_table(4)) {
        let listed: Vec<LexString> = holes.iter().cloned().collect();
        let e = Enumerator::finite("holes", listed.clone());
        let set = SetSpec::co_enumerated(e.clone());
        let h = holes.clone();
        let f = Enumerator::filter("members", move |x| !h.contains(x));
        let oracle = RankOracle::new(set.clone(), 100);
        let g = oracle.ranker();
        let t = totalize_ranker(oracle.partial_ranker(), e.clone(), TOTALIZE_FALLBACK.parse().unwrap());
        for x in up_to_len(5) {
            let want = if holes.contains(&x) { Answer::Reject } else { Answer::Accept };
            prop_assert_eq!(decide_core_with_subset(&e, &f, &g, &x, 100_000).unwrap().answer, want);
            prop_assert!(!t.run(&x, 10_000).is_pending());
        }
        prop_assert!(check_ranking(&t, &set, 5, 10_000).passed());
    }

    #[test]
    fn myhill_preserves_cylinder_membership(holes in arb_table(3).prop_filter("needs a hole and a member", |h| !h.is_empty() && h.len() < 15)) {
        let base = SetSpec::finite(holes.iter().cloned()).complement();
        let cyl = cylinderize(&base);
        let b = base.clone();
        let e = Enumerator::filter("cylinder holes", move |z| {
            b.member(&rankkit::strings::unpair(z).0, 0) == Membership::No
        });
        let x0 = Shortlex::new().find(|x| !holes.contains(x)).unwrap();
        let x1 = holes.iter().next().unwrap().clone();
        let eps = LexString::empty();
        let (y0, y1) = (pair(&x0, &eps), pair(&x1, &eps));
        let l_a = l_a_construction(&cyl, &e, &y0, &y1, 100_000).unwrap().set.unwrap();
        let back = mto1_via_cylinder(graph_to_base(e, y0, y1), CylinderWitness::identity(), 40, 100_000).unwrap();
        let h = myhill_isomorphism(&embed_first(), &back, 40, 100_000).unwrap();
        prop_assert!(h.is_bijective());
        let (bad, _) = h.membership_violations(&cyl, &l_a, 100_000);
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }
}
