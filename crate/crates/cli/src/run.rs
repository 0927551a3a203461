use std::collections::BTreeSet;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use rankkit::checkers::{
    check_1tt, check_compression, check_ranking, recheck, recheck_1tt, OneTTReduction, RankOracle,
    TruthTable, Verdict, VerifyReport,
};
use rankkit::compute::{enumerate_machines, BudgetedFn, Eval, Outcome};
use rankkit::constructions::{
    embed_first, graph_to_base, inseparable_separator, interleave4_compressor, join_hat_ranker,
    l_a_construction, mto1_via_cylinder, myhill_isomorphism, re_compressor, recover_via_ranker,
    retrace_to_rank, CylinderWitness, RetraceMode,
};
use rankkit::procedures::{
    audit_diagonal, decide_core_with_subset, decide_re_with_ranker, diagonalize, variant_a_decider,
    Answer,
};
use rankkit::sets::{cylinderize, interleave4, join_hat, parse_set, Enumerator, Membership, Presentation, SetSpec};
use rankkit::strings::{pair, predecessor, unpair, up_to_len, LexString};

use crate::{program_path, Command, FnOnSet, Limits, Procedure, TableArg, Tag};

/// How far to look for a member or non-member when a construction needs one.
const SEARCH_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass = 0,
    Refuted = 1,
    Inconclusive = 2,
    Premise = 3,
}

impl Status {
    fn of(v: Verdict) -> Self {
        match v {
            Verdict::Pass => Status::Pass,
            Verdict::Refuted => Status::Refuted,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }

    /// Refuted outranks inconclusive outranks pass.
    fn combine(self, other: Self) -> Self {
        let weight = |s: Self| match s {
            Status::Pass => 0,
            Status::Inconclusive => 1,
            Status::Refuted => 2,
            Status::Premise => 3,
        };
        if weight(other) > weight(self) { other } else { self }
    }
}

pub struct Output {
    pub json: Value,
    pub status: Status,
    pub summary: String,
}

pub fn execute(command: &Command) -> Result<Output> {
    match command {
        Command::VerifyRank { target } => verify(target, None),
        Command::VerifyCompress { target, cover_count } => verify(target, Some(*cover_count)),
        Command::Verify1tt { fn_ref, table, set, target, limits, recheck } => {
            verify_1tt(fn_ref, *table, set, target, limits, *recheck)
        }
        Command::Construct { tag, set, limits, cover_count, seed, recheck } => {
            construct(*tag, set, limits, *cover_count, *seed, *recheck)
        }
        Command::Decide { procedure, set, x, budget } => decide(*procedure, set, x, *budget),
        Command::Diagonalize { count, budget, horizon } => diagonal(*count as usize, *budget, *horizon),
        Command::Isomorphism { set, count, budget } => isomorphism(set, *count as usize, *budget),
    }
}

fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn parse(text: &str) -> Result<SetSpec> {
    parse_set(text).map_err(|e| anyhow!(e))
}

fn parse_string(text: &str) -> Result<LexString> {
    text.parse().map_err(|_| anyhow!("not a binary string: {text:?}"))
}

fn members(set: &SetSpec, budget: u64) -> Enumerator {
    let name = format!("members of {}", set.describe());
    if let Presentation::Finite(items) = set.presentation() {
        return Enumerator::finite(name, items.iter().cloned().collect());
    }
    let s = set.clone();
    Enumerator::filter(name, move |x| s.member(x, budget) == Membership::Yes)
}

fn non_members(set: &SetSpec, budget: u64) -> Enumerator {
    let name = format!("non-members of {}", set.describe());
    if let Presentation::Complement(inner) = set.presentation() {
        if let Presentation::Finite(items) = inner.presentation() {
            return Enumerator::finite(name, items.iter().cloned().collect());
        }
    }
    let s = set.clone();
    Enumerator::filter(name, move |x| s.member(x, budget) == Membership::No)
}

fn first_with(set: &SetSpec, want: Membership, budget: u64) -> Result<LexString> {
    up_to_len(SEARCH_LEN)
        .find(|x| set.member(x, budget) == want)
        .ok_or_else(|| {
            let what = if want == Membership::Yes { "member" } else { "non-member" };
            anyhow!("premise: no {what} of {} up to length {SEARCH_LEN}", set.describe())
        })
}

fn resolve_fn(fn_ref: &str, set: &SetSpec, budget: u64) -> Result<BudgetedFn> {
    Ok(match fn_ref {
        "identity" => BudgetedFn::identity(),
        "constant-eps" => BudgetedFn::constant(LexString::empty()),
        "thm103" => join_hat_ranker(),
        "thm123" => interleave4_compressor(),
        "prop106" => re_compressor(members(set, budget)),
        "brute-rank" => RankOracle::new(set.clone(), budget).ranker(),
        other => {
            let Some(path) = program_path(other) else {
                bail!(
                    "unknown function {other:?}: expected identity, constant-eps, thm103, thm123, \
                     prop106, brute-rank, or a program file"
                );
            };
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let program = text.parse().map_err(|e| anyhow!("{}: {e}", path.display()))?;
            BudgetedFn::machine_named(other.to_string(), program)
        }
    })
}

fn summarize(label: &str, r: &VerifyReport) -> String {
    let mut s = format!("{label}: {:?} after {} strings", r.verdict, r.examined);
    if r.unresolved > 0 {
        s += &format!(", {} unresolved", r.unresolved);
    }
    if let Some(w) = &r.witness {
        s += &format!(", witness {}", serde_json::to_string(w).expect("witness serializes"));
    }
    s
}

fn verify(target: &FnOnSet, cover_count: Option<u64>) -> Result<Output> {
    let set = parse(&target.set)?;
    let Limits { budget, max_len } = target.limits;
    let f = resolve_fn(&target.fn_ref, &set, budget)?;
    let (command, report) = match cover_count {
        None => ("verify-rank", check_ranking(&f, &set, max_len as usize, budget)),
        Some(c) => ("verify-compress", check_compression(&f, &set, max_len as usize, c, budget)),
    };
    let rechecked = match (&report.witness, target.recheck) {
        (Some(w), true) => Some(recheck(w, &f, &set, budget)),
        _ => None,
    };
    let mut summary = summarize(command, &report);
    if let Some(ok) = rechecked {
        summary += if ok { "; recheck confirms" } else { "; recheck does NOT confirm" };
    }
    Ok(Output {
        status: Status::of(report.verdict),
        json: json!({
            "command": command,
            "fn": f.name(),
            "set": set.describe(),
            "max_len": max_len,
            "budget": budget,
            "report": report,
            "recheck": rechecked,
        }),
        summary,
    })
}

fn truth_table(t: TableArg) -> TruthTable {
    match t {
        TableArg::Identity => TruthTable::Identity,
        TableArg::Negation => TruthTable::Negation,
        TableArg::ConstantTrue => TruthTable::ConstantTrue,
        TableArg::ConstantFalse => TruthTable::ConstantFalse,
    }
}

fn verify_1tt(fn_ref: &str, table: TableArg, from: &str, to: &str, limits: &Limits, want_recheck: bool) -> Result<Output> {
    let (a, b) = (parse(from)?, parse(to)?);
    let Limits { budget, max_len } = *limits;
    let r = OneTTReduction::uniform(resolve_fn(fn_ref, &a, budget)?, truth_table(table));
    let report = check_1tt(&r, &a, &b, max_len as usize, budget);
    let rechecked = match (&report.witness, want_recheck) {
        (Some(w), true) => Some(recheck_1tt(w, &r, &a, &b, budget)),
        _ => None,
    };
    Ok(Output {
        status: Status::of(report.verdict),
        summary: summarize("verify-1tt", &report),
        json: json!({
            "command": "verify-1tt",
            "fn": r.query.name(),
            "table": format!("{:?}", truth_table(table)),
            "from": a.describe(),
            "to": b.describe(),
            "max_len": max_len,
            "budget": budget,
            "report": report,
            "recheck": rechecked,
        }),
    })
}

/// Labelled results of a construction's checks.
#[derive(Default)]
struct Checks {
    entries: Vec<Value>,
    status: Option<Status>,
    lines: Vec<String>,
}

impl Checks {
    fn report(&mut self, label: &str, report: VerifyReport, rechecked: Option<bool>) {
        self.lines.push(summarize(label, &report));
        self.note(Status::of(report.verdict));
        self.entries.push(json!({ "label": label, "report": report, "recheck": rechecked }));
    }

    /// A pointwise agreement check against the set's own membership.
    fn agreement(&mut self, label: &str, checked: usize, mismatches: Vec<LexString>, unresolved: usize) {
        let status = if !mismatches.is_empty() {
            Status::Refuted
        } else if unresolved > 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        self.lines.push(format!("{label}: {status:?} on {checked} strings"));
        self.note(status);
        self.entries.push(json!({
            "label": label,
            "checked": checked,
            "mismatches": mismatches,
            "unresolved": unresolved,
        }));
    }

    fn note(&mut self, s: Status) {
        self.status = Some(self.status.map_or(s, |t| t.combine(s)));
    }
}

fn default_cover(max_len: u64, cover_count: u64, factor: u64, divisor: u64) -> u64 {
    if cover_count > 0 {
        return cover_count;
    }
    let prefix = (1u64 << (max_len + 1)) - 1;
    factor * (prefix / divisor)
}

fn construct(tag: Tag, set_text: &str, limits: &Limits, cover_count: u64, seed: u64, want_recheck: bool) -> Result<Output> {
    let s = parse(set_text)?;
    let Limits { budget, max_len } = *limits;
    let n = max_len as usize;
    let mut checks = Checks::default();
    let rc = |r: &VerifyReport, f: &BudgetedFn, set: &SetSpec| {
        r.witness.as_ref().filter(|_| want_recheck).map(|w| recheck(w, f, set, budget))
    };
    let rc_1tt = |r: &VerifyReport, red: &OneTTReduction, a: &SetSpec, b: &SetSpec| {
        r.witness.as_ref().filter(|_| want_recheck).map(|w| recheck_1tt(w, red, a, b, budget))
    };
    let subject;
    match tag {
        Tag::Thm103 => {
            let a = join_hat(&s, &s.complement());
            let f = join_hat_ranker();
            let r = check_ranking(&f, &a, n, budget);
            let ok = rc(&r, &f, &a);
            checks.report("ranking", r, ok);
            subject = a;
        }
        Tag::Thm123 => {
            let b = interleave4(&s);
            let f = interleave4_compressor();
            let r = check_compression(&f, &b, n, default_cover(max_len, cover_count, 3, 4), budget);
            let ok = rc(&r, &f, &b);
            checks.report("compression", r, ok);

            let index = |x: &LexString| x.index_u64().expect("index fits");
            let to_b = OneTTReduction::uniform(
                BudgetedFn::total("s_i->s_4i+1", 1, move |x| LexString::from_index(4 * index(x) + 1)),
                TruthTable::Identity,
            );
            let to_a = OneTTReduction::per_input(
                BudgetedFn::total("s_j->s_j/4", 1, move |x| LexString::from_index(index(x) / 4)),
                move |x| match index(x) % 4 {
                    1 => TruthTable::Identity,
                    3 => TruthTable::Negation,
                    _ => TruthTable::ConstantTrue,
                },
            );
            let r = check_1tt(&to_b, &s, &b, n.saturating_sub(2), budget);
            let ok = rc_1tt(&r, &to_b, &s, &b);
            checks.report("A->B", r, ok);
            let r = check_1tt(&to_a, &b, &s, n, budget);
            let ok = rc_1tt(&r, &to_a, &b, &s);
            checks.report("B->A", r, ok);

            let decide = recover_via_ranker(RankOracle::new(b.clone(), budget).ranker());
            let (mut checked, mut mismatches, mut unresolved) = (0, Vec::new(), 0);
            for x in up_to_len(n.saturating_sub(2)) {
                checked += 1;
                let got = decide.run(&x, budget);
                match (got, s.member(&x, budget).known()) {
                    (Outcome::Pending(_), _) | (_, None) => unresolved += 1,
                    (o, Some(m)) if matches!(o, Outcome::Halt(_)) != m => mismatches.push(x),
                    _ => {}
                }
            }
            checks.agreement("recovery", checked, mismatches, unresolved);
            subject = b;
        }
        Tag::Prop106 => {
            let f = re_compressor(members(&s, budget));
            let r = check_compression(&f, &s, n, cover_count, budget);
            let ok = rc(&r, &f, &s);
            checks.report("compression", r, ok);
            subject = s.clone();
        }
        Tag::Beta1 => {
            let x0 = first_with(&s, Membership::Yes, budget)?;
            let x1 = first_with(&s, Membership::No, budget)?;
            let bundle = l_a_construction(&s, &non_members(&s, budget), &x0, &x1, budget)?;
            let (l_a, f) = (bundle.set.clone().expect("bundle has a set"), bundle.function.clone().expect("bundle has a map"));
            for (label, r) in bundle.verify(n, cover_count, budget) {
                let ok = match bundle.reductions.iter().find(|nr| nr.name == label) {
                    Some(nr) => rc_1tt(&r, &nr.reduction, &nr.from, &nr.to),
                    None => rc(&r, &f, &l_a),
                };
                checks.report(&label, r, ok);
            }
            subject = l_a;
        }
        Tag::Retrace => {
            let a0 = first_with(&s, Membership::Yes, budget)?;
            let f = retrace_to_rank(previous_member(&s, a0.clone()), a0, RetraceMode::Total);
            let r = check_ranking(&f, &s, n, budget);
            let ok = rc(&r, &f, &s);
            checks.report("ranking", r, ok);
            subject = s.clone();
        }
        Tag::Separator => {
            subject = toy_separator(&mut checks, seed, n.min(8), budget);
        }
    }
    let status = checks.status.unwrap_or(Status::Pass);
    Ok(Output {
        status,
        summary: format!("construct {}: {}", value_name(tag), checks.lines.join("; ")),
        json: json!({
            "command": "construct",
            "tag": value_name(tag),
            "set": subject.describe(),
            "max_len": max_len,
            "budget": budget,
            "seed": seed,
            "checks": checks.entries,
        }),
    })
}

/// Maps a member above `a0` to the next smaller member; everything else
/// to itself.
fn previous_member(s: &SetSpec, a0: LexString) -> BudgetedFn {
    let s = s.clone();
    BudgetedFn::native("previous-member", move |y, budget| {
        if *y <= a0 || s.member(y, budget) != Membership::Yes {
            return Eval::halt(y.clone(), 1);
        }
        let mut z = y.clone();
        let mut spent = 1;
        while let Some(p) = predecessor(&z) {
            spent += 1;
            if spent > budget {
                return Eval::pending(budget);
            }
            match s.member(&p, budget) {
                Membership::Yes => return Eval::halt(p, spent),
                Membership::Unknown => return Eval::pending(budget),
                Membership::No => z = p,
            }
        }
        Eval::halt(y.clone(), spent)
    })
}

/// Random disjoint A, B with a per-input 1-tt reduction `x ↦ 1x`; checks
/// that the separator built from it outputs 1 on A and 0 on B.
fn toy_separator(checks: &mut Checks, seed: u64, max_len: usize, budget: u64) -> SetSpec {
    let mut rng = StdRng::seed_from_u64(seed);
    let tag = |x: &LexString| LexString::from_bits([&[true][..], x.bits()].concat());
    let (mut side_a, mut side_b, mut target) = (BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
    let (mut l_a, mut l_b) = (BTreeSet::new(), BTreeSet::new());
    let mut tables = std::collections::BTreeMap::new();
    for x in up_to_len(max_len) {
        let side = rng.gen_range(0..3);
        let table = match side {
            0 if rng.gen_bool(0.1) => TruthTable::ConstantTrue,
            1 if rng.gen_bool(0.1) => TruthTable::ConstantFalse,
            _ if rng.gen_bool(0.5) => TruthTable::Identity,
            _ => TruthTable::Negation,
        };
        if table.queries() && ((side == 0) == (table == TruthTable::Identity)) {
            target.insert(tag(&x));
        }
        match (side, table) {
            (0, TruthTable::Identity) => {
                l_a.insert(tag(&x));
            }
            (1, TruthTable::Negation) => {
                l_b.insert(tag(&x));
            }
            _ => {}
        }
        match side {
            0 => side_a.insert(x.clone()),
            1 => side_b.insert(x.clone()),
            _ => false,
        };
        tables.insert(x, table);
    }
    let r = OneTTReduction::per_input(BudgetedFn::total("1x", 1, tag), move |x| {
        tables.get(x).copied().unwrap_or(TruthTable::Identity)
    });
    let a = SetSpec::finite(side_a.iter().cloned());
    let b = SetSpec::finite(target);
    checks.report("reduction", check_1tt(&r, &a, &b, max_len, budget), None);
    let g = inseparable_separator(r, SetSpec::finite(l_a), SetSpec::finite(l_b));
    let one: LexString = "1".parse().expect("literal");
    let zero: LexString = "0".parse().expect("literal");
    let mut mismatches = Vec::new();
    for (side, want) in [(&side_a, &one), (&side_b, &zero)] {
        for x in side {
            if g.run(x, budget) != Outcome::Halt(want.clone()) {
                mismatches.push(x.clone());
            }
        }
    }
    checks.agreement("separator", side_a.len() + side_b.len(), mismatches, 0);
    a
}

fn decide(procedure: Procedure, set_text: &str, x_text: &str, budget: u64) -> Result<Output> {
    let s = parse(set_text)?;
    let x = parse_string(x_text)?;
    let oracle = RankOracle::new(s.clone(), budget);
    let result = match procedure {
        Procedure::Thm25 => decide_re_with_ranker(&members(&s, budget), &oracle.ranker(), &x, budget),
        Procedure::Thm167 => {
            decide_core_with_subset(&non_members(&s, budget), &members(&s, budget), &oracle.ranker(), &x, budget)
        }
        Procedure::VariantA => variant_a_decider(&oracle.variant_a_ranker(), &x, budget),
    };
    let name = value_name(procedure);
    let base = json!({ "command": "decide", "proc": name, "set": s.describe(), "x": x, "budget": budget });
    Ok(match result {
        Ok(d) => {
            let status = match d.answer {
                Answer::Accept => Status::Pass,
                Answer::Reject => Status::Refuted,
                Answer::Inconclusive => Status::Inconclusive,
            };
            let summary = format!("decide {name}: {:?} {x} by clause {}", d.answer, d.clause);
            Output { status, summary, json: merge(base, json!({ "decision": d })) }
        }
        Err(v) => Output {
            status: Status::Premise,
            summary: format!("decide {name}: {v}"),
            json: merge(base, json!({ "premise_violation": v })),
        },
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn diagonal(count: usize, budget: u64, horizon: u64) -> Result<Output> {
    let machines = enumerate_machines(count);
    let state = diagonalize(&machines, budget, horizon);
    let invariants = state.check_invariants();
    let audit = audit_diagonal(&state, &machines, budget);
    let mut status = Status::of(audit.verdict);
    if invariants.is_err() {
        status = Status::Refuted;
    }
    Ok(Output {
        status,
        summary: format!(
            "diagonalize: {}/{count} stages certified, {} members; {}",
            state.certified(),
            state.members.len(),
            summarize("audit", &audit)
        ),
        json: json!({
            "command": "diagonalize",
            "certified": state.certified(),
            "invariants": invariants.err(),
            "audit": audit,
            "state": state,
        }),
    })
}

fn isomorphism(set_text: &str, count: usize, budget: u64) -> Result<Output> {
    let s = parse(set_text)?;
    let x0 = first_with(&s, Membership::Yes, budget)?;
    let x1 = first_with(&s, Membership::No, budget)?;
    let cyl = cylinderize(&s);
    let base = s.clone();
    let holes = Enumerator::filter(format!("non-members of {}", cyl.describe()), move |z| {
        base.member(&unpair(z).0, budget) == Membership::No
    });
    let eps = LexString::empty();
    let (y0, y1) = (pair(&x0, &eps), pair(&x1, &eps));
    let l_a = l_a_construction(&cyl, &holes, &y0, &y1, budget)?.set.expect("bundle has a set");
    let back = mto1_via_cylinder(graph_to_base(holes, y0, y1), CylinderWitness::identity(), count, budget)?;
    let h = myhill_isomorphism(&embed_first(), &back, count, budget)?;
    let (bad, resolved) = h.membership_violations(&cyl, &l_a, budget);
    let ok = h.is_bijective() && bad.is_empty();
    Ok(Output {
        status: if ok { Status::Pass } else { Status::Refuted },
        summary: format!(
            "isomorphism: {} pairs, bijective {}, {} violations among {resolved} resolved",
            h.pairs.len(),
            h.is_bijective(),
            bad.len()
        ),
        json: json!({
            "command": "isomorphism",
            "from": cyl.describe(),
            "to": l_a.describe(),
            "count": count,
            "budget": budget,
            "bijective": h.is_bijective(),
            "violations": bad,
            "resolved": resolved,
            "pairs": h.pairs,
        }),
    })
}
