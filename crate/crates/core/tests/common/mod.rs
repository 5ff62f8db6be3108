//! Strategies and membership-oracle checks shared by the property suites
//! and the acceptance run.

#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use mereology::formula::{parse, Formula, Term, TheoryMode};
use mereology::models::EPSet;
use mereology::sizesets::{ss_combine, ss_contains, ss_sumset, BoolOp, Card, SizeSet};

pub type Check = Result<(), TestCaseError>;

/// Finite sizes up to this bound are checked against the oracle.
pub const LIMIT: u32 = 64;

pub fn size_set() -> impl Strategy<Value = SizeSet> {
    (any::<bool>(), prop::collection::vec(0u32..=LIMIT + 4, 0..8)).prop_map(|(cofinite, v)| {
        if cofinite {
            SizeSet::cofin(v)
        } else {
            SizeSet::fin(v)
        }
    })
}

/// Members among `0..=LIMIT` and `∞`, read off the raw representation.
fn members(s: &SizeSet) -> (BTreeSet<u32>, bool) {
    match s {
        SizeSet::Fin(v) => (v.iter().copied().filter(|&n| n <= LIMIT).collect(), false),
        SizeSet::CoFin(v) => ((0..=LIMIT).filter(|n| !v.contains(n)).collect(), true),
    }
}

fn has(s: &SizeSet, n: u32) -> bool {
    ss_contains(s, Card::Fin(n as u64))
}

fn check_members(s: &SizeSet, expected: &(BTreeSet<u32>, bool)) -> Check {
    let got: BTreeSet<u32> = (0..=LIMIT).filter(|&n| has(s, n)).collect();
    prop_assert_eq!(&got, &expected.0, "{:?}", s);
    prop_assert_eq!(ss_contains(s, Card::Inf), expected.1, "{:?}", s);
    Ok(())
}

fn brute_sum(a: &SizeSet, b: &SizeSet) -> (BTreeSet<u32>, bool) {
    let (ma, ia) = members(a);
    let (mb, ib) = members(b);
    let fin = (0..=LIMIT)
        .filter(|&v| (0..=v).any(|i| ma.contains(&i) && mb.contains(&(v - i))))
        .collect();
    let a_nonempty = ia || !matches!(a, SizeSet::Fin(v) if v.is_empty());
    let b_nonempty = ib || !matches!(b, SizeSet::Fin(v) if v.is_empty());
    (fin, (ia && b_nonempty) || (ib && a_nonempty))
}

fn same_up_to_limit(a: &SizeSet, b: &SizeSet) -> bool {
    (0..=LIMIT).all(|n| has(a, n) == has(b, n)) && ss_contains(a, Card::Inf) == ss_contains(b, Card::Inf)
}

pub fn check_size_set_ops(a: &SizeSet, b: &SizeSet) -> Check {
    let (ma, ia) = members(a);
    let (mb, ib) = members(b);
    check_members(
        &ss_combine(BoolOp::And, a, Some(b)),
        &(ma.intersection(&mb).copied().collect(), ia && ib),
    )?;
    check_members(&ss_combine(BoolOp::Or, a, Some(b)), &(ma.union(&mb).copied().collect(), ia || ib))?;
    check_members(
        &ss_combine(BoolOp::Not, a, None),
        &((0..=LIMIT).filter(|n| !ma.contains(n)).collect(), !ia),
    )?;
    let below = (0..=LIMIT + 8).all(|n| !has(a, n) || has(b, n));
    prop_assert_eq!(a.is_subset(b), below && (!ia || ib));
    Ok(())
}

pub fn check_de_morgan(a: &SizeSet, b: &SizeSet) -> Check {
    let not = |s: &SizeSet| ss_combine(BoolOp::Not, s, None);
    let lhs = not(&ss_combine(BoolOp::And, a, Some(b)));
    let rhs = ss_combine(BoolOp::Or, &not(a), Some(&not(b)));
    prop_assert!(same_up_to_limit(&lhs, &rhs));
    prop_assert_eq!(&lhs, &rhs);
    let lhs = not(&ss_combine(BoolOp::Or, a, Some(b)));
    let rhs = ss_combine(BoolOp::And, &not(a), Some(&not(b)));
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn check_sumset(a: &SizeSet, b: &SizeSet) -> Check {
    check_members(&ss_sumset(a, b), &brute_sum(a, b))
}

pub fn check_sumset_laws(a: &SizeSet, b: &SizeSet, c: &SizeSet) -> Check {
    prop_assert!(same_up_to_limit(&ss_sumset(a, b), &ss_sumset(b, a)));
    prop_assert!(same_up_to_limit(
        &ss_sumset(&ss_sumset(a, b), c),
        &ss_sumset(a, &ss_sumset(b, c)),
    ));
    prop_assert!(same_up_to_limit(&ss_sumset(a, &SizeSet::exactly(0)), a));
    Ok(())
}

/// All size-set laws on one random triple.
pub fn check_size_sets(a: &SizeSet, b: &SizeSet, c: &SizeSet) -> Check {
    check_size_set_ops(a, b)?;
    check_de_morgan(a, b)?;
    check_sumset(a, b)?;
    check_sumset_laws(a, b, c)
}

pub const VARS: [&str; 4] = ["x", "y", "z", "a"];

pub fn term(universe: bool) -> impl Strategy<Value = Term> {
    let mut leaves = vec![
        Just(Term::Empty).boxed(),
        prop::sample::select(&VARS[..]).prop_map(Term::var).boxed(),
    ];
    if universe {
        leaves.push(Just(Term::Universe).boxed());
    }
    prop::strategy::Union::new(leaves).prop_recursive(3, 12, 2, |inner| {
        (inner.clone(), inner, 0..3u8).prop_map(|(a, b, op)| match op {
            0 => Term::union(a, b),
            1 => Term::inter(a, b),
            _ => Term::diff(a, b),
        })
    })
}

pub fn atomic(universe: bool) -> impl Strategy<Value = Formula> {
    prop_oneof![
        (term(universe), term(universe)).prop_map(|(a, b)| Formula::Subseteq(a, b)),
        (term(universe), term(universe)).prop_map(|(a, b)| Formula::Equal(a, b)),
        (term(universe), 0u32..6).prop_map(|(t, n)| Formula::CardEq(t, n)),
    ]
}

pub fn formula(universe: bool) -> impl Strategy<Value = Formula> {
    atomic(universe).prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            (prop::sample::select(&VARS[..]), inner.clone()).prop_map(|(x, b)| Formula::exists(x, b)),
            (prop::sample::select(&VARS[..]), inner).prop_map(|(x, b)| Formula::forall(x, b)),
        ]
    })
}

/// `parse(render(f)) = f`, in class mode when `f` mentions the universe and
/// in both modes otherwise.
pub fn check_round_trip(f: &Formula) -> Check {
    let text = f.to_string();
    prop_assert_eq!(&parse(&text, TheoryMode::ClassMereology).unwrap(), f, "{}", text);
    if !f.mentions_universe() {
        prop_assert_eq!(&parse(&text, TheoryMode::SetMereology).unwrap(), f, "{}", text);
    }
    Ok(())
}

pub fn epset() -> impl Strategy<Value = EPSet> {
    (0u64..24, 1u64..7)
        .prop_flat_map(|(t, p)| {
            (
                prop::collection::vec(0..t.max(1), 0..6),
                Just(t),
                Just(p),
                prop::collection::vec(0..p, 0..p as usize + 1),
            )
        })
        .prop_map(|(prefix, t, p, r)| {
            let prefix: Vec<u64> = prefix.into_iter().filter(|&n| n < t).collect();
            EPSet::from_parts(&prefix, t, p, &r).unwrap()
        })
}

/// Positions checked pointwise.
pub const WIDTH: u64 = 200;

pub fn check_epset_ops(a: &EPSet, b: &EPSet) -> Check {
    let pa: Vec<bool> = (0..WIDTH).map(|n| a.contains(n)).collect();
    let pb: Vec<bool> = (0..WIDTH).map(|n| b.contains(n)).collect();
    let agrees = |s: &EPSet, f: &dyn Fn(bool, bool) -> bool| (0..WIDTH as usize).all(|n| s.contains(n as u64) == f(pa[n], pb[n]));
    prop_assert!(agrees(&a.union(b), &|x, y| x || y));
    prop_assert!(agrees(&a.intersection(b), &|x, y| x && y));
    prop_assert!(agrees(&a.difference(b), &|x, y| x && !y));
    prop_assert!(agrees(&a.complement(), &|x, _| !x));
    prop_assert_eq!(a.is_subset(b), (0..WIDTH as usize).all(|n| !pa[n] || pb[n]));
    prop_assert_eq!(a.is_disjoint(b), (0..WIDTH as usize).all(|n| !(pa[n] && pb[n])));
    prop_assert_eq!(a.is_finite(), !pa[WIDTH as usize - 12..].iter().any(|&x| x));
    if a.is_finite() {
        prop_assert_eq!(a.size(), Card::Fin(pa.iter().filter(|&&x| x).count() as u64));
    }
    prop_assert_eq!(&EPSet::from_raw(&a.to_raw()).unwrap(), a);
    Ok(())
}
