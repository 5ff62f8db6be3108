//! Randomized checks of the algebraic laws, against brute-force membership
//! oracles.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use common::*;
use mereology::cells::{atomic_to_profiles, term_cells};
use mereology::formula::{parse, Formula, Term, TheoryMode};
use mereology::models::{LatticeOp, ModelElement, ModelHandle, Presentation, Realization};
use mereology::sizesets::Card;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn size_set_boolean_ops_match_membership(a in size_set(), b in size_set()) {
        check_size_set_ops(&a, &b)?;
    }

    #[test]
    fn size_set_de_morgan(a in size_set(), b in size_set()) {
        check_de_morgan(&a, &b)?;
    }

    #[test]
    fn sumset_matches_membership(a in size_set(), b in size_set()) {
        check_sumset(&a, &b)?;
    }

    #[test]
    fn sumset_laws(a in size_set(), b in size_set(), c in size_set()) {
        check_sumset_laws(&a, &b, &c)?;
    }

    #[test]
    fn parse_inverts_render(f in formula(true)) {
        check_round_trip(&f)?;
    }

    #[test]
    fn parse_inverts_render_in_set_mode(f in formula(false)) {
        check_round_trip(&f)?;
    }

    #[test]
    fn parser_is_total(text in "[ -~]{0,40}") {
        let _ = parse(&text, TheoryMode::ClassMereology);
    }

    #[test]
    fn parser_is_total_on_formula_like_text(text in "[xyzAE|&~=<.()0-9 /\\\\-]{0,40}") {
        if let Err(e) = parse(&text, TheoryMode::SetMereology) {
            prop_assert!(!e.to_string().is_empty());
        }
    }

    #[test]
    fn free_variables_ignore_bound_names(f in formula(true)) {
        let renamed = rename_bound(&f, &mut 0);
        prop_assert_eq!(renamed.free_variables(), f.free_variables());
    }

    #[test]
    fn epset_ops_match_membership(a in epset(), b in epset()) {
        check_epset_ops(&a, &b)?;
    }
}

fn rename_term(t: &Term, from: &str, to: &str) -> Term {
    match t {
        Term::Var(v) if v == from => Term::var(to),
        Term::Union(a, b) => Term::union(rename_term(a, from, to), rename_term(b, from, to)),
        Term::Intersection(a, b) => Term::inter(rename_term(a, from, to), rename_term(b, from, to)),
        Term::Difference(a, b) => Term::diff(rename_term(a, from, to), rename_term(b, from, to)),
        other => other.clone(),
    }
}

/// Replaces free occurrences of `from` by `to`.
fn rename_free(f: &Formula, from: &str, to: &str) -> Formula {
    let r = |g: &Formula| rename_free(g, from, to);
    match f {
        Formula::Subseteq(a, b) => Formula::Subseteq(rename_term(a, from, to), rename_term(b, from, to)),
        Formula::Equal(a, b) => Formula::Equal(rename_term(a, from, to), rename_term(b, from, to)),
        Formula::CardEq(t, n) => Formula::CardEq(rename_term(t, from, to), *n),
        Formula::Not(a) => Formula::not(r(a)),
        Formula::And(a, b) => Formula::and(r(a), r(b)),
        Formula::Or(a, b) => Formula::or(r(a), r(b)),
        Formula::Implies(a, b) => Formula::implies(r(a), r(b)),
        Formula::Iff(a, b) => Formula::iff(r(a), r(b)),
        Formula::Exists(x, _) | Formula::Forall(x, _) if x == from => f.clone(),
        Formula::Exists(x, b) => Formula::exists(x, r(b)),
        Formula::Forall(x, b) => Formula::forall(x, r(b)),
    }
}

/// Gives every bound variable a fresh name.
fn rename_bound(f: &Formula, counter: &mut usize) -> Formula {
    let mut go = |g: &Formula| rename_bound(g, counter);
    match f {
        Formula::Not(a) => Formula::not(go(a)),
        Formula::And(a, b) => {
            let a = go(a);
            Formula::and(a, go(b))
        }
        Formula::Or(a, b) => {
            let a = go(a);
            Formula::or(a, go(b))
        }
        Formula::Implies(a, b) => {
            let a = go(a);
            Formula::implies(a, go(b))
        }
        Formula::Iff(a, b) => {
            let a = go(a);
            Formula::iff(a, go(b))
        }
        Formula::Exists(x, b) | Formula::Forall(x, b) => {
            *counter += 1;
            let fresh = format!("w{counter}");
            let body = rename_bound(&rename_free(b, x, &fresh), counter);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(&fresh, body)
            } else {
                Formula::forall(&fresh, body)
            }
        }
        atomic => atomic.clone(),
    }
}

fn column_element() -> impl Strategy<Value = ModelElement> {
    prop::collection::btree_map(0u32..3, epset(), 0..3)
        .prop_map(|cols| ModelElement::from_parts(Presentation::Columns, cols).unwrap())
}

fn ba_element() -> impl Strategy<Value = ModelElement> {
    epset().prop_map(|s| ModelElement::from_parts(Presentation::SaturatedBA, [(0, s)]).unwrap())
}

fn atoms(e: &ModelElement) -> BTreeSet<(u32, u64)> {
    (0..3u32).flat_map(|k| (0..WIDTH).map(move |n| (k, n))).filter(|&a| e.contains_atom(a)).collect()
}

fn representation_sound(m: &ModelHandle, a: &ModelElement, b: &ModelElement) -> Result<(), TestCaseError> {
    let (sa, sb) = (atoms(a), atoms(b));
    let op = |o| atoms(&m.lattice_op(o, a, b).unwrap());
    prop_assert_eq!(op(LatticeOp::Union), sa.union(&sb).copied().collect::<BTreeSet<_>>());
    prop_assert_eq!(op(LatticeOp::Intersection), sa.intersection(&sb).copied().collect::<BTreeSet<_>>());
    prop_assert_eq!(op(LatticeOp::Difference), sa.difference(&sb).copied().collect::<BTreeSet<_>>());
    prop_assert_eq!(m.leq(a, b).unwrap(), sa.is_subset(&sb));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn column_lattice_matches_membership(a in column_element(), b in column_element()) {
        representation_sound(&ModelHandle::COLUMNS, &a, &b)?;
    }

    #[test]
    fn saturated_algebra_matches_membership(a in ba_element(), b in ba_element()) {
        representation_sound(&ModelHandle::SATURATED_BA, &a, &b)?;
    }

    #[test]
    fn infinite_elements_split_and_have_disjoint_infinite_partners(a in column_element()) {
        let m = ModelHandle::COLUMNS;
        prop_assume!(a.is_infinite());
        let halves = m.realize_type(std::slice::from_ref(&a), &[(Card::Fin(0), Card::Inf), (Card::Inf, Card::Inf)]).unwrap();
        let x = match halves {
            Realization::Realized(x) => x,
            other => panic!("{other:?}"),
        };
        let sizes = m.cell_sizes(&[a.clone(), x]).unwrap();
        prop_assert_eq!(sizes[1], Card::Inf);
        prop_assert_eq!(sizes[3], Card::Inf);
        prop_assert_eq!(sizes[2], Card::Fin(0));
        let d = m.fresh_disjoint_infinite(&a).unwrap().unwrap();
        prop_assert!(d.is_infinite());
        prop_assert!(m.lattice_op(LatticeOp::Intersection, &a, &d).unwrap().is_empty());
    }
}

/// Cell sizes of explicit subsets of `0..n`.
fn measured(n: u32, params: &[String], env: &BTreeMap<String, u64>) -> Vec<Card> {
    let mut sizes = vec![0u64; 1 << params.len()];
    for atom in 0..n {
        let m = params.iter().enumerate().filter(|(_, p)| env[*p] >> atom & 1 == 1).fold(0, |m, (i, _)| m | 1 << i);
        sizes[m] += 1;
    }
    sizes.into_iter().map(Card::Fin).collect()
}

fn eval_term(t: &Term, env: &BTreeMap<String, u64>, universe: u64) -> u64 {
    match t {
        Term::Var(v) => env[v],
        Term::Empty => 0,
        Term::Universe => universe,
        Term::Union(a, b) => eval_term(a, env, universe) | eval_term(b, env, universe),
        Term::Intersection(a, b) => eval_term(a, env, universe) & eval_term(b, env, universe),
        Term::Difference(a, b) => eval_term(a, env, universe) & !eval_term(b, env, universe),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn term_cells_partition_the_container(t in term(true), u in term(true)) {
        let params: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
        let container = Term::union(t.clone(), u.clone());
        let inside: BTreeSet<usize> = term_cells(&t, &params).unwrap().into_iter().collect();
        let rest: BTreeSet<usize> = term_cells(&Term::diff(container.clone(), t), &params).unwrap().into_iter().collect();
        let whole: BTreeSet<usize> = term_cells(&container, &params).unwrap().into_iter().collect();
        prop_assert!(inside.is_disjoint(&rest));
        prop_assert_eq!(inside.union(&rest).copied().collect::<BTreeSet<_>>(), whole);
    }

    #[test]
    fn atomic_profiles_match_finite_semantics(
        f in atomic(true),
        n in 0u32..10,
        bits in prop::collection::vec(any::<u64>(), 4),
    ) {
        let params: Vec<String> = VARS.iter().map(|s| s.to_string()).collect();
        let universe = (1u64 << n) - 1;
        let env: BTreeMap<String, u64> = params.iter().cloned().zip(bits.iter().map(|b| b & universe)).collect();
        let truth = match &f {
            Formula::Subseteq(a, b) => eval_term(a, &env, universe) & !eval_term(b, &env, universe) == 0,
            Formula::Equal(a, b) => eval_term(a, &env, universe) == eval_term(b, &env, universe),
            Formula::CardEq(t, k) => eval_term(t, &env, universe).count_ones() == *k,
            _ => unreachable!(),
        };
        let sizes = measured(n, &params, &env);
        let by_profiles = atomic_to_profiles(&f, &params).unwrap().iter().any(|p| p.satisfied_by(&sizes));
        prop_assert_eq!(by_profiles, truth, "{}", f);
    }
}
