//! Quantifier elimination to cell normal form, and the decision procedure
//! for both complete theories.
//!
//! Every formula is turned into a disjunction of cell profiles over its free
//! variables. An existential `∃x` is removed by letting `x` cut each
//! parameter cell `σ` into an inside part (`σ ∪ {x}`) and an outside part
//! (`σ`): the merged cell then admits exactly the sums `in ⊕ out`. In set
//! mode the exterior is always infinite, so only the size of the piece of
//! `x` lying outside every parameter matters, and it merely has to be
//! admissible. In class mode the exterior is an ordinary cell.

use std::collections::HashSet;

use crate::cells::{atomic_to_profiles, cell_label, profile_satisfiable, CellProfile, CellSizes};
use crate::error::{Error, Result};
use crate::formula::{Formula, TheoryMode};
use crate::sizesets::SizeSet;

/// Hard cap on the number of disjuncts carried at any point.
pub const DISJUNCT_CAP: usize = 1_000_000;

/// Above this many disjuncts subsumption pruning is skipped (it is quadratic).
const SUBSUMPTION_LIMIT: usize = 20_000;

/// A disjunction of cell profiles over a common parameter list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dnf {
    pub params: Vec<String>,
    pub disjuncts: Vec<Vec<SizeSet>>,
}

impl Dnf {
    pub fn falsum(params: &[String]) -> Dnf {
        Dnf {
            params: params.to_vec(),
            disjuncts: Vec::new(),
        }
    }

    pub fn verum(params: &[String]) -> Dnf {
        Dnf {
            params: params.to_vec(),
            disjuncts: vec![vec![SizeSet::any(); 1 << params.len()]],
        }
    }

    pub fn from_profiles(params: &[String], profiles: Vec<CellProfile>) -> Dnf {
        Dnf {
            params: params.to_vec(),
            disjuncts: profiles.into_iter().map(|p| p.cells).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.disjuncts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn profiles(&self) -> Vec<CellProfile> {
        self.disjuncts
            .iter()
            .map(|cells| CellProfile {
                params: self.params.clone(),
                cells: cells.clone(),
            })
            .collect()
    }

    /// True iff some disjunct admits the concrete sizes.
    pub fn satisfied_by(&self, sizes: &CellSizes) -> bool {
        self.disjuncts
            .iter()
            .any(|d| d.iter().zip(&sizes.sizes).all(|(s, &c)| s.contains(c)))
    }

    /// Sorts disjuncts into the canonical mask-lexicographic order.
    pub fn canonicalize(&mut self) {
        self.disjuncts.sort();
        self.disjuncts.dedup();
    }

    /// Diagnostic dump of every disjunct, blank-line separated.
    pub fn dump(&self) -> String {
        if self.disjuncts.is_empty() {
            return "false\n".to_string();
        }
        let mut out = String::new();
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("# disjunct {}\n", i + 1));
            for cell in (1..d.len()).chain(std::iter::once(0)) {
                out.push_str(&format!("{} : {}\n", cell_label(&self.params, cell), d[cell]));
            }
        }
        out
    }
}

fn check_cap(n: usize) -> Result<()> {
    if n > DISJUNCT_CAP {
        Err(Error::ResourceCap(format!(
            "normal form exceeds {DISJUNCT_CAP} disjuncts"
        )))
    } else {
        Ok(())
    }
}

fn cellwise_subset(a: &[SizeSet], b: &[SizeSet]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.is_subset(y))
}

/// Drops empty disjuncts, merges duplicates and removes disjuncts contained
/// in another one. Keeps first-occurrence order.
fn reduce(mut ds: Vec<Vec<SizeSet>>) -> Vec<Vec<SizeSet>> {
    ds.retain(|d| !d.iter().any(SizeSet::is_empty));
    let mut seen = HashSet::with_capacity(ds.len());
    ds.retain(|d| seen.insert(d.clone()));
    if ds.len() < 2 || ds.len() > SUBSUMPTION_LIMIT {
        return ds;
    }
    let mut keep = vec![true; ds.len()];
    for i in 0..ds.len() {
        if !keep[i] {
            continue;
        }
        for j in 0..ds.len() {
            if i != j && keep[j] && cellwise_subset(&ds[j], &ds[i]) {
                keep[j] = false;
            }
        }
    }
    ds.into_iter().zip(keep).filter(|(_, k)| *k).map(|(d, _)| d).collect()
}

fn dnf_and(a: Dnf, b: Dnf) -> Result<Dnf> {
    debug_assert_eq!(a.params, b.params);
    check_cap(a.len().saturating_mul(b.len()) / 4)?;
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in &a.disjuncts {
        'pair: for y in &b.disjuncts {
            let mut cells = Vec::with_capacity(x.len());
            for (s, t) in x.iter().zip(y) {
                let m = s.intersect(t);
                if m.is_empty() {
                    continue 'pair;
                }
                cells.push(m);
            }
            out.push(cells);
        }
    }
    let disjuncts = reduce(out);
    check_cap(disjuncts.len())?;
    Ok(Dnf {
        params: a.params,
        disjuncts,
    })
}

fn dnf_or(mut a: Dnf, b: Dnf) -> Result<Dnf> {
    debug_assert_eq!(a.params, b.params);
    a.disjuncts.extend(b.disjuncts);
    a.disjuncts = reduce(a.disjuncts);
    check_cap(a.len())?;
    Ok(a)
}

/// Complement of a disjunction, built as a union of pairwise disjoint boxes.
fn dnf_not(a: Dnf) -> Result<Dnf> {
    let width = 1 << a.params.len();
    let mut result = vec![vec![SizeSet::any(); width]];
    for b in &a.disjuncts {
        let mut next = Vec::with_capacity(result.len());
        for r in result {
            if r.iter().zip(b).any(|(x, y)| x.intersect(y).is_empty()) {
                next.push(r);
                continue;
            }
            let mut cur = r;
            for (cell, constraint) in b.iter().enumerate() {
                if constraint.is_any() {
                    continue;
                }
                let outside = cur[cell].intersect(&constraint.complement());
                if !outside.is_empty() {
                    let mut piece = cur.clone();
                    piece[cell] = outside;
                    next.push(piece);
                }
                cur[cell] = cur[cell].intersect(constraint);
            }
        }
        result = reduce(next);
        check_cap(result.len())?;
    }
    Ok(Dnf {
        params: a.params,
        disjuncts: result,
    })
}

/// Removes the last parameter by existential projection.
fn exists_last(d: Dnf, mode: TheoryMode) -> Result<Dnf> {
    let n = d.params.len();
    assert!(n > 0, "no variable to eliminate");
    let half = 1usize << (n - 1);
    let mut out = Vec::with_capacity(d.len());
    'disjunct: for cells in &d.disjuncts {
        let mut merged = Vec::with_capacity(half);
        for sigma in 0..half {
            let inside = &cells[sigma | half];
            let outside = &cells[sigma];
            let s = if sigma == 0 && mode == TheoryMode::SetMereology {
                debug_assert!(outside.contains_infinity(), "set-mode exterior constrained");
                if inside.is_empty() {
                    continue 'disjunct;
                }
                SizeSet::any()
            } else {
                inside.sumset(outside)
            };
            if s.is_empty() {
                continue 'disjunct;
            }
            merged.push(s);
        }
        out.push(merged);
    }
    let mut params = d.params;
    params.pop();
    Ok(Dnf {
        params,
        disjuncts: reduce(out),
    })
}

fn extend(params: &[String], x: &str) -> Vec<String> {
    let mut p = params.to_vec();
    p.push(x.to_string());
    p
}

/// Normal form of `f` (positive) or of `¬f` (negative) over `params`.
fn normal_form(f: &Formula, params: &[String], mode: TheoryMode, positive: bool) -> Result<Dnf> {
    match f {
        Formula::Subseteq(..) | Formula::Equal(..) | Formula::CardEq(..) => {
            if mode == TheoryMode::SetMereology && f.mentions_universe() {
                return Err(Error::Invalid(
                    "the universe constant is not available in set mode".into(),
                ));
            }
            let profiles = atomic_to_profiles(f, params)?;
            check_cap(profiles.len())?;
            let d = Dnf::from_profiles(params, profiles);
            if positive {
                Ok(d)
            } else {
                dnf_not(d)
            }
        }
        Formula::Not(g) => normal_form(g, params, mode, !positive),
        Formula::And(a, b) | Formula::Or(a, b) => {
            let is_and = matches!(f, Formula::And(..)) == positive;
            let x = normal_form(a, params, mode, positive)?;
            if is_and && x.is_empty() {
                return Ok(x);
            }
            let y = normal_form(b, params, mode, positive)?;
            if is_and {
                dnf_and(x, y)
            } else {
                dnf_or(x, y)
            }
        }
        Formula::Implies(a, b) => {
            let rewritten = Formula::or(Formula::not((**a).clone()), (**b).clone());
            normal_form(&rewritten, params, mode, positive)
        }
        Formula::Iff(a, b) => {
            let rewritten = Formula::or(
                Formula::and((**a).clone(), (**b).clone()),
                Formula::and(Formula::not((**a).clone()), Formula::not((**b).clone())),
            );
            normal_form(&rewritten, params, mode, positive)
        }
        Formula::Exists(x, body) => {
            let inner = normal_form(body, &extend(params, x), mode, true)?;
            let projected = exists_last(inner, mode)?;
            if positive {
                Ok(projected)
            } else {
                dnf_not(projected)
            }
        }
        Formula::Forall(x, body) => {
            // ∀x φ ≡ ¬∃x ¬φ
            let inner = normal_form(body, &extend(params, x), mode, false)?;
            let projected = exists_last(inner, mode)?;
            if positive {
                dnf_not(projected)
            } else {
                Ok(projected)
            }
        }
    }
}

/// Semantics-preserving disjunction of profiles for a quantifier-free formula.
pub fn to_profiles(f: &Formula, params: &[String], mode: TheoryMode) -> Result<Dnf> {
    if !f.is_quantifier_free() {
        return Err(Error::Invalid("to_profiles expects a quantifier-free formula".into()));
    }
    let mut d = normal_form(f, params, mode, true)?;
    d.canonicalize();
    Ok(d)
}

/// Projects away `x`, which must be the last parameter of `d`.
pub fn eliminate_exists(x: &str, d: Dnf, mode: TheoryMode) -> Result<Dnf> {
    if d.params.last().map(String::as_str) != Some(x) {
        return Err(Error::Invalid(format!(
            "`{x}` must be the last parameter of the disjunction"
        )));
    }
    let mut out = exists_last(d, mode)?;
    out.canonicalize();
    Ok(out)
}

/// Normal form over an explicit parameter list (a superset of the free
/// variables, in any order).
pub fn normal_form_over(f: &Formula, params: &[String], mode: TheoryMode) -> Result<Dnf> {
    let mut d = normal_form(f, params, mode, true)?;
    d.canonicalize();
    Ok(d)
}

/// Quantifier-free normal form over `free_variables(f)`.
pub fn qe_normal_form(f: &Formula, mode: TheoryMode) -> Result<Dnf> {
    normal_form_over(f, &f.free_variables(), mode)
}

/// Decides a sentence in the complete theory selected by `mode`.
pub fn decide(f: &Formula, mode: TheoryMode) -> Result<bool> {
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(Error::UnboundVariable(v));
    }
    let d = normal_form(f, &[], mode, true)?;
    Ok(d.profiles().iter().any(|p| profile_satisfiable(p, mode)))
}

/// Whether the theory proves `∀free. (f ↔ g)`.
pub fn equivalent(f: &Formula, g: &Formula, mode: TheoryMode) -> Result<bool> {
    let mut vars = f.free_variables();
    for v in g.free_variables() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    let mut closed = Formula::iff(f.clone(), g.clone());
    for v in vars.iter().rev() {
        closed = Formula::forall(v, closed);
    }
    decide(&closed, mode)
}

/// A complete type is a cell-value vector; it is realizable iff every cell
/// admits some size (plus the mode's rule about where `∞` must appear).
pub fn type_satisfiable(p: &CellProfile, mode: TheoryMode) -> bool {
    profile_satisfiable(p, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;

    const SET: TheoryMode = TheoryMode::SetMereology;
    const CLASS: TheoryMode = TheoryMode::ClassMereology;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn dec(s: &str, mode: TheoryMode) -> bool {
        decide(&parse(s, mode).unwrap(), mode).unwrap()
    }

    #[test]
    fn negated_inclusion() {
        let f = parse("~(a <= b)", SET).unwrap();
        let d = to_profiles(&f, &names(&["a", "b"]), SET).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.disjuncts[0][0b01], SizeSet::cofin([0]));
        assert!(d.disjuncts[0][0b10].is_any() && d.disjuncts[0][0b11].is_any());
    }

    #[test]
    fn disjoint_singletons() {
        let f = parse("|a| = 1 & |b| = 1 & a /\\ b = 0", SET).unwrap();
        let d = to_profiles(&f, &names(&["a", "b"]), SET).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.disjuncts[0][0b01], SizeSet::exactly(1));
        assert_eq!(d.disjuncts[0][0b10], SizeSet::exactly(1));
        assert_eq!(d.disjuncts[0][0b11], SizeSet::exactly(0));
    }

    #[test]
    fn splitting_adds_sizes() {
        let f = parse("E x. (|x /\\ a| = 2 & |a - x| = 3)", SET).unwrap();
        let d = qe_normal_form(&f, SET).unwrap();
        assert_eq!(d.params, names(&["a"]));
        assert_eq!(d.len(), 1);
        assert_eq!(d.disjuncts[0][1], SizeSet::exactly(5));
        let g = parse("E x. (|x /\\ a| = 2 & |a - x| = 3 & |a| = 4)", SET).unwrap();
        assert!(qe_normal_form(&g, SET).unwrap().is_empty());
    }

    #[test]
    fn unbounded_witness_exists() {
        let f = parse("E x. (a <= x & ~(x <= a))", SET).unwrap();
        let d = qe_normal_form(&f, SET).unwrap();
        assert_eq!(d, Dnf::verum(&names(&["a"])));
    }

    #[test]
    fn top_element_in_class_mode() {
        let f = parse("A y. (y <= x)", CLASS).unwrap();
        let d = qe_normal_form(&f, CLASS).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.disjuncts[0][0], SizeSet::exactly(0));
        assert!(d.disjuncts[0][1].is_any());
    }

    #[test]
    fn decides_sentences() {
        assert!(dec("E x. |x| = 3", SET));
        assert!(!dec("E x. A y. (y <= x)", SET));
        assert!(dec("A a. E x. (a <= x & ~(x = a))", SET));
        assert!(dec("E x. A y. (y <= x)", CLASS));
        assert!(!dec("E a. (|a| = 1 & |a| = 2)", SET));
        assert!(!dec("E a. (|a| = 1 & |a| = 2)", CLASS));
        assert!(!dec("|1| = 10", CLASS));
        assert!(dec("E a. |1 - a| = 3", CLASS));
        assert!(dec("|0| = 0", SET));
    }

    #[test]
    fn equivalences() {
        let eq = |f: &str, g: &str| {
            equivalent(&parse(f, SET).unwrap(), &parse(g, SET).unwrap(), SET).unwrap()
        };
        assert!(eq("a <= b", "a /\\ b = a"));
        assert!(!eq("a <= b", "b <= a"));
        assert!(eq("|a| = 0", "a = 0"));
    }

    #[test]
    fn figure_type_is_a_single_profile() {
        // cells: a-(b∪c)=large, (a∩b)-c=3, b-(a∪c)=2, (a∩c)-b=0, a∩b∩c=5,
        // (b∩c)-a=large, c-(a∪b)=17; "large" written as "not 0..3"
        let f = parse(
            "~(|a - (b \\/ c)| = 0) & ~(|a - (b \\/ c)| = 1) & |(a /\\ b) - c| = 3 & \
             |b - (a \\/ c)| = 2 & |(a /\\ c) - b| = 0 & |a /\\ b /\\ c| = 5 & \
             ~(|(b /\\ c) - a| = 0) & |c - (a \\/ b)| = 17",
            SET,
        )
        .unwrap();
        let d = to_profiles(&f, &names(&["a", "b", "c"]), SET).unwrap();
        assert_eq!(d.len(), 1);
        let p = &d.disjuncts[0];
        assert_eq!(p[0b001], SizeSet::cofin([0, 1]));
        assert_eq!(p[0b011], SizeSet::exactly(3));
        assert_eq!(p[0b010], SizeSet::exactly(2));
        assert_eq!(p[0b101], SizeSet::exactly(0));
        assert_eq!(p[0b111], SizeSet::exactly(5));
        assert_eq!(p[0b110], SizeSet::cofin([0]));
        assert_eq!(p[0b100], SizeSet::exactly(17));
        assert!(type_satisfiable(&d.profiles()[0], SET));
    }

    #[test]
    fn satisfiability_rules() {
        let params = names(&["a"]);
        let mut p = CellProfile::unconstrained(&params);
        p.cells[1] = SizeSet::empty();
        assert!(!type_satisfiable(&p, SET));
        let mut q = CellProfile::unconstrained(&params);
        q.cells[0] = SizeSet::exactly(57);
        assert!(type_satisfiable(&q, CLASS));
        q.cells[1] = SizeSet::exactly(4);
        assert!(!type_satisfiable(&q, CLASS));
    }

    #[test]
    fn eliminate_exists_requires_last_parameter() {
        let d = Dnf::verum(&names(&["x", "a"]));
        assert!(eliminate_exists("x", d.clone(), SET).is_err());
        assert_eq!(eliminate_exists("a", d, SET).unwrap(), Dnf::verum(&names(&["x"])));
    }

    #[test]
    fn shadowed_variables() {
        assert!(dec("E x. (|x| = 2 & E x. (|x| = 3))", SET));
        assert!(!dec("E x. (|x| = 2 & A x. |x| = 3)", SET));
    }

    #[test]
    fn infinitude_is_not_expressible() {
        for k in [0u32, 5, 32] {
            let parts: Vec<String> = (0..=k).map(|i| format!("~(|x| = {i})")).collect();
            let s = format!("E x. ({})", parts.join(" & "));
            assert!(dec(&s, SET), "{s}");
        }
    }
}
