//! The ω-saturation criterion, back-and-forth isomorphism building, and the
//! characteristic invariant.
//!
//! A countable model is ω-saturated iff every infinite element is the
//! disjoint union of two infinite elements and (in set mode) every element
//! has an infinite element disjoint from it. Saturated models of the same
//! theory are isomorphic; [`back_and_forth`] builds finite pieces of such an
//! isomorphism and [`verify_partial_iso`] checks them independently.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Formula, Term, TheoryMode};
use crate::models::{Demand, ModelElement, ModelHandle, ModelKind, Realization};
use crate::sizesets::Card;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Saturated,
    NotSaturated,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// Replayed criterion checks, one line each.
    WitnessLog(Vec<String>),
    NoInfiniteElements,
    /// `u` is infinite but cannot be split into two infinite halves, although
    /// every finite fragment of that splitting type is realized.
    UnsplittableInfinite {
        u: ModelElement,
        fragments: Vec<(u32, bool)>,
        realization: Realization,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SaturationReport {
    pub model: String,
    pub verdict: Verdict,
    pub evidence: Evidence,
}

/// Largest fragment of the splitting type replayed as evidence.
pub const FRAGMENT_BOUND: u32 = 16;

/// `E x. |x ∧ u| ∉ {0..k-1} ∧ |u − x| ∉ {0..k-1}`: `u` splits into two
/// parts of at least `k` atoms each.
pub fn splitting_fragment(u: &str, x: &str, k: u32) -> Formula {
    let inside = Term::inter(Term::var(x), Term::var(u));
    let outside = Term::diff(Term::var(u), Term::var(x));
    let parts: Vec<Formula> = (0..k)
        .flat_map(|n| {
            [
                Formula::not(Formula::CardEq(inside.clone(), n)),
                Formula::not(Formula::CardEq(outside.clone(), n)),
            ]
        })
        .collect();
    let body = Formula::conjunction(parts).unwrap_or(Formula::Equal(Term::var(x), Term::var(x)));
    Formula::exists(x, body)
}

/// Replays the splitting type of `u`: its fragments up to `bound` must all
/// hold while the type itself has no realization.
pub fn splitting_evidence(m: &ModelHandle, u: &ModelElement, bound: u32) -> Result<Evidence> {
    let env = BTreeMap::from([("u".to_string(), u.clone())]);
    let fragments = (1..=bound)
        .map(|k| Ok((k, m.eval(&splitting_fragment("u", "x", k), &env)?)))
        .collect::<Result<Vec<_>>>()?;
    let exterior = match m.mode() {
        TheoryMode::SetMereology => (Card::Fin(0), Card::Inf),
        TheoryMode::ClassMereology => (Card::Fin(0), m.cell_sizes(std::slice::from_ref(u))?[0]),
    };
    let realization = m.realize_type(std::slice::from_ref(u), &[exterior, (Card::Inf, Card::Inf)])?;
    Ok(Evidence::UnsplittableInfinite {
        u: u.clone(),
        fragments,
        realization,
    })
}

fn witness_log(m: &ModelHandle, trials: usize) -> Result<Vec<String>> {
    let mut log = Vec::new();
    let mut i = 0u64;
    while log.len() < trials {
        let a = m.enumerate(i);
        i += 1;
        if !a.is_infinite() {
            continue;
        }
        let ext = match m.mode() {
            TheoryMode::SetMereology => (Card::Fin(0), Card::Inf),
            TheoryMode::ClassMereology => (Card::Fin(0), m.cell_sizes(std::slice::from_ref(&a))?[0]),
        };
        let split = match m.realize_type(std::slice::from_ref(&a), &[ext, (Card::Inf, Card::Inf)])? {
            Realization::Realized(x) => x,
            Realization::Unrealizable { .. } => {
                return Err(Error::Invalid(format!("{m}: {a} does not split")));
            }
        };
        let sizes = m.cell_sizes(&[a.clone(), split.clone()])?;
        if sizes[3] != Card::Inf || sizes[1] != Card::Inf {
            return Err(Error::Invalid(format!("{m}: split of {a} is not infinite/infinite")));
        }
        let fresh = match m.fresh_disjoint_infinite(&a)? {
            Some(f) => {
                if !f.meet(&a).is_empty() || !f.is_infinite() {
                    return Err(Error::Invalid(format!("{m}: bad disjoint companion for {a}")));
                }
                f.to_string()
            }
            None if m.mode() == TheoryMode::ClassMereology => "none (cofinite)".to_string(),
            None => return Err(Error::Invalid(format!("{m}: no infinite element disjoint from {a}"))),
        };
        log.push(format!(
            "trial {}: a={a} halves={split} | {} ; disjoint={fresh}",
            log.len(),
            if m.leq(&split, &a)? { "below a" } else { "not below a" },
        ));
    }
    Ok(log)
}

/// Decides the criterion from the presentation; `trials` witness replays are
/// logged for saturated models.
pub fn check_criterion(m: &ModelHandle, trials: usize) -> Result<SaturationReport> {
    let (verdict, evidence) = match m.kind {
        ModelKind::Columns | ModelKind::ColumnsPerm | ModelKind::SaturatedBA => {
            (Verdict::Saturated, Evidence::WitnessLog(witness_log(m, trials.max(1))?))
        }
        ModelKind::Prime | ModelKind::FiniteBA(_) => (Verdict::NotSaturated, Evidence::NoInfiniteElements),
        ModelKind::Amorphous => {
            let u = m.element_from_json(r#"{"presentation":"amorphous","u":{"t":0,"p":1,"r":[0]}}"#)?;
            (Verdict::NotSaturated, splitting_evidence(m, &u, FRAGMENT_BOUND)?)
        }
        ModelKind::Characteristic(n) => {
            let mut blocks = vec![r#"{"t":0,"p":1,"r":[0]}"#.to_string()];
            blocks.extend((1..n).map(|_| "{}".to_string()));
            let text = format!(
                r#"{{"presentation":"char","n":{n},"blocks":[{}]}}"#,
                blocks.join(",")
            );
            let u = m.element_from_json(&text)?;
            (Verdict::NotSaturated, splitting_evidence(m, &u, FRAGMENT_BOUND)?)
        }
    };
    Ok(SaturationReport {
        model: m.id(),
        verdict,
        evidence,
    })
}

impl fmt::Display for SaturationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model: {}", self.model)?;
        let verdict = match self.verdict {
            Verdict::Saturated => "saturated",
            Verdict::NotSaturated => "not-saturated",
        };
        writeln!(f, "verdict: {verdict}")?;
        match &self.evidence {
            Evidence::WitnessLog(lines) => {
                writeln!(f, "evidence: witness-log {}", lines.len())?;
                for l in lines {
                    writeln!(f, "  {l}")?;
                }
            }
            Evidence::NoInfiniteElements => writeln!(f, "evidence: no-infinite-elements")?,
            Evidence::UnsplittableInfinite {
                u,
                fragments,
                realization,
            } => {
                writeln!(f, "evidence: unsplittable-infinite")?;
                writeln!(f, "  u: {u}")?;
                writeln!(f, "  type: x/\\u infinite, u-x infinite")?;
                for (k, ok) in fragments {
                    writeln!(f, "  fragment k={k}: {ok}")?;
                }
                match realization {
                    Realization::Realized(x) => writeln!(f, "  realized: {x}")?,
                    Realization::Unrealizable { cell } => writeln!(f, "  realized: UNREALIZABLE cell {cell}")?,
                }
            }
        }
        Ok(())
    }
}

/// Size of the largest family of pairwise disjoint infinite elements.
pub fn characteristic(m: &ModelHandle) -> Card {
    match m.kind {
        // Every element is finite.
        ModelKind::Prime | ModelKind::FiniteBA(_) => Card::Fin(0),
        // Infinite elements are cofinite in at least one of the n blocks and
        // finite in the spare region, so n + 1 disjoint ones would put two in
        // one block.
        ModelKind::Characteristic(n) => Card::Fin(n as u64),
        // Full columns (resp. residue classes) are pairwise disjoint and
        // infinite, in unbounded number.
        ModelKind::Columns | ModelKind::ColumnsPerm | ModelKind::Amorphous | ModelKind::SaturatedBA => Card::Inf,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "L",
            Side::Right => "R",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoPair {
    /// Which side's enumeration supplied the element.
    pub side: Side,
    /// Its enumeration index there.
    pub source_index: u64,
    pub left: ModelElement,
    pub right: ModelElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialIso {
    pub left: ModelHandle,
    pub right: ModelHandle,
    pub pairs: Vec<IsoPair>,
    pub consumed_left: u64,
    pub consumed_right: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub step: usize,
    pub side: Side,
    pub source_index: u64,
    pub element: ModelElement,
    /// `None` for the exterior.
    pub piece: Option<usize>,
    /// The piece of the other model that had to be split.
    pub target: Option<ModelElement>,
    pub demand: Demand,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackAndForth {
    Iso(PartialIso),
    Obstruction(Obstruction),
}

struct Extension {
    image: ModelElement,
    pieces: Vec<(ModelElement, ModelElement)>,
}

/// Maps `x` across, given the pieces `(source, target)` of the current
/// partial map. `Err` carries the index of the failed piece (`None` for the
/// exterior) and its demand.
fn extend(
    src: &ModelHandle,
    dst: &ModelHandle,
    pieces: &[(ModelElement, ModelElement)],
    unions: Option<(&ModelElement, &ModelElement)>,
    x: &ModelElement,
) -> std::result::Result<Extension, (Option<usize>, Option<ModelElement>, Demand)> {
    let mut out = Vec::with_capacity(pieces.len() + 2);
    let mut image = dst.bottom();
    for (i, (p, q)) in pieces.iter().enumerate() {
        let inside = p.meet(x);
        if inside.is_empty() {
            out.push((p.clone(), q.clone()));
            continue;
        }
        let outside = p.minus(x);
        if outside.is_empty() {
            image = image.join(q);
            out.push((p.clone(), q.clone()));
            continue;
        }
        let d = Demand {
            inside: inside.size(),
            outside: outside.size(),
            inside_rank: Some(src.rank(&inside)),
            outside_rank: Some(src.rank(&outside)),
        };
        let y = dst
            .split_piece(q, &d)
            .or_else(|| dst.split_piece(q, &d.without_ranks()))
            .ok_or((Some(i), Some(q.clone()), d))?;
        image = image.join(&y);
        let rest = q.minus(&y);
        out.push((inside, y));
        out.push((outside, rest));
    }
    if let Some((su, du)) = unions {
        let ext = x.minus(su);
        if !ext.is_empty() {
            let size = ext.size();
            let rank = src.rank(&ext);
            let d = Demand {
                inside: size,
                outside: Card::Inf,
                inside_rank: Some(rank),
                outside_rank: None,
            };
            let y = dst
                .fresh_part(du, size, Some(rank))
                .or_else(|| dst.fresh_part(du, size, None))
                .ok_or((None, None, d))?;
            image = image.join(&y);
            out.push((ext, y));
        }
    }
    Ok(Extension { image, pieces: out })
}

/// Alternates between the two enumerations, mapping each new element across
/// by realizing its type over the pairs so far.
pub fn back_and_forth(left: &ModelHandle, right: &ModelHandle, steps: usize) -> Result<BackAndForth> {
    if left.mode() != right.mode() {
        return Err(Error::ModeMismatch);
    }
    let set_mode = left.mode() == TheoryMode::SetMereology;
    let mut pieces: Vec<(ModelElement, ModelElement)> = match (left.top(), right.top()) {
        (Some(a), Some(b)) => vec![(a, b)],
        _ => Vec::new(),
    };
    let mut union_l = left.bottom();
    let mut union_r = right.bottom();
    let mut seen_l = HashSet::new();
    let mut seen_r = HashSet::new();
    let (mut next_l, mut next_r) = (0u64, 0u64);
    let mut pairs = Vec::with_capacity(steps);
    while pairs.len() < steps {
        let side = if pairs.len() % 2 == 0 { Side::Left } else { Side::Right };
        let (src, dst, next, seen) = match side {
            Side::Left => (left, right, &mut next_l, &mut seen_l),
            Side::Right => (right, left, &mut next_r, &mut seen_r),
        };
        let (x, idx) = loop {
            let idx = *next;
            *next += 1;
            let x = src.enumerate(idx);
            if !seen.contains(&x) {
                break (x, idx);
            }
        };
        let oriented: Vec<(ModelElement, ModelElement)> = match side {
            Side::Left => std::mem::take(&mut pieces),
            Side::Right => pieces.drain(..).map(|(a, b)| (b, a)).collect(),
        };
        let unions = set_mode.then_some(match side {
            Side::Left => (&union_l, &union_r),
            Side::Right => (&union_r, &union_l),
        });
        let ext = match extend(src, dst, &oriented, unions, &x) {
            Ok(ext) => ext,
            Err((piece, target, demand)) => {
                return Ok(BackAndForth::Obstruction(Obstruction {
                    step: pairs.len(),
                    side,
                    source_index: idx,
                    element: x,
                    piece,
                    target,
                    demand,
                }))
            }
        };
        let (l, r) = match side {
            Side::Left => (x, ext.image),
            Side::Right => (ext.image, x),
        };
        pieces = match side {
            Side::Left => ext.pieces,
            Side::Right => ext.pieces.into_iter().map(|(a, b)| (b, a)).collect(),
        };
        if set_mode {
            union_l = union_l.join(&l);
            union_r = union_r.join(&r);
        }
        seen_l.insert(l.clone());
        seen_r.insert(r.clone());
        pairs.push(IsoPair {
            side,
            source_index: idx,
            left: l,
            right: r,
        });
    }
    let iso = PartialIso {
        left: *left,
        right: *right,
        pairs,
        consumed_left: next_l,
        consumed_right: next_r,
    };
    verify_partial_iso(&iso)?;
    Ok(BackAndForth::Iso(iso))
}

/// Elements of one side re-expressed over the atoms of the Boolean algebra
/// they generate: each element becomes a bitset over pieces. Infinite
/// pieces are flagged; finite ones are split into single atoms so that a
/// cell's finite size is a popcount.
struct PieceIndex {
    words: usize,
    elements: Vec<Vec<u64>>,
    infinite: Vec<u64>,
}

impl PieceIndex {
    fn build(m: &ModelHandle, elems: &[ModelElement]) -> PieceIndex {
        let mut pieces: Vec<ModelElement> = Vec::new();
        let mut union = m.bottom();
        for e in elems {
            let mut next = Vec::with_capacity(pieces.len() + 1);
            for p in &pieces {
                for part in [p.meet(e), p.minus(e)] {
                    if !part.is_empty() {
                        next.push(part);
                    }
                }
            }
            let fresh = e.minus(&union);
            if !fresh.is_empty() {
                next.push(fresh);
            }
            union = union.join(e);
            pieces = next;
        }
        if let Some(top) = m.top() {
            let rest = top.minus(&union);
            if !rest.is_empty() {
                pieces.push(rest);
            }
        }
        let mut units: Vec<ModelElement> = Vec::new();
        let mut inf_flags = Vec::new();
        for p in pieces {
            match p.size() {
                Card::Inf => {
                    units.push(p);
                    inf_flags.push(true);
                }
                Card::Fin(k) => {
                    for atom in m.atoms_below(&p, k).expect("same presentation") {
                        units.push(atom);
                        inf_flags.push(false);
                    }
                }
            }
        }
        let words = units.len().div_ceil(64).max(1);
        let bitset = |pred: &dyn Fn(usize) -> bool| {
            let mut v = vec![0u64; words];
            for i in (0..units.len()).filter(|&i| pred(i)) {
                v[i / 64] |= 1 << (i % 64);
            }
            v
        };
        let mut elements: Vec<Vec<u64>> = elems.iter().map(|e| bitset(&|i| units[i].below(e))).collect();
        if let Some(top) = m.top() {
            elements.push(bitset(&|i| units[i].below(&top)));
        }
        PieceIndex {
            words,
            infinite: bitset(&|i| inf_flags[i]),
            elements,
        }
    }

    fn cell_sizes(&self, tuple: &[usize], top: Option<usize>) -> Vec<Card> {
        let n = tuple.len();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0usize..1 << n {
            if mask == 0 && top.is_none() {
                out.push(Card::Inf);
                continue;
            }
            let mut inf = false;
            let mut count = 0u64;
            for w in 0..self.words {
                let mut bits = top.map_or(!0, |t| self.elements[t][w]);
                for (i, &e) in tuple.iter().enumerate() {
                    let v = self.elements[e][w];
                    bits &= if mask >> i & 1 == 1 { v } else { !v };
                }
                inf |= bits & self.infinite[w] != 0;
                count += (bits & !self.infinite[w]).count_ones() as u64;
            }
            out.push(if inf { Card::Inf } else { Card::Fin(count) });
        }
        out
    }
}

/// Checks a partial isomorphism from the descriptors alone: inclusion agrees
/// both ways on all pairs, and every subtuple of at most three pairs has
/// identical cell sizes on both sides.
pub fn verify_partial_iso(iso: &PartialIso) -> Result<()> {
    let ls: Vec<ModelElement> = iso.pairs.iter().map(|p| p.left.clone()).collect();
    let rs: Vec<ModelElement> = iso.pairs.iter().map(|p| p.right.clone()).collect();
    let n = ls.len();
    for i in 0..n {
        for j in 0..n {
            if iso.left.leq(&ls[i], &ls[j])? != iso.right.leq(&rs[i], &rs[j])? {
                return Err(Error::Invalid(format!("inclusion disagrees on pairs {i}, {j}")));
            }
        }
    }
    let li = PieceIndex::build(&iso.left, &ls);
    let ri = PieceIndex::build(&iso.right, &rs);
    let top = iso.left.top().map(|_| n);
    let check = |t: &[usize]| -> Result<()> {
        if li.cell_sizes(t, top) != ri.cell_sizes(t, top) {
            return Err(Error::Invalid(format!("cell sizes disagree on pairs {t:?}")));
        }
        Ok(())
    };
    for i in 0..n {
        check(&[i])?;
        for j in i + 1..n {
            check(&[i, j])?;
            for k in j + 1..n {
                check(&[i, j, k])?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for PartialIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pairs.iter().enumerate() {
            let (elem, mapped) = match p.side {
                Side::Left => (&p.left, &p.right),
                Side::Right => (&p.right, &p.left),
            };
            writeln!(f, "{i}\t{}\t{elem}\t{mapped}", p.side)?;
        }
        Ok(())
    }
}

impl fmt::Display for Obstruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let piece = self.piece.map_or("exterior".to_string(), |i| format!("piece {i}"));
        write!(
            f,
            "OBSTRUCTION step={} side={} index={} element={} cell={} demand=in:{}/out:{}",
            self.step, self.side, self.source_index, self.element, piece, self.demand.inside, self.demand.outside
        )?;
        if let Some(t) = &self.target {
            write!(f, " target={t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_verdicts() {
        let r = check_criterion(&ModelHandle::COLUMNS, 5).unwrap();
        assert_eq!(r.verdict, Verdict::Saturated);
        assert!(matches!(&r.evidence, Evidence::WitnessLog(l) if l.len() == 5));
        let r = check_criterion(&ModelHandle::SATURATED_BA, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Saturated);
        let r = check_criterion(&ModelHandle::PRIME, 1).unwrap();
        assert_eq!(r.evidence, Evidence::NoInfiniteElements);
    }

    #[test]
    fn amorphous_type_is_finitely_realized_but_omitted() {
        let r = check_criterion(&ModelHandle::AMORPHOUS, 1).unwrap();
        assert_eq!(r.verdict, Verdict::NotSaturated);
        let Evidence::UnsplittableInfinite { u, fragments, realization } = r.evidence else {
            panic!("wrong evidence")
        };
        assert!(ModelHandle::AMORPHOUS.is_infinite(&u).unwrap());
        assert_eq!(fragments.len(), 16);
        assert!(fragments.iter().all(|&(_, ok)| ok));
        assert_eq!(realization, Realization::Unrealizable { cell: 1 });
    }

    #[test]
    fn characteristic_values() {
        assert_eq!(characteristic(&ModelHandle::characteristic(3)), Card::Fin(3));
        assert_eq!(characteristic(&ModelHandle::PRIME), Card::Fin(0));
        assert_eq!(characteristic(&ModelHandle::COLUMNS), Card::Inf);
    }

    #[test]
    fn columns_have_unboundedly_many_disjoint_infinite_elements() {
        let m = ModelHandle::COLUMNS;
        let mut family: Vec<ModelElement> = Vec::new();
        let mut union = m.bottom();
        for _ in 0..64 {
            let f = m.fresh_disjoint_infinite(&union).unwrap().unwrap();
            union = union.join(&f);
            family.push(f);
        }
        for (i, a) in family.iter().enumerate() {
            assert!(a.is_infinite());
            for b in &family[i + 1..] {
                assert!(a.meet(b).is_empty());
            }
        }
    }

    #[test]
    fn small_back_and_forth_runs() {
        let out = back_and_forth(&ModelHandle::COLUMNS, &ModelHandle::COLUMNS_PERM, 30).unwrap();
        assert!(matches!(out, BackAndForth::Iso(ref iso) if iso.pairs.len() == 30));
        let out = back_and_forth(&ModelHandle::SATURATED_BA, &ModelHandle::SATURATED_BA, 20).unwrap();
        assert!(matches!(out, BackAndForth::Iso(_)));
        assert_eq!(
            back_and_forth(&ModelHandle::COLUMNS, &ModelHandle::SATURATED_BA, 3),
            Err(Error::ModeMismatch)
        );
    }

    #[test]
    fn verifier_rejects_a_bad_map() {
        let m = ModelHandle::COLUMNS;
        let a = m.enumerate(1);
        let b = m.enumerate(2);
        let iso = PartialIso {
            left: m,
            right: m,
            pairs: vec![
                IsoPair { side: Side::Left, source_index: 1, left: a.clone(), right: a.clone() },
                IsoPair { side: Side::Left, source_index: 2, left: b.clone(), right: a.clone() },
            ],
            consumed_left: 3,
            consumed_right: 0,
        };
        assert!(a != b);
        assert!(verify_partial_iso(&iso).is_err());
    }
}
