//! Cardinality constraints over `ℕ ∪ {∞}`.
//!
//! A [`SizeSet`] is either a finite set of naturals or the complement of one.
//! Complements always contain `∞`; finite sets never do. Boolean
//! combinations of the counting predicates `|t| = n` can only ever carve out
//! sets of this shape, so `∞` is never isolated.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A cardinality: a natural number or `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Card {
    Fin(u64),
    Inf,
}

impl Card {
    pub fn is_infinite(self) -> bool {
        matches!(self, Card::Inf)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Card::Fin(n) => Some(n),
            Card::Inf => None,
        }
    }
}

impl std::ops::Add for Card {
    type Output = Card;

    fn add(self, rhs: Card) -> Card {
        match (self, rhs) {
            (Card::Fin(a), Card::Fin(b)) => Card::Fin(a + b),
            _ => Card::Inf,
        }
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Fin(n) => write!(f, "{n}"),
            Card::Inf => f.write_str("inf"),
        }
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Card::Fin(n) => s.serialize_u64(*n),
            Card::Inf => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(u64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(Card::Fin(n)),
            Raw::S(s) if s == "inf" || s == "∞" => Ok(Card::Inf),
            Raw::S(s) => Err(serde::de::Error::custom(format!(
                "expected a natural or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// `Fin(S)` is exactly the finite sizes in `S`; `CoFin(S)` is `(ℕ \ S) ∪ {∞}`.
/// Both vectors are kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SizeSet {
    Fin(Vec<u32>),
    CoFin(Vec<u32>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Not,
}

fn canonical(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v.dedup();
    v
}

fn sorted_intersection(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn sorted_union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j, mut out) = (0, 0, Vec::with_capacity(a.len() + b.len()));
    while i < a.len() || j < b.len() {
        if j == b.len() || (i < a.len() && a[i] < b[j]) {
            out.push(a[i]);
            i += 1;
        } else if i == a.len() || b[j] < a[i] {
            out.push(b[j]);
            j += 1;
        } else {
            out.push(a[i]);
            i += 1;
            j += 1;
        }
    }
    out
}

fn sorted_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().copied().filter(|x| b.binary_search(x).is_err()).collect()
}

impl SizeSet {
    /// Every size, including `∞`.
    pub fn any() -> SizeSet {
        SizeSet::CoFin(Vec::new())
    }

    pub fn empty() -> SizeSet {
        SizeSet::Fin(Vec::new())
    }

    pub fn exactly(n: u32) -> SizeSet {
        SizeSet::Fin(vec![n])
    }

    pub fn fin(v: impl IntoIterator<Item = u32>) -> SizeSet {
        SizeSet::Fin(canonical(v.into_iter().collect()))
    }

    pub fn cofin(v: impl IntoIterator<Item = u32>) -> SizeSet {
        SizeSet::CoFin(canonical(v.into_iter().collect()))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SizeSet::Fin(v) if v.is_empty())
    }

    pub fn is_any(&self) -> bool {
        matches!(self, SizeSet::CoFin(v) if v.is_empty())
    }

    pub fn contains_infinity(&self) -> bool {
        matches!(self, SizeSet::CoFin(_))
    }

    pub fn contains(&self, v: Card) -> bool {
        match (self, v) {
            (SizeSet::Fin(s), Card::Fin(n)) => u32::try_from(n).is_ok_and(|n| s.binary_search(&n).is_ok()),
            (SizeSet::Fin(_), Card::Inf) => false,
            (SizeSet::CoFin(s), Card::Fin(n)) => u32::try_from(n).map_or(true, |n| s.binary_search(&n).is_err()),
            (SizeSet::CoFin(_), Card::Inf) => true,
        }
    }

    pub fn complement(&self) -> SizeSet {
        match self {
            SizeSet::Fin(s) => SizeSet::CoFin(s.clone()),
            SizeSet::CoFin(s) => SizeSet::Fin(s.clone()),
        }
    }

    pub fn intersect(&self, other: &SizeSet) -> SizeSet {
        match (self, other) {
            (SizeSet::Fin(a), SizeSet::Fin(b)) => SizeSet::Fin(sorted_intersection(a, b)),
            (SizeSet::Fin(a), SizeSet::CoFin(e)) | (SizeSet::CoFin(e), SizeSet::Fin(a)) => {
                SizeSet::Fin(sorted_difference(a, e))
            }
            (SizeSet::CoFin(a), SizeSet::CoFin(b)) => SizeSet::CoFin(sorted_union(a, b)),
        }
    }

    pub fn union(&self, other: &SizeSet) -> SizeSet {
        match (self, other) {
            (SizeSet::Fin(a), SizeSet::Fin(b)) => SizeSet::Fin(sorted_union(a, b)),
            (SizeSet::Fin(a), SizeSet::CoFin(e)) | (SizeSet::CoFin(e), SizeSet::Fin(a)) => {
                SizeSet::CoFin(sorted_difference(e, a))
            }
            (SizeSet::CoFin(a), SizeSet::CoFin(b)) => SizeSet::CoFin(sorted_intersection(a, b)),
        }
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &SizeSet) -> bool {
        match (self, other) {
            (SizeSet::Fin(a), SizeSet::Fin(b)) => a.iter().all(|x| b.binary_search(x).is_ok()),
            (SizeSet::Fin(a), SizeSet::CoFin(e)) => a.iter().all(|x| e.binary_search(x).is_err()),
            (SizeSet::CoFin(_), SizeSet::Fin(_)) => false,
            (SizeSet::CoFin(a), SizeSet::CoFin(b)) => b.iter().all(|x| a.binary_search(x).is_ok()),
        }
    }

    /// `{x ⊕ y : x ∈ self, y ∈ other}` with `∞` absorbing.
    pub fn sumset(&self, other: &SizeSet) -> SizeSet {
        if self.is_empty() || other.is_empty() {
            return SizeSet::empty();
        }
        match (self, other) {
            (SizeSet::Fin(a), SizeSet::Fin(b)) => {
                let mut out = Vec::with_capacity(a.len() * b.len());
                for x in a {
                    for y in b {
                        out.push(x + y);
                    }
                }
                SizeSet::Fin(canonical(out))
            }
            _ => {
                // At least one side contains ∞, so the sum does too. Every n
                // past `bound` is a sum of members, so only the exclusions
                // below it need checking.
                let largest = |s: &SizeSet| match s {
                    SizeSet::Fin(v) | SizeSet::CoFin(v) => v.last().copied().unwrap_or(0),
                };
                let bound = 2 * largest(self).max(largest(other)) + 2;
                let excluded = (0..=bound)
                    .filter(|&n| !(0..=n).any(|x| self.contains(Card::Fin(x as u64)) && other.contains(Card::Fin((n - x) as u64))))
                    .collect();
                SizeSet::CoFin(excluded)
            }
        }
    }

    pub fn combine(op: BoolOp, a: &SizeSet, b: Option<&SizeSet>) -> SizeSet {
        match (op, b) {
            (BoolOp::Not, _) => a.complement(),
            (BoolOp::And, Some(b)) => a.intersect(b),
            (BoolOp::Or, Some(b)) => a.union(b),
            (_, None) => panic!("binary size-set operation needs two operands"),
        }
    }
}

/// Boolean combination of size sets; `Not` ignores `b`.
pub fn ss_combine(op: BoolOp, a: &SizeSet, b: Option<&SizeSet>) -> SizeSet {
    SizeSet::combine(op, a, b)
}

pub fn ss_sumset(a: &SizeSet, b: &SizeSet) -> SizeSet {
    a.sumset(b)
}

pub fn ss_contains(a: &SizeSet, v: Card) -> bool {
    a.contains(v)
}

impl fmt::Display for SizeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (prefix, v) = match self {
            SizeSet::Fin(v) => ("", v),
            SizeSet::CoFin(v) => ("~", v),
        };
        let items: Vec<String> = v.iter().map(|n| n.to_string()).collect();
        write!(f, "{prefix}{{{}}}", items.join(","))
    }
}
