//! Model elements: atom sets split into eventually periodic columns.
//!
//! Every presentation identifies an element with the set of atoms below it.
//! Atoms are pairs `(key, position)`; what a key means depends on the
//! presentation:
//!
//! | presentation | keys |
//! |---|---|
//! | prime, finite BA, saturated BA | `0` only |
//! | columns | column index |
//! | characteristic `n` | `0..n` blocks, `n` the spare region |
//! | amorphous | `0` the amorphous column `u`, `c + 1` ordinary column `c` |

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::epset::EPSet;
use crate::error::{Error, Result};
use crate::sizesets::Card;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Presentation {
    Prime,
    Columns,
    Characteristic(u32),
    Amorphous,
    FiniteBA(u32),
    SaturatedBA,
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Presentation::Prime => f.write_str("prime"),
            Presentation::Columns => f.write_str("columns"),
            Presentation::Characteristic(n) => write!(f, "char{n}"),
            Presentation::Amorphous => f.write_str("amorphous"),
            Presentation::FiniteBA(n) => write!(f, "ba{n}"),
            Presentation::SaturatedBA => f.write_str("ba-sat"),
        }
    }
}

pub type Atom = (u32, u64);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelElement {
    presentation: Presentation,
    parts: BTreeMap<u32, EPSet>,
}

impl ModelElement {
    pub fn bottom(presentation: Presentation) -> ModelElement {
        ModelElement {
            presentation,
            parts: BTreeMap::new(),
        }
    }

    /// Builds an element from raw parts, checking the presentation's shape
    /// constraints.
    pub fn from_parts(
        presentation: Presentation,
        parts: impl IntoIterator<Item = (u32, EPSet)>,
    ) -> Result<ModelElement> {
        let mut map = BTreeMap::new();
        for (k, s) in parts {
            if !s.is_empty() {
                map.insert(k, s);
            }
        }
        let e = ModelElement {
            presentation,
            parts: map,
        };
        e.validate()?;
        Ok(e)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Descriptor(msg));
        for (&k, s) in &self.parts {
            match self.presentation {
                Presentation::Prime if k != 0 || !s.is_finite() => {
                    return bad("prime elements are finite sets of naturals".into())
                }
                Presentation::FiniteBA(n) => {
                    if k != 0 || !s.is_finite() || s.prefix().iter().any(|&a| a >= n as u64) {
                        return bad(format!("finite BA elements are subsets of 0..{n}"));
                    }
                }
                Presentation::SaturatedBA if k != 0 => {
                    return bad("saturated BA elements have a single part".into())
                }
                Presentation::Characteristic(n) => {
                    if k > n {
                        return bad(format!("block {k} out of range for characteristic {n}"));
                    }
                    if k < n && s.period() != 1 {
                        return bad(format!("block {k} slice must be finite or cofinite"));
                    }
                    if k == n && !s.is_finite() {
                        return bad("the spare part must be finite".into());
                    }
                }
                Presentation::Amorphous if k == 0 && s.period() != 1 => {
                    return bad("the amorphous slice must be finite or cofinite".into())
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn presentation(&self) -> Presentation {
        self.presentation
    }

    pub fn parts(&self) -> &BTreeMap<u32, EPSet> {
        &self.parts
    }

    pub fn part(&self, key: u32) -> Option<&EPSet> {
        self.parts.get(&key)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn size(&self) -> Card {
        self.parts
            .values()
            .fold(Card::Fin(0), |acc, s| acc + s.size())
    }

    pub fn is_infinite(&self) -> bool {
        self.parts.values().any(|s| !s.is_finite())
    }

    pub fn contains_atom(&self, (k, n): Atom) -> bool {
        self.parts.get(&k).is_some_and(|s| s.contains(n))
    }

    pub(crate) fn check_same(&self, other: &ModelElement) -> Result<()> {
        if self.presentation != other.presentation {
            return Err(Error::PresentationMismatch {
                expected: self.presentation.to_string(),
                found: other.presentation.to_string(),
            });
        }
        Ok(())
    }

    fn merge(&self, other: &ModelElement, op: impl Fn(Option<&EPSet>, Option<&EPSet>) -> Option<EPSet>) -> ModelElement {
        let mut parts = BTreeMap::new();
        let keys: std::collections::BTreeSet<u32> =
            self.parts.keys().chain(other.parts.keys()).copied().collect();
        for k in keys {
            if let Some(s) = op(self.parts.get(&k), other.parts.get(&k)) {
                if !s.is_empty() {
                    parts.insert(k, s);
                }
            }
        }
        ModelElement {
            presentation: self.presentation,
            parts,
        }
    }

    /// Unchecked union (caller guarantees matching presentations).
    pub(crate) fn join(&self, other: &ModelElement) -> ModelElement {
        self.merge(other, |a, b| match (a, b) {
            (Some(a), Some(b)) => Some(a.union(b)),
            (Some(s), None) | (None, Some(s)) => Some(s.clone()),
            (None, None) => None,
        })
    }

    pub(crate) fn meet(&self, other: &ModelElement) -> ModelElement {
        let mut parts = BTreeMap::new();
        for (k, a) in &self.parts {
            if let Some(b) = other.parts.get(k) {
                let s = a.intersection(b);
                if !s.is_empty() {
                    parts.insert(*k, s);
                }
            }
        }
        ModelElement {
            presentation: self.presentation,
            parts,
        }
    }

    pub(crate) fn minus(&self, other: &ModelElement) -> ModelElement {
        let mut parts = BTreeMap::new();
        for (k, a) in &self.parts {
            let s = match other.parts.get(k) {
                Some(b) => a.difference(b),
                None => a.clone(),
            };
            if !s.is_empty() {
                parts.insert(*k, s);
            }
        }
        ModelElement {
            presentation: self.presentation,
            parts,
        }
    }

    pub(crate) fn below(&self, other: &ModelElement) -> bool {
        self.parts.iter().all(|(k, a)| match other.parts.get(k) {
            Some(b) => a.is_subset(b),
            None => false,
        })
    }

    pub fn union(&self, other: &ModelElement) -> Result<ModelElement> {
        self.check_same(other)?;
        Ok(self.join(other))
    }

    pub fn intersection(&self, other: &ModelElement) -> Result<ModelElement> {
        self.check_same(other)?;
        Ok(self.meet(other))
    }

    pub fn difference(&self, other: &ModelElement) -> Result<ModelElement> {
        self.check_same(other)?;
        Ok(self.minus(other))
    }

    pub fn leq(&self, other: &ModelElement) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.below(other))
    }

    /// The `k` least atoms, key-major. `None` if there are fewer.
    pub fn first_atoms(&self, k: u64) -> Option<Vec<Atom>> {
        let mut out = Vec::new();
        for (&key, s) in &self.parts {
            if out.len() as u64 == k {
                break;
            }
            let need = k - out.len() as u64;
            out.extend(s.iter().take(need as usize).map(|n| (key, n)));
        }
        (out.len() as u64 == k).then_some(out)
    }

    pub(crate) fn from_atoms(presentation: Presentation, atoms: &[Atom]) -> ModelElement {
        let mut by_key: BTreeMap<u32, Vec<u64>> = BTreeMap::new();
        for &(k, n) in atoms {
            by_key.entry(k).or_default().push(n);
        }
        ModelElement {
            presentation,
            parts: by_key
                .into_iter()
                .map(|(k, v)| (k, EPSet::finite(v)))
                .filter(|(_, s)| !s.is_empty())
                .collect(),
        }
    }

    pub fn to_descriptor(&self) -> Descriptor {
        let part0 = || self.parts.get(&0).cloned().unwrap_or_else(EPSet::empty);
        match self.presentation {
            Presentation::Prime => Descriptor::Prime {
                atoms: part0().prefix().to_vec(),
            },
            Presentation::Columns => Descriptor::Columns {
                cols: self.parts.iter().map(|(k, s)| (k.to_string(), s.clone())).collect(),
            },
            Presentation::Characteristic(n) => Descriptor::Char {
                n,
                blocks: (0..n)
                    .map(|k| self.parts.get(&k).cloned().unwrap_or_else(EPSet::empty))
                    .collect(),
                spare: self
                    .parts
                    .get(&n)
                    .map(|s| s.prefix().to_vec())
                    .unwrap_or_default(),
            },
            Presentation::Amorphous => Descriptor::Amorphous {
                u: part0(),
                cols: self
                    .parts
                    .iter()
                    .filter(|(&k, _)| k > 0)
                    .map(|(&k, s)| ((k - 1).to_string(), s.clone()))
                    .collect(),
            },
            Presentation::FiniteBA(n) => Descriptor::Ba {
                n,
                atoms: part0().prefix().to_vec(),
            },
            Presentation::SaturatedBA => Descriptor::BaSat { set: part0() },
        }
    }

    pub fn from_descriptor(d: &Descriptor) -> Result<ModelElement> {
        match d {
            Descriptor::Prime { atoms } => {
                ModelElement::from_parts(Presentation::Prime, [(0, EPSet::finite(atoms.iter().copied()))])
            }
            Descriptor::Columns { cols } => {
                ModelElement::from_parts(Presentation::Columns, column_keys(cols, 0)?)
            }
            Descriptor::Char { n, blocks, spare } => {
                if blocks.len() != *n as usize {
                    return Err(Error::Descriptor(format!(
                        "characteristic {n} needs {n} block slices, got {}",
                        blocks.len()
                    )));
                }
                let parts = blocks
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, s)| (i as u32, s))
                    .chain([(*n, EPSet::finite(spare.iter().copied()))]);
                ModelElement::from_parts(Presentation::Characteristic(*n), parts)
            }
            Descriptor::Amorphous { u, cols } => {
                let parts = std::iter::once((0, u.clone())).chain(column_keys(cols, 1)?);
                ModelElement::from_parts(Presentation::Amorphous, parts)
            }
            Descriptor::Ba { n, atoms } => {
                if *n > 64 {
                    return Err(Error::Descriptor("finite BAs have at most 64 atoms".into()));
                }
                ModelElement::from_parts(
                    Presentation::FiniteBA(*n),
                    [(0, EPSet::finite(atoms.iter().copied()))],
                )
            }
            Descriptor::BaSat { set } => {
                ModelElement::from_parts(Presentation::SaturatedBA, [(0, set.clone())])
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_descriptor()).expect("descriptors serialize")
    }

    pub fn from_json(text: &str) -> Result<ModelElement> {
        let d: Descriptor =
            serde_json::from_str(text).map_err(|e| Error::Descriptor(e.to_string()))?;
        ModelElement::from_descriptor(&d)
    }
}

impl fmt::Display for ModelElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

fn column_keys(cols: &BTreeMap<String, EPSet>, shift: u32) -> Result<Vec<(u32, EPSet)>> {
    cols.iter()
        .map(|(k, s)| {
            let c: u32 = k
                .parse()
                .ok()
                .filter(|&c: &u32| c < u32::MAX - 1)
                .ok_or_else(|| Error::Descriptor(format!("bad column index `{k}`")))?;
            Ok((c + shift, s.clone()))
        })
        .collect()
}

/// Versioned wire schema of element descriptors.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "presentation", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Descriptor {
    Prime {
        atoms: Vec<u64>,
    },
    Columns {
        #[serde(default)]
        cols: BTreeMap<String, EPSet>,
    },
    Char {
        n: u32,
        blocks: Vec<EPSet>,
        #[serde(default)]
        spare: Vec<u64>,
    },
    Amorphous {
        u: EPSet,
        #[serde(default)]
        cols: BTreeMap<String, EPSet>,
    },
    Ba {
        n: u32,
        atoms: Vec<u64>,
    },
    BaSat {
        set: EPSet,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_round_trip() {
        let text = r#"{"presentation":"columns","cols":{"0":{"prefix":[1],"t":4,"p":2,"r":[0]}}}"#;
        let e = ModelElement::from_json(text).unwrap();
        assert_eq!(ModelElement::from_json(&e.to_json()).unwrap(), e);
        assert!(e.contains_atom((0, 1)) && e.contains_atom((0, 4)) && !e.contains_atom((0, 2)));
    }

    #[test]
    fn shape_constraints() {
        let bad_block = r#"{"presentation":"char","n":1,"blocks":[{"t":0,"p":2,"r":[0]}]}"#;
        assert!(ModelElement::from_json(bad_block).is_err());
        let bad_u = r#"{"presentation":"amorphous","u":{"t":0,"p":2,"r":[1]}}"#;
        assert!(ModelElement::from_json(bad_u).is_err());
        let bad_ba = r#"{"presentation":"ba","n":3,"atoms":[3]}"#;
        assert!(ModelElement::from_json(bad_ba).is_err());
    }

    #[test]
    fn mixing_presentations_fails() {
        let a = ModelElement::bottom(Presentation::Prime);
        let b = ModelElement::bottom(Presentation::Columns);
        assert!(matches!(a.union(&b), Err(Error::PresentationMismatch { .. })));
    }
}
