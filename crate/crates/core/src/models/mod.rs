//! Computable countable models, all presented as relative fields of sets.
//!
//! | id | model | mode |
//! |---|---|---|
//! | `prime` | finite subsets of ℕ (the prime model) | set |
//! | `columns` | finite-support maps column → eventually periodic set (saturated) | set |
//! | `columns-perm` | `columns` seen through a column/position involution | set |
//! | `char<N>` | `N` finite-or-cofinite blocks plus a finite spare part | set |
//! | `amorphous` | ordinary columns plus one finite-or-cofinite column `u` | set |
//! | `ba<N>` | powerset of `0..N` | class |
//! | `ba-sat` | eventually periodic subsets of ℕ (saturated) | class |

pub mod element;
mod enumerate;
pub mod epset;
pub mod pairing;
mod realize;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

pub use element::{Atom, Descriptor, ModelElement, Presentation};
pub use enumerate::{catalog_epset, catalog_index};
pub use epset::EPSet;
pub use realize::{Demand, Realization};

use crate::cells::{CellSizes, Mask};
use crate::error::{Error, Result};
use crate::formula::{Formula, TheoryMode};
use crate::qe;
use crate::sizesets::Card;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Prime,
    Columns,
    ColumnsPerm,
    Characteristic(u32),
    Amorphous,
    FiniteBA(u32),
    SaturatedBA,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelHandle {
    pub kind: ModelKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeOp {
    Union,
    Intersection,
    Difference,
}

impl ModelHandle {
    pub const PRIME: ModelHandle = ModelHandle { kind: ModelKind::Prime };
    pub const COLUMNS: ModelHandle = ModelHandle { kind: ModelKind::Columns };
    pub const COLUMNS_PERM: ModelHandle = ModelHandle { kind: ModelKind::ColumnsPerm };
    pub const AMORPHOUS: ModelHandle = ModelHandle { kind: ModelKind::Amorphous };
    pub const SATURATED_BA: ModelHandle = ModelHandle { kind: ModelKind::SaturatedBA };

    pub fn characteristic(n: u32) -> ModelHandle {
        ModelHandle {
            kind: ModelKind::Characteristic(n),
        }
    }

    pub fn finite_ba(n: u32) -> ModelHandle {
        ModelHandle {
            kind: ModelKind::FiniteBA(n),
        }
    }

    pub fn id(&self) -> String {
        match self.kind {
            ModelKind::Prime => "prime".into(),
            ModelKind::Columns => "columns".into(),
            ModelKind::ColumnsPerm => "columns-perm".into(),
            ModelKind::Characteristic(n) => format!("char{n}"),
            ModelKind::Amorphous => "amorphous".into(),
            ModelKind::FiniteBA(n) => format!("ba{n}"),
            ModelKind::SaturatedBA => "ba-sat".into(),
        }
    }

    pub fn presentation(&self) -> Presentation {
        match self.kind {
            ModelKind::Prime => Presentation::Prime,
            ModelKind::Columns | ModelKind::ColumnsPerm => Presentation::Columns,
            ModelKind::Characteristic(n) => Presentation::Characteristic(n),
            ModelKind::Amorphous => Presentation::Amorphous,
            ModelKind::FiniteBA(n) => Presentation::FiniteBA(n),
            ModelKind::SaturatedBA => Presentation::SaturatedBA,
        }
    }

    pub fn mode(&self) -> TheoryMode {
        match self.kind {
            ModelKind::FiniteBA(_) | ModelKind::SaturatedBA => TheoryMode::ClassMereology,
            _ => TheoryMode::SetMereology,
        }
    }

    pub fn bottom(&self) -> ModelElement {
        ModelElement::bottom(self.presentation())
    }

    /// The universe, in class mode.
    pub fn top(&self) -> Option<ModelElement> {
        let set = match self.kind {
            ModelKind::FiniteBA(n) => EPSet::finite(0..n as u64),
            ModelKind::SaturatedBA => EPSet::full(),
            _ => return None,
        };
        Some(ModelElement::from_parts(self.presentation(), [(0, set)]).expect("top is well formed"))
    }

    pub fn check(&self, e: &ModelElement) -> Result<()> {
        if e.presentation() != self.presentation() {
            return Err(Error::PresentationMismatch {
                expected: self.presentation().to_string(),
                found: e.presentation().to_string(),
            });
        }
        Ok(())
    }

    pub fn element_from_json(&self, text: &str) -> Result<ModelElement> {
        let e = ModelElement::from_json(text)?;
        self.check(&e)?;
        Ok(e)
    }

    pub fn lattice_op(&self, op: LatticeOp, a: &ModelElement, b: &ModelElement) -> Result<ModelElement> {
        self.check(a)?;
        self.check(b)?;
        Ok(match op {
            LatticeOp::Union => a.join(b),
            LatticeOp::Intersection => a.meet(b),
            LatticeOp::Difference => a.minus(b),
        })
    }

    pub fn leq(&self, a: &ModelElement, b: &ModelElement) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        Ok(a.below(b))
    }

    pub fn is_infinite(&self, a: &ModelElement) -> Result<bool> {
        self.check(a)?;
        Ok(a.is_infinite())
    }

    /// Up to `k` atoms below `a`, least first.
    pub fn atoms_below(&self, a: &ModelElement, k: u64) -> Result<Vec<ModelElement>> {
        self.check(a)?;
        let atoms: Vec<Atom> = match a.size() {
            Card::Fin(n) if n < k => a.first_atoms(n).expect("size is exact"),
            _ => a.first_atoms(k).expect("enough atoms"),
        };
        Ok(atoms
            .into_iter()
            .map(|at| ModelElement::from_atoms(self.presentation(), &[at]))
            .collect())
    }

    /// Largest number of pairwise disjoint infinite elements below `a`.
    pub fn rank(&self, a: &ModelElement) -> Card {
        let inf = |k: u32| a.part(k).is_some_and(|s| !s.is_finite());
        match self.kind {
            ModelKind::Prime | ModelKind::FiniteBA(_) => Card::Fin(0),
            ModelKind::Columns | ModelKind::ColumnsPerm | ModelKind::SaturatedBA => {
                if a.is_infinite() {
                    Card::Inf
                } else {
                    Card::Fin(0)
                }
            }
            ModelKind::Characteristic(n) => Card::Fin((0..n).filter(|&k| inf(k)).count() as u64),
            ModelKind::Amorphous => {
                if a.parts().iter().any(|(&k, s)| k > 0 && !s.is_finite()) {
                    Card::Inf
                } else if inf(0) {
                    Card::Fin(1)
                } else {
                    Card::Fin(0)
                }
            }
        }
    }

    /// Exact size of every Venn cell of `tuple`, exterior included (always
    /// infinite in set mode).
    pub fn cell_sizes(&self, tuple: &[ModelElement]) -> Result<Vec<Card>> {
        for e in tuple {
            self.check(e)?;
        }
        match self.top() {
            None => {
                let mut sizes = raw_cell_sizes(tuple);
                sizes[0] = Card::Inf;
                Ok(sizes)
            }
            Some(top) => {
                let mut ext = tuple.to_vec();
                ext.push(top);
                let raw = raw_cell_sizes(&ext);
                let bit = 1 << tuple.len();
                Ok((0..bit).map(|m| raw[m | bit]).collect())
            }
        }
    }

    /// [`ModelHandle::cell_sizes`] labelled with parameter names.
    pub fn named_cell_sizes(&self, names: &[String], tuple: &[ModelElement]) -> Result<CellSizes> {
        Ok(CellSizes {
            params: names.to_vec(),
            sizes: self.cell_sizes(tuple)?,
        })
    }

    /// Truth of `f` under `assignment`, via its quantifier-free normal form.
    pub fn eval(&self, f: &Formula, assignment: &BTreeMap<String, ModelElement>) -> Result<bool> {
        let params = f.free_variables();
        let tuple = params
            .iter()
            .map(|v| {
                assignment
                    .get(v)
                    .cloned()
                    .ok_or_else(|| Error::UnboundVariable(v.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let dnf = qe::normal_form_over(f, &params, self.mode())?;
        let sizes = self.named_cell_sizes(&params, &tuple)?;
        Ok(dnf.satisfied_by(&sizes))
    }

    pub fn enumerate(&self, i: u64) -> ModelElement {
        enumerate::enumerate(self, i)
    }

    /// Inverse of [`ModelHandle::enumerate`], when the descriptor is coded.
    pub fn index_of(&self, e: &ModelElement) -> Option<u64> {
        enumerate::index_of(self, e)
    }
}

/// Sizes of the cells `σ ≠ 0` of the atoms covered by `tuple`; entry 0 is the
/// (finite) count of nothing and is meaningless.
fn raw_cell_sizes(tuple: &[ModelElement]) -> Vec<Card> {
    let n = tuple.len();
    let mut counts = vec![0u64; 1 << n];
    let mut infinite = vec![false; 1 << n];
    let mut keys: Vec<u32> = tuple.iter().flat_map(|e| e.parts().keys().copied()).collect();
    keys.sort_unstable();
    keys.dedup();
    for key in keys {
        let slices: Vec<Option<&EPSet>> = tuple.iter().map(|e| e.part(key)).collect();
        let mask_at = |pos: u64| -> Mask {
            slices
                .iter()
                .enumerate()
                .filter(|(_, s)| s.is_some_and(|s| s.contains(pos)))
                .fold(0, |m, (i, _)| m | 1 << i)
        };
        if slices.iter().flatten().all(|s| s.is_finite()) {
            let mut members: Vec<u64> = slices.iter().flatten().flat_map(|s| s.prefix().iter().copied()).collect();
            members.sort_unstable();
            members.dedup();
            for pos in members {
                counts[mask_at(pos)] += 1;
            }
            continue;
        }
        let t = slices.iter().flatten().map(|s| s.threshold()).max().unwrap_or(0);
        let p = slices.iter().flatten().fold(1u64, |acc, s| acc.lcm(&s.period()));
        for pos in 0..t {
            counts[mask_at(pos)] += 1;
        }
        for pos in t..t + p {
            infinite[mask_at(pos)] = true;
        }
    }
    counts
        .into_iter()
        .zip(infinite)
        .map(|(c, inf)| if inf { Card::Inf } else { Card::Fin(c) })
        .collect()
}

impl FromStr for ModelHandle {
    type Err = Error;

    fn from_str(s: &str) -> Result<ModelHandle> {
        let kind = match s {
            "prime" => ModelKind::Prime,
            "columns" => ModelKind::Columns,
            "columns-perm" => ModelKind::ColumnsPerm,
            "amorphous" => ModelKind::Amorphous,
            "ba-sat" => ModelKind::SaturatedBA,
            _ => {
                let num = |rest: &str| rest.parse::<u32>().ok();
                if let Some(n) = s.strip_prefix("char").and_then(num).filter(|&n| n >= 1) {
                    ModelKind::Characteristic(n)
                } else if let Some(n) = s.strip_prefix("ba").and_then(num).filter(|&n| n <= 64) {
                    ModelKind::FiniteBA(n)
                } else {
                    return Err(Error::UnknownModel(s.to_string()));
                }
            }
        };
        Ok(ModelHandle { kind })
    }
}

impl fmt::Display for ModelHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}
