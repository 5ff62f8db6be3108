//! Realizing types: carving an element out of the Venn cells of parameters.

use super::element::{Atom, ModelElement};
use super::epset::EPSet;
use super::{ModelHandle, ModelKind};
use crate::cells::Mask;
use crate::error::{Error, Result};
use crate::sizesets::Card;

/// What a new element must take from one piece: sizes of the parts inside
/// and outside it, and optionally how many disjoint infinite elements each
/// part must hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Demand {
    pub inside: Card,
    pub outside: Card,
    pub inside_rank: Option<Card>,
    pub outside_rank: Option<Card>,
}

impl Demand {
    pub fn sizes(inside: Card, outside: Card) -> Demand {
        Demand {
            inside,
            outside,
            inside_rank: None,
            outside_rank: None,
        }
    }

    pub fn without_ranks(self) -> Demand {
        Demand::sizes(self.inside, self.outside)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Realization {
    Realized(ModelElement),
    /// The demand on this cell (mask over the parameters, 0 = exterior)
    /// cannot be met.
    Unrealizable { cell: Mask },
}

fn restrict(q: &ModelElement, keys: &[u32]) -> ModelElement {
    ModelElement::from_parts(
        q.presentation(),
        keys.iter().filter_map(|k| q.part(*k).map(|s| (*k, s.clone()))),
    )
    .expect("restriction keeps the shape")
}

/// Splits the infinite parts on `keys`: half of the keys if there are
/// several, otherwise the tail of the single one.
fn split_columns(q: &ModelElement, keys: &[u32]) -> Option<ModelElement> {
    match keys {
        [] => None,
        [k] => {
            let (first, _) = q.part(*k)?.split_tail()?;
            ModelElement::from_parts(q.presentation(), [(*k, first)]).ok()
        }
        _ => Some(restrict(q, &keys[..keys.len() / 2])),
    }
}

impl ModelHandle {
    fn infinite_keys(&self, q: &ModelElement) -> Vec<u32> {
        q.parts()
            .iter()
            .filter(|(_, s)| !s.is_finite())
            .map(|(&k, _)| k)
            .collect()
    }

    fn split_infinite(&self, q: &ModelElement, d: &Demand) -> Option<ModelElement> {
        let keys = self.infinite_keys(q);
        match self.kind {
            ModelKind::Prime | ModelKind::FiniteBA(_) => None,
            ModelKind::Columns | ModelKind::ColumnsPerm | ModelKind::SaturatedBA => {
                split_columns(q, &keys)
            }
            ModelKind::Characteristic(_) => {
                let m = keys.len() as u64;
                let i = match (d.inside_rank, d.outside_rank) {
                    (Some(Card::Fin(i)), _) => i,
                    (_, Some(Card::Fin(j))) if j <= m => m - j,
                    _ => 1,
                };
                (1..m).contains(&i).then(|| restrict(q, &keys[..i as usize]))
            }
            ModelKind::Amorphous => {
                let ordinary: Vec<u32> = keys.iter().copied().filter(|&k| k > 0).collect();
                let has_u = keys.first() == Some(&0);
                if ordinary.is_empty() {
                    return None;
                }
                if d.inside_rank == Some(Card::Fin(1)) && has_u {
                    Some(restrict(q, &[0]))
                } else if d.outside_rank == Some(Card::Fin(1)) && has_u {
                    let rest: Vec<u32> = q.parts().keys().copied().filter(|&k| k > 0).collect();
                    Some(restrict(q, &rest))
                } else {
                    split_columns(q, &ordinary)
                }
            }
        }
    }

    fn meets(&self, y: &ModelElement, size: Card, rank: Option<Card>) -> bool {
        y.size() == size && rank.is_none_or(|r| self.rank(y) == r)
    }

    /// A sub-element `y ≤ q` with `q ∧ y` and `q − y` as demanded.
    pub fn split_piece(&self, q: &ModelElement, d: &Demand) -> Option<ModelElement> {
        let y = match (d.inside, d.outside) {
            (Card::Fin(k), _) => ModelElement::from_atoms(q.presentation(), &q.first_atoms(k)?),
            (Card::Inf, Card::Fin(r)) => {
                q.minus(&ModelElement::from_atoms(q.presentation(), &q.first_atoms(r)?))
            }
            (Card::Inf, Card::Inf) => self.split_infinite(q, d)?,
        };
        let rest = q.minus(&y);
        (self.meets(&y, d.inside, d.inside_rank) && self.meets(&rest, d.outside, d.outside_rank))
            .then_some(y)
    }

    fn fresh_atoms(&self, union: &ModelElement, k: u64) -> Vec<Atom> {
        let keys: Box<dyn Iterator<Item = u32>> = match self.kind {
            ModelKind::Characteristic(n) => Box::new(std::iter::once(n)),
            ModelKind::Amorphous => Box::new(1..),
            _ => Box::new(0..),
        };
        let mut out = Vec::new();
        for key in keys {
            if out.len() as u64 == k {
                break;
            }
            let free = match union.part(key) {
                Some(s) => s.complement(),
                None => EPSet::full(),
            };
            let need = (k - out.len() as u64) as usize;
            out.extend(free.iter().take(need).map(|n| (key, n)));
        }
        out
    }

    fn next_free_key(union: &ModelElement, least: u32) -> u32 {
        union
            .parts()
            .keys()
            .next_back()
            .map_or(least, |&k| (k + 1).max(least))
    }

    /// In set mode: an element disjoint from `union` of the given size (and
    /// rank, if asked).
    pub fn fresh_part(&self, union: &ModelElement, size: Card, rank: Option<Card>) -> Option<ModelElement> {
        if self.top().is_some() {
            return None;
        }
        let pres = self.presentation();
        let y = match size {
            Card::Fin(k) => ModelElement::from_atoms(pres, &self.fresh_atoms(union, k)),
            Card::Inf => match self.kind {
                ModelKind::Prime | ModelKind::FiniteBA(_) | ModelKind::SaturatedBA => return None,
                ModelKind::Columns | ModelKind::ColumnsPerm => {
                    ModelElement::from_parts(pres, [(Self::next_free_key(union, 0), EPSet::full())]).ok()?
                }
                ModelKind::Characteristic(n) => {
                    let want = match rank {
                        Some(Card::Fin(r)) => r as usize,
                        Some(Card::Inf) => return None,
                        None => 1,
                    };
                    let free: Vec<u32> = (0..n)
                        .filter(|&k| union.part(k).is_none_or(|s| s.is_finite()))
                        .take(want)
                        .collect();
                    if free.len() < want {
                        return None;
                    }
                    let parts = free.into_iter().map(|k| {
                        let used = union.part(k).cloned().unwrap_or_else(EPSet::empty);
                        (k, EPSet::full().difference(&used))
                    });
                    ModelElement::from_parts(pres, parts).ok()?
                }
                ModelKind::Amorphous => {
                    if rank == Some(Card::Fin(1)) {
                        let used = union.part(0).cloned().unwrap_or_else(EPSet::empty);
                        if !used.is_finite() {
                            return None;
                        }
                        ModelElement::from_parts(pres, [(0, EPSet::full().difference(&used))]).ok()?
                    } else {
                        ModelElement::from_parts(pres, [(Self::next_free_key(union, 1), EPSet::full())]).ok()?
                    }
                }
            },
        };
        (y.meet(union).is_empty() && self.meets(&y, size, rank)).then_some(y)
    }

    /// An infinite element disjoint from `a`, if the model has one.
    pub fn fresh_disjoint_infinite(&self, a: &ModelElement) -> Result<Option<ModelElement>> {
        self.check(a)?;
        if let Some(top) = self.top() {
            let rest = top.minus(a);
            return Ok(rest.is_infinite().then_some(rest));
        }
        Ok(self.fresh_part(a, Card::Inf, None))
    }

    /// The Venn pieces of `params`, indexed by mask (entry 0 is the
    /// complement of their union in class mode, `None` in set mode).
    pub fn pieces(&self, params: &[ModelElement]) -> Vec<Option<ModelElement>> {
        (0..1 << params.len()).map(|m| self.pieces_at(params, m)).collect()
    }

    /// Builds `x` whose cell sizes against `params` are the given split:
    /// `split[σ] = (|cell σ ∧ x|, |cell σ − x|)`; in set mode only the first
    /// component of the exterior entry is used.
    pub fn realize_type(&self, params: &[ModelElement], split: &[(Card, Card)]) -> Result<Realization> {
        for e in params {
            self.check(e)?;
        }
        if split.len() != 1 << params.len() {
            return Err(Error::MalformedSplit(format!(
                "expected {} cell entries, got {}",
                1usize << params.len(),
                split.len()
            )));
        }
        let pres = self.presentation();
        let union = params.iter().fold(ModelElement::bottom(pres), |acc, a| acc.join(a));
        let mut x = ModelElement::bottom(pres);
        let order = (1..split.len()).chain(std::iter::once(0));
        for (mask, piece) in order.map(|m| (m, self.pieces_at(params, m))) {
            let (inside, outside) = split[mask];
            let part = match piece {
                Some(q) => {
                    if q.size() != inside + outside {
                        return Ok(Realization::Unrealizable { cell: mask });
                    }
                    self.split_piece(&q, &Demand::sizes(inside, outside))
                }
                None => self.fresh_part(&union, inside, None),
            };
            match part {
                Some(y) => x = x.join(&y),
                None => return Ok(Realization::Unrealizable { cell: mask }),
            }
        }
        let mut tuple = params.to_vec();
        tuple.push(x.clone());
        let sizes = self.cell_sizes(&tuple)?;
        let half = 1 << params.len();
        let agrees = (0..half).all(|m| {
            let (i, o) = split[m];
            sizes[m | half] == i && (m == 0 && self.top().is_none() || sizes[m] == o)
        });
        if !agrees {
            return Err(Error::Invalid("realized element does not match the split".into()));
        }
        Ok(Realization::Realized(x))
    }

    fn pieces_at(&self, params: &[ModelElement], mask: Mask) -> Option<ModelElement> {
        let mut p = if mask == 0 {
            self.top()?
        } else {
            params[mask.trailing_zeros() as usize].clone()
        };
        for (i, a) in params.iter().enumerate() {
            p = if mask >> i & 1 == 1 { p.meet(a) } else { p.minus(a) };
        }
        Some(p)
    }
}
