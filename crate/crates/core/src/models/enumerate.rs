//! Deterministic bijective codings of element descriptors by naturals.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::element::ModelElement;
use super::epset::EPSet;
use super::pairing::{bits, checked_pair, decode_seq, encode_seq, from_bits, unpair};
use super::{ModelHandle, ModelKind};

/// Canonical eventually periodic sets graded by `t + p`, then ordered by
/// `(t, prefix code, residue code)`.
struct Catalog {
    sets: Vec<EPSet>,
    index: HashMap<EPSet, u64>,
    weight_done: u64,
}

impl Catalog {
    fn grow(&mut self) {
        let w = self.weight_done + 1;
        for t in 0..w {
            let p = w - t;
            if t > 62 || p > 62 {
                continue;
            }
            for prefix_code in 0u64..1 << t {
                for res_code in 0u64..1 << p {
                    let prefix = bits(prefix_code);
                    let res = bits(res_code);
                    let s = EPSet::from_parts(&prefix, t, p, &res).expect("codes are in range");
                    if s.threshold() == t && s.period() == p {
                        self.index.insert(s.clone(), self.sets.len() as u64);
                        self.sets.push(s);
                    }
                }
            }
        }
        self.weight_done = w;
    }
}

fn catalog() -> &'static Mutex<Catalog> {
    static CATALOG: OnceLock<Mutex<Catalog>> = OnceLock::new();
    CATALOG.get_or_init(|| {
        Mutex::new(Catalog {
            sets: Vec::new(),
            index: HashMap::new(),
            weight_done: 0,
        })
    })
}

/// Largest `t + p` the catalog will materialize for index lookups.
const MAX_LOOKUP_WEIGHT: u64 = 20;

/// The `k`-th canonical eventually periodic set (`0` is the empty set).
pub fn catalog_epset(k: u64) -> EPSet {
    let mut cat = catalog().lock().expect("catalog lock");
    while cat.sets.len() as u64 <= k {
        cat.grow();
    }
    cat.sets[k as usize].clone()
}

/// Position of `s` in the catalog, for sets of small weight.
pub fn catalog_index(s: &EPSet) -> Option<u64> {
    let w = s.threshold() + s.period();
    if w > MAX_LOOKUP_WEIGHT {
        return None;
    }
    let mut cat = catalog().lock().expect("catalog lock");
    while cat.weight_done < w {
        cat.grow();
    }
    cat.index.get(s).copied()
}

/// Finite-or-cofinite slice: bit 0 says cofinite, the rest list exceptions.
fn fincof(code: u64) -> EPSet {
    let exceptions = bits(code >> 1);
    if code & 1 == 1 {
        EPSet::cofinite(exceptions)
    } else {
        EPSet::finite(exceptions)
    }
}

fn fincof_code(s: &EPSet) -> Option<u64> {
    if s.period() != 1 {
        return None;
    }
    let (flag, exceptions) = if s.is_finite() {
        (0, s.prefix().to_vec())
    } else {
        (1, s.complement().prefix().to_vec())
    };
    let code = from_bits(&exceptions)?;
    (code < 1 << 63).then_some(code << 1 | flag)
}

fn columns(i: u64) -> Vec<(u32, EPSet)> {
    let mut out = Vec::new();
    let mut next = 0u64;
    for h in decode_seq(i) {
        let (gap, e) = unpair(h);
        let col = next + gap;
        out.push((col as u32, catalog_epset(e + 1)));
        next = col + 1;
    }
    out
}

fn columns_index(parts: impl Iterator<Item = (u32, EPSet)>) -> Option<u64> {
    let mut items = Vec::new();
    let mut next = 0u64;
    for (col, s) in parts {
        let e = catalog_index(&s)?.checked_sub(1)?;
        items.push(checked_pair(col as u64 - next, e)?);
        next = col as u64 + 1;
    }
    encode_seq(&items)
}

fn permute(e: &ModelElement) -> ModelElement {
    ModelElement::from_parts(
        e.presentation(),
        e.parts().iter().map(|(&c, s)| (c ^ 1, s.swap_pairs())),
    )
    .expect("the involution preserves shape")
}

pub(super) fn enumerate(m: &ModelHandle, i: u64) -> ModelElement {
    let pres = m.presentation();
    let build = |parts: Vec<(u32, EPSet)>| {
        ModelElement::from_parts(pres, parts).expect("enumerated descriptors are well formed")
    };
    match m.kind {
        ModelKind::Prime => build(vec![(0, EPSet::finite(bits(i)))]),
        ModelKind::Columns => build(columns(i)),
        ModelKind::ColumnsPerm => permute(&build(columns(i))),
        ModelKind::Characteristic(n) => {
            let mut rest = i;
            let mut parts = Vec::new();
            for k in 0..n {
                let (code, r) = unpair(rest);
                parts.push((k, fincof(code)));
                rest = r;
            }
            parts.push((n, EPSet::finite(bits(rest))));
            build(parts)
        }
        ModelKind::Amorphous => {
            let (u, rest) = unpair(i);
            let mut parts = vec![(0, fincof(u))];
            parts.extend(columns(rest).into_iter().map(|(c, s)| (c + 1, s)));
            build(parts)
        }
        ModelKind::FiniteBA(n) => {
            let code = if n >= 64 { i } else { i & ((1u64 << n) - 1) };
            build(vec![(0, EPSet::finite(bits(code)))])
        }
        ModelKind::SaturatedBA => build(vec![(0, catalog_epset(i))]),
    }
}

pub(super) fn index_of(m: &ModelHandle, e: &ModelElement) -> Option<u64> {
    if e.presentation() != m.presentation() {
        return None;
    }
    let part = |k: u32| e.part(k).cloned().unwrap_or_else(EPSet::empty);
    match m.kind {
        ModelKind::Prime | ModelKind::FiniteBA(_) => from_bits(part(0).prefix()),
        ModelKind::Columns => columns_index(e.parts().iter().map(|(&c, s)| (c, s.clone()))),
        ModelKind::ColumnsPerm => {
            columns_index(permute(e).parts().iter().map(|(&c, s)| (c, s.clone())))
        }
        ModelKind::Characteristic(n) => {
            let mut acc = from_bits(part(n).prefix())?;
            for k in (0..n).rev() {
                let code = fincof_code(&part(k))?;
                acc = checked_pair(code, acc)?;
            }
            Some(acc)
        }
        ModelKind::Amorphous => {
            let u = fincof_code(&part(0))?;
            let cols = columns_index(
                e.parts()
                    .iter()
                    .filter(|(&k, _)| k > 0)
                    .map(|(&k, s)| (k - 1, s.clone())),
            )?;
            checked_pair(u, cols)
        }
        ModelKind::SaturatedBA => catalog_index(&part(0)),
    }
}

