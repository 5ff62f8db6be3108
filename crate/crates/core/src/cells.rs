//! Venn-cell calculus.
//!
//! For an ordered parameter list `v₀..vₙ₋₁` a cell is a bitmask `σ`: bit `i`
//! set means the region lies inside `vᵢ`. Mask `0` is the exterior region.
//! A [`CellProfile`] assigns a [`SizeSet`] to every cell; a formula over the
//! parameters becomes a disjunction of profiles.

use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{Formula, Term, TheoryMode};
use crate::sizesets::{Card, SizeSet};

pub type Mask = usize;

/// Cells carrying at most this many parameters are supported.
pub const MAX_PARAMS: usize = 16;

/// Threshold above which the CLI warns about a large counting expansion.
pub const EXPANSION_WARNING: usize = 10_000;

/// One conjunction of per-cell size constraints. `cells[σ]` is the
/// constraint on cell `σ`; the vector always has `2^params.len()` entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellProfile {
    pub params: Vec<String>,
    pub cells: Vec<SizeSet>,
}

impl CellProfile {
    /// The profile that constrains nothing.
    pub fn unconstrained(params: &[String]) -> CellProfile {
        CellProfile {
            params: params.to_vec(),
            cells: vec![SizeSet::any(); 1 << params.len()],
        }
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn get(&self, cell: Mask) -> &SizeSet {
        &self.cells[cell]
    }

    pub fn constrain(&mut self, cell: Mask, s: &SizeSet) {
        self.cells[cell] = self.cells[cell].intersect(s);
    }

    /// Some cell has no admissible size.
    pub fn has_empty_cell(&self) -> bool {
        self.cells.iter().any(SizeSet::is_empty)
    }

    /// Whether a concrete vector of cell sizes satisfies every constraint.
    pub fn satisfied_by(&self, sizes: &[Card]) -> bool {
        debug_assert_eq!(sizes.len(), self.cells.len());
        self.cells.iter().zip(sizes).all(|(s, &c)| s.contains(c))
    }

    /// Diagnostic dump: one line per cell, exterior last.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for cell in (1..self.cells.len()).chain(std::iter::once(0)) {
            out.push_str(&format!(
                "{} : {}\n",
                cell_label(&self.params, cell),
                self.cells[cell]
            ));
        }
        out
    }
}

/// Cell-wise conjunction.
pub fn profile_and(p: &CellProfile, q: &CellProfile) -> CellProfile {
    assert_eq!(p.params, q.params, "profiles over different parameters");
    CellProfile {
        params: p.params.clone(),
        cells: p.cells.iter().zip(&q.cells).map(|(a, b)| a.intersect(b)).collect(),
    }
}

/// Human label of a cell, e.g. `{a,c}`; the exterior is `ext`.
pub fn cell_label(params: &[String], cell: Mask) -> String {
    if cell == 0 {
        return "ext".to_string();
    }
    let names: Vec<&str> = params
        .iter()
        .enumerate()
        .filter(|(i, _)| cell & (1 << i) != 0)
        .map(|(_, p)| p.as_str())
        .collect();
    format!("{{{}}}", names.join(","))
}

fn lookup_index(params: &[String], name: &str) -> Result<usize> {
    // The last occurrence wins so inner quantifiers shadow outer ones.
    params
        .iter()
        .rposition(|p| p == name)
        .ok_or_else(|| Error::UnknownVariable(name.to_string()))
}

fn check_vars(t: &Term, params: &[String]) -> Result<()> {
    match t {
        Term::Var(v) => lookup_index(params, v).map(|_| ()),
        Term::Empty | Term::Universe => Ok(()),
        Term::Union(a, b) | Term::Intersection(a, b) | Term::Difference(a, b) => {
            check_vars(a, params)?;
            check_vars(b, params)
        }
    }
}

fn term_holds(t: &Term, params: &[String], cell: Mask) -> bool {
    t.holds_at(&|v| {
        let i = params.iter().rposition(|p| p == v).expect("variables checked");
        cell & (1 << i) != 0
    })
}

/// The cells whose union is the denotation of `t`, ascending by mask. The
/// exterior appears only for terms containing the universe.
pub fn term_cells(t: &Term, params: &[String]) -> Result<Vec<Mask>> {
    if params.len() > MAX_PARAMS {
        return Err(Error::ResourceCap(format!(
            "{} parameters exceed the cell limit {MAX_PARAMS}",
            params.len()
        )));
    }
    check_vars(t, params)?;
    Ok((0..1usize << params.len())
        .filter(|&cell| term_holds(t, params, cell))
        .collect())
}

/// Number of profiles `|t| = k` expands into when `t` spans `cells` cells.
pub fn composition_count(k: u32, cells: usize) -> u128 {
    if cells == 0 {
        return u128::from(k == 0);
    }
    // C(k + cells - 1, cells - 1)
    let (n, r) = (k as u128 + cells as u128 - 1, cells as u128 - 1);
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn compositions(k: u32, parts: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if parts == 1 {
        cur.push(k);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for first in (0..=k).rev() {
        cur.push(first);
        compositions(k - first, parts - 1, cur, out);
        cur.pop();
    }
}

/// Translates an atomic formula into an equivalent disjunction of profiles.
pub fn atomic_to_profiles(f: &Formula, params: &[String]) -> Result<Vec<CellProfile>> {
    let mut base = CellProfile::unconstrained(params);
    match f {
        Formula::Subseteq(a, b) => {
            let (ca, cb) = (term_cells(a, params)?, term_cells(b, params)?);
            for cell in ca.iter().filter(|c| !cb.contains(c)) {
                base.constrain(*cell, &SizeSet::exactly(0));
            }
            Ok(vec![base])
        }
        Formula::Equal(a, b) => {
            let (ca, cb) = (term_cells(a, params)?, term_cells(b, params)?);
            for cell in ca.iter().filter(|c| !cb.contains(c)) {
                base.constrain(*cell, &SizeSet::exactly(0));
            }
            for cell in cb.iter().filter(|c| !ca.contains(c)) {
                base.constrain(*cell, &SizeSet::exactly(0));
            }
            Ok(vec![base])
        }
        Formula::CardEq(t, k) => {
            let cells = term_cells(t, params)?;
            if cells.is_empty() {
                return Ok(if *k == 0 { vec![base] } else { Vec::new() });
            }
            let mut splits = Vec::new();
            compositions(*k, cells.len(), &mut Vec::new(), &mut splits);
            Ok(splits
                .into_iter()
                .map(|parts| {
                    let mut p = base.clone();
                    for (cell, n) in cells.iter().zip(parts) {
                        p.cells[*cell] = SizeSet::exactly(n);
                    }
                    p
                })
                .collect())
        }
        _ => Err(Error::Invalid(format!("not an atomic formula: {f}"))),
    }
}

/// Whether a single profile is realized by some tuple in a model of the
/// theory. In set mode the exterior must admit `∞`; in class mode the total
/// number of atoms is infinite, so some cell must admit `∞`.
pub fn profile_satisfiable(p: &CellProfile, mode: TheoryMode) -> bool {
    if p.has_empty_cell() {
        return false;
    }
    match mode {
        TheoryMode::SetMereology => p.cells[0].contains_infinity(),
        TheoryMode::ClassMereology => p.cells.iter().any(SizeSet::contains_infinity),
    }
}

/// Exact cell sizes of a concrete tuple. `sizes[σ]` is the size of cell `σ`,
/// with `Card::Inf` marking an infinite cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellSizes {
    pub params: Vec<String>,
    pub sizes: Vec<Card>,
}

impl CellSizes {
    pub fn satisfies(&self, p: &CellProfile) -> bool {
        p.satisfied_by(&self.sizes)
    }

    pub fn dump(&self) -> String {
        let mut out = String::new();
        for cell in (1..self.sizes.len()).chain(std::iter::once(0)) {
            out.push_str(&format!(
                "{} : {}\n",
                cell_label(&self.params, cell),
                self.sizes[cell]
            ));
        }
        out
    }
}

impl fmt::Display for CellProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
