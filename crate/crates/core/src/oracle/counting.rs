//! Evaluation in finite structures up to symmetry.
//!
//! A structure is a finite set of units, each either a single atom or an
//! infinite block; an element is a set of units, its size the number of its
//! atoms or ∞ if it holds a block. Given values for the variables, units
//! with the same membership pattern and kind are interchangeable, so the
//! state is a count of atoms and blocks per pattern and a quantifier ranges
//! over ways of taking some of each. Variables no longer free are projected
//! away.
//!
//! For a formula of quantifier rank `q` whose counting constants are at most
//! `K`, the truth value only depends on every atom count capped at
//! `θ_q = (K + 1) · 2^q` and every block count capped at `β_q`, where
//! `β_0 = 1` and `β_q = 2 · max(⌈β_{q-1} / g⌉, ⌈θ_{q-1} / f⌉)` when each
//! refinement turns a block into at least `f` atoms and `g` blocks. A
//! quantifier enumerates one representative per capped profile; an
//! innermost one searches with three-valued pruning instead.
//!
//! Bounded set-mode structures form a chain of rungs: a block of one rung is
//! refined into `f` atoms and `g` blocks at the next, and new columns add
//! atoms and blocks outside every element. Each quantifier ranges over the
//! rung after that of its context.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::{Formula, Term};

/// Atom and block counts per membership pattern.
pub(crate) type State = Vec<[u64; 2]>;

/// Largest number of representatives a single quantifier may enumerate.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// Most variables in scope at once.
pub(crate) const MAX_VARS: usize = 6;

/// How the structure grows when a quantifier opens a new scope.
pub(crate) trait Growth {
    /// Refines `state` from level `level` to `level + 1`.
    fn refine(&self, state: &State, level: usize) -> Result<State>;

    /// Lower bounds `(f, g)` on the atoms and blocks a block becomes at
    /// any refinement.
    fn factors(&self) -> (u64, u64);
}

/// A single finite structure: quantifiers do not refine.
pub(crate) struct Fixed;

impl Growth for Fixed {
    fn refine(&self, state: &State, _level: usize) -> Result<State> {
        Ok(state.clone())
    }

    fn factors(&self) -> (u64, u64) {
        (0, 1)
    }
}

/// Caps `[θ_q, β_q]` on atom and block counts for `f`.
pub(crate) fn caps(f: &Formula, (atoms, blocks): (u64, u64)) -> [u64; 2] {
    let k = f.max_constant() as u64 + 1;
    let mut cap = [k, 1];
    for _ in 0..f.quantifier_rank() {
        let from_atoms = if atoms == 0 { 0 } else { cap[0].div_ceil(atoms) };
        let from_blocks = cap[1].div_ceil(blocks.max(1));
        cap = [cap[0].saturating_mul(2), from_atoms.max(from_blocks).max(1).saturating_mul(2)];
    }
    cap
}

/// One count per profile `(min(a, cap), min(n - a, cap))`.
fn representatives(n: u64, cap: u64) -> Vec<u64> {
    if n <= 2 * cap {
        (0..=n).collect()
    } else {
        (0..=cap).chain(n - cap + 1..=n).collect()
    }
}

fn pattern_mask(t: &Term, vars: &[String]) -> Result<u64> {
    if let Some(v) = first_unbound(t, vars) {
        return Err(Error::UnboundVariable(v));
    }
    let mut mask = 0u64;
    for p in 0..1u64 << vars.len() {
        let lookup = |name: &str| {
            let i = vars.iter().rposition(|v| v == name).expect("checked above");
            p >> i & 1 == 1
        };
        if t.holds_at(&lookup) {
            mask |= 1 << p;
        }
    }
    Ok(mask)
}

fn first_unbound(t: &Term, vars: &[String]) -> Option<String> {
    match t {
        Term::Var(v) => (!vars.contains(v)).then(|| v.clone()),
        Term::Empty | Term::Universe => None,
        Term::Union(a, b) | Term::Intersection(a, b) | Term::Difference(a, b) => {
            first_unbound(a, vars).or_else(|| first_unbound(b, vars))
        }
    }
}

/// A formula with its pattern masks and projections worked out for the
/// variables in scope.
enum Node {
    /// No unit lies in the patterns of the mask.
    Empty(u64),
    /// The patterns of the mask hold no block and exactly `n` atoms.
    Card(u64, u64),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Quant(Box<Quant>),
}

struct Quant {
    id: usize,
    exists: bool,
    /// Positions of the scope variables still free here.
    keep: Vec<usize>,
    uses_var: bool,
    cap: [u64; 2],
    body_cap: [u64; 2],
    quantifier_free: bool,
    body: Node,
}

struct Compiler {
    factors: (u64, u64),
    next_id: usize,
}

impl Compiler {
    fn pair(&mut self, a: &Formula, b: &Formula, vars: &[String]) -> Result<(Box<Node>, Box<Node>)> {
        Ok((Box::new(self.compile(a, vars)?), Box::new(self.compile(b, vars)?)))
    }

    fn compile(&mut self, f: &Formula, vars: &[String]) -> Result<Node> {
        Ok(match f {
            Formula::Subseteq(a, b) => Node::Empty(pattern_mask(a, vars)? & !pattern_mask(b, vars)?),
            Formula::Equal(a, b) => Node::Empty(pattern_mask(a, vars)? ^ pattern_mask(b, vars)?),
            Formula::CardEq(t, n) => Node::Card(pattern_mask(t, vars)?, *n as u64),
            Formula::Not(a) => Node::Not(Box::new(self.compile(a, vars)?)),
            Formula::And(a, b) => {
                let (a, b) = self.pair(a, b, vars)?;
                Node::And(a, b)
            }
            Formula::Or(a, b) => {
                let (a, b) = self.pair(a, b, vars)?;
                Node::Or(a, b)
            }
            Formula::Implies(a, b) => {
                let (a, b) = self.pair(a, b, vars)?;
                Node::Or(Box::new(Node::Not(a)), b)
            }
            Formula::Iff(a, b) => {
                let (a, b) = self.pair(a, b, vars)?;
                Node::Iff(a, b)
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let free = f.free_variables();
                if let Some(v) = free.iter().find(|v| !vars.contains(v)) {
                    return Err(Error::UnboundVariable(v.clone()));
                }
                let keep: Vec<usize> = (0..vars.len())
                    .filter(|&i| {
                        free.contains(&vars[i]) && vars.iter().rposition(|v| *v == vars[i]) == Some(i)
                    })
                    .collect();
                if keep.len() >= MAX_VARS {
                    return Err(Error::ResourceCap(format!("more than {MAX_VARS} variables in scope")));
                }
                let mut inner: Vec<String> = keep.iter().map(|&i| vars[i].clone()).collect();
                inner.push(x.clone());
                let id = self.next_id;
                self.next_id += 1;
                Node::Quant(Box::new(Quant {
                    id,
                    exists: matches!(f, Formula::Exists(..)),
                    keep,
                    uses_var: body.free_variables().contains(x),
                    cap: caps(f, self.factors),
                    body_cap: caps(body, self.factors),
                    quantifier_free: body.is_quantifier_free(),
                    body: self.compile(body, &inner)?,
                }))
            }
        })
    }
}

fn units_in(state: &State, mask: u64) -> [u64; 2] {
    let mut total = [0u64; 2];
    for (p, c) in state.iter().enumerate() {
        if mask >> p & 1 == 1 {
            total[0] += c[0];
            total[1] += c[1];
        }
    }
    total
}

fn project(state: &State, keep: &[usize]) -> State {
    if 1 << keep.len() == state.len() {
        return state.clone();
    }
    let mut out: State = vec![[0, 0]; 1 << keep.len()];
    for (p, c) in state.iter().enumerate() {
        let q = keep
            .iter()
            .enumerate()
            .fold(0usize, |acc, (j, &i)| acc | (p >> i & 1) << j);
        out[q][0] += c[0];
        out[q][1] += c[1];
    }
    out
}

/// Evaluates formulas whose free variables, in order, index the patterns
/// of the state.
pub(crate) struct Evaluator<'g> {
    growth: &'g dyn Growth,
    memo: HashMap<(usize, usize, State), bool>,
    /// Enumerate every count instead of capped representatives.
    exhaustive: bool,
    limit: u64,
}

impl<'g> Evaluator<'g> {
    pub(crate) fn new(growth: &'g dyn Growth) -> Self {
        Evaluator {
            growth,
            memo: HashMap::new(),
            exhaustive: false,
            limit: ENUMERATION_CAP,
        }
    }

    #[cfg(test)]
    pub(crate) fn exhaustive(growth: &'g dyn Growth) -> Self {
        Evaluator {
            exhaustive: true,
            limit: 20_000,
            ..Evaluator::new(growth)
        }
    }

    pub(crate) fn eval(&mut self, f: &Formula, vars: &[String], state: &State, level: usize) -> Result<bool> {
        let mut compiler = Compiler {
            factors: self.growth.factors(),
            next_id: 0,
        };
        let node = compiler.compile(f, vars)?;
        self.memo.clear();
        self.node(&node, state, level)
    }

    fn node(&mut self, n: &Node, state: &State, level: usize) -> Result<bool> {
        Ok(match n {
            Node::Empty(mask) => units_in(state, *mask) == [0, 0],
            Node::Card(mask, k) => units_in(state, *mask) == [*k, 0],
            Node::Not(a) => !self.node(a, state, level)?,
            Node::And(a, b) => self.node(a, state, level)? && self.node(b, state, level)?,
            Node::Or(a, b) => self.node(a, state, level)? || self.node(b, state, level)?,
            Node::Iff(a, b) => self.node(a, state, level)? == self.node(b, state, level)?,
            Node::Quant(q) => self.quantify(q, state, level)?,
        })
    }

    fn quantify(&mut self, q: &Quant, state: &State, level: usize) -> Result<bool> {
        let state = project(state, &q.keep);
        let cap = if self.exhaustive { [u64::MAX; 2] } else { q.cap };
        let key = (
            q.id,
            level,
            state.iter().map(|c| [c[0].min(cap[0]), c[1].min(cap[1])]).collect::<State>(),
        );
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let refined = self.growth.refine(&state, level)?;
        let half = refined.len();
        let result = if !q.uses_var {
            let mut next = refined.clone();
            next.resize(2 * half, [0, 0]);
            self.node(&q.body, &next, level + 1)?
        } else if q.quantifier_free && !self.exhaustive {
            search(&q.body, &refined, q.exists, q.body_cap[0]) == q.exists
        } else {
            let body_cap = if self.exhaustive { [u64::MAX / 2; 2] } else { q.body_cap };
            let choices: Vec<Vec<u64>> = refined
                .iter()
                .flat_map(|c| [representatives(c[0], body_cap[0]), representatives(c[1], body_cap[1])])
                .collect();
            let total = choices
                .iter()
                .try_fold(1u64, |acc, c| acc.checked_mul(c.len() as u64))
                .filter(|&t| t <= self.limit)
                .ok_or_else(|| Error::ResourceCap(format!("a quantifier exceeds {} representatives", self.limit)))?;
            let mut digits = vec![0usize; choices.len()];
            let mut next = vec![[0u64; 2]; 2 * half];
            let mut result = !q.exists;
            for _ in 0..total {
                for (p, c) in refined.iter().enumerate() {
                    for kind in 0..2 {
                        let take = choices[2 * p + kind][digits[2 * p + kind]];
                        next[p | half][kind] = take;
                        next[p][kind] = c[kind] - take;
                    }
                }
                if self.node(&q.body, &next, level + 1)? == q.exists {
                    result = q.exists;
                    break;
                }
                for (d, c) in digits.iter_mut().zip(&choices) {
                    *d += 1;
                    if *d < c.len() {
                        break;
                    }
                    *d = 0;
                }
            }
            result
        };
        self.memo.insert(key, result);
        Ok(result)
    }
}

/// Bounds on one count.
type Range = [u64; 2];

/// Three-valued truth of a quantifier-free node when the count of each kind
/// in each pattern is only known to lie in a range.
fn eval3(n: &Node, ranges: &[[Range; 2]]) -> Option<bool> {
    let sum = |mask: u64, kind: usize| {
        let mut total = [0u64; 2];
        let mut m = mask;
        while m != 0 {
            let p = m.trailing_zeros() as usize;
            m &= m - 1;
            total[0] += ranges[p][kind][0];
            total[1] += ranges[p][kind][1];
        }
        total
    };
    match n {
        Node::Empty(mask) => {
            let (a, b) = (sum(*mask, 0), sum(*mask, 1));
            if a[1] == 0 && b[1] == 0 {
                Some(true)
            } else if a[0] > 0 || b[0] > 0 {
                Some(false)
            } else {
                None
            }
        }
        Node::Card(mask, k) => {
            let (atoms, blocks) = (sum(*mask, 0), sum(*mask, 1));
            if blocks[0] > 0 || atoms[0] > *k || (blocks[1] == 0 && atoms[1] < *k) {
                Some(false)
            } else if blocks[1] == 0 && atoms == [*k, *k] {
                Some(true)
            } else {
                None
            }
        }
        Node::Not(a) => eval3(a, ranges).map(|v| !v),
        Node::And(a, b) => match eval3(a, ranges) {
            Some(false) => Some(false),
            va => match (va, eval3(b, ranges)) {
                (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
        },
        Node::Or(a, b) => match eval3(a, ranges) {
            Some(true) => Some(true),
            va => match (va, eval3(b, ranges)) {
                (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
        },
        Node::Iff(a, b) => eval3(a, ranges).zip(eval3(b, ranges)).map(|(a, b)| a == b),
        Node::Quant(_) => unreachable!("quantifier-free body"),
    }
}

/// Whether some split of `state` by a new variable makes the
/// quantifier-free `body` evaluate to `target`, trying one representative
/// per capped profile (atoms capped at `cap`, blocks at 1). Counts are fixed
/// one at a time, pruning as soon as the outcome is decided.
fn search(body: &Node, state: &State, target: bool, cap: u64) -> bool {
    fn go(body: &Node, state: &State, ranges: &mut [[Range; 2]], slot: usize, target: bool, cap: u64) -> bool {
        match eval3(body, ranges) {
            Some(v) => return v == target,
            None if slot == 2 * state.len() => unreachable!("all counts fixed"),
            None => {}
        }
        let half = state.len();
        let (p, kind) = (slot / 2, slot % 2);
        let n = state[p][kind];
        let saved = (ranges[p][kind], ranges[p | half][kind]);
        let mut found = false;
        for take in representatives(n, if kind == 0 { cap } else { 1 }) {
            ranges[p | half][kind] = [take, take];
            ranges[p][kind] = [n - take; 2];
            if go(body, state, ranges, slot + 1, target, cap) {
                found = true;
                break;
            }
        }
        ranges[p][kind] = saved.0;
        ranges[p | half][kind] = saved.1;
        found
    }
    let half = state.len();
    let mut ranges: Vec<[Range; 2]> = vec![[[0, 0]; 2]; 2 * half];
    for (p, c) in state.iter().enumerate() {
        for kind in 0..2 {
            ranges[p][kind] = [0, c[kind]];
            ranges[p | half][kind] = [0, c[kind]];
        }
    }
    go(body, state, &mut ranges, 0, target, cap)
}
