//! Textbook evaluation over explicit bitsets, for cross-checking the
//! symmetry-reduced evaluator on small structures.

use std::collections::BTreeMap;

use super::Rung;
use crate::error::{Error, Result};
use crate::formula::{Formula, Term};

/// Largest atom count for exhaustive search.
pub const MAX_NAIVE_ATOMS: u32 = 16;

/// Largest number of units in the finest rung for [`naive_eval_set`].
const MAX_NAIVE_UNITS: u64 = 128;

/// Elements are bitsets over units; `blocks` marks the infinite ones.
struct Structure {
    universe: Option<u128>,
    blocks: u128,
    /// Quantifier domain per level.
    domains: Vec<Vec<u128>>,
}

fn term(t: &Term, env: &[(String, u128)], s: &Structure) -> Result<u128> {
    Ok(match t {
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, b)| *b)
            .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
        Term::Empty => 0,
        Term::Universe => s.universe.ok_or(Error::UniverseInSetMode { line: 1, column: 1 })?,
        Term::Union(a, b) => term(a, env, s)? | term(b, env, s)?,
        Term::Intersection(a, b) => term(a, env, s)? & term(b, env, s)?,
        Term::Difference(a, b) => term(a, env, s)? & !term(b, env, s)?,
    })
}

fn eval(f: &Formula, env: &mut Vec<(String, u128)>, s: &Structure, level: usize) -> Result<bool> {
    Ok(match f {
        Formula::Subseteq(a, b) => term(a, env, s)? & !term(b, env, s)? == 0,
        Formula::Equal(a, b) => term(a, env, s)? == term(b, env, s)?,
        Formula::CardEq(t, n) => {
            let v = term(t, env, s)?;
            v & s.blocks == 0 && v.count_ones() == *n
        }
        Formula::Not(a) => !eval(a, env, s, level)?,
        Formula::And(a, b) => eval(a, env, s, level)? && eval(b, env, s, level)?,
        Formula::Or(a, b) => eval(a, env, s, level)? || eval(b, env, s, level)?,
        Formula::Implies(a, b) => !eval(a, env, s, level)? || eval(b, env, s, level)?,
        Formula::Iff(a, b) => eval(a, env, s, level)? == eval(b, env, s, level)?,
        Formula::Exists(x, body) | Formula::Forall(x, body) => {
            let exists = matches!(f, Formula::Exists(..));
            let domain = s
                .domains
                .get(level + 1)
                .ok_or_else(|| Error::ResourceCap("no structure for this quantifier depth".into()))?;
            let mut result = !exists;
            for &e in domain {
                env.push((x.clone(), e));
                let v = eval(body, env, s, level + 1);
                env.pop();
                if v? == exists {
                    result = exists;
                    break;
                }
            }
            result
        }
    })
}

/// Truth of `f` in the powerset algebra of `{0..n-1}` by exhaustive search.
pub fn naive_eval_finite(n: u32, f: &Formula, assignment: &BTreeMap<String, u64>) -> Result<bool> {
    if n > MAX_NAIVE_ATOMS {
        return Err(Error::ResourceCap(format!("{n} atoms exceeds {MAX_NAIVE_ATOMS}")));
    }
    let all: Vec<u128> = (0..1u128 << n).collect();
    let s = Structure {
        universe: Some((1u128 << n) - 1),
        blocks: 0,
        domains: vec![all; f.quantifier_rank() + 1],
    };
    let mut env: Vec<(String, u128)> = assignment.iter().map(|(k, v)| (k.clone(), *v as u128)).collect();
    eval(f, &mut env, &s, 0)
}

/// Truth of the sentence `f` when the outermost context is `rungs[start]`
/// and each quantifier ranges over the next rung, with every element of a
/// rung listed explicitly.
pub fn naive_eval_set(f: &Formula, rungs: &[Rung], start: usize) -> Result<bool> {
    let depth = f.quantifier_rank();
    let used = rungs
        .get(start..=start + depth)
        .ok_or_else(|| Error::Invalid("not enough rungs for the quantifier depth".into()))?;
    let finest = *used.last().expect("non-empty");
    let width = finest.threshold + finest.period;
    if finest.columns * width > MAX_NAIVE_UNITS {
        return Err(Error::ResourceCap("finest rung too large for explicit units".into()));
    }
    let atom = |c: u64, n: u64| 1u128 << (c * width + n);
    let block = |c: u64, j: u64| 1u128 << (c * width + finest.threshold + j);
    let mut blocks = 0u128;
    for c in 0..finest.columns {
        for j in 0..finest.period {
            blocks |= block(c, j);
        }
    }
    let mut domains = vec![Vec::new(); start];
    for r in used {
        if finest.period % r.period != 0 || r.threshold > finest.threshold || r.columns > finest.columns {
            return Err(Error::Invalid(format!("rung {r} is not below {finest}")));
        }
        let mut groups = Vec::new();
        for c in 0..r.columns {
            for n in 0..r.threshold {
                groups.push(atom(c, n));
            }
            for k in 0..r.period {
                let mut g = 0u128;
                for n in (r.threshold..finest.threshold).filter(|n| n % r.period == k) {
                    g |= atom(c, n);
                }
                for j in (0..finest.period).filter(|j| j % r.period == k) {
                    g |= block(c, j);
                }
                groups.push(g);
            }
        }
        if groups.len() > 20 {
            return Err(Error::ResourceCap(format!("rung {r} has too many elements to list")));
        }
        domains.push(
            (0..1u32 << groups.len())
                .map(|sel| (0..groups.len()).filter(|i| sel >> i & 1 == 1).fold(0, |acc, i| acc | groups[i]))
                .collect(),
        );
    }
    let s = Structure {
        universe: None,
        blocks,
        domains,
    };
    eval(f, &mut Vec::new(), &s, start)
}
