//! Brute-force semantics used to cross-check the decision procedure.
//!
//! Nothing here goes through normal forms or size sets: class-mode sentences
//! are evaluated in the powerset algebras of `{0..N-1}` for a window of `N`,
//! set-mode sentences in bounded pieces of the column model, and both must
//! stabilize.

mod corpus;
mod counting;
mod naive;

use std::collections::BTreeMap;
use std::fmt;

pub use corpus::{generate_corpus, CorpusConfig};
pub use counting::ENUMERATION_CAP;
pub use naive::{naive_eval_finite, naive_eval_set};

use counting::{Evaluator, Fixed, Growth, State, MAX_VARS};

use crate::error::{Error, Result};
use crate::formula::Formula;

pub const CLASS_WINDOW: [u32; 4] = [8, 10, 12, 14];

pub const SET_RUNGS: [Rung; 3] = [Rung::new(2, 2, 4), Rung::new(3, 2, 6), Rung::new(3, 4, 8)];

/// Largest atom count for [`brute_eval_finite`].
pub const MAX_ATOMS: u32 = 64;

/// Bounded piece of the column model: the elements supported on the first
/// `columns` columns whose membership is periodic with period dividing
/// `period` from `threshold` on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rung {
    pub columns: u64,
    pub period: u64,
    pub threshold: u64,
}

impl Rung {
    pub const fn new(columns: u64, period: u64, threshold: u64) -> Rung {
        Rung {
            columns,
            period,
            threshold,
        }
    }

    /// The rung one quantifier deeper than `self`.
    pub fn escalate(self) -> Rung {
        Rung::new(self.columns + 1, 2 * self.period, self.threshold + 4 * self.period)
    }

    /// Atoms and blocks each block of `self` is refined into at `next`.
    fn refinement(self, next: Rung) -> Result<(u64, u64)> {
        let ok = self.period > 0
            && next.columns >= self.columns
            && next.threshold >= self.threshold
            && next.period.is_multiple_of(self.period)
            && (next.threshold - self.threshold).is_multiple_of(self.period);
        if !ok {
            return Err(Error::Invalid(format!("rung {next} does not refine {self}")));
        }
        Ok(((next.threshold - self.threshold) / self.period, next.period / self.period))
    }
}

impl fmt::Display for Rung {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.columns, self.period, self.threshold)
    }
}

impl std::str::FromStr for Rung {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rung> {
        let nums: Vec<u64> = s
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|x| x.trim().parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Invalid(format!("bad rung `{s}`, expected (C,P,T)")))?;
        match nums[..] {
            [c, p, t] if p > 0 => Ok(Rung::new(c, p, t)),
            _ => Err(Error::Invalid(format!("bad rung `{s}`, expected (C,P,T) with P > 0"))),
        }
    }
}

/// A chain of rungs, extended by [`Rung::escalate`] as deep as needed.
struct Ladder {
    rungs: Vec<Rung>,
}

impl Ladder {
    fn new(schedule: &[Rung], depth: usize) -> Result<Ladder> {
        let mut rungs = schedule.to_vec();
        while rungs.len() < schedule.len() + depth {
            let last = *rungs.last().expect("schedule is non-empty");
            rungs.push(last.escalate());
        }
        for w in rungs.windows(2) {
            w[0].refinement(w[1])?;
        }
        Ok(Ladder { rungs })
    }
}

impl Growth for Ladder {
    fn refine(&self, state: &State, level: usize) -> Result<State> {
        let (from, to) = match (self.rungs.get(level), self.rungs.get(level + 1)) {
            (Some(a), Some(b)) => (*a, *b),
            _ => return Err(Error::ResourceCap("rung ladder exhausted".into())),
        };
        let (f, g) = from.refinement(to)?;
        let mut out: State = state.iter().map(|&[a, b]| [a + f * b, g * b]).collect();
        let fresh = to.columns - from.columns;
        out[0][0] += fresh * to.threshold;
        out[0][1] += fresh * to.period;
        Ok(out)
    }

    fn factors(&self) -> (u64, u64) {
        self.rungs
            .windows(2)
            .map(|w| w[0].refinement(w[1]).expect("checked on construction"))
            .fold((u64::MAX, u64::MAX), |(f, g), (a, b)| (f.min(a), g.min(b)))
    }
}

/// Outcome of evaluating over a window of structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilized {
    /// One value per window entry.
    pub values: Vec<bool>,
    /// `None` when the values do not settle.
    pub verdict: Option<bool>,
}

impl fmt::Display for Stabilized {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verdict {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "unstable"),
        }
    }
}

fn variables(names: impl Iterator<Item = String>) -> Result<Vec<String>> {
    let vars: Vec<String> = names.collect();
    if vars.len() > MAX_VARS {
        return Err(Error::ResourceCap(format!("more than {MAX_VARS} free variables")));
    }
    Ok(vars)
}

fn check_free(f: &Formula, vars: &[String]) -> Result<()> {
    match f.free_variables().into_iter().find(|v| !vars.contains(v)) {
        Some(v) => Err(Error::UnboundVariable(v)),
        None => Ok(()),
    }
}

/// Truth of `f` in the powerset algebra of `{0..n-1}`, with each free
/// variable assigned the subset whose bits are set.
pub fn brute_eval_finite(n: u32, f: &Formula, assignment: &BTreeMap<String, u64>) -> Result<bool> {
    if n > MAX_ATOMS {
        return Err(Error::ResourceCap(format!("{n} atoms exceeds {MAX_ATOMS}")));
    }
    let universe = if n == 64 { !0 } else { (1u64 << n) - 1 };
    let vars = variables(assignment.keys().cloned())?;
    check_free(f, &vars)?;
    let mut state: State = vec![[0, 0]; 1 << vars.len()];
    for atom in 0..n {
        if universe >> atom & 1 == 0 {
            continue;
        }
        let p = vars
            .iter()
            .enumerate()
            .filter(|(_, v)| assignment[*v] >> atom & 1 == 1)
            .fold(0usize, |acc, (i, _)| acc | 1 << i);
        state[p][0] += 1;
    }
    if let Some((v, _)) = assignment.iter().find(|(_, s)| **s & !universe != 0) {
        return Err(Error::Invalid(format!("`{v}` mentions atoms outside {{0..{n}}}")));
    }
    Evaluator::new(&Fixed).eval(f, &vars, &state, 0)
}

/// Evaluates a class-mode sentence at every size in `window`; stable when all
/// agree.
pub fn stabilized_decide_class(f: &Formula, window: &[u32]) -> Result<Stabilized> {
    if window.is_empty() || window.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Invalid("window must be non-empty and increasing".into()));
    }
    let values = window
        .iter()
        .map(|&n| brute_eval_finite(n, f, &BTreeMap::new()))
        .collect::<Result<Vec<_>>>()?;
    let verdict = values.iter().all(|&v| v == values[0]).then_some(values[0]);
    Ok(Stabilized { values, verdict })
}

/// An eventually periodic subset of one column:
/// `prefix ∪ {n ≥ threshold : n mod period ∈ residues}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedPart {
    pub prefix: Vec<u64>,
    pub threshold: u64,
    pub period: u64,
    pub residues: Vec<u64>,
}

impl BoundedPart {
    pub fn contains(&self, n: u64) -> bool {
        if n < self.threshold {
            self.prefix.contains(&n)
        } else {
            self.residues.contains(&(n % self.period))
        }
    }

    fn fits(&self, rung: Rung) -> bool {
        self.period > 0
            && self.threshold <= rung.threshold
            && rung.period.is_multiple_of(self.period)
            && self.prefix.iter().all(|&n| n < self.threshold)
    }
}

/// Column-model element given by its non-empty columns.
pub type BoundedSet = BTreeMap<u32, BoundedPart>;

fn rung_state(rung: Rung, vars: &[String], assignment: &BTreeMap<String, BoundedSet>) -> Result<State> {
    for (v, set) in assignment {
        if let Some((c, _)) = set.iter().find(|(&c, part)| c as u64 >= rung.columns || !part.fits(rung)) {
            return Err(Error::Invalid(format!("`{v}` column {c} is not in rung {rung}")));
        }
    }
    let mut state: State = vec![[0, 0]; 1 << vars.len()];
    let pattern = |c: u32, n: u64| {
        vars.iter()
            .enumerate()
            .filter(|(_, v)| assignment[*v].get(&c).is_some_and(|part| part.contains(n)))
            .fold(0usize, |acc, (i, _)| acc | 1 << i)
    };
    for c in 0..rung.columns as u32 {
        for n in 0..rung.threshold {
            state[pattern(c, n)][0] += 1;
        }
        for k in 0..rung.period {
            state[pattern(c, rung.threshold + k)][1] += 1;
        }
    }
    Ok(state)
}

/// Evaluates `f` with quantifiers over bounded pieces of the column model,
/// once per scheduled rung. The outermost context is the scheduled rung and
/// each quantifier ranges over the escalation of the rung of its context;
/// the verdict is stable when the last two runs agree.
pub fn bounded_eval_set(
    f: &Formula,
    assignment: &BTreeMap<String, BoundedSet>,
    schedule: &[Rung],
) -> Result<Stabilized> {
    if schedule.len() < 3 {
        return Err(Error::Invalid("the rung schedule needs at least 3 rungs".into()));
    }
    if f.mentions_universe() {
        return Err(Error::UniverseInSetMode { line: 1, column: 1 });
    }
    let vars = variables(assignment.keys().cloned())?;
    check_free(f, &vars)?;
    let mut values = Vec::with_capacity(schedule.len());
    for &rung in schedule {
        let ladder = Ladder::new(&[rung], f.quantifier_rank())?;
        let state = rung_state(rung, &vars, assignment)?;
        values.push(Evaluator::new(&ladder).eval(f, &vars, &state, 0)?);
    }
    let n = values.len();
    let verdict = (values[n - 2] == values[n - 1]).then_some(values[n - 1]);
    Ok(Stabilized { values, verdict })
}
