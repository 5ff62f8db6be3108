//! Abstract syntax for the inclusion languages of set-theoretic and
//! class-theoretic mereology, together with an ASCII parser and printer.
//!
//! Terms are built from variables, the bottom constant `0`, the top constant
//! `1` (class mode only) and the lattice operations `\/`, `/\` and `-`.
//! Atomic formulas are `t <= s`, `t = s` and the counting predicate
//! `|t| = n` ("exactly `n` atoms lie below `t`").

mod parser;

use std::fmt;
use std::str::FromStr;

pub use parser::{parse, parse_sentence};

/// Which complete theory a session works in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TheoryMode {
    /// Unbounded atomic relatively complemented distributive lattices (no top).
    SetMereology,
    /// Atomic Boolean algebras with infinitely many atoms (has a top).
    ClassMereology,
}

impl TheoryMode {
    pub fn has_top(self) -> bool {
        matches!(self, TheoryMode::ClassMereology)
    }

    pub fn name(self) -> &'static str {
        match self {
            TheoryMode::SetMereology => "set",
            TheoryMode::ClassMereology => "class",
        }
    }
}

impl fmt::Display for TheoryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TheoryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "set" => Ok(TheoryMode::SetMereology),
            "class" => Ok(TheoryMode::ClassMereology),
            other => Err(format!("unknown mode `{other}` (expected set|class)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    Empty,
    Universe,
    Union(Box<Term>, Box<Term>),
    Intersection(Box<Term>, Box<Term>),
    Difference(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn union(a: Term, b: Term) -> Term {
        Term::Union(Box::new(a), Box::new(b))
    }

    pub fn inter(a: Term, b: Term) -> Term {
        Term::Intersection(Box::new(a), Box::new(b))
    }

    pub fn diff(a: Term, b: Term) -> Term {
        Term::Difference(Box::new(a), Box::new(b))
    }

    pub fn mentions_universe(&self) -> bool {
        match self {
            Term::Universe => true,
            Term::Var(_) | Term::Empty => false,
            Term::Union(a, b) | Term::Intersection(a, b) | Term::Difference(a, b) => {
                a.mentions_universe() || b.mentions_universe()
            }
        }
    }

    /// Evaluates the term pointwise: `lookup` says whether the point lies in
    /// a given variable, `top` whether the point lies in the universe.
    pub fn holds_at(&self, lookup: &dyn Fn(&str) -> bool) -> bool {
        match self {
            Term::Var(v) => lookup(v),
            Term::Empty => false,
            Term::Universe => true,
            Term::Union(a, b) => a.holds_at(lookup) || b.holds_at(lookup),
            Term::Intersection(a, b) => a.holds_at(lookup) && b.holds_at(lookup),
            Term::Difference(a, b) => a.holds_at(lookup) && !b.holds_at(lookup),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Term::Var(v) => out.push(v),
            Term::Empty | Term::Universe => {}
            Term::Union(a, b) | Term::Intersection(a, b) | Term::Difference(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    fn rename(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.to_string()),
            Term::Var(_) | Term::Empty | Term::Universe => self.clone(),
            Term::Union(a, b) => Term::union(a.rename(from, to), b.rename(from, to)),
            Term::Intersection(a, b) => Term::inter(a.rename(from, to), b.rename(from, to)),
            Term::Difference(a, b) => Term::diff(a.rename(from, to), b.rename(from, to)),
        }
    }

    fn render_into(&self, out: &mut String, top: bool) {
        let (a, b, op) = match self {
            Term::Var(v) => return out.push_str(v),
            Term::Empty => return out.push('0'),
            Term::Universe => return out.push('1'),
            Term::Union(a, b) => (a, b, " \\/ "),
            Term::Intersection(a, b) => (a, b, " /\\ "),
            Term::Difference(a, b) => (a, b, " - "),
        };
        if !top {
            out.push('(');
        }
        a.render_into(out, false);
        out.push_str(op);
        b.render_into(out, false);
        if !top {
            out.push(')');
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render_into(&mut s, true);
        f.write_str(&s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Subseteq(Term, Term),
    Equal(Term, Term),
    /// `|t| = n`: exactly `n` atoms lie below `t`.
    CardEq(Term, u32),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Formula {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// Conjunction of a non-empty list, left associated.
    pub fn conjunction(parts: Vec<Formula>) -> Option<Formula> {
        parts.into_iter().reduce(Formula::and)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self,
            Formula::Subseteq(..) | Formula::Equal(..) | Formula::CardEq(..)
        )
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Subseteq(..) | Formula::Equal(..) | Formula::CardEq(..) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Maximum nesting depth of quantifiers.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::Subseteq(..) | Formula::Equal(..) | Formula::CardEq(..) => 0,
            Formula::Not(a) => a.quantifier_rank(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.quantifier_rank().max(b.quantifier_rank())
            }
            Formula::Exists(_, a) | Formula::Forall(_, a) => 1 + a.quantifier_rank(),
        }
    }

    /// Largest `n` occurring in a counting atom `|t| = n`.
    pub fn max_constant(&self) -> u32 {
        match self {
            Formula::CardEq(_, n) => *n,
            Formula::Subseteq(..) | Formula::Equal(..) => 0,
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.max_constant(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.max_constant().max(b.max_constant())
            }
        }
    }

    pub fn mentions_universe(&self) -> bool {
        match self {
            Formula::Subseteq(a, b) | Formula::Equal(a, b) => {
                a.mentions_universe() || b.mentions_universe()
            }
            Formula::CardEq(t, _) => t.mentions_universe(),
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.mentions_universe(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.mentions_universe() || b.mentions_universe()
            }
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut bound: Vec<&str> = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut Vec<String>) {
        let push_term = |t: &Term, bound: &Vec<&str>, out: &mut Vec<String>| {
            let mut vs = Vec::new();
            t.collect_vars(&mut vs);
            for v in vs {
                if !bound.contains(&v) && !out.iter().any(|o| o == v) {
                    out.push(v.to_string());
                }
            }
        };
        match self {
            Formula::Subseteq(a, b) | Formula::Equal(a, b) => {
                push_term(a, bound, out);
                push_term(b, bound, out);
            }
            Formula::CardEq(t, _) => push_term(t, bound, out),
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                bound.push(v);
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Renames free occurrences of `from` to `to`. `to` must not be captured
    /// by a quantifier inside the formula.
    pub fn rename_free(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Subseteq(a, b) => Formula::Subseteq(a.rename(from, to), b.rename(from, to)),
            Formula::Equal(a, b) => Formula::Equal(a.rename(from, to), b.rename(from, to)),
            Formula::CardEq(t, n) => Formula::CardEq(t.rename(from, to), *n),
            Formula::Not(a) => Formula::not(a.rename_free(from, to)),
            Formula::And(a, b) => Formula::and(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_free(from, to), b.rename_free(from, to))
            }
            Formula::Iff(a, b) => Formula::iff(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Exists(v, a) if v == from => Formula::Exists(v.clone(), a.clone()),
            Formula::Forall(v, a) if v == from => Formula::Forall(v.clone(), a.clone()),
            Formula::Exists(v, a) => Formula::Exists(v.clone(), Box::new(a.rename_free(from, to))),
            Formula::Forall(v, a) => Formula::Forall(v.clone(), Box::new(a.rename_free(from, to))),
        }
    }

    /// Fully parenthesized ASCII rendering that reparses to the same tree.
    pub fn render(&self) -> String {
        let mut s = String::new();
        self.render_into(&mut s);
        s
    }

    fn render_into(&self, out: &mut String) {
        match self {
            Formula::Subseteq(a, b) => {
                a.render_into(out, true);
                out.push_str(" <= ");
                b.render_into(out, true);
            }
            Formula::Equal(a, b) => {
                a.render_into(out, true);
                out.push_str(" = ");
                b.render_into(out, true);
            }
            Formula::CardEq(t, n) => {
                out.push('|');
                t.render_into(out, true);
                out.push_str("| = ");
                out.push_str(&n.to_string());
            }
            Formula::Not(a) => {
                out.push('~');
                match **a {
                    Formula::Not(_)
                    | Formula::And(..)
                    | Formula::Or(..)
                    | Formula::Implies(..)
                    | Formula::Iff(..) => a.render_into(out),
                    _ => {
                        out.push('(');
                        a.render_into(out);
                        out.push(')');
                    }
                }
            }
            Formula::And(a, b) => render_binary(out, a, " & ", b),
            Formula::Or(a, b) => render_binary(out, a, " | ", b),
            Formula::Implies(a, b) => render_binary(out, a, " -> ", b),
            Formula::Iff(a, b) => render_binary(out, a, " <-> ", b),
            Formula::Exists(v, a) => {
                out.push_str("E ");
                out.push_str(v);
                out.push_str(". ");
                a.render_into(out);
            }
            Formula::Forall(v, a) => {
                out.push_str("A ");
                out.push_str(v);
                out.push_str(". ");
                a.render_into(out);
            }
        }
    }
}

fn render_binary(out: &mut String, a: &Formula, op: &str, b: &Formula) {
    out.push('(');
    render_operand(out, a);
    out.push_str(op);
    render_operand(out, b);
    out.push(')');
}

fn render_operand(out: &mut String, f: &Formula) {
    if matches!(f, Formula::Exists(..) | Formula::Forall(..)) {
        out.push('(');
        f.render_into(out);
        out.push(')');
    } else {
        f.render_into(out);
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Free-standing alias kept for API symmetry with `parse`.
pub fn render(f: &Formula) -> String {
    f.render()
}

pub fn free_variables(f: &Formula) -> Vec<String> {
    f.free_variables()
}
