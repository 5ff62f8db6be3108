//! Seeded random sentences for agreement runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Formula, Term, TheoryMode};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub mode: TheoryMode,
    pub size: usize,
    pub seed: u64,
    pub max_rank: usize,
    pub max_constant: u32,
    pub variables: Vec<String>,
}

impl CorpusConfig {
    pub fn new(mode: TheoryMode, size: usize, seed: u64) -> Self {
        CorpusConfig {
            mode,
            size,
            seed,
            max_rank: 3,
            max_constant: 4,
            variables: ["x", "y", "z"].map(String::from).to_vec(),
        }
    }
}

struct Gen<'c> {
    cfg: &'c CorpusConfig,
    rng: ChaCha8Rng,
}

impl Gen<'_> {
    fn term(&mut self, bound: &[String], depth: usize) -> Term {
        let leaf = depth == 0 || self.rng.gen_bool(0.45);
        if leaf {
            let r = self.rng.gen_range(0..20);
            return match (r, bound.is_empty()) {
                (0, _) => Term::Empty,
                (1, _) if self.cfg.mode == TheoryMode::ClassMereology => Term::Universe,
                (_, true) if self.cfg.mode == TheoryMode::ClassMereology => Term::Universe,
                (_, true) => Term::Empty,
                _ => Term::var(bound.choose(&mut self.rng).expect("non-empty")),
            };
        }
        let a = self.term(bound, depth - 1);
        let b = self.term(bound, depth - 1);
        match self.rng.gen_range(0..3) {
            0 => Term::union(a, b),
            1 => Term::inter(a, b),
            _ => Term::diff(a, b),
        }
    }

    fn atom(&mut self, bound: &[String]) -> Formula {
        match self.rng.gen_range(0..5) {
            0 => Formula::Subseteq(self.term(bound, 1), self.term(bound, 1)),
            1 => Formula::Equal(self.term(bound, 1), self.term(bound, 1)),
            _ => Formula::CardEq(self.term(bound, 2), self.rng.gen_range(0..=self.cfg.max_constant)),
        }
    }

    fn quantified(&mut self, rank: usize, bound: &mut Vec<String>, size: usize) -> Formula {
        let x = match self.cfg.variables.iter().find(|v| !bound.contains(v)) {
            Some(v) if self.rng.gen_bool(0.85) => v.clone(),
            _ => self.cfg.variables.choose(&mut self.rng).expect("variables").clone(),
        };
        bound.push(x.clone());
        let body = self.formula(rank - 1, bound, size);
        bound.pop();
        if self.rng.gen_bool(0.5) {
            Formula::exists(&x, body)
        } else {
            Formula::forall(&x, body)
        }
    }

    fn formula(&mut self, rank: usize, bound: &mut Vec<String>, size: usize) -> Formula {
        let r = self.rng.gen_range(0..10);
        if rank > 0 && (r < 4 || bound.is_empty()) {
            return self.quantified(rank, bound, size);
        }
        if size == 0 || r < 6 {
            return self.atom(bound);
        }
        let a = self.formula(rank, bound, size - 1);
        match self.rng.gen_range(0..6) {
            0 => Formula::not(a),
            1 | 2 => Formula::and(a, self.formula(rank, bound, size - 1)),
            3 => Formula::or(a, self.formula(rank, bound, size - 1)),
            4 => Formula::implies(a, self.formula(rank, bound, size - 1)),
            _ => Formula::iff(a, self.formula(rank, bound, size - 1)),
        }
    }
}

/// `size` closed sentences of quantifier rank between 1 and the configured
/// maximum, deterministic in the seed.
pub fn generate_corpus(cfg: &CorpusConfig) -> Vec<Formula> {
    let mut g = Gen {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    (0..cfg.size)
        .map(|_| {
            let rank = g.rng.gen_range(1..=cfg.max_rank);
            g.quantified(rank, &mut Vec::new(), 3)
        })
        .collect()
}
