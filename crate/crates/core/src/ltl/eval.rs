use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::LtlFormula;
use crate::error::{Error, Result};

/// The set of propositions that hold at one position of a word.
pub type Letter = BTreeSet<String>;

/// An ultimately periodic word `prefix · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoWord {
    prefix: Vec<Letter>,
    cycle: Vec<Letter>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Letter>, cycle: Vec<Letter>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidWord("cycle must be nonempty".into()));
        }
        Ok(LassoWord { prefix, cycle })
    }

    /// Convenience constructor from string slices.
    pub fn from_strs(prefix: &[&[&str]], cycle: &[&[&str]]) -> Result<Self> {
        let conv = |letters: &[&[&str]]| -> Vec<Letter> {
            letters
                .iter()
                .map(|l| l.iter().map(|s| s.to_string()).collect())
                .collect()
        };
        LassoWord::new(conv(prefix), conv(cycle))
    }

    pub fn prefix(&self) -> &[Letter] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Letter] {
        &self.cycle
    }

    /// Number of distinct positions of the unrolled lasso.
    pub fn span(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Position that follows `i` in the folded index space.
    pub fn successor(&self, i: usize) -> usize {
        if i + 1 < self.span() {
            i + 1
        } else {
            self.prefix.len()
        }
    }

    /// Letter at any position of the infinite word.
    pub fn letter_at(&self, i: usize) -> &Letter {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// The suffix word starting at position 1.
    pub fn shift(&self) -> LassoWord {
        if self.prefix.is_empty() {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            LassoWord {
                prefix: Vec::new(),
                cycle,
            }
        } else {
            LassoWord {
                prefix: self.prefix[1..].to_vec(),
                cycle: self.cycle.clone(),
            }
        }
    }
}

/// Decides whether `word` satisfies `formula`.
///
/// Each subformula is evaluated at the `|prefix| + |cycle|` folded positions;
/// Until is the least and Release the greatest fixpoint of its one-step
/// unfolding over those positions.
pub fn eval_lasso(formula: &LtlFormula, word: &LassoWord) -> bool {
    values(formula, word)[0]
}

/// One entry per soft formula: whether `word` satisfies it.
pub fn satisfied_set(word: &LassoWord, softs: &[LtlFormula]) -> Vec<bool> {
    softs.iter().map(|f| eval_lasso(f, word)).collect()
}

fn values(formula: &LtlFormula, word: &LassoWord) -> Vec<bool> {
    let n = word.span();
    match formula {
        LtlFormula::True => vec![true; n],
        LtlFormula::False => vec![false; n],
        LtlFormula::Atom(name) => (0..n).map(|i| word.letter_at(i).contains(name)).collect(),
        LtlFormula::Not(f) => values(f, word).into_iter().map(|v| !v).collect(),
        LtlFormula::And(a, b) => zip(values(a, word), values(b, word), |x, y| x && y),
        LtlFormula::Or(a, b) => zip(values(a, word), values(b, word), |x, y| x || y),
        LtlFormula::Implies(a, b) => zip(values(a, word), values(b, word), |x, y| !x || y),
        LtlFormula::Next(f) => {
            let inner = values(f, word);
            (0..n).map(|i| inner[word.successor(i)]).collect()
        }
        LtlFormula::Until(a, b) => until(&values(a, word), &values(b, word), word),
        LtlFormula::Release(a, b) => release(&values(a, word), &values(b, word), word),
        LtlFormula::Eventually(f) => until(&vec![true; n], &values(f, word), word),
        LtlFormula::Globally(f) => release(&vec![false; n], &values(f, word), word),
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

// v[i] = hold[i] || (keep[i] && v[succ i]), least solution
fn until(keep: &[bool], hold: &[bool], word: &LassoWord) -> Vec<bool> {
    fixpoint(false, word, |i, next| hold[i] || (keep[i] && next))
}

// v[i] = hold[i] && (stop[i] || v[succ i]), greatest solution
fn release(stop: &[bool], hold: &[bool], word: &LassoWord) -> Vec<bool> {
    fixpoint(true, word, |i, next| hold[i] && (stop[i] || next))
}

fn fixpoint(init: bool, word: &LassoWord, step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let n = word.span();
    let mut v = vec![init; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let nv = step(i, v[word.successor(i)]);
            if nv != v[i] {
                v[i] = nv;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}
