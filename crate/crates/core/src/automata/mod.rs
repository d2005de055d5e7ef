//! Büchi and generalized Büchi automata over an alphabet `2^AP`.
//!
//! Letters are bitmasks over the positions of an [`Alphabet`]; every
//! transition carries one explicit letter.

mod degeneralize;
mod export;
mod membership;
mod nonblocking;
mod tableau;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ltl::Letter;

pub use degeneralize::degeneralize;
pub use export::{to_dot, AutomatonDump, TransitionDump};
pub use membership::accepts_lasso;
pub use nonblocking::make_nonblocking;
pub use tableau::ltl_to_gba;

/// Ordered set of atomic propositions; position `i` is bit `i` of a [`Label`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    atoms: Vec<String>,
}

impl Alphabet {
    /// Letters are materialized per transition, so the alphabet is capped.
    pub const MAX_ATOMS: usize = 16;

    pub fn new<I, S>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let atoms: Vec<String> = atoms.into_iter().map(Into::into).collect();
        if atoms.len() > Self::MAX_ATOMS {
            return Err(Error::AlphabetTooLarge {
                got: atoms.len(),
                max: Self::MAX_ATOMS,
            });
        }
        for (i, a) in atoms.iter().enumerate() {
            if a.is_empty() {
                return Err(Error::Schema("empty proposition name".into()));
            }
            if atoms[..i].contains(a) {
                return Err(Error::Schema(format!("duplicate proposition `{a}`")));
            }
        }
        Ok(Alphabet { atoms })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn index_of(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    /// Number of letters, `2^|AP|`.
    pub fn letter_count(&self) -> u32 {
        1u32 << self.atoms.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> {
        (0..self.letter_count()).map(Label)
    }

    /// Encodes a letter; propositions outside the alphabet are ignored.
    pub fn encode(&self, letter: &Letter) -> Label {
        Label(
            letter
                .iter()
                .filter_map(|a| self.index_of(a))
                .fold(0, |acc, i| acc | (1 << i)),
        )
    }

    pub fn encode_strict<S: AsRef<str>>(&self, atoms: &[S]) -> Result<Label> {
        let mut bits = 0;
        for a in atoms {
            let i = self
                .index_of(a.as_ref())
                .ok_or_else(|| Error::AlphabetMismatch(format!("`{}` is not in the alphabet", a.as_ref())))?;
            bits |= 1 << i;
        }
        Ok(Label(bits))
    }

    pub fn decode(&self, label: Label) -> Vec<&str> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| label.0 & (1 << i) != 0)
            .map(|(_, a)| a.as_str())
            .collect()
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;
    fn try_from(atoms: Vec<String>) -> Result<Self> {
        Alphabet::new(atoms)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.atoms
    }
}

/// A letter of `2^AP` as a bitmask over alphabet positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: usize,
    pub label: Label,
    pub dst: usize,
}

/// Deduplicated transitions plus a `(state, label) -> successors` index.
#[derive(Clone, Debug)]
struct TransitionTable {
    transitions: Vec<Transition>,
    index: Vec<HashMap<Label, Vec<usize>>>,
}

impl TransitionTable {
    fn new(alphabet: &Alphabet, state_count: usize, mut transitions: Vec<Transition>) -> Result<Self> {
        let mut index: Vec<HashMap<Label, Vec<usize>>> = vec![HashMap::new(); state_count];
        transitions.sort_unstable();
        transitions.dedup();
        for t in &transitions {
            if t.src >= state_count || t.dst >= state_count {
                return Err(Error::Schema(format!(
                    "transition {} -> {} leaves the state space of size {}",
                    t.src, t.dst, state_count
                )));
            }
            if t.label.0 >= alphabet.letter_count() {
                return Err(Error::AlphabetMismatch(format!(
                    "label {:#b} uses propositions outside the alphabet",
                    t.label.0
                )));
            }
            index[t.src].entry(t.label).or_default().push(t.dst);
        }
        Ok(TransitionTable { transitions, index })
    }

    fn successors(&self, state: usize, label: Label) -> &[usize] {
        self.index[state].get(&label).map_or(&[], Vec::as_slice)
    }
}

/// Nondeterministic Büchi automaton with a single initial state.
#[derive(Clone, Debug)]
pub struct BuchiAutomaton {
    alphabet: Alphabet,
    init: usize,
    accepting: Vec<bool>,
    table: TransitionTable,
}

impl BuchiAutomaton {
    pub fn new(
        alphabet: Alphabet,
        state_count: usize,
        init: usize,
        accepting: Vec<bool>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        if init >= state_count {
            return Err(Error::Schema(format!(
                "initial state {init} outside {state_count} states"
            )));
        }
        if accepting.len() != state_count {
            return Err(Error::Schema("accepting flags do not cover the states".into()));
        }
        let table = TransitionTable::new(&alphabet, state_count, transitions)?;
        Ok(BuchiAutomaton {
            alphabet,
            init,
            accepting,
            table,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn accepting(&self) -> &[bool] {
        &self.accepting
    }

    /// Transitions sorted by `(src, label, dst)`.
    pub fn transitions(&self) -> &[Transition] {
        &self.table.transitions
    }

    /// Successors of `state` on `label`, ascending.
    pub fn successors(&self, state: usize, label: Label) -> &[usize] {
        self.table.successors(state, label)
    }

    /// Every state has a successor on every letter.
    pub fn is_total(&self) -> bool {
        (0..self.state_count()).all(|q| self.alphabet.labels().all(|l| !self.successors(q, l).is_empty()))
    }
}

/// Büchi automaton with a family of acceptance sets.
#[derive(Clone, Debug)]
pub struct GeneralizedBuchiAutomaton {
    alphabet: Alphabet,
    init: usize,
    state_count: usize,
    acceptance: Vec<Vec<bool>>,
    table: TransitionTable,
}

impl GeneralizedBuchiAutomaton {
    pub fn new(
        alphabet: Alphabet,
        state_count: usize,
        init: usize,
        acceptance: Vec<Vec<bool>>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        if init >= state_count {
            return Err(Error::Schema(format!(
                "initial state {init} outside {state_count} states"
            )));
        }
        if acceptance.iter().any(|set| set.len() != state_count) {
            return Err(Error::Schema("acceptance set does not cover the states".into()));
        }
        let table = TransitionTable::new(&alphabet, state_count, transitions)?;
        Ok(GeneralizedBuchiAutomaton {
            alphabet,
            init,
            state_count,
            acceptance,
            table,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn init(&self) -> usize {
        self.init
    }

    /// The acceptance family; `acceptance()[j][q]` is membership of `q` in `F_j`.
    pub fn acceptance(&self) -> &[Vec<bool>] {
        &self.acceptance
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.table.transitions
    }

    pub fn successors(&self, state: usize, label: Label) -> &[usize] {
        self.table.successors(state, label)
    }
}

/// Full pipeline: NNF, tableau, degeneralization.
pub fn translate(formula: &crate::ltl::LtlFormula, alphabet: &Alphabet) -> Result<BuchiAutomaton> {
    let gba = ltl_to_gba(&crate::ltl::to_nnf(formula), alphabet)?;
    Ok(degeneralize(&gba))
}
