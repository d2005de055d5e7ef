//! Transition systems `(S, R, s0, AP, L)` and the JSON instance format.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::automata::{Alphabet, Label};
use crate::error::{Error, Result};
use crate::ltl::{parse_ltl, LassoWord, Letter, LtlFormula};

/// A finite, nonblocking, labeled transition system.
///
/// State identifiers are mapped to dense indices in declaration order;
/// successor lists are ascending.
#[derive(Clone, Debug)]
pub struct TransitionSystem {
    alphabet: Alphabet,
    ids: Vec<String>,
    index: HashMap<String, usize>,
    labels: Vec<Letter>,
    encoded: Vec<Label>,
    successors: Vec<Vec<u32>>,
    init: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDoc {
    pub id: String,
    #[serde(default)]
    pub labels: Vec<String>,
}

/// The on-disk instance format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<u64>,
    pub ap: Vec<String>,
    pub states: Vec<StateDoc>,
    pub init: String,
    pub edges: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl TransitionSystem {
    /// Validates a parsed instance document.
    pub fn from_document(doc: &TsDocument) -> Result<Self> {
        if let Some(v) = doc.format {
            if v != 1 {
                return Err(Error::FormatVersion(v));
            }
        }
        let alphabet = Alphabet::new(doc.ap.iter().cloned())?;
        if doc.states.is_empty() {
            return Err(Error::Schema("no states declared".into()));
        }
        let mut index = HashMap::new();
        let mut labels = Vec::with_capacity(doc.states.len());
        for (i, s) in doc.states.iter().enumerate() {
            if index.insert(s.id.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate state `{}`", s.id)));
            }
            let mut letter = Letter::new();
            for atom in &s.labels {
                if alphabet.index_of(atom).is_none() {
                    return Err(Error::UnknownLabel {
                        state: s.id.clone(),
                        atom: atom.clone(),
                    });
                }
                letter.insert(atom.clone());
            }
            labels.push(letter);
        }
        let init = *index
            .get(&doc.init)
            .ok_or_else(|| Error::DanglingEdge(doc.init.clone()))?;
        let mut successors: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); doc.states.len()];
        for (from, to) in &doc.edges {
            let a = *index.get(from).ok_or_else(|| Error::DanglingEdge(from.clone()))?;
            let b = *index.get(to).ok_or_else(|| Error::DanglingEdge(to.clone()))?;
            successors[a].insert(b as u32);
        }
        if let Some(i) = successors.iter().position(BTreeSet::is_empty) {
            return Err(Error::BlockingState(doc.states[i].id.clone()));
        }
        let encoded = labels.iter().map(|l| alphabet.encode(l)).collect();
        Ok(TransitionSystem {
            alphabet,
            ids: doc.states.iter().map(|s| s.id.clone()).collect(),
            index,
            labels,
            encoded,
            successors: successors.into_iter().map(|s| s.into_iter().collect()).collect(),
            init,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TsDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    pub fn to_document(&self) -> TsDocument {
        TsDocument {
            format: Some(1),
            ap: self.alphabet.atoms().to_vec(),
            states: self
                .ids
                .iter()
                .zip(&self.labels)
                .map(|(id, l)| StateDoc {
                    id: id.clone(),
                    labels: l.iter().cloned().collect(),
                })
                .collect(),
            init: self.ids[self.init].clone(),
            edges: (0..self.state_count())
                .flat_map(|s| {
                    self.successors[s]
                        .iter()
                        .map(move |&t| (self.ids[s].clone(), self.ids[t as usize].clone()))
                })
                .collect(),
            notes: Vec::new(),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.ids.len()
    }

    pub fn init(&self) -> usize {
        self.init
    }

    pub fn id(&self, state: usize) -> &str {
        &self.ids[state]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn label(&self, state: usize) -> &Letter {
        &self.labels[state]
    }

    /// `L(s)` as a letter of the alphabet.
    pub fn encoded_label(&self, state: usize) -> Label {
        self.encoded[state]
    }

    pub fn successors(&self, state: usize) -> &[u32] {
        &self.successors[state]
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.successors[from].binary_search(&(to as u32)).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }
}

/// An infinite path `prefix · cycle^ω` of TS state indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TsPath {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
}

impl TsPath {
    /// Checks adjacency including the prefix/cycle junction and the wrap
    /// from the last cycle state back to the first.
    pub fn validate(&self, ts: &TransitionSystem) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::InvalidPath("cycle is empty".into()));
        }
        let all: Vec<usize> = self.prefix.iter().chain(&self.cycle).copied().collect();
        if let Some(&s) = all.iter().find(|&&s| s >= ts.state_count()) {
            return Err(Error::InvalidPath(format!("state index {s} out of range")));
        }
        for w in all.windows(2) {
            if !ts.has_edge(w[0], w[1]) {
                return Err(Error::InvalidPath(format!(
                    "no edge {} -> {}",
                    ts.id(w[0]),
                    ts.id(w[1])
                )));
            }
        }
        let (last, first) = (self.cycle[self.cycle.len() - 1], self.cycle[0]);
        if !ts.has_edge(last, first) {
            return Err(Error::InvalidPath(format!(
                "cycle does not close: no edge {} -> {}",
                ts.id(last),
                ts.id(first)
            )));
        }
        Ok(())
    }

    pub fn starts_at(&self) -> usize {
        self.prefix.first().copied().unwrap_or(self.cycle[0])
    }
}

/// The trace `L(s0) L(s1) ...` with the prefix/cycle split preserved.
pub fn trace_of(ts: &TransitionSystem, path: &TsPath) -> Result<LassoWord> {
    path.validate(ts)?;
    let letters = |states: &[usize]| states.iter().map(|&s| ts.label(s).clone()).collect();
    LassoWord::new(letters(&path.prefix), letters(&path.cycle))
}

/// Problem file: a transition system, a hard mission and soft constraints in
/// decreasing priority.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<u64>,
    pub ts: TsDocument,
    pub hard: String,
    #[serde(default)]
    pub soft: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

/// A parsed and validated planning problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub ts: TransitionSystem,
    pub hard: LtlFormula,
    pub softs: Vec<LtlFormula>,
}

impl Problem {
    pub fn from_document(doc: &ProblemDocument) -> Result<Self> {
        if let Some(v) = doc.format {
            if v != 1 {
                return Err(Error::FormatVersion(v));
            }
        }
        let ts = TransitionSystem::from_document(&doc.ts)?;
        let ap = ts.alphabet().atoms();
        let hard = parse_ltl(&doc.hard, ap)?;
        let softs = doc.soft.iter().map(|s| parse_ltl(s, ap)).collect::<Result<Vec<_>>>()?;
        Ok(Problem { ts, hard, softs })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProblemDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }

    /// The same problem with soft constraints reordered: position `j` of the
    /// result holds the original constraint `permutation[j]` (1-based).
    pub fn permuted(&self, permutation: &[usize]) -> Result<Problem> {
        let order = crate::product::validate_permutation(permutation, self.softs.len())?;
        Ok(Problem {
            ts: self.ts.clone(),
            hard: self.hard.clone(),
            softs: order.iter().map(|&i| self.softs[i].clone()).collect(),
        })
    }
}
