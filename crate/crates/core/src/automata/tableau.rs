//! On-the-fly tableau translation from NNF LTL to a generalized Büchi
//! automaton, in the style of Gerth, Peled, Vardi and Wolper.
//!
//! Tableau nodes carry the usual `New`/`Old`/`Next` obligation sets over an
//! interned closure of subformulas. A finished node becomes an automaton
//! state; the transition into it reads any letter consistent with the
//! literals in its `Old` set. Each Until subformula `a U b` contributes the
//! acceptance set of nodes where it is either not pending or `b` holds.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};

use super::{Alphabet, GeneralizedBuchiAutomaton, Label, Transition};
use crate::error::{Error, Result};
use crate::ltl::{to_nnf, LtlFormula};

type Id = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit { atom: usize, positive: bool },
    And(Id, Id),
    Or(Id, Id),
    Next(Id),
    Until(Id, Id),
    Release(Id, Id),
}

#[derive(Default)]
struct Closure {
    nodes: Vec<Node>,
    ids: HashMap<Node, Id>,
}

impl Closure {
    fn intern(&mut self, node: Node) -> Id {
        match self.ids.entry(node) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                self.nodes.push(node);
                *e.insert(self.nodes.len() - 1)
            }
        }
    }

    fn lookup(&self, node: Node) -> Option<Id> {
        self.ids.get(&node).copied()
    }

    fn add(&mut self, f: &LtlFormula, alphabet: &Alphabet) -> Result<Id> {
        let node = match f {
            LtlFormula::True => Node::True,
            LtlFormula::False => Node::False,
            LtlFormula::Atom(name) => Node::Lit {
                atom: atom_index(alphabet, name)?,
                positive: true,
            },
            LtlFormula::Not(g) => match &**g {
                LtlFormula::Atom(name) => Node::Lit {
                    atom: atom_index(alphabet, name)?,
                    positive: false,
                },
                _ => unreachable!("negation above a non-atom after NNF"),
            },
            LtlFormula::And(a, b) => Node::And(self.add(a, alphabet)?, self.add(b, alphabet)?),
            LtlFormula::Or(a, b) => Node::Or(self.add(a, alphabet)?, self.add(b, alphabet)?),
            LtlFormula::Next(a) => Node::Next(self.add(a, alphabet)?),
            LtlFormula::Until(a, b) => Node::Until(self.add(a, alphabet)?, self.add(b, alphabet)?),
            LtlFormula::Release(a, b) => Node::Release(self.add(a, alphabet)?, self.add(b, alphabet)?),
            LtlFormula::Implies(..) | LtlFormula::Eventually(_) | LtlFormula::Globally(_) => {
                unreachable!("derived operator after NNF")
            }
        };
        Ok(self.intern(node))
    }
}

fn atom_index(alphabet: &Alphabet, name: &str) -> Result<usize> {
    alphabet
        .index_of(name)
        .ok_or_else(|| Error::AlphabetMismatch(format!("`{name}` is not in the alphabet")))
}

/// Incoming edge source: the initial pseudo-state or a finished node.
const INIT: usize = usize::MAX;

struct Pending {
    incoming: BTreeSet<usize>,
    new: BTreeSet<Id>,
    old: BTreeSet<Id>,
    next: BTreeSet<Id>,
}

struct Finished {
    incoming: BTreeSet<usize>,
    old: BTreeSet<Id>,
}

/// Translates `formula` into a generalized Büchi automaton over `alphabet`.
///
/// The formula is brought into negation normal form first. State 0 is the
/// initial state; it is omitted in favour of an equivalent tableau node when
/// one has exactly the same outgoing transitions.
pub fn ltl_to_gba(formula: &LtlFormula, alphabet: &Alphabet) -> Result<GeneralizedBuchiAutomaton> {
    let formula = if formula.is_nnf() {
        formula.clone()
    } else {
        to_nnf(formula)
    };
    let mut closure = Closure::default();
    let root = closure.add(&formula, alphabet)?;

    let mut finished: Vec<Finished> = Vec::new();
    let mut by_key: HashMap<(BTreeSet<Id>, BTreeSet<Id>), usize> = HashMap::new();
    let mut work = vec![Pending {
        incoming: BTreeSet::from([INIT]),
        new: BTreeSet::from([root]),
        old: BTreeSet::new(),
        next: BTreeSet::new(),
    }];

    while let Some(mut node) = work.pop() {
        let Some(&eta) = node.new.iter().next() else {
            let key = (node.old, node.next);
            match by_key.get(&key) {
                Some(&existing) => finished[existing].incoming.extend(node.incoming),
                None => {
                    let id = finished.len();
                    let (old, next) = key.clone();
                    by_key.insert(key, id);
                    finished.push(Finished {
                        incoming: node.incoming,
                        old,
                    });
                    work.push(Pending {
                        incoming: BTreeSet::from([id]),
                        new: next,
                        old: BTreeSet::new(),
                        next: BTreeSet::new(),
                    });
                }
            }
            continue;
        };
        node.new.remove(&eta);
        if node.old.contains(&eta) {
            work.push(node);
            continue;
        }
        match closure.nodes[eta] {
            Node::True => work.push(node),
            Node::False => {}
            Node::Lit { atom, positive } => {
                let complement = closure.lookup(Node::Lit {
                    atom,
                    positive: !positive,
                });
                if complement.is_some_and(|c| node.old.contains(&c)) {
                    continue;
                }
                node.old.insert(eta);
                work.push(node);
            }
            Node::And(a, b) => {
                node.old.insert(eta);
                for f in [a, b] {
                    if !node.old.contains(&f) {
                        node.new.insert(f);
                    }
                }
                work.push(node);
            }
            Node::Next(a) => {
                node.old.insert(eta);
                node.next.insert(a);
                work.push(node);
            }
            Node::Or(a, b) => split(&mut work, node, eta, &[a], &[], &[b]),
            Node::Until(a, b) => split(&mut work, node, eta, &[a], &[eta], &[b]),
            Node::Release(a, b) => split(&mut work, node, eta, &[b], &[eta], &[a, b]),
        }
    }

    // State 0 is the initial pseudo-state, node k is state k + 1.
    let state_of = |src: usize| if src == INIT { 0 } else { src + 1 };
    let mut transitions = Vec::new();
    for (k, node) in finished.iter().enumerate() {
        let (pos, neg) = literal_masks(&closure, &node.old);
        for label in consistent_labels(alphabet, pos, neg) {
            for &src in &node.incoming {
                transitions.push(Transition {
                    src: state_of(src),
                    label,
                    dst: k + 1,
                });
            }
        }
    }
    let state_count = finished.len() + 1;

    let mut acceptance: Vec<Vec<bool>> = Vec::new();
    for (id, node) in closure.nodes.iter().enumerate() {
        if let Node::Until(_, b) = *node {
            let mut set = vec![false; state_count];
            for (k, f) in finished.iter().enumerate() {
                set[k + 1] = !f.old.contains(&id) || f.old.contains(&b);
            }
            acceptance.push(set);
        }
    }

    let (state_count, init, acceptance, transitions) = fold_initial_state(state_count, acceptance, transitions);
    GeneralizedBuchiAutomaton::new(alphabet.clone(), state_count, init, acceptance, transitions)
}

fn split(work: &mut Vec<Pending>, node: Pending, eta: Id, new1: &[Id], next1: &[Id], new2: &[Id]) {
    let mut old = node.old;
    old.insert(eta);
    let mut second_new = node.new.clone();
    second_new.extend(new2.iter().filter(|f| !old.contains(f)));
    let second = Pending {
        incoming: node.incoming.clone(),
        new: second_new,
        old: old.clone(),
        next: node.next.clone(),
    };
    let mut first_new = node.new;
    first_new.extend(new1.iter().filter(|f| !old.contains(f)));
    let mut first_next = node.next;
    first_next.extend(next1.iter().copied());
    let first = Pending {
        incoming: node.incoming,
        new: first_new,
        old,
        next: first_next,
    };
    // LIFO: the first branch is expanded first.
    work.push(second);
    work.push(first);
}

fn literal_masks(closure: &Closure, old: &BTreeSet<Id>) -> (u32, u32) {
    let mut pos = 0;
    let mut neg = 0;
    for &f in old {
        if let Node::Lit { atom, positive } = closure.nodes[f] {
            if positive {
                pos |= 1 << atom;
            } else {
                neg |= 1 << atom;
            }
        }
    }
    (pos, neg)
}

/// All letters containing `pos` and avoiding `neg`, ascending.
fn consistent_labels(alphabet: &Alphabet, pos: u32, neg: u32) -> Vec<Label> {
    let full = alphabet.letter_count() - 1;
    let free = full & !(pos | neg);
    let mut out = Vec::new();
    let mut sub = 0u32;
    loop {
        out.push(Label(pos | sub));
        // next subset of `free` in increasing order
        sub = sub.wrapping_sub(free) & free;
        if sub == 0 {
            break;
        }
    }
    out
}

/// The initial pseudo-state has no incoming transitions and is visited once,
/// so it can be replaced by any state with identical outgoing transitions.
fn fold_initial_state(
    state_count: usize,
    acceptance: Vec<Vec<bool>>,
    transitions: Vec<Transition>,
) -> (usize, usize, Vec<Vec<bool>>, Vec<Transition>) {
    let mut outgoing: Vec<BTreeSet<(Label, usize)>> = vec![BTreeSet::new(); state_count];
    for t in &transitions {
        outgoing[t.src].insert((t.label, t.dst));
    }
    let Some(twin) = (1..state_count).find(|&q| outgoing[q] == outgoing[0]) else {
        return (state_count, 0, acceptance, transitions);
    };
    let remap = |q: usize| q - 1;
    let transitions = transitions
        .into_iter()
        .filter(|t| t.src != 0)
        .map(|t| Transition {
            src: remap(t.src),
            label: t.label,
            dst: remap(t.dst),
        })
        .collect();
    let acceptance = acceptance.into_iter().map(|set| set[1..].to_vec()).collect();
    (state_count - 1, remap(twin), acceptance, transitions)
}
