use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{Alphabet, BuchiAutomaton, Transition};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDump {
    pub src: usize,
    pub label: Vec<String>,
    pub dst: usize,
}

/// JSON form of a Büchi automaton.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonDump {
    pub format: u64,
    pub ap: Vec<String>,
    pub states: usize,
    pub init: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<TransitionDump>,
}

impl From<&BuchiAutomaton> for AutomatonDump {
    fn from(b: &BuchiAutomaton) -> Self {
        AutomatonDump {
            format: 1,
            ap: b.alphabet().atoms().to_vec(),
            states: b.state_count(),
            init: b.init(),
            accepting: (0..b.state_count()).filter(|&q| b.is_accepting(q)).collect(),
            transitions: b
                .transitions()
                .iter()
                .map(|t| TransitionDump {
                    src: t.src,
                    label: b.alphabet().decode(t.label).into_iter().map(String::from).collect(),
                    dst: t.dst,
                })
                .collect(),
        }
    }
}

impl TryFrom<AutomatonDump> for BuchiAutomaton {
    type Error = Error;

    fn try_from(dump: AutomatonDump) -> Result<Self> {
        if dump.format != 1 {
            return Err(Error::FormatVersion(dump.format));
        }
        let alphabet = Alphabet::new(dump.ap)?;
        let mut accepting = vec![false; dump.states];
        for q in dump.accepting {
            *accepting
                .get_mut(q)
                .ok_or_else(|| Error::Schema(format!("accepting state {q} out of range")))? = true;
        }
        let transitions = dump
            .transitions
            .iter()
            .map(|t| {
                Ok(Transition {
                    src: t.src,
                    label: alphabet.encode_strict(&t.label)?,
                    dst: t.dst,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BuchiAutomaton::new(alphabet, dump.states, dump.init, accepting, transitions)
    }
}

/// Graphviz rendering; parallel transitions between two states are merged
/// into one edge listing all of their letters.
pub fn to_dot(b: &BuchiAutomaton) -> String {
    let mut out = String::from("digraph buchi {\n  rankdir=LR;\n  init [shape=point];\n");
    for q in 0..b.state_count() {
        let shape = if b.is_accepting(q) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  q{q} [shape={shape}];");
    }
    let _ = writeln!(out, "  init -> q{};", b.init());
    let mut edges: BTreeMap<(usize, usize), Vec<String>> = BTreeMap::new();
    for t in b.transitions() {
        let atoms = b.alphabet().decode(t.label);
        edges
            .entry((t.src, t.dst))
            .or_default()
            .push(format!("{{{}}}", atoms.join(",")));
    }
    for ((src, dst), letters) in edges {
        let _ = writeln!(out, "  q{src} -> q{dst} [label=\"{}\"];", letters.join(" "));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::translate;
    use crate::ltl::parse_ltl;

    #[test]
    fn dump_round_trip() {
        let ap = Alphabet::new(["p", "q"]).unwrap();
        let b = translate(&parse_ltl("p U q", &["p", "q"]).unwrap(), &ap).unwrap();
        let dump = AutomatonDump::from(&b);
        let json = serde_json::to_string(&dump).unwrap();
        let back: AutomatonDump = serde_json::from_str(&json).unwrap();
        let b2 = BuchiAutomaton::try_from(back).unwrap();
        assert_eq!(b2.transitions(), b.transitions());
        assert_eq!(b2.accepting(), b.accepting());
        assert_eq!(b2.init(), b.init());
    }

    #[test]
    fn dot_has_one_edge_per_state_pair() {
        let ap = Alphabet::new(["p"]).unwrap();
        let b = translate(&crate::ltl::LtlFormula::True, &ap).unwrap();
        let dot = to_dot(&b);
        assert_eq!(dot.matches("q0 -> q0").count(), 1);
        assert!(dot.contains("{} {p}"));
        assert!(dot.contains("doublecircle"));
    }
}
