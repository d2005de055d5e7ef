use super::BuchiAutomaton;
use crate::graph::tarjan;
use crate::ltl::LassoWord;

/// Decides whether `b` accepts `word`.
///
/// Runs of `b` on the word are paths in the finite graph of
/// `(state, folded position)` pairs; the word is accepted iff a pair with an
/// accepting state lies on a cycle reachable from `(init, 0)`. Propositions
/// outside the automaton's alphabet are ignored.
pub fn accepts_lasso(b: &BuchiAutomaton, word: &LassoWord) -> bool {
    let span = word.span();
    let labels: Vec<_> = (0..span).map(|i| b.alphabet().encode(word.letter_at(i))).collect();
    let node = |q: usize, i: usize| q * span + i;
    let node_count = b.state_count() * span;

    let adjacency: Vec<Vec<u32>> = (0..node_count)
        .map(|v| {
            let (q, i) = (v / span, v % span);
            let next = word.successor(i);
            b.successors(q, labels[i])
                .iter()
                .map(|&q2| node(q2, next) as u32)
                .collect()
        })
        .collect();

    tarjan(node_count, &[node(b.init(), 0)], |v| &adjacency[v])
        .into_iter()
        .any(|c| {
            let cyclic = c.members.len() > 1 || adjacency[c.leader].contains(&(c.leader as u32));
            cyclic && c.members.iter().any(|&v| b.is_accepting(v / span))
        })
}
