use super::{BuchiAutomaton, GeneralizedBuchiAutomaton, Transition};

/// Counter construction: state `(q, j)` is index `j * |Q| + q`. Layer `j`
/// waits for `F_j`; leaving a state of `F_j` moves to layer `j + 1 mod k`.
/// Accepting states are `F_0` on layer 0. With an empty family every state
/// is accepting and the single layer is a copy of the input.
pub fn degeneralize(g: &GeneralizedBuchiAutomaton) -> BuchiAutomaton {
    let n = g.state_count();
    let family = g.acceptance();
    let layers = family.len().max(1);

    let mut accepting = vec![false; n * layers];
    if family.is_empty() {
        accepting.iter_mut().for_each(|a| *a = true);
    } else {
        accepting[..n].copy_from_slice(&family[0][..n]);
    }

    let mut transitions = Vec::with_capacity(g.transitions().len() * layers);
    for layer in 0..layers {
        for t in g.transitions() {
            let advance = !family.is_empty() && family[layer][t.src];
            let to_layer = if advance { (layer + 1) % layers } else { layer };
            transitions.push(Transition {
                src: layer * n + t.src,
                label: t.label,
                dst: to_layer * n + t.dst,
            });
        }
    }

    BuchiAutomaton::new(g.alphabet().clone(), n * layers, g.init(), accepting, transitions)
        .expect("degeneralization preserves automaton invariants")
}
