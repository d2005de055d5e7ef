use super::{BuchiAutomaton, Transition};

/// Completes `b` with a non-accepting trap state that loops on every letter
/// and receives every missing transition. A total automaton is returned as is.
pub fn make_nonblocking(b: &BuchiAutomaton) -> BuchiAutomaton {
    if b.is_total() {
        return b.clone();
    }
    let trap = b.state_count();
    let mut transitions = b.transitions().to_vec();
    for q in 0..b.state_count() {
        for label in b.alphabet().labels() {
            if b.successors(q, label).is_empty() {
                transitions.push(Transition {
                    src: q,
                    label,
                    dst: trap,
                });
            }
        }
    }
    for label in b.alphabet().labels() {
        transitions.push(Transition {
            src: trap,
            label,
            dst: trap,
        });
    }
    let mut accepting = b.accepting().to_vec();
    accepting.push(false);
    BuchiAutomaton::new(b.alphabet().clone(), trap + 1, b.init(), accepting, transitions)
        .expect("completion preserves automaton invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{translate, Alphabet, Label};
    use crate::ltl::LtlFormula;

    #[test]
    fn total_automaton_is_unchanged() {
        let ap = Alphabet::new(["p"]).unwrap();
        let b = translate(&LtlFormula::True, &ap).unwrap();
        assert!(b.is_total());
        let c = make_nonblocking(&b);
        assert_eq!(c.state_count(), b.state_count());
        assert_eq!(c.transitions(), b.transitions());
    }

    #[test]
    fn empty_automaton_gets_a_trap() {
        let ap = Alphabet::new(["p"]).unwrap();
        let b = BuchiAutomaton::new(ap, 1, 0, vec![true], vec![]).unwrap();
        let c = make_nonblocking(&b);
        assert_eq!(c.state_count(), 2);
        assert_eq!(c.successors(0, Label(0)), &[1]);
        assert_eq!(c.successors(0, Label(1)), &[1]);
        assert_eq!(c.successors(1, Label(0)), &[1]);
        assert!(!c.is_accepting(1));
        assert!(c.is_total());
    }
}
