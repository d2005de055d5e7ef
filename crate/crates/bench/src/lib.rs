//! Inputs shared by the benchmarks.

use softltl_core::random::{generate_random_product, RandomSpec};
use softltl_core::{parse_ltl, LtlFormula, ProductAutomaton};

/// Sparse random product with the experiment defaults (ten soft bits).
pub fn random_product(states: usize, seed: u64) -> ProductAutomaton {
    generate_random_product(&RandomSpec::sparse(states, 10, seed)).expect("valid spec")
}

/// Mission-shaped formulas over `a, b, c`.
pub fn formulas() -> Vec<(&'static str, LtlFormula)> {
    const AP: [&str; 3] = ["a", "b", "c"];
    [
        "G F a & G F b & G F c",
        "G (a -> X (!a U b)) & G (b -> X (!b U a))",
        "G ((c & a) -> (!b U c))",
        "G ((!a & X a) -> X X a)",
        "F G (a | b) & G (c -> F a)",
    ]
    .into_iter()
    .map(|s| (s, parse_ltl(s, &AP).expect("formula parses")))
    .collect()
}
