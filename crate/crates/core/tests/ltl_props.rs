mod common;

use proptest::prelude::*;

use common::all_lassos;
use softltl_core::{eval_lasso, parse_ltl, to_nnf, LassoWord, Letter, LtlFormula};

const AP: [&str; 2] = ["p", "q"];

/// Formulas of the user grammar (no Release).
fn user_formula() -> impl Strategy<Value = LtlFormula> {
    formula_with(false)
}

fn formula() -> impl Strategy<Value = LtlFormula> {
    formula_with(true)
}

fn formula_with(release: bool) -> impl Strategy<Value = LtlFormula> {
    let leaf = prop_oneof![
        Just(LtlFormula::True),
        Just(LtlFormula::False),
        Just(LtlFormula::atom("p")),
        Just(LtlFormula::atom("q")),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let r = (inner.clone(), inner.clone()).prop_map(move |(a, b)| {
            if release {
                LtlFormula::release(a, b)
            } else {
                LtlFormula::until(b, a)
            }
        });
        prop_oneof![
            inner.clone().prop_map(LtlFormula::not),
            inner.clone().prop_map(LtlFormula::next),
            inner.clone().prop_map(LtlFormula::eventually),
            inner.clone().prop_map(LtlFormula::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LtlFormula::until(a, b)),
            r,
        ]
    })
}

fn letter() -> impl Strategy<Value = Letter> {
    (any::<bool>(), any::<bool>()).prop_map(|(p, q)| {
        let mut l = Letter::new();
        if p {
            l.insert("p".into());
        }
        if q {
            l.insert("q".into());
        }
        l
    })
}

fn lasso() -> impl Strategy<Value = LassoWord> {
    (
        prop::collection::vec(letter(), 0..4),
        prop::collection::vec(letter(), 1..4),
    )
        .prop_map(|(prefix, cycle)| LassoWord::new(prefix, cycle).unwrap())
}

proptest! {
    #[test]
    fn printing_then_parsing_is_identity(f in user_formula()) {
        let text = f.to_string();
        let back = parse_ltl(&text, &AP).unwrap();
        prop_assert_eq!(back, f, "printed as {}", text);
    }

    #[test]
    fn nnf_is_equivalent_and_normal(f in formula(), w in lasso()) {
        let n = to_nnf(&f);
        prop_assert!(n.is_nnf());
        prop_assert_eq!(eval_lasso(&f, &w), eval_lasso(&n, &w));
    }

    #[test]
    fn negation_flips_truth(f in formula(), w in lasso()) {
        prop_assert_ne!(eval_lasso(&f, &w), eval_lasso(&LtlFormula::not(f.clone()), &w));
    }

    #[test]
    fn rotating_the_cycle_into_the_prefix_keeps_truth(f in formula(), w in lasso()) {
        // p · (c0 c1 ..)^ω = p c0 · (c1 .. c0)^ω
        let mut prefix = w.prefix().to_vec();
        prefix.push(w.cycle()[0].clone());
        let mut cycle = w.cycle()[1..].to_vec();
        cycle.push(w.cycle()[0].clone());
        let unrolled = LassoWord::new(prefix, cycle).unwrap();
        prop_assert_eq!(eval_lasso(&f, &w), eval_lasso(&f, &unrolled));
    }

    #[test]
    fn next_reads_the_shifted_word(f in formula(), w in lasso()) {
        prop_assert_eq!(eval_lasso(&LtlFormula::next(f.clone()), &w), eval_lasso(&f, &w.shift()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nnf_agrees_on_every_short_lasso(f in formula()) {
        let n = to_nnf(&f);
        for w in all_lassos(&AP, 5) {
            prop_assert_eq!(eval_lasso(&f, &w), eval_lasso(&n, &w), "{:?}", w);
        }
    }
}

#[test]
fn textbook_identities_on_a_fixed_word() {
    // p p q (p)^ω
    let w = LassoWord::from_strs(&[&["p"], &["p"], &["q"]], &[&["p"]]).unwrap();
    let holds = |s: &str| eval_lasso(&parse_ltl(s, &AP).unwrap(), &w);
    assert!(holds("p U q"));
    assert!(holds("F G p"));
    assert!(!holds("G p"));
    assert!(holds("X X q"));
    assert!(!holds("G F q"));
    let release = LtlFormula::release(LtlFormula::atom("p"), parse_ltl("p | q", &AP).unwrap());
    assert!(eval_lasso(&release, &w));
}

#[test]
fn parser_rejects_unknown_atoms_and_garbage() {
    assert!(parse_ltl("G r", &AP).is_err());
    assert!(parse_ltl("p U", &AP).is_err());
    assert!(parse_ltl("(p", &AP).is_err());
}
