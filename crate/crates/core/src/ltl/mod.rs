//! Linear temporal logic: abstract syntax, concrete syntax, negation normal
//! form and direct evaluation on ultimately periodic words.
//!
//! The surface grammar accepted by [`parse_ltl`] is
//!
//! ```text
//! φ ::= true | false | ident | !φ | φ & φ | φ | φ | φ -> φ
//!     | X φ | F φ | G φ | φ U φ | (φ)
//! ```
//!
//! with unary operators binding tightest, then `U` (right associative),
//! `&`, `|`, and finally `->` (right associative). `Release` only appears in
//! formulas produced by [`to_nnf`].

mod eval;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use eval::{eval_lasso, satisfied_set, LassoWord, Letter};
pub use parser::parse_ltl;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LtlFormula {
    True,
    False,
    Atom(String),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    Release(Box<LtlFormula>, Box<LtlFormula>),
    Eventually(Box<LtlFormula>),
    Globally(Box<LtlFormula>),
}

impl LtlFormula {
    pub fn atom(name: impl Into<String>) -> Self {
        LtlFormula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: LtlFormula) -> Self {
        LtlFormula::Not(Box::new(f))
    }

    pub fn and(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: LtlFormula) -> Self {
        LtlFormula::Next(Box::new(f))
    }

    pub fn until(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: LtlFormula, b: LtlFormula) -> Self {
        LtlFormula::Release(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: LtlFormula) -> Self {
        LtlFormula::Eventually(Box::new(f))
    }

    pub fn globally(f: LtlFormula) -> Self {
        LtlFormula::Globally(Box::new(f))
    }

    /// Conjunction of all formulas; `true` for an empty iterator.
    pub fn conjunction<I: IntoIterator<Item = LtlFormula>>(formulas: I) -> Self {
        formulas.into_iter().reduce(LtlFormula::and).unwrap_or(LtlFormula::True)
    }

    /// The atomic propositions mentioned in the formula.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            LtlFormula::True | LtlFormula::False => {}
            LtlFormula::Atom(name) => {
                out.insert(name.as_str());
            }
            LtlFormula::Not(f) | LtlFormula::Next(f) | LtlFormula::Eventually(f) | LtlFormula::Globally(f) => {
                f.collect_atoms(out)
            }
            LtlFormula::And(a, b)
            | LtlFormula::Or(a, b)
            | LtlFormula::Implies(a, b)
            | LtlFormula::Until(a, b)
            | LtlFormula::Release(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            LtlFormula::True | LtlFormula::False | LtlFormula::Atom(_) => 1,
            LtlFormula::Not(f) | LtlFormula::Next(f) | LtlFormula::Eventually(f) | LtlFormula::Globally(f) => {
                1 + f.size()
            }
            LtlFormula::And(a, b)
            | LtlFormula::Or(a, b)
            | LtlFormula::Implies(a, b)
            | LtlFormula::Until(a, b)
            | LtlFormula::Release(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// True when negations occur only directly above atoms and no derived
    /// operator (`F`, `G`, `->`) is left.
    pub fn is_nnf(&self) -> bool {
        match self {
            LtlFormula::True | LtlFormula::False | LtlFormula::Atom(_) => true,
            LtlFormula::Not(f) => matches!(**f, LtlFormula::Atom(_)),
            LtlFormula::Next(f) => f.is_nnf(),
            LtlFormula::And(a, b) | LtlFormula::Or(a, b) | LtlFormula::Until(a, b) | LtlFormula::Release(a, b) => {
                a.is_nnf() && b.is_nnf()
            }
            LtlFormula::Implies(..) | LtlFormula::Eventually(_) | LtlFormula::Globally(_) => false,
        }
    }
}

/// Rewrites `f` into negation normal form.
///
/// `F φ` becomes `true U φ`, `G φ` becomes `false R φ` and `a -> b` becomes
/// `!a | b`; negations are pushed down using the Until/Release and And/Or
/// dualities and the self-duality of Next.
pub fn to_nnf(f: &LtlFormula) -> LtlFormula {
    nnf(f, false)
}

fn nnf(f: &LtlFormula, negated: bool) -> LtlFormula {
    use LtlFormula as L;
    match (f, negated) {
        (L::True, false) | (L::False, true) => L::True,
        (L::True, true) | (L::False, false) => L::False,
        (L::Atom(name), false) => L::Atom(name.clone()),
        (L::Atom(name), true) => L::not(L::Atom(name.clone())),
        (L::Not(g), _) => nnf(g, !negated),
        (L::And(a, b), false) => L::and(nnf(a, false), nnf(b, false)),
        (L::And(a, b), true) => L::or(nnf(a, true), nnf(b, true)),
        (L::Or(a, b), false) => L::or(nnf(a, false), nnf(b, false)),
        (L::Or(a, b), true) => L::and(nnf(a, true), nnf(b, true)),
        (L::Implies(a, b), false) => L::or(nnf(a, true), nnf(b, false)),
        (L::Implies(a, b), true) => L::and(nnf(a, false), nnf(b, true)),
        (L::Next(g), _) => L::next(nnf(g, negated)),
        (L::Until(a, b), false) => L::until(nnf(a, false), nnf(b, false)),
        (L::Until(a, b), true) => L::release(nnf(a, true), nnf(b, true)),
        (L::Release(a, b), false) => L::release(nnf(a, false), nnf(b, false)),
        (L::Release(a, b), true) => L::until(nnf(a, true), nnf(b, true)),
        (L::Eventually(g), false) => L::until(L::True, nnf(g, false)),
        (L::Eventually(g), true) => L::release(L::False, nnf(g, true)),
        (L::Globally(g), false) => L::release(L::False, nnf(g, false)),
        (L::Globally(g), true) => L::until(L::True, nnf(g, true)),
    }
}

impl fmt::Display for LtlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LtlFormula::True => write!(f, "true"),
            LtlFormula::False => write!(f, "false"),
            LtlFormula::Atom(name) => write!(f, "{name}"),
            LtlFormula::Not(g) => write!(f, "!{g}"),
            LtlFormula::Next(g) => write!(f, "X {g}"),
            LtlFormula::Eventually(g) => write!(f, "F {g}"),
            LtlFormula::Globally(g) => write!(f, "G {g}"),
            LtlFormula::And(a, b) => write!(f, "({a} & {b})"),
            LtlFormula::Or(a, b) => write!(f, "({a} | {b})"),
            LtlFormula::Implies(a, b) => write!(f, "({a} -> {b})"),
            LtlFormula::Until(a, b) => write!(f, "({a} U {b})"),
            LtlFormula::Release(a, b) => write!(f, "({a} R {b})"),
        }
    }
}
