//! Planning with a hard LTL mission and prioritized soft LTL constraints.
//!
//! Formulas are translated to Büchi automata, composed with a labelled
//! transition system into a state-weighted product, and a minimum-cost
//! accepting lasso is extracted from that product.

pub mod automata;
pub mod baseline;
pub mod cache;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod graph;
pub mod ltl;
pub mod planner;
pub mod product;
pub mod random;
pub mod synthesis;
pub mod ts;

pub use automata::{translate, Alphabet, BuchiAutomaton, GeneralizedBuchiAutomaton, Label};
pub use error::{Error, Result};
pub use ltl::{eval_lasso, parse_ltl, to_nnf, LassoWord, Letter, LtlFormula};
pub use product::{build_product, cost_of_vector, Cost, ProductAutomaton, WeightVector};
pub use ts::{trace_of, Problem, TransitionSystem, TsPath};
