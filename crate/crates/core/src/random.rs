//! Seeded random instances: synthetic products for the experiments and small
//! planning problems for oracle cross-checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ltl::LtlFormula;
use crate::product::{ProductAutomaton, WeightVector};
use crate::ts::{Problem, StateDoc, TransitionSystem, TsDocument};

/// Parameters of an Erdős–Rényi product instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomSpec {
    pub states: usize,
    /// Probability of each ordered pair (self-loops included) being an edge.
    pub edge_probability: f64,
    pub accepting_fraction: f64,
    pub soft_count: usize,
    /// Probability of each weight bit being `T`.
    pub weight_probability: f64,
    pub seed: u64,
}

impl RandomSpec {
    /// About five edges per state, a fifth of the states accepting and
    /// weight bits set with probability 0.2.
    pub fn sparse(states: usize, soft_count: usize, seed: u64) -> Self {
        RandomSpec {
            states,
            edge_probability: (5.0 / states.max(1) as f64).min(1.0),
            accepting_fraction: 0.2,
            soft_count,
            weight_probability: 0.2,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.states == 0 {
            return Err(Error::Schema("random instance needs at least one state".into()));
        }
        if !unit(self.edge_probability) || !unit(self.accepting_fraction) || !unit(self.weight_probability) {
            return Err(Error::Schema("probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Synthetic product: state 0 initial, restricted to what it reaches.
pub fn generate_random_product(spec: &RandomSpec) -> Result<ProductAutomaton> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.states;
    let successors: Vec<Vec<u32>> = (0..n)
        .map(|_| (0..n as u32).filter(|_| rng.gen_bool(spec.edge_probability)).collect())
        .collect();
    let accepting = (0..n).map(|_| rng.gen_bool(spec.accepting_fraction)).collect();
    let weights = (0..n)
        .map(|_| {
            WeightVector::new(
                (0..spec.soft_count)
                    .map(|_| rng.gen_bool(spec.weight_probability))
                    .collect(),
            )
        })
        .collect();
    ProductAutomaton::from_parts(0, successors, accepting, weights, None)
}

/// Parameters of a small random planning problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub ts_states: usize,
    pub atoms: usize,
    pub soft_count: usize,
    pub seed: u64,
}

/// A random TS (every state gets one to three successors) with a random
/// hard mission and random soft constraints over atoms `a, b, ...`.
pub fn generate_random_problem(spec: &ProblemSpec) -> Result<Problem> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let ap: Vec<String> = (0..spec.atoms)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let ids: Vec<String> = (0..spec.ts_states.max(1)).map(|i| format!("s{i}")).collect();
    let states = ids
        .iter()
        .map(|id| StateDoc {
            id: id.clone(),
            labels: ap.iter().filter(|_| rng.gen_bool(0.4)).cloned().collect(),
        })
        .collect();
    let mut edges = Vec::new();
    for id in &ids {
        let k = rng.gen_range(1..=3.min(ids.len()));
        for target in ids.choose_multiple(&mut rng, k) {
            edges.push((id.clone(), target.clone()));
        }
    }
    let ts = TransitionSystem::from_document(&TsDocument {
        format: Some(1),
        ap: ap.clone(),
        states,
        init: ids[0].clone(),
        edges,
        notes: Vec::new(),
    })?;
    let hard = if rng.gen_bool(0.3) {
        LtlFormula::True
    } else {
        random_formula(&mut rng, &ap, 2)
    };
    let softs = (0..spec.soft_count).map(|_| random_formula(&mut rng, &ap, 2)).collect();
    Ok(Problem { ts, hard, softs })
}

/// Random formula of bounded operator depth, biased towards the shapes
/// that occur in missions (`F`, `G`, `G F`, `U`, response patterns).
pub fn random_formula<R: Rng>(rng: &mut R, ap: &[String], depth: usize) -> LtlFormula {
    let atom = |rng: &mut R| -> LtlFormula {
        if ap.is_empty() {
            return LtlFormula::True;
        }
        let a = LtlFormula::atom(ap[rng.gen_range(0..ap.len())].clone());
        if rng.gen_bool(0.3) {
            LtlFormula::not(a)
        } else {
            a
        }
    };
    if depth == 0 {
        return atom(rng);
    }
    let sub = |rng: &mut R| random_formula(rng, ap, depth - 1);
    match rng.gen_range(0..10) {
        0 => atom(rng),
        1 => LtlFormula::eventually(sub(rng)),
        2 => LtlFormula::globally(sub(rng)),
        3 => LtlFormula::globally(LtlFormula::eventually(atom(rng))),
        4 => LtlFormula::eventually(LtlFormula::globally(atom(rng))),
        5 => LtlFormula::until(sub(rng), sub(rng)),
        6 => LtlFormula::next(sub(rng)),
        7 => LtlFormula::globally(LtlFormula::implies(atom(rng), LtlFormula::eventually(atom(rng)))),
        8 => LtlFormula::and(sub(rng), sub(rng)),
        _ => LtlFormula::or(sub(rng), sub(rng)),
    }
}
