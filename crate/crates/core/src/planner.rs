//! End-to-end planning: translate, build the product, synthesize, project,
//! and an automaton-free checker for claimed results.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::automata::{make_nonblocking, translate, BuchiAutomaton};
use crate::baseline::brute_force_with_budget;
use crate::cache::ReplanCache;
use crate::error::Result;
use crate::ltl::{eval_lasso, satisfied_set};
use crate::product::{build_product, cost_of_vector, ProductAutomaton, WeightVector};
use crate::synthesis::{minimum_cost_accepting_lasso, project_to_ts, resynthesize_with_priorities, Lasso};
use crate::ts::{trace_of, Problem, TransitionSystem, TsPath};

/// Wall-clock per phase, in milliseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub translate: f64,
    pub product: f64,
    pub synthesize: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// A problem with its automata and product built.
#[derive(Clone, Debug)]
pub struct CompiledProblem {
    pub problem: Problem,
    pub hard: BuchiAutomaton,
    pub softs: Vec<BuchiAutomaton>,
    pub product: ProductAutomaton,
    pub timings: Timings,
}

pub fn compile(problem: &Problem) -> Result<CompiledProblem> {
    let alphabet = problem.ts.alphabet();
    let t = Instant::now();
    let hard = translate(&problem.hard, alphabet)?;
    let softs = problem
        .softs
        .iter()
        .map(|f| translate(f, alphabet).map(|b| make_nonblocking(&b)))
        .collect::<Result<Vec<_>>>()?;
    let translate_ms = ms(t.elapsed());
    let t = Instant::now();
    let product = build_product(&hard, &problem.ts, &softs)?;
    Ok(CompiledProblem {
        problem: problem.clone(),
        hard,
        softs,
        product,
        timings: Timings {
            translate: translate_ms,
            product: ms(t.elapsed()),
            synthesize: 0.0,
        },
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PlanOptions {
    pub midpoint_variant: bool,
    /// Use the brute-force shortest-lasso search instead of the greedy cycle.
    pub exact: bool,
    /// Cutoff for the exact search; `None` means unbounded.
    pub budget: Option<Duration>,
}

/// Result file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub format: u64,
    pub prefix: Vec<String>,
    pub cycle: Vec<String>,
    pub satisfied: Vec<usize>,
    pub cost: String,
    pub product_states: usize,
    pub lasso_len: usize,
    pub timings_ms: Timings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_length: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timed_out: Option<bool>,
}

impl PlanResult {
    pub fn from_lasso(ts: &TransitionSystem, p: &ProductAutomaton, lasso: &Lasso, timings: Timings) -> Result<Self> {
        Ok(Self::from_path(
            ts,
            &project_to_ts(p, lasso)?,
            lasso,
            p.state_count(),
            timings,
        ))
    }

    pub fn from_path(
        ts: &TransitionSystem,
        path: &TsPath,
        lasso: &Lasso,
        product_states: usize,
        timings: Timings,
    ) -> Self {
        let ids = |v: &[usize]| v.iter().map(|&s| ts.id(s).to_string()).collect();
        PlanResult {
            format: 1,
            prefix: ids(&path.prefix),
            cycle: ids(&path.cycle),
            satisfied: lasso.satisfied(),
            cost: lasso.cost.to_string(),
            product_states,
            lasso_len: lasso.len(),
            timings_ms: timings,
            optimal_length: None,
            timed_out: None,
        }
    }

    /// The claimed path as TS indices; unknown ids are reported.
    pub fn path(&self, ts: &TransitionSystem) -> std::result::Result<TsPath, String> {
        let idx = |v: &[String]| {
            v.iter()
                .map(|id| ts.index_of(id).ok_or_else(|| format!("unknown state `{id}`")))
                .collect::<std::result::Result<Vec<_>, _>>()
        };
        Ok(TsPath {
            prefix: idx(&self.prefix)?,
            cycle: idx(&self.cycle)?,
        })
    }
}

/// A planned lasso together with its TS projection.
#[derive(Clone, Debug)]
pub struct Plan {
    pub lasso: Lasso,
    pub result: PlanResult,
}

/// Synthesizes on an already built product. `Ok(None)` means the hard
/// mission cannot be met on the transition system.
pub fn plan_compiled(compiled: &CompiledProblem, options: PlanOptions) -> Result<Option<Plan>> {
    let t = Instant::now();
    let (lasso, timed_out) = if options.exact {
        let out = brute_force_with_budget(&compiled.product, options.budget);
        (out.lasso, Some(out.timed_out))
    } else {
        (
            minimum_cost_accepting_lasso(&compiled.product, options.midpoint_variant),
            None,
        )
    };
    let timings = Timings {
        synthesize: ms(t.elapsed()),
        ..compiled.timings
    };
    let Some(lasso) = lasso else { return Ok(None) };
    let mut result = PlanResult::from_lasso(&compiled.problem.ts, &compiled.product, &lasso, timings)?;
    if let Some(to) = timed_out {
        result.optimal_length = Some(!to);
        result.timed_out = Some(to);
    }
    Ok(Some(Plan { lasso, result }))
}

pub fn plan(problem: &Problem, options: PlanOptions) -> Result<(CompiledProblem, Option<Plan>)> {
    let compiled = compile(problem)?;
    let plan = plan_compiled(&compiled, options)?;
    Ok((compiled, plan))
}

/// Re-plans on an existing product under a new priority order, without
/// touching any automaton. Satisfied indices in the result refer to the new
/// order.
pub fn replan(
    ts: &TransitionSystem,
    product: &ProductAutomaton,
    permutation: &[usize],
    midpoint_variant: bool,
) -> Result<Option<Plan>> {
    let t = Instant::now();
    let lasso = resynthesize_with_priorities(product, permutation, midpoint_variant)?;
    let timings = Timings {
        synthesize: ms(t.elapsed()),
        ..Timings::default()
    };
    lasso
        .map(|lasso| {
            let result = PlanResult::from_lasso(ts, product, &lasso, timings)?;
            Ok(Plan { lasso, result })
        })
        .transpose()
}

/// [`replan`] from a [`ReplanCache`] instead of the full product.
pub fn replan_cached(
    ts: &TransitionSystem,
    cache: &ReplanCache,
    permutation: &[usize],
    midpoint_variant: bool,
) -> Result<Option<Plan>> {
    let t = Instant::now();
    let lasso = cache.replan(permutation, midpoint_variant)?;
    let timings = Timings {
        synthesize: ms(t.elapsed()),
        ..Timings::default()
    };
    lasso
        .map(|lasso| {
            let path = cache.project(&lasso)?;
            let result = PlanResult::from_path(ts, &path, &lasso, cache.state_count(), timings);
            Ok(Plan { lasso, result })
        })
        .transpose()
}

/// What a verified result establishes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub satisfied: Vec<usize>,
    pub cost: String,
}

/// Verifies a claimed result against the problem using lasso semantics
/// only: the path is a path of the TS from its initial state, its trace
/// satisfies the hard formula, the claimed satisfied set is exactly the set
/// of soft formulas the trace satisfies, and the cost matches that set.
pub fn check(problem: &Problem, claimed: &PlanResult) -> std::result::Result<CheckReport, String> {
    let ts = &problem.ts;
    let path = claimed.path(ts)?;
    if path.cycle.is_empty() {
        return Err("cycle is empty".into());
    }
    if path.starts_at() != ts.init() {
        return Err(format!(
            "path starts at `{}`, not at the initial state `{}`",
            ts.id(path.starts_at()),
            ts.id(ts.init())
        ));
    }
    let trace = trace_of(ts, &path).map_err(|e| format!("adjacency: {e}"))?;
    if !eval_lasso(&problem.hard, &trace) {
        return Err("trace violates the hard formula".into());
    }
    let actual = WeightVector::new(satisfied_set(&trace, &problem.softs));
    if actual.satisfied() != claimed.satisfied {
        return Err(format!(
            "claimed satisfied set {:?} but the trace satisfies {:?}",
            claimed.satisfied,
            actual.satisfied()
        ));
    }
    let cost = cost_of_vector(&actual).to_string();
    if cost != claimed.cost {
        return Err(format!(
            "claimed cost {} but the satisfied set costs {cost}",
            claimed.cost
        ));
    }
    if claimed.lasso_len != path.prefix.len() + path.cycle.len() {
        return Err(format!(
            "lasso_len {} does not match the path length {}",
            claimed.lasso_len,
            path.prefix.len() + path.cycle.len()
        ));
    }
    Ok(CheckReport {
        satisfied: actual.satisfied(),
        cost,
    })
}
