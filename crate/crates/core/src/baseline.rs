//! Exact references for the greedy planner.
//!
//! [`brute_force_shortest_lasso`] finds a shortest lasso among all cost-optimal
//! SCCs and midpoints by searching `(state, coverage mask)` pairs, and
//! [`feasible_subset`] decides whether a set of soft constraints can be met
//! together with the hard mission, using nothing but a translation of the
//! conjunction and a plain nested-DFS emptiness check.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::automata::{translate, Alphabet};
use crate::error::Result;
use crate::graph::bfs_tree;
use crate::ltl::LtlFormula;
use crate::product::{ProductAutomaton, WeightVector};
use crate::synthesis::{cycle_targets, strongly_connected_components, Lasso, SccInfo};
use crate::ts::TransitionSystem;

/// Default wall-clock cutoff for the brute-force search.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(20 * 60);

/// A node of the coverage search: an SCC member and the target sets
/// already visited on the partial cycle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CoverageState {
    pub state: usize,
    pub met: u64,
}

/// Largest target family the coverage search accepts.
pub const MAX_TARGETS: usize = 40;

struct Deadline(Option<Instant>);

impl Deadline {
    fn passed(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

enum Cover {
    Found(Vec<usize>),
    None,
    TimedOut,
}

struct LocalScc {
    members: Vec<usize>,
    succ: Vec<Vec<u32>>,
}

impl LocalScc {
    fn new(p: &ProductAutomaton, scc: &SccInfo) -> Self {
        let index: HashMap<usize, u32> = scc.members.iter().enumerate().map(|(i, &q)| (q, i as u32)).collect();
        let succ = scc
            .members
            .iter()
            .map(|&q| {
                p.successors(q)
                    .iter()
                    .filter_map(|w| index.get(&(*w as usize)).copied())
                    .collect()
            })
            .collect();
        LocalScc {
            members: scc.members.clone(),
            succ,
        }
    }

    fn local(&self, q: usize) -> Option<usize> {
        self.members.binary_search(&q).ok()
    }
}

fn masks(local: &LocalScc, targets: &[Vec<usize>]) -> Vec<u64> {
    let mut m = vec![0u64; local.members.len()];
    for (j, set) in targets.iter().enumerate() {
        for &q in set {
            if let Some(i) = local.local(q) {
                m[i] |= 1 << j;
            }
        }
    }
    m
}

/// BFS over `(member, mask)` for a shortest cycle from `start` back to itself
/// meeting every target, with fewer than `limit` edges.
fn cover(local: &LocalScc, member_masks: &[u64], start: usize, full: u64, limit: usize, deadline: &Deadline) -> Cover {
    let width = full + 1;
    let node = |v: usize, m: u64| v as u64 * width + m;
    let mut parent: HashMap<u64, u64> = HashMap::new();
    let root = node(start, member_masks[start]);
    parent.insert(root, root);
    let mut layer = vec![(start, member_masks[start])];
    let mut depth = 0usize;
    let mut steps = 0usize;
    while !layer.is_empty() && depth + 1 < limit {
        let mut next = Vec::new();
        for &(v, m) in &layer {
            steps += 1;
            if steps.is_multiple_of(4096) && deadline.passed() {
                return Cover::TimedOut;
            }
            for &w in &local.succ[v] {
                let w = w as usize;
                let m2 = m | member_masks[w];
                if w == start && m2 == full {
                    let mut cycle = vec![v];
                    let mut cur = node(v, m);
                    while cur != root {
                        cur = parent[&cur];
                        cycle.push((cur / width) as usize);
                    }
                    cycle.reverse();
                    // cycle now starts at `start` and ends at the last state before it
                    return Cover::Found(cycle.into_iter().map(|i| local.members[i]).collect());
                }
                let id = node(w, m2);
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(id) {
                    e.insert(node(v, m));
                    next.push((w, m2));
                }
            }
        }
        layer = next;
        depth += 1;
    }
    Cover::None
}

/// A minimum-edge cycle inside `scc` from `midpoint` back to itself that
/// visits every target set. Returned states begin at `midpoint` and list
/// each cycle position once.
pub fn shortest_covering_cycle(
    p: &ProductAutomaton,
    scc: &SccInfo,
    midpoint: usize,
    targets: &[Vec<usize>],
) -> Option<Vec<usize>> {
    assert!(targets.len() <= MAX_TARGETS, "too many target sets");
    let local = LocalScc::new(p, scc);
    let start = local.local(midpoint)?;
    let member_masks = masks(&local, targets);
    let full = if targets.is_empty() {
        0
    } else {
        (1u64 << targets.len()) - 1
    };
    match cover(&local, &member_masks, start, full, usize::MAX, &Deadline(None)) {
        Cover::Found(c) => Some(c),
        _ => None,
    }
}

/// Result of a budgeted brute-force search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForceOutcome {
    /// Best lasso found (the true optimum unless `timed_out`).
    pub lasso: Option<Lasso>,
    pub timed_out: bool,
}

/// Shortest lasso over every midpoint of every cost-optimal accepting SCC.
pub fn brute_force_shortest_lasso(p: &ProductAutomaton) -> Option<Lasso> {
    brute_force_with_budget(p, None).lasso
}

/// As [`brute_force_shortest_lasso`], giving up after `budget`.
///
/// The prefix for a midpoint `m` is a BFS shortest path from the initial
/// state, so the total is `dist(q0, m) + shortest covering cycle at m`.
/// Ties keep the smallest midpoint index.
pub fn brute_force_with_budget(p: &ProductAutomaton, budget: Option<Duration>) -> BruteForceOutcome {
    let deadline = Deadline(budget.map(|b| Instant::now() + b));
    let sccs = strongly_connected_components(p);
    let Some(best_cost) = sccs.iter().filter(|c| c.accepting).map(SccInfo::cost).min() else {
        return BruteForceOutcome {
            lasso: None,
            timed_out: false,
        };
    };
    let (parent, order) = bfs_tree(p.state_count(), p.init(), |v| p.successors(v), |_| true);
    let mut dist = vec![usize::MAX; p.state_count()];
    for &v in &order {
        dist[v] = if v == p.init() { 0 } else { dist[parent[v]] + 1 };
    }

    let mut candidates: Vec<(usize, usize)> = Vec::new(); // (midpoint, scc slot)
    let tied: Vec<&SccInfo> = sccs.iter().filter(|c| c.accepting && c.cost() == best_cost).collect();
    for (slot, c) in tied.iter().enumerate() {
        candidates.extend(c.members.iter().map(|&m| (m, slot)));
    }
    candidates.sort_unstable();

    let prepared: Vec<_> = tied
        .iter()
        .map(|c| {
            let targets = cycle_targets(p, c);
            assert!(targets.len() <= MAX_TARGETS, "too many target sets");
            let local = LocalScc::new(p, c);
            let member_masks = masks(&local, &targets);
            let full = (1u64 << targets.len()) - 1;
            (local, member_masks, full)
        })
        .collect();

    let mut best: Option<(usize, usize, Vec<usize>)> = None; // (length, midpoint, cycle)
    let mut timed_out = false;
    for (m, slot) in candidates {
        if deadline.passed() {
            timed_out = true;
            break;
        }
        let d = dist[m];
        if best.as_ref().is_some_and(|(len, _, _)| d + 1 >= *len) {
            continue;
        }
        let limit = best.as_ref().map_or(usize::MAX, |(len, _, _)| len - d);
        let (local, member_masks, full) = &prepared[slot];
        let start = local.local(m).expect("midpoint is a member");
        match cover(local, member_masks, start, *full, limit, &deadline) {
            Cover::Found(cycle) => {
                let len = d + cycle.len();
                if best.as_ref().is_none_or(|(l, _, _)| len < *l) {
                    best = Some((len, m, cycle));
                }
            }
            Cover::None => {}
            Cover::TimedOut => {
                timed_out = true;
                break;
            }
        }
    }
    let lasso = best.map(|(_, m, cycle)| {
        let mut prefix = Vec::with_capacity(dist[m]);
        let mut v = m;
        while v != p.init() {
            v = parent[v];
            prefix.push(v);
        }
        prefix.reverse();
        Lasso::new(p, prefix, cycle)
    });
    BruteForceOutcome { lasso, timed_out }
}

/// Whether some TS path satisfies `hard` together with every soft formula
/// whose 1-based index is in `subset`.
pub fn feasible_subset(
    ts: &TransitionSystem,
    hard: &LtlFormula,
    softs: &[LtlFormula],
    subset: &[usize],
) -> Result<bool> {
    let formula =
        LtlFormula::conjunction(std::iter::once(hard.clone()).chain(subset.iter().map(|&i| softs[i - 1].clone())));
    satisfiable_on(ts, &formula)
}

/// Whether some path of `ts` has a trace satisfying `formula`.
pub fn satisfiable_on(ts: &TransitionSystem, formula: &LtlFormula) -> Result<bool> {
    let alphabet: &Alphabet = ts.alphabet();
    let b = translate(formula, alphabet)?;

    // reachable pairs (automaton state, TS state)
    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut pairs = vec![(b.init(), ts.init())];
    ids.insert(pairs[0], 0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut head = 0;
    while head < pairs.len() {
        let (q, s) = pairs[head];
        head += 1;
        let mut out = Vec::new();
        for &q2 in b.successors(q, ts.encoded_label(s)) {
            for &s2 in ts.successors(s) {
                let key = (q2, s2 as usize);
                let id = *ids.entry(key).or_insert_with(|| {
                    pairs.push(key);
                    pairs.len() - 1
                });
                out.push(id);
            }
        }
        succ.push(out);
    }
    let accepting: Vec<bool> = pairs.iter().map(|&(q, _)| b.is_accepting(q)).collect();
    Ok(nested_dfs(&succ, &accepting))
}

/// Courcoubetis-Vardi-Wolper-Yannakakis emptiness check from node 0:
/// true iff an accepting node lies on a cycle reachable from it.
fn nested_dfs(succ: &[Vec<usize>], accepting: &[bool]) -> bool {
    let n = succ.len();
    let mut outer = vec![false; n];
    let mut inner = vec![false; n];
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    outer[0] = true;
    while let Some(&mut (v, ref mut i)) = stack.last_mut() {
        if *i < succ[v].len() {
            let w = succ[v][*i];
            *i += 1;
            if !outer[w] {
                outer[w] = true;
                stack.push((w, 0));
            }
            continue;
        }
        stack.pop();
        if accepting[v] && reaches_seed(succ, v, &mut inner) {
            return true;
        }
    }
    false
}

fn reaches_seed(succ: &[Vec<usize>], seed: usize, inner: &mut [bool]) -> bool {
    let mut todo = vec![seed];
    while let Some(v) = todo.pop() {
        for &w in &succ[v] {
            if w == seed {
                return true;
            }
            if !inner[w] {
                inner[w] = true;
                todo.push(w);
            }
        }
    }
    false
}

/// The lexicographically best satisfied vector over all `2^n` subsets,
/// decided by [`feasible_subset`]; `None` when even the hard mission alone
/// is unsatisfiable on `ts`.
pub fn best_feasible_vector(
    ts: &TransitionSystem,
    hard: &LtlFormula,
    softs: &[LtlFormula],
) -> Result<Option<WeightVector>> {
    let n = softs.len();
    assert!(n < 20, "exhaustive subset search is exponential");
    // enumerating masks in ascending cost order: bit (n-1-i) set = constraint i violated
    for violated in 0u32..(1 << n) {
        let bits: Vec<bool> = (0..n).map(|i| violated & (1 << (n - 1 - i)) == 0).collect();
        let v = WeightVector::new(bits);
        if feasible_subset(ts, hard, softs, &v.satisfied())? {
            return Ok(Some(v));
        }
    }
    Ok(None)
}
