//! Minimum-cost accepting lassos over a state-weighted product.
//!
//! The optimal cost is decided by SCCs alone: some accepting SCC `O`
//! minimizes the cost of its combined weight `O.w`, and a cycle through `O`
//! that touches an accepting state and one witness for every `T` bit of
//! `O.w` realizes exactly that cost. The prefix is a BFS shortest path and
//! the cycle is built greedily from BFS legs, so the lasso is cost-optimal
//! but not necessarily shortest.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{bfs_path, bfs_tree, path_from_parents};
use crate::product::{compare_packed, cost_of_vector, unpack_weight, Cost, ProductAutomaton, WeightVector};
use crate::ts::TsPath;

/// A strongly connected component of the reachable product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccInfo {
    /// Members in ascending order.
    pub members: Vec<usize>,
    pub leader: usize,
    /// Tarjan discovery number of the leader.
    pub leader_number: usize,
    /// Contains an accepting state and is not a loop-free singleton.
    pub accepting: bool,
    /// Entry-wise OR of the members' weights.
    pub weight: WeightVector,
}

impl SccInfo {
    pub fn contains(&self, state: usize) -> bool {
        self.members.binary_search(&state).is_ok()
    }

    pub fn cost(&self) -> Cost {
        cost_of_vector(&self.weight)
    }
}

/// An accepting run `prefix · cycle^ω` of product states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<usize>,
    pub cycle: Vec<usize>,
    /// Weight bits seen on the cycle.
    pub inf: WeightVector,
    pub cost: Cost,
}

impl Lasso {
    /// Builds a lasso and derives `inf` and `cost` from the cycle.
    pub fn new(p: &ProductAutomaton, prefix: Vec<usize>, cycle: Vec<usize>) -> Lasso {
        Lasso::with_weights(prefix, cycle, p.soft_count(), |q| p.weight_words(q))
    }

    /// Like [`Lasso::new`] with packed weights looked up through `words_of`.
    pub(crate) fn with_weights<'w, F>(prefix: Vec<usize>, cycle: Vec<usize>, soft_count: usize, words_of: F) -> Lasso
    where
        F: Fn(usize) -> &'w [u64],
    {
        let mut words = vec![0u64; soft_count.div_ceil(64)];
        for &q in &cycle {
            for (o, w) in words.iter_mut().zip(words_of(q)) {
                *o |= w;
            }
        }
        let inf = unpack_weight(&words, soft_count);
        let cost = cost_of_vector(&inf);
        Lasso {
            prefix,
            cycle,
            inf,
            cost,
        }
    }

    /// `|r1| + |r2|`: the number of product edges walked before the run
    /// starts repeating.
    pub fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// 1-based indices of the soft constraints certified by the cycle.
    pub fn satisfied(&self) -> Vec<usize> {
        self.inf.satisfied()
    }

    /// Checks adjacency, the accepting-state requirement, and that `inf`
    /// and `cost` agree with the cycle.
    pub fn validate(&self, p: &ProductAutomaton) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidPath(m));
        if self.cycle.is_empty() {
            return bad("cycle is empty".into());
        }
        let all: Vec<usize> = self.prefix.iter().chain(&self.cycle).copied().collect();
        if all.iter().any(|&q| q >= p.state_count()) {
            return bad("state index out of range".into());
        }
        if all[0] != p.init() {
            return bad(format!("run starts at {} instead of the initial state", all[0]));
        }
        for w in all.windows(2) {
            if !p.has_edge(w[0], w[1]) {
                return bad(format!("no product edge {} -> {}", w[0], w[1]));
            }
        }
        let (last, first) = (self.cycle[self.cycle.len() - 1], self.cycle[0]);
        if !p.has_edge(last, first) {
            return bad(format!("cycle does not close: no product edge {last} -> {first}"));
        }
        if !self.cycle.iter().any(|&q| p.is_accepting(q)) {
            return bad("cycle has no accepting state".into());
        }
        let again = Lasso::new(p, self.prefix.clone(), self.cycle.clone());
        if again.inf != self.inf || again.cost != self.cost {
            return bad("weight summary disagrees with the cycle".into());
        }
        Ok(())
    }
}

/// Tarjan decomposition of the reachable product, with acceptance and
/// combined weight filled in. Components come in completion order.
///
/// The decomposition itself is cached on the product graph, so calls on
/// weight-permuted copies only recombine weights.
pub fn strongly_connected_components(p: &ProductAutomaton) -> Vec<SccInfo> {
    (0..p.components().len()).map(|k| scc_info(p, k)).collect()
}

fn combined_words(p: &ProductAutomaton, members: &[usize], out: &mut [u64]) {
    out.iter_mut().for_each(|w| *w = 0);
    for &q in members {
        for (o, w) in out.iter_mut().zip(p.weight_words(q)) {
            *o |= w;
        }
    }
}

/// The `k`-th cached component with its weight summary.
fn scc_info(p: &ProductAutomaton, k: usize) -> SccInfo {
    let c = &p.components()[k];
    let mut words = vec![0u64; p.soft_count().div_ceil(64)];
    combined_words(p, &c.members, &mut words);
    SccInfo {
        members: c.members.clone(),
        leader: c.leader,
        leader_number: c.leader_number,
        accepting: p.component_accepting()[k],
        weight: unpack_weight(&words, p.soft_count()),
    }
}

/// [`select_optimal_scc`] over the cached components without materializing
/// every [`SccInfo`].
pub fn optimal_scc(p: &ProductAutomaton) -> Option<SccInfo> {
    let comps = p.components();
    let words = p.soft_count().div_ceil(64);
    let mut best: Option<(usize, Vec<u64>)> = None;
    let mut cur = vec![0u64; words];
    for (k, c) in comps.iter().enumerate() {
        if !p.component_accepting()[k] {
            continue;
        }
        combined_words(p, &c.members, &mut cur);
        let better = match &best {
            None => true,
            Some((b, bw)) => compare_packed(&cur, bw)
                .then(c.leader_number.cmp(&comps[*b].leader_number))
                .is_lt(),
        };
        if better {
            best = Some((k, cur.clone()));
        }
    }
    best.map(|(k, _)| scc_info(p, k))
}

/// The accepting SCC of least cost; ties go to the smallest leader
/// discovery number.
pub fn select_optimal_scc(sccs: &[SccInfo]) -> Option<&SccInfo> {
    sccs.iter()
        .filter(|c| c.accepting)
        .min_by(|a, b| a.cost().cmp(&b.cost()).then(a.leader_number.cmp(&b.leader_number)))
}

/// Shortest path `from .. to` (both included); `None` if unreachable. The
/// search stops as soon as `to` is discovered.
pub fn bfs_shortest_path(p: &ProductAutomaton, from: usize, to: usize) -> Option<Vec<usize>> {
    bfs_path(p.state_count(), from, to, |v| p.successors(v))
}

/// The sets a covering cycle through `scc` must touch: accepting members
/// first, then the witnesses of every `T` bit of the combined weight.
pub fn cycle_targets(p: &ProductAutomaton, scc: &SccInfo) -> Vec<Vec<usize>> {
    let mut targets = vec![scc
        .members
        .iter()
        .copied()
        .filter(|&q| p.is_accepting(q))
        .collect::<Vec<_>>()];
    for i in 0..p.soft_count() {
        if scc.weight.get(i) {
            targets.push(scc.members.iter().copied().filter(|&q| p.weight_bit(q, i)).collect());
        }
    }
    targets
}

const NONE: u32 = u32::MAX;

/// Edges among `members` (ascending) as CSR over their local indices.
pub(crate) fn local_csr(p: &ProductAutomaton, members: &[usize]) -> (Vec<u32>, Vec<u32>) {
    let mut offsets = Vec::with_capacity(members.len() + 1);
    let mut edges = Vec::new();
    offsets.push(0);
    for &q in members {
        for &w in p.successors(q) {
            if let Ok(i) = members.binary_search(&(w as usize)) {
                edges.push(i as u32);
            }
        }
        offsets.push(edges.len() as u32);
    }
    (offsets, edges)
}

/// One SCC renumbered densely (members in ascending order, so local order
/// agrees with product order), its internal edges, and the target sets each
/// member belongs to. Read-only, so several searches may share it.
pub(crate) struct SccIndex {
    members: Vec<usize>,
    /// Internal edges in CSR form over local indices.
    offsets: Vec<u32>,
    targets: Vec<u32>,
    sets: Vec<Vec<u32>>,
}

impl SccIndex {
    pub(crate) fn new(p: &ProductAutomaton, scc: &SccInfo, targets: &[Vec<usize>]) -> Self {
        let (offsets, edges) = local_csr(p, &scc.members);
        Self::from_local(scc.members.clone(), offsets, edges, targets)
    }

    /// `members` ascending; `offsets`/`edges` the CSR adjacency in local
    /// indices, each row ascending.
    pub(crate) fn from_local(members: Vec<usize>, offsets: Vec<u32>, edges: Vec<u32>, targets: &[Vec<usize>]) -> Self {
        let mut sets = vec![Vec::new(); members.len()];
        for (j, set) in targets.iter().enumerate() {
            for &q in set {
                if let Ok(i) = members.binary_search(&q) {
                    sets[i].push(j as u32);
                }
            }
        }
        SccIndex {
            members,
            offsets,
            targets: edges,
            sets,
        }
    }

    fn succ(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn position(&self, q: usize) -> Option<usize> {
        self.members.binary_search(&q).ok()
    }

    fn in_some_target(&self, i: usize) -> bool {
        !self.sets[i].is_empty()
    }
}

/// Per-search scratch space; reset in O(1) by bumping the epoch.
pub(crate) struct Workspace {
    parent: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl Workspace {
    pub(crate) fn new(n: usize) -> Self {
        Workspace {
            parent: vec![0; n],
            stamp: vec![0; n],
            epoch: 0,
        }
    }

    fn reset(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }
}

/// Layered BFS inside the SCC from local state `from` to the nearest local
/// state satisfying `goal`, taking the smallest index within the first
/// layer that has one. With `need_edge` the zero-length path is not
/// allowed, so `from` itself can only be reached again around a cycle.
/// Returns local indices, `from` first.
fn nearest<G: Fn(usize) -> bool>(
    index: &SccIndex,
    ws: &mut Workspace,
    from: usize,
    need_edge: bool,
    goal: G,
) -> Option<Vec<usize>> {
    if !need_edge && goal(from) {
        return Some(vec![from]);
    }
    ws.reset();
    let epoch = ws.epoch;
    ws.stamp[from] = epoch;
    let mut back_to_from = NONE;
    let mut layer = vec![from as u32];
    while !layer.is_empty() {
        let mut next = Vec::new();
        let mut hit: Option<usize> = None;
        for &v in &layer {
            for &w in index.succ(v as usize) {
                let wi = w as usize;
                if wi == from {
                    if need_edge && back_to_from == NONE {
                        back_to_from = v;
                        if goal(from) && hit.is_none_or(|h| from < h) {
                            hit = Some(from);
                        }
                    }
                    continue;
                }
                if ws.stamp[wi] != epoch {
                    ws.stamp[wi] = epoch;
                    ws.parent[wi] = v;
                    next.push(w);
                    if goal(wi) && hit.is_none_or(|h| wi < h) {
                        hit = Some(wi);
                    }
                }
            }
        }
        if let Some(h) = hit {
            let mut path = vec![h];
            let mut v = if h == from { back_to_from } else { ws.parent[h] } as usize;
            while v != from {
                path.push(v);
                v = ws.parent[v] as usize;
            }
            path.push(from);
            path.reverse();
            return Some(path);
        }
        layer = next;
    }
    None
}

/// Greedy cycle from local `start`, returned as product states.
fn greedy_cycle_local(index: &SccIndex, ws: &mut Workspace, start: usize, set_count: usize) -> Option<Vec<usize>> {
    let mut met = vec![false; set_count];
    let mark = |met: &mut Vec<bool>, i: usize| {
        for &j in &index.sets[i] {
            met[j as usize] = true;
        }
    };
    mark(&mut met, start);
    let mut cycle = vec![start];
    let mut current = start;
    while met.iter().any(|&m| !m) {
        let leg = nearest(index, ws, current, false, |i| {
            index.sets[i].iter().any(|&j| !met[j as usize])
        })?;
        current = *leg.last().unwrap();
        cycle.extend_from_slice(&leg[1..]);
        mark(&mut met, current);
    }
    let back = nearest(index, ws, current, current == start, |i| i == start)?;
    cycle.extend_from_slice(&back[1..]);
    cycle.pop();
    Some(cycle.into_iter().map(|i| index.members[i]).collect())
}

/// Greedy covering cycle through `scc` starting and ending at `start`.
///
/// Repeatedly walks a BFS shortest leg to the nearest state hitting a
/// target set not met yet, marks every set that state belongs to, and
/// finally returns to `start` along a shortest path of at least one edge.
/// The returned sequence lists the cycle states once, beginning at `start`.
pub fn greedy_covering_cycle(
    p: &ProductAutomaton,
    scc: &SccInfo,
    start: usize,
    targets: &[Vec<usize>],
) -> Option<Vec<usize>> {
    let index = SccIndex::new(p, scc, targets);
    let s = index.position(start)?;
    let mut ws = Workspace::new(index.len());
    greedy_cycle_local(&index, &mut ws, s, targets.len())
}

/// How the greedy planner chooses the state where prefix and cycle meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MidpointRule {
    /// The SCC's Tarjan leader.
    #[default]
    Leader,
    /// The first state a BFS from the leader reaches that lies in some
    /// target set (the leader itself when it does).
    FirstTarget,
    /// Every state of the SCC that lies in some target set is tried and the
    /// shortest resulting lasso is kept (ties: smallest midpoint index).
    BestTarget,
}

/// Greedy minimum-cost accepting lasso; `None` iff the product accepts
/// nothing. `midpoint_variant` selects [`MidpointRule::BestTarget`].
pub fn minimum_cost_accepting_lasso(p: &ProductAutomaton, midpoint_variant: bool) -> Option<Lasso> {
    minimum_cost_accepting_lasso_with(p, MidpointRule::from_flag(midpoint_variant))
}

impl MidpointRule {
    pub fn from_flag(midpoint_variant: bool) -> Self {
        if midpoint_variant {
            MidpointRule::BestTarget
        } else {
            MidpointRule::Leader
        }
    }
}

pub fn minimum_cost_accepting_lasso_with(p: &ProductAutomaton, rule: MidpointRule) -> Option<Lasso> {
    let scc = optimal_scc(p)?;
    lasso_through(p, &scc, rule)
}

/// Greedy lasso through a given accepting SCC.
pub fn lasso_through(p: &ProductAutomaton, scc: &SccInfo, rule: MidpointRule) -> Option<Lasso> {
    let targets = cycle_targets(p, scc);
    let index = SccIndex::new(p, scc, &targets);
    let finish = |prefix: Vec<usize>, cycle: Vec<usize>| Lasso::new(p, prefix, cycle);
    if rule == MidpointRule::BestTarget {
        let (parent, _) = bfs_tree(p.state_count(), p.init(), |v| p.successors(v), |_| true);
        let prefix = |m: usize| path_from_parents(&parent, p.init(), m);
        plan_in_scc(&index, scc.leader, targets.len(), rule, prefix, finish)
    } else {
        let prefix = |m: usize| bfs_shortest_path(p, p.init(), m);
        plan_in_scc(&index, scc.leader, targets.len(), rule, prefix, finish)
    }
}

/// Midpoint choice plus greedy cycle. `prefix(m)` yields the shortest path
/// `q0 .. m` (both included); `finish` assembles the lasso.
pub(crate) fn plan_in_scc<P, L>(
    index: &SccIndex,
    leader: usize,
    set_count: usize,
    rule: MidpointRule,
    prefix: P,
    finish: L,
) -> Option<Lasso>
where
    P: Fn(usize) -> Option<Vec<usize>> + Sync,
    L: Fn(Vec<usize>, Vec<usize>) -> Lasso + Sync,
{
    let build = |ws: &mut Workspace, i: usize| -> Option<Lasso> {
        let cycle = greedy_cycle_local(index, ws, i, set_count)?;
        let mut r1 = prefix(index.members[i])?;
        r1.pop();
        Some(finish(r1, cycle))
    };
    let leader = index.position(leader)?;
    match rule {
        MidpointRule::Leader => build(&mut Workspace::new(index.len()), leader),
        MidpointRule::FirstTarget => {
            let mut ws = Workspace::new(index.len());
            let m = nearest(index, &mut ws, leader, false, |i| index.in_some_target(i))
                .and_then(|path| path.last().copied())
                .unwrap_or(leader);
            build(&mut ws, m)
        }
        MidpointRule::BestTarget => {
            let candidates: Vec<usize> = (0..index.len()).filter(|&i| index.in_some_target(i)).collect();
            candidates
                .par_iter()
                .map_init(|| Workspace::new(index.len()), |ws, &i| build(ws, i))
                .flatten()
                .min_by(|a, b| a.len().cmp(&b.len()).then(a.cycle[0].cmp(&b.cycle[0])))
        }
    }
}

/// TS component of every product state on the lasso.
pub fn project_to_ts(p: &ProductAutomaton, lasso: &Lasso) -> Result<TsPath> {
    let project = |states: &[usize]| {
        states
            .iter()
            .map(|&q| {
                p.ts_state(q)
                    .ok_or_else(|| Error::InvalidPath("product has no transition-system component".into()))
            })
            .collect::<Result<Vec<_>>>()
    };
    Ok(TsPath {
        prefix: project(&lasso.prefix)?,
        cycle: project(&lasso.cycle)?,
    })
}

/// Reorders every weight vector (new priority `j` is old constraint
/// `permutation[j]`, 1-based) and re-runs the planner on the same graph.
pub fn resynthesize_with_priorities(
    p: &ProductAutomaton,
    permutation: &[usize],
    midpoint_variant: bool,
) -> Result<Option<Lasso>> {
    let permuted = p.with_permuted_weights(permutation)?;
    Ok(minimum_cost_accepting_lasso(&permuted, midpoint_variant))
}
