use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use proptest::prelude::*;
use softltl_core::baseline::{best_feasible_vector, brute_force_shortest_lasso, shortest_covering_cycle};
use softltl_core::cache::ReplanCache;
use softltl_core::planner::{check, compile, plan, replan, PlanOptions};
use softltl_core::product::cost_of_vector;
use softltl_core::random::{generate_random_problem, generate_random_product, ProblemSpec, RandomSpec};
use softltl_core::synthesis::{
    bfs_shortest_path, cycle_targets, greedy_covering_cycle, minimum_cost_accepting_lasso,
    minimum_cost_accepting_lasso_with, optimal_scc, resynthesize_with_priorities, select_optimal_scc,
    strongly_connected_components, MidpointRule,
};
use softltl_core::ProductAutomaton;

fn random_product(states: usize, softs: usize, seed: u64) -> ProductAutomaton {
    generate_random_product(&RandomSpec::sparse(states, softs, seed)).unwrap()
}

fn small_problem(seed: u64, soft_count: usize) -> softltl_core::Problem {
    generate_random_problem(&ProblemSpec {
        ts_states: 4,
        atoms: 2,
        soft_count,
        seed,
    })
    .unwrap()
}

/// Kosaraju: finishing order on the graph, then sweeps on the reverse.
fn kosaraju(p: &ProductAutomaton) -> BTreeSet<Vec<usize>> {
    let n = p.state_count();
    fn order(p: &ProductAutomaton, v: usize, seen: &mut [bool], out: &mut Vec<usize>) {
        seen[v] = true;
        for &w in p.successors(v) {
            if !seen[w as usize] {
                order(p, w as usize, seen, out);
            }
        }
        out.push(v);
    }
    let mut seen = vec![false; n];
    let mut finished = Vec::new();
    order(p, p.init(), &mut seen, &mut finished);
    let mut rev = vec![Vec::new(); n];
    for v in 0..n {
        for &w in p.successors(v) {
            rev[w as usize].push(v);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut out = BTreeSet::new();
    for &root in finished.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        let mut stack = vec![root];
        let mut members = vec![];
        comp[root] = root;
        while let Some(v) = stack.pop() {
            members.push(v);
            for &u in &rev[v] {
                if comp[u] == usize::MAX {
                    comp[u] = root;
                    stack.push(u);
                }
            }
        }
        members.sort_unstable();
        out.insert(members);
    }
    out
}

fn dijkstra(p: &ProductAutomaton, from: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; p.state_count()];
    let mut heap = BinaryHeap::from([Reverse((0usize, from))]);
    while let Some(Reverse((d, v))) = heap.pop() {
        if dist[v].is_some() {
            continue;
        }
        dist[v] = Some(d);
        for &w in p.successors(v) {
            if dist[w as usize].is_none() {
                heap.push(Reverse((d + 1, w as usize)));
            }
        }
    }
    dist
}

/// Length of the shortest closed walk `m -> .. -> m` inside `members` that
/// visits every target set, searched exhaustively up to `limit` states.
fn shortest_cover_by_walks(
    p: &ProductAutomaton,
    members: &[usize],
    m: usize,
    targets: &[Vec<usize>],
    limit: usize,
) -> Option<usize> {
    fn go(
        p: &ProductAutomaton,
        members: &[usize],
        m: usize,
        targets: &[Vec<usize>],
        walk: &mut Vec<usize>,
        len: usize,
    ) -> bool {
        let v = *walk.last().unwrap();
        if walk.len() == len {
            let covered = targets.iter().all(|t| t.iter().any(|q| walk.contains(q)));
            return covered && p.has_edge(v, m);
        }
        for &w in p.successors(v) {
            let w = w as usize;
            if members.binary_search(&w).is_ok() {
                walk.push(w);
                let found = go(p, members, m, targets, walk, len);
                walk.pop();
                if found {
                    return true;
                }
            }
        }
        false
    }
    (1..=limit).find(|&len| go(p, members, m, targets, &mut vec![m], len))
}

#[test]
fn tarjan_components_match_kosaraju() {
    for seed in 0..40 {
        let p = random_product(50, 2, seed);
        let mine: BTreeSet<Vec<usize>> = strongly_connected_components(&p)
            .into_iter()
            .map(|c| c.members)
            .collect();
        assert_eq!(mine, kosaraju(&p), "seed {seed}");
        for c in strongly_connected_components(&p) {
            let cyclic = c.members.len() > 1 || p.has_edge(c.members[0], c.members[0]);
            assert_eq!(c.accepting, cyclic && c.members.iter().any(|&q| p.is_accepting(q)));
            assert!(c.contains(c.leader));
        }
    }
}

#[test]
fn bfs_paths_are_shortest() {
    for seed in 0..20 {
        let p = random_product(60, 1, seed);
        let dist = dijkstra(&p, p.init());
        for (to, d) in dist.iter().enumerate() {
            let path = bfs_shortest_path(&p, p.init(), to).unwrap();
            assert_eq!(Some(path.len() - 1), *d);
            assert!(path.windows(2).all(|w| p.has_edge(w[0], w[1])));
        }
    }
}

#[test]
fn covering_cycles_are_minimal_against_walk_enumeration() {
    let mut compared = 0;
    for seed in 0..60 {
        let mut spec = RandomSpec::sparse(10, 3, seed);
        spec.edge_probability = 0.3;
        spec.weight_probability = 0.3;
        let p = generate_random_product(&spec).unwrap();
        let Some(scc) = optimal_scc(&p) else { continue };
        let targets = cycle_targets(&p, &scc);
        for &m in scc.members.iter().take(3) {
            let exact = shortest_covering_cycle(&p, &scc, m, &targets).unwrap();
            assert_eq!(exact[0], m);
            let walks = shortest_cover_by_walks(&p, &scc.members, m, &targets, 8);
            match walks {
                Some(len) => assert_eq!(exact.len(), len, "seed {seed} midpoint {m}"),
                None => assert!(exact.len() > 8),
            }
            let greedy = greedy_covering_cycle(&p, &scc, m, &targets).unwrap();
            assert!(greedy.len() >= exact.len());
            compared += 1;
        }
    }
    assert!(compared > 30, "only {compared} comparisons");
}

#[test]
fn optimal_scc_realizes_the_optimal_cost() {
    for seed in 0..60 {
        let p = random_product(40, 4, seed);
        let sccs = strongly_connected_components(&p);
        let best = select_optimal_scc(&sccs).cloned();
        assert_eq!(best, optimal_scc(&p), "seed {seed}");
        let greedy = minimum_cost_accepting_lasso(&p, false);
        let brute = brute_force_shortest_lasso(&p);
        match (best, greedy, brute) {
            (None, None, None) => {}
            (Some(scc), Some(g), Some(b)) => {
                assert_eq!(g.cost, scc.cost());
                assert_eq!(b.cost, g.cost);
                assert_eq!(g.inf, scc.weight);
                assert!(g.cycle.iter().all(|&q| scc.contains(q)));
                g.validate(&p).unwrap();
                b.validate(&p).unwrap();
                assert!(b.len() <= g.len());
                // no accepting SCC is cheaper
                assert!(sccs.iter().filter(|c| c.accepting).all(|c| c.cost() >= g.cost));
            }
            other => panic!("seed {seed}: planners disagree on existence: {other:?}"),
        }
    }
}

#[test]
fn every_midpoint_rule_yields_cost_optimal_valid_lassos() {
    for seed in 0..30 {
        let p = random_product(60, 5, seed);
        let Some(base) = minimum_cost_accepting_lasso_with(&p, MidpointRule::Leader) else {
            continue;
        };
        for rule in [MidpointRule::FirstTarget, MidpointRule::BestTarget] {
            let l = minimum_cost_accepting_lasso_with(&p, rule).unwrap();
            l.validate(&p).unwrap();
            assert_eq!(l.cost, base.cost);
        }
    }
}

#[test]
fn greedy_satisfied_set_matches_the_feasibility_oracle() {
    let mut feasible = 0;
    for seed in 0..50 {
        let problem = small_problem(seed, 3);
        let (_, planned) = plan(&problem, PlanOptions::default()).unwrap();
        let oracle = best_feasible_vector(&problem.ts, &problem.hard, &problem.softs).unwrap();
        match (planned, oracle) {
            (None, None) => {}
            (Some(plan), Some(best)) => {
                assert_eq!(plan.result.satisfied, best.satisfied(), "seed {seed}");
                assert_eq!(plan.result.cost, cost_of_vector(&best).to_string());
                check(&problem, &plan.result).unwrap();
                feasible += 1;
            }
            (p, o) => panic!("seed {seed}: plan {:?} oracle {o:?}", p.map(|p| p.result)),
        }
    }
    assert!(feasible >= 25, "only {feasible} feasible instances");
}

#[test]
fn reordering_matches_a_rebuild() {
    let perms: [&[usize]; 4] = [&[2, 1, 3], &[3, 2, 1], &[2, 3, 1], &[1, 3, 2]];
    for seed in 0..20 {
        let problem = small_problem(100 + seed, 3);
        let perm = perms[seed as usize % perms.len()];
        let compiled = compile(&problem).unwrap();
        let cache = ReplanCache::from_product(&compiled.product);
        let reordered = replan(&problem.ts, &compiled.product, perm, false).unwrap();
        let fresh = plan(&problem.permuted(perm).unwrap(), PlanOptions::default())
            .unwrap()
            .1;
        assert_eq!(
            reordered.as_ref().map(|p| (&p.result.satisfied, &p.result.cost)),
            fresh.as_ref().map(|p| (&p.result.satisfied, &p.result.cost)),
            "seed {seed}"
        );
        let cached = cache.replan(perm, false).unwrap();
        assert_eq!(cached, reordered.as_ref().map(|p| p.lasso.clone()));
        if let Some(r) = reordered {
            check(&problem.permuted(perm).unwrap(), &r.result).unwrap();
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn identity_reorder_changes_nothing(seed in any::<u64>(), variant in any::<bool>()) {
        let p = random_product(50, 4, seed);
        let again = resynthesize_with_priorities(&p, &[1, 2, 3, 4], variant).unwrap();
        prop_assert_eq!(again, minimum_cost_accepting_lasso(&p, variant));
    }

    #[test]
    fn greedy_lassos_are_valid(seed in any::<u64>(), states in 1usize..80, softs in 0usize..12) {
        let p = random_product(states, softs, seed);
        if let Some(l) = minimum_cost_accepting_lasso(&p, false) {
            prop_assert!(l.validate(&p).is_ok());
            prop_assert_eq!(l.cost.clone(), optimal_scc(&p).unwrap().cost());
        } else {
            prop_assert!(optimal_scc(&p).is_none());
        }
    }
}
