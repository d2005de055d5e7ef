//! Graph searches over dense integer adjacency lists.

/// One strongly connected component as discovered by Tarjan's algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Members in ascending order.
    pub members: Vec<usize>,
    /// The member whose discovery number equals its lowlink.
    pub leader: usize,
    /// Discovery number of the leader.
    pub leader_number: usize,
}

const UNVISITED: usize = usize::MAX;

/// Tarjan's algorithm with an explicit call stack, restricted to nodes
/// reachable from `roots`. Components are returned in completion order
/// (reverse topological order of the condensation).
pub fn tarjan<'a, F>(node_count: usize, roots: &[usize], successors: F) -> Vec<Component>
where
    F: Fn(usize) -> &'a [u32],
{
    let mut number = vec![UNVISITED; node_count];
    let mut lowlink = vec![0usize; node_count];
    let mut on_stack = vec![false; node_count];
    let mut stack: Vec<usize> = Vec::new();
    let mut frames: Vec<(usize, usize)> = Vec::new();
    let mut counter = 0usize;
    let mut components = Vec::new();

    for &root in roots {
        if number[root] != UNVISITED {
            continue;
        }
        number[root] = counter;
        lowlink[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        frames.push((root, 0));

        while let Some(&mut (v, ref mut edge)) = frames.last_mut() {
            let succ = successors(v);
            if *edge < succ.len() {
                let w = succ[*edge] as usize;
                *edge += 1;
                if number[w] == UNVISITED {
                    number[w] = counter;
                    lowlink[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(number[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == number[v] {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                members.sort_unstable();
                components.push(Component {
                    members,
                    leader: v,
                    leader_number: number[v],
                });
            }
        }
    }
    components
}

/// Breadth-first search from `from`, visiting neighbours in the order the
/// adjacency lists store them, confined to nodes accepted by `allowed`.
/// Returns the parent array (`usize::MAX` for unvisited, `from` is its own
/// parent) and the visit order.
pub fn bfs_tree<'a, F, A>(node_count: usize, from: usize, successors: F, allowed: A) -> (Vec<usize>, Vec<usize>)
where
    F: Fn(usize) -> &'a [u32],
    A: Fn(usize) -> bool,
{
    let mut parent = vec![UNVISITED; node_count];
    let mut order = Vec::new();
    parent[from] = from;
    order.push(from);
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &w in successors(v) {
            let w = w as usize;
            if parent[w] == UNVISITED && allowed(w) {
                parent[w] = v;
                order.push(w);
            }
        }
    }
    (parent, order)
}

/// Shortest path `from .. to` by BFS, stopping once `to` is discovered.
/// Neighbours are visited in adjacency order.
pub fn bfs_path<'a, F>(node_count: usize, from: usize, to: usize, successors: F) -> Option<Vec<usize>>
where
    F: Fn(usize) -> &'a [u32],
{
    let mut parent = vec![UNVISITED; node_count];
    parent[from] = from;
    let mut queue = std::collections::VecDeque::from([from]);
    while parent[to] == UNVISITED {
        let v = queue.pop_front()?;
        for &w in successors(v) {
            let w = w as usize;
            if parent[w] == UNVISITED {
                parent[w] = v;
                queue.push_back(w);
            }
        }
    }
    path_from_parents(&parent, from, to)
}

/// Reconstructs the path `from .. to` out of a parent array.
pub fn path_from_parents(parent: &[usize], from: usize, to: usize) -> Option<Vec<usize>> {
    if parent[to] == UNVISITED {
        return None;
    }
    let mut path = vec![to];
    let mut v = to;
    while v != from {
        v = parent[v];
        path.push(v);
    }
    path.reverse();
    Some(path)
}
